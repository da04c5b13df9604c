#pragma once

#include <array>
#include <optional>
#include <vector>

#include "volcast/garch.hpp"
#include "volcast/gru.hpp"
#include "volcast/market_data.hpp"

namespace volcast {

struct RollingPlan {
    int garch_window = 504;
    int gru_train_window = 1008;
    int gru_test_window = 504;
    double validation_fraction = 0.33;
    int step = 504;

    void validate() const;
    [[nodiscard]] int validation_size() const;
};

// One-step-ahead rolling GARCH forecasts; entry k is the forecast FOR
// dates[k], made from the window ending the previous day.
struct GarchForecastSeries {
    std::vector<Date> dates;
    std::vector<double> r_f;
    std::vector<double> sigma_f;
    int failed_fits = 0;  // windows whose fit failed and used carried-forward params
};

// Refit on every window of `window` returns, forecast one step ahead. The
// parallel version distributes window fits over OpenMP threads; failures are
// filled afterwards by carrying the previous window's parameters forward, so
// serial and parallel results are identical.
GarchForecastSeries rolling_garch_forecasts(const GarchSpec& spec, const ReturnSeries& returns,
                                            int window, const FitOptions& options = {});
GarchForecastSeries rolling_garch_forecasts_serial(const GarchSpec& spec,
                                                   const ReturnSeries& returns, int window,
                                                   const FitOptions& options = {});

// Row t: features available at end of day t, target = next day's scaled GKYZ.
// The *_next columns carry the GARCH forecast aligned with the target date,
// kept alongside for the baseline comparison and risk stage.
struct FeatureMatrix {
    std::vector<Date> dates;                    // date t of each row
    std::vector<std::array<double, 3>> rows;    // |r_t|, sigma^GKYZ_t, sigma^g_t
    std::vector<double> target;                 // sigma^GKYZ_{t+1}
    std::vector<double> r_f_next;               // GARCH return forecast for t+1
    std::vector<double> sigma_garch_next;       // GARCH sigma forecast for t+1
    int dropped_rows = 0;

    [[nodiscard]] std::size_t size() const { return rows.size(); }
};

FeatureMatrix build_features(const ReturnSeries& returns,
                             const VolatilityEstimateSeries& gkyz_scaled,
                             const GarchForecastSeries& garch_forecasts);

struct ForecastRecord {
    Date date;            // target date t+1
    double r_f = 0;       // GARCH return forecast
    double sigma_garch = 0;
    double sigma_hybrid = 0;
    double sigma_gkyz = 0;  // realized target
};

struct HybridRunResult {
    std::vector<ForecastRecord> records;
    int blocks = 0;
    int negative_outputs_floored = 0;
    std::optional<int> failed_block;  // set when a block's training diverged
    std::vector<std::vector<EpochStats>> block_histories;
};

// Rolling train/test blocks: train a GRU per block (chronological tail of the
// train window held out for validation), predict each available test target,
// advance by plan.step. A trailing partial test block is evaluated with the
// rows it has.
HybridRunResult run_hybrid(const RollingPlan& plan, const GruConfig& config,
                           const FeatureMatrix& features);

void write_forecasts_csv(const std::string& path, const std::vector<ForecastRecord>& records);
std::vector<ForecastRecord> read_forecasts_csv(const std::string& path);

}  // namespace volcast
