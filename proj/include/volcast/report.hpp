#pragma once

#include <map>
#include <string>
#include <vector>

#include "volcast/evaluation.hpp"
#include "volcast/hybrid.hpp"

namespace volcast {

struct ExpectedCount {
    double real = 0;  // alpha * n
    int floor = 0;
    int round = 0;
};

struct VarBacktest {
    double alpha = 0;
    std::string model;  // "garch" | "hybrid"
    int exceedances = 0;
    ExpectedCount expected;
    std::string hit_ratio;  // truncated percent, paper style
    TestResult kupiec;
    TestResult christoffersen;
};

struct EsBacktest {
    double alpha = 0;
    std::string model;
    McNeilFreyResult result;
};

// One model/asset evaluation mirroring a full results-table row: point
// accuracy, the GARCH-vs-hybrid comparison, and every risk backtest.
struct BacktestReport {
    std::size_t n = 0;
    PointMetrics garch_metrics, hybrid_metrics;
    TestResult dm;  // alternative: hybrid more accurate
    MzRegression mz_garch, mz_hybrid;
    std::vector<VarBacktest> var_backtests;
    std::vector<EsBacktest> es_backtests;  // at 5% only
    int negative_outputs_floored = 0;
};

struct RiskRow {
    Date date;
    double alpha = 0, var = 0, es = 0;
    int hit = 0;
};

struct RiskSeries {
    std::string model;
    std::vector<RiskRow> rows;
};

// Realized returns aligned by date with the forecast records; throws
// DataError when a record's date has no realized return.
std::vector<double> align_realized_returns(const std::vector<ForecastRecord>& records,
                                           const ReturnSeries& returns);

BacktestReport build_backtest_report(const std::vector<ForecastRecord>& records,
                                     const std::vector<double>& realized,
                                     const DistributionSpec& dist,
                                     const std::vector<double>& alphas,
                                     std::size_t bootstrap_B, std::uint64_t seed,
                                     int negative_outputs_floored = 0);

// VaR/ES rows for one model's sigma path, all alphas interleaved by date.
RiskSeries build_risk_series(const std::vector<ForecastRecord>& records,
                             const std::vector<double>& realized, bool hybrid,
                             const DistributionSpec& dist, const std::vector<double>& alphas);

void write_risk_csv(const std::string& path, const RiskSeries& series);
std::string report_to_json(const BacktestReport& report);

}  // namespace volcast
