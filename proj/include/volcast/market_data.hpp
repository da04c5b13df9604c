#pragma once

#include <optional>
#include <string>
#include <vector>

#include "volcast/date.hpp"

namespace volcast {

struct OhlcRecord {
    Date date;
    double open = 0, high = 0, low = 0, close = 0;
};

// Date-ordered OHLC series. Invariants (checked on construction):
// strictly increasing dates, positive prices, low <= min(open, close),
// high >= max(open, close).
class PriceSeries {
public:
    PriceSeries() = default;
    explicit PriceSeries(std::vector<OhlcRecord> records);

    [[nodiscard]] const std::vector<OhlcRecord>& records() const { return records_; }
    [[nodiscard]] std::size_t size() const { return records_.size(); }
    [[nodiscard]] const OhlcRecord& operator[](std::size_t i) const { return records_[i]; }

private:
    std::vector<OhlcRecord> records_;
};

// Log returns on closing prices, in configured scale units (default 100 = percent).
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    double scale = 100.0;

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

// Range-based volatility estimates. The first window_n dates of the source
// price series carry no estimate; only dated estimates are stored.
struct VolatilityEstimateSeries {
    std::vector<Date> dates;
    std::vector<double> sigma;  // >= 0, in return-scale units
    int window_n = 0;

    [[nodiscard]] std::size_t size() const { return sigma.size(); }
};

struct StatsSummary {
    std::size_t count = 0;
    double mean = 0, std = 0;
    std::optional<double> cv;        // |std/mean|; absent when mean == 0
    double min = 0, max = 0;
    std::optional<double> skewness;  // absent when std == 0
    std::optional<double> kurtosis;  // raw 4th standardized moment, not excess
};

struct CsvSchema {
    std::string date = "date";
    std::string open = "open";
    std::string high = "high";
    std::string low = "low";
    std::string close = "close";
};

// Reads an OHLC CSV (header row, ISO dates). Rows are sorted into ascending
// date order. Throws DataError on schema violations, non-positive prices,
// high < low, or duplicate dates (with the offending row number).
PriceSeries load_ohlc_csv(const std::string& path, const CsvSchema& schema = {});

// r_t = scale * ln(C_t / C_{t-1}); length = prices.size() - 1.
ReturnSeries log_returns(const PriceSeries& prices, double scale = 100.0);

StatsSummary descriptive_stats(const ReturnSeries& returns);

// Range estimator over a trailing window of n days ending at day i inclusive.
// sigma is reported in the given return scale. Requires >= n + 1 price records
// (the first term needs the previous close).
VolatilityEstimateSeries gkyz_volatility(const PriceSeries& prices, int n,
                                         double scale = 100.0);

struct ScaledVolatility {
    VolatilityEstimateSeries series;
    double factor = 1.0;  // a / b
};

// Rescales estimates by a/b, where a is the RMS of the first window_T returns
// and b the RMS of the estimator over the same dates.
ScaledVolatility scale_gkyz(const VolatilityEstimateSeries& estimates,
                            const ReturnSeries& returns, int window_T);

void write_series_csv(const std::string& path, const std::vector<Date>& dates,
                      const std::vector<double>& values);

}  // namespace volcast
