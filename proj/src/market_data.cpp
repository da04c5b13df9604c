#include "volcast/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "volcast/errors.hpp"

namespace volcast {

PriceSeries::PriceSeries(std::vector<OhlcRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        if (r.open <= 0 || r.high <= 0 || r.low <= 0 || r.close <= 0)
            throw DataError("non-positive price at " + r.date.to_string());
        if (r.low > std::min(r.open, r.close) || r.high < std::max(r.open, r.close))
            throw DataError("OHLC range violation at " + r.date.to_string());
        if (i > 0 && !(records_[i - 1].date < r.date))
            throw DataError("dates not strictly increasing at " + r.date.to_string());
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace and CR
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_price(const std::string& s, const std::string& col, std::size_t row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw DataError("row " + std::to_string(row) + ": unparseable " + col + " value '" + s + "'");
    }
}

}  // namespace

PriceSeries load_ohlc_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    auto header = split_csv_line(line);

    auto find_col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw DataError("missing column '" + name + "' in " + path);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_date = find_col(schema.date), c_open = find_col(schema.open),
                      c_high = find_col(schema.high), c_low = find_col(schema.low),
                      c_close = find_col(schema.close);

    std::vector<OhlcRecord> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (cells.size() < header.size())
            throw DataError("row " + std::to_string(row_no) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(cells.size()));
        OhlcRecord r;
        r.date = Date::parse(cells[c_date]);
        r.open = parse_price(cells[c_open], schema.open, row_no);
        r.high = parse_price(cells[c_high], schema.high, row_no);
        r.low = parse_price(cells[c_low], schema.low, row_no);
        r.close = parse_price(cells[c_close], schema.close, row_no);
        if (r.open <= 0 || r.high <= 0 || r.low <= 0 || r.close <= 0)
            throw DataError("row " + std::to_string(row_no) + ": non-positive price");
        if (r.low > std::min(r.open, r.close) || r.high < std::max(r.open, r.close))
            throw DataError("row " + std::to_string(row_no) + ": OHLC range violation (low > high bounds)");
        rows.push_back(r);
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const OhlcRecord& a, const OhlcRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i - 1].date == rows[i].date)
            throw DataError("duplicate date " + rows[i].date.to_string() + " in " + path);

    return PriceSeries(std::move(rows));
}

ReturnSeries log_returns(const PriceSeries& prices, double scale) {
    if (prices.size() < 2) throw DataError("need at least 2 price records for returns");
    if (!(scale > 0)) throw ConfigError("return scale must be positive");
    ReturnSeries out;
    out.scale = scale;
    out.dates.reserve(prices.size() - 1);
    out.values.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        out.dates.push_back(prices[i].date);
        out.values.push_back(scale * std::log(prices[i].close / prices[i - 1].close));
    }
    return out;
}

StatsSummary descriptive_stats(const ReturnSeries& returns) {
    const auto& v = returns.values;
    const std::size_t n = v.size();
    if (n < 2) throw DataError("descriptive stats need at least 2 observations");

    StatsSummary s;
    s.count = n;
    double sum = 0;
    s.min = v[0];
    s.max = v[0];
    for (double x : v) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(n);

    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    s.std = std::sqrt(m2);

    if (s.mean != 0.0) s.cv = std::abs(s.std / s.mean);
    if (s.std > 0.0) {
        s.skewness = m3 / (m2 * s.std);
        s.kurtosis = m4 / (m2 * m2);  // raw, not excess
    }
    return s;
}

VolatilityEstimateSeries gkyz_volatility(const PriceSeries& prices, int n, double scale) {
    if (n < 1) throw ConfigError("gkyz window must be positive");
    if (prices.size() < static_cast<std::size_t>(n) + 1)
        throw DataError("gkyz window longer than price history");

    const double k = 2.0 * std::log(2.0) - 1.0;
    // per-day term: overnight gap + range + close-to-open drift correction
    std::vector<double> term(prices.size(), 0.0);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const auto& r = prices[i];
        const double gap = std::log(r.open / prices[i - 1].close);
        const double range = std::log(r.high / r.low);
        const double body = std::log(r.close / r.open);
        term[i] = gap * gap + 0.5 * range * range - k * body * body;
    }

    VolatilityEstimateSeries out;
    out.window_n = n;
    for (std::size_t i = static_cast<std::size_t>(n); i < prices.size(); ++i) {
        double acc = 0;
        for (std::size_t j = i + 1 - static_cast<std::size_t>(n); j <= i; ++j) acc += term[j];
        const double var = acc / static_cast<double>(n);
        out.dates.push_back(prices[i].date);
        // negative variance can arise from the drift correction on odd data; clamp at 0
        out.sigma.push_back(scale * std::sqrt(std::max(var, 0.0)));
    }
    return out;
}

ScaledVolatility scale_gkyz(const VolatilityEstimateSeries& estimates,
                            const ReturnSeries& returns, int window_T) {
    if (window_T < 1) throw ConfigError("scaling window must be positive");

    // Align by date: the first window_T dates present in both series.
    std::map<std::int64_t, double> ret_by_date;
    for (std::size_t i = 0; i < returns.size(); ++i)
        ret_by_date[returns.dates[i].serial()] = returns.values[i];

    double sum_r2 = 0, sum_s2 = 0;
    int used = 0;
    for (std::size_t i = 0; i < estimates.size() && used < window_T; ++i) {
        auto it = ret_by_date.find(estimates.dates[i].serial());
        if (it == ret_by_date.end()) continue;
        sum_r2 += it->second * it->second;
        sum_s2 += estimates.sigma[i] * estimates.sigma[i];
        ++used;
    }
    if (used < window_T)
        throw DataError("scaling window exceeds the overlap of returns and estimates");
    if (sum_s2 <= 0.0) throw DataError("degenerate GKYZ scale: estimator RMS is zero");

    ScaledVolatility out;
    out.factor = std::sqrt(sum_r2 / static_cast<double>(window_T)) /
                 std::sqrt(sum_s2 / static_cast<double>(window_T));
    out.series = estimates;
    for (double& s : out.series.sigma) s *= out.factor;
    return out;
}

void write_series_csv(const std::string& path, const std::vector<Date>& dates,
                      const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,value\n";
    out.precision(17);
    for (std::size_t i = 0; i < dates.size(); ++i)
        out << dates[i].to_string() << ',' << values[i] << '\n';
}

}  // namespace volcast
