#include "volcast/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "volcast/errors.hpp"

namespace volcast {

namespace {

std::uint64_t mix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return (static_cast<double>(mix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

SyntheticOhlc synthesize_ohlc(const GarchSpec& spec, const GarchParams& params, std::size_t days,
                              std::uint64_t seed, double scale, double initial_price,
                              double overnight_fraction, Date start_date) {
    if (days < 2) throw ConfigError("need at least 2 days of synthetic data");
    if (!(overnight_fraction >= 0 && overnight_fraction < 1))
        throw ConfigError("overnight fraction must lie in [0, 1)");

    SyntheticOhlc out;
    auto path = simulate(spec, params, days, seed, scale, start_date.next());
    out.returns = path.returns;

    InnovationSampler gap_gen(DistributionSpec::normal(), seed ^ 0x6A70ULL);
    std::uint64_t bridge_state = seed ^ 0xB71D6EULL;

    std::vector<OhlcRecord> recs;
    OhlcRecord first;
    first.date = start_date;
    first.open = first.high = first.low = first.close = initial_price;
    recs.push_back(first);

    for (std::size_t t = 0; t < days; ++t) {
        const double sigma_log = std::sqrt(path.h_true[t]) / scale;  // log-price units
        const double total_move = path.returns.values[t] / scale;
        const double gap = std::sqrt(overnight_fraction) * sigma_log * gap_gen.next();
        const double intraday = total_move - gap;
        const double v = (1 - overnight_fraction) * sigma_log * sigma_log;

        // max/min of a Brownian bridge from 0 to `intraday` with variance v
        const double u1 = uniform01(bridge_state), u2 = uniform01(bridge_state);
        const double hi =
            0.5 * (intraday + std::sqrt(intraday * intraday - 2 * v * std::log(u1)));
        const double lo =
            0.5 * (intraday - std::sqrt(intraday * intraday - 2 * v * std::log(u2)));

        OhlcRecord r;
        r.date = path.returns.dates[t];
        const double prev_close = recs.back().close;
        r.open = prev_close * std::exp(gap);
        r.close = prev_close * std::exp(total_move);
        r.high = r.open * std::exp(hi);
        r.low = r.open * std::exp(lo);
        recs.push_back(r);

        out.dates.push_back(r.date);
        out.sigma_true.push_back(std::sqrt(path.h_true[t]));
    }
    out.prices = PriceSeries(std::move(recs));
    return out;
}

void write_ohlc_csv(const std::string& path, const PriceSeries& prices) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,open,high,low,close\n";
    out.precision(17);
    for (const auto& r : prices.records())
        out << r.date.to_string() << ',' << r.open << ',' << r.high << ',' << r.low << ','
            << r.close << '\n';
}

void write_true_volatility_csv(const std::string& path, const SyntheticOhlc& data) {
    write_series_csv(path, data.dates, data.sigma_true);
}

}  // namespace volcast
