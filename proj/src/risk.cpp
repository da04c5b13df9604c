#include "volcast/risk.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "volcast/errors.hpp"

namespace volcast {

int HitSequence::count() const { return std::accumulate(hits.begin(), hits.end(), 0); }

double HitSequence::ratio() const {
    return hits.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(hits.size());
}

double var_forecast(double r_f, double sigma_f, const DistributionSpec& dist, double alpha) {
    if (!(sigma_f >= 0)) throw ConfigError("sigma_f must be nonnegative");
    return -r_f - sigma_f * quantile(dist, alpha);
}

double es_forecast(double r_f, double sigma_f, const DistributionSpec& dist, double alpha) {
    if (!(sigma_f >= 0)) throw ConfigError("sigma_f must be nonnegative");
    return r_f + sigma_f * tail_expectation(dist, alpha);
}

HitSequence hit_sequence(const std::vector<double>& returns, const std::vector<double>& var_series,
                         double alpha) {
    if (returns.size() != var_series.size())
        throw DataError("return and VaR series are misaligned");
    HitSequence out;
    out.alpha = alpha;
    out.hits.reserve(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        out.hits.push_back(returns[t] < -var_series[t] ? 1 : 0);
    return out;
}

std::string format_hit_ratio(int hits, int n) {
    const double pct = 100.0 * static_cast<double>(hits) / static_cast<double>(n);
    const double truncated = std::floor(pct * 100.0) / 100.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", truncated);
    return buf;
}

}  // namespace volcast
