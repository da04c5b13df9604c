#pragma once

#include <string>
#include <vector>

#include "volcast/date.hpp"
#include "volcast/distributions.hpp"

namespace volcast {

struct RiskForecast {
    Date date;
    double alpha = 0;
    double var = 0;  // positive loss magnitude
    double es = 0;   // return level (negative in the tail)
};

struct HitSequence {
    std::vector<int> hits;  // 0/1
    double alpha = 0;

    [[nodiscard]] std::size_t size() const { return hits.size(); }
    [[nodiscard]] int count() const;
    [[nodiscard]] double ratio() const;
};

// VaR = -r_f - sigma_f * q_alpha; a positive value is a loss threshold.
double var_forecast(double r_f, double sigma_f, const DistributionSpec& dist, double alpha);

// ES = r_f + sigma_f * E(z | z < q_alpha); stays on the return scale.
double es_forecast(double r_f, double sigma_f, const DistributionSpec& dist, double alpha);

// h_t = 1 iff r_t < -VaR_t (strict breach).
HitSequence hit_sequence(const std::vector<double>& returns, const std::vector<double>& var_series,
                         double alpha);

// Paper-style percentage rendering of a hit ratio: truncated (not rounded)
// to two decimals, e.g. 21/1194 -> "1.75%".
std::string format_hit_ratio(int hits, int n);

}  // namespace volcast
