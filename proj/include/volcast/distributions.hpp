#pragma once

#include <cstdint>
#include <vector>

namespace volcast {

enum class DistKind { Normal, StudentT, SkewStudentT };

// Zero-mean, unit-variance innovation distribution. Student-t is the
// classical t(nu) scaled by sqrt((nu-2)/nu); the skewed variant applies the
// Fernandez-Steel inverse-scale construction to the standardized t and
// re-centers/re-scales back to mean 0, variance 1. xi = 1 reduces to the
// symmetric t.
struct DistributionSpec {
    DistKind kind = DistKind::Normal;
    double nu = 0;  // degrees of freedom, > 2; unused for Normal
    double xi = 1;  // skewness, > 0; SkewStudentT only

    static DistributionSpec normal() { return {DistKind::Normal, 0, 1}; }
    static DistributionSpec student_t(double nu) { return {DistKind::StudentT, nu, 1}; }
    static DistributionSpec skew_t(double nu, double xi) { return {DistKind::SkewStudentT, nu, xi}; }

    void validate() const;  // throws ConfigError on bad nu/xi
};

double density(const DistributionSpec& spec, double z);
double cdf(const DistributionSpec& spec, double z);

// z such that CDF(z) = alpha, alpha in (0,1). Throws ConfigError outside (0,1).
double quantile(const DistributionSpec& spec, double alpha);

// E|z| under the standardized distribution (EGARCH Eq. term).
double abs_moment(const DistributionSpec& spec);

// E(z | z < quantile(spec, alpha)) — conditional lower-tail mean.
double tail_expectation(const DistributionSpec& spec, double alpha);

// Log-density evaluator with constants precomputed once; the hot path of
// GARCH likelihood evaluation.
class LogDensity {
public:
    explicit LogDensity(const DistributionSpec& spec);
    double operator()(double z) const;

private:
    DistKind kind_;
    double nu_ = 0, c_ = 1, log_norm_ = 0;  // symmetric base constants
    double m_ = 0, s_ = 1, xi_ = 1, log_skew_norm_ = 0;
};

// Deterministic inverse-CDF sampling. A given (spec, seed, n) always yields
// the same sequence.
std::vector<double> sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t n);

// Stateful sampler for simulation loops; same stream as sample().
class InnovationSampler {
public:
    InnovationSampler(const DistributionSpec& spec, std::uint64_t seed);
    double next();

private:
    DistributionSpec spec_;
    std::uint64_t state_;
};

}  // namespace volcast
