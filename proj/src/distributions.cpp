#include "volcast/distributions.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "volcast/errors.hpp"

namespace volcast {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Symmetric unit-variance base density/CDF/quantile and its lower partial
// expectation J(q) = integral_{-inf}^q u f(u) du. Everything else in this
// file (Fernandez-Steel skewing included) is expressed through these.
struct Base {
    double nu;  // 0 => normal

    [[nodiscard]] double pdf(double z) const {
        if (nu == 0) return std::exp(-0.5 * z * z) / std::sqrt(2 * kPi);
        const double c = std::sqrt((nu - 2) / nu);
        boost::math::students_t_distribution<double> t(nu);
        return boost::math::pdf(t, z / c) / c;
    }
    [[nodiscard]] double cdf(double z) const {
        if (nu == 0) return boost::math::cdf(boost::math::normal_distribution<double>(), z);
        const double c = std::sqrt((nu - 2) / nu);
        boost::math::students_t_distribution<double> t(nu);
        return boost::math::cdf(t, z / c);
    }
    [[nodiscard]] double quantile(double a) const {
        if (nu == 0) return boost::math::quantile(boost::math::normal_distribution<double>(), a);
        const double c = std::sqrt((nu - 2) / nu);
        boost::math::students_t_distribution<double> t(nu);
        return c * boost::math::quantile(t, a);
    }
    [[nodiscard]] double partial_expectation(double q) const {
        if (nu == 0) {
            return -std::exp(-0.5 * q * q) / std::sqrt(2 * kPi);
        }
        const double c = std::sqrt((nu - 2) / nu);
        boost::math::students_t_distribution<double> t(nu);
        const double a = q / c;
        return -c * boost::math::pdf(t, a) * (nu + a * a) / (nu - 1);
    }
    [[nodiscard]] double abs_mean() const {
        if (nu == 0) return std::sqrt(2.0 / kPi);
        return 2.0 * std::sqrt(nu - 2) *
               std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) /
               (std::sqrt(kPi) * (nu - 1));
    }
};

// Fernandez-Steel skew transform of a unit-variance symmetric base:
//   p(x) = 2/(xi + 1/xi) * [ f(x/xi) for x >= 0, f(xi x) for x < 0 ].
// mean m and scale s re-standardize to mean 0, variance 1.
struct SkewBase {
    Base base;
    double xi;
    double m, s;

    explicit SkewBase(double nu, double xi_) : base{nu}, xi(xi_) {
        const double m1 = base.abs_mean();
        m = m1 * (xi - 1 / xi);
        const double ex2 = (xi * xi * xi + 1 / (xi * xi * xi)) / (xi + 1 / xi);
        s = std::sqrt(ex2 - m * m);
    }

    [[nodiscard]] double raw_pdf(double x) const {
        const double c = 2 / (xi + 1 / xi);
        return c * (x >= 0 ? base.pdf(x / xi) : base.pdf(xi * x));
    }
    [[nodiscard]] double raw_cdf(double x) const {
        const double x2 = xi * xi;
        if (x < 0) return 2 / (1 + x2) * base.cdf(xi * x);
        return 1 / (1 + x2) + 2 * x2 / (1 + x2) * (base.cdf(x / xi) - 0.5);
    }
    [[nodiscard]] double raw_quantile(double a) const {
        const double x2 = xi * xi;
        const double split = 1 / (1 + x2);
        if (a <= split) return base.quantile(a * (1 + x2) / 2) / xi;
        return xi * base.quantile(0.5 + (a - split) * (1 + x2) / (2 * x2));
    }
    // integral_{-inf}^t x p(x) dx for the unstandardized skewed variable
    [[nodiscard]] double raw_partial_expectation(double t) const {
        const double c = 2 / (xi + 1 / xi);
        const double j0 = base.partial_expectation(0.0);
        if (t < 0) return c / (xi * xi) * base.partial_expectation(xi * t);
        return c * (j0 / (xi * xi) + xi * xi * (base.partial_expectation(t / xi) - j0));
    }

    [[nodiscard]] double pdf(double z) const { return s * raw_pdf(s * z + m); }
    [[nodiscard]] double cdf(double z) const { return raw_cdf(s * z + m); }
    [[nodiscard]] double quantile(double a) const { return (raw_quantile(a) - m) / s; }
};

}  // namespace

void DistributionSpec::validate() const {
    if (kind != DistKind::Normal && !(nu > 2))
        throw ConfigError("degrees of freedom must exceed 2");
    if (kind == DistKind::SkewStudentT && !(xi > 0))
        throw ConfigError("skew parameter must be positive");
}

double density(const DistributionSpec& spec, double z) {
    switch (spec.kind) {
        case DistKind::Normal: return Base{0}.pdf(z);
        case DistKind::StudentT: return Base{spec.nu}.pdf(z);
        case DistKind::SkewStudentT: return SkewBase(spec.nu, spec.xi).pdf(z);
    }
    throw NumericError("unreachable distribution kind");
}

double cdf(const DistributionSpec& spec, double z) {
    switch (spec.kind) {
        case DistKind::Normal: return Base{0}.cdf(z);
        case DistKind::StudentT: return Base{spec.nu}.cdf(z);
        case DistKind::SkewStudentT: return SkewBase(spec.nu, spec.xi).cdf(z);
    }
    throw NumericError("unreachable distribution kind");
}

double quantile(const DistributionSpec& spec, double alpha) {
    if (!(alpha > 0 && alpha < 1))
        throw ConfigError("quantile level must lie in (0,1)");
    switch (spec.kind) {
        case DistKind::Normal: return Base{0}.quantile(alpha);
        case DistKind::StudentT: return Base{spec.nu}.quantile(alpha);
        case DistKind::SkewStudentT: return SkewBase(spec.nu, spec.xi).quantile(alpha);
    }
    throw NumericError("unreachable distribution kind");
}

double abs_moment(const DistributionSpec& spec) {
    switch (spec.kind) {
        case DistKind::Normal: return Base{0}.abs_mean();
        case DistKind::StudentT: return Base{spec.nu}.abs_mean();
        case DistKind::SkewStudentT: {
            SkewBase sb(spec.nu, spec.xi);
            // E|X - m| = 2 (m F(m) - PE(m)) for a variable with mean m
            const double e = 2 * (sb.m * sb.raw_cdf(sb.m) - sb.raw_partial_expectation(sb.m));
            return e / sb.s;
        }
    }
    throw NumericError("unreachable distribution kind");
}

double tail_expectation(const DistributionSpec& spec, double alpha) {
    if (!(alpha > 0 && alpha < 1))
        throw ConfigError("tail level must lie in (0,1)");
    switch (spec.kind) {
        case DistKind::Normal:
        case DistKind::StudentT: {
            Base b{spec.kind == DistKind::Normal ? 0 : spec.nu};
            return b.partial_expectation(b.quantile(alpha)) / alpha;
        }
        case DistKind::SkewStudentT: {
            SkewBase sb(spec.nu, spec.xi);
            const double qx = sb.raw_quantile(alpha);
            return (sb.raw_partial_expectation(qx) / alpha - sb.m) / sb.s;
        }
    }
    throw NumericError("unreachable distribution kind");
}

LogDensity::LogDensity(const DistributionSpec& spec) : kind_(spec.kind) {
    spec.validate();
    if (kind_ == DistKind::Normal) {
        log_norm_ = -0.5 * std::log(2 * kPi);
        return;
    }
    nu_ = spec.nu;
    c_ = std::sqrt((nu_ - 2) / nu_);
    log_norm_ = std::lgamma((nu_ + 1) / 2) - std::lgamma(nu_ / 2) -
                0.5 * std::log(nu_ * kPi) - std::log(c_);
    if (kind_ == DistKind::SkewStudentT) {
        SkewBase sb(nu_, spec.xi);
        xi_ = spec.xi;
        m_ = sb.m;
        s_ = sb.s;
        log_skew_norm_ = std::log(s_) + std::log(2 / (xi_ + 1 / xi_));
    }
}

double LogDensity::operator()(double z) const {
    auto base_log_pdf = [this](double u) {
        if (kind_ == DistKind::Normal) return log_norm_ - 0.5 * u * u;
        const double t = u / c_;
        return log_norm_ - 0.5 * (nu_ + 1) * std::log1p(t * t / nu_);
    };
    if (kind_ != DistKind::SkewStudentT) return base_log_pdf(z);
    const double x = s_ * z + m_;
    return log_skew_norm_ + base_log_pdf(x >= 0 ? x / xi_ : xi_ * x);
}

namespace {

// splitmix64; the stream is part of the artifact's determinism contract
std::uint64_t next_u64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double next_uniform(std::uint64_t& state) {
    // strictly inside (0,1) so quantile stays finite
    return (static_cast<double>(next_u64(state) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

InnovationSampler::InnovationSampler(const DistributionSpec& spec, std::uint64_t seed)
    : spec_(spec), state_(seed ^ 0xA5A5A5A55A5A5A5AULL) {
    spec_.validate();
}

double InnovationSampler::next() { return quantile(spec_, next_uniform(state_)); }

std::vector<double> sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t n) {
    InnovationSampler gen(spec, seed);
    std::vector<double> out(n);
    for (auto& x : out) x = gen.next();
    return out;
}

}  // namespace volcast
