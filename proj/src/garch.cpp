#include "volcast/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "volcast/errors.hpp"
#include "volcast/optimizer.hpp"

namespace volcast {

std::string family_name(GarchFamily f) {
    switch (f) {
        case GarchFamily::Garch: return "garch";
        case GarchFamily::Gjr: return "gjr";
        case GarchFamily::Egarch: return "egarch";
        case GarchFamily::Aparch: return "aparch";
    }
    return "?";
}

GarchFamily family_from_name(const std::string& name) {
    if (name == "garch") return GarchFamily::Garch;
    if (name == "gjr") return GarchFamily::Gjr;
    if (name == "egarch") return GarchFamily::Egarch;
    if (name == "aparch") return GarchFamily::Aparch;
    throw ConfigError("unknown GARCH family: '" + name + "'");
}

void GarchParams::validate(const GarchSpec& spec) const {
    const std::size_t p = static_cast<std::size_t>(spec.p), q = static_cast<std::size_t>(spec.q);
    if (alpha.size() != q || beta.size() != p)
        throw ConfigError("coefficient vector sizes do not match spec orders");
    auto sum = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    switch (spec.family) {
        case GarchFamily::Garch: {
            if (!(alpha0 > 0)) throw ConfigError("alpha0 must be positive");
            for (double a : alpha) if (a < 0) throw ConfigError("alpha_i must be nonnegative");
            for (double b : beta) if (b < 0) throw ConfigError("beta_j must be nonnegative");
            if (!(sum(alpha) + sum(beta) < 1)) throw ConfigError("GARCH persistence must be < 1");
            break;
        }
        case GarchFamily::Gjr: {
            if (omega.size() != q) throw ConfigError("omega size must equal q");
            if (!(alpha0 > 0)) throw ConfigError("alpha0 must be positive");
            for (std::size_t i = 0; i < q; ++i) {
                if (alpha[i] < 0) throw ConfigError("alpha_i must be nonnegative");
                if (alpha[i] + omega[i] < 0) throw ConfigError("alpha_i + omega_i must be nonnegative");
            }
            for (double b : beta) if (b < 0) throw ConfigError("beta_j must be nonnegative");
            if (!(sum(alpha) + sum(beta) + 0.5 * sum(omega) < 1))
                throw ConfigError("GJR persistence must be < 1");
            break;
        }
        case GarchFamily::Egarch: {
            double abs_beta = 0;
            for (double b : beta) abs_beta += std::abs(b);
            if (!(abs_beta < 1)) throw ConfigError("EGARCH |beta| sum must be < 1");
            if (std::abs(alpha[0] - 1.0) > 1e-12)
                throw ConfigError("EGARCH alpha_1 is fixed to 1");
            break;
        }
        case GarchFamily::Aparch: {
            if (gamma_i.size() != q) throw ConfigError("gamma size must equal q");
            if (!(alpha0 > 0)) throw ConfigError("alpha0 must be positive");
            if (!(delta > 0)) throw ConfigError("APARCH delta must be positive");
            for (double g : gamma_i)
                if (!(g > -1 && g < 1)) throw ConfigError("APARCH gamma must lie in (-1,1)");
            for (double a : alpha) if (a < 0) throw ConfigError("alpha_i must be nonnegative");
            for (double b : beta) if (b < 0) throw ConfigError("beta_j must be nonnegative");
            if (!(sum(beta) < 1)) throw ConfigError("APARCH beta sum must be < 1");
            break;
        }
    }
    shaped_distribution(spec).validate();
}

DistributionSpec GarchParams::shaped_distribution(const GarchSpec& spec) const {
    DistributionSpec d = spec.distribution;
    if (d.kind != DistKind::Normal && nu > 2) d.nu = nu;
    if (d.kind == DistKind::SkewStudentT && xi > 0) d.xi = xi;
    return d;
}

std::vector<double> mean_residuals(const GarchSpec& spec, const GarchParams& params,
                                   const ReturnSeries& returns) {
    const auto& r = returns.values;
    std::vector<double> eps(r.size());
    if (spec.mean_model == MeanModel::Constant) {
        for (std::size_t t = 0; t < r.size(); ++t) eps[t] = r[t] - params.mu;
    } else {
        const double uncond = std::abs(params.phi) < 1 ? params.mu / (1 - params.phi) : params.mu;
        eps[0] = r[0] - uncond;
        for (std::size_t t = 1; t < r.size(); ++t)
            eps[t] = r[t] - params.mu - params.phi * r[t - 1];
    }
    return eps;
}

namespace {

void check_h(double h, const ReturnSeries& returns, std::size_t t) {
    if (!std::isfinite(h) || !(h > 0))
        throw NumericError("variance recursion left (0, inf) at " +
                           (t < returns.dates.size() ? returns.dates[t].to_string()
                                                     : std::string("forecast step")));
}

std::vector<double> filter_impl(const GarchSpec& spec, const GarchParams& params,
                                const ReturnSeries& returns, const std::vector<double>& eps,
                                double h_init) {
    const std::size_t T = eps.size();
    const std::size_t p = static_cast<std::size_t>(spec.p), q = static_cast<std::size_t>(spec.q);
    const std::size_t m = std::max(p, q);
    if (!(h_init > 0)) throw ConfigError("h_init must be positive");
    std::vector<double> h(T);

    switch (spec.family) {
        case GarchFamily::Garch:
        case GarchFamily::Gjr: {
            for (std::size_t t = 0; t < std::min(m, T); ++t) h[t] = h_init;
            for (std::size_t t = m; t < T; ++t) {
                double v = params.alpha0;
                for (std::size_t i = 1; i <= q; ++i) {
                    const double e = eps[t - i];
                    v += params.alpha[i - 1] * e * e;
                    if (spec.family == GarchFamily::Gjr && e <= 0)
                        v += params.omega[i - 1] * e * e;
                }
                for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * h[t - j];
                check_h(v, returns, t);
                h[t] = v;
            }
            break;
        }
        case GarchFamily::Egarch: {
            const double eabs = abs_moment(params.shaped_distribution(spec));
            std::vector<double> lh(T);
            const double l0 = std::log(h_init);
            for (std::size_t t = 0; t < std::min(m, T); ++t) {
                lh[t] = l0;
                h[t] = h_init;
            }
            for (std::size_t t = m; t < T; ++t) {
                double v = params.alpha0;
                for (std::size_t i = 1; i <= q; ++i) {
                    const double z = eps[t - i] / std::sqrt(h[t - i]);
                    v += params.alpha[i - 1] *
                         (params.theta * z + params.gamma * (std::abs(z) - eabs));
                }
                for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * lh[t - j];
                if (!std::isfinite(v) || v > 700.0)
                    throw NumericError("EGARCH log-variance overflow at " +
                                       returns.dates[t].to_string());
                lh[t] = v;
                h[t] = std::exp(v);
                check_h(h[t], returns, t);
            }
            break;
        }
        case GarchFamily::Aparch: {
            // recursion runs on volatility to the power delta
            const double d = params.delta;
            std::vector<double> sp(T);
            const double sp0 = std::pow(h_init, d / 2);
            for (std::size_t t = 0; t < std::min(m, T); ++t) {
                sp[t] = sp0;
                h[t] = h_init;
            }
            for (std::size_t t = m; t < T; ++t) {
                double v = params.alpha0;
                for (std::size_t i = 1; i <= q; ++i) {
                    const double e = eps[t - i];
                    v += params.alpha[i - 1] *
                         std::pow(std::abs(e) - params.gamma_i[i - 1] * e, d);
                }
                for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * sp[t - j];
                if (!std::isfinite(v) || !(v > 0))
                    throw NumericError("APARCH power recursion left (0, inf) at " +
                                       returns.dates[t].to_string());
                sp[t] = v;
                h[t] = std::pow(v, 2.0 / d);
                check_h(h[t], returns, t);
            }
            break;
        }
    }
    return h;
}

double sample_variance(const std::vector<double>& r) {
    double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    double acc = 0;
    for (double x : r) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(r.size());
}

double log_likelihood_impl(const GarchSpec& spec, const GarchParams& params,
                           const ReturnSeries& returns, double h_init) {
    const auto eps = mean_residuals(spec, params, returns);
    const auto h = filter_impl(spec, params, returns, eps, h_init);
    const LogDensity logf(params.shaped_distribution(spec));
    double ll = 0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        const double sd = std::sqrt(h[t]);
        ll += logf(eps[t] / sd) - 0.5 * std::log(h[t]);
    }
    if (!std::isfinite(ll)) throw NumericError("non-finite log-likelihood");
    return ll;
}

}  // namespace

std::vector<double> variance_filter(const GarchSpec& spec, const GarchParams& params,
                                    const ReturnSeries& returns, double h_init) {
    params.validate(spec);
    return filter_impl(spec, params, returns, mean_residuals(spec, params, returns), h_init);
}

double log_likelihood(const GarchSpec& spec, const GarchParams& params,
                      const ReturnSeries& returns) {
    params.validate(spec);
    double h_init = sample_variance(returns.values);
    // degenerate constant series: seed the recursion from the model's own level
    if (!(h_init > 0)) h_init = params.alpha0 > 0 ? params.alpha0 : 1.0;
    return log_likelihood_impl(spec, params, returns, h_init);
}

// ---------------------------------------------------------------------------
// Estimation: unconstrained reparameterization per family.

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
    p = std::clamp(p, 1e-9, 1.0 - 1e-9);
    return std::log(p / (1.0 - p));
}

// Weights on the simplex via softmax with the last logit pinned to 0.
std::vector<double> softmax_weights(const double* logits, std::size_t m) {
    std::vector<double> w(m);
    double mx = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) mx = std::max(mx, logits[i]);
    double z = std::exp(-mx);
    for (std::size_t i = 0; i + 1 < m; ++i) z += std::exp(logits[i] - mx);
    for (std::size_t i = 0; i + 1 < m; ++i) w[i] = std::exp(logits[i] - mx) / z;
    w[m - 1] = std::exp(-mx) / z;
    return w;
}

class Transform {
public:
    explicit Transform(const GarchSpec& spec) : spec_(spec) {
        p_ = static_cast<std::size_t>(spec.p);
        q_ = static_cast<std::size_t>(spec.q);
        dim_ = (spec.mean_model == MeanModel::Ar1) ? 2 : 1;
        switch (spec.family) {
            case GarchFamily::Garch: dim_ += 2 + (p_ + q_ - 1); break;
            case GarchFamily::Gjr: dim_ += 2 + (p_ + q_ - 1) + q_; break;
            case GarchFamily::Egarch: dim_ += 1 + (q_ - 1) + p_ + 2; break;
            case GarchFamily::Aparch: dim_ += 1 + q_ + p_ + q_ + 1; break;
        }
        if (spec.distribution.kind != DistKind::Normal) dim_ += 1;
        if (spec.distribution.kind == DistKind::SkewStudentT) dim_ += 1;
    }

    [[nodiscard]] std::size_t dim() const { return dim_; }

    [[nodiscard]] GarchParams unpack(const std::vector<double>& x) const {
        GarchParams pr;
        std::size_t k = 0;
        pr.mu = x[k++];
        if (spec_.mean_model == MeanModel::Ar1) pr.phi = 2 * sigmoid(x[k++]) - 1;
        pr.alpha.assign(q_, 0.0);
        pr.beta.assign(p_, 0.0);
        switch (spec_.family) {
            case GarchFamily::Garch: {
                pr.alpha0 = std::exp(x[k++]);
                const double s = sigmoid(x[k++]);
                auto w = softmax_weights(&x[k], q_ + p_);
                k += q_ + p_ - 1;
                for (std::size_t i = 0; i < q_; ++i) pr.alpha[i] = s * w[i];
                for (std::size_t j = 0; j < p_; ++j) pr.beta[j] = s * w[q_ + j];
                break;
            }
            case GarchFamily::Gjr: {
                pr.omega.assign(q_, 0.0);
                pr.alpha0 = std::exp(x[k++]);
                const double s = sigmoid(x[k++]);  // sum alpha + beta + omega/2
                auto w = softmax_weights(&x[k], q_ + p_);
                k += q_ + p_ - 1;
                for (std::size_t i = 0; i < q_; ++i) {
                    const double c = s * w[i];  // alpha_i + omega_i / 2
                    pr.alpha[i] = 2 * c * sigmoid(x[k++]);
                    pr.omega[i] = 2 * (c - pr.alpha[i]);
                }
                for (std::size_t j = 0; j < p_; ++j) pr.beta[j] = s * w[q_ + j];
                break;
            }
            case GarchFamily::Egarch: {
                pr.alpha0 = x[k++];
                pr.alpha[0] = 1.0;
                for (std::size_t i = 1; i < q_; ++i) pr.alpha[i] = x[k++];
                for (std::size_t j = 0; j < p_; ++j)
                    pr.beta[j] = (2 * sigmoid(x[k++]) - 1) / static_cast<double>(p_);
                pr.theta = x[k++];
                pr.gamma = x[k++];
                break;
            }
            case GarchFamily::Aparch: {
                pr.gamma_i.assign(q_, 0.0);
                pr.alpha0 = std::exp(x[k++]);
                for (std::size_t i = 0; i < q_; ++i) pr.alpha[i] = std::exp(x[k++]);
                for (std::size_t j = 0; j < p_; ++j)
                    pr.beta[j] = sigmoid(x[k++]) / static_cast<double>(p_);
                for (std::size_t i = 0; i < q_; ++i) pr.gamma_i[i] = 2 * sigmoid(x[k++]) - 1;
                pr.delta = 4 * sigmoid(x[k++]);
                break;
            }
        }
        if (spec_.distribution.kind != DistKind::Normal)
            pr.nu = 2.1 + (100.0 - 2.1) * sigmoid(x[k++]);
        if (spec_.distribution.kind == DistKind::SkewStudentT)
            pr.xi = std::exp(std::log(0.1) + std::log(100.0) * sigmoid(x[k++]));
        return pr;
    }

    [[nodiscard]] std::vector<double> pack(const GarchParams& pr) const {
        std::vector<double> x;
        x.reserve(dim_);
        x.push_back(pr.mu);
        if (spec_.mean_model == MeanModel::Ar1) x.push_back(logit((pr.phi + 1) / 2));
        auto push_weights = [&](std::vector<double> w) {
            double tail = std::max(w.back(), 1e-9);
            for (std::size_t i = 0; i + 1 < w.size(); ++i)
                x.push_back(std::log(std::max(w[i], 1e-9) / tail));
        };
        switch (spec_.family) {
            case GarchFamily::Garch: {
                x.push_back(std::log(pr.alpha0));
                double s = 0;
                for (double a : pr.alpha) s += a;
                for (double b : pr.beta) s += b;
                x.push_back(logit(s));
                std::vector<double> w;
                for (double a : pr.alpha) w.push_back(a / s);
                for (double b : pr.beta) w.push_back(b / s);
                push_weights(w);
                break;
            }
            case GarchFamily::Gjr: {
                x.push_back(std::log(pr.alpha0));
                std::vector<double> c(q_);
                double s = 0;
                for (std::size_t i = 0; i < q_; ++i) {
                    c[i] = pr.alpha[i] + 0.5 * pr.omega[i];
                    s += c[i];
                }
                for (double b : pr.beta) s += b;
                x.push_back(logit(s));
                std::vector<double> w;
                for (double ci : c) w.push_back(ci / s);
                for (double b : pr.beta) w.push_back(b / s);
                push_weights(w);
                for (std::size_t i = 0; i < q_; ++i)
                    x.push_back(logit(pr.alpha[i] / std::max(2 * c[i], 1e-12)));
                break;
            }
            case GarchFamily::Egarch: {
                x.push_back(pr.alpha0);
                for (std::size_t i = 1; i < q_; ++i) x.push_back(pr.alpha[i]);
                for (std::size_t j = 0; j < p_; ++j)
                    x.push_back(logit((pr.beta[j] * static_cast<double>(p_) + 1) / 2));
                x.push_back(pr.theta);
                x.push_back(pr.gamma);
                break;
            }
            case GarchFamily::Aparch: {
                x.push_back(std::log(pr.alpha0));
                for (std::size_t i = 0; i < q_; ++i) x.push_back(std::log(std::max(pr.alpha[i], 1e-9)));
                for (std::size_t j = 0; j < p_; ++j)
                    x.push_back(logit(pr.beta[j] * static_cast<double>(p_)));
                for (std::size_t i = 0; i < q_; ++i) x.push_back(logit((pr.gamma_i[i] + 1) / 2));
                x.push_back(logit(pr.delta / 4));
                break;
            }
        }
        if (spec_.distribution.kind != DistKind::Normal)
            x.push_back(logit((pr.nu - 2.1) / (100.0 - 2.1)));
        if (spec_.distribution.kind == DistKind::SkewStudentT)
            x.push_back(logit(std::log(pr.xi / 0.1) / std::log(100.0)));
        return x;
    }

private:
    GarchSpec spec_;
    std::size_t p_ = 1, q_ = 1, dim_ = 0;
};

std::vector<GarchParams> starting_points(const GarchSpec& spec, double sample_mean,
                                         double sample_var) {
    const std::size_t p = static_cast<std::size_t>(spec.p), q = static_cast<std::size_t>(spec.q);
    std::vector<GarchParams> starts;
    const double splits[3][2] = {{0.05, 0.90}, {0.10, 0.60}, {0.20, 0.75}};
    for (const auto& ab : splits) {
        GarchParams pr;
        pr.mu = sample_mean;
        pr.phi = 0.0;
        pr.alpha.assign(q, ab[0] / static_cast<double>(q));
        pr.beta.assign(p, ab[1] / static_cast<double>(p));
        pr.nu = 8.0;
        pr.xi = 1.0;
        switch (spec.family) {
            case GarchFamily::Garch:
                pr.alpha0 = sample_var * (1 - ab[0] - ab[1]);
                break;
            case GarchFamily::Gjr:
                pr.omega.assign(q, 0.02 / static_cast<double>(q));
                pr.alpha0 = sample_var * (1 - ab[0] - ab[1] - 0.01);
                break;
            case GarchFamily::Egarch:
                pr.alpha.assign(q, 1.0);
                pr.alpha0 = (1 - ab[1]) * std::log(sample_var);
                pr.theta = -0.05;
                pr.gamma = 2 * ab[0];
                break;
            case GarchFamily::Aparch:
                pr.gamma_i.assign(q, 0.05);
                pr.delta = 2.0;
                pr.alpha0 = std::pow(sample_var, pr.delta / 2) * (1 - ab[0] - ab[1]);
                break;
        }
        starts.push_back(std::move(pr));
    }
    return starts;
}

}  // namespace

GarchFit fit(const GarchSpec& spec, const ReturnSeries& returns, const FitOptions& options) {
    if (returns.size() < options.min_observations)
        throw DataError("estimation window has " + std::to_string(returns.size()) +
                        " observations, below the floor of " +
                        std::to_string(options.min_observations));
    spec.distribution.validate();

    const double h_init = sample_variance(returns.values);
    if (!(h_init > 0)) throw DataError("estimation window has zero variance");
    const double mean =
        std::accumulate(returns.values.begin(), returns.values.end(), 0.0) /
        static_cast<double>(returns.size());

    const Transform tf(spec);
    ObjectiveFn objective = [&](const std::vector<double>& x) {
        try {
            return -log_likelihood_impl(spec, tf.unpack(x), returns, h_init);
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    OptimOptions oo;
    oo.max_iterations = options.max_iterations;
    oo.f_tol = options.f_tol;

    OptimResult best;
    best.fx = std::numeric_limits<double>::infinity();
    std::string diagnostics;
    for (const auto& start : starting_points(spec, mean, h_init)) {
        auto res = bfgs_minimize(objective, tf.pack(start), oo);
        if (!std::isfinite(res.fx)) {
            diagnostics += " start diverged (non-finite likelihood);";
            continue;
        }
        if (res.fx < best.fx ||
            (res.fx == best.fx && res.converged && !best.converged))
            best = std::move(res);
    }
    if (!std::isfinite(best.fx))
        throw ConvergenceError("all starting points failed:" + diagnostics);

    GarchFit out;
    out.spec = spec;
    out.params = tf.unpack(best.x);
    out.log_likelihood = -best.fx;
    out.converged = best.converged;
    out.h_init = h_init;
    const auto eps = mean_residuals(spec, out.params, returns);
    out.h_series = filter_impl(spec, out.params, returns, eps, h_init);
    out.standardized_residuals.resize(eps.size());
    for (std::size_t t = 0; t < eps.size(); ++t)
        out.standardized_residuals[t] = eps[t] / std::sqrt(out.h_series[t]);
    return out;
}

OneStepForecast forecast_one_step(const GarchFit& fit, const ReturnSeries& returns) {
    const GarchSpec& spec = fit.spec;
    const GarchParams& pr = fit.params;
    const auto eps = mean_residuals(spec, pr, returns);
    const auto h = filter_impl(spec, pr, returns, eps, fit.h_init);
    const std::size_t T = eps.size();
    const std::size_t p = static_cast<std::size_t>(spec.p), q = static_cast<std::size_t>(spec.q);

    OneStepForecast fc;
    fc.r_f = pr.mu + (spec.mean_model == MeanModel::Ar1 ? pr.phi * returns.values.back() : 0.0);

    double h_next = 0;
    switch (spec.family) {
        case GarchFamily::Garch:
        case GarchFamily::Gjr: {
            h_next = pr.alpha0;
            for (std::size_t i = 1; i <= q; ++i) {
                const double e = eps[T - i];
                h_next += pr.alpha[i - 1] * e * e;
                if (spec.family == GarchFamily::Gjr && e <= 0) h_next += pr.omega[i - 1] * e * e;
            }
            for (std::size_t j = 1; j <= p; ++j) h_next += pr.beta[j - 1] * h[T - j];
            break;
        }
        case GarchFamily::Egarch: {
            const double eabs = abs_moment(pr.shaped_distribution(spec));
            double lh = pr.alpha0;
            for (std::size_t i = 1; i <= q; ++i) {
                const double z = eps[T - i] / std::sqrt(h[T - i]);
                lh += pr.alpha[i - 1] * (pr.theta * z + pr.gamma * (std::abs(z) - eabs));
            }
            for (std::size_t j = 1; j <= p; ++j) lh += pr.beta[j - 1] * std::log(h[T - j]);
            h_next = std::exp(lh);  // no clamp: the reverse transform is reported as-is
            break;
        }
        case GarchFamily::Aparch: {
            double sp = pr.alpha0;
            for (std::size_t i = 1; i <= q; ++i) {
                const double e = eps[T - i];
                sp += pr.alpha[i - 1] * std::pow(std::abs(e) - pr.gamma_i[i - 1] * e, pr.delta);
            }
            for (std::size_t j = 1; j <= p; ++j)
                sp += pr.beta[j - 1] * std::pow(h[T - j], pr.delta / 2);
            h_next = std::pow(sp, 2.0 / pr.delta);
            break;
        }
    }
    if (!std::isfinite(h_next) || !(h_next > 0))
        throw NumericError("one-step variance forecast left (0, inf)");
    fc.sigma_f = std::sqrt(h_next);
    return fc;
}

SimulatedPath simulate(const GarchSpec& spec, const GarchParams& params, std::size_t T,
                       std::uint64_t seed, double scale, Date start_date) {
    params.validate(spec);
    const std::size_t burnin = 500;
    InnovationSampler gen(params.shaped_distribution(spec), seed);
    const std::size_t p = static_cast<std::size_t>(spec.p), q = static_cast<std::size_t>(spec.q);

    auto sum = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    // rough stationary level to start the recursion; burn-in washes it out
    double h0 = 1.0;
    switch (spec.family) {
        case GarchFamily::Garch:
            h0 = params.alpha0 / (1 - sum(params.alpha) - sum(params.beta));
            break;
        case GarchFamily::Gjr:
            h0 = params.alpha0 /
                 (1 - sum(params.alpha) - sum(params.beta) - 0.5 * sum(params.omega));
            break;
        case GarchFamily::Egarch:
            h0 = std::exp(params.alpha0 / (1 - sum(params.beta)));
            break;
        case GarchFamily::Aparch:
            h0 = std::pow(params.alpha0 / (1 - sum(params.beta)), 2.0 / params.delta);
            break;
    }
    if (!std::isfinite(h0) || !(h0 > 0)) h0 = std::max(params.alpha0, 1e-8);

    const double eabs = spec.family == GarchFamily::Egarch
                            ? abs_moment(params.shaped_distribution(spec))
                            : 0.0;
    const std::size_t total = T + burnin;
    std::vector<double> h(total), eps(total), lh(total), sp(total);
    const std::size_t m = std::max(p, q);
    for (std::size_t t = 0; t < m; ++t) {
        h[t] = h0;
        lh[t] = std::log(h0);
        sp[t] = std::pow(h0, params.delta / 2);
        eps[t] = std::sqrt(h0) * gen.next();
    }
    for (std::size_t t = m; t < total; ++t) {
        double v;
        switch (spec.family) {
            case GarchFamily::Garch:
            case GarchFamily::Gjr: {
                v = params.alpha0;
                for (std::size_t i = 1; i <= q; ++i) {
                    const double e = eps[t - i];
                    v += params.alpha[i - 1] * e * e;
                    if (spec.family == GarchFamily::Gjr && e <= 0)
                        v += params.omega[i - 1] * e * e;
                }
                for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * h[t - j];
                h[t] = v;
                break;
            }
            case GarchFamily::Egarch: {
                v = params.alpha0;
                for (std::size_t i = 1; i <= q; ++i) {
                    const double z = eps[t - i] / std::sqrt(h[t - i]);
                    v += params.alpha[i - 1] *
                         (params.theta * z + params.gamma * (std::abs(z) - eabs));
                }
                for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * lh[t - j];
                lh[t] = v;
                h[t] = std::exp(v);
                break;
            }
            case GarchFamily::Aparch: {
                v = params.alpha0;
                for (std::size_t i = 1; i <= q; ++i) {
                    const double e = eps[t - i];
                    v += params.alpha[i - 1] *
                         std::pow(std::abs(e) - params.gamma_i[i - 1] * e, params.delta);
                }
                for (std::size_t j = 1; j <= p; ++j) v += params.beta[j - 1] * sp[t - j];
                sp[t] = v;
                h[t] = std::pow(v, 2.0 / params.delta);
                break;
            }
        }
        if (!std::isfinite(h[t]) || !(h[t] > 0))
            throw NumericError("simulated variance left (0, inf) at step " + std::to_string(t));
        eps[t] = std::sqrt(h[t]) * gen.next();
    }

    SimulatedPath path;
    path.returns.scale = scale;
    path.returns.dates.resize(T);
    path.returns.values.resize(T);
    path.h_true.resize(T);
    double r_prev = std::abs(params.phi) < 1 ? params.mu / (1 - params.phi) : params.mu;
    Date d = start_date;
    for (std::size_t t = 0; t < total; ++t) {
        const double mean_t =
            params.mu + (spec.mean_model == MeanModel::Ar1 ? params.phi * r_prev : 0.0);
        const double r = mean_t + eps[t];
        r_prev = r;
        if (t >= burnin) {
            const std::size_t k = t - burnin;
            path.returns.dates[k] = d;
            path.returns.values[k] = r;
            path.h_true[k] = h[t];
            d = d.next();
        }
    }
    return path;
}

}  // namespace volcast
