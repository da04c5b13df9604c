#include "volcast/evaluation.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "volcast/errors.hpp"

namespace volcast {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double student_t_upper_tail(double statistic, double dof) {
    boost::math::students_t_distribution<double> t(dof);
    return boost::math::cdf(boost::math::complement(t, statistic));
}

std::uint64_t mix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

double chi_squared_upper_tail(double statistic, int dof) {
    if (statistic <= 0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

PointMetrics point_metrics(const std::vector<double>& targets,
                           const std::vector<double>& forecasts) {
    if (targets.size() != forecasts.size() || targets.empty())
        throw DataError("point metrics require equal, nonempty series");
    PointMetrics m;
    m.n = targets.size();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double e = targets[t] - forecasts[t];
        m.mse += e * e;
        m.mae += std::abs(e);
        if (!(targets[t] > 0))
            throw DataError("HMSE undefined: nonpositive target at index " + std::to_string(t));
        const double rel = e / targets[t];
        m.hmse += rel * rel;
    }
    const double n = static_cast<double>(m.n);
    m.mse /= n;
    m.mae /= n;
    m.hmse /= n;
    return m;
}

TestResult dm_test(const std::vector<double>& errors_a, const std::vector<double>& errors_b,
                   int horizon) {
    const std::size_t n = errors_a.size();
    if (n != errors_b.size() || n < 10)
        throw DataError("DM test requires equal series of length >= 10");

    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t)
        d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
    const double dbar = mean_of(d);
    double var = 0;
    for (double x : d) var += (x - dbar) * (x - dbar);
    var /= static_cast<double>(n);  // lag-0 long-run variance at horizon 1
    if (!(var > 0)) {
        // identical losses: the symmetric null is exactly uninformative
        if (dbar == 0.0) {
            TestResult r;
            r.statistic = 0.0;
            r.p_value = 0.5;
            r.reference = "t(" + std::to_string(n - 1) + ")";
            return r;
        }
        throw NumericError("degenerate DM test: zero variance of loss differential");
    }

    const double nn = static_cast<double>(n);
    const double h = static_cast<double>(horizon);
    double stat = dbar / std::sqrt(var / nn);
    stat *= std::sqrt((nn + 1 - 2 * h + h * (h - 1) / nn) / nn);  // HLN correction

    TestResult r;
    r.statistic = stat;
    r.reference = "t(" + std::to_string(n - 1) + ")";
    // alternative: model b has smaller loss, i.e. mean(d) > 0
    r.p_value = student_t_upper_tail(stat, nn - 1);
    r.reject_at_5pct = r.p_value < 0.05;
    return r;
}

MzRegression mincer_zarnowitz(const std::vector<double>& target_var,
                              const std::vector<double>& forecast_var) {
    const std::size_t n = target_var.size();
    if (n != forecast_var.size() || n < 3)
        throw DataError("MZ regression requires equal series of length >= 3");
    const double xbar = mean_of(forecast_var), ybar = mean_of(target_var);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dx = forecast_var[t] - xbar, dy = target_var[t] - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0)) throw DataError("MZ regression: constant forecast variance (rank deficient)");

    MzRegression r;
    r.beta1 = sxy / sxx;
    r.beta0 = ybar - r.beta1 * xbar;
    r.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return r;
}

TestResult kupiec_test(int exceedances, int n, double alpha) {
    if (n < 1) throw DataError("Kupiec test requires n >= 1");
    const double x = exceedances, nn = n;
    const double pi_hat = x / nn;
    auto xlogy = [](double a, double y) { return a == 0 ? 0.0 : a * std::log(y); };
    const double ll_null = xlogy(nn - x, 1 - alpha) + xlogy(x, alpha);
    const double ll_alt = xlogy(nn - x, 1 - pi_hat) + xlogy(x, pi_hat);
    TestResult r;
    r.statistic = -2.0 * (ll_null - ll_alt);
    r.reference = "chi2(1)";
    r.p_value = chi_squared_upper_tail(r.statistic, 1);
    r.reject_at_5pct = r.p_value < 0.05;
    return r;
}

TestResult kupiec_test(const HitSequence& hits, double alpha) {
    return kupiec_test(hits.count(), static_cast<int>(hits.size()), alpha);
}

TestResult christoffersen_test(const HitSequence& hits, double alpha) {
    const std::size_t n = hits.size();
    if (n < 2) throw DataError("Christoffersen test requires n >= 2");

    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t t = 1; t < n; ++t) {
        const int prev = hits.hits[t - 1], cur = hits.hits[t];
        if (prev == 0 && cur == 0) ++n00;
        else if (prev == 0 && cur == 1) ++n01;
        else if (prev == 1 && cur == 0) ++n10;
        else ++n11;
    }
    auto xlogy = [](double a, double y) { return (a == 0 || y == 0) ? 0.0 : a * std::log(y); };
    const double pi01 = (n00 + n01) > 0 ? n01 / (n00 + n01) : 0;
    const double pi11 = (n10 + n11) > 0 ? n11 / (n10 + n11) : 0;
    const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
    const double ll_markov = xlogy(n00, 1 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1 - pi11) +
                             xlogy(n11, pi11);
    const double ll_iid = xlogy(n00 + n10, 1 - pi) + xlogy(n01 + n11, pi);
    const double lr_ind = std::max(0.0, -2.0 * (ll_iid - ll_markov));
    const double lr_uc = kupiec_test(hits, alpha).statistic;

    TestResult r;
    r.statistic = lr_uc + lr_ind;
    r.reference = "chi2(2)";
    r.p_value = chi_squared_upper_tail(r.statistic, 2);
    r.reject_at_5pct = r.p_value < 0.05;
    return r;
}

McNeilFreyResult mcneil_frey_test(const std::vector<double>& returns,
                                  const std::vector<double>& sigma_forecasts,
                                  const std::vector<double>& es_forecasts,
                                  const HitSequence& hits, std::size_t bootstrap_B,
                                  std::uint64_t seed) {
    const std::size_t n = returns.size();
    if (sigma_forecasts.size() != n || es_forecasts.size() != n || hits.size() != n)
        throw DataError("McNeil-Frey inputs are misaligned");

    std::vector<double> resid;
    for (std::size_t t = 0; t < n; ++t)
        if (hits.hits[t]) resid.push_back((returns[t] - es_forecasts[t]) / sigma_forecasts[t]);
    const std::size_t m = resid.size();
    if (m < 2) throw DataError("McNeil-Frey test requires at least 2 exceedances");

    const double mbar = mean_of(resid);
    double s2 = 0;
    for (double x : resid) s2 += (x - mbar) * (x - mbar);
    s2 /= static_cast<double>(m - 1);

    McNeilFreyResult out;
    out.exceedances = m;
    const double dof = static_cast<double>(m - 1);
    const std::string ref = "t(" + std::to_string(m - 1) + ")";

    if (s2 > 0) {
        const double t_stat = mbar / std::sqrt(s2 / static_cast<double>(m));
        out.exact.statistic = t_stat;
        out.exact.p_value = 2.0 * student_t_upper_tail(std::abs(t_stat), dof);
        out.exact_one_sided.statistic = t_stat;
        out.exact_one_sided.p_value = 1.0 - student_t_upper_tail(t_stat, dof);
    } else {
        // zero spread: degenerate t; any nonzero mean is an immediate rejection
        const double inf = std::numeric_limits<double>::infinity();
        out.exact.statistic = mbar == 0 ? 0.0 : (mbar > 0 ? inf : -inf);
        out.exact.p_value = mbar == 0 ? 1.0 : 0.0;
        out.exact_one_sided.statistic = out.exact.statistic;
        out.exact_one_sided.p_value = mbar == 0 ? 1.0 : (mbar < 0 ? 0.0 : 1.0);
    }
    out.exact.reference = ref;
    out.exact_one_sided.reference = ref;
    out.exact.reject_at_5pct = out.exact.p_value < 0.05;
    out.exact_one_sided.reject_at_5pct = out.exact_one_sided.p_value < 0.05;

    // bootstrap under the null: resample mean-centered residuals
    std::vector<double> centered(resid);
    for (double& x : centered) x -= mbar;
    std::size_t count_two = 0, count_one = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : count_two, count_one)
#endif
    for (std::size_t b = 0; b < bootstrap_B; ++b) {
        // counter-based seeding keeps resamples independent of thread layout
        std::uint64_t state = seed ^ (0xB007B007ULL + b * 0x9E3779B97F4A7C15ULL);
        mix64(state);
        double acc = 0;
        for (std::size_t j = 0; j < m; ++j) acc += centered[mix64(state) % m];
        const double bmean = acc / static_cast<double>(m);
        if (std::abs(bmean) >= std::abs(mbar)) ++count_two;
        if (bmean <= mbar) ++count_one;
    }
    const double B = static_cast<double>(bootstrap_B);
    out.bootstrap.statistic = mbar;
    out.bootstrap.reference = "bootstrap(" + std::to_string(bootstrap_B) + ")";
    out.bootstrap.p_value = static_cast<double>(count_two) / B;
    out.bootstrap.reject_at_5pct = out.bootstrap.p_value < 0.05;
    out.bootstrap_one_sided.statistic = mbar;
    out.bootstrap_one_sided.reference = out.bootstrap.reference;
    out.bootstrap_one_sided.p_value = static_cast<double>(count_one) / B;
    out.bootstrap_one_sided.reject_at_5pct = out.bootstrap_one_sided.p_value < 0.05;
    return out;
}

}  // namespace volcast
