#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volcast/risk.hpp"

namespace volcast {

struct PointMetrics {
    double mse = 0, mae = 0, hmse = 0;
    std::size_t n = 0;
};

struct TestResult {
    double statistic = 0;
    double p_value = 1;
    std::string reference;  // e.g. "chi2(1)", "t(49)"
    bool reject_at_5pct = false;

    [[nodiscard]] char verdict() const { return reject_at_5pct ? 'R' : 'F'; }
};

// MSE / MAE / HMSE on the volatility scale; HMSE requires strictly positive
// targets and throws DataError naming the offending index otherwise.
PointMetrics point_metrics(const std::vector<double>& targets,
                           const std::vector<double>& forecasts);

// Diebold-Mariano with the Harvey-Leybourne-Newbold small-sample correction,
// horizon 1, squared-error loss differential d_t = e_a^2 - e_b^2. One-sided
// p-value against "model b is more accurate", Student-t(n-1) reference.
TestResult dm_test(const std::vector<double>& errors_a, const std::vector<double>& errors_b,
                   int horizon = 1);

struct MzRegression {
    double beta0 = 0, beta1 = 0, r_squared = 0;
};

// OLS of realized variance on forecast variance.
MzRegression mincer_zarnowitz(const std::vector<double>& target_var,
                              const std::vector<double>& forecast_var);

// Unconditional coverage likelihood ratio; chi2(1) upper tail.
TestResult kupiec_test(const HitSequence& hits, double alpha);
TestResult kupiec_test(int exceedances, int n, double alpha);

// Conditional coverage LR_cc = LR_uc + LR_ind; chi2(2) upper tail.
TestResult christoffersen_test(const HitSequence& hits, double alpha);

struct McNeilFreyResult {
    TestResult exact;            // one-sample t, two-sided
    TestResult exact_one_sided;  // lower-tail alternative (ES too small in magnitude)
    TestResult bootstrap;        // two-sided, resampled mean distribution
    TestResult bootstrap_one_sided;
    std::size_t exceedances = 0;
};

// Mean-zero test on the standardized ES exceedance residuals
// x_j = (r_j - ES_j) / sigma_j over violation days.
McNeilFreyResult mcneil_frey_test(const std::vector<double>& returns,
                                  const std::vector<double>& sigma_forecasts,
                                  const std::vector<double>& es_forecasts,
                                  const HitSequence& hits, std::size_t bootstrap_B = 10000,
                                  std::uint64_t seed = 0);

// chi-square upper-tail probability via the regularized incomplete gamma
double chi_squared_upper_tail(double statistic, int dof);

}  // namespace volcast
