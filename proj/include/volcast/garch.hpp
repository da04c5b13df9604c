#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volcast/distributions.hpp"
#include "volcast/market_data.hpp"

namespace volcast {

enum class GarchFamily { Garch, Gjr, Egarch, Aparch };
enum class MeanModel { Constant, Ar1 };

std::string family_name(GarchFamily f);
GarchFamily family_from_name(const std::string& name);

struct GarchSpec {
    GarchFamily family = GarchFamily::Garch;
    int p = 1;  // GARCH lags
    int q = 1;  // ARCH lags
    MeanModel mean_model = MeanModel::Constant;
    DistributionSpec distribution;
};

// Coefficients for one GARCH-family model. Only the fields relevant to the
// owning spec's family are meaningful; validate() enforces the family's
// positivity/stationarity constraints.
struct GarchParams {
    double mu = 0;
    double phi = 0;                 // AR(1) coefficient
    double alpha0 = 0;
    std::vector<double> alpha;      // ARCH coefficients, size q (EGARCH: alpha[0] == 1)
    std::vector<double> beta;       // GARCH coefficients, size p
    std::vector<double> omega;      // GJR asymmetry, size q
    double theta = 0, gamma = 0;    // EGARCH sign/size terms
    std::vector<double> gamma_i;    // APARCH asymmetry, size q
    double delta = 2;               // APARCH power
    double nu = 0, xi = 1;          // estimated distribution shape

    void validate(const GarchSpec& spec) const;  // throws ConfigError on violation
    [[nodiscard]] DistributionSpec shaped_distribution(const GarchSpec& spec) const;
};

struct GarchFit {
    GarchSpec spec;
    GarchParams params;
    double log_likelihood = 0;
    bool converged = false;
    std::vector<double> h_series;                // fitted conditional variances
    std::vector<double> standardized_residuals;  // eps_t / sqrt(h_t)
    double h_init = 0;                           // recursion start used at fit time
};

// Conditional-variance recursion for the spec's family. h_init seeds the
// first max(p, q) variances and any presample squared shocks. Throws
// NumericError (naming the date) on overflow.
std::vector<double> variance_filter(const GarchSpec& spec, const GarchParams& params,
                                    const ReturnSeries& returns, double h_init);

// Residuals under the mean model; the first AR(1) residual is taken against
// the unconditional mean mu / (1 - phi).
std::vector<double> mean_residuals(const GarchSpec& spec, const GarchParams& params,
                                   const ReturnSeries& returns);

double log_likelihood(const GarchSpec& spec, const GarchParams& params,
                      const ReturnSeries& returns);

struct FitOptions {
    int max_iterations = 600;
    double f_tol = 1e-8;
    std::size_t min_observations = 100;
};

// Maximum likelihood on unconstrained transformed parameters; three fixed
// deterministic starting points, best kept. Throws ConvergenceError when all
// starts fail outright.
GarchFit fit(const GarchSpec& spec, const ReturnSeries& returns, const FitOptions& options = {});

struct OneStepForecast {
    double r_f = 0;      // return forecast
    double sigma_f = 0;  // volatility forecast, sqrt(h_{T+1})
};

OneStepForecast forecast_one_step(const GarchFit& fit, const ReturnSeries& returns);

struct SimulatedPath {
    ReturnSeries returns;
    std::vector<double> h_true;  // conditional variances used by the generator
};

// Deterministic per seed; innovations drawn from the spec's distribution, a
// 500-step burn-in discarded. Dates start at start_date, daily.
SimulatedPath simulate(const GarchSpec& spec, const GarchParams& params, std::size_t T,
                       std::uint64_t seed, double scale = 100.0,
                       Date start_date = Date(2000, 1, 3));

}  // namespace volcast
