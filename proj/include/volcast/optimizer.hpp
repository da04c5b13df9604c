#pragma once

#include <functional>
#include <vector>

namespace volcast {

struct OptimOptions {
    int max_iterations = 600;
    double grad_step = 1e-6;      // central-difference step
    double f_tol = 1e-8;          // stop when improvement falls below this
    double g_tol = 1e-5;          // stop on gradient infinity norm
};

struct OptimResult {
    std::vector<double> x;
    double fx = 0;
    bool converged = false;
    int iterations = 0;
    double grad_inf_norm = 0;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

// BFGS minimization with central-difference gradients and Armijo
// backtracking. Non-finite objective values are treated as +infinity, which
// keeps line searches inside the feasible region of transformed GARCH
// parameter spaces.
OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0,
                          const OptimOptions& opts = {});

std::vector<double> central_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                     double step);

}  // namespace volcast
