#include "volcast/optimizer.hpp"

#include <cmath>
#include <limits>

namespace volcast {

namespace {

double safe_eval(const ObjectiveFn& f, const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> central_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                     double step) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + step;
        const double fp = safe_eval(f, xp);
        xp[i] = x[i] - step;
        const double fm = safe_eval(f, xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2 * step);
    }
    return g;
}

OptimResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0,
                          const OptimOptions& opts) {
    const std::size_t n = x0.size();
    OptimResult res;
    res.x = std::move(x0);
    res.fx = safe_eval(f, res.x);

    // inverse Hessian approximation, identity start
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

    std::vector<double> g = central_gradient(f, res.x, opts.grad_step);

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter + 1;
        res.grad_inf_norm = inf_norm(g);
        if (res.grad_inf_norm < opts.g_tol) {
            res.converged = true;
            break;
        }

        // direction d = -H g
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= H[i * n + j] * g[j];

        double gd = 0;
        for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
        if (gd >= 0) {
            // not a descent direction: reset to steepest descent
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) H[i * n + j] = (i == j) ? 1.0 : 0.0;
                d[i] = -g[i];
            }
            gd = 0;
            for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
            if (gd >= 0) break;  // zero gradient
        }

        // Armijo backtracking
        double step = 1.0;
        std::vector<double> xn(n);
        double fn = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + step * d[i];
            fn = safe_eval(f, xn);
            if (fn <= res.fx + 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = res.grad_inf_norm < 10 * opts.g_tol;
            break;
        }

        std::vector<double> gn = central_gradient(f, xn, opts.grad_step);

        // BFGS update with s = xn - x, y = gn - g
        std::vector<double> s(n), y(n);
        double sy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - res.x[i];
            y[i] = gn[i] - g[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
            double yHy = 0;
            for (std::size_t i = 0; i < n; ++i) yHy += y[i] * Hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i * n + j] += (1.0 + rho * yHy) * rho * s[i] * s[j] -
                                    rho * (s[i] * Hy[j] + Hy[i] * s[j]);
        }

        const double improvement = res.fx - fn;
        res.x = xn;
        res.fx = fn;
        g = std::move(gn);

        if (improvement >= 0 && improvement < opts.f_tol) {
            res.grad_inf_norm = inf_norm(g);
            res.converged = true;
            break;
        }
    }
    res.grad_inf_norm = inf_norm(g);
    if (res.grad_inf_norm < opts.g_tol) res.converged = true;
    return res;
}

}  // namespace volcast
