// Acceptance harness: one pass/fail line per criterion, exit 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "volcast/distributions.hpp"
#include "volcast/evaluation.hpp"
#include "volcast/garch.hpp"
#include "volcast/gru.hpp"
#include "volcast/hybrid.hpp"
#include "volcast/market_data.hpp"
#include "volcast/report.hpp"
#include "volcast/risk.hpp"

using namespace volcast;

namespace {

int g_checks_failed = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++g_checks_failed;
        std::printf("    check failed: %s\n", what.c_str());
    }
}

void expect_near(double got, double want, double tol, const std::string& what) {
    std::ostringstream msg;
    msg << what << " (got " << got << ", want " << want << " +/- " << tol << ")";
    expect(std::abs(got - want) <= tol, msg.str());
}

// ---------------------------------------------------------------------------
// 1. Exceedance-count likelihood-ratio p-value oracles
void criterion_kupiec() {
    const struct { int x, n; double alpha, p; } cases[] = {
        {59, 1194, 0.05, 0.9258}, {56, 1194, 0.05, 0.6197}, {21, 1194, 0.01, 0.0173},
        {12, 1194, 0.01, 0.9860}, {16, 1194, 0.01, 0.2616},
    };
    for (const auto& c : cases) {
        std::ostringstream what;
        what << "kupiec(" << c.x << "," << c.n << "," << c.alpha << ") p-value";
        expect_near(kupiec_test(c.x, c.n, c.alpha).p_value, c.p, 0.0005, what.str());
    }
}

// ---------------------------------------------------------------------------
// 2. Display oracles: truncated hit ratios and expected-count rendering,
//    checked through the full report builder on a 1194-day synthetic panel.
void criterion_display() {
    expect(format_hit_ratio(59, 1194) == "4.94%", "59/1194 renders as 4.94%");
    expect(format_hit_ratio(21, 1194) == "1.75%", "21/1194 renders as 1.75%");

    const std::size_t n = 1194;
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n01;
    std::vector<ForecastRecord> records(n);
    std::vector<double> realized(n);
    Date d(2015, 1, 5);
    for (std::size_t t = 0; t < n; ++t) {
        records[t].date = d;
        d = d.next();
        records[t].sigma_garch = 1.0 + 0.05 * std::abs(n01(gen));
        records[t].sigma_hybrid = 1.0 + 0.05 * std::abs(n01(gen));
        records[t].sigma_gkyz = std::abs(n01(gen)) + 0.5;
        realized[t] = n01(gen);
    }
    const auto rep = build_backtest_report(records, realized, DistributionSpec::normal(),
                                           {0.05, 0.01}, 500, 99);
    const auto j = nlohmann::json::parse(report_to_json(rep));
    for (const auto& vb : j.at("var_backtests")) {
        const double alpha = vb.at("alpha").get<double>();
        const auto& e = vb.at("expected");
        if (alpha == 0.05) {
            expect_near(e.at("real").get<double>(), 59.7, 1e-12, "expected real count at 5%");
            expect(e.at("floor").get<int>() == 59, "expected floor count at 5% is 59");
        } else {
            expect_near(e.at("real").get<double>(), 11.94, 1e-12, "expected real count at 1%");
            expect(e.at("round").get<int>() == 12, "expected rounded count at 1% is 12");
        }
    }
}

// ---------------------------------------------------------------------------
// 3. Distribution oracles vs hard constants and an in-repo quadrature oracle
void criterion_distributions() {
    const auto normal = DistributionSpec::normal();
    const double q = quantile(normal, 0.05);
    expect_near(q, -1.6449, 1e-4, "normal 5% quantile");
    const double es = tail_expectation(normal, 0.05);
    expect_near(es, -2.0627, 1e-3, "normal 5% tail expectation");

    // quadrature oracle: P(Z <= q) and E[Z | Z <= q] by adaptive Simpson
    const double mass = testutil::integrate([&](double z) { return density(normal, z); },
                                            -12.0, q, 1e-12);
    expect_near(mass, 0.05, 1e-8, "quadrature mass below the 5% quantile");
    const double tail_mean = testutil::integrate([&](double z) { return z * density(normal, z); },
                                                 -12.0, q, 1e-12) / mass;
    expect_near(es, tail_mean, 1e-8, "tail expectation vs quadrature oracle");

    // xi = 1 skewed variant degenerates to the symmetric t in every operation
    const auto skew = DistributionSpec::skew_t(6.0, 1.0);
    const auto sym = DistributionSpec::student_t(6.0);
    for (double z : {-2.5, -0.7, 0.0, 1.3, 3.1}) {
        expect_near(density(skew, z), density(sym, z), 1e-10, "xi=1 density");
        expect_near(cdf(skew, z), cdf(sym, z), 1e-10, "xi=1 cdf");
    }
    for (double a : {0.01, 0.05, 0.5, 0.9}) {
        expect_near(quantile(skew, a), quantile(sym, a), 1e-10, "xi=1 quantile");
        expect_near(tail_expectation(skew, a), tail_expectation(sym, a), 1e-10,
                    "xi=1 tail expectation");
    }
}

// ---------------------------------------------------------------------------
// 4. Maximum-likelihood recovery of known generator coefficients
void criterion_garch_recovery() {
    GarchParams truth;
    truth.alpha0 = 0.05;
    truth.alpha = {0.10};
    truth.beta = {0.85};
    const GarchSpec spec;

    std::vector<double> e0, e1, e2;
    for (std::uint64_t seed : {11u, 23u, 47u, 81u, 135u}) {
        const auto path = simulate(spec, truth, 5000, seed);
        const auto f = fit(spec, path.returns);
        expect(f.converged, "fit converged for seed " + std::to_string(seed));
        e0.push_back(std::abs(f.params.alpha0 - truth.alpha0));
        e1.push_back(std::abs(f.params.alpha[0] - truth.alpha[0]));
        e2.push_back(std::abs(f.params.beta[0] - truth.beta[0]));
        const double ll_truth = log_likelihood(spec, truth, path.returns);
        expect(f.log_likelihood >= ll_truth - 1e-6,
               "fitted log-likelihood at least the generator's, seed " + std::to_string(seed));
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    expect(median(e0) <= 0.05, "median level-coefficient error <= 0.05");
    expect(median(e1) <= 0.05, "median shock-coefficient error <= 0.05");
    expect(median(e2) <= 0.05, "median persistence-coefficient error <= 0.05");
}

// ---------------------------------------------------------------------------
// 5. Nested-model reductions agree on a shared simulated series
void criterion_reductions() {
    GarchParams p;
    p.alpha0 = 0.05;
    p.alpha = {0.10};
    p.beta = {0.85};
    const GarchSpec garch;
    const auto path = simulate(garch, p, 1000, 5);
    const double h0 = 1.0;

    const auto h_garch = variance_filter(garch, p, path.returns, h0);

    GarchSpec gjr = garch;
    gjr.family = GarchFamily::Gjr;
    GarchParams pg = p;
    pg.omega = {0.0};
    const auto h_gjr = variance_filter(gjr, pg, path.returns, h0);

    GarchSpec aparch = garch;
    aparch.family = GarchFamily::Aparch;
    GarchParams pa = p;
    pa.delta = 2.0;
    pa.gamma_i = {0.0};
    const auto h_aparch = variance_filter(aparch, pa, path.returns, h0);

    double worst = 0;
    for (std::size_t t = 0; t < h_garch.size(); ++t) {
        worst = std::max(worst, std::abs(h_gjr[t] - h_garch[t]));
        worst = std::max(worst, std::abs(h_aparch[t] - h_garch[t]));
    }
    expect(worst < 1e-10, "asymmetric filters with neutral parameters match the symmetric one");
}

// ---------------------------------------------------------------------------
// 6. Analytic BPTT gradient vs central finite differences
void criterion_gru_gradient() {
    GruConfig c;
    c.layer_sizes = {8, 4};
    c.input_dim = 3;
    c.sequence_length = 6;
    c.l2_lambda = 0.001;
    c.dropout_rate = 0.0;  // keep the loss smooth for finite differencing
    c.seed = 41;
    auto w = init_weights(c);

    std::mt19937_64 gen(6);
    std::normal_distribution<double> n01;
    TrainingSet set;
    for (int i = 0; i < 20; ++i) {
        TrainingSequence s;
        s.features = Mat(c.sequence_length, c.input_dim);
        for (auto& v : s.features.a) v = n01(gen);
        s.target = n01(gen);
        set.sequences.push_back(std::move(s));
    }
    std::vector<const TrainingSequence*> batch;
    for (const auto& s : set.sequences) batch.push_back(&s);

    auto [l0, grad] = loss_and_gradient(w, c, batch, 0);
    (void)l0;
    std::vector<std::vector<double>*> wt, gt;
    w.for_each_tensor([&](std::vector<double>& t) { wt.push_back(&t); });
    grad.for_each_tensor([&](std::vector<double>& t) { gt.push_back(&t); });

    const double step = 1e-5;
    double max_rel = 0;
    for (std::size_t t = 0; t < wt.size(); ++t) {
        for (std::size_t i = 0; i < wt[t]->size(); ++i) {
            const double saved = (*wt[t])[i];
            (*wt[t])[i] = saved + step;
            const double lp = loss_and_gradient(w, c, batch, 0).first;
            (*wt[t])[i] = saved - step;
            const double lm = loss_and_gradient(w, c, batch, 0).first;
            (*wt[t])[i] = saved;
            const double fd = (lp - lm) / (2 * step);
            const double ga = (*gt[t])[i];
            max_rel = std::max(max_rel, std::abs(fd - ga) /
                                            std::max(1e-6, std::abs(fd) + std::abs(ga)));
        }
    }
    std::ostringstream what;
    what << "max relative gradient error " << max_rel << " < 1e-4";
    expect(max_rel < 1e-4, what.str());
}

// ---------------------------------------------------------------------------
// 7. End-to-end desk-scale pipeline via the installed command-line binary
void criterion_end_to_end() {
    testutil::TempDir dir("volcast_acceptance");
    const std::string cfg = dir.file("cfg.txt");
    testutil::write_file(cfg,
                         "asset = accept\n"
                         "input_csv = " + dir.file("accept_ohlc.csv") + "\n"
                         "out_dir = " + dir.path.string() + "\n"
                         "sim_days = 1500\n"
                         "gkyz_window = 21\n"
                         "garch_window = 252\n"
                         "gru_train_window = 504\n"
                         "gru_test_window = 252\n"
                         "step = 252\n"
                         "validation_fraction = 0.33\n"
                         "gru_layers = 16,8\n"
                         "gru_epochs = 20\n"
                         "bootstrap_b = 1000\n"
                         "seed = 17\n");
    auto run = [&](const std::string& sub) {
        const std::string cmd = std::string(VOLCAST_CLI_PATH) + " " + sub + " --config " + cfg +
                                " >" + dir.file("log.txt") + " 2>&1";
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    expect(run("simulate") == 0, "simulate exits 0");
    expect(run("run") == 0, "run exits 0");

    for (const char* a : {"accept_forecasts.csv", "accept_risk_garch.csv",
                          "accept_risk_hybrid.csv", "accept_report.json",
                          "accept_plot_volatility.csv", "accept_plot_var_garch.csv",
                          "accept_plot_var_hybrid.csv"})
        expect(std::filesystem::exists(dir.file(a)), std::string("artifact exists: ") + a);

    // rolling arithmetic: forecasts = usable feature rows minus the train window
    const auto prices = load_ohlc_csv(dir.file("accept_ohlc.csv"));
    const auto returns = log_returns(prices, 100.0);
    const auto gkyz = gkyz_volatility(prices, 21, 100.0);
    const auto scaled = scale_gkyz(gkyz, returns, 252);
    const auto garch_fc = rolling_garch_forecasts(GarchSpec{}, returns, 252);
    const auto features = build_features(returns, scaled.series, garch_fc);
    const std::size_t expected_n = features.size() - 504;

    const auto report_text = testutil::slurp(dir.file("accept_report.json"));
    const auto j = nlohmann::json::parse(report_text);
    expect(j.at("n").get<std::size_t>() == expected_n, "record count matches rolling arithmetic");

    // every statistic present
    for (const char* m : {"garch", "hybrid"})
        for (const char* k : {"mse", "mae", "hmse"})
            expect(j.at("point_metrics").at(m).contains(k),
                   std::string("point metric present: ") + m + "/" + k);
    expect(j.at("dm_test").contains("p_value"), "DM test present");
    expect(j.at("mincer_zarnowitz").at("garch").contains("r_squared") &&
               j.at("mincer_zarnowitz").at("hybrid").contains("r_squared"),
           "MZ r_squared present for both models");
    int var_entries = 0;
    for (const auto& vb : j.at("var_backtests")) {
        ++var_entries;
        expect(vb.at("kupiec").contains("p_value") && vb.at("christoffersen").contains("p_value"),
               "coverage tests present in every entry");
    }
    expect(var_entries == 4, "coverage backtests for both models at 5% and 1%");
    int es_entries = 0;
    for (const auto& eb : j.at("es_backtests")) {
        ++es_entries;
        expect(eb.at("exact").contains("p_value") && eb.at("bootstrap").contains("p_value"),
               "shortfall tests present (exact and bootstrap)");
    }
    expect(es_entries >= 2, "shortfall backtests for both models at 5%");

    // determinism: a second run reproduces the report byte for byte
    expect(run("run") == 0, "second run exits 0");
    expect(report_text == testutil::slurp(dir.file("accept_report.json")),
           "reports byte-identical across reruns");
}

// ---------------------------------------------------------------------------
// 8. Coverage calibration under the generator's own risk forecasts
void criterion_calibration() {
    GarchParams truth;
    truth.alpha0 = 0.05;
    truth.alpha = {0.10};
    truth.beta = {0.85};
    const GarchSpec spec;
    const std::size_t T = 100000;
    const auto path = simulate(spec, truth, T, 2024);

    for (double alpha : {0.05, 0.01}) {
        std::vector<double> var_series(T);
        for (std::size_t t = 0; t < T; ++t)
            var_series[t] =
                var_forecast(0.0, std::sqrt(path.h_true[t]), spec.distribution, alpha);
        const auto hits = hit_sequence(path.returns.values, var_series, alpha);
        std::ostringstream what;
        what << "hit ratio " << hits.ratio() << " within 0.005 of " << alpha;
        expect(std::abs(hits.ratio() - alpha) < 0.005, what.str());
    }
}

// ---------------------------------------------------------------------------
// 9. Cross-checks of the test statistics on randomized inputs
void criterion_statistic_properties() {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> n01;

        // forecast-comparison statistic flips sign when the models swap
        std::vector<double> ea(40), eb(40);
        for (auto& v : ea) v = n01(gen);
        for (auto& v : eb) v = 1.1 * n01(gen);
        const auto ab = dm_test(ea, eb), ba = dm_test(eb, ea);
        expect(std::abs(ab.statistic + ba.statistic) < 1e-12,
               "comparison statistic antisymmetric, seed " + std::to_string(seed));

        // joint coverage statistic dominates the unconditional one
        HitSequence hits;
        hits.alpha = 0.05;
        std::bernoulli_distribution coin(0.08);
        hits.hits.resize(300);
        int ones = 0;
        for (auto& h : hits.hits) ones += (h = coin(gen) ? 1 : 0);
        if (ones > 0 && ones < 300) {
            const double uc = kupiec_test(hits, 0.05).statistic;
            const double cc = christoffersen_test(hits, 0.05).statistic;
            expect(cc >= uc - 1e-12, "joint statistic >= marginal, seed " + std::to_string(seed));
        }

        // regression recovers an exact affine relation with unit fit
        const double a = n01(gen), b = n01(gen) + 2.0;
        std::vector<double> x(50), y(50);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = n01(gen);
            y[i] = a + b * x[i];
        }
        const auto mz = mincer_zarnowitz(y, x);
        expect(std::abs(mz.beta0 - a) < 1e-9 && std::abs(mz.beta1 - b) < 1e-9 &&
                   std::abs(mz.r_squared - 1.0) < 1e-12,
               "affine relation recovered exactly, seed " + std::to_string(seed));
    }
}

int run_criterion(int index, const char* title, const std::function<void()>& fn) {
    const int before = g_checks_failed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn();
    } catch (const std::exception& e) {
        ++g_checks_failed;
        std::printf("    exception: %s\n", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = g_checks_failed == before;
    std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", index, title, secs);
    std::fflush(stdout);
    return ok ? 0 : 1;
}

}  // namespace

int main() {
    int failures = 0;
    failures += run_criterion(1, "exceedance-count likelihood-ratio p-value oracles",
                              criterion_kupiec);
    failures += run_criterion(2, "hit-ratio and expected-count display oracles",
                              criterion_display);
    failures += run_criterion(3, "distribution quantile/tail oracles and skew degeneracy",
                              criterion_distributions);
    failures += run_criterion(4, "maximum-likelihood recovery of generator coefficients",
                              criterion_garch_recovery);
    failures += run_criterion(5, "nested variance-filter reductions agree within 1e-10",
                              criterion_reductions);
    failures += run_criterion(6, "recurrent-network gradient vs finite differences",
                              criterion_gru_gradient);
    failures += run_criterion(7, "end-to-end desk-scale pipeline, artifacts and determinism",
                              criterion_end_to_end);
    failures += run_criterion(8, "risk-coverage calibration under the true model",
                              criterion_calibration);
    failures += run_criterion(9, "test-statistic cross-checks over 100 randomized seeds",
                              criterion_statistic_properties);
    std::printf("%d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
