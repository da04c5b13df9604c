#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "volcast/errors.hpp"
#include "volcast/hybrid.hpp"

using namespace volcast;

namespace {

GarchParams garch_params(double a0, double a1, double b1) {
    GarchParams p;
    p.alpha0 = a0;
    p.alpha = {a1};
    p.beta = {b1};
    return p;
}

ReturnSeries truncate(const ReturnSeries& r, std::size_t n) {
    ReturnSeries out;
    out.scale = r.scale;
    out.dates.assign(r.dates.begin(), r.dates.begin() + n);
    out.values.assign(r.values.begin(), r.values.begin() + n);
    return out;
}

// feature matrix with a learnable structure: target equals the GARCH-feature
// column, features vary smoothly
FeatureMatrix synthetic_features(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    FeatureMatrix fm;
    Date d(2015, 1, 5);
    for (std::size_t i = 0; i < n; ++i) {
        const double sg = u(gen);
        fm.dates.push_back(d);
        d = d.next();
        fm.rows.push_back({u(gen), u(gen), sg});
        fm.target.push_back(sg);
        fm.r_f_next.push_back(0.0);
        fm.sigma_garch_next.push_back(sg);
    }
    return fm;
}

GruConfig small_gru(std::uint64_t seed) {
    GruConfig c;
    c.layer_sizes = {8};
    c.sequence_length = 6;
    c.batch_size = 32;
    c.epochs = 10;
    c.dropout_rate = 0.0;
    c.l2_lambda = 0.0;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("rolling forecasts on constant-variance data are nearly constant") {
    const auto path = simulate(GarchSpec{}, garch_params(1.0, 0.0, 0.0), 400, 6);
    const auto fc = rolling_garch_forecasts(GarchSpec{}, path.returns, 150);
    REQUIRE(fc.sigma_f.size() == 250);
    double mean = 0;
    for (double s : fc.sigma_f) mean += s;
    mean /= static_cast<double>(fc.sigma_f.size());
    double var = 0;
    for (double s : fc.sigma_f) var += (s - mean) * (s - mean);
    var /= static_cast<double>(fc.sigma_f.size());
    CHECK(std::sqrt(var) / mean < 0.10);
}

TEST_CASE("window equal to length minus one yields exactly one forecast") {
    const auto path = simulate(GarchSpec{}, garch_params(0.05, 0.1, 0.85), 200, 9);
    const auto fc = rolling_garch_forecasts(GarchSpec{}, path.returns, 199);
    CHECK(fc.sigma_f.size() == 1);
    CHECK(fc.dates[0] == path.returns.dates[199]);
}

TEST_CASE("rolling forecasts are causal: a longer series extends, never rewrites") {
    const auto path = simulate(GarchSpec{}, garch_params(0.05, 0.1, 0.85), 300, 12);
    const auto full = rolling_garch_forecasts(GarchSpec{}, path.returns, 150);
    const auto part = rolling_garch_forecasts(GarchSpec{}, truncate(path.returns, 290), 150);
    REQUIRE(part.sigma_f.size() <= full.sigma_f.size());
    for (std::size_t k = 0; k < part.sigma_f.size(); ++k) {
        CHECK(part.sigma_f[k] == full.sigma_f[k]);
        CHECK(part.r_f[k] == full.r_f[k]);
    }
}

TEST_CASE("serial and parallel rolling forecasts are identical") {
    const auto path = simulate(GarchSpec{}, garch_params(0.05, 0.1, 0.85), 320, 18);
    const auto par = rolling_garch_forecasts(GarchSpec{}, path.returns, 150);
    const auto ser = rolling_garch_forecasts_serial(GarchSpec{}, path.returns, 150);
    REQUIRE(par.sigma_f.size() == ser.sigma_f.size());
    CHECK(par.failed_fits == ser.failed_fits);
    for (std::size_t k = 0; k < par.sigma_f.size(); ++k) {
        CHECK(par.sigma_f[k] == ser.sigma_f[k]);
        CHECK(par.r_f[k] == ser.r_f[k]);
    }
}

TEST_CASE("build_features hand alignment on a small series") {
    // returns on 6 consecutive days; the estimator misses one date
    ReturnSeries ret;
    Date d(2020, 3, 2);
    const double rv[6] = {0.5, -1.0, 0.8, 0.2, -0.6, 1.1};
    for (double v : rv) {
        ret.dates.push_back(d);
        ret.values.push_back(v);
        d = d.next();
    }
    VolatilityEstimateSeries gkyz;
    GarchForecastSeries fc;
    for (int i = 1; i < 6; ++i) {
        if (i == 3) continue;  // missing estimator date
        gkyz.dates.push_back(ret.dates[static_cast<std::size_t>(i)]);
        gkyz.sigma.push_back(1.0 + 0.1 * i);
    }
    for (int i = 1; i < 6; ++i) {
        fc.dates.push_back(ret.dates[static_cast<std::size_t>(i)]);
        fc.sigma_f.push_back(0.9 + 0.01 * i);
        fc.r_f.push_back(0.001 * i);
    }

    const auto fm = build_features(ret, gkyz, fc);
    // candidate pairs (t, t+1) for t = 0..4; usable rows need gkyz+garch at t
    // and gkyz+garch at t+1: t=1 (target d2->d... ) works, t=3 fails (gkyz
    // missing at t=3), t=2 fails (target at t+1=3 missing), t=0 fails (no
    // estimator at day 0), t=4 works
    REQUIRE(fm.size() == 2);
    CHECK(fm.dates[0] == ret.dates[1]);
    CHECK(fm.rows[0][0] == doctest::Approx(std::abs(rv[1])));
    CHECK(fm.rows[0][1] == doctest::Approx(1.1));
    CHECK(fm.rows[0][2] == doctest::Approx(0.91));
    CHECK(fm.target[0] == doctest::Approx(1.2));
    CHECK(fm.sigma_garch_next[0] == doctest::Approx(0.92));
    CHECK(fm.r_f_next[0] == doctest::Approx(0.002));

    CHECK(fm.dates[1] == ret.dates[4]);
    CHECK(fm.target[1] == doctest::Approx(1.5));
    // t=0 and t=3 had targets but missing features; t=2 had no target and is
    // not a candidate at all
    CHECK(fm.dropped_rows == 2);
}

TEST_CASE("build_features row t ignores later returns") {
    const auto path = simulate(GarchSpec{}, garch_params(0.05, 0.1, 0.85), 60, 25);
    VolatilityEstimateSeries gkyz;
    GarchForecastSeries fc;
    for (std::size_t i = 5; i < 60; ++i) {
        gkyz.dates.push_back(path.returns.dates[i]);
        gkyz.sigma.push_back(1.0);
        fc.dates.push_back(path.returns.dates[i]);
        fc.sigma_f.push_back(1.0);
        fc.r_f.push_back(0.0);
    }
    const auto a = build_features(path.returns, gkyz, fc);
    auto perturbed = path.returns;
    perturbed.values.back() += 5.0;
    const auto b = build_features(perturbed, gkyz, fc);
    REQUIRE(a.size() == b.size());
    // every row except the one whose |r_t| is the perturbed final return
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        CHECK(a.rows[i][0] == b.rows[i][0]);
        CHECK(a.target[i] == b.target[i]);
    }
}

TEST_CASE("run_hybrid block arithmetic: train 20, test 5, step 5 on 40 rows") {
    RollingPlan plan;
    plan.garch_window = 10;
    plan.gru_train_window = 20;
    plan.gru_test_window = 5;
    plan.step = 5;
    plan.validation_fraction = 0.25;

    GruConfig c = small_gru(3);
    c.epochs = 2;
    const auto fm = synthetic_features(40, 1);
    const auto result = run_hybrid(plan, c, fm);
    // block starts at 0, 5, 10, 15 (start + 20 < 40); test rows 20..24, 25..29,
    // 30..34, 35..39 -> 4 blocks of 5
    CHECK(result.blocks == 4);
    CHECK(result.records.size() == 20);
}

TEST_CASE("run_hybrid paper-protocol arithmetic: 2202 rows yield 1194 forecasts") {
    RollingPlan plan;  // defaults: train 1008, test 504, step 504
    GruConfig c = small_gru(5);
    c.epochs = 1;
    c.batch_size = 500;
    const auto fm = synthetic_features(2202, 2);
    const auto result = run_hybrid(plan, c, fm);
    CHECK(result.blocks == 3);
    CHECK(result.records.size() == 1194);  // 504 + 504 + 186 (partial final block)
}

TEST_CASE("run_hybrid learns the degenerate identity target") {
    RollingPlan plan;
    plan.garch_window = 10;
    plan.gru_train_window = 120;
    plan.gru_test_window = 60;
    plan.step = 60;
    plan.validation_fraction = 0.25;

    GruConfig c = small_gru(7);
    c.epochs = 200;
    c.learning_rate = 0.01;
    const auto fm = synthetic_features(240, 11);
    const auto result = run_hybrid(plan, c, fm);
    REQUIRE(!result.records.empty());

    double mean = 0;
    for (const auto& r : result.records) mean += r.sigma_gkyz;
    mean /= static_cast<double>(result.records.size());
    double var = 0, mse = 0;
    for (const auto& r : result.records) {
        var += (r.sigma_gkyz - mean) * (r.sigma_gkyz - mean);
        mse += (r.sigma_hybrid - r.sigma_gkyz) * (r.sigma_hybrid - r.sigma_gkyz);
    }
    var /= static_cast<double>(result.records.size());
    mse /= static_cast<double>(result.records.size());
    CHECK(mse < 0.10 * var);
}

TEST_CASE("run_hybrid records are unaffected by later feature rows") {
    RollingPlan plan;
    plan.garch_window = 10;
    plan.gru_train_window = 30;
    plan.gru_test_window = 10;
    plan.step = 10;
    plan.validation_fraction = 0.25;
    GruConfig c = small_gru(9);
    c.epochs = 3;

    auto fm = synthetic_features(60, 21);
    const auto base = run_hybrid(plan, c, fm);
    auto fm2 = fm;
    // perturb the final row only
    fm2.rows.back() = {9.0, 9.0, 9.0};
    fm2.target.back() = 9.0;
    const auto perturbed = run_hybrid(plan, c, fm2);
    REQUIRE(base.records.size() == perturbed.records.size());
    const Date cutoff = fm.dates.back();
    for (std::size_t i = 0; i < base.records.size(); ++i) {
        if (!(base.records[i].date < cutoff)) continue;
        CHECK(base.records[i].sigma_hybrid == perturbed.records[i].sigma_hybrid);
        CHECK(base.records[i].sigma_garch == perturbed.records[i].sigma_garch);
    }
}

TEST_CASE("run_hybrid is deterministic") {
    RollingPlan plan;
    plan.gru_train_window = 30;
    plan.gru_test_window = 10;
    plan.step = 10;
    plan.validation_fraction = 0.25;
    GruConfig c = small_gru(13);
    c.epochs = 4;
    c.dropout_rate = 0.2;
    const auto fm = synthetic_features(60, 31);
    const auto a = run_hybrid(plan, c, fm);
    const auto b = run_hybrid(plan, c, fm);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].sigma_hybrid == b.records[i].sigma_hybrid);
}

TEST_CASE("forecast CSV round trip") {
    testutil::TempDir dir("volcast_hybrid_csv");
    std::vector<ForecastRecord> records;
    Date d(2021, 6, 1);
    for (int i = 0; i < 7; ++i) {
        ForecastRecord r;
        r.date = d;
        d = d.next();
        r.r_f = 0.01 * i;
        r.sigma_garch = 1.0 + 0.1 * i;
        r.sigma_hybrid = 0.9 + 0.05 * i;
        r.sigma_gkyz = 1.1 - 0.02 * i;
        records.push_back(r);
    }
    const auto path = dir.file("f.csv");
    write_forecasts_csv(path, records);
    const auto back = read_forecasts_csv(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].date == records[i].date);
        CHECK(back[i].r_f == records[i].r_f);
        CHECK(back[i].sigma_garch == records[i].sigma_garch);
        CHECK(back[i].sigma_hybrid == records[i].sigma_hybrid);
        CHECK(back[i].sigma_gkyz == records[i].sigma_gkyz);
    }
    CHECK_THROWS_AS(read_forecasts_csv(dir.file("missing.csv")), DataError);
}

TEST_CASE("plan validation") {
    RollingPlan plan;
    CHECK_NOTHROW(plan.validate());
    CHECK(plan.validation_size() == 333);  // lround(0.33 * 1008)
    plan.validation_fraction = 0.0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan = RollingPlan{};
    plan.step = 0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
}
