#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "volcast/errors.hpp"
#include "volcast/market_data.hpp"

using namespace volcast;

namespace {

OhlcRecord rec(int y, int m, int d, double o, double h, double l, double c) {
    OhlcRecord r;
    r.date = Date(y, m, d);
    r.open = o;
    r.high = h;
    r.low = l;
    r.close = c;
    return r;
}

PriceSeries flat_series(std::size_t n, double price) {
    std::vector<OhlcRecord> rs;
    Date d(2020, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        rs.push_back({d, price, price, price, price});
        d = d.next();
    }
    return PriceSeries(std::move(rs));
}

}  // namespace

TEST_CASE("load_ohlc_csv reads valid rows") {
    testutil::TempDir dir("volcast_md_load");
    const auto path = dir.file("p.csv");
    testutil::write_file(path,
                         "date,open,high,low,close\n"
                         "2020-01-02,10,11,9,10.5\n"
                         "2020-01-03,10.5,12,10,11\n"
                         "2020-01-06,11,11.5,10.5,11.2\n");
    const auto prices = load_ohlc_csv(path);
    REQUIRE(prices.size() == 3);
    CHECK(prices[0].date == Date(2020, 1, 2));
    CHECK(prices[2].close == doctest::Approx(11.2));
}

TEST_CASE("load_ohlc_csv rejects range violations with the row number") {
    testutil::TempDir dir("volcast_md_range");
    const auto path = dir.file("p.csv");
    testutil::write_file(path,
                         "date,open,high,low,close\n"
                         "2020-01-02,10,9,11,10.5\n");  // low > high
    CHECK_THROWS_WITH_AS(load_ohlc_csv(path), doctest::Contains("row 2"), DataError);
}

TEST_CASE("load_ohlc_csv sorts out-of-order rows into date order") {
    testutil::TempDir dir("volcast_md_sort");
    const auto sorted = dir.file("sorted.csv");
    const auto shuffled = dir.file("shuffled.csv");
    testutil::write_file(sorted,
                         "date,open,high,low,close\n"
                         "2020-01-02,10,11,9,10.5\n"
                         "2020-01-03,10.5,12,10,11\n"
                         "2020-01-06,11,11.5,10.5,11.2\n");
    testutil::write_file(shuffled,
                         "date,open,high,low,close\n"
                         "2020-01-06,11,11.5,10.5,11.2\n"
                         "2020-01-02,10,11,9,10.5\n"
                         "2020-01-03,10.5,12,10,11\n");
    const auto a = load_ohlc_csv(sorted);
    const auto b = load_ohlc_csv(shuffled);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].date == b[i].date);
        CHECK(a[i].close == b[i].close);
    }
}

TEST_CASE("load_ohlc_csv rejects duplicate dates and missing files") {
    testutil::TempDir dir("volcast_md_dup");
    const auto path = dir.file("p.csv");
    testutil::write_file(path,
                         "date,open,high,low,close\n"
                         "2020-01-02,10,11,9,10.5\n"
                         "2020-01-02,10,11,9,10.6\n");
    CHECK_THROWS_AS(load_ohlc_csv(path), DataError);
    CHECK_THROWS_WITH_AS(load_ohlc_csv(dir.file("absent.csv")),
                         doctest::Contains("absent.csv"), DataError);
}

TEST_CASE("PriceSeries constructor enforces invariants") {
    CHECK_THROWS_AS(PriceSeries({rec(2020, 1, 2, 10, 9, 11, 10)}), DataError);
    CHECK_THROWS_AS(PriceSeries({rec(2020, 1, 2, 10, 11, 9, 10), rec(2020, 1, 2, 10, 11, 9, 10)}),
                    DataError);
    CHECK_THROWS_AS(PriceSeries({rec(2020, 1, 2, -1, 11, -2, 10)}), DataError);
}

TEST_CASE("log_returns basic values") {
    PriceSeries flat = flat_series(2, 100.0);
    CHECK(log_returns(flat, 100.0).values[0] == doctest::Approx(0.0));

    PriceSeries up({rec(2020, 1, 2, 100, 100, 100, 100),
                    rec(2020, 1, 3, 100, 101.1, 100, 100.0 * std::exp(0.01))});
    const auto r = log_returns(up, 100.0);
    REQUIRE(r.size() == 1);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.dates[0] == Date(2020, 1, 3));
}

TEST_CASE("2708 prices yield 2707 returns") {
    std::vector<OhlcRecord> rs;
    Date d(2010, 1, 4);
    double p = 100;
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 2708; ++i) {
        p *= std::exp(0.01 * n01(gen));
        rs.push_back({d, p, p, p, p});
        d = d.next();
    }
    const auto returns = log_returns(PriceSeries(std::move(rs)), 100.0);
    CHECK(returns.size() == 2707);
}

TEST_CASE("log_returns scales linearly in the scale factor") {
    std::vector<OhlcRecord> rs;
    Date d(2020, 1, 2);
    double p = 50;
    std::mt19937_64 gen(17);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 30; ++i) {
        p *= std::exp(0.02 * n01(gen));
        rs.push_back({d, p, p, p, p});
        d = d.next();
    }
    PriceSeries prices(std::move(rs));
    const auto r1 = log_returns(prices, 1.0);
    const auto r100 = log_returns(prices, 100.0);
    for (std::size_t i = 0; i < r1.size(); ++i)
        CHECK(r100.values[i] == doctest::Approx(100.0 * r1.values[i]).epsilon(1e-12));
}

TEST_CASE("descriptive_stats degenerate cases") {
    ReturnSeries constant{{}, {1, 1, 1, 1}, 100.0};
    const auto s = descriptive_stats(constant);
    CHECK(s.mean == doctest::Approx(1.0));
    CHECK(s.std == doctest::Approx(0.0));
    CHECK_FALSE(s.skewness.has_value());
    CHECK_FALSE(s.kurtosis.has_value());

    ReturnSeries sym{{}, {-1, 1}, 100.0};
    const auto t = descriptive_stats(sym);
    CHECK(t.mean == doctest::Approx(0.0));
    CHECK_FALSE(t.cv.has_value());
    CHECK(t.min == -1);
    CHECK(t.max == 1);
}

TEST_CASE("descriptive_stats matches direct moments on a large normal sample") {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> n01;
    ReturnSeries r;
    r.values.resize(1000000);
    for (auto& v : r.values) v = n01(gen);

    const auto s = descriptive_stats(r);
    CHECK(std::abs(*s.skewness) < 0.01);
    CHECK(*s.kurtosis == doctest::Approx(3.0).epsilon(0.05 / 3.0));

    // independent single-pass recomputation of the same moments
    double mean = 0;
    for (double v : r.values) mean += v;
    mean /= 1e6;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : r.values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= 1e6;
    m3 /= 1e6;
    m4 /= 1e6;
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.std == doctest::Approx(std::sqrt(m2)).epsilon(1e-12));
    CHECK(*s.skewness == doctest::Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-10));
    CHECK(*s.kurtosis == doctest::Approx(m4 / (m2 * m2)).epsilon(1e-10));
}

TEST_CASE("descriptive_stats scaling behaviour") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n01;
    ReturnSeries r;
    r.values.resize(500);
    for (auto& v : r.values) v = 0.3 + n01(gen);
    ReturnSeries rk = r;
    for (auto& v : rk.values) v *= 2.5;

    const auto a = descriptive_stats(r), b = descriptive_stats(rk);
    CHECK(b.mean == doctest::Approx(2.5 * a.mean).epsilon(1e-12));
    CHECK(b.std == doctest::Approx(2.5 * a.std).epsilon(1e-12));
    CHECK(*b.skewness == doctest::Approx(*a.skewness).epsilon(1e-10));
    CHECK(*b.kurtosis == doctest::Approx(*a.kurtosis).epsilon(1e-10));
}

TEST_CASE("gkyz is zero on constant prices") {
    const auto est = gkyz_volatility(flat_series(20, 50.0), 10, 100.0);
    REQUIRE(est.size() == 10);
    for (double s : est.sigma) CHECK(s == doctest::Approx(0.0));
}

TEST_CASE("gkyz single-term window with a pure overnight gap gives sigma 1") {
    // day 1 opens at e times the prior close and never moves intraday:
    // only the squared gap term survives and equals 1
    const double e1 = std::exp(1.0);
    PriceSeries prices({rec(2020, 1, 2, 1, 1, 1, 1), rec(2020, 1, 3, e1, e1, e1, e1)});
    const auto est = gkyz_volatility(prices, 1, 1.0);
    REQUIRE(est.size() == 1);
    CHECK(est.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.dates[0] == Date(2020, 1, 3));
}

TEST_CASE("gkyz mean tracks the truth on simulated geometric Brownian motion") {
    // fine intraday path: 78 five-minute-style steps per day
    const int days = 10000, steps = 78;
    const double sigma_daily = 0.01;
    const double step_sd = sigma_daily / std::sqrt(static_cast<double>(steps));
    std::mt19937_64 gen(11);
    std::normal_distribution<double> n01;

    std::vector<OhlcRecord> rs;
    Date d(1990, 1, 1);
    double log_p = 0;
    for (int i = 0; i < days; ++i) {
        OhlcRecord r;
        r.date = d;
        d = d.next();
        double hi = log_p, lo = log_p;
        r.open = std::exp(log_p);
        for (int s = 0; s < steps; ++s) {
            log_p += step_sd * n01(gen);
            hi = std::max(hi, log_p);
            lo = std::min(lo, log_p);
        }
        r.high = std::exp(hi);
        r.low = std::exp(lo);
        r.close = std::exp(log_p);
        rs.push_back(r);
    }
    const auto est = gkyz_volatility(PriceSeries(std::move(rs)), 10, 1.0);
    double mean = 0;
    for (double s : est.sigma) mean += s;
    mean /= static_cast<double>(est.size());
    CHECK(mean == doctest::Approx(sigma_daily).epsilon(0.10));
}

TEST_CASE("gkyz is invariant under uniform price rescaling") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n01;
    std::vector<OhlcRecord> rs;
    Date d(2020, 1, 2);
    double p = 100;
    for (int i = 0; i < 40; ++i) {
        const double o = p * std::exp(0.002 * n01(gen));
        const double c = o * std::exp(0.01 * n01(gen));
        const double h = std::max(o, c) * std::exp(std::abs(0.004 * n01(gen)));
        const double l = std::min(o, c) * std::exp(-std::abs(0.004 * n01(gen)));
        rs.push_back({d, o, h, l, c});
        d = d.next();
        p = c;
    }
    PriceSeries base(rs);
    for (auto& r : rs) {
        r.open *= 7.5;
        r.high *= 7.5;
        r.low *= 7.5;
        r.close *= 7.5;
    }
    PriceSeries scaled(std::move(rs));
    const auto a = gkyz_volatility(base, 10, 100.0);
    const auto b = gkyz_volatility(scaled, 10, 100.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.sigma[i] == doctest::Approx(b.sigma[i]).epsilon(1e-12));
}

TEST_CASE("scale_gkyz factor on a hand-built 5-point series") {
    VolatilityEstimateSeries est;
    ReturnSeries ret;
    Date d(2020, 1, 2);
    const double sigmas[5] = {0.8, 1.1, 0.9, 1.3, 1.0};
    const double rets[5] = {0.5, -1.2, 0.3, 2.0, -0.7};
    for (int i = 0; i < 5; ++i) {
        est.dates.push_back(d);
        est.sigma.push_back(sigmas[i]);
        ret.dates.push_back(d);
        ret.values.push_back(rets[i]);
        d = d.next();
    }
    const auto scaled = scale_gkyz(est, ret, 5);

    double sr = 0, ss = 0;
    for (int i = 0; i < 5; ++i) {
        sr += rets[i] * rets[i];
        ss += sigmas[i] * sigmas[i];
    }
    const double expected = std::sqrt(sr / 5.0) / std::sqrt(ss / 5.0);
    CHECK(scaled.factor == doctest::Approx(expected).epsilon(1e-12));
    for (int i = 0; i < 5; ++i)
        CHECK(scaled.series.sigma[i] == doctest::Approx(sigmas[i] * expected).epsilon(1e-12));
}

TEST_CASE("scale_gkyz identity and halving cases") {
    VolatilityEstimateSeries est;
    ReturnSeries ret;
    Date d(2020, 1, 2);
    for (int i = 0; i < 6; ++i) {
        est.dates.push_back(d);
        est.sigma.push_back(1.0);
        ret.dates.push_back(d);
        ret.values.push_back(i % 2 == 0 ? 1.0 : -1.0);  // RMS 1 = estimator RMS
        d = d.next();
    }
    const auto same = scale_gkyz(est, ret, 6);
    CHECK(same.factor == doctest::Approx(1.0).epsilon(1e-12));
    for (double s : same.series.sigma) CHECK(s == doctest::Approx(1.0));

    auto doubled = est;
    for (auto& s : doubled.sigma) s *= 2.0;
    const auto halved = scale_gkyz(doubled, ret, 6);
    CHECK(halved.factor == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 0; i < halved.series.size(); ++i)
        CHECK(halved.series.sigma[i] == doctest::Approx(same.series.sigma[i]).epsilon(1e-12));
}

TEST_CASE("scale_gkyz applied to its own output yields factor 1") {
    std::mt19937_64 gen(23);
    std::normal_distribution<double> n01;
    VolatilityEstimateSeries est;
    ReturnSeries ret;
    Date d(2020, 1, 2);
    for (int i = 0; i < 50; ++i) {
        est.dates.push_back(d);
        est.sigma.push_back(0.5 + 0.1 * std::abs(n01(gen)));
        ret.dates.push_back(d);
        ret.values.push_back(n01(gen));
        d = d.next();
    }
    const auto once = scale_gkyz(est, ret, 50);
    const auto twice = scale_gkyz(once.series, ret, 50);
    CHECK(twice.factor == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scale_gkyz errors on insufficient overlap") {
    VolatilityEstimateSeries est;
    ReturnSeries ret;
    est.dates = {Date(2020, 1, 2)};
    est.sigma = {1.0};
    ret.dates = {Date(2021, 1, 4)};
    ret.values = {0.5};
    CHECK_THROWS_AS(scale_gkyz(est, ret, 1), DataError);
}
