#include "volcast/report.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "volcast/errors.hpp"

namespace volcast {

using json = nlohmann::ordered_json;

std::vector<double> align_realized_returns(const std::vector<ForecastRecord>& records,
                                           const ReturnSeries& returns) {
    std::map<std::int64_t, double> by_date;
    for (std::size_t i = 0; i < returns.size(); ++i)
        by_date[returns.dates[i].serial()] = returns.values[i];
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        auto it = by_date.find(r.date.serial());
        if (it == by_date.end())
            throw DataError("no realized return for forecast date " + r.date.to_string());
        out.push_back(it->second);
    }
    return out;
}

RiskSeries build_risk_series(const std::vector<ForecastRecord>& records,
                             const std::vector<double>& realized, bool hybrid,
                             const DistributionSpec& dist, const std::vector<double>& alphas) {
    if (records.size() != realized.size())
        throw DataError("records and realized returns are misaligned");
    RiskSeries out;
    out.model = hybrid ? "hybrid" : "garch";
    for (double alpha : alphas) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double sigma = hybrid ? records[i].sigma_hybrid : records[i].sigma_garch;
            RiskRow row;
            row.date = records[i].date;
            row.alpha = alpha;
            row.var = var_forecast(records[i].r_f, sigma, dist, alpha);
            row.es = es_forecast(records[i].r_f, sigma, dist, alpha);
            row.hit = realized[i] < -row.var ? 1 : 0;
            out.rows.push_back(row);
        }
    }
    return out;
}

BacktestReport build_backtest_report(const std::vector<ForecastRecord>& records,
                                     const std::vector<double>& realized,
                                     const DistributionSpec& dist,
                                     const std::vector<double>& alphas,
                                     std::size_t bootstrap_B, std::uint64_t seed,
                                     int negative_outputs_floored) {
    if (records.empty()) throw DataError("no forecast records to evaluate");
    if (records.size() != realized.size())
        throw DataError("records and realized returns are misaligned");

    BacktestReport rep;
    rep.n = records.size();
    rep.negative_outputs_floored = negative_outputs_floored;

    std::vector<double> target, f_garch, f_hybrid, err_garch, err_hybrid;
    std::vector<double> target_var, var_garch, var_hybrid;
    for (const auto& r : records) {
        target.push_back(r.sigma_gkyz);
        f_garch.push_back(r.sigma_garch);
        f_hybrid.push_back(r.sigma_hybrid);
        err_garch.push_back(r.sigma_gkyz - r.sigma_garch);
        err_hybrid.push_back(r.sigma_gkyz - r.sigma_hybrid);
        target_var.push_back(r.sigma_gkyz * r.sigma_gkyz);
        var_garch.push_back(r.sigma_garch * r.sigma_garch);
        var_hybrid.push_back(r.sigma_hybrid * r.sigma_hybrid);
    }
    rep.garch_metrics = point_metrics(target, f_garch);
    rep.hybrid_metrics = point_metrics(target, f_hybrid);
    rep.dm = dm_test(err_garch, err_hybrid);
    rep.mz_garch = mincer_zarnowitz(target_var, var_garch);
    rep.mz_hybrid = mincer_zarnowitz(target_var, var_hybrid);

    for (bool hybrid : {false, true}) {
        const auto risk = build_risk_series(records, realized, hybrid, dist, alphas);
        for (double alpha : alphas) {
            HitSequence hits;
            hits.alpha = alpha;
            std::vector<double> ret, sig, es;
            for (const auto& row : risk.rows) {
                if (row.alpha != alpha) continue;
                hits.hits.push_back(row.hit);
            }
            for (std::size_t i = 0; i < records.size(); ++i) {
                ret.push_back(realized[i]);
                sig.push_back(hybrid ? records[i].sigma_hybrid : records[i].sigma_garch);
            }

            VarBacktest vb;
            vb.alpha = alpha;
            vb.model = hybrid ? "hybrid" : "garch";
            vb.exceedances = hits.count();
            vb.expected.real = alpha * static_cast<double>(rep.n);
            vb.expected.floor = static_cast<int>(std::floor(vb.expected.real));
            vb.expected.round = static_cast<int>(std::lround(vb.expected.real));
            vb.hit_ratio = format_hit_ratio(vb.exceedances, static_cast<int>(rep.n));
            vb.kupiec = kupiec_test(hits, alpha);
            vb.christoffersen = christoffersen_test(hits, alpha);
            rep.var_backtests.push_back(std::move(vb));

            if (alpha == 0.05) {
                std::vector<double> es_series;
                for (const auto& row : risk.rows)
                    if (row.alpha == alpha) es_series.push_back(row.es);
                EsBacktest eb;
                eb.alpha = alpha;
                eb.model = hybrid ? "hybrid" : "garch";
                eb.result = mcneil_frey_test(ret, sig, es_series, hits, bootstrap_B, seed);
                rep.es_backtests.push_back(std::move(eb));
            }
        }
    }
    return rep;
}

void write_risk_csv(const std::string& path, const RiskSeries& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,alpha,var,es,hit\n";
    out.precision(17);
    for (const auto& r : series.rows)
        out << r.date.to_string() << ',' << r.alpha << ',' << r.var << ',' << r.es << ','
            << r.hit << '\n';
}

namespace {

json test_to_json(const TestResult& t) {
    return json{{"statistic", t.statistic},
                {"p_value", t.p_value},
                {"reference", t.reference},
                {"verdict", std::string(1, t.verdict())}};
}

json metrics_to_json(const PointMetrics& m) {
    return json{{"mse", m.mse}, {"mae", m.mae}, {"hmse", m.hmse}, {"n", m.n}};
}

json mz_to_json(const MzRegression& m) {
    return json{{"beta0", m.beta0}, {"beta1", m.beta1}, {"r_squared", m.r_squared}};
}

}  // namespace

std::string report_to_json(const BacktestReport& rep) {
    json j;
    j["n"] = rep.n;
    j["negative_outputs_floored"] = rep.negative_outputs_floored;
    j["point_metrics"] = {{"garch", metrics_to_json(rep.garch_metrics)},
                          {"hybrid", metrics_to_json(rep.hybrid_metrics)}};
    j["dm_test"] = test_to_json(rep.dm);
    j["mincer_zarnowitz"] = {{"garch", mz_to_json(rep.mz_garch)},
                             {"hybrid", mz_to_json(rep.mz_hybrid)}};
    j["var_backtests"] = json::array();
    for (const auto& vb : rep.var_backtests) {
        j["var_backtests"].push_back(
            {{"alpha", vb.alpha},
             {"model", vb.model},
             {"exceedances", vb.exceedances},
             {"expected", {{"real", vb.expected.real},
                           {"floor", vb.expected.floor},
                           {"round", vb.expected.round}}},
             {"hit_ratio", vb.hit_ratio},
             {"kupiec", test_to_json(vb.kupiec)},
             {"christoffersen", test_to_json(vb.christoffersen)}});
    }
    j["es_backtests"] = json::array();
    for (const auto& eb : rep.es_backtests) {
        j["es_backtests"].push_back({{"alpha", eb.alpha},
                                     {"model", eb.model},
                                     {"exceedances", eb.result.exceedances},
                                     {"exact", test_to_json(eb.result.exact)},
                                     {"exact_one_sided", test_to_json(eb.result.exact_one_sided)},
                                     {"bootstrap", test_to_json(eb.result.bootstrap)},
                                     {"bootstrap_one_sided",
                                      test_to_json(eb.result.bootstrap_one_sided)}});
    }
    return j.dump(2) + "\n";
}

}  // namespace volcast
