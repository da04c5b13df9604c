// volcast: volatility forecasting and risk backtesting command-line tool.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 convergence failure, 5 internal numeric error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "volcast/config.hpp"
#include "volcast/errors.hpp"
#include "volcast/report.hpp"
#include "volcast/serialize.hpp"
#include "volcast/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitInternal = 5;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> input;
};

volcast::RunConfig resolve_config(const CliOptions& cli) {
    volcast::RunConfig config =
        cli.config_path.empty() ? volcast::default_config() : volcast::load_config(cli.config_path);
    if (cli.seed) {
        config.seed = *cli.seed;
        config.gru.seed = *cli.seed;
    }
    if (cli.threads) config.threads = *cli.threads;
    if (cli.out_dir) config.out_dir = *cli.out_dir;
    if (cli.input) config.input_csv = *cli.input;
    config.validate();
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
    std::filesystem::create_directories(config.out_dir);
    return config;
}

std::string out_path(const volcast::RunConfig& config, const std::string& suffix) {
    return (std::filesystem::path(config.out_dir) / (config.asset + suffix)).string();
}

volcast::ReturnSeries load_returns(const volcast::RunConfig& config,
                                   volcast::PriceSeries* prices_out = nullptr) {
    if (config.input_csv.empty())
        throw volcast::ConfigError("input_csv is required (set it in the config or via --input)");
    auto prices = volcast::load_ohlc_csv(config.input_csv);
    auto returns = volcast::log_returns(prices, config.return_scale);
    if (prices_out) *prices_out = std::move(prices);
    return returns;
}

void print_optional(const char* label, const std::optional<double>& v) {
    if (v)
        std::printf("  %-10s %14.6f\n", label, *v);
    else
        std::printf("  %-10s %14s\n", label, "n/a");
}

int cmd_stats(const CliOptions& cli) {
    const auto config = resolve_config(cli);
    const auto returns = load_returns(config);
    const auto s = volcast::descriptive_stats(returns);

    std::printf("returns: %zu observations (scale %g)\n", s.count, config.return_scale);
    std::printf("  %-10s %14.6f\n", "mean", s.mean);
    std::printf("  %-10s %14.6f\n", "std", s.std);
    print_optional("cv", s.cv);
    std::printf("  %-10s %14.6f\n", "min", s.min);
    std::printf("  %-10s %14.6f\n", "max", s.max);
    print_optional("skewness", s.skewness);
    print_optional("kurtosis", s.kurtosis);

    std::string csv = "statistic,value\n";
    auto row = [&](const std::string& k, const std::optional<double>& v) {
        char buf[64];
        if (v) {
            std::snprintf(buf, sizeof buf, "%.17g", *v);
            csv += k + "," + buf + "\n";
        } else {
            csv += k + ",\n";
        }
    };
    csv += "count," + std::to_string(s.count) + "\n";
    row("mean", s.mean);
    row("std", s.std);
    row("cv", s.cv);
    row("min", s.min);
    row("max", s.max);
    row("skewness", s.skewness);
    row("kurtosis", s.kurtosis);
    const auto path = out_path(config, "_stats.csv");
    volcast::write_text_file(path, csv);
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
}

int cmd_simulate(const CliOptions& cli) {
    const auto config = resolve_config(cli);
    config.sim_params.validate(config.garch);
    const auto data = volcast::synthesize_ohlc(config.garch, config.sim_params, config.sim_days,
                                               config.seed, config.return_scale,
                                               config.initial_price, config.overnight_fraction);
    const auto ohlc_path = out_path(config, "_ohlc.csv");
    const auto vol_path = out_path(config, "_true_vol.csv");
    volcast::write_ohlc_csv(ohlc_path, data.prices);
    volcast::write_true_volatility_csv(vol_path, data);
    std::printf("simulated %zu days (%s model)\n", config.sim_days,
                volcast::family_name(config.garch.family).c_str());
    std::printf("wrote %s\nwrote %s\n", ohlc_path.c_str(), vol_path.c_str());
    return kExitOk;
}

int cmd_garch_fit(const CliOptions& cli) {
    const auto config = resolve_config(cli);
    const auto returns = load_returns(config);
    const auto fit = volcast::fit(config.garch, returns);

    std::printf("%s fit on %zu returns\n", volcast::family_name(config.garch.family).c_str(),
                returns.size());
    std::printf("  log-likelihood %.6f  (converged: %s)\n", fit.log_likelihood,
                fit.converged ? "yes" : "no");
    std::printf("  mu = %.6g  alpha0 = %.6g\n", fit.params.mu, fit.params.alpha0);
    for (std::size_t i = 0; i < fit.params.alpha.size(); ++i)
        std::printf("  alpha%zu = %.6g\n", i + 1, fit.params.alpha[i]);
    for (std::size_t i = 0; i < fit.params.beta.size(); ++i)
        std::printf("  beta%zu = %.6g\n", i + 1, fit.params.beta[i]);

    const auto path = out_path(config, "_garch_fit.json");
    volcast::write_text_file(path, volcast::garch_fit_to_json(fit));
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
}

void emit_risk_artifacts(const volcast::RunConfig& config,
                         const std::vector<volcast::ForecastRecord>& records,
                         const std::vector<double>& realized, int floored) {
    const auto dist = config.garch.distribution;
    for (bool hybrid : {false, true}) {
        const auto series =
            volcast::build_risk_series(records, realized, hybrid, dist, config.alphas);
        volcast::write_risk_csv(out_path(config, "_risk_" + series.model + ".csv"), series);

        // plot-ready VaR path: realized return against the breach threshold
        std::string csv = "date,alpha,return,neg_var,hit\n";
        char buf[160];
        std::size_t i = 0;
        for (const auto& row : series.rows) {
            const double ret = realized[i % realized.size()];
            std::snprintf(buf, sizeof buf, "%s,%g,%.17g,%.17g,%d\n",
                          row.date.to_string().c_str(), row.alpha, ret, -row.var, row.hit);
            csv += buf;
            ++i;
        }
        volcast::write_text_file(out_path(config, "_plot_var_" + series.model + ".csv"), csv);
    }

    const auto report = volcast::build_backtest_report(records, realized, dist, config.alphas,
                                                       config.bootstrap_b, config.seed, floored);
    volcast::write_text_file(out_path(config, "_report.json"), volcast::report_to_json(report));

    std::string vol_csv = "date,sigma_gkyz,sigma_garch,sigma_hybrid\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n", r.date.to_string().c_str(),
                      r.sigma_gkyz, r.sigma_garch, r.sigma_hybrid);
        vol_csv += buf;
    }
    volcast::write_text_file(out_path(config, "_plot_volatility.csv"), vol_csv);

    std::printf("backtested %zu forecasts", report.n);
    if (floored > 0) std::printf(" (%d negative network outputs floored)", floored);
    std::printf("\n");
    for (const auto& vb : report.var_backtests)
        std::printf("  %-6s alpha=%.2f  hits=%d (%s, expected %.2f)  kupiec p=%.4f  "
                    "christoffersen p=%.4f\n",
                    vb.model.c_str(), vb.alpha, vb.exceedances, vb.hit_ratio.c_str(),
                    vb.expected.real, vb.kupiec.p_value, vb.christoffersen.p_value);
    std::printf("wrote %s\n", out_path(config, "_report.json").c_str());
}

int cmd_run(const CliOptions& cli) {
    const auto config = resolve_config(cli);
    volcast::PriceSeries prices;
    const auto returns = load_returns(config, &prices);

    const auto gkyz = volcast::gkyz_volatility(prices, config.gkyz_window, config.return_scale);
    const auto scaled = volcast::scale_gkyz(gkyz, returns, config.plan.garch_window);
    std::printf("range-estimator scaling factor: %.6f\n", scaled.factor);

    const auto garch_fc = volcast::rolling_garch_forecasts(config.garch, returns,
                                                           config.plan.garch_window);
    if (garch_fc.failed_fits > 0)
        std::printf("warning: %d rolling windows reused the previous fit\n", garch_fc.failed_fits);

    const auto features = volcast::build_features(returns, scaled.series, garch_fc);
    std::printf("feature rows: %zu (%d dropped)\n", features.size(), features.dropped_rows);

    auto gru = config.gru;
    gru.seed = config.seed;
    const auto result = volcast::run_hybrid(config.plan, gru, features);
    if (result.failed_block)
        std::printf("warning: training diverged in block %d; later blocks skipped\n",
                    *result.failed_block);
    std::printf("hybrid blocks: %d, forecasts: %zu\n", result.blocks, result.records.size());

    volcast::write_forecasts_csv(out_path(config, "_forecasts.csv"), result.records);
    if (!result.records.empty()) {
        const auto realized = volcast::align_realized_returns(result.records, returns);
        emit_risk_artifacts(config, result.records, realized, result.negative_outputs_floored);
    }
    if (result.failed_block) throw volcast::ConvergenceError("pipeline ended early; artifacts are partial");
    return kExitOk;
}

int cmd_backtest(const CliOptions& cli) {
    const auto config = resolve_config(cli);
    if (config.forecasts_csv.empty())
        throw volcast::ConfigError("forecasts_csv is required for the backtest command");
    const auto records = volcast::read_forecasts_csv(config.forecasts_csv);
    const auto returns = load_returns(config);
    const auto realized = volcast::align_realized_returns(records, returns);
    emit_risk_artifacts(config, records, realized, 0);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volatility forecasting and risk backtesting"};
    app.require_subcommand(1);

    CliOptions cli;
    app.add_option("--config", cli.config_path, "key=value configuration file");
    app.add_option("--seed", cli.seed, "master random seed (overrides config)");
    app.add_option("--threads", cli.threads, "worker thread cap (overrides config)");
    app.add_option("--out", cli.out_dir, "output directory (overrides config)");
    app.add_option("--input", cli.input, "OHLC CSV path (overrides config)");

    bool help_config = false;
    app.add_flag("--help-config", help_config, "list configuration keys and exit");

    auto* stats = app.add_subcommand("stats", "descriptive statistics of log returns");
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic OHLC series");
    auto* garch_fit = app.add_subcommand("garch-fit", "fit one GARCH-family model");
    auto* run = app.add_subcommand("run", "full rolling GARCH + hybrid pipeline");
    auto* backtest = app.add_subcommand("backtest", "evaluate a precomputed forecast CSV");
    for (auto* sub : {stats, simulate, garch_fit, run, backtest}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (help_config) {
        for (const auto& [key, doc] : volcast::config_key_docs())
            std::printf("  %-22s %s\n", key.c_str(), doc.c_str());
        return kExitOk;
    }

    try {
        if (stats->parsed()) return cmd_stats(cli);
        if (simulate->parsed()) return cmd_simulate(cli);
        if (garch_fit->parsed()) return cmd_garch_fit(cli);
        if (run->parsed()) return cmd_run(cli);
        if (backtest->parsed()) return cmd_backtest(cli);
    } catch (const volcast::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const volcast::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const volcast::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitConfig;
}
