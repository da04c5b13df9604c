#include "volcast/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "volcast/errors.hpp"

namespace volcast {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig c;
    c.garch.family = GarchFamily::Garch;
    c.garch.p = 1;
    c.garch.q = 1;
    c.garch.mean_model = MeanModel::Constant;
    c.garch.distribution = DistributionSpec::normal();
    // paper-protocol GRU and rolling-plan values are the struct defaults
    c.sim_params.mu = 0.0;
    c.sim_params.alpha0 = 0.05;
    c.sim_params.alpha.assign(1, 0.10);
    c.sim_params.beta.assign(1, 0.85);
    return c;
}

void RunConfig::validate() const {
    for (double a : alphas)
        if (!(a > 0 && a < 1)) throw ConfigError("risk alphas must lie in (0,1)");
    if (!(return_scale > 0)) throw ConfigError("return_scale must be positive");
    if (gkyz_window < 1) throw ConfigError("gkyz_window must be positive");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    gru.validate();
    plan.validate();
    garch.distribution.validate();
}

std::vector<std::pair<std::string, std::string>> config_key_docs() {
    return {
        {"asset", "asset label used in output file names"},
        {"input_csv", "OHLC input file (date,open,high,low,close)"},
        {"forecasts_csv", "precomputed forecast CSV (backtest command)"},
        {"out_dir", "output directory"},
        {"return_scale", "log-return scale factor (100 = percent)"},
        {"gkyz_window", "range-estimator trailing window length"},
        {"garch_family", "garch | gjr | egarch | aparch"},
        {"garch_p", "GARCH lag order"},
        {"garch_q", "ARCH lag order"},
        {"mean_model", "constant | ar1"},
        {"distribution", "normal | student_t | skew_student_t"},
        {"nu", "degrees of freedom (starting value for estimation)"},
        {"xi", "skew parameter (starting value for estimation)"},
        {"gru_layers", "comma-separated layer sizes"},
        {"gru_sequence_length", "days per input sequence"},
        {"gru_batch_size", "sequences per mini-batch"},
        {"gru_epochs", "training epochs"},
        {"gru_learning_rate", "Adam learning rate"},
        {"gru_dropout", "dropout rate between layers"},
        {"gru_l2", "L2 penalty on input kernels"},
        {"gru_activation", "relu | tanh candidate activation"},
        {"garch_window", "rolling GARCH estimation window"},
        {"gru_train_window", "rows per GRU training block"},
        {"gru_test_window", "rows per GRU test block"},
        {"validation_fraction", "chronological tail held out for validation"},
        {"step", "block advance"},
        {"alphas", "comma-separated VaR tolerance levels"},
        {"bootstrap_b", "McNeil-Frey bootstrap resamples"},
        {"seed", "master random seed"},
        {"threads", "worker thread cap (0 = default)"},
        {"sim_days", "synthetic series length"},
        {"sim_mu", "simulator mean"},
        {"sim_alpha0", "simulator GARCH level"},
        {"sim_alpha1", "simulator ARCH coefficient"},
        {"sim_beta1", "simulator GARCH coefficient"},
        {"initial_price", "synthetic price anchor"},
        {"overnight_fraction", "variance share assigned to the open gap"},
    };
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError("duplicate config key '" + key + "'");
    }

    static const auto docs = config_key_docs();
    for (const auto& [key, value] : kv) {
        (void)value;
        if (std::none_of(docs.begin(), docs.end(),
                         [&](const auto& d) { return d.first == key; }))
            throw ConfigError("unknown config key '" + key + "'");
    }

    RunConfig c = default_config();
    auto get = [&](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto* v = get("asset")) c.asset = *v;
    if (auto* v = get("input_csv")) c.input_csv = *v;
    if (auto* v = get("forecasts_csv")) c.forecasts_csv = *v;
    if (auto* v = get("out_dir")) c.out_dir = *v;
    if (auto* v = get("return_scale")) c.return_scale = to_double("return_scale", *v);
    if (auto* v = get("gkyz_window")) c.gkyz_window = static_cast<int>(to_int("gkyz_window", *v));
    if (auto* v = get("garch_family")) c.garch.family = family_from_name(*v);
    if (auto* v = get("garch_p")) c.garch.p = static_cast<int>(to_int("garch_p", *v));
    if (auto* v = get("garch_q")) c.garch.q = static_cast<int>(to_int("garch_q", *v));
    if (auto* v = get("mean_model")) {
        if (*v == "constant") c.garch.mean_model = MeanModel::Constant;
        else if (*v == "ar1") c.garch.mean_model = MeanModel::Ar1;
        else throw ConfigError("mean_model must be constant or ar1");
    }
    if (auto* v = get("distribution")) {
        if (*v == "normal") c.garch.distribution = DistributionSpec::normal();
        else if (*v == "student_t") c.garch.distribution = DistributionSpec::student_t(8.0);
        else if (*v == "skew_student_t") c.garch.distribution = DistributionSpec::skew_t(8.0, 1.0);
        else throw ConfigError("distribution must be normal, student_t or skew_student_t");
    }
    if (auto* v = get("nu")) c.garch.distribution.nu = to_double("nu", *v);
    if (auto* v = get("xi")) c.garch.distribution.xi = to_double("xi", *v);
    if (auto* v = get("gru_layers")) {
        c.gru.layer_sizes.clear();
        for (const auto& part : split(*v, ','))
            c.gru.layer_sizes.push_back(static_cast<int>(to_int("gru_layers", part)));
    }
    if (auto* v = get("gru_sequence_length"))
        c.gru.sequence_length = static_cast<int>(to_int("gru_sequence_length", *v));
    if (auto* v = get("gru_batch_size"))
        c.gru.batch_size = static_cast<int>(to_int("gru_batch_size", *v));
    if (auto* v = get("gru_epochs")) c.gru.epochs = static_cast<int>(to_int("gru_epochs", *v));
    if (auto* v = get("gru_learning_rate"))
        c.gru.learning_rate = to_double("gru_learning_rate", *v);
    if (auto* v = get("gru_dropout")) c.gru.dropout_rate = to_double("gru_dropout", *v);
    if (auto* v = get("gru_l2")) c.gru.l2_lambda = to_double("gru_l2", *v);
    if (auto* v = get("gru_activation")) {
        if (*v == "relu") c.gru.activation = GruActivation::Relu;
        else if (*v == "tanh") c.gru.activation = GruActivation::Tanh;
        else throw ConfigError("gru_activation must be relu or tanh");
    }
    if (auto* v = get("garch_window"))
        c.plan.garch_window = static_cast<int>(to_int("garch_window", *v));
    if (auto* v = get("gru_train_window"))
        c.plan.gru_train_window = static_cast<int>(to_int("gru_train_window", *v));
    if (auto* v = get("gru_test_window"))
        c.plan.gru_test_window = static_cast<int>(to_int("gru_test_window", *v));
    if (auto* v = get("validation_fraction"))
        c.plan.validation_fraction = to_double("validation_fraction", *v);
    if (auto* v = get("step")) c.plan.step = static_cast<int>(to_int("step", *v));
    if (auto* v = get("alphas")) {
        c.alphas.clear();
        for (const auto& part : split(*v, ',')) c.alphas.push_back(to_double("alphas", part));
    }
    if (auto* v = get("bootstrap_b"))
        c.bootstrap_b = static_cast<std::size_t>(to_int("bootstrap_b", *v));
    if (auto* v = get("seed")) {
        c.seed = static_cast<std::uint64_t>(to_int("seed", *v));
        c.gru.seed = c.seed;
    }
    if (auto* v = get("threads")) c.threads = static_cast<int>(to_int("threads", *v));
    if (auto* v = get("sim_days")) c.sim_days = static_cast<std::size_t>(to_int("sim_days", *v));
    if (auto* v = get("sim_mu")) c.sim_params.mu = to_double("sim_mu", *v);
    if (auto* v = get("sim_alpha0")) c.sim_params.alpha0 = to_double("sim_alpha0", *v);
    if (auto* v = get("sim_alpha1")) c.sim_params.alpha[0] = to_double("sim_alpha1", *v);
    if (auto* v = get("sim_beta1")) c.sim_params.beta[0] = to_double("sim_beta1", *v);
    if (auto* v = get("initial_price")) c.initial_price = to_double("initial_price", *v);
    if (auto* v = get("overnight_fraction"))
        c.overnight_fraction = to_double("overnight_fraction", *v);

    c.validate();
    return c;
}

}  // namespace volcast
