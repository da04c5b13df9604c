#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volcast/garch.hpp"
#include "volcast/gru.hpp"
#include "volcast/hybrid.hpp"

namespace volcast {

// Flat key=value run configuration; every default is the paper-protocol
// value. Unknown keys are configuration errors.
struct RunConfig {
    std::string asset = "asset";
    std::string input_csv;
    std::string forecasts_csv;  // backtest command input
    std::string out_dir = ".";
    double return_scale = 100.0;
    int gkyz_window = 10;

    GarchSpec garch;
    GruConfig gru;
    RollingPlan plan;

    std::vector<double> alphas{0.05, 0.01};
    std::size_t bootstrap_b = 10000;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = library default

    // synthetic-data generation
    std::size_t sim_days = 1500;
    GarchParams sim_params;
    double initial_price = 100.0;
    double overnight_fraction = 0.2;

    void validate() const;
};

RunConfig default_config();
RunConfig load_config(const std::string& path);

// Documented key list (key -> description), for `--help-config`.
std::vector<std::pair<std::string, std::string>> config_key_docs();

}  // namespace volcast
