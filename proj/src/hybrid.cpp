#include "volcast/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "volcast/errors.hpp"

namespace volcast {

void RollingPlan::validate() const {
    if (garch_window < 1 || gru_train_window < 1 || gru_test_window < 1 || step < 1)
        throw ConfigError("rolling plan windows must be positive");
    if (!(validation_fraction > 0 && validation_fraction < 1))
        throw ConfigError("validation fraction must lie in (0,1)");
}

int RollingPlan::validation_size() const {
    return static_cast<int>(std::lround(validation_fraction * gru_train_window));
}

namespace {

struct WindowResult {
    bool ok = false;
    GarchFit fit;
};

ReturnSeries window_slice(const ReturnSeries& returns, std::size_t begin, std::size_t count) {
    ReturnSeries w;
    w.scale = returns.scale;
    w.dates.assign(returns.dates.begin() + begin, returns.dates.begin() + begin + count);
    w.values.assign(returns.values.begin() + begin, returns.values.begin() + begin + count);
    return w;
}

GarchForecastSeries assemble_forecasts(const ReturnSeries& returns, int window,
                                       std::vector<WindowResult>& fits) {
    // fits[k] is for the window ending at return index window-1+k
    GarchForecastSeries out;
    const std::size_t W = static_cast<std::size_t>(window);
    const GarchFit* carried = nullptr;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        if (fits[k].ok) {
            carried = &fits[k].fit;
        } else {
            ++out.failed_fits;
            if (carried == nullptr) continue;  // nothing to carry yet: skip this date
        }
        const std::size_t end = W - 1 + k;  // inclusive window end
        auto win = window_slice(returns, end + 1 - W, W);
        GarchFit use = *carried;
        if (!fits[k].ok) {
            // carried parameters, current window: recompute the filter state
            double mean = 0;
            for (double r : win.values) mean += r;
            mean /= static_cast<double>(win.size());
            double var = 0;
            for (double r : win.values) var += (r - mean) * (r - mean);
            use.h_init = var / static_cast<double>(win.size());
        }
        const auto fc = forecast_one_step(use, win);
        out.dates.push_back(end + 1 < returns.size() ? returns.dates[end + 1]
                                                     : returns.dates[end].next());
        out.r_f.push_back(fc.r_f);
        out.sigma_f.push_back(fc.sigma_f);
    }
    return out;
}

std::vector<WindowResult> fit_windows(const GarchSpec& spec, const ReturnSeries& returns,
                                      int window, const FitOptions& options, bool parallel) {
    if (returns.size() <= static_cast<std::size_t>(window))
        throw DataError("rolling window does not fit inside the return series");
    const std::size_t W = static_cast<std::size_t>(window);
    const std::size_t n_windows = returns.size() - W;  // windows ending at W-1 .. size-2
    std::vector<WindowResult> fits(n_windows);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::size_t k = 0; k < n_windows; ++k) {
        try {
            auto win = window_slice(returns, k, W);
            fits[k].fit = fit(spec, win, options);
            fits[k].ok = true;
        } catch (const std::exception&) {
            fits[k].ok = false;
        }
    }
    return fits;
}

}  // namespace

GarchForecastSeries rolling_garch_forecasts(const GarchSpec& spec, const ReturnSeries& returns,
                                            int window, const FitOptions& options) {
    auto fits = fit_windows(spec, returns, window, options, true);
    return assemble_forecasts(returns, window, fits);
}

GarchForecastSeries rolling_garch_forecasts_serial(const GarchSpec& spec,
                                                   const ReturnSeries& returns, int window,
                                                   const FitOptions& options) {
    auto fits = fit_windows(spec, returns, window, options, false);
    return assemble_forecasts(returns, window, fits);
}

FeatureMatrix build_features(const ReturnSeries& returns,
                             const VolatilityEstimateSeries& gkyz_scaled,
                             const GarchForecastSeries& garch_forecasts) {
    std::map<std::int64_t, double> gkyz, gf_sigma, gf_r;
    for (std::size_t i = 0; i < gkyz_scaled.size(); ++i)
        gkyz[gkyz_scaled.dates[i].serial()] = gkyz_scaled.sigma[i];
    for (std::size_t i = 0; i < garch_forecasts.dates.size(); ++i) {
        gf_sigma[garch_forecasts.dates[i].serial()] = garch_forecasts.sigma_f[i];
        gf_r[garch_forecasts.dates[i].serial()] = garch_forecasts.r_f[i];
    }

    FeatureMatrix fm;
    // candidate rows: consecutive return dates (t, t+1) where t+1 has a target
    for (std::size_t t = 0; t + 1 < returns.size(); ++t) {
        const std::int64_t dt = returns.dates[t].serial();
        const std::int64_t dn = returns.dates[t + 1].serial();
        auto target_it = gkyz.find(dn);
        if (target_it == gkyz.end()) continue;
        auto g_it = gkyz.find(dt);
        auto s_it = gf_sigma.find(dt);
        auto sn_it = gf_sigma.find(dn);
        if (g_it == gkyz.end() || s_it == gf_sigma.end() || sn_it == gf_sigma.end()) {
            ++fm.dropped_rows;
            continue;
        }
        fm.dates.push_back(returns.dates[t]);
        fm.rows.push_back({std::abs(returns.values[t]), g_it->second, s_it->second});
        fm.target.push_back(target_it->second);
        fm.sigma_garch_next.push_back(sn_it->second);
        fm.r_f_next.push_back(gf_r.at(dn));
    }
    if (fm.rows.empty()) throw DataError("feature matrix is empty after alignment");
    return fm;
}

namespace {

TrainingSequence make_sequence(const FeatureMatrix& fm, std::size_t end_row, int seq_len,
                               const std::array<double, 3>& mean,
                               const std::array<double, 3>& sd) {
    TrainingSequence s;
    s.features = Mat(seq_len, 3);
    for (int t = 0; t < seq_len; ++t) {
        const auto& row = fm.rows[end_row - static_cast<std::size_t>(seq_len) + 1 + t];
        for (int j = 0; j < 3; ++j) s.features(t, j) = (row[j] - mean[j]) / sd[j];
    }
    s.target = fm.target[end_row];
    return s;
}

std::uint64_t block_seed(std::uint64_t base, int block) {
    std::uint64_t s = base ^ (0xB10CULL + static_cast<std::uint64_t>(block) * 0x9E3779B97F4A7C15ULL);
    s ^= s >> 27;
    return s;
}

}  // namespace

HybridRunResult run_hybrid(const RollingPlan& plan, const GruConfig& config,
                           const FeatureMatrix& features) {
    plan.validate();
    config.validate();
    const int L = config.sequence_length;
    const std::size_t n = features.size();
    const std::size_t train_w = static_cast<std::size_t>(plan.gru_train_window);
    const std::size_t test_w = static_cast<std::size_t>(plan.gru_test_window);
    const std::size_t val_w = static_cast<std::size_t>(plan.validation_size());
    if (train_w + 1 > n)
        throw DataError("feature matrix shorter than one training block");
    if (val_w + static_cast<std::size_t>(L) >= train_w)
        throw ConfigError("validation split leaves no training sequences");

    HybridRunResult result;
    for (std::size_t start = 0; start + train_w < n;
         start += static_cast<std::size_t>(plan.step)) {
        const int block = result.blocks;
        const std::size_t train_end = start + train_w;           // exclusive
        const std::size_t val_begin = train_end - val_w;
        const std::size_t test_end = std::min(train_end + test_w, n);

        // per-feature standardization from the training rows
        std::array<double, 3> mean{}, sd{};
        for (std::size_t i = start; i < train_end; ++i)
            for (int j = 0; j < 3; ++j) mean[j] += features.rows[i][j];
        for (int j = 0; j < 3; ++j) mean[j] /= static_cast<double>(train_w);
        for (std::size_t i = start; i < train_end; ++i)
            for (int j = 0; j < 3; ++j) {
                const double d = features.rows[i][j] - mean[j];
                sd[j] += d * d;
            }
        for (int j = 0; j < 3; ++j) {
            sd[j] = std::sqrt(sd[j] / static_cast<double>(train_w));
            if (!(sd[j] > 0)) sd[j] = 1.0;
        }

        TrainingSet train_set, val_set;
        for (std::size_t i = start + static_cast<std::size_t>(L) - 1; i < val_begin; ++i)
            train_set.sequences.push_back(make_sequence(features, i, L, mean, sd));
        for (std::size_t i = val_begin; i < train_end; ++i)
            val_set.sequences.push_back(make_sequence(features, i, L, mean, sd));

        GruConfig block_config = config;
        block_config.seed = block_seed(config.seed, block);

        TrainResult trained;
        try {
            trained = train(block_config, train_set, val_set);
        } catch (const ConvergenceError&) {
            result.failed_block = block;
            return result;  // partial results preserved
        }
        result.block_histories.push_back(trained.history);

        for (std::size_t i = train_end; i < test_end; ++i) {
            const auto seq = make_sequence(features, i, L, mean, sd);
            double pred = network_forward(trained.weights, block_config, seq.features,
                                          ForwardMode::Eval);
            if (pred < 0) {
                pred = 0;
                ++result.negative_outputs_floored;
            }
            ForecastRecord rec;
            rec.date = features.dates[i].next();  // placeholder, fixed below if known
            // the target date is the date of row i+1 when it exists
            if (i + 1 < n) rec.date = features.dates[i + 1];
            rec.r_f = features.r_f_next[i];
            rec.sigma_garch = features.sigma_garch_next[i];
            rec.sigma_hybrid = pred;
            rec.sigma_gkyz = features.target[i];
            result.records.push_back(rec);
        }
        ++result.blocks;
    }
    if (result.blocks == 0) throw DataError("no complete train+test block fits the feature matrix");
    return result;
}

void write_forecasts_csv(const std::string& path, const std::vector<ForecastRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,r_f,sigma_garch,sigma_hybrid,sigma_gkyz\n";
    out.precision(17);
    for (const auto& r : records)
        out << r.date.to_string() << ',' << r.r_f << ',' << r.sigma_garch << ','
            << r.sigma_hybrid << ',' << r.sigma_gkyz << '\n';
}

std::vector<ForecastRecord> read_forecasts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("date,r_f,sigma_garch,sigma_hybrid,sigma_gkyz", 0) != 0)
        throw DataError("unexpected forecast CSV header in " + path);
    std::vector<ForecastRecord> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5)
            throw DataError("row " + std::to_string(row) + ": expected 5 columns");
        ForecastRecord r;
        r.date = Date::parse(cells[0]);
        r.r_f = std::stod(cells[1]);
        r.sigma_garch = std::stod(cells[2]);
        r.sigma_hybrid = std::stod(cells[3]);
        r.sigma_gkyz = std::stod(cells[4]);
        out.push_back(r);
    }
    return out;
}

}  // namespace volcast
