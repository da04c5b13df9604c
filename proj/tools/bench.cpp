// Timing comparison of the OpenMP kernels against their serial references:
// rolling GARCH window fits and the batched GRU gradient.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "volcast/gru.hpp"
#include "volcast/hybrid.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_rolling_garch() {
    volcast::GarchSpec spec;
    volcast::GarchParams params;
    params.alpha0 = 0.05;
    params.alpha = {0.10};
    params.beta = {0.85};
    const auto path = volcast::simulate(spec, params, 700, 42);

    auto t0 = Clock::now();
    const auto serial = volcast::rolling_garch_forecasts_serial(spec, path.returns, 252);
    const double t_serial = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = volcast::rolling_garch_forecasts(spec, path.returns, 252);
    const double t_parallel = seconds_since(t0);

    double max_diff = 0;
    for (std::size_t i = 0; i < serial.sigma_f.size(); ++i) {
        const double d = serial.sigma_f[i] - parallel.sigma_f[i];
        max_diff = std::max(max_diff, d < 0 ? -d : d);
    }
    std::printf("rolling GARCH (%zu windows):\n", serial.sigma_f.size());
    std::printf("  serial   %.3f s\n  parallel %.3f s  (speedup %.2fx, max |diff| %.3g)\n",
                t_serial, t_parallel, t_serial / t_parallel, max_diff);
}

void bench_gru_gradient() {
    volcast::GruConfig config;
    config.layer_sizes = {64, 32};
    config.sequence_length = 6;
    config.seed = 7;
    config.dropout_rate = 0.0;
    const auto weights = volcast::init_weights(config);

    std::uint64_t state = 99;
    auto next_unit = [&state]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
    };
    volcast::TrainingSet data;
    for (int s = 0; s < 256; ++s) {
        volcast::TrainingSequence seq;
        seq.features = volcast::Mat(config.sequence_length, config.input_dim);
        for (auto& v : seq.features.a) v = next_unit();
        seq.target = next_unit();
        data.sequences.push_back(std::move(seq));
    }
    std::vector<const volcast::TrainingSequence*> batch;
    for (const auto& s : data.sequences) batch.push_back(&s);

    const int reps = 10;
    auto run = [&](int threads) {
#ifdef _OPENMP
        omp_set_num_threads(threads);
#else
        (void)threads;
#endif
        auto t0 = Clock::now();
        double sink = 0;
        for (int r = 0; r < reps; ++r)
            sink += volcast::loss_and_gradient(weights, config, batch, 1).first;
        return std::pair<double, double>(seconds_since(t0), sink);
    };

    const auto [t1, l1] = run(1);
#ifdef _OPENMP
    const int n = omp_get_max_threads() > 1 ? omp_get_max_threads() : 2;
#else
    const int n = 1;
#endif
    const auto [tn, ln] = run(n);
    std::printf("GRU batch gradient (256 x [64,32], %d reps):\n", reps);
    std::printf("  1 thread   %.3f s\n  %d threads  %.3f s  (speedup %.2fx, loss diff %.3g)\n",
                t1, n, tn, t1 / tn, l1 - ln);
}

}  // namespace

int main() {
    bench_rolling_garch();
    bench_gru_gradient();
    return 0;
}
