#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace volcast {

enum class GruActivation { Relu, Tanh };

struct GruConfig {
    std::vector<int> layer_sizes{512, 256, 128};
    int input_dim = 3;
    int sequence_length = 6;
    int batch_size = 500;
    int epochs = 150;
    double learning_rate = 0.0009;
    double dropout_rate = 0.3;
    double l2_lambda = 0.00001;
    std::uint64_t seed = 0;
    GruActivation activation = GruActivation::Relu;

    void validate() const;
};

// Row-major dense matrix; all the linear algebra in this module is plain loops.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

using Vec = std::vector<double>;

struct GruLayerWeights {
    Mat Wz, Wr, Wo;  // input kernels, hidden x in
    Mat Uz, Ur, Uo;  // recurrent kernels, hidden x hidden
    Vec bz, br, bo;  // biases
};

struct GruWeights {
    std::vector<GruLayerWeights> layers;
    Vec dense_w;
    double dense_b = 0;

    // every tensor, in a fixed order (used by Adam, serialization, tests)
    void for_each_tensor(const std::function<void(std::vector<double>&)>& fn);
    void for_each_tensor(const std::function<void(const std::vector<double>&)>& fn) const;
};

GruWeights init_weights(const GruConfig& config);  // seeded Glorot-uniform
GruWeights zero_like(const GruWeights& w);

// One (feature window, next-day target) pair; features are
// sequence_length x input_dim, row t holding day t's inputs.
struct TrainingSequence {
    Mat features;
    double target = 0;
};

struct TrainingSet {
    std::vector<TrainingSequence> sequences;  // chronological
};

struct CellState {
    Vec z, r, o_hat, o;
};

// Single GRU step, Eq.-by-Eq.; gates are sigmoid, the candidate uses the
// configured activation.
CellState cell_forward(const GruLayerWeights& w, const Vec& x, const Vec& o_prev,
                       GruActivation act);

enum class ForwardMode { Train, Eval };

// Unrolls the stacked network over one sequence from zero state and maps the
// top layer's final state through the dense neuron. Train mode applies
// inverted dropout to each GRU layer's output, with masks derived from
// mask_salt (eval ignores it).
double network_forward(const GruWeights& weights, const GruConfig& config, const Mat& sequence,
                       ForwardMode mode, std::uint64_t mask_salt = 0);

// MSE + l2_lambda * sum of squared input-kernel (W) entries.
double loss(const Vec& predictions, const Vec& targets, const GruWeights& weights,
            double l2_lambda);

// Batch loss and full analytic BPTT gradient, both including the L2 term.
// Deterministic for fixed inputs: per-sequence gradients are computed in
// OpenMP chunks of fixed layout and reduced in chunk order.
std::pair<double, GruWeights> loss_and_gradient(const GruWeights& weights,
                                                const GruConfig& config,
                                                const std::vector<const TrainingSequence*>& batch,
                                                std::uint64_t mask_salt);

struct EpochStats {
    double train_loss = 0;
    double validation_loss = 0;
};

struct TrainResult {
    GruWeights weights;  // from the epoch with the lowest validation loss
    std::vector<EpochStats> history;
    int best_epoch = 0;
};

TrainResult train(const GruConfig& config, const TrainingSet& data, const TrainingSet& validation);

}  // namespace volcast
