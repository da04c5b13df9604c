#include "volcast/gru.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "volcast/errors.hpp"

namespace volcast {

namespace {

std::uint64_t mix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return (static_cast<double>(mix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    mix64(s);
    return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double activate(GruActivation act, double x) {
    return act == GruActivation::Relu ? (x > 0 ? x : 0.0) : std::tanh(x);
}

double activate_grad(GruActivation act, double pre, double post) {
    return act == GruActivation::Relu ? (pre > 0 ? 1.0 : 0.0) : 1.0 - post * post;
}

void matvec(const Mat& M, const Vec& v, Vec& out) {
    for (int i = 0; i < M.rows; ++i) {
        double acc = 0;
        const double* row = &M.a[static_cast<std::size_t>(i) * M.cols];
        for (int j = 0; j < M.cols; ++j) acc += row[j] * v[j];
        out[i] += acc;
    }
}

// out += M^T v
void matvec_t(const Mat& M, const Vec& v, Vec& out) {
    for (int i = 0; i < M.rows; ++i) {
        const double vi = v[i];
        const double* row = &M.a[static_cast<std::size_t>(i) * M.cols];
        for (int j = 0; j < M.cols; ++j) out[j] += row[j] * vi;
    }
}

// M += u v^T
void outer_acc(Mat& M, const Vec& u, const Vec& v) {
    for (int i = 0; i < M.rows; ++i) {
        double* row = &M.a[static_cast<std::size_t>(i) * M.cols];
        const double ui = u[i];
        for (int j = 0; j < M.cols; ++j) row[j] += ui * v[j];
    }
}

}  // namespace

void GruConfig::validate() const {
    if (layer_sizes.empty()) throw ConfigError("at least one GRU layer required");
    for (int s : layer_sizes)
        if (s < 1) throw ConfigError("layer sizes must be >= 1");
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    if (sequence_length < 1) throw ConfigError("sequence_length must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(learning_rate >= 0)) throw ConfigError("learning_rate must be >= 0");
    if (!(dropout_rate >= 0 && dropout_rate < 1))
        throw ConfigError("dropout_rate must lie in [0, 1)");
    if (!(l2_lambda >= 0)) throw ConfigError("l2_lambda must be >= 0");
}

void GruWeights::for_each_tensor(const std::function<void(std::vector<double>&)>& fn) {
    for (auto& l : layers) {
        fn(l.Wz.a);
        fn(l.Wr.a);
        fn(l.Wo.a);
        fn(l.Uz.a);
        fn(l.Ur.a);
        fn(l.Uo.a);
        fn(l.bz);
        fn(l.br);
        fn(l.bo);
    }
    fn(dense_w);
}

void GruWeights::for_each_tensor(const std::function<void(const std::vector<double>&)>& fn) const {
    const_cast<GruWeights*>(this)->for_each_tensor(
        [&](std::vector<double>& t) { fn(t); });
}

GruWeights init_weights(const GruConfig& config) {
    config.validate();
    GruWeights w;
    std::uint64_t state = combine(config.seed, 0x1A17ULL);
    auto glorot = [&](Mat& M, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& v : M.a) v = (2 * uniform01(state) - 1) * limit;
    };
    int in = config.input_dim;
    for (int size : config.layer_sizes) {
        GruLayerWeights l;
        l.Wz = Mat(size, in);
        l.Wr = Mat(size, in);
        l.Wo = Mat(size, in);
        l.Uz = Mat(size, size);
        l.Ur = Mat(size, size);
        l.Uo = Mat(size, size);
        l.bz.assign(size, 0.0);
        l.br.assign(size, 0.0);
        l.bo.assign(size, 0.0);
        glorot(l.Wz, in, size);
        glorot(l.Wr, in, size);
        glorot(l.Wo, in, size);
        glorot(l.Uz, size, size);
        glorot(l.Ur, size, size);
        glorot(l.Uo, size, size);
        w.layers.push_back(std::move(l));
        in = size;
    }
    const int top = config.layer_sizes.back();
    w.dense_w.assign(top, 0.0);
    {
        const double limit = std::sqrt(6.0 / (top + 1));
        for (auto& v : w.dense_w) v = (2 * uniform01(state) - 1) * limit;
    }
    w.dense_b = 0.0;
    return w;
}

GruWeights zero_like(const GruWeights& w) {
    GruWeights z = w;
    z.for_each_tensor([](std::vector<double>& t) { std::fill(t.begin(), t.end(), 0.0); });
    z.dense_b = 0.0;
    return z;
}

CellState cell_forward(const GruLayerWeights& w, const Vec& x, const Vec& o_prev,
                       GruActivation act) {
    const int n = w.Uz.rows;
    if (static_cast<int>(x.size()) != w.Wz.cols || static_cast<int>(o_prev.size()) != n)
        throw ConfigError("cell_forward dimension mismatch");
    CellState s;
    s.z = w.bz;
    s.r = w.br;
    s.o_hat = w.bo;
    matvec(w.Wz, x, s.z);
    matvec(w.Uz, o_prev, s.z);
    matvec(w.Wr, x, s.r);
    matvec(w.Ur, o_prev, s.r);
    for (int i = 0; i < n; ++i) {
        s.z[i] = sigmoid(s.z[i]);
        s.r[i] = sigmoid(s.r[i]);
    }
    Vec ro(n);
    for (int i = 0; i < n; ++i) ro[i] = s.r[i] * o_prev[i];
    matvec(w.Wo, x, s.o_hat);
    matvec(w.Uo, ro, s.o_hat);
    s.o.resize(n);
    for (int i = 0; i < n; ++i) {
        s.o_hat[i] = activate(act, s.o_hat[i]);
        s.o[i] = (1 - s.z[i]) * o_prev[i] + s.z[i] * s.o_hat[i];
    }
    return s;
}

namespace {

struct LayerCache {
    std::vector<Vec> input;        // per timestep, post-dropout of the layer below
    std::vector<Vec> pre_o;       // candidate pre-activation
    std::vector<CellState> state;  // z, r, o_hat, o per timestep
    std::vector<Vec> mask;         // dropout mask on this layer's output
};

struct SeqCache {
    std::vector<LayerCache> layers;
    Vec dense_in;
    double pred = 0;
};

// Forward pass shared between prediction and training; the dropout mask
// stream is a pure function of (config.seed, mask_salt), consumed in layer,
// timestep, unit order.
double forward_pass(const GruWeights& w, const GruConfig& cfg, const Mat& seq, ForwardMode mode,
                    std::uint64_t mask_salt, SeqCache* cache) {
    if (seq.rows != cfg.sequence_length || seq.cols != cfg.input_dim)
        throw ConfigError("sequence shape does not match config");
    if (w.layers.size() != cfg.layer_sizes.size())
        throw ConfigError("weights do not match config layer count");

    const int T = cfg.sequence_length;
    const bool drop = mode == ForwardMode::Train && cfg.dropout_rate > 0;
    const double keep = 1.0 - cfg.dropout_rate;
    std::uint64_t mask_state = combine(cfg.seed, combine(mask_salt, 0xD120ULL));

    if (cache) cache->layers.resize(w.layers.size());

    std::vector<Vec> x(T);
    for (int t = 0; t < T; ++t) {
        x[t].assign(seq.cols, 0.0);
        for (int j = 0; j < seq.cols; ++j) x[t][j] = seq(t, j);
    }

    Vec final_out;
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const auto& lw = w.layers[l];
        const int n = cfg.layer_sizes[l];
        LayerCache* lc = cache ? &cache->layers[l] : nullptr;
        if (lc) {
            lc->input.resize(T);
            lc->pre_o.resize(T);
            lc->state.resize(T);
            lc->mask.resize(T);
        }
        Vec o_prev(n, 0.0);
        for (int t = 0; t < T; ++t) {
            // inline cell step so the candidate pre-activation can be cached
            CellState s;
            s.z = lw.bz;
            s.r = lw.br;
            Vec ao = lw.bo;
            matvec(lw.Wz, x[t], s.z);
            matvec(lw.Uz, o_prev, s.z);
            matvec(lw.Wr, x[t], s.r);
            matvec(lw.Ur, o_prev, s.r);
            for (int i = 0; i < n; ++i) {
                s.z[i] = sigmoid(s.z[i]);
                s.r[i] = sigmoid(s.r[i]);
            }
            Vec ro(n);
            for (int i = 0; i < n; ++i) ro[i] = s.r[i] * o_prev[i];
            matvec(lw.Wo, x[t], ao);
            matvec(lw.Uo, ro, ao);
            s.o_hat.resize(n);
            s.o.resize(n);
            for (int i = 0; i < n; ++i) {
                s.o_hat[i] = activate(cfg.activation, ao[i]);
                s.o[i] = (1 - s.z[i]) * o_prev[i] + s.z[i] * s.o_hat[i];
            }

            Vec mask(n, 1.0);
            if (drop)
                for (int i = 0; i < n; ++i)
                    mask[i] = uniform01(mask_state) < keep ? 1.0 / keep : 0.0;
            Vec out(n);
            for (int i = 0; i < n; ++i) out[i] = s.o[i] * mask[i];

            if (lc) {
                lc->input[t] = x[t];
                lc->pre_o[t] = std::move(ao);
                lc->state[t] = s;
                lc->mask[t] = std::move(mask);
            }
            o_prev = s.o;
            x[t] = std::move(out);  // becomes next layer's input
        }
        final_out = x[T - 1];
    }

    double pred = w.dense_b;
    for (std::size_t i = 0; i < w.dense_w.size(); ++i) pred += w.dense_w[i] * final_out[i];
    if (cache) {
        cache->dense_in = final_out;
        cache->pred = pred;
    }
    return pred;
}

// BPTT for one sequence; grad is accumulated (dense_b in grad.dense_b).
void backward_pass(const GruWeights& w, const GruConfig& cfg, const SeqCache& cache,
                   double dpred, GruWeights& grad) {
    const int T = cfg.sequence_length;
    const std::size_t L = w.layers.size();

    // gradient w.r.t. each layer's raw output o_t
    std::vector<std::vector<Vec>> dout(L);
    for (std::size_t l = 0; l < L; ++l) {
        dout[l].resize(T);
        for (int t = 0; t < T; ++t) dout[l][t].assign(cfg.layer_sizes[l], 0.0);
    }

    grad.dense_b += dpred;
    const auto& top_mask = cache.layers[L - 1].mask[T - 1];
    for (int i = 0; i < cfg.layer_sizes[L - 1]; ++i) {
        grad.dense_w[i] += dpred * cache.dense_in[i];
        dout[L - 1][T - 1][i] = dpred * w.dense_w[i] * top_mask[i];
    }

    for (std::size_t li = L; li-- > 0;) {
        const auto& lw = w.layers[li];
        auto& lg = grad.layers[li];
        const auto& lc = cache.layers[li];
        const int n = cfg.layer_sizes[li];
        const int in_dim = lw.Wz.cols;

        Vec carry(n, 0.0);  // d o_{t} flowing from step t+1
        for (int t = T - 1; t >= 0; --t) {
            const auto& s = lc.state[t];
            const Vec o_prev = t > 0 ? lc.state[t - 1].o : Vec(n, 0.0);

            Vec d_o(n);
            for (int i = 0; i < n; ++i) d_o[i] = dout[li][t][i] + carry[i];

            Vec d_ao(n), d_az(n), d_ar(n), d_oprev(n, 0.0);
            for (int i = 0; i < n; ++i) {
                const double dz = d_o[i] * (s.o_hat[i] - o_prev[i]);
                const double dohat = d_o[i] * s.z[i];
                d_oprev[i] = d_o[i] * (1 - s.z[i]);
                d_ao[i] = dohat * activate_grad(cfg.activation, lc.pre_o[t][i], s.o_hat[i]);
                d_az[i] = dz * s.z[i] * (1 - s.z[i]);
            }
            Vec d_ro(n, 0.0);
            matvec_t(lw.Uo, d_ao, d_ro);
            for (int i = 0; i < n; ++i) {
                const double dr = d_ro[i] * o_prev[i];
                d_oprev[i] += d_ro[i] * s.r[i];
                d_ar[i] = dr * s.r[i] * (1 - s.r[i]);
            }

            Vec ro(n);
            for (int i = 0; i < n; ++i) ro[i] = s.r[i] * o_prev[i];
            outer_acc(lg.Wz, d_az, lc.input[t]);
            outer_acc(lg.Wr, d_ar, lc.input[t]);
            outer_acc(lg.Wo, d_ao, lc.input[t]);
            outer_acc(lg.Uz, d_az, o_prev);
            outer_acc(lg.Ur, d_ar, o_prev);
            outer_acc(lg.Uo, d_ao, ro);
            for (int i = 0; i < n; ++i) {
                lg.bz[i] += d_az[i];
                lg.br[i] += d_ar[i];
                lg.bo[i] += d_ao[i];
            }
            matvec_t(lw.Uz, d_az, d_oprev);
            matvec_t(lw.Ur, d_ar, d_oprev);
            carry = std::move(d_oprev);

            if (li > 0) {
                // gradient to the layer below, through its dropout mask
                Vec dx(in_dim, 0.0);
                matvec_t(lw.Wz, d_az, dx);
                matvec_t(lw.Wr, d_ar, dx);
                matvec_t(lw.Wo, d_ao, dx);
                const auto& below_mask = cache.layers[li - 1].mask[t];
                for (int j = 0; j < in_dim; ++j) dout[li - 1][t][j] += dx[j] * below_mask[j];
            }
        }
    }
}

double l2_penalty(const GruWeights& w, double lambda) {
    if (lambda == 0) return 0;
    double acc = 0;
    for (const auto& l : w.layers) {
        for (const auto* M : {&l.Wz, &l.Wr, &l.Wo})
            for (double v : M->a) acc += v * v;
    }
    return lambda * acc;
}

void add_l2_gradient(const GruWeights& w, double lambda, GruWeights& grad) {
    if (lambda == 0) return;
    for (std::size_t li = 0; li < w.layers.size(); ++li) {
        auto add = [&](const Mat& M, Mat& G) {
            for (std::size_t k = 0; k < M.a.size(); ++k) G.a[k] += 2 * lambda * M.a[k];
        };
        add(w.layers[li].Wz, grad.layers[li].Wz);
        add(w.layers[li].Wr, grad.layers[li].Wr);
        add(w.layers[li].Wo, grad.layers[li].Wo);
    }
}

}  // namespace

double network_forward(const GruWeights& weights, const GruConfig& config, const Mat& sequence,
                       ForwardMode mode, std::uint64_t mask_salt) {
    return forward_pass(weights, config, sequence, mode, mask_salt, nullptr);
}

double loss(const Vec& predictions, const Vec& targets, const GruWeights& weights,
            double l2_lambda) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw ConfigError("loss requires equal, nonempty prediction/target lengths");
    double mse = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        mse += e * e;
    }
    mse /= static_cast<double>(predictions.size());
    return mse + l2_penalty(weights, l2_lambda);
}

std::pair<double, GruWeights> loss_and_gradient(const GruWeights& weights,
                                                const GruConfig& config,
                                                const std::vector<const TrainingSequence*>& batch,
                                                std::uint64_t mask_salt) {
    if (batch.empty()) throw ConfigError("empty batch");
    const std::size_t B = batch.size();

    // fixed chunk layout keeps the reduction order independent of thread count
    const std::size_t chunks = std::min<std::size_t>(4, B);
    std::vector<GruWeights> chunk_grad(chunks, zero_like(weights));
    std::vector<double> chunk_se(chunks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = c * B / chunks, hi = (c + 1) * B / chunks;
        for (std::size_t k = lo; k < hi; ++k) {
            SeqCache cache;
            const std::uint64_t salt = combine(mask_salt, static_cast<std::uint64_t>(k));
            forward_pass(weights, config, batch[k]->features, ForwardMode::Train, salt, &cache);
            const double err = cache.pred - batch[k]->target;
            chunk_se[c] += err * err;
            backward_pass(weights, config, cache, 2.0 * err / static_cast<double>(B),
                          chunk_grad[c]);
        }
    }

    GruWeights grad = std::move(chunk_grad[0]);
    double se = chunk_se[0];
    for (std::size_t c = 1; c < chunks; ++c) {
        se += chunk_se[c];
        std::vector<std::vector<double>*> dst, src;
        grad.for_each_tensor([&](std::vector<double>& t) { dst.push_back(&t); });
        chunk_grad[c].for_each_tensor([&](std::vector<double>& t) { src.push_back(&t); });
        for (std::size_t i = 0; i < dst.size(); ++i)
            for (std::size_t j = 0; j < dst[i]->size(); ++j) (*dst[i])[j] += (*src[i])[j];
        grad.dense_b += chunk_grad[c].dense_b;
    }
    add_l2_gradient(weights, config.l2_lambda, grad);
    const double total =
        se / static_cast<double>(B) + l2_penalty(weights, config.l2_lambda);
    return {total, std::move(grad)};
}

TrainResult train(const GruConfig& config, const TrainingSet& data,
                  const TrainingSet& validation) {
    config.validate();
    if (data.sequences.empty() || validation.sequences.empty())
        throw DataError("training and validation sets must be nonempty");

    GruWeights w = init_weights(config);
    GruWeights adam_m = zero_like(w), adam_v = zero_like(w);
    double adam_m_b = 0, adam_v_b = 0;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::size_t step = 0;

    auto validation_loss = [&](const GruWeights& wt) {
        Vec preds, targets;
        preds.reserve(validation.sequences.size());
        for (const auto& s : validation.sequences) {
            preds.push_back(network_forward(wt, config, s.features, ForwardMode::Eval));
            targets.push_back(s.target);
        }
        return loss(preds, targets, wt, config.l2_lambda);
    };

    TrainResult result;
    double best_val = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(data.sequences.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::uint64_t shuffle_state = combine(config.seed, combine(0x5455FFULL, epoch));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[mix64(shuffle_state) % i]);

        double epoch_se = 0;
        std::size_t seen = 0;
        const std::size_t bs = static_cast<std::size_t>(config.batch_size);
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += bs, ++batch_index) {
            std::vector<const TrainingSequence*> batch;
            for (std::size_t k = start; k < std::min(start + bs, order.size()); ++k)
                batch.push_back(&data.sequences[order[k]]);

            const std::uint64_t salt =
                combine(static_cast<std::uint64_t>(epoch), combine(0xBA7CFULL, batch_index));
            auto [batch_loss, grad] = loss_and_gradient(w, config, batch, salt);
            if (!std::isfinite(batch_loss))
                throw ConvergenceError("training diverged at epoch " + std::to_string(epoch + 1));
            epoch_se += batch_loss * static_cast<double>(batch.size());
            seen += batch.size();

            ++step;
            const double c1 = 1 - std::pow(b1, static_cast<double>(step));
            const double c2 = 1 - std::pow(b2, static_cast<double>(step));
            std::vector<std::vector<double>*> wt, gt, mt, vt;
            w.for_each_tensor([&](std::vector<double>& t) { wt.push_back(&t); });
            grad.for_each_tensor([&](std::vector<double>& t) { gt.push_back(&t); });
            adam_m.for_each_tensor([&](std::vector<double>& t) { mt.push_back(&t); });
            adam_v.for_each_tensor([&](std::vector<double>& t) { vt.push_back(&t); });
            for (std::size_t i = 0; i < wt.size(); ++i) {
                for (std::size_t j = 0; j < wt[i]->size(); ++j) {
                    double& m = (*mt[i])[j];
                    double& v = (*vt[i])[j];
                    const double g = (*gt[i])[j];
                    m = b1 * m + (1 - b1) * g;
                    v = b2 * v + (1 - b2) * g * g;
                    (*wt[i])[j] -= config.learning_rate * (m / c1) / (std::sqrt(v / c2) + eps);
                }
            }
            adam_m_b = b1 * adam_m_b + (1 - b1) * grad.dense_b;
            adam_v_b = b2 * adam_v_b + (1 - b2) * grad.dense_b * grad.dense_b;
            w.dense_b -= config.learning_rate * (adam_m_b / c1) / (std::sqrt(adam_v_b / c2) + eps);
        }

        EpochStats stats;
        stats.train_loss = epoch_se / static_cast<double>(seen);
        stats.validation_loss = validation_loss(w);
        result.history.push_back(stats);
        if (stats.validation_loss < best_val) {
            best_val = stats.validation_loss;
            result.weights = w;
            result.best_epoch = epoch;  // index into history
        }
    }
    return result;
}

}  // namespace volcast
