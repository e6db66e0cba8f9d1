#include "alearn/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "alearn/errors.hpp"
#include "alearn/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight snapshots are defined little-endian");

namespace alearn {

namespace {

struct ForwardTrace {
    std::vector<Matrix> activations; // activations[0] = input, then per layer
    std::vector<Matrix> pre_acts;    // one per layer
    std::vector<Matrix> masks;       // scaled dropout masks per hidden layer
    Matrix probs;
    double mean_loss = 0.0; // filled only when labels are supplied
};

void check_batch(const MlpSpec& spec, const Matrix& batch) {
    if (batch.cols != spec.input_dim) {
        throw ShapeError("batch has " + std::to_string(batch.cols) +
                         " features, spec expects " + std::to_string(spec.input_dim));
    }
}

/// z = a W^T + b
Matrix affine(const Matrix& a, const Layer& layer) {
    Matrix z(a.rows, layer.weight.rows);
    for (std::int64_t r = 0; r < a.rows; ++r) {
        const auto in = a.row(r);
        auto out = z.row(r);
        for (std::int64_t o = 0; o < layer.weight.rows; ++o) {
            const auto w = layer.weight.row(o);
            double acc = layer.bias[static_cast<std::size_t>(o)];
            for (std::int64_t i = 0; i < a.cols; ++i) {
                acc += in[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
            }
            out[static_cast<std::size_t>(o)] = acc;
        }
    }
    return z;
}

/// Runs the network, keeping whatever backprop needs. When labels are given,
/// also accumulates the mean cross-entropy via log-sum-exp (kept smooth for
/// the finite-difference harness; the eps-clipped NLL is a metrics concern).
ForwardTrace run_forward(const MlpSpec& spec, const MlpWeights& weights,
                         const Matrix& batch, std::optional<std::uint64_t> mask_seed,
                         std::span<const int> labels) {
    check_batch(spec, batch);
    const std::size_t hidden_count = spec.hidden_dims.size();
    const bool dropout = mask_seed.has_value() && spec.dropout_rate > 0.0;
    const double keep = 1.0 - spec.dropout_rate;

    ForwardTrace trace;
    trace.activations.reserve(hidden_count + 1);
    trace.activations.push_back(batch);
    Rng mask_rng(dropout ? *mask_seed : 0);

    for (std::size_t l = 0; l < hidden_count; ++l) {
        Matrix z = affine(trace.activations.back(), weights.layers[l]);
        Matrix a(z.rows, z.cols);
        for (std::size_t i = 0; i < z.data.size(); ++i) {
            a.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
        }
        if (dropout) {
            Matrix mask(z.rows, z.cols);
            for (std::size_t i = 0; i < mask.data.size(); ++i) {
                mask.data[i] = mask_rng.uniform() < keep ? 1.0 / keep : 0.0;
                a.data[i] *= mask.data[i];
            }
            trace.masks.push_back(std::move(mask));
        }
        trace.pre_acts.push_back(std::move(z));
        trace.activations.push_back(std::move(a));
    }

    Matrix logits = affine(trace.activations.back(), weights.layers[hidden_count]);
    trace.probs = Matrix(logits.rows, logits.cols);
    double loss = 0.0;
    for (std::int64_t r = 0; r < logits.rows; ++r) {
        const auto z = logits.row(r);
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - zmax);
        const double lse = zmax + std::log(sum);
        auto p = trace.probs.row(r);
        for (std::size_t c = 0; c < z.size(); ++c) {
            p[c] = std::exp(z[c] - lse);
        }
        if (!labels.empty()) {
            loss += lse - z[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])];
        }
    }
    trace.pre_acts.push_back(std::move(logits));
    if (!labels.empty() && batch.rows > 0) {
        trace.mean_loss = loss / static_cast<double>(batch.rows);
    }
    return trace;
}

void check_labels(std::span<const int> labels, const Matrix& batch, std::int64_t class_count) {
    if (static_cast<std::int64_t>(labels.size()) != batch.rows) {
        throw ShapeError("batch has " + std::to_string(batch.rows) + " rows but " +
                         std::to_string(labels.size()) + " labels");
    }
    for (int l : labels) {
        if (l < 0 || l >= class_count) {
            throw ValidationError("label " + std::to_string(l) + " outside [0, C)");
        }
    }
}

MlpWeights backprop(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
                    std::span<const int> labels, std::optional<std::uint64_t> mask_seed,
                    double* loss_out) {
    if (batch.rows == 0) {
        throw ValidationError("gradient needs a non-empty batch");
    }
    check_labels(labels, batch, spec.class_count);
    ForwardTrace trace = run_forward(spec, weights, batch, mask_seed, labels);
    if (loss_out) *loss_out = trace.mean_loss;

    const auto layer_count = weights.layers.size();
    MlpWeights grads;
    grads.layers.resize(layer_count);
    for (std::size_t l = 0; l < layer_count; ++l) {
        grads.layers[l].weight =
            Matrix::zeros(weights.layers[l].weight.rows, weights.layers[l].weight.cols);
        grads.layers[l].bias.assign(weights.layers[l].bias.size(), 0.0);
    }

    // Output delta of softmax + mean cross-entropy: (p - onehot) / B.
    const double inv_b = 1.0 / static_cast<double>(batch.rows);
    Matrix delta = trace.probs;
    for (std::int64_t r = 0; r < delta.rows; ++r) {
        delta.at(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
        for (auto& v : delta.row(r)) v *= inv_b;
    }

    for (std::size_t l = layer_count; l-- > 0;) {
        const Matrix& input = trace.activations[l];
        Layer& g = grads.layers[l];
        for (std::int64_t r = 0; r < delta.rows; ++r) {
            const auto d = delta.row(r);
            const auto in = input.row(r);
            for (std::int64_t o = 0; o < g.weight.rows; ++o) {
                const double dv = d[static_cast<std::size_t>(o)];
                g.bias[static_cast<std::size_t>(o)] += dv;
                auto wrow = g.weight.row(o);
                for (std::int64_t i = 0; i < g.weight.cols; ++i) {
                    wrow[static_cast<std::size_t>(i)] += dv * in[static_cast<std::size_t>(i)];
                }
            }
        }
        if (l == 0) break;

        // delta_prev = (delta W) * mask * relu'(z)
        const Matrix& w = weights.layers[l].weight;
        Matrix prev(delta.rows, w.cols);
        for (std::int64_t r = 0; r < delta.rows; ++r) {
            const auto d = delta.row(r);
            auto p = prev.row(r);
            for (std::int64_t o = 0; o < w.rows; ++o) {
                const double dv = d[static_cast<std::size_t>(o)];
                if (dv == 0.0) continue;
                const auto wrow = w.row(o);
                for (std::int64_t i = 0; i < w.cols; ++i) {
                    p[static_cast<std::size_t>(i)] += dv * wrow[static_cast<std::size_t>(i)];
                }
            }
        }
        const Matrix& z = trace.pre_acts[l - 1];
        for (std::size_t i = 0; i < prev.data.size(); ++i) {
            double v = z.data[i] > 0.0 ? prev.data[i] : 0.0;
            if (!trace.masks.empty()) v *= trace.masks[l - 1].data[i];
            prev.data[i] = v;
        }
        delta = std::move(prev);
    }
    return grads;
}

} // namespace

std::vector<std::int64_t> MlpSpec::layer_dims() const {
    std::vector<std::int64_t> dims;
    dims.reserve(hidden_dims.size() + 2);
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(class_count);
    return dims;
}

void MlpSpec::validate() const {
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    if (class_count < 2) throw ConfigError("class_count must be >= 2");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw ConfigError("dropout_rate must lie in [0, 1)");
    }
    for (std::int64_t h : hidden_dims) {
        if (h < 1) throw ConfigError("hidden layer width must be >= 1");
    }
}

bool MlpWeights::same_shape(const MlpWeights& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (!layers[l].weight.same_shape(other.layers[l].weight) ||
            layers[l].bias.size() != other.layers[l].bias.size()) {
            return false;
        }
    }
    return true;
}

MlpWeights init_weights(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto dims = spec.layer_dims();
    Rng rng(seed);
    MlpWeights w;
    w.layers.resize(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::int64_t fan_in = dims[l];
        const std::int64_t fan_out = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        Layer& layer = w.layers[l];
        layer.weight = Matrix(fan_out, fan_in);
        for (auto& v : layer.weight.data) {
            v = bound * (2.0 * rng.uniform() - 1.0);
        }
        layer.bias.assign(static_cast<std::size_t>(fan_out), 0.0);
    }
    return w;
}

Matrix forward(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
               std::optional<std::uint64_t> mask_seed) {
    return run_forward(spec, weights, batch, mask_seed, {}).probs;
}

MlpWeights gradient(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
                    std::span<const int> labels, std::optional<std::uint64_t> mask_seed) {
    return backprop(spec, weights, batch, labels, mask_seed, nullptr);
}

double batch_loss(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
                  std::span<const int> labels, std::optional<std::uint64_t> mask_seed) {
    if (batch.rows == 0) {
        throw ValidationError("loss needs a non-empty batch");
    }
    check_labels(labels, batch, spec.class_count);
    return run_forward(spec, weights, batch, mask_seed, labels).mean_loss;
}

TrainResult train(const MlpSpec& spec, MlpWeights weights, const Matrix& features,
                  std::span<const int> labels, const TrainConfig& cfg) {
    spec.validate();
    if (features.rows == 0) {
        throw ValidationError("training requires a non-empty labelled set");
    }
    check_labels(labels, features, spec.class_count);
    check_batch(spec, features);
    if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (cfg.learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
        throw ConfigError("momentum must lie in [0, 1)");
    }

    TrainResult result;
    const std::int64_t n = features.rows;

    MlpWeights velocity;
    velocity.layers.resize(weights.layers.size());
    for (std::size_t l = 0; l < weights.layers.size(); ++l) {
        velocity.layers[l].weight =
            Matrix::zeros(weights.layers[l].weight.rows, weights.layers[l].weight.cols);
        velocity.layers[l].bias.assign(weights.layers[l].bias.size(), 0.0);
    }

    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::int64_t{0});
    Rng shuffle_rng(derive_seed(cfg.seed, SeedTag::EpochShuffle));

    for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::int64_t batch_index = 0;
        for (std::int64_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::int64_t stop = std::min(start + cfg.batch_size, n);
            const std::int64_t rows = stop - start;
            Matrix batch(rows, features.cols);
            std::vector<int> batch_labels(static_cast<std::size_t>(rows));
            for (std::int64_t r = 0; r < rows; ++r) {
                const std::int64_t src = order[static_cast<std::size_t>(start + r)];
                const auto row = features.row(src);
                std::copy(row.begin(), row.end(), batch.row(r).begin());
                batch_labels[static_cast<std::size_t>(r)] =
                    labels[static_cast<std::size_t>(src)];
            }
            const std::uint64_t mask_seed =
                derive_seed(cfg.seed, SeedTag::BatchMask,
                            static_cast<std::uint64_t>(epoch),
                            static_cast<std::uint64_t>(batch_index));
            double loss = 0.0;
            MlpWeights grads = backprop(spec, weights, batch, batch_labels,
                                        spec.dropout_rate > 0.0
                                            ? std::optional<std::uint64_t>(mask_seed)
                                            : std::nullopt,
                                        &loss);
            epoch_loss += loss * static_cast<double>(rows);
            for (std::size_t l = 0; l < weights.layers.size(); ++l) {
                auto& w = weights.layers[l];
                auto& v = velocity.layers[l];
                const auto& g = grads.layers[l];
                for (std::size_t i = 0; i < w.weight.data.size(); ++i) {
                    v.weight.data[i] =
                        cfg.momentum * v.weight.data[i] - cfg.learning_rate * g.weight.data[i];
                    w.weight.data[i] += v.weight.data[i];
                }
                for (std::size_t i = 0; i < w.bias.size(); ++i) {
                    v.bias[i] = cfg.momentum * v.bias[i] - cfg.learning_rate * g.bias[i];
                    w.bias[i] += v.bias[i];
                }
            }
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
    result.weights = std::move(weights);
    return result;
}

PosteriorSamples predict_mc(const MlpSpec& spec, const MlpWeights& weights,
                            const Matrix& batch, std::int64_t t, std::uint64_t seed) {
    if (t < 1) throw ConfigError("predict_mc needs t >= 1");
    PosteriorSamples out(batch.rows, spec.class_count, t);
    for (std::int64_t tau = 0; tau < t; ++tau) {
        const std::optional<std::uint64_t> mask_seed =
            spec.dropout_rate > 0.0
                ? std::optional<std::uint64_t>(
                      derive_seed(seed, SeedTag::McPass, static_cast<std::uint64_t>(tau)))
                : std::nullopt;
        const Matrix probs = forward(spec, weights, batch, mask_seed);
        for (std::int64_t n = 0; n < batch.rows; ++n) {
            for (std::int64_t c = 0; c < spec.class_count; ++c) {
                out.at(n, c, tau) = probs.at(n, c);
            }
        }
    }
    return out;
}

MlpWeights reset_weights(const MlpWeights& current, const MlpWeights& initial_snapshot) {
    if (!current.same_shape(initial_snapshot)) {
        throw ShapeError("weight snapshot does not match the current shapes");
    }
    return initial_snapshot;
}

void save_weights(const MlpWeights& weights, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const auto layer_count = static_cast<std::uint32_t>(weights.layers.size());
    out.write(reinterpret_cast<const char*>(&layer_count), 4);
    for (const auto& layer : weights.layers) {
        const auto in = static_cast<std::uint32_t>(layer.weight.cols);
        const auto out_dim = static_cast<std::uint32_t>(layer.weight.rows);
        out.write(reinterpret_cast<const char*>(&in), 4);
        out.write(reinterpret_cast<const char*>(&out_dim), 4);
    }
    for (const auto& layer : weights.layers) {
        out.write(reinterpret_cast<const char*>(layer.weight.data.data()),
                  static_cast<std::streamsize>(layer.weight.data.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(layer.bias.data()),
                  static_cast<std::streamsize>(layer.bias.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing " + path);
}

MlpWeights load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::uint32_t layer_count = 0;
    in.read(reinterpret_cast<char*>(&layer_count), 4);
    if (!in) throw IoError("truncated weight file " + path);
    MlpWeights w;
    w.layers.resize(layer_count);
    for (auto& layer : w.layers) {
        std::uint32_t dims[2];
        in.read(reinterpret_cast<char*>(dims), 8);
        if (!in) throw IoError("truncated weight file " + path);
        layer.weight = Matrix(dims[1], dims[0]);
        layer.bias.assign(dims[1], 0.0);
    }
    for (auto& layer : w.layers) {
        in.read(reinterpret_cast<char*>(layer.weight.data.data()),
                static_cast<std::streamsize>(layer.weight.data.size() * sizeof(double)));
        in.read(reinterpret_cast<char*>(layer.bias.data()),
                static_cast<std::streamsize>(layer.bias.size() * sizeof(double)));
        if (!in) throw IoError("truncated weight file " + path);
    }
    return w;
}

} // namespace alearn
