#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alearn/acquisition.hpp"
#include "alearn/matrix.hpp"

namespace alearn {

/// Architecture of the rectifier MLP classifier. Dropout sits after every
/// hidden activation, never on the input or the output layer.
struct MlpSpec {
    std::int64_t input_dim = 0;
    std::vector<std::int64_t> hidden_dims;
    std::int64_t class_count = 0;
    double dropout_rate = 0.0;

    /// [input_dim, hidden..., class_count]
    std::vector<std::int64_t> layer_dims() const;
    void validate() const;
};

struct Layer {
    Matrix weight;            // [out, in]
    std::vector<double> bias; // [out]

    bool operator==(const Layer&) const = default;
};

struct MlpWeights {
    std::vector<Layer> layers;

    bool operator==(const MlpWeights&) const = default;
    bool same_shape(const MlpWeights& other) const;
};

struct TrainConfig {
    std::int64_t epochs = 100;
    std::int64_t batch_size = 32;
    double learning_rate = 0.1;
    double momentum = 0.9;
    std::uint64_t seed = 0;
};

struct TrainResult {
    MlpWeights weights;
    std::vector<double> epoch_losses; // mean cross-entropy per epoch
};

/// He-uniform initialization, bound sqrt(6 / fan_in) per layer, zero biases.
MlpWeights init_weights(const MlpSpec& spec, std::uint64_t seed);

/// Softmax class probabilities for a feature batch. With a mask seed,
/// inverted dropout (Bernoulli(1 - rate) masks scaled by 1/(1 - rate)) runs
/// after every hidden activation; without one the pass is deterministic.
/// A dropout rate of zero makes both paths bit-identical.
Matrix forward(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
               std::optional<std::uint64_t> mask_seed = std::nullopt);

/// Exact gradient of the mean cross-entropy over the batch, under the fixed
/// dropout masks implied by mask_seed. Same shapes as the weights.
MlpWeights gradient(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
                    std::span<const int> labels,
                    std::optional<std::uint64_t> mask_seed = std::nullopt);

/// Mean cross-entropy of the batch under the same dropout convention as
/// gradient(); the quantity the finite-difference harness probes.
double batch_loss(const MlpSpec& spec, const MlpWeights& weights, const Matrix& batch,
                  std::span<const int> labels,
                  std::optional<std::uint64_t> mask_seed = std::nullopt);

/// Mini-batch SGD with momentum on mean cross-entropy, data reshuffled each
/// epoch, dropout active throughout. Deterministic under cfg.seed.
TrainResult train(const MlpSpec& spec, MlpWeights weights, const Matrix& features,
                  std::span<const int> labels, const TrainConfig& cfg);

/// t stochastic forward passes with independent seeded dropout masks,
/// stacked into an [N, C, T] tensor. Pass tau derives its masks from
/// (seed, tau), so results do not depend on evaluation order.
PosteriorSamples predict_mc(const MlpSpec& spec, const MlpWeights& weights,
                            const Matrix& batch, std::int64_t t, std::uint64_t seed);

/// Exact copy of the snapshot taken before the first loop step.
MlpWeights reset_weights(const MlpWeights& current, const MlpWeights& initial_snapshot);

/// Flat binary snapshot: u32 layer count, then per-layer u32 (in, out) dims,
/// then per-layer weight-then-bias payload as little-endian 64-bit reals.
void save_weights(const MlpWeights& weights, const std::string& path);
MlpWeights load_weights(const std::string& path);

} // namespace alearn
