#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "alearn/matrix.hpp"

namespace alearn {

/// Floor applied to probabilities inside logarithms. One-hot Monte-Carlo
/// samples are common early in training, so exact zeros must not blow up.
inline constexpr double kLogEps = 1e-10;

/// Tolerance for probability-simplex validation.
inline constexpr double kSimplexTol = 1e-6;

/// Stack of stochastic predictive distributions: data[(n*C + c)*T + t] is
/// the probability of class c for item n under Monte-Carlo sample t.
struct PosteriorSamples {
    std::int64_t items = 0;   // N
    std::int64_t classes = 0; // C
    std::int64_t samples = 0; // T
    std::vector<double> data;

    PosteriorSamples() = default;
    PosteriorSamples(std::int64_t n, std::int64_t c, std::int64_t t)
        : items(n), classes(c), samples(t),
          data(static_cast<std::size_t>(n * c * t), 0.0) {}

    double& at(std::int64_t n, std::int64_t c, std::int64_t t) {
        return data[static_cast<std::size_t>((n * classes + c) * samples + t)];
    }
    double at(std::int64_t n, std::int64_t c, std::int64_t t) const {
        return data[static_cast<std::size_t>((n * classes + c) * samples + t)];
    }

    /// Throws ValidationError unless every [n, ., t] slice is a probability
    /// vector and the dimensions are admissible (N >= 0, C >= 2, T >= 1).
    void validate() const;
};

/// Mean over the T Monte-Carlo distributions; one row per item, rows stay
/// on the simplex.
Matrix bayesian_model_average(const PosteriorSamples& samples);

/// -sum_c p_c ln(max(p_c, eps)), in nats. Validates the input vector.
double shannon_entropy(std::span<const double> probs);

/// Entropy of the model average, per item.
std::vector<double> entropy_score(const PosteriorSamples& samples);

/// Mutual information between prediction and model posterior, estimated as
/// H[mean_t p_t] - mean_t H[p_t], per item. Clamped at zero: the true
/// quantity is non-negative and negatives only arise from rounding.
std::vector<double> bald_score(const PosteriorSamples& samples);

/// n seeded uniform [0, 1) draws; the per-step scoring rule of the random
/// baseline.
std::vector<double> random_score(std::int64_t n, std::uint64_t seed);

/// Indices of the k largest scores, descending score, ties broken by
/// ascending index. k > N returns all indices ranked.
std::vector<std::int64_t> rank_top_k(std::span<const double> scores, std::int64_t k);

} // namespace alearn
