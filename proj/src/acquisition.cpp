#include "alearn/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "alearn/errors.hpp"
#include "alearn/rng.hpp"

namespace alearn {

namespace {

void validate_simplex(std::span<const double> probs) {
    if (probs.size() < 2) {
        throw ValidationError("probability vector needs at least 2 classes, got " +
                              std::to_string(probs.size()));
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < -1e-12 || p > 1.0 + 1e-12) {
            throw ValidationError("probability entry outside [0, 1]: " + std::to_string(p));
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
        throw ValidationError("probability vector sums to " + std::to_string(sum) +
                              ", expected 1 within 1e-6");
    }
}

double entropy_unchecked(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        h -= p * std::log(std::max(p, kLogEps));
    }
    return h;
}

} // namespace

void PosteriorSamples::validate() const {
    if (items < 0 || classes < 2 || samples < 1) {
        throw ValidationError("posterior tensor needs N >= 0, C >= 2, T >= 1");
    }
    if (data.size() != static_cast<std::size_t>(items * classes * samples)) {
        throw ValidationError("posterior tensor storage does not match its dimensions");
    }
    std::vector<double> slice(static_cast<std::size_t>(classes));
    for (std::int64_t n = 0; n < items; ++n) {
        for (std::int64_t t = 0; t < samples; ++t) {
            for (std::int64_t c = 0; c < classes; ++c) {
                slice[static_cast<std::size_t>(c)] = at(n, c, t);
            }
            validate_simplex(slice);
        }
    }
}

Matrix bayesian_model_average(const PosteriorSamples& samples) {
    samples.validate();
    Matrix mean(samples.items, samples.classes);
    const double inv_t = 1.0 / static_cast<double>(samples.samples);
    for (std::int64_t n = 0; n < samples.items; ++n) {
        for (std::int64_t c = 0; c < samples.classes; ++c) {
            double acc = 0.0;
            for (std::int64_t t = 0; t < samples.samples; ++t) {
                acc += samples.at(n, c, t);
            }
            mean.at(n, c) = acc * inv_t;
        }
    }
    return mean;
}

double shannon_entropy(std::span<const double> probs) {
    validate_simplex(probs);
    return entropy_unchecked(probs);
}

std::vector<double> entropy_score(const PosteriorSamples& samples) {
    const Matrix mean = bayesian_model_average(samples);
    std::vector<double> scores(static_cast<std::size_t>(samples.items));
    for (std::int64_t n = 0; n < samples.items; ++n) {
        scores[static_cast<std::size_t>(n)] = entropy_unchecked(mean.row(n));
    }
    return scores;
}

std::vector<double> bald_score(const PosteriorSamples& samples) {
    const Matrix mean = bayesian_model_average(samples);
    std::vector<double> scores(static_cast<std::size_t>(samples.items));
    std::vector<double> slice(static_cast<std::size_t>(samples.classes));
    const double inv_t = 1.0 / static_cast<double>(samples.samples);
    for (std::int64_t n = 0; n < samples.items; ++n) {
        double expected_entropy = 0.0;
        for (std::int64_t t = 0; t < samples.samples; ++t) {
            for (std::int64_t c = 0; c < samples.classes; ++c) {
                slice[static_cast<std::size_t>(c)] = samples.at(n, c, t);
            }
            expected_entropy += entropy_unchecked(slice);
        }
        expected_entropy *= inv_t;
        const double info = entropy_unchecked(mean.row(n)) - expected_entropy;
        scores[static_cast<std::size_t>(n)] = std::max(info, 0.0);
    }
    return scores;
}

std::vector<double> random_score(std::int64_t n, std::uint64_t seed) {
    if (n < 0) {
        throw ValidationError("random_score: negative count");
    }
    Rng rng(seed);
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (auto& s : scores) s = rng.uniform();
    return scores;
}

std::vector<std::int64_t> rank_top_k(std::span<const double> scores, std::int64_t k) {
    const auto n = static_cast<std::int64_t>(scores.size());
    std::vector<std::int64_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::int64_t{0});
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        const auto sa = scores[static_cast<std::size_t>(a)];
        const auto sb = scores[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    if (k < n) order.resize(static_cast<std::size_t>(std::max<std::int64_t>(k, 0)));
    return order;
}

} // namespace alearn
