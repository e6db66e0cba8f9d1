#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alearn/matrix.hpp"

namespace alearn {

/// Feature rows plus hidden ground-truth labels. Labels live in [0, C).
struct Dataset {
    Matrix features;              // [N, D]
    std::vector<int> labels;      // [N]
    std::int64_t class_count = 0; // C

    std::int64_t size() const { return features.rows; }
    std::int64_t dim() const { return features.cols; }

    /// Throws ValidationError on label range or row-count mismatches.
    void validate() const;
};

/// Fraction of labels to shuffle, and the seed of the shuffle.
struct NoiseConfig {
    double lambda = 0.0;
    std::uint64_t seed = 0;
};

/// How many classes to shrink and how much of each survives.
struct ImbalanceConfig {
    std::int64_t delta = 0;
    double keep_fraction = 0.25;
    std::uint64_t seed = 0;
};

/// Selects round(lambda * N) positions without replacement and applies a
/// random permutation to the labels at those positions. The global label
/// multiset is preserved; features are untouched. Fixed points are allowed,
/// so the effective corruption rate is at most lambda.
Dataset corrupt_labels(const Dataset& ds, const NoiseConfig& cfg);

/// Picks cfg.delta classes without replacement and keeps a uniformly chosen
/// keep_fraction of each one's samples (round-half-up), dropping the rest.
/// Other classes and all retained rows are unchanged.
Dataset apply_imbalance(const Dataset& ds, const ImbalanceConfig& cfg);

/// The classes apply_imbalance shrinks for this config — exposed so callers
/// can tell afterwards which classes were starved.
std::vector<std::int64_t> imbalance_selected_classes(std::int64_t class_count,
                                                     const ImbalanceConfig& cfg);

/// Seeded Gaussian clusters, one per class, centers on a circle scaled so
/// adjacent centers sit at distance 1 (in the first two feature dimensions).
/// `spread` is the isotropic standard deviation of each cluster.
Dataset generate_blobs(std::int64_t n_per_class, std::int64_t class_count,
                       std::int64_t dim, double spread, std::uint64_t seed);

/// Reads a big-endian IDX image/label pair (magics 0x00000803 / 0x00000801,
/// u8 payloads). Pixels are scaled to [0, 1]. `limit` truncates to the first
/// records after the raw image/label counts are checked for agreement.
Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path,
                      std::optional<std::int64_t> limit = std::nullopt);

} // namespace alearn
