#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "alearn/dataset.hpp"

namespace alearn {

/// Labelled/unlabelled bookkeeping over a dataset. Single writer: labelling
/// mutations must be serialized, reads are safe between mutations.
class ActivePool {
public:
    explicit ActivePool(Dataset dataset);

    const Dataset& dataset() const { return dataset_; }
    std::int64_t size() const { return dataset_.size(); }
    std::int64_t labelled_count() const { return labelled_count_; }
    std::int64_t unlabelled_count() const { return size() - labelled_count_; }

    bool is_labelled(std::int64_t index) const;

    /// The label revealed for a labelled item. Throws PoolError when the item
    /// is still unlabelled.
    int revealed_label(std::int64_t index) const;

    /// Labels b items chosen uniformly without replacement. The pool must be
    /// fully unlabelled and b must not exceed its size.
    void initialize_random_labels(std::int64_t b, std::uint64_t seed);

    /// Moves the given items from the unlabelled to the labelled set,
    /// revealing their oracle labels. Rejects duplicates, already-labelled
    /// items, and out-of-range indices before mutating anything.
    void reveal(std::span<const std::int64_t> indices);

    /// Ascending list of unlabelled indices.
    std::vector<std::int64_t> pool_indices() const;

    /// Ascending list of labelled indices.
    std::vector<std::int64_t> labelled_indices() const;

    /// min(m, unlabelled) distinct unlabelled indices drawn uniformly without
    /// replacement, ascending. m <= 0 is the "no limit" sentinel and returns
    /// the whole pool.
    std::vector<std::int64_t> subsample_pool(std::int64_t m, std::uint64_t seed) const;

    /// Feature rows and revealed labels of the labelled set, aligned with
    /// labelled_indices().
    Matrix labelled_features() const;
    std::vector<int> labelled_labels() const;

private:
    Dataset dataset_;
    std::vector<std::uint8_t> labelled_;
    std::vector<int> revealed_;
    std::int64_t labelled_count_ = 0;
};

} // namespace alearn
