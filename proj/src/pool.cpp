#include "alearn/pool.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "alearn/errors.hpp"
#include "alearn/rng.hpp"

namespace alearn {

ActivePool::ActivePool(Dataset dataset) : dataset_(std::move(dataset)) {
    dataset_.validate();
    labelled_.assign(static_cast<std::size_t>(dataset_.size()), 0);
    revealed_.assign(static_cast<std::size_t>(dataset_.size()), -1);
}

bool ActivePool::is_labelled(std::int64_t index) const {
    if (index < 0 || index >= size()) {
        throw PoolError("index " + std::to_string(index) + " out of range");
    }
    return labelled_[static_cast<std::size_t>(index)] != 0;
}

int ActivePool::revealed_label(std::int64_t index) const {
    if (!is_labelled(index)) {
        throw PoolError("label of item " + std::to_string(index) + " not revealed");
    }
    return revealed_[static_cast<std::size_t>(index)];
}

void ActivePool::initialize_random_labels(std::int64_t b, std::uint64_t seed) {
    if (labelled_count_ != 0) {
        throw PoolError("initial labelling requires a fully unlabelled pool");
    }
    if (b < 0 || b > size()) {
        throw PoolError("initial label budget " + std::to_string(b) +
                        " exceeds pool size " + std::to_string(size()));
    }
    Rng rng(seed);
    std::vector<std::int64_t> picks = rng.sample_indices(size(), b);
    std::sort(picks.begin(), picks.end());
    reveal(picks);
}

void ActivePool::reveal(std::span<const std::int64_t> indices) {
    std::unordered_set<std::int64_t> seen;
    for (std::int64_t i : indices) {
        if (i < 0 || i >= size()) {
            throw PoolError("index " + std::to_string(i) + " out of range");
        }
        if (labelled_[static_cast<std::size_t>(i)] != 0 || !seen.insert(i).second) {
            throw PoolError("item " + std::to_string(i) + " labelled twice");
        }
    }
    for (std::int64_t i : indices) {
        labelled_[static_cast<std::size_t>(i)] = 1;
        revealed_[static_cast<std::size_t>(i)] = dataset_.labels[static_cast<std::size_t>(i)];
    }
    labelled_count_ += static_cast<std::int64_t>(indices.size());
}

std::vector<std::int64_t> ActivePool::pool_indices() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(unlabelled_count()));
    for (std::int64_t i = 0; i < size(); ++i) {
        if (labelled_[static_cast<std::size_t>(i)] == 0) out.push_back(i);
    }
    return out;
}

std::vector<std::int64_t> ActivePool::labelled_indices() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(labelled_count_));
    for (std::int64_t i = 0; i < size(); ++i) {
        if (labelled_[static_cast<std::size_t>(i)] != 0) out.push_back(i);
    }
    return out;
}

std::vector<std::int64_t> ActivePool::subsample_pool(std::int64_t m, std::uint64_t seed) const {
    std::vector<std::int64_t> pool = pool_indices();
    if (m <= 0 || m >= static_cast<std::int64_t>(pool.size())) {
        return pool;
    }
    Rng rng(seed);
    std::vector<std::int64_t> picks =
        rng.sample_indices(static_cast<std::int64_t>(pool.size()), m);
    std::vector<std::int64_t> out(picks.size());
    for (std::size_t i = 0; i < picks.size(); ++i) {
        out[i] = pool[static_cast<std::size_t>(picks[i])];
    }
    std::sort(out.begin(), out.end());
    return out;
}

Matrix ActivePool::labelled_features() const {
    const auto idx = labelled_indices();
    Matrix out(static_cast<std::int64_t>(idx.size()), dataset_.dim());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto src = dataset_.features.row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(static_cast<std::int64_t>(i)).begin());
    }
    return out;
}

std::vector<int> ActivePool::labelled_labels() const {
    const auto idx = labelled_indices();
    std::vector<int> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out[i] = revealed_[static_cast<std::size_t>(idx[i])];
    }
    return out;
}

} // namespace alearn
