#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

namespace alearn {

/// splitmix64 step, used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Purpose tags so every consumer of randomness gets its own stream.
enum class SeedTag : std::uint64_t {
    InitWeights = 1,
    InitLabels = 2,
    Train = 3,
    Eval = 4,
    Subsample = 5,
    Score = 6,
    McPass = 7,
    EpochShuffle = 8,
    BatchMask = 9,
    TestData = 10,
    Noise = 11,
    Imbalance = 12,
    PoolData = 13,
};

/// Pure function of (base seed, purpose, indices); no global state.
inline std::uint64_t derive_seed(std::uint64_t base, SeedTag tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(base ^ 0x6A09E667F3BCC908ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

/// Seeded generator with fixed distribution algorithms. The std::
/// distributions are implementation-defined, so uniform/normal/shuffle are
/// spelled out here to keep outputs identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), in draw order.
    /// Partial Fisher-Yates, so for a fixed seed the first k draws are a
    /// prefix of the draws for any larger k.
    std::vector<std::int64_t> sample_indices(std::int64_t n, std::int64_t k) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        if (k > n) k = n;
        for (std::int64_t i = 0; i < k; ++i) {
            const std::int64_t j =
                i + static_cast<std::int64_t>(uniform_index(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(k));
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace alearn
