#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "alearn/acquisition.hpp"
#include "alearn/errors.hpp"

using namespace alearn;

namespace {

// Scalar reference implementations, independent of the library code paths:
// plain loops, own epsilon handling. The library must agree to 1e-9.
double ref_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) h -= v * std::log(v < 1e-10 ? 1e-10 : v);
    return h;
}

std::vector<double> ref_bald(const PosteriorSamples& s) {
    std::vector<double> out;
    for (std::int64_t n = 0; n < s.items; ++n) {
        std::vector<double> mean(static_cast<std::size_t>(s.classes), 0.0);
        double avg_h = 0.0;
        for (std::int64_t t = 0; t < s.samples; ++t) {
            std::vector<double> slice;
            for (std::int64_t c = 0; c < s.classes; ++c) slice.push_back(s.at(n, c, t));
            avg_h += ref_entropy(slice);
            for (std::int64_t c = 0; c < s.classes; ++c) {
                mean[static_cast<std::size_t>(c)] += slice[static_cast<std::size_t>(c)];
            }
        }
        for (auto& m : mean) m /= static_cast<double>(s.samples);
        avg_h /= static_cast<double>(s.samples);
        double v = ref_entropy(mean) - avg_h;
        out.push_back(v < 0.0 ? 0.0 : v);
    }
    return out;
}

std::vector<double> ref_entropy_score(const PosteriorSamples& s) {
    std::vector<double> out;
    for (std::int64_t n = 0; n < s.items; ++n) {
        std::vector<double> mean(static_cast<std::size_t>(s.classes), 0.0);
        for (std::int64_t t = 0; t < s.samples; ++t) {
            for (std::int64_t c = 0; c < s.classes; ++c) {
                mean[static_cast<std::size_t>(c)] += s.at(n, c, t);
            }
        }
        for (auto& m : mean) m /= static_cast<double>(s.samples);
        out.push_back(ref_entropy(mean));
    }
    return out;
}

// Random stack of categorical distributions; Dirichlet(1) rows via
// normalized exponentials. Deliberately a different RNG than the library's.
PosteriorSamples random_samples(std::mt19937& gen, std::int64_t n, std::int64_t c,
                                std::int64_t t) {
    std::uniform_real_distribution<double> unif(1e-12, 1.0);
    PosteriorSamples s(n, c, t);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t tau = 0; tau < t; ++tau) {
            double sum = 0.0;
            std::vector<double> row(static_cast<std::size_t>(c));
            for (auto& v : row) {
                v = -std::log(unif(gen));
                sum += v;
            }
            for (std::int64_t k = 0; k < c; ++k) {
                s.at(i, k, tau) = row[static_cast<std::size_t>(k)] / sum;
            }
        }
    }
    return s;
}

PosteriorSamples single_item(const std::vector<std::vector<double>>& passes) {
    const auto t = static_cast<std::int64_t>(passes.size());
    const auto c = static_cast<std::int64_t>(passes[0].size());
    PosteriorSamples s(1, c, t);
    for (std::int64_t tau = 0; tau < t; ++tau) {
        for (std::int64_t k = 0; k < c; ++k) {
            s.at(0, k, tau) = passes[static_cast<std::size_t>(tau)][static_cast<std::size_t>(k)];
        }
    }
    return s;
}

} // namespace

TEST_CASE("shannon entropy matches frozen references") {
    CHECK(shannon_entropy(std::vector<double>{0.7, 0.2, 0.1}) ==
          doctest::Approx(0.8018185525433372).epsilon(1e-12));
    CHECK(shannon_entropy(std::vector<double>{0.7, 0.3}) ==
          doctest::Approx(0.6108643020548935).epsilon(1e-12));
    CHECK(shannon_entropy(std::vector<double>{1.0, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(shannon_entropy(std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // Uniform over C maximizes entropy at ln C.
    CHECK(shannon_entropy(std::vector<double>(3, 1.0 / 3.0)) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("shannon entropy rejects junk") {
    CHECK_THROWS_AS(shannon_entropy(std::vector<double>{1.0}), ValidationError);
    CHECK_THROWS_AS(shannon_entropy(std::vector<double>{0.5, 0.4}), ValidationError);
    CHECK_THROWS_AS(shannon_entropy(std::vector<double>{1.2, -0.2}), ValidationError);
    CHECK_THROWS_AS(shannon_entropy(std::vector<double>{0.5, 0.5, 0.5}), ValidationError);
}

TEST_CASE("bayesian model average is the per-class mean over passes") {
    const PosteriorSamples s = single_item({{0.8, 0.2}, {0.6, 0.4}});
    const Matrix m = bayesian_model_average(s);
    REQUIRE(m.rows == 1);
    REQUIRE(m.cols == 2);
    CHECK(m.at(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m.at(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("bald on the two-pass example matches the frozen value") {
    const PosteriorSamples s = single_item({{0.8, 0.2}, {0.6, 0.4}});
    const auto scores = bald_score(s);
    REQUIRE(scores.size() == 1);
    // H[0.7,0.3] - (H[0.8,0.2] + H[0.6,0.4]) / 2
    CHECK(scores[0] == doctest::Approx(0.02415725678117131).epsilon(1e-12));
}

TEST_CASE("bald is zero when every pass agrees") {
    PosteriorSamples s(3, 4, 7);
    for (std::int64_t n = 0; n < 3; ++n) {
        for (std::int64_t t = 0; t < 7; ++t) {
            s.at(n, 0, t) = 0.1;
            s.at(n, 1, t) = 0.2;
            s.at(n, 2, t) = 0.3;
            s.at(n, 3, t) = 0.4;
        }
    }
    for (double v : bald_score(s)) CHECK(v == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("bald of two disagreeing one-hot passes is ln 2") {
    const PosteriorSamples s = single_item({{1.0, 0.0}, {0.0, 1.0}});
    // Mean is uniform (entropy ln 2), each pass has ~zero entropy.
    CHECK(bald_score(s)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("entropy score of a uniform average is ln C") {
    const PosteriorSamples s = single_item({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
    CHECK(entropy_score(s)[0] == doctest::Approx(std::log(3.0)).epsilon(1e-6));
}

TEST_CASE("vectorized scores match the scalar reference on random tensors") {
    std::mt19937 gen(12345);
    std::uniform_int_distribution<int> nd(1, 24), cd(2, 10), td(1, 20);
    for (int rep = 0; rep < 40; ++rep) {
        const PosteriorSamples s = random_samples(gen, nd(gen), cd(gen), td(gen));
        const auto bald = bald_score(s);
        const auto ent = entropy_score(s);
        const auto rbald = ref_bald(s);
        const auto rent = ref_entropy_score(s);
        REQUIRE(bald.size() == rbald.size());
        for (std::size_t i = 0; i < bald.size(); ++i) {
            CHECK(bald[i] == doctest::Approx(rbald[i]).epsilon(1e-9));
            CHECK(ent[i] == doctest::Approx(rent[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("0 <= bald <= entropy <= ln C on random tensors") {
    std::mt19937 gen(99);
    std::uniform_int_distribution<int> nd(1, 16), cd(2, 8), td(1, 12);
    for (int rep = 0; rep < 60; ++rep) {
        const int c = cd(gen);
        const PosteriorSamples s = random_samples(gen, nd(gen), c, td(gen));
        const auto bald = bald_score(s);
        const auto ent = entropy_score(s);
        for (std::size_t i = 0; i < bald.size(); ++i) {
            CHECK(bald[i] >= 0.0);
            CHECK(bald[i] <= ent[i] + 1e-9);
            CHECK(ent[i] <= std::log(static_cast<double>(c)) + 1e-6);
        }
    }
}

TEST_CASE("scores reject tensors whose slices leave the simplex") {
    PosteriorSamples s(1, 2, 1);
    s.at(0, 0, 0) = 0.9;
    s.at(0, 1, 0) = 0.3;
    CHECK_THROWS_AS(bald_score(s), ValidationError);
    CHECK_THROWS_AS(entropy_score(s), ValidationError);
    CHECK_THROWS_AS(bayesian_model_average(s), ValidationError);
}

TEST_CASE("random_score is a deterministic function of the seed") {
    const auto a = random_score(32, 7);
    const auto b = random_score(32, 7);
    const auto c = random_score(32, 8);
    CHECK(a == b);
    CHECK(a != c);
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
    CHECK(random_score(0, 1).empty());
}

TEST_CASE("rank_top_k orders by score, then by index") {
    const std::vector<double> scores{0.1, 0.9, 0.9, 0.4, 0.9};
    SUBCASE("ties break toward the lower index") {
        const auto top = rank_top_k(scores, 3);
        CHECK(top == std::vector<std::int64_t>{1, 2, 4});
    }
    SUBCASE("full ranking") {
        const auto top = rank_top_k(scores, 5);
        CHECK(top == std::vector<std::int64_t>{1, 2, 4, 3, 0});
    }
    SUBCASE("k beyond N returns everything ranked") {
        const auto top = rank_top_k(scores, 50);
        CHECK(top.size() == 5);
        CHECK(top[0] == 1);
    }
    SUBCASE("k = 0 selects nothing") {
        CHECK(rank_top_k(scores, 0).empty());
    }
    SUBCASE("all-equal scores degrade to ascending indices") {
        const std::vector<double> flat(6, 0.25);
        CHECK(rank_top_k(flat, 4) == std::vector<std::int64_t>{0, 1, 2, 3});
    }
}
