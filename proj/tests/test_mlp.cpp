#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "alearn/dataset.hpp"
#include "alearn/errors.hpp"
#include "alearn/mlp.hpp"
#include "alearn/rng.hpp"

using namespace alearn;

namespace {

MlpSpec tiny_spec(double dropout = 0.0) {
    MlpSpec spec;
    spec.input_dim = 3;
    spec.hidden_dims = {4};
    spec.class_count = 3;
    spec.dropout_rate = dropout;
    return spec;
}

Matrix random_batch(std::mt19937& gen, std::int64_t rows, std::int64_t cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(rows, cols);
    for (auto& v : m.data) v = nd(gen);
    return m;
}

std::vector<int> random_labels(std::mt19937& gen, std::int64_t rows, std::int64_t classes) {
    std::uniform_int_distribution<int> ld(0, static_cast<int>(classes) - 1);
    std::vector<int> labels(static_cast<std::size_t>(rows));
    for (auto& l : labels) l = ld(gen);
    return labels;
}

// Test-local forward pass used only to find ReLU kinks: any hidden
// pre-activation within `margin` of zero makes finite differences unreliable
// at that point, so such draws are re-rolled. Replicates the documented
// dropout stream (one Rng per mask seed, masks drawn row-major per layer).
bool kink_free(const MlpSpec& spec, const MlpWeights& w, const Matrix& batch,
               std::optional<std::uint64_t> mask_seed, double margin) {
    const double keep = 1.0 - spec.dropout_rate;
    const bool dropout = mask_seed.has_value() && spec.dropout_rate > 0.0;
    Rng mask_rng(dropout ? *mask_seed : 0);
    Matrix act = batch;
    for (std::size_t l = 0; l < spec.hidden_dims.size(); ++l) {
        const Layer& layer = w.layers[l];
        Matrix z(act.rows, layer.weight.rows);
        for (std::int64_t r = 0; r < act.rows; ++r) {
            for (std::int64_t o = 0; o < layer.weight.rows; ++o) {
                double acc = layer.bias[static_cast<std::size_t>(o)];
                for (std::int64_t i = 0; i < act.cols; ++i) {
                    acc += act.at(r, i) * layer.weight.at(o, i);
                }
                z.at(r, o) = acc;
            }
        }
        for (double v : z.data) {
            if (std::abs(v) < margin) return false;
        }
        Matrix next(z.rows, z.cols);
        for (std::size_t i = 0; i < z.data.size(); ++i) {
            next.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
            if (dropout) {
                next.data[i] *= mask_rng.uniform() < keep ? 1.0 / keep : 0.0;
            }
        }
        act = std::move(next);
    }
    return true;
}

struct FdResult {
    double max_rel_err = 0.0;
    int entries = 0;
};

// Central finite differences against batch_loss, h = 1e-5; relative error
// uses a 1e-4 denominator floor so near-zero gradient entries compare
// absolutely at 1e-8.
FdResult fd_check(const MlpSpec& spec, MlpWeights w, const Matrix& batch,
                  const std::vector<int>& labels, std::optional<std::uint64_t> mask_seed) {
    const double h = 1e-5;
    const MlpWeights analytic = gradient(spec, w, batch, labels, mask_seed);
    FdResult res;
    const auto probe = [&](double& slot, double a) {
        const double keep = slot;
        slot = keep + h;
        const double up = batch_loss(spec, w, batch, labels, mask_seed);
        slot = keep - h;
        const double down = batch_loss(spec, w, batch, labels, mask_seed);
        slot = keep;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(a), std::abs(fd), 1e-4});
        res.max_rel_err = std::max(res.max_rel_err, std::abs(a - fd) / denom);
        ++res.entries;
    };
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        for (std::size_t i = 0; i < w.layers[l].weight.data.size(); ++i) {
            probe(w.layers[l].weight.data[i], analytic.layers[l].weight.data[i]);
        }
        for (std::size_t i = 0; i < w.layers[l].bias.size(); ++i) {
            probe(w.layers[l].bias[i], analytic.layers[l].bias[i]);
        }
    }
    return res;
}

} // namespace

TEST_CASE("spec plumbing") {
    const MlpSpec spec = tiny_spec();
    CHECK(spec.layer_dims() == std::vector<std::int64_t>{3, 4, 3});
    MlpSpec bad = spec;
    bad.class_count = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = spec;
    bad.dropout_rate = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = spec;
    bad.hidden_dims = {4, 0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("weight initialization: fan-in bounds, zero biases, determinism") {
    MlpSpec spec;
    spec.input_dim = 6;
    spec.hidden_dims = {24};
    spec.class_count = 4;
    const MlpWeights w = init_weights(spec, 5);
    REQUIRE(w.layers.size() == 2);
    CHECK(w.layers[0].weight.rows == 24);
    CHECK(w.layers[0].weight.cols == 6);
    CHECK(w.layers[1].weight.rows == 4);
    CHECK(w.layers[1].weight.cols == 24);

    const double bound0 = std::sqrt(6.0 / 6.0);
    const double bound1 = std::sqrt(6.0 / 24.0);
    for (double v : w.layers[0].weight.data) CHECK(std::abs(v) <= bound0);
    for (double v : w.layers[1].weight.data) CHECK(std::abs(v) <= bound1);
    for (const auto& layer : w.layers) {
        for (double b : layer.bias) CHECK(b == 0.0);
    }
    // A 144-draw layer hugging a loose bound would be a broken scale.
    double max0 = 0.0;
    for (double v : w.layers[0].weight.data) max0 = std::max(max0, std::abs(v));
    CHECK(max0 > bound0 * 0.5);

    CHECK(init_weights(spec, 5) == w);
    CHECK(init_weights(spec, 6) != w);
}

TEST_CASE("forward produces simplex rows") {
    std::mt19937 gen(3);
    const MlpSpec spec = tiny_spec();
    const MlpWeights w = init_weights(spec, 9);
    const Matrix batch = random_batch(gen, 7, 3);
    const Matrix probs = forward(spec, w, batch);
    REQUIRE(probs.rows == 7);
    REQUIRE(probs.cols == 3);
    for (std::int64_t r = 0; r < probs.rows; ++r) {
        double sum = 0.0;
        for (double p : probs.row(r)) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dropout masks are seed-reproducible and vanish at rate zero") {
    std::mt19937 gen(4);
    const Matrix batch = random_batch(gen, 4, 3);

    SUBCASE("rate zero: masked pass equals unmasked pass bit for bit") {
        const MlpSpec spec = tiny_spec(0.0);
        const MlpWeights w = init_weights(spec, 2);
        const Matrix a = forward(spec, w, batch);
        const Matrix b = forward(spec, w, batch, 77);
        CHECK(a.data == b.data);
    }
    SUBCASE("fixed seed reproduces, fresh seed changes the pass") {
        MlpSpec spec = tiny_spec(0.4);
        spec.hidden_dims = {32};
        const MlpWeights w = init_weights(spec, 2);
        const Matrix a = forward(spec, w, batch, 77);
        const Matrix b = forward(spec, w, batch, 77);
        const Matrix c = forward(spec, w, batch, 78);
        CHECK(a.data == b.data);
        CHECK(a.data != c.data);
    }
}

TEST_CASE("batch_loss is the mean cross-entropy of the forward pass") {
    std::mt19937 gen(5);
    const MlpSpec spec = tiny_spec();
    const MlpWeights w = init_weights(spec, 31);
    const Matrix batch = random_batch(gen, 6, 3);
    const auto labels = random_labels(gen, 6, 3);
    const Matrix probs = forward(spec, w, batch);
    double expect = 0.0;
    for (std::int64_t r = 0; r < 6; ++r) {
        expect -= std::log(probs.at(r, labels[static_cast<std::size_t>(r)]));
    }
    expect /= 6.0;
    CHECK(batch_loss(spec, w, batch, labels) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("backprop matches central finite differences") {
    std::mt19937 gen(1234);
    int tested = 0;
    std::uint64_t seed = 0;
    while (tested < 6) {
        ++seed;
        MlpSpec spec;
        spec.input_dim = 3;
        spec.hidden_dims = (seed % 2 == 0) ? std::vector<std::int64_t>{4}
                                           : std::vector<std::int64_t>{5, 4};
        spec.class_count = 3;
        spec.dropout_rate = 0.0;
        const MlpWeights w = init_weights(spec, seed);
        const Matrix batch = random_batch(gen, 5, 3);
        const auto labels = random_labels(gen, 5, 3);
        if (!kink_free(spec, w, batch, std::nullopt, 1e-3)) continue;
        const FdResult res = fd_check(spec, w, batch, labels, std::nullopt);
        CHECK(res.max_rel_err < 1e-4);
        ++tested;
    }
}

TEST_CASE("backprop matches finite differences under fixed dropout masks") {
    std::mt19937 gen(4321);
    int tested = 0;
    std::uint64_t seed = 100;
    while (tested < 4) {
        ++seed;
        MlpSpec spec;
        spec.input_dim = 3;
        spec.hidden_dims = {6};
        spec.class_count = 3;
        spec.dropout_rate = 0.35;
        const MlpWeights w = init_weights(spec, seed);
        const Matrix batch = random_batch(gen, 4, 3);
        const auto labels = random_labels(gen, 4, 3);
        const std::uint64_t mask_seed = seed * 13;
        if (!kink_free(spec, w, batch, mask_seed, 1e-3)) continue;
        const FdResult res = fd_check(spec, w, batch, labels, mask_seed);
        CHECK(res.max_rel_err < 1e-4);
        ++tested;
    }
}

TEST_CASE("gradient and loss validate their inputs") {
    const MlpSpec spec = tiny_spec();
    const MlpWeights w = init_weights(spec, 1);
    Matrix batch(2, 3);
    CHECK_THROWS_AS(gradient(spec, w, batch, std::vector<int>{0}), ShapeError);
    CHECK_THROWS_AS(gradient(spec, w, batch, std::vector<int>{0, 9}), ValidationError);
    CHECK_THROWS_AS(batch_loss(spec, w, Matrix(0, 3), std::vector<int>{}), ValidationError);
    Matrix wrong(2, 5);
    CHECK_THROWS_AS(forward(spec, w, wrong), ShapeError);
}

TEST_CASE("training reduces the loss on separable data and is deterministic") {
    const Dataset ds = generate_blobs(30, 3, 2, 0.15, 8);
    MlpSpec spec;
    spec.input_dim = 2;
    spec.hidden_dims = {16};
    spec.class_count = 3;
    spec.dropout_rate = 0.2;

    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.1;
    cfg.momentum = 0.9;
    cfg.seed = 99;

    const MlpWeights w0 = init_weights(spec, 55);
    const TrainResult a = train(spec, w0, ds.features, ds.labels, cfg);
    REQUIRE(a.epoch_losses.size() == 40);
    CHECK(a.epoch_losses.back() < a.epoch_losses.front() * 0.5);

    const TrainResult b = train(spec, w0, ds.features, ds.labels, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.epoch_losses == b.epoch_losses);

    TrainConfig other = cfg;
    other.seed = 100;
    const TrainResult c = train(spec, w0, ds.features, ds.labels, other);
    CHECK(a.weights != c.weights);
}

TEST_CASE("training validates its configuration") {
    const Dataset ds = generate_blobs(5, 2, 2, 0.1, 8);
    MlpSpec spec;
    spec.input_dim = 2;
    spec.hidden_dims = {4};
    spec.class_count = 2;
    const MlpWeights w = init_weights(spec, 1);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(train(spec, w, ds.features, ds.labels, cfg), ConfigError);
    cfg = TrainConfig{};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(spec, w, ds.features, ds.labels, cfg), ConfigError);
    cfg = TrainConfig{};
    CHECK_THROWS_AS(train(spec, w, Matrix(0, 2), std::vector<int>{}, cfg), ValidationError);
}

TEST_CASE("monte-carlo prediction stacks seeded stochastic passes") {
    std::mt19937 gen(6);
    const Matrix batch = random_batch(gen, 5, 3);

    SUBCASE("dropout off: every slice equals the deterministic pass") {
        const MlpSpec spec = tiny_spec(0.0);
        const MlpWeights w = init_weights(spec, 3);
        const PosteriorSamples s = predict_mc(spec, w, batch, 6, 42);
        REQUIRE(s.items == 5);
        REQUIRE(s.classes == 3);
        REQUIRE(s.samples == 6);
        const Matrix probs = forward(spec, w, batch);
        for (std::int64_t n = 0; n < 5; ++n) {
            for (std::int64_t c = 0; c < 3; ++c) {
                for (std::int64_t t = 0; t < 6; ++t) {
                    CHECK(s.at(n, c, t) == probs.at(n, c));
                }
            }
        }
    }
    SUBCASE("dropout on: slices differ, runs reproduce") {
        const MlpSpec spec = tiny_spec(0.4);
        const MlpWeights w = init_weights(spec, 3);
        const PosteriorSamples a = predict_mc(spec, w, batch, 6, 42);
        const PosteriorSamples b = predict_mc(spec, w, batch, 6, 42);
        const PosteriorSamples c = predict_mc(spec, w, batch, 6, 43);
        CHECK(a.data == b.data);
        CHECK(a.data != c.data);
        a.validate(); // every slice still a distribution
    }
    SUBCASE("t must be positive") {
        const MlpSpec spec = tiny_spec();
        const MlpWeights w = init_weights(spec, 3);
        CHECK_THROWS_AS(predict_mc(spec, w, batch, 0, 1), ConfigError);
    }
}

TEST_CASE("weight reset restores the snapshot exactly") {
    const MlpSpec spec = tiny_spec();
    const MlpWeights snapshot = init_weights(spec, 10);
    MlpWeights current = init_weights(spec, 11);
    CHECK(reset_weights(current, snapshot) == snapshot);

    MlpSpec other = spec;
    other.hidden_dims = {9};
    const MlpWeights mismatched = init_weights(other, 10);
    CHECK_THROWS_AS(reset_weights(mismatched, snapshot), ShapeError);
}

TEST_CASE("weight snapshots round-trip through disk") {
    MlpSpec spec;
    spec.input_dim = 4;
    spec.hidden_dims = {5, 3};
    spec.class_count = 2;
    const MlpWeights w = init_weights(spec, 77);
    const auto path =
        (std::filesystem::temp_directory_path() / "alearn_weights_test.bin").string();
    save_weights(w, path);
    CHECK(load_weights(path) == w);

    SUBCASE("truncated files are reported") {
        const auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size - 9);
        CHECK_THROWS_AS(load_weights(path), IoError);
    }
    SUBCASE("missing files are reported") {
        CHECK_THROWS_AS(load_weights("/nonexistent/weights.bin"), IoError);
    }
    std::remove(path.c_str());
}
