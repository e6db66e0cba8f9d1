#include "alearn/loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "alearn/acquisition.hpp"
#include "alearn/errors.hpp"
#include "alearn/metrics.hpp"
#include "alearn/rng.hpp"

namespace alearn {

std::string heuristic_name(Heuristic h) {
    switch (h) {
        case Heuristic::Bald: return "bald";
        case Heuristic::Entropy: return "entropy";
        case Heuristic::Random: return "random";
    }
    throw ValidationError("unknown heuristic value");
}

Heuristic parse_heuristic(const std::string& name) {
    if (name == "bald") return Heuristic::Bald;
    if (name == "entropy") return Heuristic::Entropy;
    if (name == "random") return Heuristic::Random;
    throw ValidationError("unknown heuristic '" + name + "'");
}

namespace {

std::vector<double> score_candidates(const PosteriorSamples& samples, Heuristic h,
                                     std::uint64_t score_seed) {
    switch (h) {
        case Heuristic::Bald: return bald_score(samples);
        case Heuristic::Entropy: return entropy_score(samples);
        case Heuristic::Random: return random_score(samples.items, score_seed);
    }
    throw ValidationError("unknown heuristic value");
}

StepRecord evaluate(const MlpSpec& spec, const MlpWeights& weights,
                    const LoopConfig& cfg, const Dataset& test, int step,
                    std::int64_t labelled, double elapsed) {
    const PosteriorSamples samples =
        predict_mc(spec, weights, test.features, cfg.mc_samples,
                   derive_seed(cfg.seed, SeedTag::Eval, static_cast<std::uint64_t>(step)));
    const Matrix bma = bayesian_model_average(samples);
    StepRecord rec;
    rec.step = step;
    rec.labelled_count = labelled;
    rec.nll = test_nll(bma, test.labels);
    rec.accuracy = accuracy(bma, test.labels);
    rec.per_class_f1 = per_class_f1(argmax_rows(bma), test.labels, test.class_count);
    rec.wall_time = elapsed;
    return rec;
}

} // namespace

std::vector<std::int64_t> acquisition_step(const ActivePool& pool, const MlpSpec& spec,
                                           const MlpWeights& weights, const LoopConfig& cfg,
                                           std::int64_t step_index) {
    const std::vector<std::int64_t> candidates = pool.subsample_pool(
        cfg.pool_limit,
        derive_seed(cfg.seed, SeedTag::Subsample, static_cast<std::uint64_t>(step_index)));
    if (candidates.empty()) return {};

    Matrix batch(static_cast<std::int64_t>(candidates.size()), pool.dataset().dim());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto src = pool.dataset().features.row(candidates[i]);
        std::copy(src.begin(), src.end(),
                  batch.data.begin() + static_cast<std::ptrdiff_t>(i) * batch.cols);
    }

    const std::uint64_t score_seed =
        derive_seed(cfg.seed, SeedTag::Score, static_cast<std::uint64_t>(step_index));
    std::vector<double> scores;
    if (cfg.heuristic == Heuristic::Random) {
        // No need to run the model just to throw the numbers away.
        scores = random_score(static_cast<std::int64_t>(candidates.size()), score_seed);
    } else {
        const PosteriorSamples samples =
            predict_mc(spec, weights, batch, cfg.mc_samples,
                       derive_seed(cfg.seed, SeedTag::McPass,
                                   static_cast<std::uint64_t>(step_index)));
        scores = score_candidates(samples, cfg.heuristic, score_seed);
    }

    const std::int64_t want =
        std::min<std::int64_t>(cfg.query_size, static_cast<std::int64_t>(candidates.size()));
    const std::vector<std::int64_t> picked = rank_top_k(scores, want);
    std::vector<std::int64_t> chosen(picked.size());
    for (std::size_t i = 0; i < picked.size(); ++i) {
        chosen[i] = candidates[static_cast<std::size_t>(picked[i])];
    }
    return chosen;
}

std::vector<StepRecord> run_loop(ActivePool& pool, const MlpSpec& spec,
                                 const LoopConfig& cfg, const Dataset& test,
                                 const LoopHooks* hooks) {
    spec.validate();
    test.validate();
    if (cfg.initial_labels <= 0) throw ValidationError("initial label count must be positive");
    if (cfg.query_size <= 0) throw ValidationError("query size must be positive");
    if (cfg.mc_samples <= 0) throw ValidationError("stochastic sample count must be positive");
    if (cfg.label_budget < cfg.initial_labels) {
        throw ValidationError("label budget smaller than the initial label count");
    }
    if (test.dim() != spec.input_dim || test.class_count != spec.class_count) {
        throw ShapeError("test set shape does not match the model");
    }
    if (pool.dataset().dim() != spec.input_dim || pool.dataset().class_count != spec.class_count) {
        throw ShapeError("pool shape does not match the model");
    }

    const MlpWeights snapshot =
        init_weights(spec, derive_seed(cfg.seed, SeedTag::InitWeights));
    if (hooks && hooks->on_snapshot) hooks->on_snapshot(snapshot);

    pool.initialize_random_labels(cfg.initial_labels,
                                  derive_seed(cfg.seed, SeedTag::InitLabels));

    std::vector<StepRecord> records;
    MlpWeights weights = snapshot;
    int step = 0;
    while (true) {
        const auto started = std::chrono::steady_clock::now();
        weights = reset_weights(weights, snapshot);
        if (hooks && hooks->on_train_start) hooks->on_train_start(step, weights);

        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = derive_seed(cfg.seed, SeedTag::Train, static_cast<std::uint64_t>(step));
        const Matrix features = pool.labelled_features();
        const std::vector<int> labels = pool.labelled_labels();
        TrainResult trained = train(spec, weights, features, labels, train_cfg);
        weights = std::move(trained.weights);

        StepRecord rec = evaluate(spec, weights, cfg, test, step, pool.labelled_count(), 0.0);
        rec.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        records.push_back(std::move(rec));

        if (pool.labelled_count() >= cfg.label_budget) break;
        if (pool.pool_indices().empty()) break;

        const std::vector<std::int64_t> chosen =
            acquisition_step(pool, spec, weights, cfg, step);
        if (hooks && hooks->on_label) hooks->on_label(step, chosen);
        pool.reveal(chosen);
        ++step;
    }
    return records;
}

} // namespace alearn
