#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alearn/mlp.hpp"
#include "alearn/pool.hpp"

namespace alearn {

enum class Heuristic { Bald, Entropy, Random };

std::string heuristic_name(Heuristic h);
Heuristic parse_heuristic(const std::string& name);

/// Every knob of the labelling loop. pool_limit <= 0 means "no limit"
/// (score the whole pool).
struct LoopConfig {
    std::int64_t initial_labels = 50; // B
    std::int64_t query_size = 10;     // Q, the k of top-k
    std::int64_t mc_samples = 20;     // T
    std::int64_t pool_limit = -1;     // M
    std::int64_t label_budget = 250;
    Heuristic heuristic = Heuristic::Bald;
    TrainConfig train;
    std::uint64_t seed = 0;
};

/// One row of the experiment output; emitted once per loop step.
struct StepRecord {
    int step = 0;
    std::int64_t labelled_count = 0;
    double nll = 0.0;      // nats
    double accuracy = 0.0; // fraction
    std::vector<double> per_class_f1;
    double wall_time = 0.0; // seconds
};

/// Observation points used by the verification suites; all optional.
struct LoopHooks {
    std::function<void(const MlpWeights&)> on_snapshot;
    std::function<void(int step, const MlpWeights&)> on_train_start;
    std::function<void(int step, const std::vector<std::int64_t>&)> on_label;
};

/// One acquisition: draw the candidate set (pool_limit), score it with the
/// configured heuristic using the trained weights, and return the <= Q
/// highest-ranked global indices. Subsampling, scoring, and mask seeds all
/// derive from (cfg.seed, step_index). An exhausted pool returns an empty
/// list rather than failing.
std::vector<std::int64_t> acquisition_step(const ActivePool& pool, const MlpSpec& spec,
                                           const MlpWeights& weights, const LoopConfig& cfg,
                                           std::int64_t step_index);

/// Full labelling loop: label B random points, then alternate
/// train / evaluate / acquire until the label budget is spent or the pool
/// is exhausted. Weights are reset to the initial snapshot before every
/// training run. Record s reflects a model trained on exactly the labelled
/// set before step s's acquisition; a final record follows the last
/// labelling.
std::vector<StepRecord> run_loop(ActivePool& pool, const MlpSpec& spec,
                                 const LoopConfig& cfg, const Dataset& test,
                                 const LoopHooks* hooks = nullptr);

} // namespace alearn
