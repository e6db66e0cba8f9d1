#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alearn/dataset.hpp"
#include "alearn/loop.hpp"
#include "alearn/metrics.hpp"

namespace alearn {

/// Imbalance settings as they appear in configs; the corruption seed is
/// derived per run.
struct ImbalanceBlock {
    std::int64_t delta = 0;
    double keep_fraction = 0.25;
};

/// Where the data comes from: seeded Gaussian blobs or an IDX file pair.
/// Corruptions apply to the pool only; the test set stays clean.
struct DatasetBlock {
    std::string source = "blobs"; // "blobs" | "idx"

    // blobs
    std::int64_t classes = 8;
    std::int64_t per_class = 100;
    std::int64_t dim = 2;
    double spread = 0.2;
    std::int64_t test_per_class = 50;

    // idx
    std::string train_images, train_labels, test_images, test_labels;
    std::int64_t limit = -1; // cap on training items; <= 0 keeps everything

    std::optional<double> noise_lambda;
    std::optional<ImbalanceBlock> imbalance;
};

struct ModelBlock {
    std::vector<std::int64_t> hidden_dims{32};
    double dropout_rate = 0.3;
    TrainConfig train;
};

struct LoopBlock {
    std::int64_t initial_labels = 50;
    std::int64_t query_size = 10;
    std::int64_t mc_samples = 20;
    std::int64_t pool_limit = -1;
    std::int64_t label_budget = 250;
};

struct ScenarioConfig {
    std::string id = "scenario";
    DatasetBlock dataset;
    ModelBlock model;
    LoopBlock loop;
    std::vector<Heuristic> heuristics;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "alearn-out";

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses the JSON scenario format documented in the README. Unknown keys
/// and bad types raise ConfigError with the field path.
ScenarioConfig parse_scenario_json(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

/// One results.csv row.
struct ResultRow {
    std::string scenario;
    std::string heuristic;
    std::uint64_t seed = 0;
    int step = 0;
    std::int64_t labelled_count = 0;
    double nll = 0.0;
    double accuracy = 0.0;
    std::vector<double> f1;
    double wall_time = 0.0;
};

struct ScenarioResult {
    std::string scenario;
    std::vector<ResultRow> rows;       // sorted by (heuristic cfg order, seed, step)
    std::vector<RunSummary> summaries; // one per heuristic, config order
    std::int64_t class_count = 0;
};

/// The pool dataset (corruptions applied) and the clean test set for one
/// seeded run.
struct BuiltData {
    Dataset pool;
    Dataset test;
};
BuiltData build_dataset(const DatasetBlock& block, std::uint64_t run_seed);

/// Runs every (heuristic, seed) cell of the scenario. Cells run on up to
/// `threads` workers (<= 0 picks the hardware count); outputs are assembled
/// in a fixed order so they do not depend on scheduling.
ScenarioResult run_scenario_cells(const ScenarioConfig& cfg, int threads = 0);

/// run_scenario_cells plus artifacts: results.csv, summary.csv, and one SVG
/// per metric under cfg.output_dir.
ScenarioResult run_scenario(const ScenarioConfig& cfg, int threads = 0);

/// Serializers for the versioned CSV schema (header comment `# alearn-results v1`).
std::string results_csv(const ScenarioResult& result);
std::string summary_csv(const ScenarioResult& result);

/// Parses a results.csv produced by this tool. Throws FormatError on
/// malformed content, including a file with no data rows.
ScenarioResult parse_results_csv(const std::string& text);

inline constexpr const char* kSweepAxes[] = {"noise_lambda", "epochs", "query_size",
                                             "pool_limit", "imbalance_delta"};

/// Returns base with one axis overridden and a value-derived scenario id.
/// Unknown axes and unparsable values raise ConfigError.
ScenarioConfig apply_axis_value(const ScenarioConfig& base, const std::string& axis,
                                const std::string& value);

/// Runs one scenario per value into output_dir/<scenario id>/ and writes a
/// combined sweep.csv (summary schema plus leading axis columns).
void sweep(const ScenarioConfig& base, const std::string& axis,
           const std::vector<std::string>& values, int threads = 0);

/// Rebuilds the per-metric SVGs from an existing results.csv in `dir`.
void report(const std::string& dir);

} // namespace alearn
