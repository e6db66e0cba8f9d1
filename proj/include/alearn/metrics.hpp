#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alearn/loop.hpp"
#include "alearn/matrix.hpp"

namespace alearn {

/// Mean negative log-likelihood in nats: (1/N) sum_n -ln(max(p[n][y_n], eps)).
double test_nll(const Matrix& probs, std::span<const int> labels);

/// Fraction of rows whose argmax (ties toward the lowest class index)
/// matches the label.
double accuracy(const Matrix& probs, std::span<const int> labels);

/// Row argmax with ties toward the lowest class index.
std::vector<int> argmax_rows(const Matrix& probs);

/// Per class k: 2 TP / (2 TP + FP + FN), or 0 when that denominator is 0.
std::vector<double> per_class_f1(std::span<const int> predictions,
                                 std::span<const int> labels, std::int64_t class_count);

/// Element-wise NLL_random - NLL_heuristic; positive means the heuristic
/// beats random selection at the same label budget.
std::vector<double> active_gain(std::span<const double> nll_random,
                                std::span<const double> nll_heuristic);

/// Per-step mean and sample standard deviation across a seed sweep.
struct StepStats {
    int step = 0;
    std::int64_t labelled_count = 0;
    double nll_mean = 0.0, nll_std = 0.0;
    double accuracy_mean = 0.0, accuracy_std = 0.0;
    std::vector<double> f1_mean, f1_std;
    double f1_macro_mean = 0.0, f1_macro_std = 0.0;
    double wall_time_mean = 0.0, wall_time_std = 0.0;
};

struct RunSummary {
    std::string heuristic;
    int seed_count = 0;
    std::vector<StepStats> steps;
};

/// Aggregates one run per seed into per-step statistics. All runs must share
/// the same labelled-count schedule. A single run gets std 0 by convention.
RunSummary aggregate_runs(const std::vector<std::vector<StepRecord>>& runs,
                          const std::string& heuristic = "");

} // namespace alearn
