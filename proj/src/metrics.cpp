#include "alearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alearn/acquisition.hpp"
#include "alearn/errors.hpp"

namespace alearn {

namespace {

void check_inputs(const Matrix& probs, std::span<const int> labels) {
    if (probs.rows == 0) {
        throw ValidationError("metric over an empty prediction set");
    }
    if (static_cast<std::int64_t>(labels.size()) != probs.rows) {
        throw ShapeError("prediction rows and label count differ");
    }
    for (int l : labels) {
        if (l < 0 || l >= probs.cols) {
            throw ValidationError("label " + std::to_string(l) + " outside [0, C)");
        }
    }
}

/// Sample (n-1) mean/std of a column of values; std 0 for a single value.
void mean_std(std::span<const double> values, double& mean, double& std_out) {
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    mean = sum / n;
    if (values.size() < 2) {
        std_out = 0.0;
        return;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    std_out = std::sqrt(ss / (n - 1.0));
}

} // namespace

double test_nll(const Matrix& probs, std::span<const int> labels) {
    check_inputs(probs, labels);
    double total = 0.0;
    for (std::int64_t n = 0; n < probs.rows; ++n) {
        const double p = probs.at(n, labels[static_cast<std::size_t>(n)]);
        total -= std::log(std::max(p, kLogEps));
    }
    return total / static_cast<double>(probs.rows);
}

std::vector<int> argmax_rows(const Matrix& probs) {
    std::vector<int> out(static_cast<std::size_t>(probs.rows));
    for (std::int64_t n = 0; n < probs.rows; ++n) {
        const auto row = probs.row(n);
        int best = 0;
        for (std::int64_t c = 1; c < probs.cols; ++c) {
            if (row[static_cast<std::size_t>(c)] > row[static_cast<std::size_t>(best)]) {
                best = static_cast<int>(c);
            }
        }
        out[static_cast<std::size_t>(n)] = best;
    }
    return out;
}

double accuracy(const Matrix& probs, std::span<const int> labels) {
    check_inputs(probs, labels);
    const std::vector<int> preds = argmax_rows(probs);
    std::int64_t correct = 0;
    for (std::size_t n = 0; n < preds.size(); ++n) {
        if (preds[n] == labels[n]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probs.rows);
}

std::vector<double> per_class_f1(std::span<const int> predictions,
                                 std::span<const int> labels, std::int64_t class_count) {
    if (predictions.size() != labels.size()) {
        throw ShapeError("prediction and label counts differ");
    }
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] < 0 || predictions[i] >= class_count ||
            labels[i] < 0 || labels[i] >= class_count) {
            throw ValidationError("class id outside [0, C)");
        }
    }
    std::vector<std::int64_t> tp(static_cast<std::size_t>(class_count), 0);
    std::vector<std::int64_t> fp(static_cast<std::size_t>(class_count), 0);
    std::vector<std::int64_t> fn(static_cast<std::size_t>(class_count), 0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) {
            ++tp[static_cast<std::size_t>(labels[i])];
        } else {
            ++fp[static_cast<std::size_t>(predictions[i])];
            ++fn[static_cast<std::size_t>(labels[i])];
        }
    }
    std::vector<double> f1(static_cast<std::size_t>(class_count), 0.0);
    for (std::size_t c = 0; c < f1.size(); ++c) {
        const std::int64_t denom = 2 * tp[c] + fp[c] + fn[c];
        f1[c] = denom == 0 ? 0.0
                           : 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
    }
    return f1;
}

std::vector<double> active_gain(std::span<const double> nll_random,
                                std::span<const double> nll_heuristic) {
    if (nll_random.size() != nll_heuristic.size()) {
        throw ShapeError("active gain needs series of equal length");
    }
    std::vector<double> gain(nll_random.size());
    for (std::size_t i = 0; i < gain.size(); ++i) {
        gain[i] = nll_random[i] - nll_heuristic[i];
    }
    return gain;
}

RunSummary aggregate_runs(const std::vector<std::vector<StepRecord>>& runs,
                          const std::string& heuristic) {
    if (runs.empty()) {
        throw ValidationError("aggregate over zero runs");
    }
    const std::size_t step_count = runs[0].size();
    const std::size_t class_count = step_count > 0 ? runs[0][0].per_class_f1.size() : 0;
    for (const auto& run : runs) {
        if (run.size() != step_count) {
            throw ValidationError("runs disagree on the number of steps");
        }
        for (std::size_t s = 0; s < step_count; ++s) {
            if (run[s].labelled_count != runs[0][s].labelled_count) {
                throw ValidationError("runs disagree on the labelled-count schedule");
            }
            if (run[s].per_class_f1.size() != class_count) {
                throw ValidationError("runs disagree on the class count");
            }
        }
    }

    RunSummary summary;
    summary.heuristic = heuristic;
    summary.seed_count = static_cast<int>(runs.size());
    summary.steps.resize(step_count);
    std::vector<double> column(runs.size());
    for (std::size_t s = 0; s < step_count; ++s) {
        StepStats& stats = summary.steps[s];
        stats.step = runs[0][s].step;
        stats.labelled_count = runs[0][s].labelled_count;

        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r][s].nll;
        mean_std(column, stats.nll_mean, stats.nll_std);
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r][s].accuracy;
        mean_std(column, stats.accuracy_mean, stats.accuracy_std);
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r][s].wall_time;
        mean_std(column, stats.wall_time_mean, stats.wall_time_std);

        stats.f1_mean.resize(class_count);
        stats.f1_std.resize(class_count);
        for (std::size_t c = 0; c < class_count; ++c) {
            for (std::size_t r = 0; r < runs.size(); ++r) {
                column[r] = runs[r][s].per_class_f1[c];
            }
            mean_std(column, stats.f1_mean[c], stats.f1_std[c]);
        }
        for (std::size_t r = 0; r < runs.size(); ++r) {
            double macro = 0.0;
            for (double v : runs[r][s].per_class_f1) macro += v;
            column[r] = class_count > 0 ? macro / static_cast<double>(class_count) : 0.0;
        }
        mean_std(column, stats.f1_macro_mean, stats.f1_macro_std);
    }
    return summary;
}

} // namespace alearn
