#include "alearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "alearn/errors.hpp"
#include "alearn/rng.hpp"
#include "alearn/svg.hpp"

namespace fs = std::filesystem;

namespace alearn {

namespace {

using nlohmann::json;

[[noreturn]] void fail_cfg(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail_cfg(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
        }
    }
}

const json& require_object(const json& parent, const std::string& path, const char* key) {
    if (!parent.contains(key)) fail_cfg(key, "required block missing");
    const json& v = parent.at(key);
    if (!v.is_object()) fail_cfg(path, "expected an object");
    return v;
}

std::int64_t get_i64(const json& obj, const std::string& path, const char* key,
                     std::int64_t dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail_cfg(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

double get_real(const json& obj, const std::string& path, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number()) fail_cfg(path + "." + key, "expected a number");
    return v.get<double>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_string()) fail_cfg(path + "." + key, "expected a string");
    return v.get<std::string>();
}

void parse_dataset(const json& obj, DatasetBlock& out) {
    out.source = get_str(obj, "dataset", "source", out.source);
    if (out.source == "blobs") {
        check_keys(obj, "dataset",
                   {"source", "classes", "per_class", "dim", "spread", "test_per_class",
                    "noise_lambda", "imbalance"});
        out.classes = get_i64(obj, "dataset", "classes", out.classes);
        out.per_class = get_i64(obj, "dataset", "per_class", out.per_class);
        out.dim = get_i64(obj, "dataset", "dim", out.dim);
        out.spread = get_real(obj, "dataset", "spread", out.spread);
        out.test_per_class = get_i64(obj, "dataset", "test_per_class", out.test_per_class);
    } else if (out.source == "idx") {
        check_keys(obj, "dataset",
                   {"source", "train_images", "train_labels", "test_images", "test_labels",
                    "limit", "noise_lambda", "imbalance"});
        out.train_images = get_str(obj, "dataset", "train_images", "");
        out.train_labels = get_str(obj, "dataset", "train_labels", "");
        out.test_images = get_str(obj, "dataset", "test_images", "");
        out.test_labels = get_str(obj, "dataset", "test_labels", "");
        out.limit = get_i64(obj, "dataset", "limit", out.limit);
    } else {
        fail_cfg("dataset.source", "expected \"blobs\" or \"idx\"");
    }
    if (obj.contains("noise_lambda")) {
        out.noise_lambda = get_real(obj, "dataset", "noise_lambda", 0.0);
    }
    if (obj.contains("imbalance")) {
        const json& im = obj.at("imbalance");
        if (!im.is_object()) fail_cfg("dataset.imbalance", "expected an object");
        check_keys(im, "dataset.imbalance", {"delta", "keep_fraction"});
        ImbalanceBlock block;
        block.delta = get_i64(im, "dataset.imbalance", "delta", 0);
        block.keep_fraction = get_real(im, "dataset.imbalance", "keep_fraction", 0.25);
        out.imbalance = block;
    }
}

void parse_model(const json& obj, ModelBlock& out) {
    check_keys(obj, "model",
               {"hidden_dims", "dropout_rate", "epochs", "batch_size", "learning_rate",
                "momentum"});
    if (obj.contains("hidden_dims")) {
        const json& dims = obj.at("hidden_dims");
        if (!dims.is_array()) fail_cfg("model.hidden_dims", "expected an array");
        out.hidden_dims.clear();
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (!dims[i].is_number_integer()) {
                fail_cfg("model.hidden_dims[" + std::to_string(i) + "]",
                         "expected an integer");
            }
            out.hidden_dims.push_back(dims[i].get<std::int64_t>());
        }
    }
    out.dropout_rate = get_real(obj, "model", "dropout_rate", out.dropout_rate);
    out.train.epochs = get_i64(obj, "model", "epochs", out.train.epochs);
    out.train.batch_size = get_i64(obj, "model", "batch_size", out.train.batch_size);
    out.train.learning_rate = get_real(obj, "model", "learning_rate", out.train.learning_rate);
    out.train.momentum = get_real(obj, "model", "momentum", out.train.momentum);
}

void parse_loop(const json& obj, LoopBlock& out) {
    check_keys(obj, "loop",
               {"initial_labels", "query_size", "mc_samples", "pool_limit", "label_budget"});
    out.initial_labels = get_i64(obj, "loop", "initial_labels", out.initial_labels);
    out.query_size = get_i64(obj, "loop", "query_size", out.query_size);
    out.mc_samples = get_i64(obj, "loop", "mc_samples", out.mc_samples);
    out.pool_limit = get_i64(obj, "loop", "pool_limit", out.pool_limit);
    out.label_budget = get_i64(obj, "loop", "label_budget", out.label_budget);
}

} // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail_cfg("", "top level must be an object");
    check_keys(root, "",
               {"id", "dataset", "model", "loop", "heuristics", "seeds", "output_dir"});

    ScenarioConfig cfg;
    cfg.id = get_str(root, "", "id", cfg.id);
    parse_dataset(require_object(root, "dataset", "dataset"), cfg.dataset);
    if (root.contains("model")) {
        const json& m = root.at("model");
        if (!m.is_object()) fail_cfg("model", "expected an object");
        parse_model(m, cfg.model);
    }
    if (root.contains("loop")) {
        const json& l = root.at("loop");
        if (!l.is_object()) fail_cfg("loop", "expected an object");
        parse_loop(l, cfg.loop);
    }

    if (!root.contains("heuristics")) fail_cfg("heuristics", "required list missing");
    const json& hs = root.at("heuristics");
    if (!hs.is_array()) fail_cfg("heuristics", "expected an array");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!hs[i].is_string()) {
            fail_cfg("heuristics[" + std::to_string(i) + "]", "expected a string");
        }
        try {
            cfg.heuristics.push_back(parse_heuristic(hs[i].get<std::string>()));
        } catch (const ValidationError& e) {
            fail_cfg("heuristics[" + std::to_string(i) + "]", e.what());
        }
    }

    if (!root.contains("seeds")) fail_cfg("seeds", "required list missing");
    const json& seeds = root.at("seeds");
    if (!seeds.is_array()) fail_cfg("seeds", "expected an array");
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!seeds[i].is_number_integer() ||
            (seeds[i].is_number_integer() && !seeds[i].is_number_unsigned() &&
             seeds[i].get<std::int64_t>() < 0)) {
            fail_cfg("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
        }
        cfg.seeds.push_back(seeds[i].get<std::uint64_t>());
    }

    cfg.output_dir = get_str(root, "", "output_dir", cfg.output_dir);
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario_json(text);
}

void ScenarioConfig::validate() const {
    if (id.empty()) fail_cfg("id", "must not be empty");
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok) fail_cfg("id", "only letters, digits, '_', '-', '.' are allowed");
    }

    if (dataset.source == "blobs") {
        if (dataset.classes < 2) fail_cfg("dataset.classes", "need at least 2");
        if (dataset.per_class < 1) fail_cfg("dataset.per_class", "must be positive");
        if (dataset.dim < 2) fail_cfg("dataset.dim", "need at least 2");
        if (!(dataset.spread >= 0.0) || !std::isfinite(dataset.spread)) {
            fail_cfg("dataset.spread", "must be a non-negative number");
        }
        if (dataset.test_per_class < 1) fail_cfg("dataset.test_per_class", "must be positive");
    } else if (dataset.source == "idx") {
        if (dataset.train_images.empty()) fail_cfg("dataset.train_images", "path missing");
        if (dataset.train_labels.empty()) fail_cfg("dataset.train_labels", "path missing");
        if (dataset.test_images.empty()) fail_cfg("dataset.test_images", "path missing");
        if (dataset.test_labels.empty()) fail_cfg("dataset.test_labels", "path missing");
    } else {
        fail_cfg("dataset.source", "expected \"blobs\" or \"idx\"");
    }
    if (dataset.noise_lambda &&
        (!(*dataset.noise_lambda >= 0.0 && *dataset.noise_lambda <= 1.0))) {
        fail_cfg("dataset.noise_lambda", "must lie in [0, 1]");
    }
    if (dataset.imbalance) {
        if (dataset.imbalance->delta < 0) fail_cfg("dataset.imbalance.delta", "must be >= 0");
        if (dataset.source == "blobs" && dataset.imbalance->delta > dataset.classes) {
            fail_cfg("dataset.imbalance.delta", "exceeds the class count");
        }
        if (!(dataset.imbalance->keep_fraction > 0.0 &&
              dataset.imbalance->keep_fraction <= 1.0)) {
            fail_cfg("dataset.imbalance.keep_fraction", "must lie in (0, 1]");
        }
    }

    for (std::size_t i = 0; i < model.hidden_dims.size(); ++i) {
        if (model.hidden_dims[i] < 1) {
            fail_cfg("model.hidden_dims[" + std::to_string(i) + "]", "must be positive");
        }
    }
    if (!(model.dropout_rate >= 0.0 && model.dropout_rate < 1.0)) {
        fail_cfg("model.dropout_rate", "must lie in [0, 1)");
    }
    if (model.train.epochs < 1) fail_cfg("model.epochs", "must be positive");
    if (model.train.batch_size < 1) fail_cfg("model.batch_size", "must be positive");
    if (!(model.train.learning_rate > 0.0) || !std::isfinite(model.train.learning_rate)) {
        fail_cfg("model.learning_rate", "must be a positive number");
    }
    if (!(model.train.momentum >= 0.0 && model.train.momentum < 1.0)) {
        fail_cfg("model.momentum", "must lie in [0, 1)");
    }

    if (loop.initial_labels < 1) fail_cfg("loop.initial_labels", "must be positive");
    if (loop.query_size < 1) fail_cfg("loop.query_size", "must be positive");
    if (loop.mc_samples < 1) fail_cfg("loop.mc_samples", "must be positive");
    if (loop.label_budget < loop.initial_labels) {
        fail_cfg("loop.label_budget", "must be at least loop.initial_labels");
    }

    if (heuristics.empty()) fail_cfg("heuristics", "need at least one");
    for (std::size_t i = 0; i < heuristics.size(); ++i) {
        for (std::size_t j = i + 1; j < heuristics.size(); ++j) {
            if (heuristics[i] == heuristics[j]) {
                fail_cfg("heuristics[" + std::to_string(j) + "]", "duplicate entry");
            }
        }
    }
    if (seeds.empty()) fail_cfg("seeds", "need at least one");
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < seeds.size(); ++j) {
            if (seeds[i] == seeds[j]) {
                fail_cfg("seeds[" + std::to_string(j) + "]", "duplicate entry");
            }
        }
    }
    if (output_dir.empty()) fail_cfg("output_dir", "must not be empty");
}

BuiltData build_dataset(const DatasetBlock& block, std::uint64_t run_seed) {
    BuiltData out;
    if (block.source == "blobs") {
        out.pool = generate_blobs(block.per_class, block.classes, block.dim, block.spread,
                                  derive_seed(run_seed, SeedTag::PoolData));
        out.test = generate_blobs(block.test_per_class, block.classes, block.dim,
                                  block.spread, derive_seed(run_seed, SeedTag::TestData));
    } else if (block.source == "idx") {
        out.pool = load_idx_pair(block.train_images, block.train_labels,
                                 block.limit > 0 ? std::optional<std::int64_t>(block.limit)
                                                 : std::nullopt);
        out.test = load_idx_pair(block.test_images, block.test_labels);
        if (out.pool.dim() != out.test.dim()) {
            throw FormatError("train and test images disagree on pixel count");
        }
        const std::int64_t classes = std::max(out.pool.class_count, out.test.class_count);
        out.pool.class_count = classes;
        out.test.class_count = classes;
    } else {
        fail_cfg("dataset.source", "expected \"blobs\" or \"idx\"");
    }

    // Imbalance shapes the pool, then labelling noise corrupts whatever
    // labels the shaped pool ended up with. The test set is never touched.
    if (block.imbalance && block.imbalance->delta > 0) {
        ImbalanceConfig cfg;
        cfg.delta = block.imbalance->delta;
        cfg.keep_fraction = block.imbalance->keep_fraction;
        cfg.seed = derive_seed(run_seed, SeedTag::Imbalance);
        out.pool = apply_imbalance(out.pool, cfg);
    }
    if (block.noise_lambda && *block.noise_lambda > 0.0) {
        NoiseConfig cfg;
        cfg.lambda = *block.noise_lambda;
        cfg.seed = derive_seed(run_seed, SeedTag::Noise);
        out.pool = corrupt_labels(out.pool, cfg);
    }
    return out;
}

namespace {

std::vector<StepRecord> run_cell(const ScenarioConfig& cfg, Heuristic heuristic,
                                 std::uint64_t seed) {
    BuiltData data = build_dataset(cfg.dataset, seed);

    MlpSpec spec;
    spec.input_dim = data.pool.dim();
    spec.hidden_dims = cfg.model.hidden_dims;
    spec.class_count = data.pool.class_count;
    spec.dropout_rate = cfg.model.dropout_rate;

    LoopConfig lc;
    lc.initial_labels = cfg.loop.initial_labels;
    lc.query_size = cfg.loop.query_size;
    lc.mc_samples = cfg.loop.mc_samples;
    lc.pool_limit = cfg.loop.pool_limit;
    lc.label_budget = cfg.loop.label_budget;
    lc.heuristic = heuristic;
    lc.train = cfg.model.train;
    lc.seed = seed;

    ActivePool pool(std::move(data.pool));
    return run_loop(pool, spec, lc, data.test);
}

void run_cells_parallel(const ScenarioConfig& cfg, int threads,
                        std::vector<std::vector<StepRecord>>& cells) {
    const std::size_t total = cells.size();
    std::size_t worker_count = threads > 0
                                   ? static_cast<std::size_t>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min(worker_count, total);

    if (worker_count <= 1) {
        for (std::size_t i = 0; i < total; ++i) {
            cells[i] = run_cell(cfg, cfg.heuristics[i / cfg.seeds.size()],
                                cfg.seeds[i % cfg.seeds.size()]);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<bool> failed{false};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= total || failed.load()) return;
                try {
                    cells[i] = run_cell(cfg, cfg.heuristics[i / cfg.seeds.size()],
                                        cfg.seeds[i % cfg.seeds.size()]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

ScenarioResult run_scenario_cells(const ScenarioConfig& cfg, int threads) {
    cfg.validate();
    const std::size_t h_count = cfg.heuristics.size();
    const std::size_t s_count = cfg.seeds.size();
    std::vector<std::vector<StepRecord>> cells(h_count * s_count);
    run_cells_parallel(cfg, threads, cells);

    ScenarioResult result;
    result.scenario = cfg.id;
    result.class_count =
        cells.empty() || cells[0].empty()
            ? 0
            : static_cast<std::int64_t>(cells[0][0].per_class_f1.size());
    for (std::size_t h = 0; h < h_count; ++h) {
        const std::string name = heuristic_name(cfg.heuristics[h]);
        std::vector<std::vector<StepRecord>> runs;
        runs.reserve(s_count);
        for (std::size_t s = 0; s < s_count; ++s) {
            const auto& records = cells[h * s_count + s];
            runs.push_back(records);
            for (const StepRecord& rec : records) {
                ResultRow row;
                row.scenario = cfg.id;
                row.heuristic = name;
                row.seed = cfg.seeds[s];
                row.step = rec.step;
                row.labelled_count = rec.labelled_count;
                row.nll = rec.nll;
                row.accuracy = rec.accuracy;
                row.f1 = rec.per_class_f1;
                row.wall_time = rec.wall_time;
                result.rows.push_back(std::move(row));
            }
        }
        result.summaries.push_back(aggregate_runs(runs, name));
    }
    return result;
}

namespace {

const RunSummary* find_random(const std::vector<RunSummary>& summaries) {
    for (const auto& s : summaries) {
        if (s.heuristic == "random") return &s;
    }
    return nullptr;
}

std::string summary_row(const std::string& scenario, const RunSummary& summary,
                        std::size_t step, const RunSummary* random_summary) {
    const StepStats& st = summary.steps[step];
    std::string line = scenario + "," + summary.heuristic + "," + std::to_string(st.step) +
                       "," + std::to_string(st.labelled_count) + "," +
                       std::to_string(summary.seed_count) + "," + format_real(st.nll_mean) +
                       "," + format_real(st.nll_std) + "," + format_real(st.accuracy_mean) +
                       "," + format_real(st.accuracy_std) + "," +
                       format_real(st.f1_macro_mean) + "," + format_real(st.f1_macro_std);
    if (random_summary) {
        line += "," + format_real(random_summary->steps[step].nll_mean - st.nll_mean);
    }
    line += "," + format_real(st.wall_time_mean) + "," + format_real(st.wall_time_std);
    return line;
}

std::string summary_header(bool with_gain) {
    std::string h =
        "scenario,heuristic,step,labelled_count,seed_count,nll_mean,nll_std,"
        "accuracy_mean,accuracy_std,f1_macro_mean,f1_macro_std";
    if (with_gain) h += ",active_gain";
    h += ",wall_time_mean,wall_time_std";
    return h;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

struct MetricChart {
    const char* file;
    const char* label;
};

constexpr MetricChart kCharts[] = {
    {"nll.svg", "test NLL (nats)"},
    {"accuracy.svg", "test accuracy"},
    {"f1_macro.svg", "macro F1"},
};

std::string chart_for(const std::string& scenario, const std::vector<RunSummary>& summaries,
                      const char* label, int which) {
    std::vector<ChartSeries> series;
    series.reserve(summaries.size());
    for (const auto& summary : summaries) {
        ChartSeries s;
        s.name = summary.heuristic;
        for (const StepStats& st : summary.steps) {
            s.x.push_back(static_cast<double>(st.labelled_count));
            switch (which) {
                case 0:
                    s.mean.push_back(st.nll_mean);
                    s.std_dev.push_back(st.nll_std);
                    break;
                case 1:
                    s.mean.push_back(st.accuracy_mean);
                    s.std_dev.push_back(st.accuracy_std);
                    break;
                default:
                    s.mean.push_back(st.f1_macro_mean);
                    s.std_dev.push_back(st.f1_macro_std);
                    break;
            }
        }
        series.push_back(std::move(s));
    }
    return render_line_chart(scenario + ": " + label, "labelled examples", label, series);
}

void write_charts(const fs::path& dir, const std::string& scenario,
                  const std::vector<RunSummary>& summaries) {
    // Render everything before writing anything, so a bad input cannot leave
    // a partial set of files behind.
    std::string rendered[3];
    for (int i = 0; i < 3; ++i) {
        rendered[i] = chart_for(scenario, summaries, kCharts[i].label, i);
    }
    for (int i = 0; i < 3; ++i) {
        write_text_file(dir / kCharts[i].file, rendered[i]);
    }
}

} // namespace

std::string results_csv(const ScenarioResult& result) {
    std::string out = "# alearn-results v1\n";
    out += "scenario,heuristic,seed,step,labelled_count,nll,accuracy";
    for (std::int64_t c = 0; c < result.class_count; ++c) {
        out += ",f1_class_" + std::to_string(c);
    }
    out += ",wall_time\n";
    for (const ResultRow& row : result.rows) {
        out += row.scenario + "," + row.heuristic + "," + std::to_string(row.seed) + "," +
               std::to_string(row.step) + "," + std::to_string(row.labelled_count) + "," +
               format_real(row.nll) + "," + format_real(row.accuracy);
        for (double f : row.f1) out += "," + format_real(f);
        out += "," + format_real(row.wall_time) + "\n";
    }
    return out;
}

std::string summary_csv(const ScenarioResult& result) {
    const RunSummary* random_summary = find_random(result.summaries);
    std::string out = "# alearn-results v1\n";
    out += summary_header(random_summary != nullptr) + "\n";
    for (const RunSummary& summary : result.summaries) {
        if (random_summary && summary.steps.size() != random_summary->steps.size()) {
            throw ValidationError("heuristics disagree on the step schedule");
        }
        for (std::size_t s = 0; s < summary.steps.size(); ++s) {
            out += summary_row(result.scenario, summary, s, random_summary) + "\n";
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_real_field(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad real '" + s + "'");
    }
    return v;
}

std::int64_t parse_int_field(const std::string& s, std::size_t line_no) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
    return v;
}

std::uint64_t parse_uint_field(const std::string& s, std::size_t line_no) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": bad seed '" + s + "'");
    }
    return v;
}

} // namespace

ScenarioResult parse_results_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);

    if (lines.empty() || lines[0] != "# alearn-results v1") {
        throw FormatError("missing '# alearn-results v1' header");
    }
    if (lines.size() < 2) throw FormatError("missing column header");
    const std::vector<std::string> header = split_csv_line(lines[1]);
    const char* fixed[] = {"scenario", "heuristic", "seed", "step", "labelled_count",
                           "nll", "accuracy"};
    if (header.size() < 9) throw FormatError("too few columns");
    for (std::size_t i = 0; i < 7; ++i) {
        if (header[i] != fixed[i]) {
            throw FormatError("unexpected column '" + header[i] + "'");
        }
    }
    if (header.back() != "wall_time") throw FormatError("last column must be wall_time");
    const std::size_t class_count = header.size() - 8;
    for (std::size_t c = 0; c < class_count; ++c) {
        if (header[7 + c] != "f1_class_" + std::to_string(c)) {
            throw FormatError("unexpected column '" + header[7 + c] + "'");
        }
    }

    ScenarioResult result;
    result.class_count = static_cast<std::int64_t>(class_count);
    for (std::size_t li = 2; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::vector<std::string> f = split_csv_line(lines[li]);
        if (f.size() != header.size()) {
            throw FormatError("line " + std::to_string(li + 1) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(f.size()));
        }
        ResultRow row;
        row.scenario = f[0];
        row.heuristic = f[1];
        row.seed = parse_uint_field(f[2], li + 1);
        row.step = static_cast<int>(parse_int_field(f[3], li + 1));
        row.labelled_count = parse_int_field(f[4], li + 1);
        row.nll = parse_real_field(f[5], li + 1);
        row.accuracy = parse_real_field(f[6], li + 1);
        row.f1.reserve(class_count);
        for (std::size_t c = 0; c < class_count; ++c) {
            row.f1.push_back(parse_real_field(f[7 + c], li + 1));
        }
        row.wall_time = parse_real_field(f.back(), li + 1);
        result.rows.push_back(std::move(row));
    }
    if (result.rows.empty()) throw FormatError("no data rows");
    result.scenario = result.rows[0].scenario;

    // Regroup rows into one run per (heuristic, seed), both in order of first
    // appearance, then aggregate exactly like a fresh scenario run.
    std::vector<std::string> heuristic_order;
    for (const ResultRow& row : result.rows) {
        if (std::find(heuristic_order.begin(), heuristic_order.end(), row.heuristic) ==
            heuristic_order.end()) {
            heuristic_order.push_back(row.heuristic);
        }
    }
    for (const std::string& name : heuristic_order) {
        std::vector<std::uint64_t> seed_order;
        std::vector<std::vector<StepRecord>> runs;
        for (const ResultRow& row : result.rows) {
            if (row.heuristic != name) continue;
            auto it = std::find(seed_order.begin(), seed_order.end(), row.seed);
            if (it == seed_order.end()) {
                seed_order.push_back(row.seed);
                runs.emplace_back();
                it = seed_order.end() - 1;
            }
            StepRecord rec;
            rec.step = row.step;
            rec.labelled_count = row.labelled_count;
            rec.nll = row.nll;
            rec.accuracy = row.accuracy;
            rec.per_class_f1 = row.f1;
            rec.wall_time = row.wall_time;
            runs[static_cast<std::size_t>(it - seed_order.begin())].push_back(std::move(rec));
        }
        try {
            result.summaries.push_back(aggregate_runs(runs, name));
        } catch (const ValidationError& e) {
            throw FormatError(std::string("inconsistent rows: ") + e.what());
        }
    }
    return result;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, int threads) {
    ScenarioResult result = run_scenario_cells(cfg, threads);
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.output_dir + ": " + ec.message());
    const fs::path dir(cfg.output_dir);
    write_text_file(dir / "results.csv", results_csv(result));
    write_text_file(dir / "summary.csv", summary_csv(result));
    write_charts(dir, cfg.id, result.summaries);
    return result;
}

ScenarioConfig apply_axis_value(const ScenarioConfig& base, const std::string& axis,
                                const std::string& value) {
    ScenarioConfig out = base;

    const auto as_int = [&]() {
        std::int64_t v = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
            throw ConfigError("axis value '" + value + "' is not an integer");
        }
        return v;
    };
    const auto as_real = [&]() {
        double v = 0.0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
            throw ConfigError("axis value '" + value + "' is not a number");
        }
        return v;
    };

    if (axis == "noise_lambda") {
        out.dataset.noise_lambda = as_real();
    } else if (axis == "epochs") {
        out.model.train.epochs = as_int();
    } else if (axis == "query_size") {
        out.loop.query_size = as_int();
    } else if (axis == "pool_limit") {
        out.loop.pool_limit = as_int();
    } else if (axis == "imbalance_delta") {
        if (!out.dataset.imbalance) out.dataset.imbalance = ImbalanceBlock{};
        out.dataset.imbalance->delta = as_int();
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    out.id = base.id + "_" + axis + "_" + value;
    out.validate();
    return out;
}

void sweep(const ScenarioConfig& base, const std::string& axis,
           const std::vector<std::string>& values, int threads) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");

    // Validate every point up front so a bad late value cannot waste the
    // earlier runs.
    std::vector<ScenarioConfig> points;
    points.reserve(values.size());
    for (const std::string& v : values) {
        ScenarioConfig cfg = apply_axis_value(base, axis, v);
        cfg.output_dir = (fs::path(base.output_dir) / cfg.id).string();
        points.push_back(std::move(cfg));
    }

    std::vector<ScenarioResult> results;
    results.reserve(points.size());
    for (const ScenarioConfig& cfg : points) {
        results.push_back(run_scenario(cfg, threads));
    }

    const bool with_gain = find_random(results[0].summaries) != nullptr;
    std::string out = "# alearn-results v1\n";
    out += axis + "," + summary_header(with_gain) + "\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunSummary* random_summary = find_random(results[i].summaries);
        for (const RunSummary& summary : results[i].summaries) {
            for (std::size_t s = 0; s < summary.steps.size(); ++s) {
                out += values[i] + "," +
                       summary_row(results[i].scenario, summary, s, random_summary) + "\n";
            }
        }
    }
    write_text_file(fs::path(base.output_dir) / "sweep.csv", out);
}

void report(const std::string& dir) {
    const fs::path csv_path = fs::path(dir) / "results.csv";
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + csv_path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const ScenarioResult result = parse_results_csv(text);
    write_charts(fs::path(dir), result.scenario, result.summaries);
}

} // namespace alearn
