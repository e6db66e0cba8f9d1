#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "alearn/errors.hpp"
#include "alearn/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

int classify(const std::exception& e) {
    if (dynamic_cast<const alearn::ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const alearn::IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const alearn::FormatError*>(&e)) return kExitIo;
    // Remaining library errors stem from config values that passed shallow
    // validation but cannot run (e.g. more initial labels than pool items).
    if (dynamic_cast<const alearn::AlearnError*>(&e)) return kExitConfig;
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch active-learning experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string axis;
    std::string values_csv;
    std::string report_dir;
    std::string output_dir_override;
    std::int64_t seed_override = -1;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "Run one scenario from a config file");
    run->add_option("--config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--seed-override", seed_override,
                    "Replace the config's seed list with this single seed");
    run->add_option("--output-dir", output_dir_override, "Override the config's output_dir");
    run->add_option("--threads", threads, "Worker threads (0 = hardware count)");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a scenario once per axis value");
    sweep_cmd->add_option("--config", config_path, "Base scenario config (JSON)")->required();
    sweep_cmd->add_option("--axis", axis,
                          "One of: noise_lambda, epochs, query_size, pool_limit, "
                          "imbalance_delta")
        ->required();
    sweep_cmd->add_option("--values", values_csv, "Comma-separated axis values")->required();
    sweep_cmd->add_option("--seed-override", seed_override,
                          "Replace the config's seed list with this single seed");
    sweep_cmd->add_option("--output-dir", output_dir_override,
                          "Override the config's output_dir");
    sweep_cmd->add_option("--threads", threads, "Worker threads (0 = hardware count)");

    CLI::App* report_cmd =
        app.add_subcommand("report", "Rebuild the SVG charts from a results.csv");
    report_cmd->add_option("--dir", report_dir, "Directory holding results.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (report_cmd->parsed()) {
            alearn::report(report_dir);
            return kExitOk;
        }

        alearn::ScenarioConfig cfg = alearn::load_scenario_file(config_path);
        if (seed_override >= 0) {
            cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
        }
        if (!output_dir_override.empty()) {
            cfg.output_dir = output_dir_override;
        }

        if (run->parsed()) {
            alearn::run_scenario(cfg, threads);
        } else {
            alearn::sweep(cfg, axis, split_values(values_csv), threads);
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    }
}
