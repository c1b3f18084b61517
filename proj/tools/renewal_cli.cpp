// Command-line front end: single runs, axis sweeps, and the self-check suite.
//
// Exit codes: 0 success, 1 failed check or broken run invariant, 2 bad
// configuration or usage.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "renewal/experiment.hpp"
#include "renewal/rng.hpp"
#include "renewal/scenario_factory.hpp"
#include "renewal/verify.hpp"

namespace {

using renewal::ConfigError;
using renewal::ExperimentConfig;

constexpr const char* kOutputDirEnv = "RENEWAL_OUTPUT_DIR";

struct CliOverrides {
    std::optional<std::uint64_t> frames;
    std::optional<double> v;
    std::optional<std::size_t> w;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> algorithm;

    void apply(ExperimentConfig& config) const {
        if (frames) config.frames = *frames;
        if (v) config.v = *v;
        if (w) config.sample_window = *w;
        if (seed) config.seed = *seed;
        if (algorithm) config.algorithm = renewal::parse_algorithm(*algorithm);
    }
};

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Scenario sub-object of the config; an absent key means "all defaults".
nlohmann::json scenario_spec(const nlohmann::json& root) {
    return root.contains("scenario") ? root.at("scenario") : nlohmann::json::object();
}

/// Output directory: flag beats config field beats environment variable.
std::string resolve_output_dir(const std::string& flag, const nlohmann::json& root) {
    if (!flag.empty()) return flag;
    if (root.contains("output") && root.at("output").is_string()) {
        return root.at("output").get<std::string>();
    }
    const char* env = std::getenv(kOutputDirEnv);
    return env != nullptr ? env : "";
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

const renewal::UtilityFunction* utility_for(const renewal::ScenarioBundle& bundle,
                                            const ExperimentConfig& config) {
    if (config.algorithm != renewal::Algorithm::Utility) return nullptr;
    if (!bundle.has_utility) {
        throw ConfigError("the utility algorithm needs a 'utility' object in the scenario config");
    }
    return &bundle.utility;
}

int do_run(const std::string& config_path, const CliOverrides& overrides,
           const std::string& output_flag, bool log_frames_flag) {
    const nlohmann::json root = load_config(config_path);
    const renewal::ScenarioBundle bundle = renewal::make_scenario(scenario_spec(root));
    ExperimentConfig config = renewal::parse_experiment_config(root);
    overrides.apply(config);
    const renewal::UtilityFunction* util = utility_for(bundle, config);

    const std::string out_dir = resolve_output_dir(output_flag, root);
    bool log_frames = log_frames_flag;
    if (root.contains("log_frames")) log_frames = root.at("log_frames").get<bool>() || log_frames;
    if (log_frames && out_dir.empty()) {
        throw ConfigError("per-frame logging needs an output directory (--output or " +
                          std::string(kOutputDirEnv) + ")");
    }

    std::ofstream frame_log;
    std::filesystem::path csv_tmp;
    if (log_frames) {
        std::filesystem::create_directories(out_dir);
        csv_tmp = std::filesystem::path(out_dir) / "frames.csv.tmp";
        frame_log.open(csv_tmp, std::ios::binary | std::ios::trunc);
        if (!frame_log) throw ConfigError("cannot open " + csv_tmp.string());
        config.frame_log = &frame_log;
    }

    const renewal::RunSummary summary = renewal::run_experiment(*bundle.scenario, config, util);

    if (log_frames) {
        frame_log.flush();
        if (!frame_log) throw ConfigError("write failed for " + csv_tmp.string());
        frame_log.close();
        std::filesystem::rename(csv_tmp, std::filesystem::path(out_dir) / "frames.csv");
    }

    const std::string document = renewal::summary_json(summary);
    std::cout << document;
    if (!out_dir.empty()) {
        renewal::write_text_atomic((std::filesystem::path(out_dir) / "summary.json").string(),
                                   document);
        std::cerr << "wrote " << (std::filesystem::path(out_dir) / "summary.json").string();
        if (log_frames) std::cerr << " and frames.csv";
        std::cerr << '\n';
    }
    // Timing is console-only; the written artifacts stay byte-reproducible.
    std::cerr << summary.frames << " frames in " << format_double(summary.wall_seconds)
              << " s\n";
    return 0;
}

int do_sweep(const std::string& config_path, const CliOverrides& overrides,
             const std::string& output_flag, const std::string& axis,
             const std::vector<std::string>& values) {
    const nlohmann::json root = load_config(config_path);
    const renewal::ScenarioBundle bundle = renewal::make_scenario(scenario_spec(root));
    ExperimentConfig base = renewal::parse_experiment_config(root);
    overrides.apply(base);

    std::vector<ExperimentConfig> configs;
    configs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig config = base;
        try {
            if (axis == "v") {
                config.v = std::stod(values[i]);
            } else if (axis == "w") {
                config.sample_window = static_cast<std::size_t>(std::stoull(values[i]));
            } else {
                config.algorithm = renewal::parse_algorithm(values[i]);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("bad " + axis + "-axis value '" + values[i] + "'");
        }
        // Replications get decorrelated streams while staying reproducible
        // from the base seed.
        config.seed = renewal::derive_seed(base.seed, i);
        configs.push_back(config);
    }
    const renewal::UtilityFunction* util = nullptr;
    for (const ExperimentConfig& config : configs) {
        if (config.algorithm == renewal::Algorithm::Utility) util = utility_for(bundle, config);
    }

    std::vector<std::string> errors;
    const std::vector<renewal::RunSummary> results =
        renewal::run_many(*bundle.scenario, configs, util, 2, &errors);

    std::string table = "axis,value,algorithm,frames,seed,utility,T_bar,idle_bar,y0_bar";
    const std::size_t constraints = bundle.scenario->constraint_count();
    for (std::size_t l = 1; l <= constraints; ++l) {
        table += ",constraint_ratio_" + std::to_string(l);
    }
    for (std::size_t l = 1; l <= constraints; ++l) table += ",peak_Z" + std::to_string(l);
    table += '\n';

    bool any_failed = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!errors[i].empty()) {
            any_failed = true;
            std::cerr << "sweep value '" << values[i] << "' failed: " << errors[i] << '\n';
            continue;
        }
        const renewal::RunSummary& s = results[i];
        table += axis + "," + values[i] + "," + renewal::algorithm_name(s.algorithm) + "," +
                 std::to_string(s.frames) + "," + std::to_string(s.seed);
        table += "," + format_double(s.utility);
        table += "," + format_double(s.t_bar);
        table += "," + format_double(s.idle_bar);
        table += "," + format_double(s.y0_bar);
        for (double ratio : s.constraint_ratios) table += "," + format_double(ratio);
        for (double peak : s.peak_z) table += "," + format_double(peak);
        table += '\n';
    }

    // Flush whatever completed even when some values failed.
    const std::string out_dir = resolve_output_dir(output_flag, root);
    if (out_dir.empty()) {
        std::cout << table;
    } else {
        const std::string path = (std::filesystem::path(out_dir) / "sweep.csv").string();
        renewal::write_text_atomic(path, table);
        std::cerr << "wrote " << path << '\n';
    }
    return any_failed ? 1 : 0;
}

int do_verify(const std::string& scale, std::uint64_t seed) {
    renewal::VerifyOptions options;
    options.full = (scale == "full");
    options.seed = seed;
    const std::vector<renewal::CheckResult> results = renewal::run_verification(options);
    std::size_t passed = 0;
    for (const renewal::CheckResult& result : results) {
        std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << ": " << result.detail
                  << '\n';
        if (result.pass) ++passed;
    }
    std::cout << passed << "/" << results.size() << " checks passed (" << scale << " scale)\n";
    return renewal::all_passed(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renewal-frame optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    CliOverrides overrides;
    bool log_frames = false;

    CLI::App* run = app.add_subcommand("run", "Run one experiment from a config file");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--frames", overrides.frames, "Override the frame count");
    run->add_option("--v", overrides.v, "Override the penalty weight V");
    run->add_option("--w", overrides.w, "Override the observation window W");
    run->add_option("--seed", overrides.seed, "Override the RNG seed");
    run->add_option("--algorithm", overrides.algorithm,
                    "Override the algorithm (dpp-ratio, alt-form, alt-timeavg, utility)");
    run->add_option("--output", output_dir, "Directory for summary.json (and frames.csv)");
    run->add_flag("--log-frames", log_frames, "Write the per-frame CSV");

    std::string axis;
    std::vector<std::string> values;
    CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per axis value");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--axis", axis, "Swept parameter")
        ->required()
        ->check(CLI::IsMember({"v", "w", "algorithm"}));
    sweep->add_option("--values", values, "Comma-separated axis values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--frames", overrides.frames, "Override the frame count");
    sweep->add_option("--v", overrides.v, "Override the penalty weight V");
    sweep->add_option("--w", overrides.w, "Override the observation window W");
    sweep->add_option("--seed", overrides.seed, "Base seed (per-value seeds derive from it)");
    sweep->add_option("--algorithm", overrides.algorithm, "Base algorithm for v/w sweeps");
    sweep->add_option("--output", output_dir, "Directory for sweep.csv");

    std::string scale = "full";
    std::uint64_t verify_seed = renewal::VerifyOptions{}.seed;
    CLI::App* verify = app.add_subcommand("verify", "Run the structural self-checks");
    verify->add_option("--scale", scale, "Check scale")
        ->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--seed", verify_seed, "Seed for the generated check instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(config_path, overrides, output_dir, log_frames);
        if (sweep->parsed()) return do_sweep(config_path, overrides, output_dir, axis, values);
        return do_verify(scale, verify_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
