#include "renewal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "renewal/alt_engine.hpp"
#include "renewal/dpp_engine.hpp"

namespace renewal {

std::string algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::DppRatio: return "dpp-ratio";
    case Algorithm::AltForm: return "alt-form";
    case Algorithm::AltTimeavg: return "alt-timeavg";
    case Algorithm::Utility: return "utility";
    }
    throw ConfigError("algorithm_name: unknown algorithm");
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "dpp-ratio") return Algorithm::DppRatio;
    if (name == "alt-form") return Algorithm::AltForm;
    if (name == "alt-timeavg") return Algorithm::AltTimeavg;
    if (name == "utility") return Algorithm::Utility;
    throw ConfigError("unknown algorithm '" + name +
                      "' (expected dpp-ratio, alt-form, alt-timeavg, or utility)");
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t frames) {
    std::vector<std::uint64_t> points;
    for (std::uint64_t p = 10; p < frames && p != 0; p *= 10) points.push_back(p);
    if (frames > 0) points.push_back(frames);
    return points;
}

namespace {

void append_double(std::string& row, double value) {
    char buffer[40];
    // %.17g round-trips doubles exactly, so ratios recomputed from the log
    // match the summary bit for bit.
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    row += buffer;
}

std::vector<std::uint64_t> normalize_checkpoints(const ExperimentConfig& config) {
    std::vector<std::uint64_t> points =
        config.checkpoints.empty() ? default_checkpoints(config.frames) : config.checkpoints;
    points.erase(std::remove_if(points.begin(), points.end(),
                                [&](std::uint64_t p) { return p == 0 || p > config.frames; }),
                 points.end());
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

void check_queue_laws(const Scenario& scenario, const QueueBank& bank,
                      const MetricsLedger& ledger, std::uint64_t frame) {
    const double t_min = scenario.bounds().t_min;
    for (std::size_t l = 0; l < bank.z.size(); ++l) {
        if (!(bank.z[l] >= 0.0)) {
            throw InvariantViolation("queue non-negativity broke at frame " +
                                     std::to_string(frame));
        }
        const double drift = ledger.sum_y[l + 1] - bank.targets.c[l] * ledger.sum_t;
        const double slack = 1e-9 * (1.0 + std::fabs(drift) + bank.z[l]);
        if (bank.z[l] + slack < drift) {
            throw InvariantViolation("queue telescoping broke at frame " + std::to_string(frame));
        }
        const double ratio = ledger.sum_y[l + 1] / ledger.sum_t;
        const double bound =
            bank.targets.c[l] + bank.z[l] / (static_cast<double>(frame) * t_min);
        if (ratio > bound + 1e-9 * (1.0 + std::fabs(bound))) {
            throw InvariantViolation("constraint-violation bound broke at frame " +
                                     std::to_string(frame));
        }
    }
    for (double g : bank.g) {
        if (!(g >= 0.0)) {
            throw InvariantViolation("auxiliary queue non-negativity broke at frame " +
                                     std::to_string(frame));
        }
    }
}

} // namespace

std::string frame_log_header(const Scenario& scenario, Algorithm algorithm) {
    std::string header = "frame";
    if (algorithm == Algorithm::DppRatio || algorithm == Algorithm::Utility) {
        header += ",theta_hat";
    } else if (algorithm == Algorithm::AltTimeavg) {
        header += ",theta";
    }
    for (const std::string& column : scenario.action_columns()) header += "," + column;
    header += ",T";
    for (std::size_t i = 0; i <= scenario.constraint_count(); ++i) {
        header += ",y" + std::to_string(i);
    }
    for (std::size_t l = 1; l <= scenario.constraint_count(); ++l) {
        header += ",Z" + std::to_string(l);
    }
    if (algorithm == Algorithm::Utility) {
        for (std::size_t m = 1; m <= scenario.attribute_count(); ++m) {
            header += ",gamma" + std::to_string(m);
        }
        for (std::size_t m = 1; m <= scenario.attribute_count(); ++m) {
            header += ",G" + std::to_string(m);
        }
    }
    return header;
}

RunSummary run_experiment(const Scenario& scenario, const ExperimentConfig& config,
                          const UtilityFunction* util) {
    if (config.frames == 0) throw ConfigError("run_experiment: frames must be >= 1");
    const auto start = std::chrono::steady_clock::now();

    // One engine behind a uniform stepping interface.
    std::unique_ptr<DppEngine> dpp;
    std::unique_ptr<AltEngine> alt;
    std::unique_ptr<UtilityEngine> utility_engine;
    const QueueBank* bank = nullptr;
    const MetricsLedger* ledger = nullptr;
    switch (config.algorithm) {
    case Algorithm::DppRatio: {
        DppConfig engine_config{config.v,    config.c_approx,      config.frames,
                                config.seed, config.sample_window, config.bisection};
        dpp = std::make_unique<DppEngine>(scenario, engine_config);
        bank = &dpp->queues();
        ledger = &dpp->ledger();
        break;
    }
    case Algorithm::AltForm:
    case Algorithm::AltTimeavg: {
        AltConfig engine_config{config.v, config.frames, config.seed, config.theta_decay};
        alt = std::make_unique<AltEngine>(scenario, engine_config,
                                          config.algorithm == Algorithm::AltForm
                                              ? AltEngine::Mode::Form
                                              : AltEngine::Mode::TimeAverage);
        bank = &alt->queues();
        ledger = &alt->ledger();
        break;
    }
    case Algorithm::Utility: {
        if (util == nullptr) throw ConfigError("run_experiment: utility algorithm needs a utility");
        UtilityConfig engine_config{config.v,    config.c_approx,      config.frames,
                                    config.seed, config.sample_window, config.bisection};
        utility_engine = std::make_unique<UtilityEngine>(scenario, *util, engine_config);
        bank = &utility_engine->queues();
        ledger = &utility_engine->ledger();
        break;
    }
    }
    const auto step = [&]() -> FrameResult {
        if (dpp) return dpp->step();
        if (alt) return alt->step();
        return utility_engine->step();
    };

    const std::vector<std::uint64_t> checkpoints = normalize_checkpoints(config);
    std::size_t next_checkpoint = 0;

    const std::vector<std::string> action_columns = scenario.action_columns();
    std::ptrdiff_t idle_column = -1;
    for (std::size_t i = 0; i < action_columns.size(); ++i) {
        if (action_columns[i] == "idle") idle_column = static_cast<std::ptrdiff_t>(i);
    }

    RunSummary summary;
    summary.scenario = scenario.name();
    summary.algorithm = config.algorithm;
    summary.frames = config.frames;
    summary.seed = config.seed;
    summary.peak_z.assign(scenario.constraint_count(), 0.0);
    summary.peak_g.assign(scenario.attribute_count(), 0.0);

    std::vector<double> theta_trace;
    if (config.algorithm == Algorithm::AltTimeavg) theta_trace.reserve(config.frames);

    double idle_sum = 0.0;
    std::string row;
    if (config.frame_log != nullptr) {
        *config.frame_log << frame_log_header(scenario, config.algorithm) << '\n';
    }

    for (std::uint64_t r = 0; r < config.frames; ++r) {
        const FrameResult result = step();

        for (std::size_t l = 0; l < bank->z.size(); ++l) {
            summary.peak_z[l] = std::max(summary.peak_z[l], bank->z[l]);
        }
        for (std::size_t m = 0; m < bank->g.size(); ++m) {
            summary.peak_g[m] = std::max(summary.peak_g[m], bank->g[m]);
        }
        if (idle_column >= 0) idle_sum += result.action_values[idle_column];
        if (config.algorithm == Algorithm::AltTimeavg) theta_trace.push_back(result.theta);

        if (config.frame_log != nullptr) {
            row.clear();
            row += std::to_string(r);
            if (config.algorithm != Algorithm::AltForm) {
                row += ',';
                append_double(row, result.theta);
            }
            for (double v : result.action_values) {
                row += ',';
                append_double(row, v);
            }
            row += ',';
            append_double(row, result.outcome.frame_length);
            for (double y : result.outcome.penalties) {
                row += ',';
                append_double(row, y);
            }
            for (double z : bank->z) {
                row += ',';
                append_double(row, z);
            }
            if (config.algorithm == Algorithm::Utility) {
                for (double g : result.gamma) {
                    row += ',';
                    append_double(row, g);
                }
                for (double g : bank->g) {
                    row += ',';
                    append_double(row, g);
                }
            }
            *config.frame_log << row << '\n';
        }

        if (next_checkpoint < checkpoints.size() && r + 1 == checkpoints[next_checkpoint]) {
            CheckpointRecord record;
            record.frame = r + 1;
            record.z = bank->z;
            record.g = bank->g;
            record.ratios = ratio_estimates(*ledger);
            summary.checkpoints.push_back(std::move(record));
            if (config.check_invariants) check_queue_laws(scenario, *bank, *ledger, r + 1);
            ++next_checkpoint;
        }
    }

    const RatioEstimates est = ratio_estimates(*ledger);
    summary.objective_ratio = est.objective;
    summary.constraint_ratios = est.constraints;
    summary.attribute_ratios = est.attributes;
    summary.t_bar = ledger->sum_t / static_cast<double>(config.frames);
    summary.y0_bar = ledger->sum_y[0] / static_cast<double>(config.frames);
    summary.idle_bar = idle_column >= 0 ? idle_sum / static_cast<double>(config.frames) : 0.0;
    if (config.algorithm == Algorithm::Utility) {
        summary.utility = (*util)(est.attributes);
    } else {
        summary.utility = -est.objective;
    }
    if (config.algorithm == Algorithm::AltTimeavg && !theta_trace.empty()) {
        const std::size_t window = std::max<std::size_t>(theta_trace.size() / 10, 1);
        const std::size_t from = theta_trace.size() - window;
        double lo = theta_trace[from], hi = theta_trace[from];
        for (std::size_t i = from; i < theta_trace.size(); ++i) {
            lo = std::min(lo, theta_trace[i]);
            hi = std::max(hi, theta_trace[i]);
        }
        summary.theta_osc = hi - lo;
    }
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

std::vector<RunSummary> run_many(const Scenario& scenario,
                                 const std::vector<ExperimentConfig>& configs,
                                 const UtilityFunction* util, std::size_t workers,
                                 std::vector<std::string>* errors) {
    for (const ExperimentConfig& config : configs) {
        if (config.frame_log != nullptr) {
            throw ConfigError("run_many: per-frame logging is not supported concurrently");
        }
    }
    std::vector<RunSummary> results(configs.size());
    std::vector<std::exception_ptr> failures(configs.size());
    std::atomic<std::size_t> next{0};
    const std::size_t pool = std::max<std::size_t>(1, std::min(workers, configs.size()));

    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            try {
                results[i] = run_experiment(scenario, configs[i], util);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (errors != nullptr) {
        errors->assign(configs.size(), "");
        for (std::size_t i = 0; i < failures.size(); ++i) {
            if (!failures[i]) continue;
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                (*errors)[i] = e.what();
            } catch (...) {
                (*errors)[i] = "unknown error";
            }
        }
        return results;
    }
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return results;
}

std::string summary_json(const RunSummary& summary) {
    nlohmann::ordered_json j;
    j["utility"] = summary.utility;
    j["T_bar"] = summary.t_bar;
    j["idle_bar"] = summary.idle_bar;
    j["y0_bar"] = summary.y0_bar;
    j["constraint_ratios"] = summary.constraint_ratios;
    j["peak_Z"] = summary.peak_z;
    j["frames"] = summary.frames;
    j["seed"] = summary.seed;
    if (summary.algorithm == Algorithm::AltTimeavg) j["theta_osc"] = summary.theta_osc;
    return j.dump(2) + "\n";
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path temp = target.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("write_text_atomic: cannot open " + temp.string());
        out << content;
        if (!out.flush()) throw ConfigError("write_text_atomic: write failed for " + temp.string());
    }
    std::filesystem::rename(temp, target);
}

} // namespace renewal
