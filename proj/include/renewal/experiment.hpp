#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "renewal/scenario.hpp"
#include "renewal/utility_engine.hpp"

namespace renewal {

enum class Algorithm { DppRatio, AltForm, AltTimeavg, Utility };

std::string algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::DppRatio;
    std::uint64_t frames = 1000;
    double v = 100.0;
    std::size_t sample_window = 10;
    std::uint64_t seed = 1;
    double c_approx = 0.0;
    double theta_decay = 1.0;  // time-average variant only
    BisectionConfig bisection; // bracket fields are chosen per frame
    std::vector<std::uint64_t> checkpoints; // empty → powers of ten, plus the final frame
    std::ostream* frame_log = nullptr;      // per-frame CSV sink, off by default
    bool check_invariants = true;           // structural checks at checkpoints
};

/// Queue and ratio snapshot taken when a checkpoint frame count is reached.
struct CheckpointRecord {
    std::uint64_t frame = 0;
    std::vector<double> z;
    std::vector<double> g;
    RatioEstimates ratios;
};

struct RunSummary {
    std::string scenario;
    Algorithm algorithm = Algorithm::DppRatio;
    std::uint64_t frames = 0;
    std::uint64_t seed = 0;
    double utility = 0.0;  // −objective ratio, or φ of the attribute ratios
    double t_bar = 0.0;    // mean frame length
    double idle_bar = 0.0; // mean of the scenario's "idle" action column, if any
    double y0_bar = 0.0;   // mean objective penalty per frame
    double objective_ratio = 0.0;
    std::vector<double> constraint_ratios;
    std::vector<double> attribute_ratios;
    std::vector<double> peak_z; // per-queue maxima over the whole run
    std::vector<double> peak_g;
    double theta_osc = 0.0; // max−min of θ over the last tenth (time-average variant)
    std::vector<CheckpointRecord> checkpoints;
    double wall_seconds = 0.0;
};

/// Powers of ten that fit in `frames`, then `frames` itself.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t frames);

/**
 * Drive one engine over `config.frames` frames.  Writes the per-frame CSV if
 * a sink is configured, records checkpoint snapshots, and (by default) fails
 * fast with InvariantViolation if a structural queue law breaks: queues must
 * stay non-negative, never fall below their accumulated drift, and bound the
 * realized constraint violation via  Σy_l/ΣT <= c_l + z_l/(R·t_min).
 * The utility algorithm needs `util`; the others ignore it.
 */
RunSummary run_experiment(const Scenario& scenario, const ExperimentConfig& config,
                          const UtilityFunction* util = nullptr);

/**
 * Run several configurations against one scenario on a bounded worker pool
 * (per-frame logging must be off — sinks are not synchronized).  Results come
 * back in input order.  A failed run rethrows after the pool drains, unless
 * `errors` is given: then errors[i] holds the failure message (empty on
 * success) and the other results remain usable.
 */
std::vector<RunSummary> run_many(const Scenario& scenario,
                                 const std::vector<ExperimentConfig>& configs,
                                 const UtilityFunction* util = nullptr, std::size_t workers = 2,
                                 std::vector<std::string>* errors = nullptr);

/// Deterministic JSON rendering of a summary (fixed key order, round-trip
/// exact doubles).  theta_osc appears only for the time-average variant.
std::string summary_json(const RunSummary& summary);

/// CSV header used for a run's per-frame log.
std::string frame_log_header(const Scenario& scenario, Algorithm algorithm);

/// Write a file through a temp-and-rename so readers never see a torn file.
void write_text_atomic(const std::string& path, const std::string& content);

} // namespace renewal
