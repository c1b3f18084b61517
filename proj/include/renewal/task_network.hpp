#pragma once

#include <array>
#include <cstdint>

#include "renewal/scenario.hpp"

namespace renewal {

/// Observation revealed at the start of a task frame: the quality each of the
/// five devices would achieve on this task and the time it would take.
struct TaskInfo {
    std::array<double, 5> qual{};   // device l draws quality ~ U[0, l]
    std::array<double, 5> t_tran{}; // processing time ~ U[0.5, 2.5]
};

/// Control decision for one frame: which device processes the task and how
/// long to idle afterwards.
struct TaskAction {
    int device = 1;    // 1..5
    double idle = 0.0; // [0, i_max]
};

struct TaskNetConfig {
    double p_tran = 1.0;     // processing power of the chosen device
    double i_max = 5.0;      // idle allowance per frame
    double constraint = 0.25; // per-device average power budget c_l

    void validate() const;
};

/// Deterministic peak-backlog guarantee available when the idle allowance is
/// large enough: enabled iff i_max >= threshold, in which case every
/// constraint queue stays <= bound = 10·v + 0.25 + 2.5·p_tran forever.
struct DeterministicBound {
    double threshold = 0.0;
    double bound = 0.0;
    bool enabled = false;
};

/// Draw one frame's observation.  Fixed draw order (qualities for devices
/// 1..5, then processing times 1..5) so logs replay bit-identically.
TaskInfo sample_task(Rng& rng);

/// Frame outcome for a chosen action: y_0 = −quality, y_l = 0.5 + processing
/// energy if device l ran, frame length = 0.5 + processing time + idle.
/// Throws DomainError for a device outside 1..5 or idle outside [0, i_max].
PolicyOutcome evaluate(const TaskInfo& info, const TaskAction& action, const TaskNetConfig& config,
                       std::uint64_t frame = 0);

/// Closed-form minimizer of  v·y_0 + Σ z_l·y_l − θ·T  for one observation:
/// idle is 0 when θ <= 0 and i_max otherwise, and the device minimizes
/// −v·qual_l + (z_l·p_tran − θ)·t_tran_l (lowest index on ties).
TaskAction best_action_dpp(const TaskInfo& info, std::span<const double> z, double v, double theta,
                           const TaskNetConfig& config);

/// Closed-form minimizer of the time-average variant's frame objective
///   v·(y_0 − θ·T) + Σ z_l·(y_l − c_l·T),
/// where θ is the running objective-per-time estimate.  Reduces to the same
/// rule as best_action_dpp with effective root v·θ + Σ z_l·c_l.
TaskAction best_action_alt_timeavg(const TaskInfo& info, std::span<const double> z, double v,
                                   double theta, const TaskNetConfig& config);

DeterministicBound deterministic_bound_check(const TaskNetConfig& config, double v);

/**
 * The five-device task-processing network as a pluggable scenario.  Action
 * handles enumerate (device, idle) with idle restricted to {0, i_max} — the
 * per-frame objectives are linear in idle, so only the endpoints can ever
 * minimize — giving handles 0..9: device = handle % 5 + 1, idle = i_max for
 * handles 5..9.
 */
class TaskNetworkScenario final : public Scenario {
  public:
    explicit TaskNetworkScenario(TaskNetConfig config = {});

    std::string name() const override { return "task-network"; }
    std::size_t constraint_count() const override { return 5; }
    std::size_t attribute_count() const override { return 0; }
    const ConstraintTargets& targets() const override { return targets_; }
    const BoundsConfig& bounds() const override { return bounds_; }

    void sample_eta(Rng& rng, std::vector<double>& eta) const override;
    ActionChoice min_weighted(std::span<const double> eta, const ObjectiveWeights& weights,
                              double theta) const override;
    ActionEval evaluate_action(std::span<const double> eta, int action) const override;
    PolicyOutcome realize(std::span<const double> eta, int action, std::uint64_t frame,
                          Rng& rng) const override;
    std::optional<ThetaBracket> bracket_hint(const ObjectiveWeights& weights) const override;
    std::vector<std::string> action_columns() const override { return {"device", "idle"}; }
    void action_values(std::span<const double> eta, int action,
                       std::vector<double>& out) const override;

    const TaskNetConfig& config() const { return config_; }
    TaskAction decode(int action) const;
    static TaskInfo unpack(std::span<const double> eta);

  private:
    TaskNetConfig config_;
    ConstraintTargets targets_;
    BoundsConfig bounds_;
};

} // namespace renewal
