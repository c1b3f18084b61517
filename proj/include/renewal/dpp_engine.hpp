#pragma once

#include <cstdint>
#include <optional>

#include "renewal/scenario.hpp"

namespace renewal {

struct DppConfig {
    double v = 0.0;            // penalty emphasis; larger chases the optimum harder
    double c_approx = 0.0;     // slack constant when per-frame minimization is approximate
    std::uint64_t frames = 1;
    std::uint64_t seed = 0;
    std::size_t sample_window = 1; // W: how many past observations feed the empirical objective
    BisectionConfig bisection;     // bracket fields are replaced every frame
};

/// Constants for the performance/backlog diagnostic bounds, all computable
/// from the declared envelope before a run starts.
struct DiagnosticBounds {
    double b_const = 0.0;  // worst-case half sum of squared constraint drifts
    double c_approx = 0.0; // per-frame minimization slack
    double f1 = 0.0;       // 2(b_const + t_max·c_approx)
    double f2 = 0.0;       // 2(t_max·ratio_opt_hint − y0_min); 0 without a hint
    std::optional<double> ratio_opt_hint;
};

DiagnosticBounds make_diagnostic_bounds(const BoundsConfig& bounds,
                                        const ConstraintTargets& targets, double c_approx,
                                        std::optional<double> ratio_opt_hint);

/// Measured ratios next to their guaranteed envelopes after R frames.
/// objective_bound is NaN when no optimal-ratio hint is available.
struct Theorem1Report {
    double objective_ratio = 0.0;
    double objective_bound = 0.0;
    std::vector<double> constraint_ratios;
    std::vector<double> constraint_bounds;
};

/**
 * Diagnostic bounds after R completed frames: the objective ratio can exceed
 * the hinted optimum by at most (b_const/T̄ + c_approx)/v plus the initial
 * backlog term, and each constraint ratio by at most
 * √((f1 + v·f2)/R + Σz_l[0]²/R²) / t_min.  Requires v > 0 and a non-empty
 * ledger.
 */
Theorem1Report theorem1_bounds(const DiagnosticBounds& diag, double v,
                               const MetricsLedger& ledger, const BoundsConfig& bounds,
                               const ConstraintTargets& targets,
                               std::span<const double> initial_z = {});

/**
 * Ratio-minimization engine.  Each frame: observe η, build the empirical
 * fractional objective from the last W observations (plus the current one
 * while warming up), bisect for its root θ*, play the conditional minimizer
 * at θ* for the realized η, then advance the constraint queues.
 */
class DppEngine {
  public:
    DppEngine(const Scenario& scenario, const DppConfig& config);

    FrameResult step();

    const QueueBank& queues() const { return bank_; }
    const MetricsLedger& ledger() const { return ledger_; }
    std::uint64_t frame() const { return frame_; }
    const DppConfig& config() const { return config_; }

  private:
    void push_sample();

    const Scenario& scenario_;
    DppConfig config_;
    QueueBank bank_;
    MetricsLedger ledger_;
    Rng rng_;
    std::vector<std::vector<double>> ring_;
    std::size_t ring_count_ = 0;
    std::size_t ring_head_ = 0;
    std::vector<std::span<const double>> sample_views_;
    std::vector<double> eta_;
    std::uint64_t frame_ = 0;
};

} // namespace renewal
