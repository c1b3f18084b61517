#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "renewal/errors.hpp"

namespace renewal {

/// Closed interval used for box constraints.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-coordinate box; coordinate m of an auxiliary/attribute vector must lie
/// in rectangle[m].
using Rectangle = std::vector<Interval>;

/**
 * Everything one renewal frame produced.
 *
 * penalties[0] is the objective penalty; penalties[1..L] are the constrained
 * penalties.  attributes holds the M reward/attribute amounts used by the
 * concave-utility loop (empty when the system has none).
 */
struct PolicyOutcome {
    double frame_length = 0.0;
    std::vector<double> penalties;  // length L+1
    std::vector<double> attributes; // length M
    std::uint64_t frame_index = 0;
};

/// Targets c_l for the time-average constraints  lim sup y_l / T <= c_l.
struct ConstraintTargets {
    std::vector<double> c;
};

/**
 * Virtual queue state.  z[l] backs constraint l (drift +y_l − c_l·T per
 * frame, clipped at zero); g[m] backs attribute m in the utility loop
 * (drift +T·γ_m − x_m, clipped at zero).  Queues start at zero by default:
 * the analysis only needs the initial backlog to be finite, and zero keeps
 * runs reproducible without extra knobs.
 */
struct QueueBank {
    std::vector<double> z; // length L
    std::vector<double> g; // length M
    ConstraintTargets targets;
};

/**
 * A-priori magnitude envelope of a scenario, used for diagnostic bound
 * constants and default bisection brackets.  y_min/y_max bound the
 * conditional penalty expectations per index (0 = objective), x_min/x_max
 * bound the attribute expectations, t_min/t_max bound the frame length.
 */
struct BoundsConfig {
    double t_min = 1.0;
    double t_max = 1.0;
    std::vector<double> y_min; // length L+1
    std::vector<double> y_max;
    std::vector<double> x_min; // length M
    std::vector<double> x_max;

    double y0_min() const { return y_min.empty() ? 0.0 : y_min.front(); }
    double y0_max() const { return y_max.empty() ? 0.0 : y_max.front(); }

    /// Box containing every achievable attribute-per-unit-time vector
    /// x̄_m/T̄: each coordinate ranges over the extreme x/T quotients.
    Rectangle rectangle() const;

    /// Throws ConfigError unless 0 < t_min <= t_max and min/max pairs agree
    /// in length and order.
    void validate() const;
};

/**
 * Running sums of realized outcomes.  All reported ratios are derived from
 * these sums, never from incremental averaging, so re-summing a per-frame log
 * reproduces them exactly.
 */
struct MetricsLedger {
    double sum_t = 0.0;
    std::vector<double> sum_y; // length L+1
    std::vector<double> sum_x; // length M
    std::uint64_t frames = 0;

    MetricsLedger() = default;
    MetricsLedger(std::size_t num_penalties, std::size_t num_attributes)
        : sum_y(num_penalties, 0.0), sum_x(num_attributes, 0.0) {}

    void record(const PolicyOutcome& outcome);
};

/// Time-average estimates after R frames: objective = Σy_0/ΣT, constraint
/// ratio l = Σy_l/ΣT, attribute ratio m = Σx_m/ΣT.
struct RatioEstimates {
    double objective = 0.0;
    std::vector<double> constraints;
    std::vector<double> attributes;
};

/// Constraint-queue update: z_l ← max(z_l + y_l − c_l·T, 0).  Pure; returns
/// the advanced bank.  Throws ConfigError on dimension mismatch, DomainError
/// on a non-positive frame length.
QueueBank update_z(QueueBank bank, const PolicyOutcome& outcome);

/// Attribute-queue update: g_m ← max(g_m + T·γ_m − x_m, 0).  When `box` is
/// given, γ must lie inside it (DomainError otherwise).
QueueBank update_g(QueueBank bank, const PolicyOutcome& outcome,
                   std::span<const double> gamma, const Rectangle* box = nullptr);

/// Quadratic Lyapunov value  ½(Σ z_l² + Σ g_m²).  Invariant under queue
/// relabeling; never negative.
double lyapunov_value(const QueueBank& bank);

/// Ratio estimates from a ledger.  Throws DomainError when no frame has been
/// recorded yet.
RatioEstimates ratio_estimates(const MetricsLedger& ledger);

/// Worst-case half sum of squared constraint drifts,
///   ½ Σ_l max (y_l − c_l·T)²
/// over the declared envelope corners.  Feeds the diagnostic bound constants.
double constraint_drift_envelope(const BoundsConfig& bounds, const ConstraintTargets& targets);

} // namespace renewal
