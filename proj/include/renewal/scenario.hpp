#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renewal/core.hpp"
#include "renewal/ratio_solver.hpp"
#include "renewal/rng.hpp"

namespace renewal {

/**
 * Linear weighting of one frame's conditional expectations:
 *
 *     v·E[y_0] + Σ_l z_l·E[y_l] − Σ_m g_m·E[x_m]
 *
 * v scales the objective penalty, z holds the constraint-queue weights and g
 * the attribute-queue weights.  The spans alias caller-owned storage and must
 * stay alive while the weights are in use.
 */
struct ObjectiveWeights {
    double v = 0.0;
    std::span<const double> z{};
    std::span<const double> g{};
};

/// Conditional expectations of one candidate action under a fixed η.
struct ActionEval {
    double t = 0.0;
    std::vector<double> y; // length L+1
    std::vector<double> x; // length M
};

struct ThetaBracket {
    double lo = 0.0;
    double hi = 0.0;
};

/**
 * A pluggable renewal system.
 *
 * Each frame reveals an observation η, after which the controller picks one
 * of the η's admissible actions (opaque integer handles).  The scenario can
 * score every handle's conditional expectations against a linear weighting,
 * report those expectations, and realize an actual outcome.  All methods are
 * const and freely shareable across threads; per-run randomness lives in the
 * Rng the caller passes in.
 */
class Scenario {
  public:
    virtual ~Scenario() = default;

    virtual std::string name() const = 0;
    virtual std::size_t constraint_count() const = 0; // L
    virtual std::size_t attribute_count() const = 0;  // M
    virtual const ConstraintTargets& targets() const = 0;
    virtual const BoundsConfig& bounds() const = 0;

    /// Draw the next observation into `eta` (resized as needed).
    virtual void sample_eta(Rng& rng, std::vector<double>& eta) const = 0;

    /// inf over the η's actions of  v·y_0 + Σ z_l·y_l − Σ g_m·x_m − θ·T
    /// (conditional expectations), with the minimizing handle.  Ties go to
    /// the lowest handle.
    virtual ActionChoice min_weighted(std::span<const double> eta, const ObjectiveWeights& weights,
                                      double theta) const = 0;

    /// Conditional expectations of one handle under η.
    virtual ActionEval evaluate_action(std::span<const double> eta, int action) const = 0;

    /// Realize the frame: draw anything the outcome depends on beyond η.
    virtual PolicyOutcome realize(std::span<const double> eta, int action, std::uint64_t frame,
                                  Rng& rng) const = 0;

    /// Scenario-specific starting bracket for the parametric root θ*, if the
    /// scenario knows a better one than the generic envelope bracket.
    virtual std::optional<ThetaBracket> bracket_hint(const ObjectiveWeights& weights) const {
        (void)weights;
        return std::nullopt;
    }

    /// Names of the per-frame action log columns (e.g. {"device", "idle"}).
    virtual std::vector<std::string> action_columns() const { return {"action"}; }

    /// Values for those columns given a chosen handle.
    virtual void action_values(std::span<const double> eta, int action,
                               std::vector<double>& out) const {
        (void)eta;
        out.assign(1, static_cast<double>(action));
    }
};

/// Weighted numerator  v·y_0 + Σ z_l·y_l − Σ g_m·x_m  of one evaluation.
double weighted_numerator(const ObjectiveWeights& weights, const ActionEval& eval);

/**
 * Envelope bracket that always straddles θ* for the given weights: the ratio
 * of any policy lies between the extreme numerator/denominator quotients, and
 * one unit of margin is added on each side.
 */
ThetaBracket default_bracket(const ObjectiveWeights& weights, const BoundsConfig& bounds);

/**
 * The per-frame fractional program of the drift-plus-penalty-ratio algorithm:
 * numerator weights (v, z) and denominator T, with the conditional infimum
 * estimated by averaging over the given η samples.  The returned instance
 * aliases `scenario`, `samples`, and `z`; keep them alive while it is used.
 * With a single sample this is exactly the one-observation conditional
 * instance.
 */
FractionalInstance dpp_ratio_objective(const Scenario& scenario,
                                       std::span<const std::span<const double>> samples,
                                       std::span<const double> z, double v);

/**
 * Policy-selection instance of the concave-utility loop: numerator
 * Σ z_l·y_l − Σ g_m·x_m, denominator T.  Requires at least one attribute
 * process (CapabilityError otherwise).  Same aliasing rules as above.
 */
FractionalInstance utility_policy_instance(const Scenario& scenario,
                                           std::span<const std::span<const double>> samples,
                                           std::span<const double> z, std::span<const double> g);

/// What one engine step produced; consumed by the run harness and logs.
struct FrameResult {
    PolicyOutcome outcome;
    double theta = 0.0; // root estimate (ratio engines) or tracker value (time-average form)
    int action = -1;
    double inf_value = 0.0;
    int bisect_iterations = 0;
    std::vector<double> gamma;         // auxiliary point (utility engine only)
    std::vector<double> action_values; // decoded action columns for the log
};

} // namespace renewal
