#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "renewal/errors.hpp"

namespace renewal {

/// Value and argument of a pointwise minimization.   `action` is an opaque
/// handle whose meaning belongs to whoever built the evaluator; -1 means the
/// evaluator had no single representative minimizer.
struct ActionChoice {
    double value = 0.0;
    int action = -1;
};

/**
 * A fractional program  minimize E[a(π)] / E[b(π)]  presented through its
 * parametric form: evaluate_inf(θ) must return inf_π E[a(π) − θ·b(π)] and a
 * minimizer handle.  b_min/b_max bound E[b] away from zero (b_min > 0), which
 * makes evaluate_inf non-increasing in θ and gives the root θ* the usual
 * sign pattern: positive value below θ*, negative above.
 */
struct FractionalInstance {
    std::function<ActionChoice(double)> evaluate_inf;
    double b_min = 1.0;
    double b_max = 1.0;
};

struct BisectionConfig {
    double theta_lo = -1.0;
    double theta_hi = 1.0;
    double tolerance = 1e-3; // stop once hi − lo < tolerance
    int max_expansions = 32; // outward-doubling bracket repairs allowed
    int max_iterations = 256;
};

struct BisectionResult {
    double theta_star = 0.0;  // midpoint of the final bracket
    double final_value = 0.0; // evaluate_inf(theta_star)
    int iterations = 0;       // halving steps taken
    int expansions = 0;       // bracket repairs taken
    int argmin_action = -1;   // minimizer handle at theta_star
    bool bracket_valid = false;
};

/**
 * Root-find θ* with plain bisection.
 *
 * The initial bracket must satisfy evaluate_inf(lo) >= 0 >= evaluate_inf(hi);
 * if it does not, the offending side is pushed outward by the current width
 * (doubling) up to max_expansions times before giving up with SolverError.
 * An exact zero at the midpoint counts as "at or above θ*" and shrinks the
 * bracket from above.  Throws ConfigError for a malformed bracket or
 * tolerance and SolverError when iteration budgets are exhausted.
 */
BisectionResult bisect(const FractionalInstance& instance, const BisectionConfig& config);

/// Per-sample conditional minimizer: (η, θ) → inf over the actions available
/// under η of E[a − θ·b | η], with the chosen action handle.
using PerEtaInf = std::function<ActionChoice(std::span<const double>, double)>;

struct SampledVal {
    double value = 0.0;        // average of the per-sample infima
    std::vector<int> actions;  // per-sample minimizer handles, input order
};

/**
 * Empirical parametric value: averages per_eta_inf over the given η samples
 * at one θ, in input order (fixed-order sum keeps replays bit-identical).
 * Throws DomainError on an empty sample set.
 */
SampledVal sampled_val(double theta, std::span<const std::span<const double>> samples,
                       const PerEtaInf& per_eta_inf);

/**
 * Optimal ratio over a finite set of pure policies given as (E[a], E[b])
 * pairs: min_i a_i / b_i.  Mixing cannot beat the best pure ratio, so this is
 * the exact optimum over all randomized policies of an unconstrained ratio
 * problem.  Throws DomainError on an empty set or a non-positive E[b].
 */
double pure_policy_ratio_opt(std::span<const std::pair<double, double>> pure_points);

} // namespace renewal
