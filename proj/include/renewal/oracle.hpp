#pragma once

#include <vector>

#include "renewal/finite_scenario.hpp"
#include "renewal/utility_engine.hpp"

namespace renewal {

/**
 * Finite description of a renewal system for exact reference optimization:
 * one expectation tuple per pure policy plus the constraint targets.  Meant
 * for small systems (a handful of pure policies) used to validate the online
 * engines against ground truth.
 */
struct FinitePolicySystem {
    std::vector<PurePolicy> points;
    ConstraintTargets targets;

    void validate() const;
};

struct OracleResult {
    bool feasible = false;
    double value = 0.0;
};

/**
 * Vertices of the feasible mixture polytope
 *   { p : p >= 0, Σ p_i = 1, Σ_i p_i (y_li − c_l·t_i) <= 0  for all l },
 * found by enumerating supports and active constraint sets and solving the
 * resulting square systems.  Every linear (and linear-fractional) objective
 * over the polytope attains its optimum on this list.
 */
std::vector<std::vector<double>> feasible_vertices(const FinitePolicySystem& system);

/**
 * Best achievable penalty-per-unit-time ratio  min Σp·y_0 / Σp·t  over
 * feasible mixtures, solved parametrically: bisection on θ with the inner
 * linear minimization evaluated exactly on the polytope vertices (systems
 * with more than three constraints fall back to a dense mixture grid of the
 * given resolution).  Infeasible systems are reported, not thrown.
 */
OracleResult oracle_ratio_opt(const FinitePolicySystem& system, int grid = 256);

/// Best achievable per-frame objective average  min Σp·y_0  over feasible
/// mixtures (linear program; exact via vertices, grid fallback as above).
OracleResult oracle_y0_opt(const FinitePolicySystem& system, int grid = 256);

/// Best achievable utility  max φ(Σp·x / Σp·t)  over feasible mixtures,
/// evaluated on a dense mixture grid (the objective is not linear, so vertex
/// enumeration alone is not enough).
OracleResult oracle_util_opt(const FinitePolicySystem& system, const UtilityFunction& util,
                             int grid);

} // namespace renewal
