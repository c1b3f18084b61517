#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "renewal/scenario.hpp"

namespace renewal {

/**
 * Concave utility of an attribute-per-unit-time vector.
 *
 * `evaluate` must be concave; `monotone_nondecreasing` declares coordinate-wise
 * monotonicity (required by the auxiliary-variable maximization, not by the
 * Jensen diagnostics).  When the function decomposes as Σ_m φ_m(γ_m), publish
 * the parts in `separable_parts` to get exact per-coordinate maximization.
 */
struct UtilityFunction {
    std::function<double(std::span<const double>)> evaluate;
    std::vector<std::function<double(double)>> separable_parts;
    bool monotone_nondecreasing = true;

    double operator()(std::span<const double> gamma) const { return evaluate(gamma); }
};

/// φ(γ) = Σ γ_m.
UtilityFunction identity_sum_utility(std::size_t m);
/// φ(γ) = Σ ln(1 + γ_m); defined for γ_m > −1.
UtilityFunction log1p_utility(std::size_t m);
/// φ(γ) = min_k (Σ_m coeffs[k][m]·γ_m + offsets[k]); concave piecewise-linear.
UtilityFunction min_linear_utility(std::vector<std::vector<double>> coeffs,
                                   std::vector<double> offsets);
/// φ(γ) = −Σ γ_m²; concave but not monotone (Jensen tests only).
UtilityFunction neg_square_utility(std::size_t m);

/**
 * Largest maximizer of a concave function on [lo, hi]: golden-section search
 * followed by a right-edge refinement so flat tops resolve to their largest
 * point.  Endpoint maximizers are returned exactly.
 */
double concave_max_1d(const std::function<double(double)>& f, double lo, double hi);

/**
 * Auxiliary point for the current attribute-queue weights: the γ in `box`
 * maximizing  v·φ(γ) − Σ g_m·γ_m.  Separable utilities get exact
 * per-coordinate maximization; otherwise projected coordinate ascent from 8
 * deterministic starts (tolerance 1e-9, hard iteration cap).  Ties resolve to
 * the largest γ.  Throws DomainError when the utility is declared or detected
 * non-concave / non-monotone, CapabilityError when the box is empty.
 */
std::vector<double> choose_aux(std::span<const double> g, double v, const UtilityFunction& util,
                               const Rectangle& box);

/**
 * Empirical check of the concavity interchange: returns
 *   (Σ T_i·φ(γ_i)/Σ T_i ,  φ(Σ T_i·γ_i / Σ T_i)).
 * For concave φ the first never exceeds the second; equality holds when all
 * γ_i coincide.  Throws DomainError on empty input or non-positive T.
 */
std::pair<double, double> jensen_gap(std::span<const double> t,
                                     std::span<const std::vector<double>> gammas,
                                     const UtilityFunction& util);

/// Worst-case squared-drift constant for the utility loop: the constraint
/// envelope plus ½ Σ_m max (T·γ_m − x_m)² over the declared boxes.
double d_envelope(const BoundsConfig& bounds, const ConstraintTargets& targets);

struct UtilityConfig {
    double v = 0.0;
    double c_approx = 0.0;
    std::uint64_t frames = 1;
    std::uint64_t seed = 0;
    std::size_t sample_window = 1;
    BisectionConfig bisection;
};

/**
 * Concave-utility maximization loop.  Each frame: pick the auxiliary point γ
 * from the attribute-queue weights, solve the policy-selection fractional
 * program (numerator Σ z·y − Σ g·x, denominator T) by bisection over the
 * observation samples, act, then advance both queue families.
 */
class UtilityEngine {
  public:
    UtilityEngine(const Scenario& scenario, const UtilityFunction& util,
                  const UtilityConfig& config);

    FrameResult step();

    const QueueBank& queues() const { return bank_; }
    const MetricsLedger& ledger() const { return ledger_; }
    std::uint64_t frame() const { return frame_; }
    /// Running Σ T·γ_m, the auxiliary analogue of the attribute sums.
    std::span<const double> sum_t_gamma() const { return sum_t_gamma_; }
    /// Running Σ T·φ(γ) for the Jensen-side utility estimate.
    double sum_t_phi() const { return sum_t_phi_; }
    const Rectangle& box() const { return box_; }

  private:
    void push_sample();

    const Scenario& scenario_;
    UtilityFunction util_;
    UtilityConfig config_;
    QueueBank bank_;
    MetricsLedger ledger_;
    Rng rng_;
    Rectangle box_;
    std::vector<std::vector<double>> ring_;
    std::size_t ring_count_ = 0;
    std::size_t ring_head_ = 0;
    std::vector<std::span<const double>> sample_views_;
    std::vector<double> eta_;
    std::vector<double> sum_t_gamma_;
    double sum_t_phi_ = 0.0;
    std::uint64_t frame_ = 0;
};

} // namespace renewal
