#pragma once

#include <string>
#include <vector>

#include "renewal/scenario.hpp"

namespace renewal {

/// Expectation tuple of one pure policy: E[y_0..y_L], E[x_1..x_M], E[T].
struct PurePolicy {
    std::vector<double> y;
    std::vector<double> x;
    double t = 1.0;
};

/**
 * A renewal system with finitely many pure policies and no observation: each
 * frame the controller just picks a point.  Outcomes equal the declared
 * expectations, optionally jittered by mean-preserving uniform noise on the
 * penalties and attributes (never the frame length), which makes the realized
 * process stochastic while keeping every conditional expectation exact.
 */
class FiniteScenario final : public Scenario {
  public:
    FiniteScenario(std::string name, std::vector<PurePolicy> points, ConstraintTargets targets,
                   double noise = 0.0);

    std::string name() const override { return name_; }
    std::size_t constraint_count() const override { return targets_.c.size(); }
    std::size_t attribute_count() const override { return points_.front().x.size(); }
    const ConstraintTargets& targets() const override { return targets_; }
    const BoundsConfig& bounds() const override { return bounds_; }

    void sample_eta(Rng& rng, std::vector<double>& eta) const override;
    ActionChoice min_weighted(std::span<const double> eta, const ObjectiveWeights& weights,
                              double theta) const override;
    ActionEval evaluate_action(std::span<const double> eta, int action) const override;
    PolicyOutcome realize(std::span<const double> eta, int action, std::uint64_t frame,
                          Rng& rng) const override;

    const std::vector<PurePolicy>& points() const { return points_; }

  private:
    std::string name_;
    std::vector<PurePolicy> points_;
    ConstraintTargets targets_;
    BoundsConfig bounds_;
    double noise_;
};

} // namespace renewal
