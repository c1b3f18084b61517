#include "renewal/finite_scenario.hpp"

#include <algorithm>
#include <limits>

namespace renewal {

FiniteScenario::FiniteScenario(std::string name, std::vector<PurePolicy> points,
                               ConstraintTargets targets, double noise)
    : name_(std::move(name)), points_(std::move(points)), targets_(std::move(targets)),
      noise_(noise) {
    if (points_.empty()) throw ConfigError("FiniteScenario: need at least one pure policy");
    if (noise_ < 0.0) throw ConfigError("FiniteScenario: noise must be >= 0");
    const std::size_t ny = points_.front().y.size();
    const std::size_t nx = points_.front().x.size();
    if (ny != targets_.c.size() + 1) {
        throw ConfigError("FiniteScenario: penalty tuple length must be targets + 1");
    }
    bounds_.t_min = std::numeric_limits<double>::infinity();
    bounds_.t_max = 0.0;
    bounds_.y_min.assign(ny, std::numeric_limits<double>::infinity());
    bounds_.y_max.assign(ny, -std::numeric_limits<double>::infinity());
    bounds_.x_min.assign(nx, std::numeric_limits<double>::infinity());
    bounds_.x_max.assign(nx, -std::numeric_limits<double>::infinity());
    for (const PurePolicy& p : points_) {
        if (p.y.size() != ny || p.x.size() != nx) {
            throw ConfigError("FiniteScenario: ragged pure-policy tuples");
        }
        if (!(p.t > 0.0)) throw ConfigError("FiniteScenario: frame lengths must be positive");
        bounds_.t_min = std::min(bounds_.t_min, p.t);
        bounds_.t_max = std::max(bounds_.t_max, p.t);
        for (std::size_t i = 0; i < ny; ++i) {
            bounds_.y_min[i] = std::min(bounds_.y_min[i], p.y[i] - noise_);
            bounds_.y_max[i] = std::max(bounds_.y_max[i], p.y[i] + noise_);
        }
        for (std::size_t m = 0; m < nx; ++m) {
            bounds_.x_min[m] = std::min(bounds_.x_min[m], p.x[m] - noise_);
            bounds_.x_max[m] = std::max(bounds_.x_max[m], p.x[m] + noise_);
        }
    }
}

void FiniteScenario::sample_eta(Rng& rng, std::vector<double>& eta) const {
    (void)rng; // nothing is revealed before the decision
    eta.clear();
}

ActionChoice FiniteScenario::min_weighted(std::span<const double> eta,
                                          const ObjectiveWeights& weights, double theta) const {
    (void)eta;
    ActionChoice best{std::numeric_limits<double>::infinity(), -1};
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const PurePolicy& p = points_[i];
        double value = weights.v * p.y[0] - theta * p.t;
        for (std::size_t l = 0; l < weights.z.size(); ++l) value += weights.z[l] * p.y[l + 1];
        for (std::size_t m = 0; m < weights.g.size(); ++m) value -= weights.g[m] * p.x[m];
        if (value < best.value) best = ActionChoice{value, static_cast<int>(i)};
    }
    return best;
}

ActionEval FiniteScenario::evaluate_action(std::span<const double> eta, int action) const {
    (void)eta;
    if (action < 0 || action >= static_cast<int>(points_.size())) {
        throw DomainError("FiniteScenario: action handle out of range");
    }
    const PurePolicy& p = points_[static_cast<std::size_t>(action)];
    return ActionEval{p.t, p.y, p.x};
}

PolicyOutcome FiniteScenario::realize(std::span<const double> eta, int action,
                                      std::uint64_t frame, Rng& rng) const {
    const ActionEval eval = evaluate_action(eta, action);
    PolicyOutcome outcome;
    outcome.frame_index = frame;
    outcome.frame_length = eval.t;
    outcome.penalties = eval.y;
    outcome.attributes = eval.x;
    if (noise_ > 0.0) {
        for (double& y : outcome.penalties) y += noise_ * (2.0 * rng.next_unit() - 1.0);
        for (double& x : outcome.attributes) x += noise_ * (2.0 * rng.next_unit() - 1.0);
    }
    return outcome;
}

} // namespace renewal
