#include "renewal/scenario.hpp"

#include <algorithm>

namespace renewal {

double weighted_numerator(const ObjectiveWeights& weights, const ActionEval& eval) {
    if (eval.y.size() != weights.z.size() + 1) {
        throw ConfigError("weighted_numerator: penalty/weight length mismatch");
    }
    if (eval.x.size() < weights.g.size()) {
        throw ConfigError("weighted_numerator: attribute/weight length mismatch");
    }
    double acc = weights.v * eval.y[0];
    for (std::size_t l = 0; l < weights.z.size(); ++l) acc += weights.z[l] * eval.y[l + 1];
    for (std::size_t m = 0; m < weights.g.size(); ++m) acc -= weights.g[m] * eval.x[m];
    return acc;
}

ThetaBracket default_bracket(const ObjectiveWeights& weights, const BoundsConfig& bounds) {
    bounds.validate();
    if (bounds.y_min.size() != weights.z.size() + 1) {
        throw ConfigError("default_bracket: bounds/weight length mismatch");
    }
    double num_min = weights.v >= 0.0 ? weights.v * bounds.y_min[0] : weights.v * bounds.y_max[0];
    double num_max = weights.v >= 0.0 ? weights.v * bounds.y_max[0] : weights.v * bounds.y_min[0];
    for (std::size_t l = 0; l < weights.z.size(); ++l) {
        const double w = weights.z[l];
        num_min += w >= 0.0 ? w * bounds.y_min[l + 1] : w * bounds.y_max[l + 1];
        num_max += w >= 0.0 ? w * bounds.y_max[l + 1] : w * bounds.y_min[l + 1];
    }
    for (std::size_t m = 0; m < weights.g.size(); ++m) {
        const double w = weights.g[m];
        num_min -= w >= 0.0 ? w * bounds.x_max[m] : w * bounds.x_min[m];
        num_max -= w >= 0.0 ? w * bounds.x_min[m] : w * bounds.x_max[m];
    }
    ThetaBracket bracket;
    bracket.lo = std::min(num_min / bounds.t_min, num_min / bounds.t_max) - 1.0;
    bracket.hi = std::max(num_max / bounds.t_min, num_max / bounds.t_max) + 1.0;
    return bracket;
}

namespace {

FractionalInstance make_sampled_instance(const Scenario& scenario,
                                         std::span<const std::span<const double>> samples,
                                         ObjectiveWeights weights) {
    if (samples.empty()) throw DomainError("sampled objective: empty sample set");
    FractionalInstance instance;
    instance.b_min = scenario.bounds().t_min;
    instance.b_max = scenario.bounds().t_max;
    instance.evaluate_inf = [&scenario, samples, weights](double theta) {
        // Fixed-order average of the per-sample conditional infima; the
        // handle reported is the first sample's minimizer (representative,
        // and the exact minimizer whenever there is a single sample).
        double acc = 0.0;
        int first_action = -1;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const ActionChoice choice = scenario.min_weighted(samples[i], weights, theta);
            if (i == 0) first_action = choice.action;
            acc += choice.value;
        }
        return ActionChoice{acc / static_cast<double>(samples.size()), first_action};
    };
    return instance;
}

} // namespace

FractionalInstance dpp_ratio_objective(const Scenario& scenario,
                                       std::span<const std::span<const double>> samples,
                                       std::span<const double> z, double v) {
    if (z.size() != scenario.constraint_count()) {
        throw ConfigError("dpp_ratio_objective: weight length != constraint count");
    }
    return make_sampled_instance(scenario, samples, ObjectiveWeights{v, z, {}});
}

FractionalInstance utility_policy_instance(const Scenario& scenario,
                                           std::span<const std::span<const double>> samples,
                                           std::span<const double> z, std::span<const double> g) {
    if (scenario.attribute_count() == 0) {
        throw CapabilityError("utility_policy_instance: scenario has no attribute processes");
    }
    if (z.size() != scenario.constraint_count() || g.size() != scenario.attribute_count()) {
        throw ConfigError("utility_policy_instance: weight length mismatch");
    }
    return make_sampled_instance(scenario, samples, ObjectiveWeights{0.0, z, g});
}

} // namespace renewal
