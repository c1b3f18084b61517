#include "renewal/scenario_factory.hpp"

#include "renewal/finite_scenario.hpp"
#include "renewal/task_network.hpp"

namespace renewal {

namespace {

using nlohmann::json;

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

std::vector<PurePolicy> parse_points(const json& spec) {
    if (!spec.contains("points") || !spec.at("points").is_array() || spec.at("points").empty()) {
        throw ConfigError("finite scenario: needs a non-empty 'points' array");
    }
    std::vector<PurePolicy> points;
    for (const json& entry : spec.at("points")) {
        PurePolicy p;
        p.y = field_or<std::vector<double>>(entry, "y", {});
        p.x = field_or<std::vector<double>>(entry, "x", {});
        p.t = field_or<double>(entry, "t", 1.0);
        points.push_back(std::move(p));
    }
    return points;
}

} // namespace

UtilityFunction make_utility(const nlohmann::json& spec, std::size_t m) {
    const std::string name = field_or<std::string>(spec, "name", "identity-sum");
    if (name == "identity-sum") return identity_sum_utility(m);
    if (name == "log1p") return log1p_utility(m);
    if (name == "min-linear") {
        auto coeffs = field_or<std::vector<std::vector<double>>>(spec, "coeffs", {});
        auto offsets = field_or<std::vector<double>>(spec, "offsets", {});
        return min_linear_utility(std::move(coeffs), std::move(offsets));
    }
    throw ConfigError("unknown utility '" + name +
                      "' (expected identity-sum, log1p, or min-linear)");
}

FinitePolicySystem parse_finite_system(const nlohmann::json& spec) {
    FinitePolicySystem system;
    system.points = parse_points(spec);
    system.targets.c = field_or<std::vector<double>>(spec, "targets", {});
    system.validate();
    return system;
}

ScenarioBundle make_scenario(const nlohmann::json& spec) {
    const std::string name = field_or<std::string>(spec, "name", "task-network");
    ScenarioBundle bundle;
    if (name == "task-network") {
        TaskNetConfig config;
        config.p_tran = field_or<double>(spec, "p_tran", config.p_tran);
        config.i_max = field_or<double>(spec, "i_max", config.i_max);
        config.constraint = field_or<double>(spec, "constraint", config.constraint);
        bundle.scenario = std::make_unique<TaskNetworkScenario>(config);
    } else if (name == "finite") {
        std::vector<PurePolicy> points = parse_points(spec);
        ConstraintTargets targets{field_or<std::vector<double>>(spec, "targets", {})};
        const double noise = field_or<double>(spec, "noise", 0.0);
        const std::string label = field_or<std::string>(spec, "label", "finite");
        bundle.scenario =
            std::make_unique<FiniteScenario>(label, std::move(points), std::move(targets), noise);
    } else {
        throw ConfigError("unknown scenario '" + name + "' (expected task-network or finite)");
    }
    if (spec.contains("utility")) {
        bundle.utility = make_utility(spec.at("utility"), bundle.scenario->attribute_count());
        bundle.has_utility = true;
    }
    return bundle;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& root) {
    ExperimentConfig config;
    config.algorithm = parse_algorithm(field_or<std::string>(root, "algorithm", "dpp-ratio"));
    config.frames = field_or<std::uint64_t>(root, "frames", config.frames);
    config.v = field_or<double>(root, "v", config.v);
    config.sample_window = field_or<std::size_t>(root, "w", config.sample_window);
    config.seed = field_or<std::uint64_t>(root, "seed", config.seed);
    config.c_approx = field_or<double>(root, "c_approx", config.c_approx);
    config.theta_decay = field_or<double>(root, "theta_decay", config.theta_decay);
    config.checkpoints = field_or<std::vector<std::uint64_t>>(root, "checkpoints", {});
    if (root.contains("bisection")) {
        const json& b = root.at("bisection");
        config.bisection.tolerance = field_or<double>(b, "tolerance", config.bisection.tolerance);
        config.bisection.max_expansions =
            field_or<int>(b, "max_expansions", config.bisection.max_expansions);
        config.bisection.max_iterations =
            field_or<int>(b, "max_iterations", config.bisection.max_iterations);
    }
    return config;
}

} // namespace renewal
