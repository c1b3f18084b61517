#pragma once

#include <memory>

#include <json.hpp>

#include "renewal/experiment.hpp"
#include "renewal/oracle.hpp"
#include "renewal/scenario.hpp"

namespace renewal {

/// Scenario plus the utility attached to it in the config, if any.
struct ScenarioBundle {
    std::unique_ptr<Scenario> scenario;
    UtilityFunction utility;
    bool has_utility = false;
};

/// Build a scenario from its config object:
///   {"name": "task-network", "p_tran": 1.0, "i_max": 5.0, "constraint": 0.25}
///   {"name": "finite", "label": "...", "targets": [...], "noise": 0.0,
///    "points": [{"y": [...], "x": [...], "t": 1.0}, ...],
///    "utility": {"name": "identity-sum" | "log1p" | "min-linear", ...}}
ScenarioBundle make_scenario(const nlohmann::json& spec);

/// Build a utility function from its config object (m = attribute count).
UtilityFunction make_utility(const nlohmann::json& spec, std::size_t m);

/// Read the pure-policy system of a "finite" scenario config for the
/// reference oracles.
FinitePolicySystem parse_finite_system(const nlohmann::json& spec);

/// Read run settings (algorithm, frames, v, w, seed, bisection, checkpoints)
/// from a full config document.  Unknown algorithms and malformed values
/// throw ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& root);

} // namespace renewal
