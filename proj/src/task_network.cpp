#include "renewal/task_network.hpp"

#include <cmath>
#include <limits>

namespace renewal {

namespace {

constexpr std::size_t kDevices = 5;

// Shared closed form: pick idle from the sign of theta, then the device with
// the smallest  −v·qual_l + (z_l·p − θ)·t_l.  Lowest index wins ties.
TaskAction minimize_weighted(const TaskInfo& info, std::span<const double> z, double v,
                             double theta, const TaskNetConfig& config) {
    if (z.size() != kDevices) throw ConfigError("task network: need 5 constraint weights");
    TaskAction action;
    action.idle = theta > 0.0 ? config.i_max : 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < kDevices; ++l) {
        const double score = -v * info.qual[l] + (z[l] * config.p_tran - theta) * info.t_tran[l];
        if (score < best) {
            best = score;
            action.device = static_cast<int>(l) + 1;
        }
    }
    return action;
}

} // namespace

void TaskNetConfig::validate() const {
    if (!(p_tran >= 0.0)) throw ConfigError("TaskNetConfig: p_tran must be >= 0");
    if (!(i_max >= 0.0)) throw ConfigError("TaskNetConfig: i_max must be >= 0");
    if (!(constraint > 0.0)) throw ConfigError("TaskNetConfig: constraint must be positive");
}

TaskInfo sample_task(Rng& rng) {
    TaskInfo info;
    for (std::size_t l = 0; l < kDevices; ++l) {
        info.qual[l] = rng.uniform(0.0, static_cast<double>(l + 1));
    }
    for (std::size_t l = 0; l < kDevices; ++l) {
        info.t_tran[l] = rng.uniform(0.5, 2.5);
    }
    return info;
}

PolicyOutcome evaluate(const TaskInfo& info, const TaskAction& action, const TaskNetConfig& config,
                       std::uint64_t frame) {
    config.validate();
    if (action.device < 1 || action.device > static_cast<int>(kDevices)) {
        throw DomainError("task network: device index out of range");
    }
    if (action.idle < 0.0 || action.idle > config.i_max) {
        throw DomainError("task network: idle outside [0, i_max]");
    }
    const std::size_t dev = static_cast<std::size_t>(action.device - 1);
    PolicyOutcome outcome;
    outcome.frame_index = frame;
    outcome.frame_length = 0.5 + info.t_tran[dev] + action.idle;
    outcome.penalties.assign(kDevices + 1, 0.5);
    outcome.penalties[0] = -info.qual[dev];
    outcome.penalties[dev + 1] += config.p_tran * info.t_tran[dev];
    return outcome;
}

TaskAction best_action_dpp(const TaskInfo& info, std::span<const double> z, double v, double theta,
                           const TaskNetConfig& config) {
    return minimize_weighted(info, z, v, theta, config);
}

TaskAction best_action_alt_timeavg(const TaskInfo& info, std::span<const double> z, double v,
                                   double theta, const TaskNetConfig& config) {
    // v·(y0 − θT) + Σ z_l(y_l − c_l T) regroups to the ratio rule with an
    // effective root v·θ + Σ z_l·c_l multiplying the frame length.
    double effective = v * theta;
    for (double w : z) effective += w * config.constraint;
    return minimize_weighted(info, z, v, effective, config);
}

DeterministicBound deterministic_bound_check(const TaskNetConfig& config, double v) {
    config.validate();
    DeterministicBound out;
    out.threshold = 1.0 + 10.0 * config.p_tran;
    out.bound = 10.0 * v + 0.25 + 2.5 * config.p_tran;
    out.enabled = config.i_max >= out.threshold;
    return out;
}

TaskNetworkScenario::TaskNetworkScenario(TaskNetConfig config) : config_(config) {
    config_.validate();
    targets_.c.assign(kDevices, config_.constraint);
    bounds_.t_min = 1.0; // 0.5 control + at least 0.5 processing
    bounds_.t_max = 0.5 + 2.5 + config_.i_max;
    bounds_.y_min.assign(kDevices + 1, 0.5);
    bounds_.y_max.assign(kDevices + 1, 0.5 + 2.5 * config_.p_tran);
    bounds_.y_min[0] = -5.0; // best possible quality from device 5
    bounds_.y_max[0] = 0.0;
}

void TaskNetworkScenario::sample_eta(Rng& rng, std::vector<double>& eta) const {
    const TaskInfo info = sample_task(rng);
    eta.resize(2 * kDevices);
    for (std::size_t l = 0; l < kDevices; ++l) eta[l] = info.qual[l];
    for (std::size_t l = 0; l < kDevices; ++l) eta[kDevices + l] = info.t_tran[l];
}

TaskInfo TaskNetworkScenario::unpack(std::span<const double> eta) {
    if (eta.size() != 2 * kDevices) throw ConfigError("task network: observation has 10 entries");
    TaskInfo info;
    for (std::size_t l = 0; l < kDevices; ++l) info.qual[l] = eta[l];
    for (std::size_t l = 0; l < kDevices; ++l) info.t_tran[l] = eta[kDevices + l];
    return info;
}

TaskAction TaskNetworkScenario::decode(int action) const {
    if (action < 0 || action >= 2 * static_cast<int>(kDevices)) {
        throw DomainError("task network: action handle out of range");
    }
    TaskAction decoded;
    decoded.device = action % static_cast<int>(kDevices) + 1;
    decoded.idle = action < static_cast<int>(kDevices) ? 0.0 : config_.i_max;
    return decoded;
}

ActionChoice TaskNetworkScenario::min_weighted(std::span<const double> eta,
                                               const ObjectiveWeights& weights,
                                               double theta) const {
    if (!weights.g.empty()) {
        throw CapabilityError("task network: no attribute processes to weight");
    }
    const TaskInfo info = unpack(eta);
    const TaskAction action = minimize_weighted(info, weights.z, weights.v, theta, config_);
    const std::size_t dev = static_cast<std::size_t>(action.device - 1);

    double sum_z = 0.0;
    for (double w : weights.z) sum_z += w;
    const double value = -weights.v * info.qual[dev] + 0.5 * sum_z +
                         weights.z[dev] * config_.p_tran * info.t_tran[dev] -
                         theta * (0.5 + info.t_tran[dev] + action.idle);

    const int handle = (action.device - 1) + (action.idle > 0.0 ? static_cast<int>(kDevices) : 0);
    return ActionChoice{value, handle};
}

ActionEval TaskNetworkScenario::evaluate_action(std::span<const double> eta, int action) const {
    const TaskInfo info = unpack(eta);
    const PolicyOutcome outcome = evaluate(info, decode(action), config_);
    ActionEval eval;
    eval.t = outcome.frame_length;
    eval.y = outcome.penalties;
    return eval;
}

PolicyOutcome TaskNetworkScenario::realize(std::span<const double> eta, int action,
                                           std::uint64_t frame, Rng& rng) const {
    (void)rng; // outcome is a deterministic function of the observation
    return evaluate(unpack(eta), decode(action), config_, frame);
}

std::optional<ThetaBracket> TaskNetworkScenario::bracket_hint(
    const ObjectiveWeights& weights) const {
    // θ* is never below the best quality rate −5·v and never above triple the
    // total queue weight (processing energy per unit time is at most 2.5·p
    // per frame of length >= 1).  Degenerate at v = 0 with empty queues, so
    // pad the top; bracket repair would also recover from a bad guess.
    ThetaBracket bracket;
    bracket.lo = -5.0 * weights.v;
    bracket.hi = 0.0;
    for (double w : weights.z) bracket.hi += 3.0 * w;
    if (bracket.hi - bracket.lo < 1.0) bracket.hi = bracket.lo + 1.0;
    return bracket;
}

void TaskNetworkScenario::action_values(std::span<const double> eta, int action,
                                        std::vector<double>& out) const {
    (void)eta;
    const TaskAction decoded = decode(action);
    out.assign({static_cast<double>(decoded.device), decoded.idle});
}

} // namespace renewal
