#include "renewal/alt_engine.hpp"

namespace renewal {

ThetaTracker update_theta(ThetaTracker tracker, const PolicyOutcome& outcome) {
    if (!(outcome.frame_length > 0.0)) {
        throw DomainError("update_theta: frame length must be positive");
    }
    if (!(tracker.decay > 0.0) || tracker.decay > 1.0) {
        throw ConfigError("update_theta: decay must be in (0, 1]");
    }
    tracker.sum_y0 = tracker.decay * tracker.sum_y0 + outcome.penalties.at(0);
    tracker.sum_t = tracker.decay * tracker.sum_t + outcome.frame_length;
    tracker.theta = tracker.sum_y0 / tracker.sum_t;
    ++tracker.frames;
    return tracker;
}

namespace {

// Both variants are the weighted minimization with the frame length credited
// at a fixed rate: Σ z_l·c_l for the expectation form, plus v·θ for the
// time-average form.
ActionChoice select_with_credit(const Scenario& scenario, std::span<const double> eta,
                                std::span<const double> z, double v, double extra_credit) {
    if (z.size() != scenario.constraint_count()) {
        throw ConfigError("alt engine: weight length != constraint count");
    }
    const ConstraintTargets& targets = scenario.targets();
    double credit = extra_credit;
    for (std::size_t l = 0; l < z.size(); ++l) credit += z[l] * targets.c[l];
    return scenario.min_weighted(eta, ObjectiveWeights{v, z, {}}, credit);
}

} // namespace

ActionChoice alt_form_select(const Scenario& scenario, std::span<const double> eta,
                             std::span<const double> z, double v) {
    return select_with_credit(scenario, eta, z, v, 0.0);
}

ActionChoice alt_timeavg_select(const Scenario& scenario, std::span<const double> eta,
                                std::span<const double> z, double v, double theta) {
    return select_with_credit(scenario, eta, z, v, v * theta);
}

AltEngine::AltEngine(const Scenario& scenario, const AltConfig& config, Mode mode)
    : scenario_(scenario), config_(config), mode_(mode), rng_(config.seed) {
    if (!(config_.v >= 0.0)) throw ConfigError("AltEngine: v must be >= 0");
    if (!(config_.theta_decay > 0.0) || config_.theta_decay > 1.0) {
        throw ConfigError("AltEngine: theta_decay must be in (0, 1]");
    }
    bank_.z.assign(scenario_.constraint_count(), 0.0);
    bank_.targets = scenario_.targets();
    ledger_ = MetricsLedger(scenario_.constraint_count() + 1, scenario_.attribute_count());
    tracker_.decay = config_.theta_decay;
}

FrameResult AltEngine::step() {
    scenario_.sample_eta(rng_, eta_);

    const double theta_used = tracker_.theta; // θ[r], before this frame lands
    const ActionChoice choice =
        mode_ == Mode::Form
            ? alt_form_select(scenario_, eta_, bank_.z, config_.v)
            : alt_timeavg_select(scenario_, eta_, bank_.z, config_.v, theta_used);

    FrameResult result;
    scenario_.action_values(eta_, choice.action, result.action_values);
    PolicyOutcome outcome = scenario_.realize(eta_, choice.action, frame_, rng_);
    bank_ = update_z(std::move(bank_), outcome);
    if (mode_ == Mode::TimeAverage) tracker_ = update_theta(tracker_, outcome);
    ledger_.record(outcome);
    ++frame_;

    result.outcome = std::move(outcome);
    result.theta = theta_used;
    result.action = choice.action;
    result.inf_value = choice.value;
    return result;
}

} // namespace renewal
