#include "renewal/dpp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace renewal {

DiagnosticBounds make_diagnostic_bounds(const BoundsConfig& bounds,
                                        const ConstraintTargets& targets, double c_approx,
                                        std::optional<double> ratio_opt_hint) {
    if (c_approx < 0.0) throw ConfigError("make_diagnostic_bounds: c_approx must be >= 0");
    DiagnosticBounds diag;
    diag.b_const = constraint_drift_envelope(bounds, targets);
    diag.c_approx = c_approx;
    diag.f1 = 2.0 * (diag.b_const + bounds.t_max * c_approx);
    diag.ratio_opt_hint = ratio_opt_hint;
    if (ratio_opt_hint) {
        diag.f2 = 2.0 * (bounds.t_max * *ratio_opt_hint - bounds.y0_min());
    }
    return diag;
}

Theorem1Report theorem1_bounds(const DiagnosticBounds& diag, double v,
                               const MetricsLedger& ledger, const BoundsConfig& bounds,
                               const ConstraintTargets& targets,
                               std::span<const double> initial_z) {
    if (!(v > 0.0)) throw DomainError("theorem1_bounds: v must be positive");
    const RatioEstimates est = ratio_estimates(ledger);
    if (!initial_z.empty() && initial_z.size() != targets.c.size()) {
        throw ConfigError("theorem1_bounds: initial_z length mismatch");
    }

    Theorem1Report report;
    report.objective_ratio = est.objective;
    const double frames = static_cast<double>(ledger.frames);
    const double t_bar = ledger.sum_t / frames;
    if (diag.ratio_opt_hint) {
        double initial_lyapunov = 0.0;
        for (double z : initial_z) initial_lyapunov += 0.5 * z * z;
        report.objective_bound = *diag.ratio_opt_hint +
                                 (diag.b_const / t_bar + diag.c_approx) / v +
                                 initial_lyapunov / (v * frames * t_bar);
    } else {
        report.objective_bound = std::numeric_limits<double>::quiet_NaN();
    }

    report.constraint_ratios = est.constraints;
    report.constraint_bounds.resize(targets.c.size());
    double initial_sq = 0.0;
    for (double z : initial_z) initial_sq += z * z;
    const double inner = (diag.f1 + v * diag.f2) / frames + initial_sq / (frames * frames);
    for (std::size_t l = 0; l < targets.c.size(); ++l) {
        report.constraint_bounds[l] = targets.c[l] + std::sqrt(std::max(inner, 0.0)) / bounds.t_min;
    }
    return report;
}

DppEngine::DppEngine(const Scenario& scenario, const DppConfig& config)
    : scenario_(scenario), config_(config), rng_(config.seed) {
    if (config_.sample_window == 0) throw ConfigError("DppEngine: sample_window must be >= 1");
    if (!(config_.v >= 0.0)) throw ConfigError("DppEngine: v must be >= 0");
    bank_.z.assign(scenario_.constraint_count(), 0.0);
    bank_.targets = scenario_.targets();
    ledger_ = MetricsLedger(scenario_.constraint_count() + 1, scenario_.attribute_count());
    ring_.resize(config_.sample_window);
    sample_views_.reserve(config_.sample_window + 1);
}

void DppEngine::push_sample() {
    ring_[ring_head_] = eta_;
    ring_head_ = (ring_head_ + 1) % ring_.size();
    ring_count_ = std::min(ring_count_ + 1, ring_.size());
}

FrameResult DppEngine::step() {
    scenario_.sample_eta(rng_, eta_);

    // Empirical objective over the last W observations, chronological order;
    // while the buffer is short the current observation joins the average so
    // frame 0 degenerates to the one-sample conditional objective.
    sample_views_.clear();
    const std::size_t w = ring_.size();
    for (std::size_t i = 0; i < ring_count_; ++i) {
        sample_views_.push_back(ring_[(ring_head_ + w - ring_count_ + i) % w]);
    }
    if (ring_count_ < w) sample_views_.push_back(eta_);

    const ObjectiveWeights weights{config_.v, bank_.z, {}};
    const FractionalInstance instance =
        dpp_ratio_objective(scenario_, sample_views_, bank_.z, config_.v);
    const ThetaBracket bracket =
        scenario_.bracket_hint(weights).value_or(default_bracket(weights, scenario_.bounds()));
    BisectionConfig solver = config_.bisection;
    solver.theta_lo = bracket.lo;
    solver.theta_hi = bracket.hi;
    const BisectionResult root = bisect(instance, solver);

    const ActionChoice choice = scenario_.min_weighted(eta_, weights, root.theta_star);
    FrameResult result;
    scenario_.action_values(eta_, choice.action, result.action_values);
    PolicyOutcome outcome = scenario_.realize(eta_, choice.action, frame_, rng_);

    bank_ = update_z(std::move(bank_), outcome);
    ledger_.record(outcome);
    push_sample();
    ++frame_;

    result.outcome = std::move(outcome);
    result.theta = root.theta_star;
    result.action = choice.action;
    result.inf_value = root.final_value;
    result.bisect_iterations = root.iterations;
    return result;
}

} // namespace renewal
