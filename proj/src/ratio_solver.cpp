#include "renewal/ratio_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace renewal {

BisectionResult bisect(const FractionalInstance& instance, const BisectionConfig& config) {
    if (!instance.evaluate_inf) throw ConfigError("bisect: missing evaluate_inf");
    if (!(instance.b_min > 0.0) || instance.b_max < instance.b_min) {
        throw ConfigError("bisect: need 0 < b_min <= b_max");
    }
    if (!(config.tolerance > 0.0)) throw ConfigError("bisect: tolerance must be positive");
    if (!(config.theta_lo < config.theta_hi)) {
        throw ConfigError("bisect: need theta_lo < theta_hi");
    }

    double lo = config.theta_lo;
    double hi = config.theta_hi;
    double f_lo = instance.evaluate_inf(lo).value;
    double f_hi = instance.evaluate_inf(hi).value;

    BisectionResult result;

    // Bracket repair: the root lies where the parametric value crosses zero;
    // push whichever side has the wrong sign outward by the current width.
    while (f_lo < 0.0 || f_hi > 0.0) {
        if (result.expansions >= config.max_expansions) {
            throw SolverError("bisect: bracket invalid after " +
                              std::to_string(result.expansions) + " expansions");
        }
        const double width = hi - lo;
        if (f_lo < 0.0) {
            lo -= width;
            f_lo = instance.evaluate_inf(lo).value;
        }
        if (f_hi > 0.0) {
            hi += width;
            f_hi = instance.evaluate_inf(hi).value;
        }
        ++result.expansions;
    }
    result.bracket_valid = true;

    while (hi - lo >= config.tolerance) {
        if (result.iterations >= config.max_iterations) {
            throw SolverError("bisect: iteration cap reached with bracket width " +
                              std::to_string(hi - lo));
        }
        const double mid = 0.5 * (lo + hi);
        const double value = instance.evaluate_inf(mid).value;
        if (value > 0.0) {
            lo = mid; // still below the root
        } else {
            hi = mid; // at or above the root (exact zero shrinks from above)
        }
        ++result.iterations;
    }

    result.theta_star = 0.5 * (lo + hi);
    const ActionChoice final_eval = instance.evaluate_inf(result.theta_star);
    result.final_value = final_eval.value;
    result.argmin_action = final_eval.action;
    return result;
}

SampledVal sampled_val(double theta, std::span<const std::span<const double>> samples,
                       const PerEtaInf& per_eta_inf) {
    if (samples.empty()) throw DomainError("sampled_val: empty sample set");
    if (!per_eta_inf) throw ConfigError("sampled_val: missing per_eta_inf");
    SampledVal out;
    out.actions.reserve(samples.size());
    double acc = 0.0;
    for (const auto& eta : samples) {
        const ActionChoice choice = per_eta_inf(eta, theta);
        acc += choice.value;
        out.actions.push_back(choice.action);
    }
    out.value = acc / static_cast<double>(samples.size());
    return out;
}

double pure_policy_ratio_opt(std::span<const std::pair<double, double>> pure_points) {
    if (pure_points.empty()) throw DomainError("pure_policy_ratio_opt: empty policy set");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : pure_points) {
        if (!(b > 0.0)) throw DomainError("pure_policy_ratio_opt: E[b] must be positive");
        best = std::min(best, a / b);
    }
    return best;
}

} // namespace renewal
