#include "renewal/utility_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace renewal {

namespace {

constexpr double kFlatTol = 1e-12; // relative plateau tolerance for tie resolution

double scale_of(double value) { return 1.0 + std::fabs(value); }

// Three-point midpoint test along a segment; cheap guard against convex
// inputs slipping in under a concave declaration.
void spot_check_concavity(const UtilityFunction& util, const Rectangle& box) {
    const std::size_t m = box.size();
    std::vector<double> a(m), b(m), mid(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = box[i].lo;
        b[i] = box[i].hi;
        mid[i] = 0.5 * (a[i] + b[i]);
    }
    const double fa = util(a);
    const double fb = util(b);
    const double fm = util(mid);
    if (fm < 0.5 * (fa + fb) - 1e-9 * scale_of(fm)) {
        throw DomainError("choose_aux: utility fails a concavity check");
    }
}

} // namespace

UtilityFunction identity_sum_utility(std::size_t m) {
    UtilityFunction util;
    util.evaluate = [](std::span<const double> g) {
        double acc = 0.0;
        for (double v : g) acc += v;
        return acc;
    };
    util.separable_parts.assign(m, [](double v) { return v; });
    return util;
}

UtilityFunction log1p_utility(std::size_t m) {
    UtilityFunction util;
    util.evaluate = [](std::span<const double> g) {
        double acc = 0.0;
        for (double v : g) acc += std::log1p(v);
        return acc;
    };
    util.separable_parts.assign(m, [](double v) { return std::log1p(v); });
    return util;
}

UtilityFunction min_linear_utility(std::vector<std::vector<double>> coeffs,
                                   std::vector<double> offsets) {
    if (coeffs.empty() || coeffs.size() != offsets.size()) {
        throw ConfigError("min_linear_utility: need one offset per coefficient row");
    }
    const std::size_t m = coeffs.front().size();
    bool monotone = true;
    for (const auto& row : coeffs) {
        if (row.size() != m) throw ConfigError("min_linear_utility: ragged coefficient rows");
        for (double c : row) monotone = monotone && c >= 0.0;
    }
    UtilityFunction util;
    util.monotone_nondecreasing = monotone;
    util.evaluate = [coeffs = std::move(coeffs),
                     offsets = std::move(offsets)](std::span<const double> g) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            double piece = offsets[k];
            for (std::size_t i = 0; i < g.size(); ++i) piece += coeffs[k][i] * g[i];
            best = std::min(best, piece);
        }
        return best;
    };
    if (m == 1) {
        // One-dimensional utilities are trivially separable.
        auto whole = util.evaluate;
        util.separable_parts.assign(1, [whole](double v) {
            const double arg[1] = {v};
            return whole(std::span<const double>(arg, 1));
        });
    }
    return util;
}

UtilityFunction neg_square_utility(std::size_t m) {
    UtilityFunction util;
    util.monotone_nondecreasing = false;
    util.evaluate = [](std::span<const double> g) {
        double acc = 0.0;
        for (double v : g) acc -= v * v;
        return acc;
    };
    util.separable_parts.assign(m, [](double v) { return -v * v; });
    return util;
}

double concave_max_1d(const std::function<double(double)>& f, double lo, double hi) {
    if (!f) throw ConfigError("concave_max_1d: missing function");
    if (!(lo <= hi)) throw DomainError("concave_max_1d: empty interval");
    if (hi - lo < 1e-15 * scale_of(lo)) return hi;

    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    const double width_tol = 1e-13 * (1.0 + std::fabs(lo) + std::fabs(hi));
    for (int iter = 0; iter < 200 && (b - a) > width_tol; ++iter) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else { // ties drift right, toward the largest maximizer
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    const double plateau = fx - kFlatTol * scale_of(fx);

    // Concavity makes "f >= plateau" an interval; slide to its right edge so
    // flat stretches (linear pieces) resolve to the largest maximizer.
    if (f(hi) >= plateau) return hi;
    double rlo = x, rhi = hi;
    for (int iter = 0; iter < 120 && (rhi - rlo) > width_tol; ++iter) {
        const double mid = 0.5 * (rlo + rhi);
        if (f(mid) >= plateau) {
            rlo = mid;
        } else {
            rhi = mid;
        }
    }
    // The left endpoint can still win when f is strictly decreasing.
    if (f(lo) > f(rlo) + kFlatTol * scale_of(fx)) return lo;
    return rlo;
}

std::vector<double> choose_aux(std::span<const double> g, double v, const UtilityFunction& util,
                               const Rectangle& box) {
    if (box.empty()) throw CapabilityError("choose_aux: no attribute processes");
    if (g.size() != box.size()) throw ConfigError("choose_aux: weight/box length mismatch");
    if (!util.evaluate) throw ConfigError("choose_aux: utility has no evaluator");
    if (!(v >= 0.0)) throw DomainError("choose_aux: v must be >= 0");
    for (const Interval& iv : box) {
        if (!(iv.lo <= iv.hi)) throw ConfigError("choose_aux: malformed box");
    }
    if (!util.monotone_nondecreasing) {
        throw DomainError("choose_aux: utility must be coordinate-wise non-decreasing");
    }
    spot_check_concavity(util, box);

    const std::size_t m = box.size();
    if (util.separable_parts.size() == m) {
        std::vector<double> gamma(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& phi = util.separable_parts[i];
            const double weight = g[i];
            gamma[i] = concave_max_1d(
                [&phi, v, weight](double x) { return v * phi(x) - weight * x; }, box[i].lo,
                box[i].hi);
        }
        return gamma;
    }

    // Joint objective for the non-separable path.
    const auto objective = [&](std::span<const double> gamma) {
        double acc = v * util(gamma);
        for (std::size_t i = 0; i < m; ++i) acc -= g[i] * gamma[i];
        return acc;
    };

    std::vector<double> best;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> gamma(m);
    constexpr int kStarts = 8;
    constexpr int kMaxCoordinateSteps = 10000;
    for (int s = 0; s < kStarts; ++s) {
        for (std::size_t i = 0; i < m; ++i) {
            if (s == 0) {
                gamma[i] = 0.5 * (box[i].lo + box[i].hi);
            } else {
                // Corner pattern: bit i of (s-1) selects the high edge.
                gamma[i] = (((s - 1) >> (i % 7)) & 1) ? box[i].hi : box[i].lo;
            }
        }
        double value = objective(gamma);
        int steps = 0;
        bool improved = true;
        while (improved && steps < kMaxCoordinateSteps) {
            improved = false;
            for (std::size_t i = 0; i < m && steps < kMaxCoordinateSteps; ++i, ++steps) {
                const double before = gamma[i];
                gamma[i] = concave_max_1d(
                    [&](double x) {
                        gamma[i] = x;
                        const double val = objective(gamma);
                        gamma[i] = before;
                        return val;
                    },
                    box[i].lo, box[i].hi);
                const double candidate = objective(gamma);
                if (candidate > value + 1e-9 * scale_of(value)) {
                    value = candidate;
                    improved = true;
                } else if (candidate < value) {
                    gamma[i] = before; // keep the better iterate
                }
            }
        }
        const bool tie =
            !best.empty() && std::fabs(value - best_value) <= kFlatTol * scale_of(best_value);
        if (best.empty() || value > best_value + kFlatTol * scale_of(best_value) ||
            (tie && gamma > best)) { // largest γ wins ties (lexicographic)
            best_value = value;
            best = gamma;
        }
    }
    return best;
}

std::pair<double, double> jensen_gap(std::span<const double> t,
                                     std::span<const std::vector<double>> gammas,
                                     const UtilityFunction& util) {
    if (t.empty() || t.size() != gammas.size()) {
        throw DomainError("jensen_gap: need matching, non-empty samples");
    }
    if (!util.evaluate) throw ConfigError("jensen_gap: utility has no evaluator");
    const std::size_t m = gammas.front().size();
    std::vector<double> mean(m, 0.0);
    double sum_t = 0.0;
    double sum_t_phi = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw DomainError("jensen_gap: frame lengths must be positive");
        if (gammas[i].size() != m) throw DomainError("jensen_gap: ragged gamma samples");
        sum_t += t[i];
        sum_t_phi += t[i] * util(gammas[i]);
        for (std::size_t j = 0; j < m; ++j) mean[j] += t[i] * gammas[i][j];
    }
    for (double& v : mean) v /= sum_t;
    return {sum_t_phi / sum_t, util(mean)};
}

double d_envelope(const BoundsConfig& bounds, const ConstraintTargets& targets) {
    double acc = constraint_drift_envelope(bounds, targets);
    const Rectangle box = bounds.rectangle();
    for (std::size_t mth = 0; mth < box.size(); ++mth) {
        double worst = 0.0;
        for (double t : {bounds.t_min, bounds.t_max}) {
            for (double gamma : {box[mth].lo, box[mth].hi}) {
                for (double x : {bounds.x_min[mth], bounds.x_max[mth]}) {
                    const double drift = t * gamma - x;
                    worst = std::max(worst, drift * drift);
                }
            }
        }
        acc += 0.5 * worst;
    }
    return acc;
}

UtilityEngine::UtilityEngine(const Scenario& scenario, const UtilityFunction& util,
                             const UtilityConfig& config)
    : scenario_(scenario), util_(util), config_(config), rng_(config.seed) {
    if (scenario_.attribute_count() == 0) {
        throw CapabilityError("UtilityEngine: scenario has no attribute processes");
    }
    if (config_.sample_window == 0) throw ConfigError("UtilityEngine: sample_window must be >= 1");
    if (!(config_.v > 0.0)) throw ConfigError("UtilityEngine: v must be positive");
    bank_.z.assign(scenario_.constraint_count(), 0.0);
    bank_.g.assign(scenario_.attribute_count(), 0.0);
    bank_.targets = scenario_.targets();
    ledger_ = MetricsLedger(scenario_.constraint_count() + 1, scenario_.attribute_count());
    box_ = scenario_.bounds().rectangle();
    sum_t_gamma_.assign(scenario_.attribute_count(), 0.0);
    ring_.resize(config_.sample_window);
    sample_views_.reserve(config_.sample_window + 1);
    // Fail fast on unusable utilities rather than in the middle of a run.
    choose_aux(bank_.g, config_.v, util_, box_);
}

void UtilityEngine::push_sample() {
    ring_[ring_head_] = eta_;
    ring_head_ = (ring_head_ + 1) % ring_.size();
    ring_count_ = std::min(ring_count_ + 1, ring_.size());
}

FrameResult UtilityEngine::step() {
    scenario_.sample_eta(rng_, eta_);

    sample_views_.clear();
    const std::size_t w = ring_.size();
    for (std::size_t i = 0; i < ring_count_; ++i) {
        sample_views_.push_back(ring_[(ring_head_ + w - ring_count_ + i) % w]);
    }
    if (ring_count_ < w) sample_views_.push_back(eta_); // warm-up: current observation too

    FrameResult result;
    result.gamma = choose_aux(bank_.g, config_.v, util_, box_);

    const FractionalInstance instance =
        utility_policy_instance(scenario_, sample_views_, bank_.z, bank_.g);
    const ObjectiveWeights weights{0.0, bank_.z, bank_.g};
    const ThetaBracket bracket = default_bracket(weights, scenario_.bounds());
    BisectionConfig solver = config_.bisection;
    solver.theta_lo = bracket.lo;
    solver.theta_hi = bracket.hi;
    const BisectionResult root = bisect(instance, solver);

    const ActionChoice choice = scenario_.min_weighted(eta_, weights, root.theta_star);
    scenario_.action_values(eta_, choice.action, result.action_values);
    PolicyOutcome outcome = scenario_.realize(eta_, choice.action, frame_, rng_);

    bank_ = update_z(std::move(bank_), outcome);
    bank_ = update_g(std::move(bank_), outcome, result.gamma, &box_);
    ledger_.record(outcome);
    for (std::size_t mth = 0; mth < sum_t_gamma_.size(); ++mth) {
        sum_t_gamma_[mth] += outcome.frame_length * result.gamma[mth];
    }
    sum_t_phi_ += outcome.frame_length * util_(result.gamma);
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
