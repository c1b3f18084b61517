#include "renewal/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "renewal/alt_engine.hpp"
#include "renewal/dpp_engine.hpp"
#include "renewal/experiment.hpp"
#include "renewal/finite_scenario.hpp"
#include "renewal/oracle.hpp"
#include "renewal/task_network.hpp"

namespace renewal {

namespace {

struct Failure {
    std::string detail;
};

void expect(bool condition, const std::string& detail) {
    if (!condition) throw Failure{detail};
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// --- shared fixtures ------------------------------------------------------

// Two-point system: mixing 2/3 of the first policy is optimal for the ratio
// (value 1.5) and for the per-frame objective (value 2.0).
FinitePolicySystem two_point_system() {
    FinitePolicySystem system;
    system.points.push_back({{1.0, 1.0}, {}, 1.0});
    system.points.push_back({{4.0, 0.0}, {}, 2.0});
    system.targets.c = {0.5};
    return system;
}

FiniteScenario two_point_scenario(double noise = 0.0) {
    const FinitePolicySystem system = two_point_system();
    return FiniteScenario("two-point", system.points, system.targets, noise);
}

// Two-point system with one attribute; best feasible utility (identity) is
// (1 + 2·(2/3)) / (2 − 2/3) = 1.75 at the same 2/3 mixture.
FinitePolicySystem attribute_system() {
    FinitePolicySystem system;
    system.points.push_back({{0.0, 1.0}, {3.0}, 1.0});
    system.points.push_back({{0.0, 0.0}, {1.0}, 2.0});
    system.targets.c = {0.5};
    return system;
}

struct RandomInstance {
    std::vector<std::pair<double, double>> points; // (E[a], E[b])
    FractionalInstance instance;
    double ratio_opt = 0.0;
    double lo = 0.0, hi = 0.0; // envelope bracket
};

RandomInstance random_instance(Rng& rng) {
    RandomInstance out;
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
    out.points.reserve(n);
    double ratio_lo = 1e300, ratio_hi = -1e300;
    double b_lo = 1e300, b_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform(-10.0, 10.0);
        const double b = rng.uniform(0.5, 5.0);
        out.points.emplace_back(a, b);
        ratio_lo = std::min(ratio_lo, a / b);
        ratio_hi = std::max(ratio_hi, a / b);
        b_lo = std::min(b_lo, b);
        b_hi = std::max(b_hi, b);
    }
    out.ratio_opt = ratio_lo;
    out.lo = ratio_lo - 1.0;
    out.hi = ratio_hi + 1.0;
    auto points = out.points;
    out.instance.b_min = b_lo;
    out.instance.b_max = b_hi;
    out.instance.evaluate_inf = [points](double theta) {
        ActionChoice best{1e300, -1};
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double value = points[i].first - theta * points[i].second;
            if (value < best.value) best = ActionChoice{value, static_cast<int>(i)};
        }
        return best;
    };
    return out;
}

// --- individual checks ----------------------------------------------------

std::string check_queue_laws(const VerifyOptions& options) {
    TaskNetworkScenario scenario;
    ExperimentConfig config;
    config.algorithm = Algorithm::DppRatio;
    config.frames = options.full ? 100000 : 20000;
    config.v = 100.0;
    config.sample_window = 10;
    config.seed = options.seed;
    config.check_invariants = true; // throws InvariantViolation on a broken law
    const RunSummary summary = run_experiment(scenario, config);

    // Scaled backlog must shrink across decade checkpoints once the transient
    // climb is over.  A queue whose constraint is slack drains to zero and then
    // bounces regeneratively within a few frames' worth of drift, so strict
    // decrease only applies while the absolute backlog sits above an idle band
    // of ten one-frame increments; inside the band the queue has already
    // settled and the checkpoint value is sampling noise around empty.
    const BoundsConfig& bounds = scenario.bounds();
    const ConstraintTargets& targets = scenario.targets();
    for (std::size_t l = 0; l < scenario.constraint_count(); ++l) {
        const double step = std::max(0.0, bounds.y_max[l + 1] - targets.c[l] * bounds.t_min);
        const double idle_band = 10.0 * step;
        for (std::size_t k = 1; k < summary.checkpoints.size(); ++k) {
            const CheckpointRecord& prev = summary.checkpoints[k - 1];
            const CheckpointRecord& cur = summary.checkpoints[k];
            if (prev.frame < 1000) continue;
            if (prev.z[l] <= idle_band && cur.z[l] <= idle_band) continue;
            const double before = prev.z[l] / static_cast<double>(prev.frame);
            const double after = cur.z[l] / static_cast<double>(cur.frame);
            expect(after < before,
                   "scaled backlog rose between checkpoints: queue " + std::to_string(l + 1) +
                       " " + num(before) + " -> " + num(after));
        }
    }
    return "all checkpoint laws held over " + std::to_string(config.frames) + " frames";
}

std::string check_deterministic_backlog(const VerifyOptions& options) {
    TaskNetConfig net;
    net.i_max = 11.0; // enables the worst-case guarantee: 11 >= 1 + 10·p_tran
    TaskNetworkScenario scenario(net);
    const DeterministicBound bound = deterministic_bound_check(net, 100.0);
    expect(bound.enabled, "bound should be enabled at i_max=11");
    expect(std::fabs(bound.bound - 1002.75) < 1e-12, "bound constant should be 1002.75");

    ExperimentConfig config;
    config.frames = options.full ? 200000 : 20000;
    config.v = 100.0;
    config.sample_window = 10;
    config.seed = options.seed + 1;
    const RunSummary summary = run_experiment(scenario, config);
    for (double peak : summary.peak_z) {
        expect(peak <= bound.bound, "peak backlog " + num(peak) + " exceeded " + num(bound.bound));
    }
    return "peak backlog " + num(*std::max_element(summary.peak_z.begin(), summary.peak_z.end())) +
           " <= " + num(bound.bound);
}

std::string check_bisection_properties(const VerifyOptions& options) {
    Rng rng(options.seed + 2);
    const int cases = options.full ? 1000 : 250;
    BisectionConfig config;
    config.tolerance = 1e-6;
    config.max_iterations = 512;
    for (int i = 0; i < cases; ++i) {
        RandomInstance inst = random_instance(rng);
        config.theta_lo = inst.lo;
        config.theta_hi = inst.hi;
        const BisectionResult result = bisect(inst.instance, config);
        expect(result.bracket_valid, "bracket should validate on an envelope bracket");
        expect(std::fabs(result.theta_star - inst.ratio_opt) < config.tolerance,
               "root " + num(result.theta_star) + " vs pure optimum " + num(inst.ratio_opt));
        const double budget =
            std::ceil(std::log2((inst.hi - inst.lo) / config.tolerance)) + 32.0;
        expect(result.iterations <= budget, "iteration budget exceeded");

        // Sign pattern and monotonicity around the root.
        const double delta = 0.1 * (1.0 + std::fabs(inst.ratio_opt));
        expect(inst.instance.evaluate_inf(inst.ratio_opt - delta).value > 0.0,
               "value should be positive below the root");
        expect(inst.instance.evaluate_inf(inst.ratio_opt + delta).value < 0.0,
               "value should be negative above the root");
        const double v1 = inst.instance.evaluate_inf(inst.ratio_opt - delta).value;
        const double v2 = inst.instance.evaluate_inf(inst.ratio_opt + delta).value;
        expect(v1 - v2 >= inst.instance.b_min * 2.0 * delta - 1e-9,
               "value should decrease at least at rate b_min");
    }
    return std::to_string(cases) + " generated instances matched the pure-policy optimum";
}

std::string check_bracket_repair(const VerifyOptions& options) {
    Rng rng(options.seed + 3);
    const int cases = options.full ? 200 : 50;
    BisectionConfig config;
    config.tolerance = 1e-6;
    config.max_iterations = 512;
    for (int i = 0; i < cases; ++i) {
        RandomInstance inst = random_instance(rng);
        // Deliberately mis-bracketed: both ends on the same side of the root.
        config.theta_lo = inst.ratio_opt + 1.0 + rng.uniform(0.0, 5.0);
        config.theta_hi = config.theta_lo + rng.uniform(0.1, 2.0);
        const BisectionResult result = bisect(inst.instance, config);
        expect(result.expansions > 0, "repair should have been needed");
        expect(result.expansions <= config.max_expansions, "too many expansions");
        expect(std::fabs(result.theta_star - inst.ratio_opt) < config.tolerance,
               "root after repair " + num(result.theta_star) + " vs " + num(inst.ratio_opt));
    }
    return std::to_string(cases) + " mis-bracketed instances recovered";
}

std::string check_jensen(const VerifyOptions& options) {
    Rng rng(options.seed + 4);
    const std::size_t draws = options.full ? 10000 : 2000;
    const std::vector<UtilityFunction> utils = {
        neg_square_utility(2), log1p_utility(2),
        min_linear_utility({{1.0, 0.5}, {0.25, 2.0}}, {0.0, 1.0})};
    for (const UtilityFunction& util : utils) {
        std::vector<double> t(draws);
        std::vector<std::vector<double>> gammas(draws, std::vector<double>(2));
        for (std::size_t i = 0; i < draws; ++i) {
            t[i] = rng.uniform(0.5, 3.0);
            gammas[i][0] = rng.uniform(0.0, 4.0);
            gammas[i][1] = rng.uniform(0.0, 4.0);
        }
        const auto [lhs, rhs] = jensen_gap(t, gammas, util);
        expect(lhs <= rhs + 1e-12, "interchange violated: " + num(lhs) + " > " + num(rhs));

        // Degenerate draws: equality.
        std::vector<double> t1(16, 1.7);
        std::vector<std::vector<double>> g1(16, {1.25, 0.75});
        const auto [l1, r1] = jensen_gap(t1, g1, util);
        expect(std::fabs(l1 - r1) <= 1e-12, "equality on constant draws failed");
    }
    return "interchange held for " + std::to_string(draws) + " draws x 3 utilities";
}

std::string check_choose_aux(const VerifyOptions& options) {
    Rng rng(options.seed + 5);
    const int cases = options.full ? 60 : 20;
    const Rectangle box = {{0.0, 1.0}, {0.0, 2.0}};
    // Smooth non-separable concave utility exercising the ascent path.
    UtilityFunction log_linear;
    log_linear.evaluate = [](std::span<const double> g) {
        return std::log1p(g[0] + 2.0 * g[1]);
    };
    const std::vector<UtilityFunction> utils = {identity_sum_utility(2), log1p_utility(2),
                                                log_linear};
    std::vector<double> probe(2), weights(2);
    for (int i = 0; i < cases; ++i) {
        const UtilityFunction& util = utils[static_cast<std::size_t>(i) % utils.size()];
        const double v = rng.uniform(0.0, 50.0);
        weights[0] = rng.uniform(0.0, 50.0);
        weights[1] = rng.uniform(0.0, 50.0);
        const std::vector<double> gamma = choose_aux(weights, v, util, box);
        const auto objective = [&](std::span<const double> g) {
            return v * util(g) - weights[0] * g[0] - weights[1] * g[1];
        };
        const double achieved = objective(gamma);
        for (int probe_idx = 0; probe_idx < 1000; ++probe_idx) {
            probe[0] = rng.uniform(box[0].lo, box[0].hi);
            probe[1] = rng.uniform(box[1].lo, box[1].hi);
            expect(achieved >= objective(probe) - 1e-9,
                   "random point beat choose_aux by more than 1e-9");
        }
    }
    return std::to_string(cases) + " weightings beat 1000 random points each";
}

std::string check_oracles(const VerifyOptions&) {
    const FinitePolicySystem ab = two_point_system();
    const OracleResult ratio = oracle_ratio_opt(ab);
    expect(ratio.feasible && std::fabs(ratio.value - 1.5) < 1e-6,
           "ratio optimum should be 1.5, got " + num(ratio.value));
    const OracleResult y0 = oracle_y0_opt(ab);
    expect(y0.feasible && std::fabs(y0.value - 2.0) < 1e-6,
           "objective optimum should be 2.0, got " + num(y0.value));

    const FinitePolicySystem attr = attribute_system();
    const OracleResult util = oracle_util_opt(attr, identity_sum_utility(1), 600);
    expect(util.feasible && std::fabs(util.value - 1.75) < 2.0 / 600.0,
           "utility optimum should be 1.75, got " + num(util.value));

    // Infeasible constraints are reported, not thrown.
    FinitePolicySystem impossible = two_point_system();
    impossible.targets.c = {-1.0};
    expect(!oracle_ratio_opt(impossible).feasible, "infeasible system reported feasible");
    expect(oracle_util_opt(attribute_system(), identity_sum_utility(1), 10).feasible,
           "feasible attribute system reported infeasible");
    return "frozen reference optima reproduced (1.5, 2.0, 1.75); infeasibility reported";
}

std::string check_oracle_grid_agreement(const VerifyOptions&) {
    const FinitePolicySystem ab = two_point_system();
    const int grid = 400;
    const OracleResult exact = oracle_ratio_opt(ab);
    // Force the grid route through a system with many constraints: replicate
    // the single constraint so the vertex path is skipped.
    FinitePolicySystem wide = ab;
    for (auto& p : wide.points) p.y.insert(p.y.end(), {p.y[1], p.y[1], p.y[1]});
    wide.targets.c = {0.5, 0.5, 0.5, 0.5};
    const OracleResult approx = oracle_ratio_opt(wide, grid);
    expect(approx.feasible, "grid route reported infeasible");
    expect(std::fabs(approx.value - exact.value) <= 2.0 / grid,
           "grid " + num(approx.value) + " vs exact " + num(exact.value));
    return "grid route within 2/grid of the vertex route";
}

std::string check_engine_vs_oracle(const VerifyOptions& options) {
    const FinitePolicySystem system = two_point_system();
    const FiniteScenario scenario = two_point_scenario();
    const double v = 200.0;
    const std::uint64_t frames = options.full ? 100000 : 20000;

    ExperimentConfig config;
    config.algorithm = Algorithm::DppRatio;
    config.frames = frames;
    config.v = v;
    config.sample_window = 1;
    config.seed = options.seed + 6;
    const RunSummary dpp = run_experiment(scenario, config);
    const double b_const = constraint_drift_envelope(scenario.bounds(), scenario.targets());
    const double ratio_opt = oracle_ratio_opt(system).value;
    const double ratio_bound = ratio_opt + b_const / scenario.bounds().t_min / v + 0.02;
    expect(dpp.objective_ratio <= ratio_bound,
           "ratio " + num(dpp.objective_ratio) + " above bound " + num(ratio_bound));
    const double constraint_slack = options.full ? 0.005 : 0.015;
    expect(dpp.constraint_ratios[0] <= system.targets.c[0] + constraint_slack,
           "constraint ratio " + num(dpp.constraint_ratios[0]) + " above target + slack");

    config.algorithm = Algorithm::AltForm;
    const RunSummary alt = run_experiment(scenario, config);
    const double y0_opt = oracle_y0_opt(system).value;
    expect(alt.y0_bar <= y0_opt + b_const / v + 0.02,
           "per-frame objective " + num(alt.y0_bar) + " above bound");

    const FinitePolicySystem attr = attribute_system();
    const FiniteScenario attr_scenario("attribute", attr.points, attr.targets);
    const UtilityFunction util = identity_sum_utility(1);
    config.algorithm = Algorithm::Utility;
    const RunSummary utl = run_experiment(attr_scenario, config, &util);
    const double util_opt = oracle_util_opt(attr, util, 600).value;
    const double d_const = d_envelope(attr_scenario.bounds(), attr_scenario.targets());
    const double util_bound = util_opt - d_const / (v * attr_scenario.bounds().t_min) - 0.02;
    expect(utl.utility >= util_bound,
           "utility " + num(utl.utility) + " below bound " + num(util_bound));

    // Attribute ratios stay inside the achievable box, and the auxiliary
    // queues are mean-rate stable (scaled backlog shrinks).
    const Rectangle box = attr_scenario.bounds().rectangle();
    for (const CheckpointRecord& record : utl.checkpoints) {
        for (std::size_t m = 0; m < box.size(); ++m) {
            expect(record.ratios.attributes[m] >= box[m].lo - 1e-9 &&
                       record.ratios.attributes[m] <= box[m].hi + 1e-9,
                   "attribute ratio left its box at a checkpoint");
        }
    }
    const CheckpointRecord& prev = utl.checkpoints[utl.checkpoints.size() - 2];
    const CheckpointRecord& last = utl.checkpoints.back();
    for (std::size_t m = 0; m < last.g.size(); ++m) {
        const double early = prev.g[m] / static_cast<double>(prev.frame);
        const double late = last.g[m] / static_cast<double>(last.frame);
        expect(late < early || (early < 1e-9 && late < 1e-9),
               "auxiliary queue scaled backlog did not shrink");
    }
    return "engine averages respected the oracle envelopes at v=" + num(v);
}

std::string check_slater_stability(const VerifyOptions& options) {
    const FiniteScenario scenario = two_point_scenario(0.05); // jittered outcomes
    ExperimentConfig config;
    config.algorithm = Algorithm::DppRatio;
    config.frames = options.full ? 40000 : 10000;
    config.v = 50.0;
    config.sample_window = 4;
    config.seed = options.seed + 7;
    const RunSummary summary = run_experiment(scenario, config);
    // Strictly feasible system: the queue must not grow with the horizon.
    const CheckpointRecord& mid = summary.checkpoints[summary.checkpoints.size() / 2];
    const CheckpointRecord& last = summary.checkpoints.back();
    expect(last.z[0] <= 2.0 * (mid.z[0] + 1.0) + 100.0,
           "queue kept growing on a strictly feasible system");
    return "queue stayed bounded on a strictly feasible system";
}

std::string check_replay(const VerifyOptions& options) {
    TaskNetworkScenario scenario;
    std::ostringstream log_a, log_b;
    ExperimentConfig config;
    config.frames = 3000;
    config.v = 100.0;
    config.sample_window = 10;
    config.seed = options.seed + 8;
    config.frame_log = &log_a;
    const RunSummary a = run_experiment(scenario, config);
    config.frame_log = &log_b;
    const RunSummary b = run_experiment(scenario, config);
    expect(log_a.str() == log_b.str(), "per-frame logs diverged between identical runs");
    expect(summary_json(a) == summary_json(b), "summaries diverged between identical runs");
    return "identical configs replayed bit-for-bit (" + std::to_string(config.frames) +
           " frames)";
}

std::string check_theorem_envelopes(const VerifyOptions& options) {
    const FiniteScenario scenario = two_point_scenario();
    ExperimentConfig config;
    config.algorithm = Algorithm::DppRatio;
    config.frames = options.full ? 50000 : 20000;
    config.v = 100.0;
    config.sample_window = 1;
    config.seed = options.seed + 9;
    const RunSummary summary = run_experiment(scenario, config);

    // Rebuild the ledger from the summary ratios (sums are what the bound
    // consumes; reconstruct them from the run's averages).
    MetricsLedger ledger(scenario.constraint_count() + 1, 0);
    const double sum_t = summary.t_bar * static_cast<double>(summary.frames);
    ledger.sum_t = sum_t;
    ledger.sum_y = {summary.objective_ratio * sum_t, summary.constraint_ratios[0] * sum_t};
    ledger.frames = summary.frames;

    const DiagnosticBounds diag = make_diagnostic_bounds(
        scenario.bounds(), scenario.targets(), 0.0, oracle_ratio_opt(two_point_system()).value);
    const Theorem1Report report =
        theorem1_bounds(diag, config.v, ledger, scenario.bounds(), scenario.targets());
    expect(report.objective_ratio <= report.objective_bound,
           "measured ratio " + num(report.objective_ratio) + " above envelope " +
               num(report.objective_bound));
    for (std::size_t l = 0; l < report.constraint_ratios.size(); ++l) {
        expect(report.constraint_ratios[l] <= report.constraint_bounds[l],
               "constraint ratio above its envelope");
    }
    return "measured averages stayed inside the diagnostic envelopes";
}

} // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    const std::vector<std::pair<std::string, std::function<std::string(const VerifyOptions&)>>>
        checks = {
            {"queue-laws", check_queue_laws},
            {"deterministic-backlog-bound", check_deterministic_backlog},
            {"bisection-properties", check_bisection_properties},
            {"bracket-repair", check_bracket_repair},
            {"concavity-interchange", check_jensen},
            {"auxiliary-maximizer", check_choose_aux},
            {"reference-oracles", check_oracles},
            {"oracle-grid-agreement", check_oracle_grid_agreement},
            {"engine-vs-oracle", check_engine_vs_oracle},
            {"slater-stability", check_slater_stability},
            {"bit-exact-replay", check_replay},
            {"diagnostic-envelopes", check_theorem_envelopes},
        };
    std::vector<CheckResult> results;
    results.reserve(checks.size());
    for (const auto& [name, runner] : checks) {
        CheckResult result;
        result.name = name;
        try {
            result.detail = runner(options);
            result.pass = true;
        } catch (const Failure& failure) {
            result.detail = failure.detail;
        } catch (const std::exception& e) {
            result.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(result));
    }
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& result : results) {
        if (!result.pass) return false;
    }
    return true;
}

} // namespace renewal
