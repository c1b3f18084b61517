// Acceptance suite: end-to-end checks of the toolkit against its reference
// operating points, deterministic guarantees, and reproducibility contract.
// Prints one line per criterion and exits nonzero if any of them fails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "renewal/alt_engine.hpp"
#include "renewal/dpp_engine.hpp"
#include "renewal/experiment.hpp"
#include "renewal/finite_scenario.hpp"
#include "renewal/oracle.hpp"
#include "renewal/scenario_factory.hpp"
#include "renewal/task_network.hpp"
#include "renewal/utility_engine.hpp"

namespace {

using namespace renewal;

struct Failure {
    std::string detail;
};

std::string num(double value) {
    std::ostringstream out;
    out << std::setprecision(6) << value;
    return out.str();
}

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

void in_band(const std::string& label, double value, double lo, double hi) {
    require(value >= lo && value <= hi,
            label + " = " + num(value) + " outside [" + num(lo) + ", " + num(hi) + "]");
}

ScenarioBundle task_bundle(double i_max) {
    return make_scenario(nlohmann::json{
        {"name", "task-network"}, {"p_tran", 1.0}, {"i_max", i_max}, {"constraint", 0.25}});
}

ExperimentConfig task_config(std::size_t w, std::uint64_t frames, std::uint64_t seed,
                             Algorithm algorithm = Algorithm::DppRatio) {
    ExperimentConfig config;
    config.algorithm = algorithm;
    config.frames = frames;
    config.v = 100.0;
    config.sample_window = w;
    config.seed = seed;
    return config;
}

// A = (y0 1, y1 1, T 1), B = (4, 0, 2), c = 0.5: best feasible ratio 1.5,
// best per-frame objective 2, both attained by the two-thirds-A mixture.
std::vector<PurePolicy> ab_points() {
    std::vector<PurePolicy> points;
    points.push_back({{1.0, 1.0}, {}, 1.0});
    points.push_back({{4.0, 0.0}, {}, 2.0});
    return points;
}

// P1 = (y1 1, x 3, T 1), P2 = (0, 1, 2), c = 0.5: best feasible attribute
// rate 1.75 at the two-thirds-P1 mixture.
std::vector<PurePolicy> attribute_points() {
    std::vector<PurePolicy> points;
    points.push_back({{0.0, 1.0}, {3.0}, 1.0});
    points.push_back({{0.0, 0.0}, {1.0}, 2.0});
    return points;
}

constexpr std::uint64_t kLongRun = 1000000;
constexpr double kUtilityLo = 0.843;
constexpr double kUtilityHi = 0.863;

/// Long runs several criteria share, built on first use.
struct SharedRuns {
    ScenarioBundle tasknet = task_bundle(5.0);
    std::map<std::size_t, RunSummary> by_window; // dpp-ratio, V=100, 10^6, seed 1

    const RunSummary& window_run(std::size_t w) {
        auto it = by_window.find(w);
        if (it == by_window.end()) {
            it = by_window.emplace(w, run_experiment(*tasknet.scenario, task_config(w, kLongRun, 1)))
                     .first;
        }
        return it->second;
    }
};

SharedRuns& shared_runs() {
    static SharedRuns instance;
    return instance;
}

std::string check_operating_point() {
    const RunSummary& run = shared_runs().window_run(10);
    in_band("utility", run.utility, kUtilityLo, kUtilityHi);
    in_band("T_bar", run.t_bar, 3.14, 3.22);
    in_band("idle_bar", run.idle_bar, 1.38, 1.46);
    in_band("y0_bar", run.y0_bar, -2.75, -2.67);
    return "utility " + num(run.utility) + ", T_bar " + num(run.t_bar) + ", idle_bar " +
           num(run.idle_bar) + ", y0_bar " + num(run.y0_bar);
}

std::string check_constraint_satisfaction() {
    const RunSummary& run = shared_runs().window_run(10);
    require(run.constraint_ratios.size() == 5, "expected five constraint ratios");
    double lo = run.constraint_ratios[1], hi = lo;
    for (std::size_t l = 1; l < 5; ++l) { // devices 2..5: budget tight
        in_band("device " + std::to_string(l + 1) + " power rate", run.constraint_ratios[l],
                0.245, 0.2505);
        lo = std::min(lo, run.constraint_ratios[l]);
        hi = std::max(hi, run.constraint_ratios[l]);
    }
    in_band("device 1 power rate", run.constraint_ratios[0], 0.172, 0.192); // slack
    return "device 1 rate " + num(run.constraint_ratios[0]) + ", devices 2-5 in [" + num(lo) +
           ", " + num(hi) + "]";
}

std::string check_window_sweep() {
    const RunSummary alt = run_experiment(
        *shared_runs().tasknet.scenario, task_config(1, kLongRun, 1, Algorithm::AltTimeavg));
    std::string utilities;
    for (std::size_t w : {1, 2, 5, 10, 20}) {
        const RunSummary& run = shared_runs().window_run(w);
        require(std::fabs(run.utility - alt.utility) <= 0.01,
                "W=" + std::to_string(w) + " utility " + num(run.utility) +
                    " differs from time-average " + num(alt.utility) + " by more than 0.01");
        require(alt.utility >= run.utility - 0.002,
                "time-average utility " + num(alt.utility) + " undercuts W=" +
                    std::to_string(w) + " utility " + num(run.utility) + " by more than 0.002");
        utilities += (utilities.empty() ? "" : " ") + num(run.utility);
    }
    return "W {1,2,5,10,20} utilities " + utilities + "; time-average " + num(alt.utility);
}

std::string check_deterministic_backlog() {
    const TaskNetConfig config{1.0, 11.0, 0.25};
    const DeterministicBound guarantee = deterministic_bound_check(config, 100.0);
    require(guarantee.enabled, "bound should be enabled at idle allowance 11");
    require(guarantee.bound == 1002.75, "bound constant should be exactly 1002.75");

    const ScenarioBundle roomy = task_bundle(11.0);
    const RunSummary run = run_experiment(*roomy.scenario, task_config(10, kLongRun, 1));
    double peak = 0.0;
    for (double z : run.peak_z) {
        require(z <= guarantee.bound,
                "peak backlog " + num(z) + " exceeds the deterministic bound 1002.75");
        peak = std::max(peak, z);
    }
    for (const CheckpointRecord& record : run.checkpoints) {
        const double slack = (10.0 * 100.0 + 2.75) / static_cast<double>(record.frame);
        for (std::size_t l = 0; l < record.ratios.constraints.size(); ++l) {
            require(record.ratios.constraints[l] <= 0.25 + slack,
                    "constraint rate at frame " + std::to_string(record.frame) +
                        " exceeds 0.25 + " + num(slack));
        }
    }
    return "peak backlog " + num(peak) + " <= 1002.75 across 10^6 frames";
}

std::string check_reference_optima() {
    const FinitePolicySystem ab{ab_points(), ConstraintTargets{{0.5}}};
    const FinitePolicySystem attr{attribute_points(), ConstraintTargets{{0.5}}};

    const OracleResult ratio_opt = oracle_ratio_opt(ab);
    require(ratio_opt.feasible && std::fabs(ratio_opt.value - 1.5) <= 1e-8,
            "reference ratio optimum should be 1.5, got " + num(ratio_opt.value));
    const OracleResult y0_opt = oracle_y0_opt(ab);
    require(y0_opt.feasible && std::fabs(y0_opt.value - 2.0) <= 1e-8,
            "reference per-frame optimum should be 2, got " + num(y0_opt.value));
    const OracleResult util_opt = oracle_util_opt(attr, identity_sum_utility(1), 600);
    require(util_opt.feasible && std::fabs(util_opt.value - 1.75) <= 1e-8,
            "reference utility optimum should be 1.75, got " + num(util_opt.value));

    const double v = 200.0;
    const std::uint64_t frames = 100000;
    const FiniteScenario ab_scenario("ab", ab_points(), ConstraintTargets{{0.5}});
    const FiniteScenario attr_scenario("attr", attribute_points(), ConstraintTargets{{0.5}});

    ExperimentConfig config;
    config.frames = frames;
    config.v = v;
    config.sample_window = 1;
    config.seed = 11;

    const double b_const =
        constraint_drift_envelope(ab_scenario.bounds(), ab_scenario.targets());
    config.algorithm = Algorithm::DppRatio;
    const RunSummary ratio_run = run_experiment(ab_scenario, config);
    require(ratio_run.objective_ratio <= 1.5 + b_const / 1.0 / v + 0.02,
            "ratio engine objective " + num(ratio_run.objective_ratio) +
                " misses the 1.5 optimum envelope");
    require(ratio_run.constraint_ratios[0] <= 0.51,
            "ratio engine constraint " + num(ratio_run.constraint_ratios[0]) + " exceeds 0.51");

    config.algorithm = Algorithm::AltForm;
    const RunSummary form_run = run_experiment(ab_scenario, config);
    require(form_run.y0_bar <= 2.0 + b_const / v + 0.02,
            "expectation-form objective " + num(form_run.y0_bar) +
                " misses the per-frame optimum envelope");
    require(form_run.constraint_ratios[0] <= 0.51,
            "expectation-form constraint " + num(form_run.constraint_ratios[0]) +
                " exceeds 0.51");

    config.algorithm = Algorithm::Utility;
    const UtilityFunction util = identity_sum_utility(1);
    const RunSummary util_run = run_experiment(attr_scenario, config, &util);
    const double d_const = d_envelope(attr_scenario.bounds(), attr_scenario.targets());
    require(util_run.utility >= util_opt.value - d_const / (v * 1.0) - 0.02,
            "utility engine value " + num(util_run.utility) +
                " misses the 1.75 optimum envelope");
    require(util_run.constraint_ratios[0] <= 0.51,
            "utility engine constraint " + num(util_run.constraint_ratios[0]) +
                " exceeds 0.51");

    return "ratio " + num(ratio_run.objective_ratio) + " vs 1.5, per-frame " +
           num(form_run.y0_bar) + " vs 2, utility " + num(util_run.utility) + " vs 1.75";
}

std::string check_solver_properties() {
    Rng rng(909);
    const double tolerance = 1e-6;
    int max_iterations_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0.0, 6.0));
        std::vector<std::pair<double, double>> points(n);
        double b_min = 1e300, b_max = 0.0, ratio_lo = 1e300, ratio_hi = -1e300;
        for (auto& [a, b] : points) {
            a = rng.uniform(-8.0, 8.0);
            b = rng.uniform(0.5, 4.0);
            b_min = std::min(b_min, b);
            b_max = std::max(b_max, b);
            ratio_lo = std::min(ratio_lo, a / b);
            ratio_hi = std::max(ratio_hi, a / b);
        }

        FractionalInstance instance;
        instance.b_min = b_min;
        instance.b_max = b_max;
        instance.evaluate_inf = [points](double theta) {
            ActionChoice best{1e300, -1};
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double value = points[i].first - theta * points[i].second;
                if (value < best.value) best = ActionChoice{value, static_cast<int>(i)};
            }
            return best;
        };

        const double optimum = pure_policy_ratio_opt(points);
        BisectionConfig config;
        config.theta_lo = ratio_lo - 1.0;
        config.theta_hi = ratio_hi + 1.0;
        config.tolerance = tolerance;
        const BisectionResult root = bisect(instance, config);
        require(root.bracket_valid, "bracket should validate on trial " + std::to_string(trial));
        require(std::fabs(root.theta_star - optimum) <= tolerance,
                "root " + num(root.theta_star) + " misses the pure-policy optimum " +
                    num(optimum));
        const double range = (ratio_hi + 1.0) - (ratio_lo - 1.0);
        const int budget = static_cast<int>(std::ceil(std::log2(range / tolerance))) + 32;
        require(root.iterations <= budget,
                std::to_string(root.iterations) + " halving steps exceed the budget " +
                    std::to_string(budget));
        max_iterations_seen = std::max(max_iterations_seen, root.iterations);

        // Sign pattern around the root, and bounded-slope monotonicity.
        const double delta = 1e-3;
        require(instance.evaluate_inf(optimum - delta).value >= 0.0,
                "value below the root should be non-negative");
        require(instance.evaluate_inf(optimum + delta).value <= 0.0,
                "value above the root should be non-positive");
        const double theta1 = rng.uniform(ratio_lo - 2.0, ratio_hi + 2.0);
        const double step = rng.uniform(0.1, 1.0);
        const double drop =
            instance.evaluate_inf(theta1).value - instance.evaluate_inf(theta1 + step).value;
        require(drop >= b_min * step - 1e-9 && drop <= b_max * step + 1e-9,
                "value slope " + num(drop / step) + " left [b_min, b_max]");
    }
    return "1000 random instances; root error <= 1e-6, max " +
           std::to_string(max_iterations_seen) + " halving steps";
}

std::string check_utility_interchange() {
    Rng rng(707);
    const std::vector<UtilityFunction> shapes = {
        neg_square_utility(2), log1p_utility(2),
        min_linear_utility({{1.0, 0.5}, {0.25, 2.0}}, {0.0, 1.0})};
    for (const UtilityFunction& shape : shapes) {
        for (int batch = 0; batch < 500; ++batch) { // 10^4 draws per shape
            std::vector<double> t(20);
            std::vector<std::vector<double>> gammas(20, std::vector<double>(2));
            for (std::size_t i = 0; i < t.size(); ++i) {
                t[i] = rng.uniform(0.5, 3.0);
                gammas[i][0] = rng.uniform(0.0, 4.0);
                gammas[i][1] = rng.uniform(0.0, 4.0);
            }
            const auto [lhs, rhs] = jensen_gap(t, gammas, shape);
            require(lhs <= rhs + 1e-12, "time-weighted utility " + num(lhs) +
                                            " exceeds utility of the mean " + num(rhs));
        }
        for (int batch = 0; batch < 32; ++batch) { // constant draws: equality
            const std::vector<double> point = {rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0)};
            std::vector<double> t(8);
            for (double& ti : t) ti = rng.uniform(0.5, 3.0);
            const std::vector<std::vector<double>> constant(8, point);
            const auto [lhs, rhs] = jensen_gap(t, constant, shape);
            require(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(rhs)),
                    "constant draws should give equality, gap " + num(rhs - lhs));
        }
    }
    return "3 concave shapes x 10^4 draws within 1e-12; equality on constant draws";
}

std::string check_queue_laws() {
    // Every-frame laws, verified directly against running sums.
    DppConfig engine_config;
    engine_config.v = 100.0;
    engine_config.frames = 100000;
    engine_config.seed = 4;
    engine_config.sample_window = 10;
    DppEngine engine(*shared_runs().tasknet.scenario, engine_config);
    const ConstraintTargets& targets = shared_runs().tasknet.scenario->targets();
    std::vector<double> drift(5, 0.0);
    for (std::uint64_t r = 0; r < engine_config.frames; ++r) {
        const FrameResult result = engine.step();
        for (std::size_t l = 0; l < 5; ++l) {
            drift[l] += result.outcome.penalties[l + 1] - targets.c[l] * result.outcome.frame_length;
            const double z = engine.queues().z[l];
            require(z >= 0.0, "queue went negative at frame " + std::to_string(r));
            require(z + 1e-9 * (1.0 + std::fabs(drift[l]) + z) >= drift[l],
                    "queue fell below its accumulated drift at frame " + std::to_string(r));
        }
    }

    // Scaled backlog decays across the decade checkpoints of the long run.
    const RunSummary& run = shared_runs().window_run(10);
    const std::vector<std::uint64_t> frames_of_interest = {1000, 10000, 100000, 1000000};
    std::vector<const CheckpointRecord*> records;
    for (const CheckpointRecord& record : run.checkpoints) {
        if (std::find(frames_of_interest.begin(), frames_of_interest.end(), record.frame) !=
            frames_of_interest.end()) {
            records.push_back(&record);
        }
    }
    require(records.size() == 4, "long run should checkpoint every decade");
    // A queue whose constraint is slack drains to zero and then bounces
    // regeneratively, so strict scaled decrease only applies while the
    // absolute backlog sits above an idle band of ten one-frame increments.
    const BoundsConfig& net_bounds = shared_runs().tasknet.scenario->bounds();
    double first_scaled = 0.0, last_scaled = 0.0;
    for (std::size_t l = 0; l < 5; ++l) {
        const double step = std::max(0.0, net_bounds.y_max[l + 1] - targets.c[l] * net_bounds.t_min);
        const double idle_band = 10.0 * step;
        for (std::size_t i = 0; i + 1 < records.size(); ++i) {
            if (records[i]->z[l] <= idle_band && records[i + 1]->z[l] <= idle_band) continue;
            const double prev = records[i]->z[l] / static_cast<double>(records[i]->frame);
            const double next = records[i + 1]->z[l] / static_cast<double>(records[i + 1]->frame);
            require(next < prev, "scaled backlog rose between checkpoints " +
                                     std::to_string(records[i]->frame) + " and " +
                                     std::to_string(records[i + 1]->frame));
        }
        first_scaled = std::max(first_scaled, records.front()->z[l] / 1000.0);
        last_scaled = std::max(last_scaled, records.back()->z[l] / 1000000.0);
    }

    // Attribute queues: scaled backlog vanishes on the synthetic scenario.
    const FiniteScenario attr_scenario("attr", attribute_points(), ConstraintTargets{{0.5}});
    const UtilityFunction util = identity_sum_utility(1);
    ExperimentConfig util_config;
    util_config.algorithm = Algorithm::Utility;
    util_config.frames = 200000;
    util_config.v = 100.0;
    util_config.sample_window = 1;
    util_config.seed = 4;
    util_config.checkpoints = {1000, 10000, 100000, 200000};
    const RunSummary util_run = run_experiment(attr_scenario, util_config, &util);
    require(util_run.checkpoints.size() == 4, "utility run should keep its checkpoints");
    const BoundsConfig& attr_bounds = attr_scenario.bounds();
    const double g_step =
        std::max(0.0, attr_bounds.t_max * attr_bounds.rectangle()[0].hi - attr_bounds.x_min[0]);
    const double g_idle_band = 10.0 * g_step;
    for (std::size_t i = 0; i + 1 < util_run.checkpoints.size(); ++i) {
        const CheckpointRecord& a = util_run.checkpoints[i];
        const CheckpointRecord& b = util_run.checkpoints[i + 1];
        if (a.g[0] <= g_idle_band && b.g[0] <= g_idle_band) continue;
        const double prev = a.g[0] / static_cast<double>(a.frame);
        const double next = b.g[0] / static_cast<double>(b.frame);
        require(next < prev, "scaled attribute backlog rose between checkpoints");
    }
    const CheckpointRecord& final_record = util_run.checkpoints.back();
    const double final_scaled_g = final_record.g[0] / static_cast<double>(final_record.frame);
    require(final_scaled_g <= 0.01,
            "scaled attribute backlog " + num(final_scaled_g) + " has not vanished");

    return "max Z/R " + num(first_scaled) + " -> " + num(last_scaled) + " over 10^3..10^6; G/R " +
           num(final_scaled_g) + " at 2x10^5";
}

std::string check_reproducibility() {
    ExperimentConfig config = task_config(10, 100000, 1);
    std::ostringstream log_a, log_b;
    config.frame_log = &log_a;
    const RunSummary run_a = run_experiment(*shared_runs().tasknet.scenario, config);
    config.frame_log = &log_b;
    const RunSummary run_b = run_experiment(*shared_runs().tasknet.scenario, config);
    require(log_a.str() == log_b.str(), "per-frame logs differ between identical runs");
    require(summary_json(run_a) == summary_json(run_b),
            "summaries differ between identical runs");

    const RunSummary reseeded =
        run_experiment(*shared_runs().tasknet.scenario, task_config(10, kLongRun, 2));
    in_band("second-seed utility", reseeded.utility, kUtilityLo, kUtilityHi);
    return std::to_string(log_a.str().size()) + " log bytes identical; second seed utility " +
           num(reseeded.utility);
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
        {"task-network operating point", check_operating_point},
        {"task-network power constraints", check_constraint_satisfaction},
        {"window sweep tracks the time-average variant", check_window_sweep},
        {"deterministic backlog ceiling", check_deterministic_backlog},
        {"engines meet reference optima", check_reference_optima},
        {"bisection solver properties", check_solver_properties},
        {"time-weighted utility interchange", check_utility_interchange},
        {"queue laws and scaled backlog decay", check_queue_laws},
        {"bit-exact reproducibility", check_reproducibility},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, runner] = criteria[i];
        std::string line;
        try {
            const std::string detail = runner();
            line = "[PASS] " + std::to_string(i + 1) + " " + name;
            if (!detail.empty()) line += ": " + detail;
        } catch (const Failure& failure) {
            line = "[FAIL] " + std::to_string(i + 1) + " " + name + ": " + failure.detail;
            ++failed;
        } catch (const std::exception& error) {
            line = "[FAIL] " + std::to_string(i + 1) + " " + name + ": " + error.what();
            ++failed;
        }
        std::cout << line << "\n" << std::flush;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
