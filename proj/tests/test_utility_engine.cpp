#include <doctest.h>

#include <cmath>
#include <vector>

#include "renewal/finite_scenario.hpp"
#include "renewal/utility_engine.hpp"

using namespace renewal;

namespace {

FiniteScenario attribute_scenario(double noise = 0.0) {
    std::vector<PurePolicy> points;
    points.push_back({{0.0, 1.0}, {3.0}, 1.0});
    points.push_back({{0.0, 0.0}, {1.0}, 2.0});
    return FiniteScenario("attribute", std::move(points), ConstraintTargets{{0.5}}, noise);
}

} // namespace

TEST_CASE("utility factories evaluate and declare themselves correctly") {
    const UtilityFunction identity = identity_sum_utility(2);
    const std::vector<double> point = {1.0, 2.0};
    CHECK(identity(point) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(identity.monotone_nondecreasing);
    CHECK(identity.separable_parts.size() == 2);

    const UtilityFunction log_util = log1p_utility(1);
    const std::vector<double> e_minus_1 = {std::exp(1.0) - 1.0};
    CHECK(log_util(e_minus_1) == doctest::Approx(1.0).epsilon(1e-12));

    const UtilityFunction min_util = min_linear_utility({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
    const std::vector<double> two_three = {2.0, 3.0};
    CHECK(min_util(two_three) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(min_util.monotone_nondecreasing);
    CHECK(min_util.separable_parts.empty()); // joint min is not separable

    const UtilityFunction mixed_sign = min_linear_utility({{1.0, -1.0}}, {0.0});
    CHECK_FALSE(mixed_sign.monotone_nondecreasing);

    CHECK_THROWS_AS(min_linear_utility({}, {}), ConfigError);
    CHECK_THROWS_AS(min_linear_utility({{1.0}, {1.0, 2.0}}, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(min_linear_utility({{1.0}}, {0.0, 1.0}), ConfigError);

    const UtilityFunction square = neg_square_utility(1);
    const std::vector<double> two = {2.0};
    CHECK(square(two) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK_FALSE(square.monotone_nondecreasing);
}

TEST_CASE("largest concave maximizer on an interval") {
    // Smooth interior peak.
    const double peak = concave_max_1d([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
    CHECK(std::fabs(peak - 0.3) < 1e-5);

    // Monotone increasing: the right endpoint, exactly.
    CHECK(concave_max_1d([](double x) { return x; }, 0.0, 1.0) == 1.0);

    // Monotone decreasing: pinned to the left endpoint.
    CHECK(std::fabs(concave_max_1d([](double x) { return -x; }, 0.0, 1.0)) < 1e-9);

    // Flat top: the largest maximizer, not just any.
    CHECK(concave_max_1d([](double x) { return std::min(x, 0.4); }, 0.0, 1.0) == 1.0);
    CHECK(concave_max_1d([](double) { return 2.0; }, 0.0, 1.0) == 1.0);

    // Piecewise-linear kink.
    const double kink = concave_max_1d([](double x) { return -std::fabs(x - 0.5); }, 0.0, 1.0);
    CHECK(std::fabs(kink - 0.5) < 1e-9);

    // Degenerate interval and validation.
    CHECK(concave_max_1d([](double x) { return x; }, 0.7, 0.7) == 0.7);
    CHECK_THROWS_AS(concave_max_1d([](double x) { return x; }, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(concave_max_1d(nullptr, 0.0, 1.0), ConfigError);
}

TEST_CASE("auxiliary point maximizes v*phi - g*gamma over the box") {
    const Rectangle unit = {{0.0, 1.0}};
    const std::vector<double> no_weight = {0.0};
    const std::vector<double> heavy = {2.0};

    // Unweighted identity climbs to the top of the box, exactly.
    std::vector<double> gamma = choose_aux(no_weight, 1.0, identity_sum_utility(1), unit);
    REQUIRE(gamma.size() == 1);
    CHECK(gamma[0] == 1.0);

    // A queue weight above the slope pins it to the floor.
    gamma = choose_aux(heavy, 1.0, identity_sum_utility(1), unit);
    CHECK(std::fabs(gamma[0]) < 1e-9);

    // Interior optimum of 2*ln(1+x) - x sits at x = 1.
    const Rectangle wide = {{0.0, 3.0}};
    const std::vector<double> unit_weight = {1.0};
    gamma = choose_aux(unit_weight, 2.0, log1p_utility(1), wide);
    CHECK(std::fabs(gamma[0] - 1.0) < 1e-5);

    // Coordinates are independent for separable utilities.
    const Rectangle square = {{0.0, 1.0}, {0.0, 1.0}};
    const std::vector<double> split = {0.0, 2.0};
    gamma = choose_aux(split, 1.0, identity_sum_utility(2), square);
    CHECK(gamma[0] == 1.0);
    CHECK(std::fabs(gamma[1]) < 1e-9);
}

TEST_CASE("auxiliary point handles the joint (non-separable) path") {
    // 10*min(g1, g2) - g1 - g2 over [0,2]^2 peaks at the (2,2) corner.
    const UtilityFunction min_util = min_linear_utility({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
    const Rectangle box = {{0.0, 2.0}, {0.0, 2.0}};
    const std::vector<double> weights = {1.0, 1.0};
    const std::vector<double> gamma = choose_aux(weights, 10.0, min_util, box);
    REQUIRE(gamma.size() == 2);
    CHECK(gamma[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(gamma[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("auxiliary point validation") {
    const Rectangle unit = {{0.0, 1.0}};
    const std::vector<double> w1 = {1.0};
    CHECK_THROWS_AS(choose_aux(w1, 1.0, identity_sum_utility(1), {}), CapabilityError);
    CHECK_THROWS_AS(choose_aux(w1, 1.0, identity_sum_utility(1), {{0.0, 1.0}, {0.0, 1.0}}),
                    ConfigError);
    CHECK_THROWS_AS(choose_aux(w1, -1.0, identity_sum_utility(1), unit), DomainError);
    CHECK_THROWS_AS(choose_aux(w1, 1.0, neg_square_utility(1), unit), DomainError);
    CHECK_THROWS_AS(choose_aux(w1, 1.0, identity_sum_utility(1), {{1.0, 0.0}}), ConfigError);

    // A convex function under a concave declaration trips the spot check.
    UtilityFunction sneaky;
    sneaky.evaluate = [](std::span<const double> g) { return g[0] * g[0]; };
    const Rectangle wide = {{0.0, 2.0}};
    CHECK_THROWS_AS(choose_aux(w1, 1.0, sneaky, wide), DomainError);
}

TEST_CASE("time-weighted utility mean never beats the utility of the mean") {
    // Frozen two-sample case: ((-0) + (-4))/2 = -2 vs -(1)^2 = -1.
    const std::vector<double> t = {1.0, 1.0};
    const std::vector<std::vector<double>> gammas = {{0.0}, {2.0}};
    const auto [lhs, rhs] = jensen_gap(t, gammas, neg_square_utility(1));
    CHECK(lhs == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(rhs == doctest::Approx(-1.0).epsilon(1e-15));

    // Equality on constant draws.
    const std::vector<double> t2 = {0.5, 2.5, 1.0};
    const std::vector<std::vector<double>> constant = {{1.2}, {1.2}, {1.2}};
    const auto [le, re] = jensen_gap(t2, constant, log1p_utility(1));
    CHECK(le == doctest::Approx(re).epsilon(1e-14));

    // Random draws for each concave shape.
    Rng rng(29);
    const std::vector<UtilityFunction> utils = {
        neg_square_utility(2), log1p_utility(2),
        min_linear_utility({{1.0, 0.5}, {0.25, 2.0}}, {0.0, 1.0})};
    for (const UtilityFunction& util : utils) {
        std::vector<double> lengths(500);
        std::vector<std::vector<double>> draws(500, std::vector<double>(2));
        for (std::size_t i = 0; i < lengths.size(); ++i) {
            lengths[i] = rng.uniform(0.5, 3.0);
            draws[i][0] = rng.uniform(0.0, 4.0);
            draws[i][1] = rng.uniform(0.0, 4.0);
        }
        const auto [l, r] = jensen_gap(lengths, draws, util);
        CHECK(l <= r + 1e-12);
    }

    CHECK_THROWS_AS(jensen_gap({}, {}, neg_square_utility(1)), DomainError);
    const std::vector<double> bad_t = {0.0};
    const std::vector<std::vector<double>> one = {{1.0}};
    CHECK_THROWS_AS(jensen_gap(bad_t, one, neg_square_utility(1)), DomainError);
}

TEST_CASE("drift envelope for the utility loop adds the auxiliary corner term") {
    BoundsConfig bounds;
    bounds.t_min = 1.0;
    bounds.t_max = 2.0;
    bounds.y_min = {0.0, 0.0};
    bounds.y_max = {0.0, 1.0};
    bounds.x_min = {1.0};
    bounds.x_max = {3.0};
    const ConstraintTargets targets{{0.5}};
    // Constraint part 0.5 plus half of (2*3 - 1)^2 = 12.5.
    CHECK(d_envelope(bounds, targets) == doctest::Approx(13.0).epsilon(1e-15));
}

TEST_CASE("utility engine rejects unusable configurations") {
    const FiniteScenario scenario = attribute_scenario();
    UtilityConfig config;
    config.v = 100.0;
    config.frames = 10;
    config.sample_window = 1;
    CHECK_NOTHROW(UtilityEngine(scenario, identity_sum_utility(1), config));

    UtilityConfig zero_v = config;
    zero_v.v = 0.0;
    CHECK_THROWS_AS(UtilityEngine(scenario, identity_sum_utility(1), zero_v), ConfigError);

    UtilityConfig zero_w = config;
    zero_w.sample_window = 0;
    CHECK_THROWS_AS(UtilityEngine(scenario, identity_sum_utility(1), zero_w), ConfigError);

    // Non-monotone utilities fail fast in the constructor.
    CHECK_THROWS_AS(UtilityEngine(scenario, neg_square_utility(1), config), DomainError);

    // Attribute-free systems cannot run the utility loop.
    std::vector<PurePolicy> bare;
    bare.push_back({{1.0, 1.0}, {}, 1.0});
    const FiniteScenario no_attr("bare", std::move(bare), ConstraintTargets{{0.5}});
    CHECK_THROWS_AS(UtilityEngine(no_attr, identity_sum_utility(0), config), CapabilityError);
}

TEST_CASE("utility engine drives the attribute ratio toward the reference optimum") {
    const FiniteScenario scenario = attribute_scenario();
    UtilityConfig config;
    config.v = 100.0;
    config.frames = 6000;
    config.seed = 5;
    config.sample_window = 1;
    UtilityEngine engine(scenario, identity_sum_utility(1), config);

    const Rectangle& box = engine.box();
    for (std::uint64_t r = 0; r < config.frames; ++r) {
        const FrameResult result = engine.step();
        REQUIRE(result.gamma.size() == 1);
        CHECK(result.gamma[0] >= box[0].lo - 1e-12);
        CHECK(result.gamma[0] <= box[0].hi + 1e-12);
        CHECK(engine.queues().z[0] >= 0.0);
        CHECK(engine.queues().g[0] >= 0.0);
    }

    const RatioEstimates est = ratio_estimates(engine.ledger());
    // Best feasible attribute rate is 1.75; the engine should be near it and
    // cannot beat it by more than the residual constraint violation allows.
    CHECK(est.attributes[0] > 1.55);
    CHECK(est.attributes[0] < 1.90);
    CHECK(est.constraints[0] <=
          0.5 + engine.queues().z[0] / (static_cast<double>(config.frames) * 1.0) + 1e-9);

    // The engine's own time-weighted utility never beats the utility of its
    // time-weighted auxiliary mean.
    const double sum_t = engine.ledger().sum_t;
    const std::vector<double> mean_gamma = {engine.sum_t_gamma()[0] / sum_t};
    CHECK(engine.sum_t_phi() / sum_t <=
          identity_sum_utility(1)(mean_gamma) + 1e-12);
}

TEST_CASE("utility engine replays bit-identically for a fixed seed") {
    const FiniteScenario scenario = attribute_scenario(0.25);
    UtilityConfig config;
    config.v = 40.0;
    config.frames = 200;
    config.seed = 77;
    config.sample_window = 4;
    UtilityEngine a(scenario, identity_sum_utility(1), config);
    UtilityEngine b(scenario, identity_sum_utility(1), config);
    for (int r = 0; r < 200; ++r) {
        const FrameResult ra = a.step();
        const FrameResult rb = b.step();
        CHECK(ra.theta == rb.theta);
        CHECK(ra.action == rb.action);
        CHECK(ra.outcome.penalties == rb.outcome.penalties);
        CHECK(ra.gamma == rb.gamma);
    }
    CHECK(a.queues().z == b.queues().z);
    CHECK(a.queues().g == b.queues().g);
}
