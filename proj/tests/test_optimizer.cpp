#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "czwalk/optimizer.hpp"
#include "czwalk/strategies.hpp"

using namespace czwalk;

namespace {
constexpr double kPi = 3.14159265358979323846;

double realized_phase(const StepPlan& plan, CouplingStrength alpha) {
    StepOutcome out = characterize_step(alpha, plan.config);
    REQUIRE(out.valid);
    return (plan.success_port == 1) ? out.phi_port1 : out.phi_port0;
}
}  // namespace

TEST_CASE("solve_port1 at target pi reproduces the x-basis step") {
    for (double a : {kPi / 16.0, kPi / 8.0, 0.22, kPi / 4.0}) {
        CouplingStrength alpha{a};
        StepPlan plan = solve_port1(alpha, kPi, 1);
        double s2 = std::sin(2.0 * a);
        CHECK(plan.success_prob == doctest::Approx(s2 * s2 / 2.0).epsilon(1e-10));
        CHECK(std::abs(wrap_angle(plan.success_phase - kPi)) < 1e-9);
        CHECK(plan.config.flip == false);
        CHECK(std::abs(wrap_angle(realized_phase(plan, alpha) - kPi)) < 1e-9);
    }
}

TEST_CASE("solve_port1 hits arbitrary signed targets") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> au(0.03, kPi / 4.0);
    std::uniform_real_distribution<double> tu(-kPi, kPi);
    for (int k = 0; k < 200; ++k) {
        double a = au(rng), t = tu(rng);
        if (std::abs(t) < 1e-3) continue;
        CouplingStrength alpha{a};
        StepPlan plan = solve_port1(alpha, t, 1);
        CHECK(std::abs(wrap_angle(plan.success_phase - t)) < 1e-9);
        CHECK(std::abs(wrap_angle(realized_phase(plan, alpha) - t)) < 1e-9);
        CHECK(plan.success_prob <= 0.5 + 1e-12);
    }
}

TEST_CASE("port-1 probability at target pi is monotone in the coupling") {
    double prev = 0.0;
    for (int k = 1; k <= 50; ++k) {
        double a = kPi / 4.0 * k / 50.0;
        StepPlan plan = solve_port1(CouplingStrength{a}, kPi, 1);
        double s2 = std::sin(2.0 * a);
        CHECK(plan.success_prob == doctest::Approx(s2 * s2 / 2.0).epsilon(1e-9));
        CHECK(plan.success_prob >= prev - 1e-12);
        prev = plan.success_prob;
    }
}

TEST_CASE("preparation-scan and measurement-scan give identical probabilities") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> au(0.03, kPi / 4.0 - 1e-3);
    std::uniform_real_distribution<double> tu(0.05, kPi - 0.05);
    for (int k = 0; k < 100; ++k) {
        CouplingStrength alpha{au(rng)};
        double t = tu(rng);
        StepPlan prep = solve_port1(alpha, t, 1, ScanVariant::Prep);
        StepPlan meas = solve_port1(alpha, t, 1, ScanVariant::Meas);
        CHECK(prep.success_prob == doctest::Approx(meas.success_prob).epsilon(1e-9));
        CHECK(std::abs(wrap_angle(meas.success_phase - t)) < 1e-9);
    }
}

TEST_CASE("two dof never does worse than one dof") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> au(0.05, kPi / 4.0 - 1e-3);
    std::uniform_real_distribution<double> tu(0.1, kPi);
    for (int k = 0; k < 25; ++k) {
        CouplingStrength alpha{au(rng)};
        double t = tu(rng);
        StepPlan d1 = solve_port1(alpha, t, 1);
        StepPlan d2 = solve_port1(alpha, t, 2);
        CHECK(d2.success_prob >= d1.success_prob - 1e-9);

        if (t < max_port0_angle(alpha)) {
            auto p0d1 = solve_port0(alpha, t, 1);
            auto p0d2 = solve_port0(alpha, t, 2);
            REQUIRE(p0d1.has_value());
            REQUIRE(p0d2.has_value());
            CHECK(p0d2->success_prob >= p0d1->success_prob - 1e-9);
        }
    }
}

TEST_CASE("solve_port0 reachability boundary") {
    CouplingStrength alpha{kPi / 16.0};
    double reach = max_port0_angle(alpha);  // ~0.158
    CHECK_FALSE(solve_port0(alpha, reach + 0.01, 1).has_value());
    double leftover = kPi - std::abs(characterize_step(alpha, xbasis_config()).phi_port0);
    CHECK_FALSE(solve_port0(alpha, leftover, 1).has_value());

    auto plan = solve_port0(alpha, reach * 0.5, 1);
    REQUIRE(plan.has_value());
    CHECK(plan->success_port == 0);
    CHECK(std::abs(wrap_angle(plan->success_phase - reach * 0.5)) < 1e-9);
    CHECK(plan->success_prob >= 0.5);
}

TEST_CASE("solve_port0 at high coupling approaches certainty") {
    CouplingStrength alpha{0.98 * kPi / 4.0};
    double leftover = kPi - max_port0_angle(alpha);  // remaining after first failure
    auto plan = solve_port0(alpha, leftover, 2);
    REQUIRE(plan.has_value());
    CHECK(plan->success_prob > 0.9);
    CHECK(std::abs(wrap_angle(realized_phase(*plan, alpha) - leftover)) < 1e-9);
}

TEST_CASE("solve_port0 of a tiny target stays near the trivial-step probability") {
    CouplingStrength alpha{kPi / 8.0};
    auto small = solve_port0(alpha, 1e-6, 1);
    REQUIRE(small.has_value());
    // beta -> 0 limit of the majority-cap probability at theta = pi/2
    double limit = (1.0 + std::cos(2.0 * alpha.value())) / 2.0;
    CHECK(small->success_prob == doctest::Approx(limit).epsilon(1e-4));
}

TEST_CASE("threshold alpha") {
    CouplingStrength astar = threshold_alpha(1e-12);
    double closed = std::atan(std::sqrt(std::tan(kPi / 8.0)));
    CHECK(std::abs(astar.value() - closed) < 1e-9);
    CHECK(astar.value() / (kPi / 4.0) == doctest::Approx(0.7281).epsilon(1e-3));
    // defining equation
    double mag = std::abs(characterize_step(astar, xbasis_config()).phi_port0);
    CHECK(mag == doctest::Approx(kPi / 2.0).epsilon(1e-9));
}

TEST_CASE("best_step picks the viable port") {
    // first step: always the x-basis plan
    for (int ports : {1, 2})
        for (int dof : {1, 2}) {
            StepPlan first =
                best_step(CouplingStrength{kPi / 8.0}, kPi, ControlMode{ports, dof});
            CHECK(first.success_port == 1);
            CHECK(std::abs(wrap_angle(first.success_phase - kPi)) < 1e-9);
        }

    // below threshold, port 0 cannot reach the leftover
    CouplingStrength low{kPi / 8.0};
    double leftover_low = kPi - std::abs(characterize_step(low, xbasis_config()).phi_port0);
    StepPlan p_low = best_step(low, leftover_low, ControlMode{2, 2});
    CHECK(p_low.success_port == 1);

    // above threshold, port 0 wins on probability
    CouplingStrength high{0.9 * kPi / 4.0};
    double leftover_high = kPi - std::abs(characterize_step(high, xbasis_config()).phi_port0);
    StepPlan p_high = best_step(high, leftover_high, ControlMode{2, 2});
    CHECK(p_high.success_port == 0);
    CHECK(p_high.success_prob > 0.5);
}

TEST_CASE("plans reproduce their success phase under characterization") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> au(0.05, kPi / 4.0);
    std::uniform_real_distribution<double> tu(-kPi, kPi);
    for (int k = 0; k < 100; ++k) {
        CouplingStrength alpha{au(rng)};
        double t = tu(rng);
        if (std::abs(t) < 0.01) continue;
        for (int ports : {1, 2}) {
            StepPlan plan = best_step(alpha, t, ControlMode{ports, ports});
            CHECK(std::abs(wrap_angle(realized_phase(plan, alpha) - plan.success_phase)) <
                  1e-9);
            CHECK(std::abs(wrap_angle(plan.success_phase - t)) < 1e-9);
        }
    }
}

TEST_CASE("input validation") {
    CouplingStrength alpha{kPi / 8.0};
    CHECK_THROWS_AS(solve_port1(alpha, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(solve_port1(alpha, kPi, 3), std::invalid_argument);
    CHECK_THROWS_AS(solve_port0(alpha, kPi, 1), std::invalid_argument);
    CHECK_THROWS_AS(threshold_alpha(0.0), std::invalid_argument);
    CHECK_THROWS_AS(best_step(alpha, 0.0, ControlMode{1, 1}), std::invalid_argument);
}
