#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "czwalk/analytics.hpp"

using namespace czwalk;

TEST_CASE("flip_undo_mean") {
    CHECK(flip_undo_mean(1.0) == doctest::Approx(2.0));
    CHECK(flip_undo_mean(0.5) == doctest::Approx(3.0));
    CHECK(flip_undo_mean(0.0732233047) == doctest::Approx(14.6569).epsilon(1e-4));
    CHECK_THROWS_AS(flip_undo_mean(0.0), std::invalid_argument);
    CHECK_THROWS_AS(flip_undo_mean(1.5), std::invalid_argument);
}

TEST_CASE("flip_undo_cdf values and domain") {
    CHECK(flip_undo_cdf(0.5, 1) == doctest::Approx(0.5));
    CHECK(flip_undo_cdf(0.5, 3) == doctest::Approx(0.75));
    CHECK_THROWS_AS(flip_undo_cdf(0.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(flip_undo_cdf(0.5, 0), std::invalid_argument);

    // enumeration of the 3-state chain to depth 5: origin -> {done, s1},
    // s1 -> {s2, origin}, s2 -> {done, s1}
    double p = 0.37;
    double by_formula = flip_undo_cdf(p, 5);
    double direct = 0.0;
    // success at 1: p ; at 3: (1-p)*(p*(1-p) + (1-p)*p) ; at 5: two more cycles
    double q = 2.0 * p * (1.0 - p);
    direct = p + (1.0 - p) * q + (1.0 - p) * (1.0 - q) * q;
    CHECK(by_formula == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("flip_undo_cdf is nondecreasing, tends to 1, implies the mean") {
    double p = 0.0732233047;
    double prev = 0.0, mean = 0.0, mass_prev = 0.0;
    std::uint64_t n = 1;
    for (;; n += 2) {
        double cdf = flip_undo_cdf(p, n);
        CHECK(cdf >= prev - 1e-15);
        mean += static_cast<double>(n) * (cdf - mass_prev);
        mass_prev = cdf;
        prev = cdf;
        if (1.0 - cdf < 1e-12) break;
    }
    CHECK(prev > 1.0 - 1e-12);
    CHECK(mean == doctest::Approx(flip_undo_mean(p)).epsilon(1e-6));
}

TEST_CASE("smallest n with flip-undo cdf >= 0.999 at alpha = pi/16") {
    double p = 0.07322330470336313;  // sin^2(pi/8)/2
    auto cdf = [&](std::uint64_t n) {
        if (n == 0) return 0.0;
        return flip_undo_cdf(p, n % 2 ? n : n - 1);
    };
    QuantileResult r = quantile_N(cdf, 0.999);
    CHECK(r.certified);
    CHECK(r.n == 95);
    CHECK(flip_undo_cdf(p, 95) >= 0.999);
    CHECK(flip_undo_cdf(p, 93) < 0.999);
}

TEST_CASE("geometric_bounds") {
    auto same = geometric_bounds(0.3, 0.3, 7);
    CHECK(same.lower == doctest::Approx(same.upper));

    auto one = geometric_bounds(0.4, 0.2, 1);
    CHECK(one.lower == doctest::Approx(0.2));
    CHECK(one.upper == doctest::Approx(0.4));

    CHECK_THROWS_AS(geometric_bounds(0.2, 0.4, 3), std::invalid_argument);
    CHECK_THROWS_AS(geometric_bounds(0.4, 0.0, 3), std::invalid_argument);
}

TEST_CASE("quantile_N on empirical distributions") {
    HittingDistribution d;
    for (int k = 0; k < 50; ++k) d.add(1);
    for (int k = 0; k < 30; ++k) d.add(3);
    for (int k = 0; k < 20; ++k) d.add(10);
    CHECK(quantile_N(d, 0.5).n == 1);
    CHECK(quantile_N(d, 0.6).n == 3);
    CHECK(quantile_N(d, 0.95).n == 10);
    CHECK(quantile_N(d, 0.95).certified);

    // deterministic mass at one point
    HittingDistribution point;
    for (int k = 0; k < 10; ++k) point.add(1);
    for (double q : {0.1, 0.5, 0.9, 0.999}) CHECK(quantile_N(point, q).n == 1);

    // overflow-truncated tail cannot certify deep quantiles
    HittingDistribution trunc;
    for (int k = 0; k < 99; ++k) trunc.add(2);
    trunc.add_overflow();
    CHECK(quantile_N(trunc, 0.5).certified);
    CHECK_FALSE(quantile_N(trunc, 0.995).certified);
}

TEST_CASE("quantile below the first-step probability is 1") {
    double p = 0.4;
    auto cdf = [&](std::uint64_t n) {
        if (n == 0) return 0.0;
        return flip_undo_cdf(p, n % 2 ? n : n - 1);
    };
    CHECK(quantile_N(cdf, 0.39).n == 1);
}

TEST_CASE("quantile_N agrees with direct search on the exact flip-undo cdf") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> pu(0.02, 0.6), qu(0.5, 0.9999);
    for (int k = 0; k < 200; ++k) {
        double p = pu(rng), q = qu(rng);
        auto cdf = [&](std::uint64_t n) {
            if (n == 0) return 0.0;
            return flip_undo_cdf(p, n % 2 ? n : n - 1);
        };
        QuantileResult fast = quantile_N(cdf, q);
        std::uint64_t direct = 1;
        while (cdf(direct) < q) ++direct;
        CHECK(fast.certified);
        CHECK(fast.n == direct);
    }
}

TEST_CASE("max_steps_bound") {
    CHECK(max_steps_bound(0.25) == 4);
    CHECK(max_steps_bound(0.5) == 2);
    CHECK(max_steps_bound(1.0) == 1);
    CHECK(max_steps_bound(1.0 / 3.0) == 3);
    CHECK_THROWS_AS(max_steps_bound(0.0), std::invalid_argument);
}

TEST_CASE("summarize moments and quantiles") {
    HittingDistribution point;
    point.add(3);
    SummaryStats s = summarize(point);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.std_dev == doctest::Approx(0.0));
    CHECK(s.n_trials == 1);

    // geometric(p = 1/2) truncated at machine tail: mean 2
    HittingDistribution geo;
    double mass = 1.0;
    std::uint64_t scale = 1ull << 40;
    for (std::uint64_t n = 1; mass > 1e-13; ++n) {
        double pn = std::pow(0.5, static_cast<double>(n));
        geo.counts[n] = static_cast<std::uint64_t>(pn * static_cast<double>(scale));
        geo.total += geo.counts[n];
        mass -= pn;
    }
    SummaryStats g = summarize(geo);
    CHECK(g.mean == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(g.std_dev == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("merge is associative and commutative in effect") {
    std::mt19937_64 rng(67);
    std::uniform_int_distribution<std::uint64_t> nu(1, 20);
    HittingDistribution a, b, c;
    for (int k = 0; k < 100; ++k) a.add(nu(rng));
    for (int k = 0; k < 80; ++k) b.add(nu(rng));
    for (int k = 0; k < 60; ++k) c.add(nu(rng));
    c.add_overflow();

    HittingDistribution ab_c = a;
    ab_c.merge(b);
    ab_c.merge(c);
    HittingDistribution c_ba = c;
    HittingDistribution ba = b;
    ba.merge(a);
    c_ba.merge(ba);
    CHECK(ab_c.counts == c_ba.counts);
    CHECK(ab_c.total == c_ba.total);
    CHECK(ab_c.overflow == c_ba.overflow);
}

TEST_CASE("dkw band") {
    CHECK(dkw_band(100000, 0.999) == doctest::Approx(0.006164).epsilon(1e-3));
    CHECK_THROWS_AS(dkw_band(0, 0.999), std::invalid_argument);
}
