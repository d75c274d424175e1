#pragma once

// Exact statistics and bounds for the hitting-time distributions: flip-undo
// closed forms, geometric bound envelopes, quantile packet sizes, the 1/p
// multi-step viability bound, and summaries of empirical distributions.

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace czwalk {

// Empirical hitting-time distribution. Trials that exceeded the safety
// cutoff land in the overflow bucket: they count toward total but carry no
// hitting time.
struct HittingDistribution {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t overflow = 0;

    void add(std::uint64_t hitting_time);
    void add_overflow();
    // associative + commutative, so parallel shards combine deterministically
    void merge(const HittingDistribution& other);
};

struct SummaryStats {
    double mean = 0.0;
    double std_dev = 0.0;  // population denominator
    std::vector<std::pair<double, std::uint64_t>> quantiles;
    std::uint64_t n_trials = 0;
    std::uint64_t overflow = 0;
};

// Expected flip-undo hitting time 1 + 1/p, p the first-step success
// probability. Throws outside p in (0, 1].
double flip_undo_mean(double p);

// P(hit <= n) = 1 - (1-p)(1 - 2p(1-p))^k with n = 2k+1. The loop admits
// success only at odd step counts; even n throws.
double flip_undo_cdf(double p, std::uint64_t n);

struct BoundPair {
    double lower = 0.0;
    double upper = 0.0;
};

// Geometric envelope (1-(1-p2)^n, 1-(1-p1)^n); requires 0 < p2 <= p1 <= 1.
BoundPair geometric_bounds(double p1, double p2, std::uint64_t n);

struct QuantileResult {
    std::uint64_t n = 0;
    bool certified = false;  // false when the empirical tail cannot reach q
};

// Smallest N with P(hit <= N) >= q against an empirical distribution.
QuantileResult quantile_N(const HittingDistribution& dist, double q);

// Same against an exact CDF function, searched up to n_cap.
QuantileResult quantile_N(const std::function<double(std::uint64_t)>& cdf, double q,
                          std::uint64_t n_cap = 1u << 24);

// floor(1/p2): the longest multi-step horizon for which an n-fold
// probability gain is arithmetically possible.
std::uint64_t max_steps_bound(double p2);

// Sample mean/std (population denominator) plus the requested quantiles.
// Overflowed trials are excluded from the moments.
SummaryStats summarize(const HittingDistribution& dist,
                       const std::vector<double>& quantiles = {0.5, 0.9, 0.999});

// Half-width of the Dvoretzky-Kiefer-Wolfowitz band at the given confidence.
double dkw_band(std::uint64_t n_trials, double confidence);

}  // namespace czwalk
