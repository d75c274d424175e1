#include "czwalk/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace czwalk {

void HittingDistribution::add(std::uint64_t hitting_time) {
    ++counts[hitting_time];
    ++total;
}

void HittingDistribution::add_overflow() {
    ++overflow;
    ++total;
}

void HittingDistribution::merge(const HittingDistribution& other) {
    for (const auto& [n, c] : other.counts) counts[n] += c;
    total += other.total;
    overflow += other.overflow;
}

double flip_undo_mean(double p) {
    if (!(p > 0.0) || !(p <= 1.0))
        throw std::invalid_argument("flip_undo_mean: p must lie in (0, 1]");
    return 1.0 + 1.0 / p;
}

double flip_undo_cdf(double p, std::uint64_t n) {
    if (!(p > 0.0) || !(p <= 1.0))
        throw std::invalid_argument("flip_undo_cdf: p must lie in (0, 1]");
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("flip_undo_cdf: n must be odd and >= 1");
    std::uint64_t k = (n - 1) / 2;
    double cycle_fail = 1.0 - 2.0 * p * (1.0 - p);
    return 1.0 - (1.0 - p) * std::pow(cycle_fail, static_cast<double>(k));
}

BoundPair geometric_bounds(double p1, double p2, std::uint64_t n) {
    if (!(p2 > 0.0) || !(p2 <= p1) || !(p1 <= 1.0))
        throw std::invalid_argument("geometric_bounds: need 0 < p2 <= p1 <= 1");
    double dn = static_cast<double>(n);
    return {1.0 - std::pow(1.0 - p2, dn), 1.0 - std::pow(1.0 - p1, dn)};
}

QuantileResult quantile_N(const HittingDistribution& dist, double q) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("quantile_N: q must lie in (0, 1)");
    if (dist.total == 0) throw std::invalid_argument("quantile_N: empty distribution");
    std::uint64_t cum = 0;
    double need = q * static_cast<double>(dist.total);
    for (const auto& [n, c] : dist.counts) {
        cum += c;
        if (static_cast<double>(cum) >= need) return {n, true};
    }
    // tail truncated by overflow: cannot certify the quantile
    std::uint64_t last = dist.counts.empty() ? 0 : dist.counts.rbegin()->first;
    return {last, false};
}

QuantileResult quantile_N(const std::function<double(std::uint64_t)>& cdf, double q,
                          std::uint64_t n_cap) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("quantile_N: q must lie in (0, 1)");
    // exponential gallop then binary search over the nondecreasing cdf
    std::uint64_t hi = 1;
    while (hi < n_cap && cdf(hi) < q) hi *= 2;
    if (cdf(std::min(hi, n_cap)) < q) return {n_cap, false};
    std::uint64_t lo = hi / 2;  // cdf(lo) < q or lo == 0
    hi = std::min(hi, n_cap);
    while (lo + 1 < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (cdf(mid) >= q)
            hi = mid;
        else
            lo = mid;
    }
    return {hi, true};
}

std::uint64_t max_steps_bound(double p2) {
    if (!(p2 > 0.0) || !(p2 <= 1.0))
        throw std::invalid_argument("max_steps_bound: p2 must lie in (0, 1]");
    return static_cast<std::uint64_t>(std::floor(1.0 / p2 + 1e-9));
}

SummaryStats summarize(const HittingDistribution& dist,
                       const std::vector<double>& quantiles) {
    if (dist.total < 1) throw std::invalid_argument("summarize: empty distribution");
    SummaryStats s;
    s.n_trials = dist.total;
    s.overflow = dist.overflow;
    std::uint64_t counted = dist.total - dist.overflow;
    if (counted == 0) return s;
    double m1 = 0.0, m2 = 0.0;
    for (const auto& [n, c] : dist.counts) {
        double x = static_cast<double>(n), w = static_cast<double>(c);
        m1 += w * x;
        m2 += w * x * x;
    }
    m1 /= static_cast<double>(counted);
    m2 /= static_cast<double>(counted);
    s.mean = m1;
    s.std_dev = std::sqrt(std::max(0.0, m2 - m1 * m1));
    for (double q : quantiles) s.quantiles.emplace_back(q, quantile_N(dist, q).n);
    return s;
}

double dkw_band(std::uint64_t n_trials, double confidence) {
    if (n_trials == 0 || !(confidence > 0.0) || !(confidence < 1.0))
        throw std::invalid_argument("dkw_band: bad arguments");
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) /
                     (2.0 * static_cast<double>(n_trials)));
}

}  // namespace czwalk
