#include "czwalk/montecarlo.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

namespace czwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t trial_index)
    : base_(mix64(master_seed + kGolden * (trial_index + 1))) {}

std::uint64_t RandomStream::next_u64() { return mix64(base_ + kGolden * ++counter_); }

double RandomStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    return RandomStream{master_seed, trial_index};
}

namespace {

// Plans recur at the same wrapped remaining angle, and the optimizer solve
// dominates the per-step cost, so memoize on the quantized remaining.
class PlanCache {
  public:
    PlanCache(StrategyKind kind, CouplingStrength alpha) : kind_(kind), alpha_(alpha) {}

    StepPlan plan_for(const WalkState& state) {
        double key_angle = (kind_.family == StrategyFamily::Unguided)
                               ? kPi
                               : remaining_to_target(state);
        std::int64_t key = static_cast<std::int64_t>(std::llround(key_angle * 1e12));
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = plans_.find(key);
            if (it != plans_.end()) return it->second;
        }
        StepPlan plan = strategy_next(kind_, alpha_, state);
        if (!characterize_step(alpha_, plan.config).valid)
            throw std::runtime_error("run_trials: strategy produced an invalid plan");
        std::lock_guard<std::mutex> lock(mu_);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    StrategyKind kind_;
    CouplingStrength alpha_;
    std::mutex mu_;
    std::unordered_map<std::int64_t, StepPlan> plans_;
};

}  // namespace

HittingDistribution run_trials(const RunSpec& spec, unsigned workers) {
    if (spec.n_trials < 1 || spec.max_steps < 1)
        throw std::invalid_argument("run_trials: n_trials and max_steps must be >= 1");
    CouplingStrength alpha{spec.alpha};
    TargetRule rule{spec.kind.family == StrategyFamily::Unguided ? spec.epsilon : 0.0};
    PlanCache cache(spec.kind, alpha);

    if (workers == 0) {
        unsigned hc = std::thread::hardware_concurrency();
        workers = hc ? hc : 1;
    }
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, spec.n_trials));

    auto run_range = [&](std::uint64_t lo, std::uint64_t hi, HittingDistribution& out) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            RandomStream rng = derive_stream(spec.master_seed, t);
            WalkState state;
            while (!state.done && state.steps < spec.max_steps) {
                StepPlan plan = cache.plan_for(state);
                int outcome = (rng.next_unit() < plan.success_prob)
                                  ? plan.success_port
                                  : 1 - plan.success_port;
                state = advance(state, plan, outcome, rule);
            }
            if (state.done)
                out.add(state.steps);
            else
                out.add_overflow();
        }
    };

    if (workers <= 1) {
        HittingDistribution dist;
        run_range(0, spec.n_trials, dist);
        return dist;
    }

    std::vector<HittingDistribution> shards(workers);
    std::vector<std::thread> threads;
    std::uint64_t chunk = (spec.n_trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::uint64_t lo = w * chunk;
        std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, spec.n_trials);
        if (lo >= hi) break;
        threads.emplace_back(run_range, lo, hi, std::ref(shards[w]));
    }
    for (auto& th : threads) th.join();
    HittingDistribution dist;
    for (const auto& s : shards) dist.merge(s);
    return dist;
}

}  // namespace czwalk
