#pragma once

// Deterministic trial runner. Each trial draws from its own counter-derived
// random stream, so the merged distribution is bit-identical for any worker
// count or scheduling.

#include <cstdint>

#include "czwalk/analytics.hpp"
#include "czwalk/strategies.hpp"

namespace czwalk {

// Counter-based stream: output k is a SplitMix64-style finalizer applied at
// an entry point derived from (master_seed, trial_index). Same pair, same
// sequence; distinct indices give statistically independent streams.
class RandomStream {
  public:
    RandomStream(std::uint64_t master_seed, std::uint64_t trial_index);

    std::uint64_t next_u64();
    // uniform in [0, 1) with 53-bit resolution
    double next_unit();

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index);

struct RunSpec {
    StrategyKind kind;
    double alpha = 0.0;
    double epsilon = 0.0;   // consumed by the unguided stopping rule only
    std::uint64_t n_trials = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t max_steps = 1000000;  // safety cutoff -> overflow bucket
};

// Runs n_trials independent walks of the strategy and returns the merged
// hitting-time distribution. workers = 0 picks the hardware concurrency.
// Plans are cached by quantized remaining angle; caching is transparent to
// the trial outcomes. Throws std::runtime_error if a strategy ever yields an
// invalid plan (an optimizer or model bug, not a sampling event).
HittingDistribution run_trials(const RunSpec& spec, unsigned workers = 0);

}  // namespace czwalk
