#pragma once

// Distributed session emulation: Alice precomputes an instruction tape and a
// packet of N ancilla settings, Bob consumes the packet following the tape's
// stop/branch rules with no mid-session classical round trips.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "czwalk/montecarlo.hpp"

namespace czwalk {

// Branch target meaning "halt, target gate reached".
inline constexpr std::int32_t kTapeStop = -1;

struct TapeEntry {
    StepConfig config;
    // raw measurement bit (0 = "+", 1 = "-") that halts the session
    std::optional<int> stop_on_port;
    // raw outcome -> next entry index (or kTapeStop); linear tapes omit it
    // and fall through to the following entry
    std::optional<std::array<std::int32_t, 2>> branch;
};

struct InstructionTape {
    std::vector<TapeEntry> entries;
    std::uint64_t packet_size = 1;
    StrategyKind kind;
    double alpha = 0.0;
};

struct SessionTranscript {
    std::vector<int> outcomes;  // raw measurement bits, one per consumed ancilla
    std::uint64_t stopped_at = 0;
    bool succeeded = false;
    double final_position = 0.0;
    std::uint64_t messages_alice_to_bob = 0;
    std::uint64_t messages_bob_to_alice = 0;
};

// Precompute the tape and the packet size N = quantile_N(exact CDF, q).
// Expressible: Unguided (position automaton; epsilon sets its stop region),
// FlipUndo (3-entry cycle), OneStep 1-port (linear chain), OneStep
// 2-port/1-dof (branch tables). OneStep 2-port/2-dof has no finite tape
// (plans range over a continuum of positions) and throws
// std::invalid_argument.
InstructionTape plan_session(StrategyKind kind, CouplingStrength alpha, double q,
                             double epsilon = 0.0314159265358979324);

// Bob's run: consume the packet, follow the tape, halt at the stop rule.
// Exactly one classical message each way (tape out, final report back).
SessionTranscript execute_session(const InstructionTape& tape, CouplingStrength alpha,
                                  RandomStream& stream);

// True iff the session stopped with |wrap(final - pi)| <= max(epsilon, 1e-9).
bool verify_transcript(const SessionTranscript& t, double epsilon);

// Exact P(hit <= n) of the unguided walk, computed by forward iteration of
// the position automaton (states k*gamma + parity*pi). cdf[n] for n <= n_max.
std::vector<double> unguided_exact_cdf(CouplingStrength alpha, double epsilon,
                                       std::uint64_t n_max);

// Line-oriented transcript record: header, then one outcome bit per line.
void write_transcript(std::ostream& os, const SessionTranscript& t,
                      const InstructionTape& tape, std::uint64_t seed);
SessionTranscript read_transcript(std::istream& is);

}  // namespace czwalk
