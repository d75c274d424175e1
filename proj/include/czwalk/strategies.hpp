#pragma once

// The walk on the circle of accumulated controlled-phase angles, plus the
// policies that choose each step's plan: unguided (fixed settings), one-step
// (re-target the remaining angle each step, in three control modes) and
// flip-undo (fixed settings plus the orientation flip, a 3-state loop).

#include <cstdint>
#include <string>

#include "czwalk/optimizer.hpp"

namespace czwalk {

struct WalkState {
    double position = 0.0;       // accumulated phase, wrapped to (-pi, pi]
    std::uint64_t steps = 0;
    bool done = false;
};

struct TargetRule {
    double epsilon = 0.0;  // half-width of the target region pi +- epsilon
};

enum class StrategyFamily { Unguided, OneStep, FlipUndo };

struct StrategyKind {
    StrategyFamily family = StrategyFamily::Unguided;
    ControlMode mode{1, 1};  // used by OneStep only

    static StrategyKind unguided() { return {StrategyFamily::Unguided, {1, 1}}; }
    static StrategyKind one_step(ControlMode m) { return {StrategyFamily::OneStep, m}; }
    static StrategyKind flip_undo() { return {StrategyFamily::FlipUndo, {1, 1}}; }
};

// Canonical names: unguided, one-step-1p, one-step-2p-1dof, one-step-2p-2dof,
// flip-undo.
const char* strategy_name(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);  // throws on unknown names

// x - 2 pi k in (-pi, pi], with +pi canonical.
double wrap_angle(double x);

// wrap(pi - position): the signed angle still to be generated.
double remaining_to_target(const WalkState& state);

// The next step's plan under the policy. Unguided always replays the x-basis
// plan; OneStep targets the remaining angle via best_step; FlipUndo cycles
// the 3-node loop {0, gamma, gamma - pi} with gamma the x-basis failure
// angle, flipping everywhere except at the origin.
StepPlan strategy_next(StrategyKind kind, CouplingStrength alpha, const WalkState& state);

// Accumulate the realized port angle (success_port -> success_phase, other
// port -> failure_phase), bump the step count, and stop once
// |wrap(position - pi)| <= max(epsilon, 1e-9).
WalkState advance(const WalkState& state, const StepPlan& plan, int outcome,
                  const TargetRule& rule);

}  // namespace czwalk
