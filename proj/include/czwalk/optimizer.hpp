#pragma once

// Per-step parameter search: given a required controlled-phase angle, find a
// valid StepConfig whose designated port generates exactly that angle with
// maximal probability, under 1-dof or 2-dof control; plus the coupling
// threshold below which only port 1 can make progress.

#include <optional>

#include "czwalk/stepmodel.hpp"

namespace czwalk {

// One planned step. characterize_step(config) reproduces success_phase on
// success_port within 1e-9; failure_phase is the other port's angle.
struct StepPlan {
    StepConfig config;
    int success_port = 1;
    double success_phase = 0.0;
    double success_prob = 0.0;
    double failure_phase = 0.0;
};

// ports: how many measurement results count as usable successes.
// dof: how many of the two ancilla parameters the solver may vary.
struct ControlMode {
    int ports = 1;
    int dof = 1;
};

// Which parameter carries the single degree of freedom in 1-dof searches.
// The two variants give identical probabilities (checked in tests); Prep is
// the default used by the strategies.
enum class ScanVariant { Prep, Meas };

// Plan with port-1 angle equal to target (sign absorbed by the flip),
// maximizing p1. dof=1 pins the measurement parameter at its extremal value
// and scans the preparation parameter (or vice versa for ScanVariant::Meas);
// dof=2 runs a golden-section over the second parameter. Requires
// 0 < |target| <= pi. Throws std::runtime_error if the root bracket fails
// (cannot happen for in-range targets).
StepPlan solve_port1(CouplingStrength alpha, double target, int dof,
                     ScanVariant variant = ScanVariant::Prep);

// Plan with port-0 angle equal to target, maximizing p0; empty when |target|
// exceeds the port-0 reach 4 atan(tan^2 alpha). Requires 0 < |target| < pi.
std::optional<StepPlan> solve_port0(CouplingStrength alpha, double target, int dof);

// Coupling at which the first-step failure angle |phi0| crosses pi/2 (the
// point where the leftover pi - |phi0| comes within port-0 reach); bisection
// to within tol. Closed form: atan(sqrt(tan(pi/8))).
CouplingStrength threshold_alpha(double tol);

// Highest-success-probability plan for the remaining angle under the mode:
// ports=1 uses solve_port1 only; ports=2 compares against solve_port0 when
// reachable (ties prefer port 0, the majority cap).
StepPlan best_step(CouplingStrength alpha, double remaining, ControlMode mode);

}  // namespace czwalk
