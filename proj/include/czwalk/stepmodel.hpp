#pragma once

// One mediated step: maps (coupling, ancilla settings) to the two ports'
// controlled-phase angles and probabilities, validates the unitary
// back-action condition (the four post-interaction ancilla states must lie
// on a circle whose axis is the measurement axis), and implements the
// orientation flip that negates both port angles.

#include <array>

#include "czwalk/qcore.hpp"

namespace czwalk {

struct AxisAngle {
    Vec3 axis{1.0, 0.0, 0.0};
    double angle = 0.0;
};

// Controllable settings for one mediated step. prep_* give the ancilla
// preparation state, mid_rotation the operation between the two connection
// interactions, meas_* the measurement axis ("+" port along the axis).
// flip inserts the orientation-reversing pi-rotation about the in-plane
// bisector of the two mid-circuit ancilla states; in the canonical X-basis
// frame this is exactly the Pauli X of the flip-undo scheme.
struct StepConfig {
    double prep_polar = 0.0;
    double prep_azimuth = 0.0;
    AxisAngle mid_rotation{{1.0, 0.0, 0.0}, 0.0};
    bool flip = false;
    double meas_polar = 0.0;
    double meas_azimuth = 0.0;
};

// Two-port characterization. Port 1 carries the larger |phi| (minor cap);
// ties resolve to the "-" measurement outcome. port1_raw records which raw
// outcome (0 = "+", 1 = "-") port 1 maps to.
struct StepOutcome {
    double phi_port0 = 0.0;
    double phi_port1 = 0.0;
    double p_port0 = 0.0;
    double p_port1 = 0.0;
    bool valid = false;
    int port1_raw = 1;
};

// Runs step_kraus and the equal-moduli check on both ports; fills angles and
// probabilities when both pass. valid=false means the config violates the
// circle condition and the back-action is not unitary.
StepOutcome characterize_step(CouplingStrength alpha, const StepConfig& config,
                              double tol = 1e-9);

// Canonical fixed configuration: prep |+>, mid R_x(pi/2), measure along +x.
StepConfig xbasis_config();

// Closed-form reference for the fixed X-basis configuration:
//   phi1 = pi, p1 = sin^2(2a)/2, phi0 = -4 atan(tan^2 a), p0 = 1 - p1.
StepOutcome xbasis_closed_form(CouplingStrength alpha);

// Toggles flip: both port angles negate (mod 2pi), probabilities unchanged.
StepConfig apply_flip(const StepConfig& config);

// Bloch vectors of the four post-interaction ancilla states |a_ij>,
// (i,j) in {0,1}^2 ordered 00,01,10,11.
std::array<Vec3, 4> bloch_points(CouplingStrength alpha, const StepConfig& config);

// True iff the four points lie on a common circle whose plane is normal to
// the axis and whose center sits on the axis (equal dot products).
bool concyclic_about(const Vec3& axis, const std::array<Vec3, 4>& points,
                     double tol = 1e-9);

// --- (beta, theta) parameter family -------------------------------------
//
// Valid configurations are parametrized by the preparation spread beta in
// [0, alpha] and the mid-state mean polar angle theta in (0, pi): the four
// post-interaction states sit at polar theta -+ 2 beta, azimuth +- 2 alpha,
// and the measurement axis is pinned at tan(tm) = tan(theta)/cos(2 alpha).
// beta rides on prep_polar, theta on meas_polar; the X-basis configuration
// is (beta, theta) = (alpha, pi/2).

// Port angles/probabilities evaluated directly from the parameter family
// (no circuit construction); fast path for optimizer scans.
StepOutcome parametric_outcome(CouplingStrength alpha, double beta, double theta);

// Builds the circuit realization of (beta, theta): preparation polar angle
// asin(sin 2 beta / sin 2 alpha), mid rotation R_plane(theta - pi/2) R_x(pi/2),
// measurement axis through the circle center on the major-cap side.
StepConfig config_from_parameters(CouplingStrength alpha, double beta, double theta,
                                  bool flip = false);

// Largest |phi0| reachable at this coupling: 4 atan(tan^2 alpha), attained by
// the X-basis configuration.
double max_port0_angle(CouplingStrength alpha);

}  // namespace czwalk
