#pragma once

// Exact finite-dimensional quantum engine for the two-interaction ancilla
// circuit: single-qubit rotations, the diagonal connection interaction
// Delta_alpha = exp(-i alpha sz x sz), conditional (Kraus) extraction for the
// two measurement ports, and controlled-phase classification of diagonal
// two-qubit operators.
//
// Conventions used throughout:
//   * rotation_gate(n, t) = exp(-i t/2 n.sigma)  (right-hand rule on the
//     Bloch sphere)
//   * two-qubit basis order |00>,|01>,|10>,|11>, first index = first
//     interaction partner
//   * angles wrapped to (-pi, pi] with +pi the canonical representative

#include <array>
#include <complex>
#include <cstddef>
#include <utility>

namespace czwalk {

using ComplexAmplitude = std::complex<double>;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const;
    Vec3 normalized() const;  // throws std::invalid_argument on ~zero vector
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

// 2x2 operator on the ancilla, row-major entries.
struct SingleQubitOperator {
    std::array<ComplexAmplitude, 4> e{};  // [ e[0] e[1] ; e[2] e[3] ]

    static SingleQubitOperator identity();
    SingleQubitOperator operator*(const SingleQubitOperator& o) const;
    SingleQubitOperator adjoint() const;
    // max-abs deviation of U^dag U from the identity
    double unitarity_defect() const;
    bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }
};

// state = op |state>, state as (amp0, amp1)
std::array<ComplexAmplitude, 2> apply_operator(const SingleQubitOperator& op,
                                      const std::array<ComplexAmplitude, 2>& state);

// Diagonal two-qubit operator, entries ordered |00>,|01>,|10>,|11>.
struct DiagonalTwoQubitOperator {
    std::array<ComplexAmplitude, 4> diag{};
};

// Connection interaction strength, usable range 0 < alpha <= pi/4.
class CouplingStrength {
  public:
    explicit CouplingStrength(double alpha_radians);  // throws when out of range
    double value() const { return alpha_; }

  private:
    double alpha_;
};

// exp(-i angle/2 axis.sigma); axis must be unit length to 1e-9.
SingleQubitOperator rotation_gate(const Vec3& axis, double angle);

// diag(e^{-ia}, e^{+ia}, e^{+ia}, e^{-ia})
DiagonalTwoQubitOperator interaction_gate(CouplingStrength alpha);

// Z^j Rz(beta)
SingleQubitOperator adqc_single_backaction(double beta, int j);

struct StepConfig;  // defined in stepmodel.hpp

// Conditional Kraus operators for the two measurement ports of the
// two-interaction circuit: K[port](i,j) = <m_port| P(j) [B] U_a P(i) |prep>
// where P(k) is the ancilla phase picked up against register basis k and B is
// the orientation-reversing mid-circuit rotation when config.flip is set.
// first = "+" port (along the measurement axis), second = "-" port.
std::pair<DiagonalTwoQubitOperator, DiagonalTwoQubitOperator>
step_kraus(CouplingStrength alpha, const StepConfig& config);

// The mid-circuit rotation inserted when config.flip is set: a pi-rotation
// about the bisector of the two intermediate ancilla Bloch vectors (the
// measurement axis when those are antipodal). Swapping the two mid states
// negates the step's phase pattern; in the X-basis frame this is Pauli X.
SingleQubitOperator orientation_flip(CouplingStrength alpha, const StepConfig& config);

struct UnitaryCheck {
    bool valid = false;
    double probability = 0.0;  // common squared modulus when valid
};

// K is proportional to a unitary iff all four entry moduli agree within tol.
UnitaryCheck proportional_unitary_check(const DiagonalTwoQubitOperator& k, double tol);

// wrap(phi4 - phi3 - phi2 + phi1) of the entry arguments; gauge-invariant
// under global phases and separable diag(1,e^{ia},e^{ib},e^{i(a+b)}) factors.
// Throws std::invalid_argument unless K passes proportional_unitary_check.
double controlled_phase_angle(const DiagonalTwoQubitOperator& k, double tol = 1e-9);

// Bloch vector of a pure ancilla state (amp0, amp1).
Vec3 bloch_vector(const std::array<ComplexAmplitude, 2>& state);

// State at the given Bloch angles: cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>.
std::array<ComplexAmplitude, 2> bloch_state(double polar, double azimuth);

}  // namespace czwalk
