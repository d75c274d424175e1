#include "czwalk/qcore.hpp"

#include <cmath>
#include <stdexcept>

#include "czwalk/stepmodel.hpp"

namespace czwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;

const ComplexAmplitude kI{0.0, 1.0};

double wrap_pm_pi(double x) {
    double y = std::fmod(x, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    if (y > kPi) y -= 2.0 * kPi;
    return y;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    double n = norm();
    if (n < 1e-14) throw std::invalid_argument("Vec3: cannot normalize ~zero vector");
    return {x / n, y / n, z / n};
}

SingleQubitOperator SingleQubitOperator::identity() {
    return {{ComplexAmplitude{1.0, 0.0}, {}, {}, ComplexAmplitude{1.0, 0.0}}};
}

SingleQubitOperator SingleQubitOperator::operator*(const SingleQubitOperator& o) const {
    SingleQubitOperator r;
    r.e[0] = e[0] * o.e[0] + e[1] * o.e[2];
    r.e[1] = e[0] * o.e[1] + e[1] * o.e[3];
    r.e[2] = e[2] * o.e[0] + e[3] * o.e[2];
    r.e[3] = e[2] * o.e[1] + e[3] * o.e[3];
    return r;
}

SingleQubitOperator SingleQubitOperator::adjoint() const {
    return {{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}};
}

double SingleQubitOperator::unitarity_defect() const {
    SingleQubitOperator p = adjoint() * (*this);
    p.e[0] -= 1.0;
    p.e[3] -= 1.0;
    double d = 0.0;
    for (const auto& v : p.e) d = std::max(d, std::abs(v));
    return d;
}

std::array<ComplexAmplitude, 2> apply_operator(const SingleQubitOperator& op,
                                      const std::array<ComplexAmplitude, 2>& state) {
    return {op.e[0] * state[0] + op.e[1] * state[1],
            op.e[2] * state[0] + op.e[3] * state[1]};
}

CouplingStrength::CouplingStrength(double alpha_radians) : alpha_(alpha_radians) {
    if (!(alpha_radians > 0.0) || !(alpha_radians <= kPi / 4.0 + 1e-15))
        throw std::invalid_argument("CouplingStrength: alpha must satisfy 0 < alpha <= pi/4");
}

SingleQubitOperator rotation_gate(const Vec3& axis, double angle) {
    double n = axis.norm();
    if (std::abs(n - 1.0) > 1e-9)
        throw std::invalid_argument("rotation_gate: axis must be unit length");
    Vec3 a{axis.x / n, axis.y / n, axis.z / n};
    double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    // cos(t/2) I - i sin(t/2) (ax X + ay Y + az Z)
    SingleQubitOperator u;
    u.e[0] = ComplexAmplitude{c, -s * a.z};
    u.e[1] = ComplexAmplitude{-s * a.y, -s * a.x};
    u.e[2] = ComplexAmplitude{s * a.y, -s * a.x};
    u.e[3] = ComplexAmplitude{c, s * a.z};
    return u;
}

DiagonalTwoQubitOperator interaction_gate(CouplingStrength alpha) {
    double a = alpha.value();
    ComplexAmplitude lo = std::exp(-kI * a), hi = std::exp(kI * a);
    return {{lo, hi, hi, lo}};
}

SingleQubitOperator adqc_single_backaction(double beta, int j) {
    SingleQubitOperator rz = rotation_gate({0.0, 0.0, 1.0}, beta);
    if (j % 2 != 0) {
        rz.e[2] = -rz.e[2];
        rz.e[3] = -rz.e[3];  // left-multiply by Z
    }
    return rz;
}

namespace {

// ancilla phase against register basis k: diag(e^{-ia s}, e^{+ia s}), s=(-1)^k
std::array<ComplexAmplitude, 2> interaction_phase(double alpha, int k,
                                                  const std::array<ComplexAmplitude, 2>& st) {
    double s = (k == 0) ? 1.0 : -1.0;
    return {std::exp(-kI * (alpha * s)) * st[0], std::exp(kI * (alpha * s)) * st[1]};
}

}  // namespace

SingleQubitOperator orientation_flip(CouplingStrength alpha, const StepConfig& config) {
    double a = alpha.value();
    SingleQubitOperator mid =
        rotation_gate(config.mid_rotation.axis, config.mid_rotation.angle);
    auto prep = bloch_state(config.prep_polar, config.prep_azimuth);
    Vec3 m0 = bloch_vector(apply_operator(mid, interaction_phase(a, 0, prep)));
    Vec3 m1 = bloch_vector(apply_operator(mid, interaction_phase(a, 1, prep)));
    Vec3 s = m0 + m1;
    if (s.norm() < 1e-9) {
        s = Vec3{std::sin(config.meas_polar) * std::cos(config.meas_azimuth),
                 std::sin(config.meas_polar) * std::sin(config.meas_azimuth),
                 std::cos(config.meas_polar)};
    }
    return rotation_gate(s.normalized(), kPi);
}

std::pair<DiagonalTwoQubitOperator, DiagonalTwoQubitOperator>
step_kraus(CouplingStrength alpha, const StepConfig& config) {
    double a = alpha.value();
    auto prep = bloch_state(config.prep_polar, config.prep_azimuth);
    SingleQubitOperator mid =
        rotation_gate(config.mid_rotation.axis, config.mid_rotation.angle);
    SingleQubitOperator between = mid;
    if (config.flip) between = orientation_flip(alpha, config) * mid;

    auto mplus = bloch_state(config.meas_polar, config.meas_azimuth);
    std::array<ComplexAmplitude, 2> mminus = {
        ComplexAmplitude{std::sin(config.meas_polar / 2.0), 0.0},
        -std::exp(kI * config.meas_azimuth) * std::cos(config.meas_polar / 2.0)};

    DiagonalTwoQubitOperator kp, km;
    for (int i = 0; i < 2; ++i) {
        auto v1 = apply_operator(between, interaction_phase(a, i, prep));
        for (int j = 0; j < 2; ++j) {
            auto v = interaction_phase(a, j, v1);
            kp.diag[2 * i + j] = std::conj(mplus[0]) * v[0] + std::conj(mplus[1]) * v[1];
            km.diag[2 * i + j] = std::conj(mminus[0]) * v[0] + std::conj(mminus[1]) * v[1];
        }
    }
    return {kp, km};
}

UnitaryCheck proportional_unitary_check(const DiagonalTwoQubitOperator& k, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("proportional_unitary_check: tol must be > 0");
    double lo = std::abs(k.diag[0]), hi = lo, sumsq = 0.0;
    for (const auto& v : k.diag) {
        double m = std::abs(v);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        sumsq += m * m;
    }
    UnitaryCheck r;
    r.valid = (hi - lo) <= tol;
    r.probability = r.valid ? sumsq / 4.0 : 0.0;
    return r;
}

double controlled_phase_angle(const DiagonalTwoQubitOperator& k, double tol) {
    if (!proportional_unitary_check(k, tol).valid)
        throw std::invalid_argument("controlled_phase_angle: operator not proportional to a unitary");
    ComplexAmplitude prod =
        k.diag[3] * std::conj(k.diag[2]) * std::conj(k.diag[1]) * k.diag[0];
    return wrap_pm_pi(std::arg(prod));
}

Vec3 bloch_vector(const std::array<ComplexAmplitude, 2>& state) {
    ComplexAmplitude c = std::conj(state[0]) * state[1];
    return {2.0 * c.real(), 2.0 * c.imag(), std::norm(state[0]) - std::norm(state[1])};
}

std::array<ComplexAmplitude, 2> bloch_state(double polar, double azimuth) {
    return {ComplexAmplitude{std::cos(polar / 2.0), 0.0},
            std::exp(kI * azimuth) * std::sin(polar / 2.0)};
}

}  // namespace czwalk
