#include "czwalk/stepmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

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

StepOutcome label_ports(double phi_plus, double p_plus, double phi_minus, double p_minus) {
    StepOutcome out;
    out.valid = true;
    // port 1 = larger |phi|, ties to the "-" outcome
    if (std::abs(phi_minus) >= std::abs(phi_plus) - 1e-12) {
        out.phi_port1 = phi_minus;
        out.p_port1 = p_minus;
        out.phi_port0 = phi_plus;
        out.p_port0 = p_plus;
        out.port1_raw = 1;
    } else {
        out.phi_port1 = phi_plus;
        out.p_port1 = p_plus;
        out.phi_port0 = phi_minus;
        out.p_port0 = p_minus;
        out.port1_raw = 0;
    }
    return out;
}

}  // namespace

StepOutcome characterize_step(CouplingStrength alpha, const StepConfig& config, double tol) {
    auto [kp, km] = step_kraus(alpha, config);
    UnitaryCheck cp = proportional_unitary_check(kp, tol);
    UnitaryCheck cm = proportional_unitary_check(km, tol);
    if (!cp.valid || !cm.valid) return StepOutcome{};
    double php = controlled_phase_angle(kp, tol);
    double phm = controlled_phase_angle(km, tol);
    return label_ports(php, cp.probability, phm, cm.probability);
}

StepConfig xbasis_config() {
    StepConfig c;
    c.prep_polar = kPi / 2.0;
    c.prep_azimuth = 0.0;
    c.mid_rotation = {{1.0, 0.0, 0.0}, kPi / 2.0};
    c.flip = false;
    c.meas_polar = kPi / 2.0;
    c.meas_azimuth = 0.0;
    return c;
}

StepOutcome xbasis_closed_form(CouplingStrength alpha) {
    double a = alpha.value();
    StepOutcome out;
    out.valid = true;
    double s2 = std::sin(2.0 * a);
    out.phi_port1 = kPi;
    out.p_port1 = s2 * s2 / 2.0;
    double t = std::tan(a);
    out.phi_port0 = wrap_pm_pi(-4.0 * std::atan(t * t));
    out.p_port0 = 1.0 - out.p_port1;
    out.port1_raw = 1;
    return out;
}

StepConfig apply_flip(const StepConfig& config) {
    StepConfig c = config;
    c.flip = !c.flip;
    return c;
}

std::array<Vec3, 4> bloch_points(CouplingStrength alpha, const StepConfig& config) {
    double a = alpha.value();
    auto prep = bloch_state(config.prep_polar, config.prep_azimuth);
    SingleQubitOperator mid =
        rotation_gate(config.mid_rotation.axis, config.mid_rotation.angle);

    SingleQubitOperator between = mid;
    if (config.flip) between = orientation_flip(alpha, config) * mid;

    std::array<Vec3, 4> pts;
    for (int i = 0; i < 2; ++i) {
        double si = (i == 0) ? 1.0 : -1.0;
        std::array<ComplexAmplitude, 2> v = {std::exp(-kI * (a * si)) * prep[0],
                                             std::exp(kI * (a * si)) * prep[1]};
        v = apply_operator(between, v);
        for (int j = 0; j < 2; ++j) {
            double sj = (j == 0) ? 1.0 : -1.0;
            std::array<ComplexAmplitude, 2> w = {std::exp(-kI * (a * sj)) * v[0],
                                                 std::exp(kI * (a * sj)) * v[1]};
            pts[2 * i + j] = bloch_vector(w);
        }
    }
    return pts;
}

bool concyclic_about(const Vec3& axis, const std::array<Vec3, 4>& points, double tol) {
    Vec3 n = axis.normalized();
    double lo = n.dot(points[0]), hi = lo;
    for (const auto& p : points) {
        double d = n.dot(p);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return (hi - lo) <= tol;
}

namespace {

// measurement polar angle pinned by the circle condition
double meas_polar_of(double alpha, double theta) {
    return std::atan2(std::sin(theta), std::cos(theta) * std::cos(2.0 * alpha));
}

}  // namespace

StepOutcome parametric_outcome(CouplingStrength alpha, double beta, double theta) {
    double a = alpha.value();
    double tm = meas_polar_of(a, theta);
    double cm = std::cos(tm / 2.0), sm = std::sin(tm / 2.0);
    ComplexAmplitude ap[4], am[4];
    for (int i = 0; i < 2; ++i) {
        double psi = (i == 0) ? theta - 2.0 * beta : theta + 2.0 * beta;
        double c = std::cos(psi / 2.0), s = std::sin(psi / 2.0);
        for (int j = 0; j < 2; ++j) {
            double sj = (j == 0) ? 1.0 : -1.0;
            ComplexAmplitude ph = std::exp(kI * (sj * 2.0 * a));
            ap[2 * i + j] = cm * c + ph * (sm * s);
            am[2 * i + j] = sm * c - ph * (cm * s);
        }
    }
    auto port = [](const ComplexAmplitude* v, double& phi, double& p) {
        p = 0.0;
        for (int k = 0; k < 4; ++k) p += std::norm(v[k]);
        p /= 4.0;
        phi = wrap_pm_pi(std::arg(v[3] * std::conj(v[2]) * std::conj(v[1]) * v[0]));
    };
    double php, pp, phm, pm;
    port(ap, php, pp);
    port(am, phm, pm);
    return label_ports(php, pp, phm, pm);
}

StepConfig config_from_parameters(CouplingStrength alpha, double beta, double theta,
                                  bool flip) {
    double a = alpha.value();
    if (beta < 0.0 || beta > a + 1e-12)
        throw std::invalid_argument("config_from_parameters: beta must lie in [0, alpha]");
    double sb = std::sin(2.0 * beta) / std::sin(2.0 * a);
    double ap = std::asin(std::clamp(sb, -1.0, 1.0));

    StepConfig c;
    c.prep_polar = ap;
    c.prep_azimuth = 0.0;
    c.flip = flip;

    double plane_az = std::atan2(-std::cos(ap), std::sin(ap) * std::cos(2.0 * a));
    Vec3 normal{-std::sin(plane_az), std::cos(plane_az), 0.0};
    SingleQubitOperator mid =
        rotation_gate(normal, theta - kPi / 2.0) * rotation_gate({1.0, 0.0, 0.0}, kPi / 2.0);
    // extract (axis, angle) from the SU(2) product: U = cos(t/2) I - i sin(t/2) n.sigma
    double cos_half = mid.e[0].real() + mid.e[3].real();
    cos_half /= 2.0;
    Vec3 sn{-mid.e[1].imag(), -mid.e[1].real(), -mid.e[0].imag()};
    double sin_half = sn.norm();
    if (sin_half < 1e-12) {
        c.mid_rotation = {{1.0, 0.0, 0.0}, 0.0};
    } else {
        c.mid_rotation = {sn.normalized(), 2.0 * std::atan2(sin_half, cos_half)};
    }

    double tm = meas_polar_of(a, theta);
    Vec3 u{std::cos(plane_az), std::sin(plane_az), 0.0};
    Vec3 m{u.x * std::sin(tm), u.y * std::sin(tm), std::cos(tm)};
    c.meas_polar = std::acos(std::clamp(m.z, -1.0, 1.0));
    c.meas_azimuth = std::atan2(m.y, m.x);
    return c;
}

double max_port0_angle(CouplingStrength alpha) {
    double t = std::tan(alpha.value());
    return 4.0 * std::atan(t * t);
}

}  // namespace czwalk
