#include "czwalk/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace czwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_pm_pi(double x) {
    double y = std::fmod(x, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    if (y > kPi) y -= 2.0 * kPi;
    return y;
}

constexpr int kScanPoints = 1024;
constexpr int kBisectIters = 90;

// |port angle| as a function of the scanned parameter
template <typename F>
std::optional<double> bracket_and_bisect(F&& f, double lo, double hi, double t,
                                         bool scan_from_high, int points = kScanPoints) {
    double prev_x = scan_from_high ? hi : lo;
    double prev_g = f(prev_x) - t;
    if (std::abs(prev_g) < 1e-13) return prev_x;
    for (int k = 1; k <= points; ++k) {
        double x = scan_from_high ? hi - (hi - lo) * k / points
                                  : lo + (hi - lo) * k / points;
        double g = f(x) - t;
        if (std::abs(g) < 1e-13) return x;
        if ((g < 0.0) != (prev_g < 0.0)) {
            double a = prev_x, b = x, ga = prev_g;
            for (int it = 0; it < kBisectIters; ++it) {
                double m = 0.5 * (a + b);
                double gm = f(m) - t;
                if (std::abs(gm) < 1e-14) return m;
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        prev_x = x;
        prev_g = g;
    }
    return std::nullopt;
}

StepPlan make_plan(CouplingStrength alpha, double beta, double theta, int port,
                   double target) {
    StepOutcome out = parametric_outcome(alpha, beta, theta);
    double succ = (port == 1) ? out.phi_port1 : out.phi_port0;
    double fail = (port == 1) ? out.phi_port0 : out.phi_port1;
    // flip when the realized sign disagrees with the requested one; pi is its
    // own negation under the wrap so it never needs (or tolerates) a flip
    bool flip = false;
    if (std::abs(std::abs(target) - kPi) > 1e-12 && (succ > 0.0) != (target > 0.0))
        flip = true;
    if (flip) {
        succ = wrap_pm_pi(-succ);
        fail = wrap_pm_pi(-fail);
    }
    StepPlan plan;
    plan.config = config_from_parameters(alpha, beta, theta, flip);
    plan.success_port = port;
    plan.success_phase = succ;
    plan.success_prob = (port == 1) ? out.p_port1 : out.p_port0;
    plan.failure_phase = fail;
    return plan;
}

double port_abs_angle(CouplingStrength alpha, double beta, double theta, int port) {
    StepOutcome out = parametric_outcome(alpha, beta, theta);
    return std::abs(port == 1 ? out.phi_port1 : out.phi_port0);
}

double port_prob(CouplingStrength alpha, double beta, double theta, int port) {
    StepOutcome out = parametric_outcome(alpha, beta, theta);
    return (port == 1) ? out.p_port1 : out.p_port0;
}

struct ParamPoint {
    double beta, theta, prob;
};

// Solve |phi_port| = t along beta at fixed theta. Port 1 probability grows
// with beta so its scan runs from the high end; port 0 prefers small beta.
std::optional<ParamPoint> solve_beta_at(CouplingStrength alpha, double theta, double t,
                                        int port) {
    auto f = [&](double b) { return port_abs_angle(alpha, b, theta, port); };
    auto b = bracket_and_bisect(f, 0.0, alpha.value(), t, /*scan_from_high=*/port == 1);
    if (!b) return std::nullopt;
    return ParamPoint{*b, theta, port_prob(alpha, *b, theta, port)};
}

std::optional<ParamPoint> solve_theta_at(CouplingStrength alpha, double beta, double t,
                                         int port) {
    auto f = [&](double th) { return port_abs_angle(alpha, beta, th, port); };
    auto th = bracket_and_bisect(f, 1e-7, kPi / 2.0, t, /*scan_from_high=*/port == 1);
    if (!th) return std::nullopt;
    return ParamPoint{beta, *th, port_prob(alpha, beta, *th, port)};
}

// 2-dof search: log-spaced sweep of theta with an inner beta solve, then a
// golden-section refinement of theta around the best grid cell.
std::optional<ParamPoint> solve_two_dof(CouplingStrength alpha, double t, int port) {
    constexpr int kThetaGrid = 96;
    const double th_lo = 1e-6, th_hi = kPi / 2.0;
    const double ratio = std::pow(th_hi / th_lo, 1.0 / (kThetaGrid - 1));

    std::vector<double> thetas(kThetaGrid);
    for (int k = 0; k < kThetaGrid; ++k) thetas[k] = th_lo * std::pow(ratio, k);
    thetas.back() = th_hi;

    int best = -1;
    std::optional<ParamPoint> best_pt;
    for (int k = 0; k < kThetaGrid; ++k) {
        auto pt = solve_beta_at(alpha, thetas[k], t, port);
        if (pt && (!best_pt || pt->prob > best_pt->prob)) {
            best_pt = pt;
            best = k;
        }
    }
    if (!best_pt) return std::nullopt;

    // refine in log(theta) between the neighbors of the best grid point
    double lo = std::log(thetas[std::max(0, best - 1)]);
    double hi = std::log(thetas[std::min(kThetaGrid - 1, best + 1)]);
    auto eval = [&](double lth) -> std::optional<ParamPoint> {
        return solve_beta_at(alpha, std::exp(lth), t, port);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    auto p1 = eval(x1), p2 = eval(x2);
    for (int it = 0; it < 60 && (hi - lo) > 1e-12; ++it) {
        double f1 = p1 ? p1->prob : -1.0, f2 = p2 ? p2->prob : -1.0;
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            p1 = p2;
            x2 = lo + gr * (hi - lo);
            p2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            p2 = p1;
            x1 = hi - gr * (hi - lo);
            p1 = eval(x1);
        }
    }
    for (const auto& p : {p1, p2})
        if (p && p->prob > best_pt->prob) best_pt = p;
    return best_pt;
}

}  // namespace

StepPlan solve_port1(CouplingStrength alpha, double target, int dof, ScanVariant variant) {
    double t = std::abs(target);
    if (!(t > 0.0) || t > kPi + 1e-12)
        throw std::invalid_argument("solve_port1: target must satisfy 0 < |target| <= pi");
    if (dof != 1 && dof != 2) throw std::invalid_argument("solve_port1: dof must be 1 or 2");

    std::optional<ParamPoint> pt;
    if (t >= kPi - 1e-12) {
        pt = ParamPoint{alpha.value(), kPi / 2.0,
                        port_prob(alpha, alpha.value(), kPi / 2.0, 1)};
    } else if (dof == 1) {
        pt = (variant == ScanVariant::Prep) ? solve_beta_at(alpha, kPi / 2.0, t, 1)
                                            : solve_theta_at(alpha, alpha.value(), t, 1);
    } else {
        pt = solve_two_dof(alpha, t, 1);
    }
    if (!pt) throw std::runtime_error("solve_port1: failed to bracket the target angle");
    return make_plan(alpha, pt->beta, pt->theta, 1, target);
}

std::optional<StepPlan> solve_port0(CouplingStrength alpha, double target, int dof) {
    double t = std::abs(target);
    if (!(t > 0.0) || !(t < kPi))
        throw std::invalid_argument("solve_port0: target must satisfy 0 < |target| < pi");
    if (dof != 1 && dof != 2) throw std::invalid_argument("solve_port0: dof must be 1 or 2");
    if (t > max_port0_angle(alpha) + 1e-12) return std::nullopt;

    std::optional<ParamPoint> pt = (dof == 1) ? solve_beta_at(alpha, kPi / 2.0, t, 0)
                                              : solve_two_dof(alpha, t, 0);
    if (!pt) return std::nullopt;
    return make_plan(alpha, pt->beta, pt->theta, 0, target);
}

CouplingStrength threshold_alpha(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("threshold_alpha: tol must be > 0");
    // |phi0| of the first-step (x-basis) configuration is monotone in alpha
    auto failure_mag = [](double a) {
        return std::abs(
            characterize_step(CouplingStrength{a}, xbasis_config()).phi_port0);
    };
    double lo = 0.05, hi = kPi / 4.0;
    while (hi - lo > tol) {
        double m = 0.5 * (lo + hi);
        if (failure_mag(m) < kPi / 2.0)
            lo = m;
        else
            hi = m;
    }
    return CouplingStrength{0.5 * (lo + hi)};
}

StepPlan best_step(CouplingStrength alpha, double remaining, ControlMode mode) {
    if (!(std::abs(remaining) > 0.0) || remaining > kPi + 1e-12 || remaining <= -kPi)
        throw std::invalid_argument("best_step: remaining must lie in (-pi, pi] and be nonzero");
    StepPlan p1 = solve_port1(alpha, remaining, mode.dof);
    if (mode.ports == 1) return p1;
    if (std::abs(remaining) < kPi) {
        auto p0 = solve_port0(alpha, remaining, mode.dof);
        if (p0 && p0->success_prob >= p1.success_prob - 1e-12) return *p0;
    }
    return p1;
}

}  // namespace czwalk
