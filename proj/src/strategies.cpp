#include "czwalk/strategies.hpp"

#include <cmath>
#include <stdexcept>

namespace czwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNodeTol = 1e-9;

StepPlan xbasis_plan(CouplingStrength alpha, bool flip) {
    StepConfig cfg = xbasis_config();
    cfg.flip = flip;
    StepOutcome out = characterize_step(alpha, cfg);
    StepPlan plan;
    plan.config = cfg;
    plan.success_port = 1;
    plan.success_phase = out.phi_port1;
    plan.success_prob = out.p_port1;
    plan.failure_phase = out.phi_port0;
    return plan;
}

}  // namespace

const char* strategy_name(StrategyKind kind) {
    switch (kind.family) {
        case StrategyFamily::Unguided:
            return "unguided";
        case StrategyFamily::FlipUndo:
            return "flip-undo";
        case StrategyFamily::OneStep:
            if (kind.mode.ports == 1) return "one-step-1p";
            return (kind.mode.dof == 1) ? "one-step-2p-1dof" : "one-step-2p-2dof";
    }
    return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "unguided") return StrategyKind::unguided();
    if (name == "flip-undo") return StrategyKind::flip_undo();
    if (name == "one-step-1p") return StrategyKind::one_step({1, 1});
    if (name == "one-step-2p-1dof") return StrategyKind::one_step({2, 1});
    if (name == "one-step-2p-2dof") return StrategyKind::one_step({2, 2});
    throw std::invalid_argument("unknown strategy: " + name);
}

double wrap_angle(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("wrap_angle: non-finite input");
    double y = std::fmod(x, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    if (y > kPi) y -= 2.0 * kPi;
    return y;
}

double remaining_to_target(const WalkState& state) {
    if (state.done) throw std::logic_error("remaining_to_target: walk already done");
    return wrap_angle(kPi - state.position);
}

StepPlan strategy_next(StrategyKind kind, CouplingStrength alpha, const WalkState& state) {
    if (state.done) throw std::logic_error("strategy_next: walk already done");
    switch (kind.family) {
        case StrategyFamily::Unguided:
            return xbasis_plan(alpha, false);
        case StrategyFamily::OneStep:
            return best_step(alpha, remaining_to_target(state), kind.mode);
        case StrategyFamily::FlipUndo: {
            // nodes: origin -> try pi; gamma and gamma - pi -> flipped step,
            // whose failure port undoes gamma
            if (std::abs(state.position) <= kNodeTol) return xbasis_plan(alpha, false);
            double gamma = characterize_step(alpha, xbasis_config()).phi_port0;
            double d1 = std::abs(wrap_angle(state.position - gamma));
            double d2 = std::abs(wrap_angle(state.position - (gamma - kPi)));
            if (std::min(d1, d2) > kNodeTol)
                throw std::logic_error("flip-undo walk left its 3-node loop");
            return xbasis_plan(alpha, true);
        }
    }
    throw std::logic_error("strategy_next: unknown strategy");
}

WalkState advance(const WalkState& state, const StepPlan& plan, int outcome,
                  const TargetRule& rule) {
    if (state.done) throw std::logic_error("advance: walk already done");
    if (outcome != 0 && outcome != 1)
        throw std::invalid_argument("advance: outcome must be 0 or 1");
    double realized =
        (outcome == plan.success_port) ? plan.success_phase : plan.failure_phase;
    WalkState next;
    next.position = wrap_angle(state.position + realized);
    next.steps = state.steps + 1;
    next.done =
        std::abs(wrap_angle(next.position - kPi)) <= std::max(rule.epsilon, 1e-9);
    return next;
}

}  // namespace czwalk
