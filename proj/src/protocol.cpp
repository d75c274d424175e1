#include "czwalk/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace czwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kExactTol = 1e-9;

bool in_target(double pos, double epsilon) {
    return std::abs(wrap_angle(pos - kPi)) <= std::max(epsilon, kExactTol);
}

struct PortView {
    double phi[2];   // angle by raw outcome bit
    double prob[2];  // probability by raw outcome bit
};

PortView view_by_raw(const StepOutcome& out) {
    PortView v{};
    int r1 = out.port1_raw;
    v.phi[r1] = out.phi_port1;
    v.prob[r1] = out.p_port1;
    v.phi[1 - r1] = out.phi_port0;
    v.prob[1 - r1] = out.p_port0;
    return v;
}

int raw_of_port(const StepOutcome& out, int port) {
    return (port == 1) ? out.port1_raw : 1 - out.port1_raw;
}

// Exact CDF of an automaton tape by forward mass iteration, galloped until
// it certifies q (or n_cap).
std::vector<double> automaton_cdf(const std::vector<TapeEntry>& entries,
                                  CouplingStrength alpha, double q,
                                  std::uint64_t n_cap) {
    std::vector<PortView> views;
    views.reserve(entries.size());
    for (const auto& e : entries) views.push_back(view_by_raw(characterize_step(alpha, e.config)));

    std::vector<double> mass(entries.size(), 0.0), next(entries.size(), 0.0);
    mass[0] = 1.0;
    std::vector<double> cdf{0.0};  // cdf[0] = 0
    double absorbed = 0.0;
    while (cdf.size() <= n_cap && absorbed < q && (1.0 - absorbed) > 1e-15) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t e = 0; e < entries.size(); ++e) {
            if (mass[e] == 0.0) continue;
            for (int raw = 0; raw < 2; ++raw) {
                double m = mass[e] * views[e].prob[raw];
                if (m == 0.0) continue;
                bool stop = entries[e].stop_on_port && *entries[e].stop_on_port == raw;
                std::int32_t to = -2;
                if (!stop && entries[e].branch) {
                    to = (*entries[e].branch)[raw];
                    if (to == kTapeStop) stop = true;
                }
                if (stop) {
                    absorbed += m;
                } else if (to >= 0 && static_cast<std::size_t>(to) < entries.size()) {
                    next[to] += m;
                }  // falling off the tape loses the mass (failure)
            }
        }
        mass.swap(next);
        cdf.push_back(absorbed);
    }
    return cdf;
}

std::uint64_t quantile_from_cdf(const std::vector<double>& cdf, double q) {
    for (std::size_t n = 1; n < cdf.size(); ++n)
        if (cdf[n] >= q) return n;
    throw std::runtime_error("plan_session: exact CDF did not reach the quantile");
}

// Position automaton for strategies whose plan depends only on the current
// node (unguided, flip-undo): BFS over reachable positions, transitions that
// land in the target region become kTapeStop.
std::vector<TapeEntry> build_position_automaton(StrategyKind kind, CouplingStrength alpha,
                                                double epsilon, std::size_t max_states) {
    auto key_of = [](double pos) { return std::llround(pos * 1e9); };
    std::map<long long, std::int32_t> index;
    std::vector<TapeEntry> entries;
    std::vector<double> positions;
    std::deque<std::int32_t> frontier;

    index[key_of(0.0)] = 0;
    positions.push_back(0.0);
    entries.emplace_back();
    frontier.push_back(0);

    while (!frontier.empty()) {
        std::int32_t e = frontier.front();
        frontier.pop_front();
        WalkState st{positions[e], 0, false};
        StepPlan plan = strategy_next(kind, alpha, st);
        StepOutcome out = characterize_step(alpha, plan.config);
        entries[e].config = plan.config;
        std::array<std::int32_t, 2> br{};
        for (int raw = 0; raw < 2; ++raw) {
            int port = (raw == out.port1_raw) ? 1 : 0;
            double ang = (port == 1) ? out.phi_port1 : out.phi_port0;
            double npos = wrap_angle(positions[e] + ang);
            if (in_target(npos, epsilon)) {
                br[raw] = kTapeStop;
                continue;
            }
            long long k = key_of(npos);
            auto it = index.find(k);
            if (it == index.end()) {
                if (entries.size() >= max_states)
                    throw std::invalid_argument(
                        "plan_session: strategy not expressible within the state limit");
                std::int32_t id = static_cast<std::int32_t>(entries.size());
                index[k] = id;
                positions.push_back(npos);
                entries.emplace_back();
                frontier.push_back(id);
                br[raw] = id;
            } else {
                br[raw] = it->second;
            }
        }
        entries[e].branch = br;
    }
    return entries;
}

}  // namespace

std::vector<double> unguided_exact_cdf(CouplingStrength alpha, double epsilon,
                                       std::uint64_t n_max) {
    StepOutcome xb = characterize_step(alpha, xbasis_config());
    double gamma = xb.phi_port0, p1 = xb.p_port1;
    double p0 = 1.0 - p1;

    // state after n steps: (k gamma-steps, parity of pi-steps). The k-mass
    // is a traveling binomial front of width O(sqrt(n)), so the DP keeps a
    // pruned sliding window [k0, k0 + mass.size()).
    constexpr double kPrune = 1e-22;
    auto absorbing = [&](std::uint64_t k, int par) {
        return in_target(
            wrap_angle(static_cast<double>(k) * gamma + (par ? kPi : 0.0)), epsilon);
    };
    std::uint64_t k0 = 0;
    std::vector<std::array<double, 2>> mass{{1.0, 0.0}}, next;

    std::vector<double> cdf{0.0};
    double absorbed = 0.0;
    for (std::uint64_t n = 1; n <= n_max && (1.0 - absorbed) > 1e-15; ++n) {
        next.assign(mass.size() + 1, {0.0, 0.0});
        for (std::size_t i = 0; i < mass.size(); ++i) {
            std::uint64_t k = k0 + i;
            for (int par = 0; par < 2; ++par) {
                double m = mass[i][par];
                if (m == 0.0) continue;
                double m0 = m * p0;  // gamma step
                if (absorbing(k + 1, par))
                    absorbed += m0;
                else
                    next[i + 1][par] += m0;
                double m1 = m * p1;  // pi step
                if (absorbing(k, par ^ 1))
                    absorbed += m1;
                else
                    next[i][par ^ 1] += m1;
            }
        }
        std::size_t lo = 0, hi = next.size();
        while (lo < hi && next[lo][0] < kPrune && next[lo][1] < kPrune) ++lo;
        while (hi > lo && next[hi - 1][0] < kPrune && next[hi - 1][1] < kPrune) --hi;
        mass.assign(next.begin() + static_cast<std::ptrdiff_t>(lo),
                    next.begin() + static_cast<std::ptrdiff_t>(hi));
        k0 += lo;
        cdf.push_back(absorbed);
        if (mass.empty()) break;
    }
    return cdf;
}

InstructionTape plan_session(StrategyKind kind, CouplingStrength alpha, double q,
                             double epsilon) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("plan_session: q must lie in (0, 1)");
    if (kind.family == StrategyFamily::OneStep && kind.mode.ports == 2 &&
        kind.mode.dof == 2)
        throw std::invalid_argument(
            "plan_session: one-step 2-port/2-dof plans depend on a continuum of "
            "positions and have no finite tape");

    InstructionTape tape;
    tape.kind = kind;
    tape.alpha = alpha.value();

    if (kind.family == StrategyFamily::Unguided || kind.family == StrategyFamily::FlipUndo) {
        double eps = (kind.family == StrategyFamily::Unguided) ? epsilon : 0.0;
        std::size_t max_states =
            (kind.family == StrategyFamily::FlipUndo) ? 8 : 1u << 20;
        tape.entries = build_position_automaton(kind, alpha, eps, max_states);
        auto cdf = automaton_cdf(tape.entries, alpha, q, 1u << 22);
        tape.packet_size = quantile_from_cdf(cdf, q);
        return tape;
    }

    // one-step chains: the failure path is deterministic, entries are the
    // per-ancilla settings along it
    double pos = 0.0;
    double survival = 1.0;
    constexpr std::uint64_t kChainCap = 1u << 20;
    for (std::uint64_t t = 0; t < kChainCap; ++t) {
        StepPlan plan = best_step(alpha, wrap_angle(kPi - pos), kind.mode);
        StepOutcome out = characterize_step(alpha, plan.config);
        TapeEntry entry;
        entry.config = plan.config;
        int succ_raw = raw_of_port(out, plan.success_port);
        entry.stop_on_port = succ_raw;
        double fail_pos = wrap_angle(pos + plan.failure_phase);
        bool fail_hits = in_target(fail_pos, 0.0);
        if (kind.mode.ports == 2 || fail_hits) {
            std::array<std::int32_t, 2> br{};
            br[succ_raw] = kTapeStop;
            br[1 - succ_raw] = fail_hits ? kTapeStop
                                         : static_cast<std::int32_t>(tape.entries.size() + 1);
            entry.branch = br;
        }
        tape.entries.push_back(entry);
        survival *= 1.0 - plan.success_prob;
        if (fail_hits) survival = 0.0;
        if (1.0 - survival >= q) {
            tape.packet_size = t + 1;
            return tape;
        }
        pos = fail_pos;
    }
    throw std::runtime_error("plan_session: one-step chain failed to reach the quantile");
}

SessionTranscript execute_session(const InstructionTape& tape, CouplingStrength alpha,
                                  RandomStream& stream) {
    if (tape.entries.empty()) throw std::invalid_argument("execute_session: empty tape");
    std::vector<std::optional<PortView>> views(tape.entries.size());

    SessionTranscript t;
    t.messages_alice_to_bob = 1;  // tape + packet, sent up front
    t.messages_bob_to_alice = 1;  // final report
    double pos = 0.0;
    std::size_t entry = 0;
    for (std::uint64_t consumed = 1; consumed <= tape.packet_size; ++consumed) {
        if (!views[entry])
            views[entry] = view_by_raw(characterize_step(alpha, tape.entries[entry].config));
        const PortView& v = *views[entry];
        int raw = (stream.next_unit() < v.prob[0]) ? 0 : 1;
        t.outcomes.push_back(raw);
        pos = wrap_angle(pos + v.phi[raw]);

        const TapeEntry& e = tape.entries[entry];
        bool stop = e.stop_on_port && *e.stop_on_port == raw;
        std::int32_t to = static_cast<std::int32_t>(entry) + 1;
        if (!stop && e.branch) {
            to = (*e.branch)[raw];
            if (to == kTapeStop) stop = true;
        }
        if (stop) {
            t.stopped_at = consumed;
            t.succeeded = true;
            t.final_position = pos;
            return t;
        }
        if (to < 0 || static_cast<std::size_t>(to) >= tape.entries.size()) break;
        entry = static_cast<std::size_t>(to);
    }
    t.stopped_at = tape.packet_size;
    t.succeeded = false;
    t.final_position = pos;
    return t;
}

bool verify_transcript(const SessionTranscript& t, double epsilon) {
    return t.succeeded && in_target(t.final_position, epsilon);
}

void write_transcript(std::ostream& os, const SessionTranscript& t,
                      const InstructionTape& tape, std::uint64_t seed) {
    char buf[64];
    os << "czwalk-session v1\n";
    os << "seed " << seed << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", tape.alpha);
    os << "alpha " << buf << "\n";
    os << "strategy " << strategy_name(tape.kind) << "\n";
    os << "packet_size " << tape.packet_size << "\n";
    os << "stopped_at " << t.stopped_at << "\n";
    os << "succeeded " << (t.succeeded ? 1 : 0) << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", t.final_position);
    os << "final_position " << buf << "\n";
    os << "outcomes " << t.outcomes.size() << "\n";
    for (int b : t.outcomes) os << b << "\n";
}

SessionTranscript read_transcript(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "czwalk-session v1")
        throw std::runtime_error("read_transcript: bad header");
    SessionTranscript t;
    std::size_t n_outcomes = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "stopped_at")
            ls >> t.stopped_at;
        else if (key == "succeeded") {
            int v = 0;
            ls >> v;
            t.succeeded = v != 0;
        } else if (key == "final_position")
            ls >> t.final_position;
        else if (key == "outcomes") {
            ls >> n_outcomes;
            break;
        }
    }
    t.messages_alice_to_bob = 1;
    t.messages_bob_to_alice = 1;
    for (std::size_t i = 0; i < n_outcomes && std::getline(is, line); ++i)
        t.outcomes.push_back(line == "1" ? 1 : 0);
    if (t.outcomes.size() != n_outcomes)
        throw std::runtime_error("read_transcript: truncated outcome list");
    return t;
}

}  // namespace czwalk
