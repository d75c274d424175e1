#include "czwalk/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "czwalk/protocol.hpp"

namespace czwalk {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream os(dir / name, std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    return os;
}

std::vector<double> default_grid(double lo_frac, double hi_frac, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k)
        g[k] = (lo_frac + (hi_frac - lo_frac) * k / (n - 1)) * (kPi / 4.0);
    return g;
}

json config_echo(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["alpha_grid"] = c.alpha_grid;
    j["epsilon"] = c.epsilon;
    j["n_trials"] = c.n_trials;
    j["seed"] = c.seed;
    j["quantile"] = c.quantile;
    j["output_dir"] = c.output_dir;
    if (!c.strategy.empty()) j["strategy"] = c.strategy;
    if (c.n_sessions) j["n_sessions"] = c.n_sessions;
    return j;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void write_summary(const ExperimentConfig& c, json results, double wall) {
    json j;
    j["experiment"] = c.experiment;
    j["config"] = config_echo(c);
    j["results"] = std::move(results);
    j["wall_clock_s"] = wall;
    j["seed"] = c.seed;
    auto os = open_out(c.output_dir, "summary.json");
    os << j.dump(2) << "\n";
}

// mean/std/n999 row for one (alpha, strategy) cell: Monte Carlo moments plus
// the exact 99.9% packet size where a closed form exists
struct CurveRow {
    double alpha;
    std::string strategy;
    double mean, stddev;
    std::uint64_t n999;
};

std::uint64_t exact_n999(StrategyKind kind, double alpha, double epsilon, double q,
                         const HittingDistribution& dist) {
    switch (kind.family) {
        case StrategyFamily::FlipUndo:
            // automaton CDF; equals the closed form except at the
            // degenerate alpha = pi/4 point where failures also land on pi
            return plan_session(kind, CouplingStrength{alpha}, q, epsilon).packet_size;
        case StrategyFamily::Unguided: {
            auto cdf = unguided_exact_cdf(CouplingStrength{alpha}, epsilon, 1u << 22);
            for (std::uint64_t n = 1; n < cdf.size(); ++n)
                if (cdf[n] >= q) return n;
            return quantile_N(dist, q).n;
        }
        case StrategyFamily::OneStep: {
            if (kind.mode.ports == 2 && kind.mode.dof == 2)
                return quantile_N(dist, q).n;  // no finite closed form
            return plan_session(kind, CouplingStrength{alpha}, q, epsilon).packet_size;
        }
    }
    return quantile_N(dist, q).n;
}

CurveRow curve_cell(StrategyKind kind, double alpha, const ExperimentConfig& c,
                    std::uint64_t trials, std::uint64_t seed_salt) {
    RunSpec spec;
    spec.kind = kind;
    spec.alpha = alpha;
    spec.epsilon = c.epsilon;
    spec.n_trials = trials;
    spec.master_seed = c.seed + seed_salt;
    HittingDistribution dist = run_trials(spec);
    SummaryStats st = summarize(dist);
    return {alpha, strategy_name(kind), st.mean, st.std_dev,
            exact_n999(kind, alpha, c.epsilon, c.quantile, dist)};
}

void write_curve_csv(const ExperimentConfig& c, const std::vector<CurveRow>& rows) {
    auto os = open_out(c.output_dir, "expectation.csv");
    os << "alpha,strategy,mean,std,n999\n";
    for (const auto& r : rows)
        os << fmt_g(r.alpha) << "," << r.strategy << "," << fmt_g(r.mean) << ","
           << fmt_g(r.stddev) << "," << r.n999 << "\n";
}

// --- experiments ----------------------------------------------------------

void run_fig4(const ExperimentConfig& c) {
    Timer timer;
    double alpha = c.alpha_grid.empty() ? kPi / 16.0 : c.alpha_grid.front();
    std::uint64_t trials = c.n_trials ? c.n_trials : 10000;
    RunSpec spec{StrategyKind::unguided(), alpha, c.epsilon, trials, c.seed, 1000000};
    HittingDistribution dist = run_trials(spec);
    auto os = open_out(c.output_dir, "histogram.csv");
    os << "hitting_time,count\n";
    for (const auto& [n, k] : dist.counts) os << n << "," << k << "\n";
    SummaryStats st = summarize(dist);
    json res;
    res["alpha"] = alpha;
    res["mean"] = st.mean;
    res["std"] = st.std_dev;
    res["trials"] = trials;
    res["overflow"] = dist.overflow;
    write_summary(c, res, timer.seconds());
}

void run_simulate(const ExperimentConfig& c) {
    Timer timer;
    StrategyKind kind = parse_strategy(c.strategy.empty() ? "unguided" : c.strategy);
    double alpha = c.alpha_grid.empty() ? kPi / 16.0 : c.alpha_grid.front();
    std::uint64_t trials = c.n_trials ? c.n_trials : 10000;
    RunSpec spec{kind, alpha, c.epsilon, trials, c.seed, 1000000};
    HittingDistribution dist = run_trials(spec);
    auto os = open_out(c.output_dir, "histogram.csv");
    os << "hitting_time,count\n";
    for (const auto& [n, k] : dist.counts) os << n << "," << k << "\n";
    SummaryStats st = summarize(dist);
    json res;
    res["alpha"] = alpha;
    res["strategy"] = strategy_name(kind);
    res["mean"] = st.mean;
    res["std"] = st.std_dev;
    res["n999_empirical"] = quantile_N(dist, c.quantile).n;
    res["overflow"] = dist.overflow;
    write_summary(c, res, timer.seconds());
}

void run_fig6(const ExperimentConfig& c) {
    Timer timer;
    auto grid = c.alpha_grid.empty() ? default_grid(0.05, 1.0, 20) : c.alpha_grid;
    std::uint64_t trials = c.n_trials ? c.n_trials : 10000;
    std::vector<StrategyKind> kinds = {StrategyKind::unguided(),
                                       StrategyKind::one_step({1, 1}),
                                       StrategyKind::flip_undo()};
    std::vector<CurveRow> rows;
    std::uint64_t salt = 0;
    for (double a : grid)
        for (const auto& k : kinds) rows.push_back(curve_cell(k, a, c, trials, ++salt));
    write_curve_csv(c, rows);
    json res;
    res["points"] = rows.size();
    res["trials_per_point"] = trials;
    write_summary(c, res, timer.seconds());
}

void run_fig7(const ExperimentConfig& c) {
    Timer timer;
    auto grid = c.alpha_grid.empty() ? default_grid(0.1, 1.0, 19) : c.alpha_grid;
    std::uint64_t trials = c.n_trials ? c.n_trials : 10000;
    std::vector<StrategyKind> kinds = {StrategyKind::one_step({1, 1}),
                                       StrategyKind::flip_undo()};
    std::vector<CurveRow> rows;
    std::uint64_t salt = 0;
    for (double a : grid)
        for (const auto& k : kinds) rows.push_back(curve_cell(k, a, c, trials, ++salt));
    write_curve_csv(c, rows);
    json res;
    res["points"] = rows.size();
    res["quantile"] = c.quantile;
    write_summary(c, res, timer.seconds());
}

void run_fig8(const ExperimentConfig& c) {
    Timer timer;
    auto grid = c.alpha_grid.empty() ? default_grid(0.70, 0.99, 16) : c.alpha_grid;
    std::uint64_t trials = c.n_trials ? c.n_trials : 20000;
    std::vector<StrategyKind> kinds = {StrategyKind::one_step({1, 1}),
                                       StrategyKind::one_step({2, 1}),
                                       StrategyKind::one_step({2, 2})};
    std::vector<CurveRow> rows;
    std::uint64_t salt = 0;
    for (double a : grid)
        for (const auto& k : kinds) rows.push_back(curve_cell(k, a, c, trials, ++salt));
    write_curve_csv(c, rows);
    json res;
    res["points"] = rows.size();
    write_summary(c, res, timer.seconds());
}

void run_fig9(const ExperimentConfig& c) {
    Timer timer;
    auto grid = c.alpha_grid.empty() ? default_grid(0.5, 0.995, 24) : c.alpha_grid;
    auto os = open_out(c.output_dir, "maxsteps.csv");
    os << "alpha,p2,max_steps\n";
    json points = json::array();
    for (double a : grid) {
        CouplingStrength alpha{a};
        StepOutcome first = characterize_step(alpha, xbasis_config());
        double leftover = kPi - std::abs(first.phi_port0);
        double p2;
        if (leftover <= 0.0) {
            p2 = first.p_port1;  // failure lands exactly on target at alpha = pi/4
        } else {
            p2 = solve_port1(alpha, leftover, 1).success_prob;
        }
        std::uint64_t cap = max_steps_bound(p2);
        os << fmt_g(a) << "," << fmt_g(p2) << "," << cap << "\n";
        points.push_back({{"alpha", a}, {"p2", p2}, {"max_steps", cap}});
    }
    json res;
    res["points"] = points;
    write_summary(c, res, timer.seconds());
}

void run_characterize(const ExperimentConfig& c) {
    Timer timer;
    auto grid = c.alpha_grid.empty() ? default_grid(0.05, 1.0, 20) : c.alpha_grid;
    auto os = open_out(c.output_dir, "characterize.csv");
    os << "alpha,phi0,phi1,p0,p1,valid\n";
    for (double a : grid) {
        StepOutcome out = characterize_step(CouplingStrength{a}, xbasis_config());
        os << fmt_g(a) << "," << fmt_g(out.phi_port0) << "," << fmt_g(out.phi_port1)
           << "," << fmt_g(out.p_port0) << "," << fmt_g(out.p_port1) << ","
           << (out.valid ? 1 : 0) << "\n";
    }
    json res;
    res["points"] = grid.size();
    write_summary(c, res, timer.seconds());
}

void run_threshold(const ExperimentConfig& c) {
    Timer timer;
    CouplingStrength astar = threshold_alpha(1e-12);
    double ratio = astar.value() / (kPi / 4.0);
    auto os = open_out(c.output_dir, "threshold.csv");
    os << "alpha_star,ratio_to_max\n";
    os << fmt_g(astar.value()) << "," << fmt_g(ratio) << "\n";
    json res;
    res["alpha_star"] = astar.value();
    res["ratio_to_max"] = ratio;
    res["closed_form"] = std::atan(std::sqrt(std::tan(kPi / 8.0)));
    write_summary(c, res, timer.seconds());
}

void run_protocol(const ExperimentConfig& c) {
    Timer timer;
    StrategyKind kind = parse_strategy(c.strategy.empty() ? "flip-undo" : c.strategy);
    if (kind.family == StrategyFamily::OneStep && kind.mode.ports == 2 && kind.mode.dof == 2)
        throw ConfigError("one-step-2p-2dof is not tape-expressible; pick a 1-dof strategy");
    double alpha = c.alpha_grid.empty() ? kPi / 16.0 : c.alpha_grid.front();
    std::uint64_t sessions = c.n_sessions ? c.n_sessions : 100000;
    InstructionTape tape = plan_session(kind, CouplingStrength{alpha}, c.quantile, c.epsilon);

    std::uint64_t failures = 0, consumed_total = 0;
    std::uint64_t mid_session_messages = 0;
    for (std::uint64_t s = 0; s < sessions; ++s) {
        RandomStream stream = derive_stream(c.seed, s);
        SessionTranscript t = execute_session(tape, CouplingStrength{alpha}, stream);
        if (!t.succeeded) ++failures;
        consumed_total += t.stopped_at;
        mid_session_messages += (t.messages_alice_to_bob - 1) + (t.messages_bob_to_alice - 1);
        if (s == 0) {
            auto os = open_out(c.output_dir, "transcript0.txt");
            write_transcript(os, t, tape, c.seed);
        }
    }
    json res;
    res["strategy"] = strategy_name(kind);
    res["alpha"] = alpha;
    res["packet_size"] = tape.packet_size;
    res["tape_entries"] = tape.entries.size();
    res["sessions"] = sessions;
    res["failure_rate"] = static_cast<double>(failures) / static_cast<double>(sessions);
    res["mean_consumed"] =
        static_cast<double>(consumed_total) / static_cast<double>(sessions);
    res["mid_session_messages"] = mid_session_messages;
    write_summary(c, res, timer.seconds());
}

}  // namespace

const std::vector<std::string>& registered_experiments() {
    static const std::vector<std::string> names = {
        "fig4-histogram", "fig6-expectation", "fig7-ancilla-count", "fig8-port-modes",
        "fig9-maxsteps",  "characterize",     "threshold",          "simulate",
        "protocol"};
    return names;
}

void run_experiment(const ExperimentConfig& config) {
    const auto& names = registered_experiments();
    if (std::find(names.begin(), names.end(), config.experiment) == names.end())
        throw ConfigError("unknown experiment: " + config.experiment);
    for (double a : config.alpha_grid)
        if (!(a > 0.0) || !(a <= kPi / 4.0 + 1e-15))
            throw ConfigError("alpha out of range (0, pi/4]: " + fmt_g(a));
    if (!(config.quantile > 0.0) || !(config.quantile < 1.0))
        throw ConfigError("quantile must lie in (0, 1)");
    if (!config.strategy.empty()) {
        try {
            parse_strategy(config.strategy);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    if (config.experiment == "fig4-histogram") return run_fig4(config);
    if (config.experiment == "fig6-expectation") return run_fig6(config);
    if (config.experiment == "fig7-ancilla-count") return run_fig7(config);
    if (config.experiment == "fig8-port-modes") return run_fig8(config);
    if (config.experiment == "fig9-maxsteps") return run_fig9(config);
    if (config.experiment == "characterize") return run_characterize(config);
    if (config.experiment == "threshold") return run_threshold(config);
    if (config.experiment == "simulate") return run_simulate(config);
    if (config.experiment == "protocol") return run_protocol(config);
}

double parse_angle(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ConfigError("empty angle expression");

    double coeff = 1.0, denom = 1.0;
    bool has_pi = false;
    std::size_t pi_pos = s.find("pi");
    if (pi_pos != std::string::npos) {
        has_pi = true;
        std::string pre = s.substr(0, pi_pos);
        std::string post = s.substr(pi_pos + 2);
        if (!pre.empty()) {
            if (pre.back() != '*') throw ConfigError("bad angle expression: " + text);
            pre.pop_back();
            if (pre.empty()) throw ConfigError("bad angle expression: " + text);
        }
        if (!post.empty()) {
            if (post.front() != '/') throw ConfigError("bad angle expression: " + text);
            post.erase(0, 1);
            if (post.empty()) throw ConfigError("bad angle expression: " + text);
        }
        try {
            if (!pre.empty()) coeff = std::stod(pre);
            if (!post.empty()) denom = std::stod(post);
        } catch (const std::exception&) {
            throw ConfigError("bad angle expression: " + text);
        }
    } else {
        try {
            std::size_t used = 0;
            coeff = std::stod(s, &used);
            if (used != s.size()) throw ConfigError("bad angle expression: " + text);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad angle expression: " + text);
        }
    }
    if (denom == 0.0) throw ConfigError("bad angle expression: " + text);
    return has_pi ? coeff * kPi / denom : coeff;
}

void load_config_file(const std::string& path, ExperimentConfig& config) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string v) {
            auto b = v.find_first_not_of(" \t\r\n");
            auto e = v.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "experiment")
                config.experiment = val;
            else if (key == "alpha" || key == "alphas") {
                config.alpha_grid.clear();
                std::size_t start = 0;
                while (start <= val.size()) {
                    auto comma = val.find(',', start);
                    std::string tok = val.substr(
                        start, comma == std::string::npos ? std::string::npos : comma - start);
                    if (!trim(tok).empty()) config.alpha_grid.push_back(parse_angle(trim(tok)));
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
            } else if (key == "epsilon")
                config.epsilon = parse_angle(val);
            else if (key == "trials")
                config.n_trials = std::stoull(val);
            else if (key == "seed")
                config.seed = std::stoull(val);
            else if (key == "quantile")
                config.quantile = std::stod(val);
            else if (key == "out")
                config.output_dir = val;
            else if (key == "strategy")
                config.strategy = val;
            else if (key == "sessions")
                config.n_sessions = std::stoull(val);
            else
                throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for " + key);
        }
    }
}

}  // namespace czwalk
