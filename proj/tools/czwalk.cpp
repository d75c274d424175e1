// czwalk: stochastic controlled-phase gate generation via mediating
// ancillas. Subcommands characterize / simulate / compare / threshold /
// protocol / figures emit CSV datasets and a JSON summary.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "czwalk/experiments.hpp"

namespace {

struct CliArgs {
    std::vector<std::string> alphas;
    std::string epsilon, config_file, out, strategy;
    std::uint64_t trials = 0, seed = 0, sessions = 0;
    double quantile = 0.0;
    bool seed_set = false, quantile_set = false;
};

void add_common(CLI::App* cmd, CliArgs& a) {
    cmd->add_option("--alpha,--alphas", a.alphas,
                    "coupling strength(s); accepts e.g. 0.3927, pi/16, 0.73*pi/4");
    cmd->add_option("--epsilon", a.epsilon, "target half-width (angle expression)");
    cmd->add_option("--trials", a.trials, "Monte Carlo trials");
    cmd->add_option("--seed", a.seed, "master seed")->each([&](const std::string&) {
        a.seed_set = true;
    });
    cmd->add_option("--quantile", a.quantile, "success quantile for packet sizing")
        ->each([&](const std::string&) { a.quantile_set = true; });
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--config", a.config_file, "key = value config file (flags win)");
}

czwalk::ExperimentConfig build_config(const CliArgs& a, const std::string& experiment) {
    czwalk::ExperimentConfig cfg;
    if (!a.config_file.empty()) czwalk::load_config_file(a.config_file, cfg);
    cfg.experiment = experiment;
    if (!a.alphas.empty()) {
        cfg.alpha_grid.clear();
        for (const auto& s : a.alphas) cfg.alpha_grid.push_back(czwalk::parse_angle(s));
    }
    if (!a.epsilon.empty()) cfg.epsilon = czwalk::parse_angle(a.epsilon);
    if (a.trials) cfg.n_trials = a.trials;
    if (a.seed_set) cfg.seed = a.seed;
    if (a.quantile_set) cfg.quantile = a.quantile;
    if (!a.out.empty()) cfg.output_dir = a.out;
    if (!a.strategy.empty()) cfg.strategy = a.strategy;
    if (a.sessions) cfg.n_sessions = a.sessions;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic CZ gate generation with ancilla feedback"};
    app.require_subcommand(1);

    CliArgs args;
    std::string figure_name;

    CLI::App* characterize =
        app.add_subcommand("characterize", "two-port step table over an alpha grid");
    add_common(characterize, args);

    CLI::App* simulate =
        app.add_subcommand("simulate", "hitting-time histogram for one strategy");
    add_common(simulate, args);
    simulate->add_option("--strategy", args.strategy,
                         "unguided | one-step-1p | one-step-2p-1dof | "
                         "one-step-2p-2dof | flip-undo");

    CLI::App* compare =
        app.add_subcommand("compare", "expectation curves: unguided vs guided");
    add_common(compare, args);

    CLI::App* threshold =
        app.add_subcommand("threshold", "two-port viability coupling threshold");
    add_common(threshold, args);

    CLI::App* protocol =
        app.add_subcommand("protocol", "Alice->Bob packet sessions with a fixed tape");
    add_common(protocol, args);
    protocol->add_option("--strategy", args.strategy, "tape-expressible strategy");
    protocol->add_option("--sessions", args.sessions, "number of sessions");

    CLI::App* figures = app.add_subcommand("figures", "named figure-reproduction datasets");
    add_common(figures, args);
    figures->add_option("name", figure_name, "experiment name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::string experiment;
        if (characterize->parsed()) experiment = "characterize";
        if (simulate->parsed()) experiment = "simulate";
        if (compare->parsed()) experiment = "fig6-expectation";
        if (threshold->parsed()) experiment = "threshold";
        if (protocol->parsed()) experiment = "protocol";
        if (figures->parsed()) experiment = figure_name;

        czwalk::run_experiment(build_config(args, experiment));
        return 0;
    } catch (const czwalk::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
