#pragma once

// Experiment registry behind the CLI: configuration, execution, and emission
// of figure-reproduction datasets (CSV) plus a JSON run summary.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace czwalk {

// Raised for malformed configuration (unknown experiment, bad angle
// expression, unwritable output); the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment;
    std::vector<double> alpha_grid;  // empty -> experiment default
    double epsilon = 0.0314159265358979324;  // pi/100
    std::uint64_t n_trials = 0;              // 0 -> experiment default
    std::uint64_t seed = 20240817;
    double quantile = 0.999;
    std::string output_dir = ".";
    std::string strategy;          // simulate / protocol experiments
    std::uint64_t n_sessions = 0;  // protocol experiment, 0 -> default
};

// Registered experiments: fig4-histogram, fig6-expectation,
// fig7-ancilla-count, fig8-port-modes, fig9-maxsteps, characterize,
// threshold, simulate, protocol.
const std::vector<std::string>& registered_experiments();

// Runs the experiment, writing CSV datasets and summary.json under
// config.output_dir. Throws ConfigError for bad configuration and
// std::runtime_error for execution failures.
void run_experiment(const ExperimentConfig& config);

// Angle expressions: plain radians ("0.3927"), "pi", "pi/16", "3*pi/16",
// "0.73*pi/4". Throws ConfigError on anything else.
double parse_angle(const std::string& text);

// key = value lines (# comments, blank lines ignored) merged into config;
// later CLI flags override. Unknown keys throw ConfigError.
void load_config_file(const std::string& path, ExperimentConfig& config);

}  // namespace czwalk
