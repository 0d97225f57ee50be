#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace savch {

/// One simulation setup: grid, model parameters, stepping and output policy.
struct RunConfig {
    int nx = 0, ny = 0;
    double lx = 1.0, ly = 1.0;
    double eps = 0.0;
    double tau = 0.0;
    double t_end = 0.0;
    double c0 = 1.0;
    double M = 2.0;
    double solver_tol = 1e-12;
    std::vector<double> snapshot_times;
    std::string output_dir = ".";
    long seed = 0;

    /// Number of steps, t_end/tau rounded to the nearest integer.
    long step_count() const;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses a flat key=value file ('#' starts a comment). Unknown keys are
/// rejected; close misspellings get a suggestion. Required keys: nx, ny,
/// eps, tau, t_end. Fail-closed: any error leaves no partial config behind.
RunConfig parse_config(const std::string& path);

}  // namespace savch
