// Experiment orchestration behind the command-line front end. Each command
// writes one table (CSV or JSON per the output section) with a provenance
// header: tool, version, timestamp, and the full effective config, which
// reparses to the config that produced the file.

#ifndef NLSTRING_RUNNER_HPP
#define NLSTRING_RUNNER_HPP

#include <string>
#include <vector>

#include "nlstring/config.hpp"

namespace nlstring::cli {

struct RunOptions {
    // evolve
    std::string initial = "vac";  // "vac" or a mode list like "1,1,-3"
    bool exact = false;           // evolve with the dense oracle instead
    double t_max = 1.0;
    int t_steps = 20;
    // rates
    int rates_initial = 3;
    // emission
    int emission_mode = 1;
    int resolution = 64;
    // spectrum
    int eig_count = 10;
    // classical
    int traj_modes = 8;
    int traj_stride = 10;
    int init_mode = 1;
    double init_amp = 0.1;
    std::string init_snapshot;  // optional snapshot file to start from
    double drive_const = 0.0;   // uniform drive amplitude c
    double drive_omega = 0.0;   // c * sin(w t); w = 0 means constant c
};

/// Exit status: 0 ok, 2 config error, 3 numeric failure. Failures print one
/// machine-parsable line: "error: code=<n> where=<command> msg=<...>".
int run(const std::string& command, RunConfig config,
        const std::vector<std::string>& overrides, const RunOptions& opts = {});

/// Files a command writes under the configured output path (for tooling).
std::vector<std::string> output_files(const std::string& command, const RunConfig& config);

}  // namespace nlstring::cli

#endif  // NLSTRING_RUNNER_HPP
