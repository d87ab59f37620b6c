// Command-line front end. Subcommands map one to one onto the runner:
//   nlstring spectrum  --config run.cfg [--set key=value ...] [--count N]
//   nlstring evolve    --initial 3 --t-max 10 --steps 40 [--exact]
//   nlstring rates     --initial 3
//   nlstring emission  --mode 1 --resolution 64
//   nlstring classical [--init-mode 1 --init-amp 0.1 | --init-snapshot f]
// Exit codes: 0 ok, 2 config error, 3 numeric failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "nlstring/config.hpp"
#include "nlstring/runner.hpp"
#include "nlstring/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nlstring: classical and quantum dynamics of a nonlinear charged string"};
    app.set_version_flag("--version", std::string(nlstring::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    nlstring::cli::RunOptions opts;

    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", overrides, "override a config key, e.g. --set gamma=0.01")
        ->allow_extra_args(false);

    CLI::App* spectrum = app.add_subcommand("spectrum", "low eigenvalues of the string Hamiltonian");
    spectrum->add_option("--count", opts.eig_count, "number of eigenvalues (default 10)");

    CLI::App* evolve = app.add_subcommand("evolve", "first-order transition records over a time grid");
    evolve->add_option("--initial", opts.initial, "initial state: 'vac' or modes like 1,1,-3");
    evolve->add_option("--t-max", opts.t_max, "largest time (default 1)");
    evolve->add_option("--steps", opts.t_steps, "time-grid steps (default 20)");
    evolve->add_flag("--exact", opts.exact, "use exact evolution instead of first order");

    CLI::App* rates = app.add_subcommand("rates", "long-time rate scan over final triples");
    rates->add_option("--initial", opts.rates_initial, "initial single-phonon mode")->required();

    CLI::App* emission = app.add_subcommand("emission", "photon emission amplitudes and rate");
    emission->add_option("--mode", opts.emission_mode, "emitting phonon mode (default 1)");
    emission->add_option("--resolution", opts.resolution, "angular quadrature points (default 64)");

    CLI::App* classical = app.add_subcommand("classical", "spectral trajectory of the string PDE");
    classical->add_option("--init-mode", opts.init_mode, "standing-wave mode number (default 1)");
    classical->add_option("--init-amp", opts.init_amp, "standing-wave amplitude (default 0.1)");
    classical->add_option("--init-snapshot", opts.init_snapshot, "start from a snapshot file");
    classical->add_option("--modes", opts.traj_modes, "Fourier modes per output row (default 8)");
    classical->add_option("--stride", opts.traj_stride, "steps between output rows (default 10)");
    classical->add_option("--drive-const", opts.drive_const, "uniform drive amplitude");
    classical->add_option("--drive-omega", opts.drive_omega, "drive frequency (0 = constant)");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    nlstring::cli::RunConfig config;
    try {
        if (!config_path.empty()) config = nlstring::cli::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: code=2 where=config msg=" << e.what() << '\n';
        return 2;
    }

    for (CLI::App* sub : {spectrum, evolve, rates, emission, classical})
        if (sub->parsed())
            return nlstring::cli::run(sub->get_name(), config, overrides, opts);
    return 2;
}
