#include "nlstring/runner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nlstring/classical.hpp"
#include "nlstring/fock.hpp"
#include "nlstring/io.hpp"
#include "nlstring/perturb.hpp"
#include "nlstring/photon.hpp"
#include "nlstring/version.hpp"

namespace nlstring::cli {

namespace {

using nlohmann::json;

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// One output table; rows are preformatted strings per column.
class Table {
public:
    Table(std::string command, const RunConfig& config, std::vector<std::string> columns)
        : command_(std::move(command)), config_(config), columns_(std::move(columns)) {}

    void note(const std::string& key, const std::string& value) {
        notes_.emplace_back(key, value);
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size())
            throw std::logic_error("Table: row width mismatch");
        rows_.push_back(std::move(cells));
    }

    void write(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        if (config_.output.format == OutputConfig::Format::csv)
            write_csv(f);
        else
            write_json(f);
        if (!f) throw std::runtime_error("write failed: " + path);
    }

private:
    void write_csv(std::ostream& os) const {
        os << "# nlstring " << kVersion << ' ' << command_ << '\n';
        os << "# generated: " << utc_timestamp() << '\n';
        for (const auto& [k, v] : config_.to_key_values()) os << "#cfg " << k << '=' << v << '\n';
        for (const auto& [k, v] : notes_) os << "# " << k << '=' << v << '\n';
        for (size_t i = 0; i < columns_.size(); ++i)
            os << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
        for (const auto& row : rows_) {
            for (size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
    }

    void write_json(std::ostream& os) const {
        json doc;
        doc["tool"] = "nlstring";
        doc["version"] = std::string(kVersion);
        doc["command"] = command_;
        doc["generated"] = utc_timestamp();
        json cfg = json::object();
        for (const auto& [k, v] : config_.to_key_values()) cfg[k] = v;
        doc["config"] = cfg;
        json notes = json::object();
        for (const auto& [k, v] : notes_) notes[k] = v;
        doc["notes"] = notes;
        doc["columns"] = columns_;
        json rows = json::array();
        for (const auto& row : rows_) rows.push_back(row);
        doc["rows"] = rows;
        os << doc.dump(1) << '\n';
    }

    std::string command_;
    const RunConfig& config_;
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::vector<std::vector<std::string>> rows_;
};

std::string table_path(const RunConfig& config, const std::string& command) {
    const char* ext = config.output.format == OutputConfig::Format::csv ? ".csv" : ".json";
    return config.output.path + "_" + command + ext;
}

fock::SparseOperator full_hamiltonian(const fock::FockBasis& basis, const StringParams& p) {
    fock::SparseOperator h = fock::build_H1(basis, p);
    fock::SparseOperator h2 = fock::build_H2(basis, p);
    h.entries.insert(h.entries.end(), h2.entries.begin(), h2.entries.end());
    h.hermitian = h.hermitian && h2.hermitian;
    return h;
}

double free_energy(const fock::FockState& s, const StringParams& p) {
    double e = 0.0;
    for (const auto& [mode, c] : s.occupations()) e += std::abs(omega(mode, p)) * c;
    return e;
}

fock::FockBasis make_basis(const RunConfig& config) {
    fock::FockBasis basis(config.quantum.cutoff, config.quantum.max_phonons,
                          config.quantum.momentum_sector);
    if (basis.size() == 0)
        throw ConfigError("quantum.momentum_sector: no states in the requested sector");
    return basis;
}

void run_spectrum(const RunConfig& config, const RunOptions& opts) {
    const StringParams& p = config.string_params;
    fock::FockBasis basis = make_basis(config);
    auto eigs = fock::exact_eigs(full_hamiltonian(basis, p),
                                 std::min<int>(opts.eig_count, static_cast<int>(basis.size())));
    Table table("spectrum", config, {"index", "eigenvalue"});
    table.note("basis_dim", io::fmt(basis.size()));
    for (size_t i = 0; i < eigs.size(); ++i)
        table.add_row({io::fmt(static_cast<int>(i)), io::fmt(eigs[i].first)});
    table.write(table_path(config, "spectrum"));
}

void run_evolve(const RunConfig& config, const RunOptions& opts) {
    const StringParams& p = config.string_params;
    fock::FockBasis basis = make_basis(config);
    const fock::FockState initial = fock::FockState::parse(opts.initial);
    auto idx = basis.find(initial);
    if (!idx) throw ConfigError("evolve: initial state " + initial.label() + " not in basis");
    if (opts.t_steps < 1) throw ConfigError("evolve: --steps must be >= 1");

    Table table("evolve", config,
                {"t", "initial", "final", "re_amp", "im_amp", "prob", "resonant_flag", "valid"});
    table.note("mode", opts.exact ? "exact" : "first_order");

    fock::SparseOperator h;
    if (opts.exact) h = full_hamiltonian(basis, p);

    for (int step = 0; step <= opts.t_steps; ++step) {
        const double t = opts.t_max * step / opts.t_steps;
        if (opts.exact) {
            std::vector<std::complex<double>> psi0(static_cast<size_t>(basis.size()),
                                                   {0.0, 0.0});
            psi0[static_cast<size_t>(*idx)] = 1.0;
            const auto psi = fock::evolve_exact(h, psi0, t);
            const double e0 = free_energy(initial, p);
            const double res_tol = 1e-9 * 2.0 * std::numbers::pi * p.speed / p.length;
            for (std::int64_t f = 0; f < basis.size(); ++f) {
                // report in the interaction picture for comparability
                const double ef = free_energy(basis.state(f), p);
                const std::complex<double> amp =
                    psi[static_cast<size_t>(f)] * std::exp(std::complex<double>(0.0, ef * t));
                if (std::abs(amp) < 1e-14) continue;
                table.add_row({io::fmt(t), initial.label(), basis.state(f).label(),
                               io::fmt(amp.real()), io::fmt(amp.imag()),
                               io::fmt(std::norm(amp)),
                               std::abs(ef - e0) < res_tol ? "1" : "0", "1"});
            }
        } else {
            for (const auto& rec : perturb::evolve_first_order(initial, t, basis, p)) {
                table.add_row({io::fmt(t), rec.initial.label(), rec.final_state.label(),
                               io::fmt(rec.amplitude.real()), io::fmt(rec.amplitude.imag()),
                               io::fmt(rec.probability()), rec.on_resonance ? "1" : "0",
                               rec.valid ? "1" : "0"});
            }
        }
    }
    table.write(table_path(config, "evolve"));
}

void run_rates(const RunConfig& config, const RunOptions& opts) {
    const StringParams& p = config.string_params;
    const int j = opts.rates_initial;
    if (j == 0) throw ConfigError("rates: --initial must be nonzero");
    const int N = config.quantum.cutoff;

    Table table("rates", config,
                {"p", "q", "r", "rate_t2", "golden_rule_coefficient", "ratio"});
    table.note("initial_mode", io::fmt(j));
    table.note("scan_cutoff", io::fmt(N));
    for (int a = -N; a <= N; ++a) {
        if (a == 0) continue;
        for (int b = a; b <= N; ++b) {
            if (b == 0) continue;
            for (int c = b; c <= N; ++c) {
                if (c == 0) continue;
                const auto rate = perturb::transition_rate_longtime(j, {a, b, c}, p);
                if (!rate.momentum_allowed || !rate.resonant) continue;
                table.add_row({io::fmt(a), io::fmt(b), io::fmt(c), io::fmt(rate.rate),
                               io::fmt(rate.golden_rule_coefficient), io::fmt(rate.ratio)});
            }
        }
    }
    table.write(table_path(config, "rates"));
}

void run_emission(const RunConfig& config, const RunOptions& opts) {
    const StringParams& p = config.string_params;
    if (opts.emission_mode == 0) throw ConfigError("emission: --mode must be nonzero");
    if (opts.resolution < 2) throw ConfigError("emission: --resolution must be >= 2");

    const double total = photon::emission_rate(opts.emission_mode, p, opts.resolution);

    Table table("emission", config, {"theta", "phi", "polarization", "dRate_dOmega"});
    table.note("mode", io::fmt(opts.emission_mode));
    table.note("resolution", io::fmt(opts.resolution));
    table.note("total_rate", io::fmt(total));
    for (const auto& s : photon::angular_rate_table(opts.emission_mode, p, opts.resolution))
        table.add_row({io::fmt(s.theta), io::fmt(s.phi), io::fmt(s.polarization),
                       io::fmt(s.density)});
    table.write(table_path(config, "emission"));
}

void run_classical(const RunConfig& config, const RunOptions& opts) {
    const StringParams& p = config.string_params;
    const double dt = config.effective_dt();
    const double t_end = config.effective_t_end();
    const long long steps = std::llround(std::ceil(t_end / dt - 1e-12));
    if (steps > 20000000LL)
        throw ConfigError("classical: t_end/dt = " + std::to_string(steps) +
                          " steps exceeds the 2e7 limit");
    if (opts.traj_modes < 0 || opts.traj_modes > config.classical.grid / 2)
        throw ConfigError("classical: --modes out of range");
    if (opts.traj_stride < 1) throw ConfigError("classical: --stride must be >= 1");

    classical::FieldState state;
    if (!opts.init_snapshot.empty()) {
        std::ifstream f(opts.init_snapshot);
        if (!f) throw ConfigError("classical: snapshot not found: " + opts.init_snapshot);
        state = classical::read_snapshot(f);
        state.params = p;
    } else {
        state = classical::make_field(config.classical.grid, p);
        if (4 * std::abs(opts.init_mode) > config.classical.grid)
            throw ConfigError("classical: grid must be >= 4x the initial mode");
        for (int i = 0; i < state.grid; ++i)
            state.y[static_cast<size_t>(i)] =
                opts.init_amp * std::sin(2.0 * std::numbers::pi * opts.init_mode * i /
                                         state.grid);
    }

    classical::RRConfig rr;
    rr.kernel_order = config.classical.rr_order;
    rr.reduction = config.classical.reduction == ClassicalConfig::Reduction::order_reduced
                       ? classical::RRConfig::Reduction::order_reduced
                       : classical::RRConfig::Reduction::off;
    if (opts.drive_const != 0.0) {
        const double c = opts.drive_const, w = opts.drive_omega;
        rr.drive = [c, w](double, double t) { return w == 0.0 ? c : c * std::sin(w * t); };
    }
    const bool damped = p.sigma != 0.0;
    if (damped && rr.reduction == classical::RRConfig::Reduction::order_reduced &&
        rr.kernel_order > 0)
        throw ConfigError(
            "classical.rr_order: order-reduced stepping supports order 0 only; "
            "set classical.reduction=off for the experimental literal kernel");

    std::vector<std::string> columns = {"t", "energy", "mean_y"};
    for (int k = 1; k <= opts.traj_modes; ++k) {
        columns.push_back("mode_re_" + std::to_string(k));
        columns.push_back("mode_im_" + std::to_string(k));
    }
    Table table("classical", config, std::move(columns));
    table.note("steps", io::fmt(steps));
    table.note("dt", io::fmt(dt));

    classical::LiteralRRStepper literal(rr);
    auto emit = [&](const classical::FieldState& s) {
        std::vector<std::string> row = {io::fmt(s.t), io::fmt(classical::energy(s)),
                                        io::fmt(classical::mode_coefficient(s, 0).real())};
        for (int k = 1; k <= opts.traj_modes; ++k) {
            const auto c = classical::mode_coefficient(s, k);
            row.push_back(io::fmt(c.real()));
            row.push_back(io::fmt(c.imag()));
        }
        table.add_row(std::move(row));
    };

    emit(state);
    for (long long n = 0; n < steps; ++n) {
        if (!damped)
            state = classical::step_conservative(state, dt);
        else if (rr.reduction == classical::RRConfig::Reduction::order_reduced)
            state = classical::step_with_rr(state, dt, rr);
        else
            state = literal.step(state, dt);
        if ((n + 1) % opts.traj_stride == 0 || n + 1 == steps) emit(state);
    }
    table.write(table_path(config, "classical"));

    std::ofstream snap(config.output.path + "_classical_final.snap");
    if (!snap) throw std::runtime_error("cannot open snapshot output");
    classical::write_snapshot(snap, state);
}

}  // namespace

std::vector<std::string> output_files(const std::string& command, const RunConfig& config) {
    std::vector<std::string> files = {table_path(config, command)};
    if (command == "classical") files.push_back(config.output.path + "_classical_final.snap");
    return files;
}

int run(const std::string& command, RunConfig config,
        const std::vector<std::string>& overrides, const RunOptions& opts) {
    try {
        apply_overrides(config, overrides);
        if (command == "spectrum")
            run_spectrum(config, opts);
        else if (command == "evolve")
            run_evolve(config, opts);
        else if (command == "rates")
            run_rates(config, opts);
        else if (command == "emission")
            run_emission(config, opts);
        else if (command == "classical")
            run_classical(config, opts);
        else
            throw ConfigError("unknown command '" + command + "'");
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: code=2 where=" << command << " msg=" << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: code=3 where=" << command << " msg=" << e.what() << '\n';
        return 3;
    }
}

}  // namespace nlstring::cli
