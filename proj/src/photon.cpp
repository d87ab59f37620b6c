#include "nlstring/photon.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "nlstring/io.hpp"

namespace nlstring::photon {

namespace {
constexpr double kPi = std::numbers::pi;
}

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Vec3: cannot normalize zero vector");
    return {x / n, y / n, z / n};
}

std::pair<Vec3, Vec3> polarization_basis(const Vec3& q) {
    if (q.norm() == 0.0) throw std::invalid_argument("polarization_basis: zero wavevector");
    const Vec3 qhat = q.normalized();
    const Vec3 zxq = cross(Vec3{0.0, 0.0, 1.0}, qhat);
    Vec3 eps1;
    if (zxq.norm() < 1e-12) {
        eps1 = {1.0, 0.0, 0.0};
    } else {
        eps1 = zxq.normalized();
    }
    const Vec3 eps2 = cross(qhat, eps1);
    return {eps1, eps2};
}

PhotonSpec::PhotonSpec(const Vec3& wavevector, int r) : q(wavevector), polarization(r) {
    if (q.norm() == 0.0) throw std::invalid_argument("PhotonSpec: zero wavevector");
    if (r != 1 && r != 2) throw std::invalid_argument("PhotonSpec: polarization must be 1 or 2");
    auto [e1, e2] = polarization_basis(q);
    eps_ = (r == 1) ? e1 : e2;
}

// ---------------------------------------------------------------------------
// Geometric form factors

namespace {

// e^{i sign * d * L} - 1 without cancellation for small |d * L|; for large
// arguments the direct evaluation keeps exact zeros (e.g. q1 = 0) exact.
Complex phase_minus_one(double angle) {
    if (std::abs(angle) < 0.5) {
        const double s = std::sin(0.5 * angle);
        return {-2.0 * s * s, std::sin(angle)};
    }
    return {std::cos(angle) - 1.0, std::sin(angle)};
}

}  // namespace

Complex geometric_factor_emit(ModeIndex m, double q1, const StringParams& p) {
    require_nonzero_mode(m, "geometric_factor_emit");
    const double km = wavenumber(m, p);
    const double delta = q1 - km;
    if (std::abs(delta) < kSingularityGuard / p.length) return {0.0, p.length};
    // e^{-i q1 L} = e^{-i delta L} since e^{-i k_m L} = 1; the shifted
    // argument stays accurate next to the singularity.
    const Complex num = std::abs(delta * p.length) < 0.5
                            ? phase_minus_one(-delta * p.length)
                            : phase_minus_one(-q1 * p.length);
    return num / Complex(-delta, 0.0);
}

Complex geometric_factor_absorb(ModeIndex n, double p1, const StringParams& p) {
    require_nonzero_mode(n, "geometric_factor_absorb");
    const double kn = wavenumber(n, p);
    const double delta = p1 - kn;
    if (std::abs(delta) < kSingularityGuard / p.length) return {0.0, -p.length};
    const Complex num = std::abs(delta * p.length) < 0.5
                            ? phase_minus_one(delta * p.length)
                            : phase_minus_one(p1 * p.length);
    return num / Complex(-delta, 0.0);
}

// ---------------------------------------------------------------------------
// Reduced amplitudes

namespace {

bool on_shell(double a, double b) {
    return std::abs(a - b) < kOnShellTol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

EmissionAmplitude amp_single_emission(ModeIndex m, const PhotonSpec& photon,
                                      const StringParams& p) {
    require_nonzero_mode(m, "amp_single_emission");
    const double wq = photon.frequency();
    const double wm = std::abs(omega(m, p));

    EmissionAmplitude out;
    out.on_shell = on_shell(wq, wm);
    const Complex geom = geometric_factor_emit(m, photon.q.x, p);
    out.value = Complex(0.0, -1.0) * p.sigma * std::sqrt(wq) /
                (2.0 * std::sqrt(2.0 * kPi * p.length * wm)) * photon.eps().y * geom;
    return out;
}

ScatterAmplitude amp_scatter(ModeIndex m, ModeIndex n, const PhotonSpec& pin,
                             const PhotonSpec& pout, const StringParams& p) {
    require_nonzero_mode(m, "amp_scatter");
    require_nonzero_mode(n, "amp_scatter");
    const double wq = pout.frequency();
    const double wp = pin.frequency();
    const double wm = std::abs(omega(m, p));
    const double wn = std::abs(omega(n, p));

    ScatterAmplitude out;
    out.on_shell_out = on_shell(wq, wm);
    out.on_shell_in = on_shell(wp, wn);
    out.value = -p.sigma * p.sigma * std::sqrt(wq * wp) /
                (16.0 * kPi * p.length * std::sqrt(wm * wn)) * pin.eps().y * pout.eps().y *
                geometric_factor_emit(m, pout.q.x, p) * geometric_factor_absorb(n, pin.q.x, p);
    return out;
}

namespace {

struct NonlinearTermSpec {
    std::string rule_text;
    bool gate;
    double energy_lhs, energy_rhs;  // phonon energy-balance delta arguments
    ModeIndex emitter;              // phonon matched to the photon
    double factor;                  // product of the four mode labels
};

NonlinearAmplitude evaluate_nonlinear(const std::vector<NonlinearTermSpec>& specs,
                                      const std::array<ModeIndex, 5>& all_modes,
                                      const PhotonSpec& photon, const StringParams& p,
                                      PolarizationAxis axis) {
    NonlinearAmplitude out;
    out.eps2 = photon.eps().y;
    out.eps3 = photon.eps().z;
    out.axis_used = axis;
    const double eps_component = (axis == PolarizationAxis::x2) ? out.eps2 : out.eps3;

    double wprod = 1.0;
    for (ModeIndex mode : all_modes) wprod *= std::abs(omega(mode, p));
    const double wp = photon.frequency();
    const Complex prefactor = -p.gamma * p.sigma * eps_component /
                              (4.0 * std::sqrt(wprod)) *
                              std::sqrt(std::pow(2.0 * kPi, 9) * wp / std::pow(p.length, 11));

    out.term_count = static_cast<int>(specs.size());
    Complex sum{0.0, 0.0};
    for (size_t i = 0; i < specs.size(); ++i) {
        const auto& sp = specs[i];
        NonlinearTerm& term = out.terms[i];
        term.momentum_rule = sp.rule_text;
        term.gate = sp.gate;
        term.emitter = sp.emitter;
        term.on_shell_phonon = on_shell(sp.energy_lhs, sp.energy_rhs);
        term.on_shell_photon = on_shell(std::abs(omega(sp.emitter, p)), wp);
        if (!sp.gate) continue;
        term.contribution =
            prefactor * sp.factor * (-geometric_factor_emit(sp.emitter, photon.q.x, p));
        sum += term.contribution;
    }
    out.value = sum;
    return out;
}

double aw(ModeIndex m, const StringParams& p) { return std::abs(omega(m, p)); }

}  // namespace

NonlinearAmplitude amp_nonlinear_emission(ModeIndex m, ModeIndex l, ModeIndex f,
                                          ModeIndex n, ModeIndex j, const PhotonSpec& photon,
                                          const StringParams& p, PolarizationAxis axis) {
    for (ModeIndex mode : {m, l, f, n, j}) require_nonzero_mode(mode, "amp_nonlinear_emission");
    const std::vector<NonlinearTermSpec> specs = {
        {"m+l=n+j", m + l == n + j, aw(n, p) + aw(j, p), aw(m, p) + aw(l, p), f,
         static_cast<double>(m) * l * n * j},
        {"m+f=n+j", m + f == n + j, aw(n, p) + aw(j, p), aw(m, p) + aw(f, p), l,
         static_cast<double>(m) * f * n * j},
        {"l+f=n+j", l + f == n + j, aw(n, p) + aw(j, p), aw(l, p) + aw(f, p), m,
         static_cast<double>(l) * f * n * j},
    };
    return evaluate_nonlinear(specs, {m, l, f, n, j}, photon, p, axis);
}

NonlinearAmplitude amp_nonlinear_absorb4(ModeIndex m, ModeIndex l, ModeIndex f, ModeIndex j,
                                         ModeIndex n, const PhotonSpec& photon,
                                         const StringParams& p, PolarizationAxis axis) {
    for (ModeIndex mode : {m, l, f, j, n}) require_nonzero_mode(mode, "amp_nonlinear_absorb4");
    const std::vector<NonlinearTermSpec> specs = {
        {"m+l+f=n", m + l + f == n, aw(n, p), aw(f, p) + aw(m, p) + aw(l, p), j,
         static_cast<double>(m) * l * n * f},
        {"m+l+j=n", m + l + j == n, aw(n, p), aw(l, p) + aw(m, p) + aw(j, p), f,
         static_cast<double>(m) * l * n * j},
        {"l+f+j=n", l + f + j == n, aw(n, p), aw(j, p) + aw(l, p) + aw(f, p), m,
         static_cast<double>(l) * f * n * j},
        {"m+f+j=n", m + f + j == n, aw(n, p), aw(j, p) + aw(m, p) + aw(f, p), l,
         static_cast<double>(m) * f * n * j},
    };
    return evaluate_nonlinear(specs, {m, l, f, j, n}, photon, p, axis);
}

// ---------------------------------------------------------------------------
// Emission rate

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(static_cast<size_t>(n));
    weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<size_t>(i)] = x;
        weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

double direction_rate_density(ModeIndex m, const Vec3& qhat, const StringParams& p) {
    const double wstar = std::abs(omega(m, p));
    double sum = 0.0;
    for (int r = 1; r <= 2; ++r) {
        PhotonSpec photon(wstar * qhat, r);
        sum += std::norm(amp_single_emission(m, photon, p).value);
    }
    return wstar * wstar / (2.0 * kPi) * sum;
}

}  // namespace

double emission_rate(ModeIndex m, const StringParams& p, int angular_resolution) {
    require_nonzero_mode(m, "emission_rate");
    if (angular_resolution < 2)
        throw std::invalid_argument("emission_rate: angular_resolution must be >= 2");

    // Polar axis along the string so the form factor depends on the node only.
    std::vector<double> u, wu;
    gauss_legendre(angular_resolution, u, wu);

    double rate = 0.0;
    for (int i = 0; i < angular_resolution; ++i) {
        const double ui = u[static_cast<size_t>(i)];
        const double s = std::sqrt(std::max(0.0, 1.0 - ui * ui));
        double phi_sum = 0.0;
        for (int k = 0; k < angular_resolution; ++k) {
            const double phi = 2.0 * kPi * (k + 0.5) / angular_resolution;
            const Vec3 qhat{ui, s * std::cos(phi), s * std::sin(phi)};
            phi_sum += direction_rate_density(m, qhat, p);
        }
        rate += wu[static_cast<size_t>(i)] * (2.0 * kPi / angular_resolution) * phi_sum;
    }
    return rate;
}

std::vector<AngularRateSample> angular_rate_table(ModeIndex m, const StringParams& p,
                                                  int angular_resolution) {
    require_nonzero_mode(m, "angular_rate_table");
    if (angular_resolution < 2)
        throw std::invalid_argument("angular_rate_table: angular_resolution must be >= 2");
    const double wstar = std::abs(omega(m, p));
    std::vector<AngularRateSample> table;
    table.reserve(static_cast<size_t>(angular_resolution) * angular_resolution * 2);
    for (int i = 0; i < angular_resolution; ++i) {
        const double theta = kPi * (i + 0.5) / angular_resolution;
        for (int k = 0; k < angular_resolution; ++k) {
            const double phi = 2.0 * kPi * (k + 0.5) / angular_resolution;
            const Vec3 qhat{std::cos(theta), std::sin(theta) * std::cos(phi),
                            std::sin(theta) * std::sin(phi)};
            for (int r = 1; r <= 2; ++r) {
                PhotonSpec photon(wstar * qhat, r);
                const double density = wstar * wstar / (2.0 * kPi) *
                                       std::norm(amp_single_emission(m, photon, p).value);
                table.push_back({theta, phi, r, density});
            }
        }
    }
    return table;
}

void write_angular_table(std::ostream& os, ModeIndex m, const StringParams& p,
                         int angular_resolution) {
    os << "theta,phi,polarization,dRate_dOmega\n";
    for (const auto& s : angular_rate_table(m, p, angular_resolution))
        os << io::fmt(s.theta) << ',' << io::fmt(s.phi) << ',' << s.polarization << ','
           << io::fmt(s.density) << '\n';
}

}  // namespace nlstring::photon
