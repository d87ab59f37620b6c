#include "nlstring/classical.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "nlstring/io.hpp"

namespace nlstring::classical {

namespace {

constexpr double kPi = std::numbers::pi;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// FFT workspace, one per grid size. Plans are FFTW_ESTIMATE so identical
// inputs give identical outputs run to run.

class Workspace {
public:
    explicit Workspace(int g) : G(g) {
        real_g_.resize(static_cast<size_t>(G));
        spec_g_.resize(static_cast<size_t>(G / 2 + 1));
        real_p_.resize(static_cast<size_t>(2 * G));
        spec_p_.resize(static_cast<size_t>(G + 1));
        fwd_g_ = fftw_plan_dft_r2c_1d(G, real_g_.data(), c(spec_g_), FFTW_ESTIMATE);
        bwd_g_ = fftw_plan_dft_c2r_1d(G, c(spec_g_), real_g_.data(), FFTW_ESTIMATE);
        fwd_p_ = fftw_plan_dft_r2c_1d(2 * G, real_p_.data(), c(spec_p_), FFTW_ESTIMATE);
        bwd_p_ = fftw_plan_dft_c2r_1d(2 * G, c(spec_p_), real_p_.data(), FFTW_ESTIMATE);
    }

    ~Workspace() {
        fftw_destroy_plan(fwd_g_);
        fftw_destroy_plan(bwd_g_);
        fftw_destroy_plan(fwd_p_);
        fftw_destroy_plan(bwd_p_);
    }

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    // coefficients c_k = fft(y)_k / G
    std::vector<Complex> to_spectrum(const std::vector<double>& y) {
        std::lock_guard lk(mu_);
        std::copy(y.begin(), y.end(), real_g_.begin());
        fftw_execute(fwd_g_);
        std::vector<Complex> out(spec_g_);
        for (auto& v : out) v /= static_cast<double>(G);
        return out;
    }

    std::vector<double> to_real(const std::vector<Complex>& coeff) {
        std::lock_guard lk(mu_);
        std::copy(coeff.begin(), coeff.end(), spec_g_.begin());
        fftw_execute(bwd_g_);
        return {real_g_.begin(), real_g_.end()};
    }

    // samples of the band-limited field on the doubled grid
    std::vector<double> padded_values(const std::vector<Complex>& coeff) {
        std::lock_guard lk(mu_);
        std::fill(spec_p_.begin(), spec_p_.end(), Complex(0.0));
        for (int k = 0; k < G / 2; ++k) spec_p_[static_cast<size_t>(k)] = coeff[static_cast<size_t>(k)];
        fftw_execute(bwd_p_);
        return {real_p_.begin(), real_p_.end()};
    }

    // coarse coefficients of a product evaluated on the doubled grid;
    // modes at or above G/2 are discarded (dealiasing projection)
    std::vector<Complex> padded_to_spectrum(const std::vector<double>& values) {
        std::lock_guard lk(mu_);
        std::copy(values.begin(), values.end(), real_p_.begin());
        fftw_execute(fwd_p_);
        std::vector<Complex> out(static_cast<size_t>(G / 2 + 1), Complex(0.0));
        for (int k = 0; k < G / 2; ++k)
            out[static_cast<size_t>(k)] = spec_p_[static_cast<size_t>(k)] / (2.0 * G);
        return out;
    }

    const int G;

private:
    static fftw_complex* c(std::vector<Complex>& v) {
        return reinterpret_cast<fftw_complex*>(v.data());
    }

    std::vector<double> real_g_, real_p_;
    std::vector<Complex> spec_g_, spec_p_;
    fftw_plan fwd_g_, bwd_g_, fwd_p_, bwd_p_;
    std::mutex mu_;
};

Workspace& workspace_for(int G) {
    static std::mutex cache_mu;
    static std::map<int, std::unique_ptr<Workspace>> cache;
    std::lock_guard lk(cache_mu);
    auto& slot = cache[G];
    if (!slot) slot = std::make_unique<Workspace>(G);
    return *slot;
}

std::vector<Complex> derivative_spectrum(const std::vector<Complex>& coeff, int order,
                                         const StringParams& p, int G) {
    std::vector<Complex> out(coeff.size(), Complex(0.0));
    for (int k = 1; k < G / 2; ++k) {  // Nyquist dropped: its derivative is ambiguous
        const double kt = 2.0 * kPi * k / p.length;
        Complex f;
        switch (order) {
            case 1: f = Complex(0.0, kt); break;
            case 2: f = Complex(-kt * kt, 0.0); break;
            default: throw std::logic_error("derivative_spectrum: unsupported order");
        }
        out[static_cast<size_t>(k)] = f * coeff[static_cast<size_t>(k)];
    }
    return out;
}

std::vector<Complex> cubic_force_spectrum(Workspace& ws, const std::vector<Complex>& cy,
                                          const StringParams& p) {
    std::vector<Complex> force(cy.size(), Complex(0.0));
    if (p.gamma == 0.0) return force;
    const auto yx = ws.padded_values(derivative_spectrum(cy, 1, p, ws.G));
    const auto yxx = ws.padded_values(derivative_spectrum(cy, 2, p, ws.G));
    std::vector<double> f(yx.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = 0.5 * p.gamma * yx[i] * yx[i] * yxx[i];
    return ws.padded_to_spectrum(f);
}

// d/dt of the spatial mean of the conservative acceleration: the linear part
// averages to zero, so only the cubic force contributes. This is the
// order-reduced stand-in for d^3 ybar / dt^3.
double mean_acceleration_rate(Workspace& ws, const std::vector<Complex>& cy,
                              const std::vector<Complex>& cv, const StringParams& p) {
    if (p.gamma == 0.0) return 0.0;
    const auto yx = ws.padded_values(derivative_spectrum(cy, 1, p, ws.G));
    const auto yxx = ws.padded_values(derivative_spectrum(cy, 2, p, ws.G));
    const auto vx = ws.padded_values(derivative_spectrum(cv, 1, p, ws.G));
    const auto vxx = ws.padded_values(derivative_spectrum(cv, 2, p, ws.G));
    double mean = 0.0;
    for (size_t i = 0; i < yx.size(); ++i)
        mean += 2.0 * yx[i] * vx[i] * yxx[i] + yx[i] * yx[i] * vxx[i];
    mean /= static_cast<double>(yx.size());
    return 0.5 * p.gamma * mean;
}

void check_step(const FieldState& state, double dt) {
    state.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const double h = state.params.length / state.grid;
    if (!(dt < 0.5 * h / state.params.speed))
        throw std::invalid_argument("step: dt violates the stability guard 0.5 h / v");
}

void rotate(std::vector<Complex>& cy, std::vector<Complex>& cv, double dt,
            const StringParams& p, int G) {
    cy[0] += dt * cv[0];
    for (int k = 1; k <= G / 2; ++k) {
        const double w = p.speed * 2.0 * kPi * k / p.length;
        const double cs = std::cos(w * dt), sn = std::sin(w * dt);
        const Complex ny = cs * cy[static_cast<size_t>(k)] + (sn / w) * cv[static_cast<size_t>(k)];
        const Complex nv = -w * sn * cy[static_cast<size_t>(k)] + cs * cv[static_cast<size_t>(k)];
        cy[static_cast<size_t>(k)] = ny;
        cv[static_cast<size_t>(k)] = nv;
    }
}

// Extra real-space force (literal radiation reaction), frozen over the step.
FieldState step_impl(const FieldState& state, double dt, const RRConfig* rr,
                     const std::vector<double>* frozen_force) {
    check_step(state, dt);
    Workspace& ws = workspace_for(state.grid);
    const StringParams& p = state.params;

    auto cy = ws.to_spectrum(state.y);
    auto cv = ws.to_spectrum(state.ydot);

    // The reaction term depends on ydot; it is evaluated explicitly at the
    // kick states rather than solved implicitly, adequate for the O(sigma^2)
    // model term.
    auto kick = [&](double weight, double time) {
        auto force = cubic_force_spectrum(ws, cy, p);
        if (rr && p.sigma != 0.0) {
            if (rr->reduction == RRConfig::Reduction::order_reduced && !frozen_force)
                force[0] += p.sigma * p.sigma * p.length / (3.0 * kPi) *
                            mean_acceleration_rate(ws, cy, cv, p);
            if (rr->drive) {
                std::vector<double> d(static_cast<size_t>(state.grid));
                for (int i = 0; i < state.grid; ++i)
                    d[static_cast<size_t>(i)] = p.sigma * rr->drive(p.length * i / state.grid, time);
                const auto dspec = ws.to_spectrum(d);
                for (size_t k = 0; k < force.size(); ++k) force[k] += dspec[k];
            }
        }
        if (frozen_force && p.sigma != 0.0) {
            const auto fspec = ws.to_spectrum(*frozen_force);
            for (size_t k = 0; k < force.size(); ++k) force[k] += fspec[k];
        }
        for (size_t k = 0; k < cv.size(); ++k) cv[k] += weight * force[k];
    };

    kick(0.5 * dt, state.t);
    rotate(cy, cv, dt, p, state.grid);
    kick(0.5 * dt, state.t + dt);

    FieldState out = state;
    out.y = ws.to_real(cy);
    out.ydot = ws.to_real(cv);
    out.t = state.t + dt;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface

void FieldState::validate() const {
    if (grid < 8 || (grid & (grid - 1)) != 0)
        throw std::invalid_argument("FieldState: grid must be a power of two >= 8");
    if (y.size() != static_cast<size_t>(grid) || ydot.size() != static_cast<size_t>(grid))
        throw std::invalid_argument("FieldState: sample arrays must have `grid` entries");
    params.validate();
}

FieldState make_field(int grid, const StringParams& p, double t) {
    FieldState s;
    s.grid = grid;
    s.y.assign(static_cast<size_t>(grid), 0.0);
    s.ydot.assign(static_cast<size_t>(grid), 0.0);
    s.t = t;
    s.params = p;
    s.validate();
    return s;
}

void RRConfig::validate() const {
    if (kernel_order < 0 || kernel_order > kMaxKernelOrder)
        throw std::invalid_argument("RRConfig: kernel_order must be in 0.." +
                                    std::to_string(kMaxKernelOrder));
}

double energy(const FieldState& state) {
    state.validate();
    Workspace& ws = workspace_for(state.grid);
    const StringParams& p = state.params;

    double kin = 0.0;
    for (double v : state.ydot) kin += v * v;
    kin /= static_cast<double>(state.grid);

    const auto cy = ws.to_spectrum(state.y);
    const auto yx = ws.padded_values(derivative_spectrum(cy, 1, p, state.grid));
    double grad2 = 0.0, grad4 = 0.0;
    for (double g : yx) {
        grad2 += g * g;
        grad4 += g * g * g * g;
    }
    grad2 /= static_cast<double>(yx.size());
    grad4 /= static_cast<double>(yx.size());

    return p.length * (0.5 * kin + 0.5 * p.speed * p.speed * grad2 + p.gamma / 24.0 * grad4);
}

double field_momentum(const FieldState& state) {
    state.validate();
    Workspace& ws = workspace_for(state.grid);
    const auto cy = ws.to_spectrum(state.y);
    const auto yx = ws.to_real(derivative_spectrum(cy, 1, state.params, state.grid));
    double m = 0.0;
    for (int i = 0; i < state.grid; ++i)
        m += state.ydot[static_cast<size_t>(i)] * yx[static_cast<size_t>(i)];
    return state.params.length * m / static_cast<double>(state.grid);
}

std::complex<double> mode_coefficient(const FieldState& state, int k) {
    state.validate();
    if (k < 0 || k > state.grid / 2)
        throw std::invalid_argument("mode_coefficient: k out of range");
    Workspace& ws = workspace_for(state.grid);
    return ws.to_spectrum(state.y)[static_cast<size_t>(k)];
}

std::vector<double> cubic_force(const FieldState& state) {
    state.validate();
    Workspace& ws = workspace_for(state.grid);
    return ws.to_real(cubic_force_spectrum(ws, ws.to_spectrum(state.y), state.params));
}

FieldState step_conservative(const FieldState& state, double dt) {
    return step_impl(state, dt, nullptr, nullptr);
}

FieldState step_with_rr(const FieldState& state, double dt, const RRConfig& config) {
    config.validate();
    if (config.reduction == RRConfig::Reduction::off)
        throw std::invalid_argument(
            "step_with_rr: literal third-derivative mode is experimental; use LiteralRRStepper");
    if (config.kernel_order > 0)
        throw std::invalid_argument(
            "step_with_rr: the order-reduced substitution exists for the m = 0 kernel term "
            "only; higher orders require LiteralRRStepper");
    return step_impl(state, dt, &config, nullptr);
}

// ---------------------------------------------------------------------------
// Radiation-reaction kernel

namespace {

// Finite-difference weights for d^order/dt^order at offset 0 given sample
// offsets (units of dt): solve the Vandermonde moment system.
std::vector<double> stencil_weights(const std::vector<double>& offsets, int order) {
    const int w = static_cast<int>(offsets.size());
    if (order >= w) throw std::logic_error("stencil_weights: window too short");
    std::vector<std::vector<long double>> a(static_cast<size_t>(w),
                                            std::vector<long double>(static_cast<size_t>(w + 1), 0.0L));
    for (int r = 0; r < w; ++r) {
        for (int i = 0; i < w; ++i)
            a[static_cast<size_t>(r)][static_cast<size_t>(i)] =
                std::pow(static_cast<long double>(offsets[static_cast<size_t>(i)]),
                         static_cast<long double>(r));
        long double rhs = 0.0L;
        if (r == order) {
            rhs = 1.0L;
            for (int f = 2; f <= order; ++f) rhs *= f;
        }
        a[static_cast<size_t>(r)][static_cast<size_t>(w)] = rhs;
    }
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < w; ++col) {
        int piv = col;
        for (int r = col + 1; r < w; ++r)
            if (std::abs(a[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::abs(a[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
                piv = r;
        std::swap(a[static_cast<size_t>(col)], a[static_cast<size_t>(piv)]);
        const long double d = a[static_cast<size_t>(col)][static_cast<size_t>(col)];
        if (d == 0.0L) throw std::runtime_error("stencil_weights: singular system");
        for (int r = 0; r < w; ++r) {
            if (r == col) continue;
            const long double f = a[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
            for (int cc = col; cc <= w; ++cc)
                a[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                    f * a[static_cast<size_t>(col)][static_cast<size_t>(cc)];
        }
    }
    std::vector<double> weights(static_cast<size_t>(w));
    for (int i = 0; i < w; ++i)
        weights[static_cast<size_t>(i)] = static_cast<double>(
            a[static_cast<size_t>(i)][static_cast<size_t>(w)] /
            a[static_cast<size_t>(i)][static_cast<size_t>(i)]);
    return weights;
}

// Exact moments integral z^j e^{i k z} dz over one period for every Fourier
// mode of a band-limited field, so polynomial kernels integrate exactly.
double field_moment(const std::vector<Complex>& coeff, int j, const StringParams& p, int G) {
    const double L = p.length;
    double moment = coeff[0].real() * std::pow(L, j + 1) / (j + 1);
    for (int k = 1; k < G / 2; ++k) {
        const double kt = 2.0 * kPi * k / L;
        Complex I(0.0, 0.0);  // integral of z^r e^{i kt z}, built by recurrence
        for (int r = 1; r <= j; ++r)
            I = (std::pow(L, r) - static_cast<double>(r) * I) / Complex(0.0, kt);
        if (j == 0) I = Complex(0.0, 0.0);
        moment += 2.0 * (coeff[static_cast<size_t>(k)] * I).real();
    }
    return moment;
}

struct KernelMoments {
    int order;
    StringParams params;
    std::vector<std::vector<double>> mu;  // [m][j], j = 0..2m

    double eval(double x) const {
        double e = 0.0;
        for (int m = 0; m <= order; ++m) {
            double fact = 1.0;
            for (int f = 2; f <= 2 * m; ++f) fact *= f;
            const double kcoef = (m + 1.0) / (fact * (2 * m + 1) * (2 * m + 3));
            double integral = 0.0;
            double binom = 1.0;
            for (int j = 0; j <= 2 * m; ++j) {
                if (j > 0) binom = binom * (2 * m - j + 1) / j;
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                integral += binom * sign * std::pow(x, 2 * m - j) *
                            mu[static_cast<size_t>(m)][static_cast<size_t>(j)];
            }
            e += kcoef * integral;
        }
        return params.sigma / kPi * e;
    }
};

KernelMoments kernel_moments(std::span<const FieldState> window,
                             const std::vector<double>& offsets, int order) {
    const FieldState& ref = window[0];
    Workspace& ws = workspace_for(ref.grid);
    const double dt = (window.back().t - window.front().t) /
                      (offsets.back() - offsets.front());

    KernelMoments km;
    km.order = order;
    km.params = ref.params;
    km.mu.resize(static_cast<size_t>(order + 1));
    for (int m = 0; m <= order; ++m) {
        const int d = 2 * m + 3;
        const auto weights = stencil_weights(offsets, d);
        std::vector<double> combo(static_cast<size_t>(ref.grid), 0.0);
        for (size_t i = 0; i < window.size(); ++i)
            for (int g = 0; g < ref.grid; ++g)
                combo[static_cast<size_t>(g)] +=
                    weights[i] * window[i].y[static_cast<size_t>(g)];
        const double scale = std::pow(dt, d);
        for (auto& v : combo) v /= scale;
        const auto spec = ws.to_spectrum(combo);
        auto& mu_m = km.mu[static_cast<size_t>(m)];
        mu_m.resize(static_cast<size_t>(2 * m + 1));
        for (int j = 0; j <= 2 * m; ++j)
            mu_m[static_cast<size_t>(j)] = field_moment(spec, j, ref.params, ref.grid);
    }
    return km;
}

void check_history(std::span<const FieldState> window) {
    const FieldState& ref = window[0];
    ref.validate();
    const double dt = window[1].t - window[0].t;
    if (!(dt > 0.0)) throw std::invalid_argument("rr history: non-increasing times");
    for (size_t i = 1; i < window.size(); ++i) {
        if (window[i].grid != ref.grid)
            throw std::invalid_argument("rr history: mixed grid sizes");
        if (std::abs(window[i].t - window[i - 1].t - dt) > 1e-9 * dt)
            throw std::invalid_argument("rr history: non-uniform time spacing");
    }
}

}  // namespace

double rr_field(std::span<const FieldState> history, double x, const RRConfig& config) {
    config.validate();
    const size_t need = static_cast<size_t>(2 * config.kernel_order + 5);
    if (history.size() < need)
        throw std::runtime_error("rr_field: insufficient history (need " +
                                 std::to_string(need) + " states)");
    // centred stencils want an odd window; drop the oldest state if needed
    std::span<const FieldState> window =
        (history.size() % 2 == 0) ? history.subspan(1) : history;
    if (window.size() > 33)
        throw std::invalid_argument(
            "rr_field: history window wider than 33 states makes the stencil solve "
            "ill-conditioned; pass a trailing slice instead");
    check_history(window);

    const int half = static_cast<int>(window.size() / 2);
    std::vector<double> offsets;
    for (int o = -half; o <= half; ++o) offsets.push_back(static_cast<double>(o));
    return kernel_moments(window, offsets, config.kernel_order).eval(x);
}

// ---------------------------------------------------------------------------
// Literal (non-reduced) stepping

LiteralRRStepper::LiteralRRStepper(const RRConfig& config) : config_(config) {
    config_.validate();
    config_.reduction = RRConfig::Reduction::off;
}

FieldState LiteralRRStepper::step(const FieldState& state, double dt) {
    if (!history_.empty() && std::abs(dt - dt_) > 1e-12 * dt_)
        throw std::invalid_argument("LiteralRRStepper: dt must stay fixed");
    dt_ = dt;
    history_.push_back(state);
    const size_t window = static_cast<size_t>(2 * config_.kernel_order + 5);
    while (history_.size() > window) history_.pop_front();

    std::vector<double> force;
    if (history_.size() == window && state.params.sigma != 0.0) {
        std::vector<FieldState> snap(history_.begin(), history_.end());
        std::vector<double> offsets;
        for (size_t i = 0; i < window; ++i)
            offsets.push_back(static_cast<double>(i) - static_cast<double>(window - 1));
        const auto km = kernel_moments(snap, offsets, config_.kernel_order);
        force.resize(static_cast<size_t>(state.grid));
        for (int g = 0; g < state.grid; ++g)
            force[static_cast<size_t>(g)] =
                state.params.sigma * km.eval(state.params.length * g / state.grid);
    } else {
        force.assign(static_cast<size_t>(state.grid), 0.0);
    }
    return step_impl(state, dt, &config_, &force);
}

// ---------------------------------------------------------------------------
// Snapshots

void write_snapshot(std::ostream& os, const FieldState& state) {
    os << state.grid << ' ' << io::fmt(state.params.length) << ' '
       << io::fmt(state.params.speed) << ' ' << io::fmt(state.params.gamma) << ' '
       << io::fmt(state.params.sigma) << ' ' << io::fmt(state.t) << '\n';
    for (int i = 0; i < state.grid; ++i)
        os << io::fmt(state.y[static_cast<size_t>(i)]) << ' '
           << io::fmt(state.ydot[static_cast<size_t>(i)]) << '\n';
}

FieldState read_snapshot(std::istream& is) {
    FieldState s;
    if (!(is >> s.grid >> s.params.length >> s.params.speed >> s.params.gamma >>
          s.params.sigma >> s.t))
        throw std::runtime_error("read_snapshot: bad header");
    s.y.resize(static_cast<size_t>(s.grid));
    s.ydot.resize(static_cast<size_t>(s.grid));
    for (int i = 0; i < s.grid; ++i)
        if (!(is >> s.y[static_cast<size_t>(i)] >> s.ydot[static_cast<size_t>(i)]))
            throw std::runtime_error("read_snapshot: truncated samples");
    s.validate();
    return s;
}

}  // namespace nlstring::classical
