// Pseudo-spectral solver for the nonlinear string on a periodic grid:
// Strang splitting with an exact linear rotation and a dealiased cubic kick,
// the energy functional, the radiation-reaction kernel series, and the damped
// plus driven equation of motion with order-reduced runaway control.

#ifndef NLSTRING_CLASSICAL_HPP
#define NLSTRING_CLASSICAL_HPP

#include <complex>
#include <deque>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "nlstring/modes.hpp"

namespace nlstring::classical {

/// Real-space samples of (y, dy/dt) on a uniform periodic grid of size G
/// (power of two, >= 8). Value-semantic snapshot.
struct FieldState {
    int grid = 0;
    std::vector<double> y;
    std::vector<double> ydot;
    double t = 0.0;
    StringParams params;

    void validate() const;
};

/// Zero field on G points.
FieldState make_field(int grid, const StringParams& p, double t = 0.0);

inline constexpr int kMaxKernelOrder = 6;

struct RRConfig {
    /// Truncation order of the radiation-reaction kernel series (m = 0..order).
    int kernel_order = 0;
    /// Deterministic stand-in for the vacuum-field component E0^2(x, t);
    /// null means zero drive.
    std::function<double(double, double)> drive;
    enum class Reduction { order_reduced, off };
    /// order_reduced substitutes the conservative acceleration for the third
    /// time derivative (removes runaway solutions); off keeps the literal
    /// derivative and is experimental.
    Reduction reduction = Reduction::order_reduced;

    void validate() const;
};

/// H = integral of ydot^2/2 + v^2 y_x^2 / 2 + gamma y_x^4 / 24; exact for
/// band-limited fields (quartic term evaluated on a zero-padded grid).
double energy(const FieldState& state);

/// Field momentum integral of ydot * y_x, conserved by the periodic dynamics.
double field_momentum(const FieldState& state);

/// Fourier coefficient c_k of y (normalized so y = sum c_k e^{i k x}),
/// 0 <= k <= G/2.
std::complex<double> mode_coefficient(const FieldState& state, int k);

/// The cubic force (gamma/2) y_x^2 y_xx evaluated pseudo-spectrally with
/// padding factor 2 (exact dealiasing for a cubic product).
std::vector<double> cubic_force(const FieldState& state);

/// One Strang step of the conservative equation: half kick, exact Fourier
/// rotation, half kick. Requires dt < 0.5 (L/G) / v.
FieldState step_conservative(const FieldState& state, double dt);

/// Radiation-reaction field E_RR(x) at the centre time of `history`
/// (uniformly spaced states, odd count >= 2*order + 5). Time derivatives are
/// centred finite differences over the whole window; the spatial integral of
/// (x-z)^{2m} against the band-limited derivative field is evaluated through
/// exact polynomial moments of the Fourier modes.
double rr_field(std::span<const FieldState> history, double x, const RRConfig& config);

/// One step of the damped and driven equation in order-reduced mode. The
/// kernel's m = 0 term makes the reaction force spatially uniform, so only
/// the mean mode is forced. Throws for Reduction::off (see LiteralRRStepper)
/// and for kernel_order > 0, where the reduction has no closed instantaneous
/// form.
FieldState step_with_rr(const FieldState& state, double dt, const RRConfig& config);

/// Experimental stepper for the literal third-derivative form: backward
/// stencils on a stored history feed the kernel force. Runaway solutions are
/// expected; the reaction force is zero until the history window fills.
class LiteralRRStepper {
public:
    explicit LiteralRRStepper(const RRConfig& config);

    FieldState step(const FieldState& state, double dt);
    void reset() { history_.clear(); }

private:
    RRConfig config_;
    std::deque<FieldState> history_;
    double dt_ = 0.0;
};

/// Header "G L v gamma sigma t" followed by G rows of "y ydot".
void write_snapshot(std::ostream& os, const FieldState& state);
FieldState read_snapshot(std::istream& is);

}  // namespace nlstring::classical

#endif  // NLSTRING_CLASSICAL_HPP
