// Mode arithmetic for the periodic string: dispersion and the cubic/quartic
// coupling coefficients shared by every other module.
//
// Unit system: hbar = c = 1 and unit linear mass density, so energies are
// inverse times and the kinetic density is (1/2)(dy/dt)^2.

#ifndef NLSTRING_MODES_HPP
#define NLSTRING_MODES_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlstring {

/// Physical constants of one string. gamma may take either sign; the
/// perturbative modules assume |gamma| small but do not enforce it.
struct StringParams {
    double length = 1.0;   // L > 0
    double speed = 1.0;    // v > 0
    double gamma = 0.0;    // cubic-force strength
    double sigma = 0.0;    // charge density, >= 0

    void validate() const {
        if (!(length > 0.0)) throw std::invalid_argument("StringParams: length must be > 0");
        if (!(speed > 0.0)) throw std::invalid_argument("StringParams: speed must be > 0");
        if (!(sigma >= 0.0)) throw std::invalid_argument("StringParams: sigma must be >= 0");
    }

    bool operator==(const StringParams&) const = default;
};

/// Mode label n of the periodic basis function exp(i 2 pi n x / L). The
/// quantum-side modules require n != 0; the classical solver keeps the
/// zero mode.
using ModeIndex = int;

inline void require_nonzero_mode(ModeIndex n, const char* who) {
    if (n == 0) throw std::invalid_argument(std::string(who) + ": zero mode not allowed");
}

/// Signed mode frequency omega_n = 2 pi v n / L. Phonon energies are
/// |omega_n|; callers take the absolute value where energy is meant.
inline double omega(ModeIndex n, const StringParams& p) {
    return 2.0 * std::numbers::pi * p.speed * static_cast<double>(n) / p.length;
}

/// Wavenumber k_n = 2 pi n / L.
inline double wavenumber(ModeIndex n, const StringParams& p) {
    return 2.0 * std::numbers::pi * static_cast<double>(n) / p.length;
}

/// Quartic-vertex coefficient
///   M_{n,s,t} = (2 pi^4 gamma / 3 L^3) n s t (n + s + t),
/// fully symmetric in (n, s, t); zero when any argument (or the sum) is 0.
/// The index product is formed in integer arithmetic so the symmetry is
/// exact, not up to rounding.
inline double coupling_M(int n, int s, int t, const StringParams& p) {
    const double pi4 = std::pow(std::numbers::pi, 4);
    const double L3 = p.length * p.length * p.length;
    const long long idx = static_cast<long long>(n) * s * t * (n + s + t);
    return 2.0 * pi4 * p.gamma / (3.0 * L3) * static_cast<double>(idx);
}

/// Heisenberg-equation coupling for mode j,
///   L_{s,t} = -(8 pi^4 gamma j / 3 L^4) s t (s + t - j).
inline double coupling_L(int s, int t, ModeIndex j, const StringParams& p) {
    const double pi4 = std::pow(std::numbers::pi, 4);
    const double L4 = std::pow(p.length, 4);
    const long long idx = static_cast<long long>(j) * s * t * (s + t - j);
    return -8.0 * pi4 * p.gamma / (3.0 * L4) * static_cast<double>(idx);
}

}  // namespace nlstring

#endif  // NLSTRING_MODES_HPP
