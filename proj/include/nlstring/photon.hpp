// String-photon transition amplitudes in the dipole approximation and the
// golden-rule emission rate integrated over photon directions.
//
// Every amplitude here is "reduced": the coefficient multiplying the
// energy-conserving Dirac deltas, with separate on-shell predicates. Rates
// come only from the phase-space quadrature in emission_rate.

#ifndef NLSTRING_PHOTON_HPP
#define NLSTRING_PHOTON_HPP

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlstring/modes.hpp"

namespace nlstring::photon {

using Complex = std::complex<double>;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const;
    Vec3 normalized() const;
    friend Vec3 operator*(double a, const Vec3& v) { return {a * v.x, a * v.y, a * v.z}; }
    friend double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
    friend Vec3 cross(const Vec3& a, const Vec3& b) {
        return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    }
};

/// Deterministic transverse orthonormal pair for direction q: eps1 along
/// z x q (or x when q is parallel to z), eps2 = q x eps1, so (eps1, eps2, q)
/// is right-handed. Rejects q = 0.
std::pair<Vec3, Vec3> polarization_basis(const Vec3& q);

/// One photon: wavevector, polarization index r in {1,2}, frequency |q|
/// (c = 1) and the derived transverse polarization vector.
struct PhotonSpec {
    Vec3 q;
    int polarization = 1;

    PhotonSpec(const Vec3& wavevector, int r);

    double frequency() const { return q.norm(); }
    const Vec3& eps() const { return eps_; }

private:
    Vec3 eps_;
};

inline constexpr double kOnShellTol = 1e-9;        // relative to max frequency
inline constexpr double kSingularityGuard = 1e-8;  // |k_m - q1| < guard / L

/// (e^{-i q1 L} - 1) / (k_m - q1), the string form factor of photon emission
/// against phonon m. The 0/0 point q1 = k_m is removable with limit iL; the
/// guard window returns the limit directly.
Complex geometric_factor_emit(ModeIndex m, double q1, const StringParams& p);

/// (e^{+i p1 L} - 1) / (k_n - p1), the absorption-side form factor, with
/// removable limit -iL.
Complex geometric_factor_absorb(ModeIndex n, double p1, const StringParams& p);

/// Single-phonon emission |m>|0_F> -> |0_s>|q,r>: coefficient of
/// delta(w_q - |w_m|).
struct EmissionAmplitude {
    Complex value{0.0, 0.0};
    bool on_shell = false;
};
EmissionAmplitude amp_single_emission(ModeIndex m, const PhotonSpec& photon,
                                      const StringParams& p);

/// Photon scattering |m>|p,r1> -> |n>|q,r2>: coefficient of
/// delta(w_q - |w_m|) delta(w_p - |w_n|).
struct ScatterAmplitude {
    Complex value{0.0, 0.0};
    bool on_shell_out = false;  // w_q = |w_m|
    bool on_shell_in = false;   // w_p = |w_n|
};
ScatterAmplitude amp_scatter(ModeIndex m, ModeIndex n, const PhotonSpec& pin,
                             const PhotonSpec& pout, const StringParams& p);

/// One gated term of the nonlinear-assisted amplitudes: active only when its
/// momentum rule holds; the two Dirac deltas become on-shell booleans.
struct NonlinearTerm {
    std::string momentum_rule;     // e.g. "m+l=n+j"
    bool gate = false;             // Kronecker rule satisfied
    bool on_shell_phonon = false;  // phonon energy-balance delta
    bool on_shell_photon = false;  // photon-phonon match delta
    ModeIndex emitter = 0;         // phonon converted to the photon
    Complex contribution{0.0, 0.0};
};

/// The printed amplitudes couple the photon through its third polarization
/// component even though the dipole coupling singles out the second; both
/// readings are exposed and reported.
enum class PolarizationAxis { x2 = 2, x3 = 3 };

struct NonlinearAmplitude {
    Complex value{0.0, 0.0};
    double eps2 = 0.0;  // polarization component along the vibration axis
    double eps3 = 0.0;  // printed component
    PolarizationAxis axis_used = PolarizationAxis::x3;
    std::array<NonlinearTerm, 4> terms{};  // first 3 used for the 3-term sum
    int term_count = 0;
};

/// Nonlinearity-assisted emission |m,l,f>|0_F> -> |n,j>|p,r> (three gated
/// terms).
NonlinearAmplitude amp_nonlinear_emission(ModeIndex m, ModeIndex l, ModeIndex f,
                                          ModeIndex n, ModeIndex j, const PhotonSpec& photon,
                                          const StringParams& p,
                                          PolarizationAxis axis = PolarizationAxis::x3);

/// Four-phonon absorption |m,l,f,j>|0_F> -> |n>|p,r> (four gated terms).
NonlinearAmplitude amp_nonlinear_absorb4(ModeIndex m, ModeIndex l, ModeIndex f, ModeIndex j,
                                         ModeIndex n, const PhotonSpec& photon,
                                         const StringParams& p,
                                         PolarizationAxis axis = PolarizationAxis::x3);

/// Golden-rule emission rate of phonon m: (w^2 / 2 pi) times the integral of
/// sum_r |reduced amplitude|^2 over the on-shell sphere w_q = |w_m|,
/// by Gauss-Legendre in cos(theta) x trapezoid in phi with resolution^2
/// direction pairs.
double emission_rate(ModeIndex m, const StringParams& p, int angular_resolution);

/// One direction of the differential-rate table.
struct AngularRateSample {
    double theta = 0.0;
    double phi = 0.0;
    int polarization = 1;
    double density = 0.0;  // dRate/dOmega on the emission shell
};

std::vector<AngularRateSample> angular_rate_table(ModeIndex m, const StringParams& p,
                                                  int angular_resolution);

/// Differential-rate table: rows (theta, phi, polarization, dRate_dOmega).
void write_angular_table(std::ostream& os, ModeIndex m, const StringParams& p,
                         int angular_resolution);

}  // namespace nlstring::photon

#endif  // NLSTRING_PHOTON_HPP
