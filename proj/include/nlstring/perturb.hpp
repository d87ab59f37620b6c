// First-order perturbation theory in the quartic string Hamiltonian:
// diagonal energy corrections, interaction-picture evolved states, the
// long-time transition coefficient with its selection rules, and the
// first-order Heisenberg-operator solution with resonance guards.

#ifndef NLSTRING_PERTURB_HPP
#define NLSTRING_PERTURB_HPP

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlstring/fock.hpp"
#include "nlstring/modes.hpp"

namespace nlstring::perturb {

using Complex = std::complex<double>;

/// First-order amplitude into one final state. |amplitude|^2 may exceed 1
/// outside the validity window of the theory; `valid` is lowered once the
/// probability passes 0.1.
struct TransitionRecord {
    fock::FockState initial;
    fock::FockState final_state;
    Complex amplitude{0.0, 0.0};
    bool on_resonance = false;
    bool valid = true;
    double t = 0.0;

    double probability() const { return std::norm(amplitude); }
};

/// Diagonal first-order correction: sum over ordered phonon pairs (i != r)
/// of 2 gamma pi^4 s_i^2 s_r^2 / (3 w_i^2 w_r^2 L). For the linear dispersion
/// this reduces to (ordered pair count) * gamma L^3 / (24 v^4).
double energy_correction_first_order(const fock::FockState& state, const StringParams& p);

/// Interaction-picture state at time t to first order:
///   |psi(t)> = |i> - i sum_f <f|H2|i> (e^{i dw t} - 1)/(i dw) |f>,
/// dw taken from the free energies; the dw -> 0 limit is t. Records carry
/// every reachable final state plus the initial state itself.
std::vector<TransitionRecord>
evolve_first_order(const fock::FockState& initial, double t, const fock::FockBasis& basis,
                   const StringParams& p);

/// CSV columns: initial, final, re_amp, im_amp, prob, resonant_flag, t.
void write_transition_csv(std::ostream& os, const std::vector<TransitionRecord>& records);

/// Long-time |j> -> |p,q,r> transition coefficient. Zero unless the momentum
/// rule j = p+q+r and the resonance |w_p|+|w_q|+|w_r| = |w_j| both hold
/// (linear dispersion makes both exact integer tests). On resonance the
/// first-order probability grows as rate * t^2; `rate` is that quadratic
/// coefficient |<pqr|H2|j>|^2. The golden-rule closed form's coefficient of t
/// is reported alongside for comparison (its Dirac delta has no finite
/// discrete-spectrum value, so only the ratio is meaningful).
struct TransitionRate {
    double rate = 0.0;               // coefficient of t^2 in the probability
    double golden_rule_coefficient = 0.0;  // 32 pi^9 g^2 (jpqr)^2 / (L^6 w_p w_q w_r w_j)
    double ratio = 0.0;              // golden_rule_coefficient / rate (0 when rate = 0)
    bool momentum_allowed = false;
    bool resonant = false;
};

TransitionRate transition_rate_longtime(ModeIndex j, const std::array<ModeIndex, 3>& finals,
                                        const StringParams& p);

/// One tri-linear term of the first-order Heisenberg solution for C_n(t):
/// prefactor L_coeff / (w_n^2 - freq^2) on the monomial, oscillating as
/// e^{i freq t}. Terms whose denominator vanishes (to within the secular
/// threshold) are flagged and left unevaluated. delta_k records the net
/// momentum transfer of the printed monomial; the solution of the equation of
/// motion requires delta_k = -n, and terms violating that are flagged too.
struct HeisenbergTerm {
    int index = 0;            // 0..7, order of appearance
    std::string monomial;     // e.g. "B+_s B+_j B_{s+j+n}" with s, j, n resolved
    std::array<ModeIndex, 3> operator_modes{};  // left to right
    std::array<bool, 3> operator_raises{};
    double L_coeff = 0.0;     // L_{a,b} factor
    double freq = 0.0;        // signed phase frequency
    double denominator = 0.0; // w_n^2 - freq^2
    bool secular = false;
    double prefactor = 0.0;   // L_coeff / denominator, NaN when secular
    Complex phase{1.0, 0.0};  // e^{i freq t} at the requested t
    int delta_k = 0;
    bool k_conserving = false;
    // Homogeneous-solution corrections: the coefficient of this monomial
    // inside E_n (on e^{+i w_n t}) and F_n (on e^{-i w_n t}) after matching
    // C_n(0) and Cdot_n(0).
    double e_coeff = 0.0;
    double f_coeff = 0.0;
};

/// All eight terms for one (s, j) pair of the double sum, plus the free-part
/// coefficients: E_n = e_free * B+_{-n} + corrections, F_n = f_free * B_n +
/// corrections.
struct HeisenbergSolution {
    ModeIndex n = 0;
    int s = 0;
    int j = 0;
    std::array<HeisenbergTerm, 8> terms;
    double e_free = 1.0;
    double f_free = 1.0;
};

inline constexpr double kSecularEpsilon = 1e-9;  // relative to w_n^2

HeisenbergSolution heisenberg_coefficient(ModeIndex n, int s, int j, double t,
                                          const StringParams& p);

/// Single-term selector, term_index in 0..7.
HeisenbergTerm heisenberg_coefficient(ModeIndex n, int s, int j, int term_index, double t,
                                      const StringParams& p);

}  // namespace nlstring::perturb

#endif  // NLSTRING_PERTURB_HPP
