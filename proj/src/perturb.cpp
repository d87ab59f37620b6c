#include "nlstring/perturb.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "nlstring/io.hpp"

namespace nlstring::perturb {

namespace {

double free_energy(const fock::FockState& s, const StringParams& p) {
    double e = 0.0;
    for (const auto& [mode, c] : s.occupations()) e += std::abs(omega(mode, p)) * c;
    return e;
}

}  // namespace

double energy_correction_first_order(const fock::FockState& state, const StringParams& p) {
    const double pi4 = std::pow(std::numbers::pi, 4);
    double sum = 0.0;
    for (const auto& [a, ma] : state.occupations()) {
        for (const auto& [b, mb] : state.occupations()) {
            const int pairs = (a == b) ? ma * (ma - 1) : ma * mb;
            if (pairs == 0) continue;
            const double wa = omega(a, p), wb = omega(b, p);
            sum += pairs * 2.0 * p.gamma * pi4 *
                   (static_cast<double>(a) * a * static_cast<double>(b) * b) /
                   (3.0 * wa * wa * wb * wb * p.length);
        }
    }
    return sum;
}

std::vector<TransitionRecord>
evolve_first_order(const fock::FockState& initial, double t, const fock::FockBasis& basis,
                   const StringParams& p) {
    auto idx = basis.find(initial);
    if (!idx) throw std::invalid_argument("evolve_first_order: initial state not in basis");

    const double e_initial = free_energy(initial, p);
    const double freq_unit = 2.0 * std::numbers::pi * p.speed / p.length;
    const double res_tol = 1e-9 * freq_unit;

    auto column = fock::h2_column(basis, *idx, p);
    column.try_emplace(*idx);  // the initial state always appears, coupled or not

    std::vector<TransitionRecord> records;
    records.reserve(column.size());
    for (const auto& [row, me] : column) {
        const fock::FockState& fin = basis.state(row);
        const double dw = free_energy(fin, p) - e_initial;
        const bool resonant = std::abs(dw) < res_tol;

        Complex kernel;
        if (resonant) {
            kernel = Complex(t, 0.0);
        } else {
            kernel = (std::exp(Complex(0.0, dw * t)) - 1.0) / Complex(0.0, dw);
        }

        TransitionRecord rec;
        rec.initial = initial;
        rec.final_state = fin;
        rec.amplitude = Complex(0.0, -1.0) * me * kernel;
        if (row == *idx) rec.amplitude += 1.0;
        rec.on_resonance = resonant;
        rec.t = t;
        rec.valid = !(row != *idx && rec.probability() > 0.1);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_transition_csv(std::ostream& os, const std::vector<TransitionRecord>& records) {
    os << "initial,final,re_amp,im_amp,prob,resonant_flag,t\n";
    for (const auto& r : records) {
        os << r.initial.label() << ',' << r.final_state.label() << ','
           << io::fmt(r.amplitude.real()) << ',' << io::fmt(r.amplitude.imag()) << ','
           << io::fmt(r.probability()) << ',' << (r.on_resonance ? 1 : 0) << ','
           << io::fmt(r.t) << '\n';
    }
}

TransitionRate transition_rate_longtime(ModeIndex j, const std::array<ModeIndex, 3>& finals,
                                        const StringParams& p) {
    require_nonzero_mode(j, "transition_rate_longtime");
    for (ModeIndex m : finals) require_nonzero_mode(m, "transition_rate_longtime");
    const auto [fp, fq, fr] = finals;

    TransitionRate out;
    out.momentum_allowed = (fp + fq + fr == j);
    out.resonant = (std::abs(fp) + std::abs(fq) + std::abs(fr) == std::abs(j));
    if (!out.momentum_allowed || !out.resonant) return out;

    // Occupation multiplicities of the final multiset {p,q,r}.
    int mult_prod = 1;
    if (fp == fq && fq == fr) {
        mult_prod = 6;
    } else if (fp == fq || fq == fr || fp == fr) {
        mult_prod = 2;
    }

    const double M = coupling_M(fp, fq, fr, p);
    const double two_l = 2.0 * p.length;
    const double wprod = std::abs(omega(fp, p) * omega(fq, p) * omega(fr, p) * omega(j, p));

    // |<pqr|H2|j>|^2 from the single-annihilator quartic family: prefactor 4,
    // 3!/prod(mult!) operator orderings, sqrt(mult!) occupation normalization.
    out.rate = 16.0 * M * M * (36.0 / mult_prod) / (std::pow(two_l, 4) * wprod);

    const double pi9 = std::pow(std::numbers::pi, 9);
    const double jpqr = static_cast<double>(j) * fp * fq * fr;
    out.golden_rule_coefficient = 32.0 * pi9 * p.gamma * p.gamma * jpqr * jpqr /
                            (std::pow(p.length, 6) * wprod);
    out.ratio = out.rate > 0.0 ? out.golden_rule_coefficient / out.rate : 0.0;
    return out;
}

namespace {

std::string monomial_text(const std::array<ModeIndex, 3>& modes,
                          const std::array<bool, 3>& raises) {
    std::string s;
    for (int i = 0; i < 3; ++i) {
        if (i) s += ' ';
        s += raises[static_cast<size_t>(i)] ? "B+_" : "B_";
        s += std::to_string(modes[static_cast<size_t>(i)]);
    }
    return s;
}

}  // namespace

HeisenbergSolution heisenberg_coefficient(ModeIndex n, int s, int j, double t,
                                          const StringParams& p) {
    require_nonzero_mode(n, "heisenberg_coefficient");
    HeisenbergSolution sol;
    sol.n = n;
    sol.s = s;
    sol.j = j;

    const double wn = omega(n, p);
    const double ws = omega(s, p);
    const double wj = omega(j, p);
    const double wx = omega(s + j - n, p);

    struct Spec {
        int la, lb;                       // subscripts of the L factor
        std::array<ModeIndex, 3> modes;   // left to right
        std::array<bool, 3> raises;
        double freq;
    };
    const std::array<Spec, 8> specs = {{
        {-s, -j, {s, j, s + j + n}, {true, true, false}, ws + wj - wx},
        {-s, -j, {s, j, -s - j - n}, {true, true, false}, ws + wj + wx},
        {-s, j, {s, j, s + n - j}, {true, false, false}, ws - wj - wx},
        {-s, j, {s, j - s - n, j}, {true, true, false}, ws - wj + wx},
        {s, -j, {j, s, n + j - s}, {true, false, false}, wj - ws - wx},
        {s, -j, {j, s - n - j, s}, {true, true, false}, wj - ws + wx},
        {s, j, {j, s, n - s - j}, {false, false, false}, -(wj + ws + wx)},
        {s, j, {s + j - n, j, s}, {true, false, false}, -(wj + ws - wx)},
    }};

    for (int k = 0; k < 8; ++k) {
        const Spec& sp = specs[static_cast<size_t>(k)];
        HeisenbergTerm& term = sol.terms[static_cast<size_t>(k)];
        term.index = k;
        term.operator_modes = sp.modes;
        term.operator_raises = sp.raises;
        term.monomial = monomial_text(sp.modes, sp.raises);
        term.L_coeff = coupling_L(sp.la, sp.lb, n, p);
        term.freq = sp.freq;
        term.denominator = wn * wn - sp.freq * sp.freq;
        term.phase = std::exp(Complex(0.0, sp.freq * t));

        term.delta_k = 0;
        for (int i = 0; i < 3; ++i)
            term.delta_k += sp.raises[static_cast<size_t>(i)]
                                ? sp.modes[static_cast<size_t>(i)]
                                : -sp.modes[static_cast<size_t>(i)];
        term.k_conserving = (term.delta_k == -n);

        if (term.L_coeff == 0.0) {
            term.prefactor = 0.0;
        } else if (std::abs(term.denominator) < kSecularEpsilon * wn * wn) {
            term.secular = true;
            term.prefactor = std::numeric_limits<double>::quiet_NaN();
        } else {
            term.prefactor = term.L_coeff / term.denominator;
        }

        // Match C_n(0) = B+_{-n} + B_n and Cdot_n(0) = i w_n (B+_{-n} - B_n):
        // each particular term shifts E_n and F_n on its own monomial.
        if (!term.secular && term.prefactor != 0.0) {
            term.e_coeff = -0.5 * (1.0 + term.freq / wn) * term.prefactor;
            term.f_coeff = -0.5 * (1.0 - term.freq / wn) * term.prefactor;
        }
    }
    return sol;
}

HeisenbergTerm heisenberg_coefficient(ModeIndex n, int s, int j, int term_index, double t,
                                      const StringParams& p) {
    if (term_index < 0 || term_index > 7)
        throw std::invalid_argument("heisenberg_coefficient: term_index must be in 0..7");
    return heisenberg_coefficient(n, s, j, t, p).terms[static_cast<size_t>(term_index)];
}

}  // namespace nlstring::perturb
