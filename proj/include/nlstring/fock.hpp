// Truncated bosonic Fock space over string modes: basis enumeration, ladder
// operators with the nonstandard normalization [B_n, B_m^+] = d_{nm}/(2L|w_n|),
// sparse assembly of the free and quartic string Hamiltonians, and dense
// eigendecomposition used as the module-wide oracle.

#ifndef NLSTRING_FOCK_HPP
#define NLSTRING_FOCK_HPP

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlstring/modes.hpp"

namespace nlstring::fock {

using Complex = std::complex<double>;

/// Occupation-number state: sorted (mode, count) pairs, counts >= 1, no zero
/// mode. Internally occupation-normalized (orthonormal basis); conversion from
/// the repeated-entry kets of the mode expansion happens in apply_ladder.
class FockState {
public:
    FockState() = default;

    /// Build from a list of modes with repetition, e.g. {1, 1, -3}.
    static FockState from_modes(const std::vector<ModeIndex>& modes);
    static FockState vacuum() { return FockState{}; }

    int count(ModeIndex mode) const;
    int total_phonons() const;
    int momentum() const;  // K = sum of mode * count
    bool empty() const { return occ_.empty(); }

    /// Copy with one phonon added in `mode`. New count returned through `out`.
    FockState raised(ModeIndex mode, int* new_count = nullptr) const;
    /// Copy with one phonon removed; requires count(mode) >= 1.
    FockState lowered(ModeIndex mode, int* old_count = nullptr) const;

    const std::vector<std::pair<ModeIndex, int>>& occupations() const { return occ_; }

    /// Label like "[-3;1;1]" ("[]" for the vacuum), mode list with repetition.
    std::string label() const;
    /// Inverse of label().
    static FockState parse(const std::string& text);

    bool operator==(const FockState& o) const { return occ_ == o.occ_; }
    bool operator<(const FockState& o) const { return occ_ < o.occ_; }

private:
    std::vector<std::pair<ModeIndex, int>> occ_;
};

inline constexpr std::int64_t kDefaultBasisCap = 200000;

/// Enumerated basis: modes -N..-1, 1..N, total phonons <= P, optionally
/// restricted to one total-momentum sector. States are sorted by
/// (total phonons, momentum, occupations) so indices are reproducible.
class FockBasis {
public:
    FockBasis(int cutoff, int max_phonons,
              std::optional<int> momentum_sector = std::nullopt,
              std::int64_t state_cap = kDefaultBasisCap);

    int cutoff() const { return cutoff_; }
    int max_phonons() const { return max_phonons_; }
    std::optional<int> momentum_sector() const { return sector_; }

    std::int64_t size() const { return static_cast<std::int64_t>(states_.size()); }
    const FockState& state(std::int64_t i) const { return states_[static_cast<size_t>(i)]; }
    const std::vector<FockState>& states() const { return states_; }

    /// Index of `s`, or nullopt when the state lies outside the truncation.
    std::optional<std::int64_t> find(const FockState& s) const;

private:
    int cutoff_;
    int max_phonons_;
    std::optional<int> sector_;
    std::vector<FockState> states_;
    std::map<FockState, std::int64_t> index_;
};

/// B_m (raise=false) or B_m^+ (raise=true) acting on an occupation-normalized
/// state. Amplitudes are sqrt(count)/sqrt(2L|w_m|) for lowering and
/// sqrt(count+1)/sqrt(2L|w_m|) for raising; lowering an absent mode yields an
/// empty list.
std::vector<std::pair<FockState, Complex>>
apply_ladder(const FockState& state, ModeIndex mode, bool raise, const StringParams& p);

/// Hermitian-flagged sparse matrix in coordinate form over a FockBasis.
struct SparseOperator {
    struct Entry {
        std::int64_t row;
        std::int64_t col;
        Complex value;
    };

    std::int64_t dim = 0;
    std::vector<Entry> entries;
    bool hermitian = false;

    /// max |A - A^+| over stored entries.
    double hermiticity_defect() const;
    /// Largest row sum of |entries| (infinity norm).
    double inf_norm() const;

    /// Coordinate-format text: one "row col re im" line per entry, preceded by
    /// a "dim nnz hermitian" header line.
    void write_coordinate_text(std::ostream& os) const;
    static SparseOperator read_coordinate_text(std::istream& is);
};

/// Free Hamiltonian H1 = 2L sum_n w_n^2 B_n^+ B_n; diagonal with entry
/// sum over phonons of |w_n|.
SparseOperator build_H1(const FockBasis& basis, const StringParams& p);

/// Quartic Hamiltonian H2: the five normal-ordered B-monomial families with
/// weights (-6, -4, -1, -4, -1), mode indices restricted to the cutoff and the
/// zero mode excluded. Conserves total momentum and is Hermitian.
SparseOperator build_H2(const FockBasis& basis, const StringParams& p);

/// One column of H2 (amplitudes <row|H2|col>), used by the perturbative
/// evolution without assembling the full matrix.
std::map<std::int64_t, Complex>
h2_column(const FockBasis& basis, std::int64_t col, const StringParams& p);

inline constexpr std::int64_t kDefaultDenseCap = 4000;

/// k lowest eigenpairs of a Hermitian operator by dense diagonalization,
/// ascending. Residuals are checked against 1e-10 * ||H||_2.
std::vector<std::pair<double, std::vector<Complex>>>
exact_eigs(const SparseOperator& H, int k, std::int64_t dense_cap = kDefaultDenseCap);

/// exp(-i H t) applied to `initial` through the full eigendecomposition.
std::vector<Complex>
evolve_exact(const SparseOperator& H, const std::vector<Complex>& initial, double t,
             std::int64_t dense_cap = kDefaultDenseCap);

}  // namespace nlstring::fock

#endif  // NLSTRING_FOCK_HPP
