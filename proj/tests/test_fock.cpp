#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "nlstring/fock.hpp"
#include "nlstring/perturb.hpp"

using namespace nlstring;
using fock::Complex;
using fock::FockBasis;
using fock::FockState;

namespace {

constexpr double kPi = std::numbers::pi;
const StringParams kRing{2.0 * kPi, 1.0, 0.0, 0.0};  // omega_n = n

StringParams with_gamma(double g) {
    StringParams p = kRing;
    p.gamma = g;
    return p;
}

Eigen::MatrixXcd ladder_matrix(const FockBasis& basis, int mode, bool raise,
                               const StringParams& p) {
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
    for (std::int64_t col = 0; col < basis.size(); ++col) {
        for (const auto& [st, amp] : fock::apply_ladder(basis.state(col), mode, raise, p)) {
            if (auto row = basis.find(st)) B(*row, col) += amp;
        }
    }
    return B;
}

Eigen::MatrixXcd to_dense(const fock::SparseOperator& op) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(op.dim, op.dim);
    for (const auto& e : op.entries) A(e.row, e.col) += e.value;
    return A;
}

// Mirror of the five monomial families assembled through dense matrix
// products instead of per-column chains.
Eigen::MatrixXcd dense_h2_oracle(const FockBasis& basis, const StringParams& p) {
    const int N = basis.cutoff();
    const auto dim = basis.size();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    auto Br = [&](int m) { return ladder_matrix(basis, m, true, p); };
    auto Bl = [&](int m) { return ladder_matrix(basis, m, false, p); };
    auto ok = [&](int m) { return m != 0 && std::abs(m) <= N; };

    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        for (int s = -N; s <= N; ++s) {
            if (s == 0) continue;
            for (int t = -N; t <= N; ++t) {
                if (t == 0) continue;
                if (ok(n + s - t))
                    H += -6.0 * coupling_M(n, s, -t, p) * Br(n) * Br(s) * Bl(t) * Bl(n + s - t);
                if (ok(t - s - n))
                    H += -4.0 * coupling_M(n, s, -t, p) * Br(t) * Bl(s) * Bl(n) * Bl(t - s - n);
                if (ok(-n - s - t))
                    H += -1.0 * coupling_M(n, s, t, p) * Br(n) * Br(s) * Br(t) * Br(-n - s - t);
                if (ok(n + s + t))
                    H += -4.0 * coupling_M(n, s, t, p) * Br(n) * Br(s) * Br(t) * Bl(n + s + t);
                if (ok(-n - s - t))
                    H += -1.0 * coupling_M(n, s, t, p) * Bl(n) * Bl(s) * Bl(t) * Bl(-n - s - t);
            }
        }
    }
    return H;
}

}  // namespace

TEST_CASE("basis enumeration: N=1 P=2 gives the six states in canonical order") {
    FockBasis basis(1, 2);
    REQUIRE(basis.size() == 6);
    CHECK(basis.state(0) == FockState::vacuum());
    CHECK(basis.state(1) == FockState::from_modes({-1}));
    CHECK(basis.state(2) == FockState::from_modes({1}));
    CHECK(basis.state(3) == FockState::from_modes({-1, -1}));
    CHECK(basis.state(4) == FockState::from_modes({-1, 1}));
    CHECK(basis.state(5) == FockState::from_modes({1, 1}));
}

TEST_CASE("basis enumeration: momentum sector and trivial cases") {
    FockBasis sector0(1, 2, 0);
    REQUIRE(sector0.size() == 2);
    CHECK(sector0.state(0) == FockState::vacuum());
    CHECK(sector0.state(1) == FockState::from_modes({-1, 1}));

    CHECK(FockBasis(3, 0).size() == 1);
    CHECK(FockBasis(2, 3).size() == 35);  // C(4 + 3, 3)

    CHECK_THROWS_AS(FockBasis(40, 12), std::invalid_argument);  // over the state cap
    CHECK_THROWS_AS(FockBasis(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(FockBasis(1, -1), std::invalid_argument);
}

TEST_CASE("state label round trip") {
    const FockState s = FockState::from_modes({1, -3, 1});
    CHECK(s.label() == "[-3;1;1]");
    CHECK(FockState::parse(s.label()) == s);
    CHECK(FockState::parse("vac") == FockState::vacuum());
    CHECK(FockState::parse("1,1,-3") == s);
    CHECK(s.total_phonons() == 3);
    CHECK(s.momentum() == -1);
}

TEST_CASE("apply_ladder: vacuum and occupation factors") {
    CHECK(fock::apply_ladder(FockState::vacuum(), 1, false, kRing).empty());

    // L = 2 pi, v = 1: 2 L |w_1| = 4 pi
    auto raised = fock::apply_ladder(FockState::vacuum(), 1, true, kRing);
    REQUIRE(raised.size() == 1);
    CHECK(raised[0].first == FockState::from_modes({1}));
    CHECK(raised[0].second.real() == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-14));

    auto lowered = fock::apply_ladder(FockState::from_modes({1, 1}), 1, false, kRing);
    REQUIRE(lowered.size() == 1);
    CHECK(lowered[0].first == FockState::from_modes({1}));
    CHECK(lowered[0].second.real() ==
          doctest::Approx(std::sqrt(2.0) / std::sqrt(4.0 * kPi)).epsilon(1e-14));

    CHECK_THROWS_AS(fock::apply_ladder(FockState::vacuum(), 0, true, kRing),
                    std::invalid_argument);
}

TEST_CASE("commutator [B_n, B_m+] = delta/(2L|w_n|) below the truncation edge") {
    FockBasis basis(2, 3);
    const StringParams p = kRing;
    for (int n : {-2, -1, 1, 2}) {
        for (int m : {-2, -1, 1, 2}) {
            const Eigen::MatrixXcd comm = ladder_matrix(basis, n, false, p) *
                                              ladder_matrix(basis, m, true, p) -
                                          ladder_matrix(basis, m, true, p) *
                                              ladder_matrix(basis, n, false, p);
            const double expect = n == m ? 1.0 / (2.0 * p.length * std::abs(omega(n, p))) : 0.0;
            for (std::int64_t col = 0; col < basis.size(); ++col) {
                if (basis.state(col).total_phonons() >= basis.max_phonons()) continue;
                for (std::int64_t row = 0; row < basis.size(); ++row) {
                    const double want = (row == col) ? expect : 0.0;
                    CHECK(std::abs(comm(row, col) - want) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("H1 is diagonal with the free phonon energies") {
    FockBasis basis(3, 4);
    auto h1 = fock::build_H1(basis, kRing);
    CHECK(h1.hermitian);
    Eigen::MatrixXcd H = to_dense(h1);

    auto energy_of = [&](const FockState& s) {
        return H(*basis.find(s), *basis.find(s)).real();
    };
    CHECK(energy_of(FockState::vacuum()) == 0.0);
    CHECK(energy_of(FockState::from_modes({3})) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(energy_of(FockState::from_modes({1, 2})) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK((H - Eigen::MatrixXcd(H.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("H2: gamma = 0 gives the zero operator") {
    FockBasis basis(2, 2);
    auto h2 = fock::build_H2(basis, kRing);
    CHECK(h2.entries.empty());
    CHECK(h2.hermitian);
}

TEST_CASE("H2 is Hermitian and conserves total momentum") {
    FockBasis basis(2, 3);
    auto h2 = fock::build_H2(basis, with_gamma(0.7));
    CHECK(h2.hermitian);
    CHECK(h2.hermiticity_defect() < 1e-13);
    for (const auto& e : h2.entries) {
        CHECK(basis.state(e.row).momentum() == basis.state(e.col).momentum());
    }
}

TEST_CASE("H2 equals the dense operator-string oracle on a 35-state basis") {
    FockBasis basis(2, 3);
    const StringParams p = with_gamma(0.234);
    const Eigen::MatrixXcd fast = to_dense(fock::build_H2(basis, p));
    const Eigen::MatrixXcd slow = dense_h2_oracle(basis, p);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("H2 on a momentum sector is the restriction of the full operator") {
    const StringParams p = with_gamma(0.1);
    FockBasis full(2, 3);
    FockBasis sector(2, 3, 0);
    const Eigen::MatrixXcd big = to_dense(fock::build_H2(full, p));
    const Eigen::MatrixXcd small = to_dense(fock::build_H2(sector, p));
    for (std::int64_t i = 0; i < sector.size(); ++i)
        for (std::int64_t j = 0; j < sector.size(); ++j) {
            const auto bi = full.find(sector.state(i)), bj = full.find(sector.state(j));
            CHECK(std::abs(small(i, j) - big(*bi, *bj)) < 1e-14);
        }
}

TEST_CASE("vacuum to four-phonon element matches the mode-expansion coefficient") {
    const double g = 0.02;
    const StringParams p = with_gamma(g);
    FockBasis basis(3, 4);
    const FockState target = FockState::from_modes({1, 1, 1, -3});
    auto column = fock::h2_column(basis, *basis.find(FockState::vacuum()), p);
    const Complex me = column.at(*basis.find(target));

    // closed form: 4 index orderings x sqrt(3!) occupation factor on
    // M_{1,1,1} / sqrt((2L)^4 w_1^3 w_3)
    const double cm = coupling_M(1, 1, 1, p);
    const double expect = -4.0 * cm * std::sqrt(6.0) /
                          std::sqrt(std::pow(2.0 * p.length, 4) * 3.0);
    CHECK(me.real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(me.imag() == 0.0);

    // ratio to the bare coefficient structure is the multiplicity 4 sqrt(6)
    const double bare = cm / std::sqrt(std::pow(2.0 * p.length, 4) * 3.0);
    CHECK(std::abs(me) / bare == doctest::Approx(4.0 * std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("exact_eigs: free spectrum, gamma continuity, and failure modes") {
    FockBasis basis(1, 1);
    auto h1 = fock::build_H1(basis, kRing);
    auto eigs = fock::exact_eigs(h1, 3);
    REQUIRE(eigs.size() == 3);
    CHECK(eigs[0].first == doctest::Approx(0.0));
    CHECK(eigs[1].first == doctest::Approx(1.0));
    CHECK(eigs[2].first == doctest::Approx(1.0));

    // gamma = 0: H1 + H2 has exactly the H1 spectrum
    auto h2 = fock::build_H2(basis, kRing);
    auto h = h1;
    h.entries.insert(h.entries.end(), h2.entries.begin(), h2.entries.end());
    auto eigs2 = fock::exact_eigs(h, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(eigs2[static_cast<size_t>(i)].first ==
              doctest::Approx(eigs[static_cast<size_t>(i)].first).epsilon(1e-13));

    fock::SparseOperator bad;
    bad.dim = 2;
    bad.entries.push_back({0, 1, Complex(1.0, 0.0)});
    bad.hermitian = false;
    CHECK_THROWS_AS(fock::exact_eigs(bad, 1), std::invalid_argument);

    fock::SparseOperator big;
    big.dim = 10;
    big.hermitian = true;
    CHECK_THROWS_AS(fock::exact_eigs(big, 1, 5), std::invalid_argument);
}

TEST_CASE("lowest excited eigenvalue has zero gamma slope, matching the diagonal formula") {
    const double g = 1e-4;
    FockBasis basis(2, 2);

    auto eig1 = [&](double gamma) {
        StringParams p = with_gamma(gamma);
        auto h = fock::build_H1(basis, p);
        auto h2 = fock::build_H2(basis, p);
        h.entries.insert(h.entries.end(), h2.entries.begin(), h2.entries.end());
        h.hermitian = h.hermitian && h2.hermitian;
        return fock::exact_eigs(h, 2)[1].first;
    };
    const double slope = (eig1(g) - eig1(-g)) / (2.0 * g);
    const double predicted =
        perturb::energy_correction_first_order(FockState::from_modes({1}), with_gamma(1.0));
    CHECK(std::abs(slope - predicted) < 1e-6);  // both vanish for one phonon
}

TEST_CASE("evolve_exact: identity at t=0, diagonal phases, unitarity") {
    FockBasis basis(2, 2);
    const StringParams p = with_gamma(0.3);
    auto h = fock::build_H1(basis, p);
    auto h2 = fock::build_H2(basis, p);
    h.entries.insert(h.entries.end(), h2.entries.begin(), h2.entries.end());
    h.hermitian = h.hermitian && h2.hermitian;

    std::vector<Complex> psi0(static_cast<size_t>(basis.size()), Complex(0.0));
    psi0[1] = Complex(0.6, 0.0);
    psi0[3] = Complex(0.0, 0.8);

    auto same = fock::evolve_exact(h, psi0, 0.0);
    for (size_t i = 0; i < psi0.size(); ++i) CHECK(std::abs(same[i] - psi0[i]) < 1e-13);

    // diagonal operator evolves by per-component phases
    auto h1 = fock::build_H1(basis, p);
    auto rotated = fock::evolve_exact(h1, psi0, 1.37);
    Eigen::MatrixXcd H1 = to_dense(h1);
    for (size_t i = 0; i < psi0.size(); ++i) {
        const Complex expect =
            psi0[i] * std::exp(Complex(0.0, -H1(static_cast<std::int64_t>(i),
                                                static_cast<std::int64_t>(i))
                                                .real() *
                                            1.37));
        CHECK(std::abs(rotated[i] - expect) < 1e-12);
    }

    auto moved = fock::evolve_exact(h, psi0, 2.5);
    double norm = 0.0;
    for (const auto& a : moved) norm += std::norm(a);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coordinate-format text round trip") {
    FockBasis basis(2, 2);
    auto h2 = fock::build_H2(basis, with_gamma(0.11));
    std::stringstream buf;
    h2.write_coordinate_text(buf);
    auto back = fock::SparseOperator::read_coordinate_text(buf);
    REQUIRE(back.dim == h2.dim);
    REQUIRE(back.entries.size() == h2.entries.size());
    CHECK(back.hermitian == h2.hermitian);
    for (size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].row == h2.entries[i].row);
        CHECK(back.entries[i].col == h2.entries[i].col);
        CHECK(back.entries[i].value == h2.entries[i].value);  // shortest round trip is exact
    }
}

TEST_CASE("NLSTRING_THREADS caps assembly workers without changing the matrix") {
    FockBasis basis(2, 3);
    const StringParams p = with_gamma(0.21);
    const auto reference = fock::build_H2(basis, p);

    setenv("NLSTRING_THREADS", "2", 1);
    const auto threaded = fock::build_H2(basis, p);
    unsetenv("NLSTRING_THREADS");

    REQUIRE(threaded.entries.size() == reference.entries.size());
    for (size_t i = 0; i < reference.entries.size(); ++i) {
        CHECK(threaded.entries[i].row == reference.entries[i].row);
        CHECK(threaded.entries[i].col == reference.entries[i].col);
        CHECK(threaded.entries[i].value == reference.entries[i].value);
    }

    setenv("NLSTRING_THREADS", "zero", 1);
    CHECK_THROWS_AS(fock::build_H2(basis, p), std::invalid_argument);
    unsetenv("NLSTRING_THREADS");
}
