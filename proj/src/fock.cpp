#include "nlstring/fock.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "nlstring/io.hpp"

namespace nlstring::fock {

// ---------------------------------------------------------------------------
// FockState

FockState FockState::from_modes(const std::vector<ModeIndex>& modes) {
    FockState s;
    for (ModeIndex m : modes) {
        require_nonzero_mode(m, "FockState::from_modes");
        s = s.raised(m);
    }
    return s;
}

int FockState::count(ModeIndex mode) const {
    auto it = std::lower_bound(occ_.begin(), occ_.end(), mode,
                               [](const auto& e, ModeIndex m) { return e.first < m; });
    return (it != occ_.end() && it->first == mode) ? it->second : 0;
}

int FockState::total_phonons() const {
    int n = 0;
    for (const auto& [mode, c] : occ_) n += c;
    return n;
}

int FockState::momentum() const {
    int k = 0;
    for (const auto& [mode, c] : occ_) k += mode * c;
    return k;
}

FockState FockState::raised(ModeIndex mode, int* new_count) const {
    require_nonzero_mode(mode, "FockState::raised");
    FockState out = *this;
    auto it = std::lower_bound(out.occ_.begin(), out.occ_.end(), mode,
                               [](const auto& e, ModeIndex m) { return e.first < m; });
    if (it != out.occ_.end() && it->first == mode) {
        ++it->second;
        if (new_count) *new_count = it->second;
    } else {
        it = out.occ_.insert(it, {mode, 1});
        if (new_count) *new_count = 1;
    }
    return out;
}

FockState FockState::lowered(ModeIndex mode, int* old_count) const {
    require_nonzero_mode(mode, "FockState::lowered");
    FockState out = *this;
    auto it = std::lower_bound(out.occ_.begin(), out.occ_.end(), mode,
                               [](const auto& e, ModeIndex m) { return e.first < m; });
    if (it == out.occ_.end() || it->first != mode)
        throw std::logic_error("FockState::lowered: mode not occupied");
    if (old_count) *old_count = it->second;
    if (--it->second == 0) out.occ_.erase(it);
    return out;
}

std::string FockState::label() const {
    std::string s = "[";
    bool first = true;
    for (const auto& [mode, c] : occ_) {
        for (int i = 0; i < c; ++i) {
            if (!first) s += ';';
            s += std::to_string(mode);
            first = false;
        }
    }
    s += ']';
    return s;
}

FockState FockState::parse(const std::string& text) {
    std::string body = text;
    if (!body.empty() && body.front() == '[') body.erase(0, 1);
    if (!body.empty() && body.back() == ']') body.pop_back();
    if (body.empty() || body == "vac") return FockState::vacuum();
    const char sep = body.find(';') != std::string::npos ? ';' : ',';
    std::vector<ModeIndex> modes;
    std::string tok;
    std::istringstream is(body);
    while (std::getline(is, tok, sep)) {
        size_t pos = 0;
        int m = std::stoi(tok, &pos);
        if (pos != tok.size())
            throw std::invalid_argument("FockState::parse: bad mode token '" + tok + "'");
        modes.push_back(m);
    }
    return from_modes(modes);
}

// ---------------------------------------------------------------------------
// FockBasis

namespace {

// Number of occupation states with `modes` available slots and at most
// `max_ph` phonons: C(modes + max_ph, max_ph). Saturates instead of
// overflowing.
std::int64_t count_states(int modes, int max_ph, std::int64_t cap) {
    double c = 1.0;
    for (int i = 1; i <= max_ph; ++i) {
        c *= static_cast<double>(modes + i) / static_cast<double>(i);
        if (c > 4.0 * static_cast<double>(cap)) return 4 * cap;
    }
    return std::llround(c);
}

void enumerate(const std::vector<ModeIndex>& modes, size_t idx, int remaining,
               std::vector<std::pair<ModeIndex, int>>& occ, std::optional<int> sector,
               std::vector<FockState>& out) {
    if (idx == modes.size()) {
        FockState s = FockState::vacuum();
        for (const auto& [m, c] : occ)
            for (int i = 0; i < c; ++i) s = s.raised(m);
        if (!sector || s.momentum() == *sector) out.push_back(std::move(s));
        return;
    }
    for (int c = 0; c <= remaining; ++c) {
        if (c > 0) occ.emplace_back(modes[idx], c);
        enumerate(modes, idx + 1, remaining - c, occ, sector, out);
        if (c > 0) occ.pop_back();
    }
}

}  // namespace

FockBasis::FockBasis(int cutoff, int max_phonons, std::optional<int> momentum_sector,
                     std::int64_t state_cap)
    : cutoff_(cutoff), max_phonons_(max_phonons), sector_(momentum_sector) {
    if (cutoff < 1) throw std::invalid_argument("FockBasis: cutoff must be >= 1");
    if (max_phonons < 0) throw std::invalid_argument("FockBasis: max_phonons must be >= 0");

    // The sector filter is applied after enumeration, so the cap guards the
    // unsectored state count.
    if (count_states(2 * cutoff, max_phonons, state_cap) > state_cap)
        throw std::invalid_argument("FockBasis: dimension exceeds state cap of " +
                                    std::to_string(state_cap));

    std::vector<ModeIndex> modes;
    for (int n = -cutoff; n <= cutoff; ++n)
        if (n != 0) modes.push_back(n);

    std::vector<std::pair<ModeIndex, int>> occ;
    enumerate(modes, 0, max_phonons, occ, sector_, states_);

    std::sort(states_.begin(), states_.end(), [](const FockState& a, const FockState& b) {
        const int ta = a.total_phonons(), tb = b.total_phonons();
        if (ta != tb) return ta < tb;
        const int ka = a.momentum(), kb = b.momentum();
        if (ka != kb) return ka < kb;
        return a.occupations() < b.occupations();
    });

    for (std::int64_t i = 0; i < size(); ++i) index_[states_[static_cast<size_t>(i)]] = i;
}

std::optional<std::int64_t> FockBasis::find(const FockState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Ladder action

std::vector<std::pair<FockState, Complex>>
apply_ladder(const FockState& state, ModeIndex mode, bool raise, const StringParams& p) {
    require_nonzero_mode(mode, "apply_ladder");
    const double norm = 1.0 / std::sqrt(2.0 * p.length * std::abs(omega(mode, p)));
    if (raise) {
        int nc = 0;
        FockState out = state.raised(mode, &nc);
        return {{std::move(out), Complex(std::sqrt(static_cast<double>(nc)) * norm, 0.0)}};
    }
    const int c = state.count(mode);
    if (c == 0) return {};
    FockState out = state.lowered(mode);
    return {{std::move(out), Complex(std::sqrt(static_cast<double>(c)) * norm, 0.0)}};
}

// ---------------------------------------------------------------------------
// SparseOperator

double SparseOperator::hermiticity_defect() const {
    std::map<std::pair<std::int64_t, std::int64_t>, Complex> at;
    for (const auto& e : entries) at[{e.row, e.col}] += e.value;
    double defect = 0.0;
    for (const auto& [rc, v] : at) {
        auto it = at.find({rc.second, rc.first});
        const Complex vt = (it == at.end()) ? Complex(0.0) : it->second;
        defect = std::max(defect, std::abs(v - std::conj(vt)));
    }
    return defect;
}

double SparseOperator::inf_norm() const {
    std::vector<double> row_sum(static_cast<size_t>(dim), 0.0);
    for (const auto& e : entries) row_sum[static_cast<size_t>(e.row)] += std::abs(e.value);
    double m = 0.0;
    for (double r : row_sum) m = std::max(m, r);
    return m;
}

void SparseOperator::write_coordinate_text(std::ostream& os) const {
    os << dim << ' ' << entries.size() << ' ' << (hermitian ? 1 : 0) << '\n';
    for (const auto& e : entries)
        os << e.row << ' ' << e.col << ' ' << io::fmt(e.value.real()) << ' '
           << io::fmt(e.value.imag()) << '\n';
}

SparseOperator SparseOperator::read_coordinate_text(std::istream& is) {
    SparseOperator op;
    size_t nnz = 0;
    int herm = 0;
    if (!(is >> op.dim >> nnz >> herm))
        throw std::runtime_error("SparseOperator: bad coordinate header");
    op.hermitian = herm != 0;
    op.entries.reserve(nnz);
    for (size_t i = 0; i < nnz; ++i) {
        Entry e;
        double re = 0.0, im = 0.0;
        if (!(is >> e.row >> e.col >> re >> im))
            throw std::runtime_error("SparseOperator: truncated coordinate entry");
        e.value = Complex(re, im);
        op.entries.push_back(e);
    }
    return op;
}

// ---------------------------------------------------------------------------
// Hamiltonians

SparseOperator build_H1(const FockBasis& basis, const StringParams& p) {
    if (basis.size() == 0) throw std::invalid_argument("build_H1: empty basis");
    SparseOperator op;
    op.dim = basis.size();
    for (std::int64_t i = 0; i < basis.size(); ++i) {
        double e = 0.0;
        for (const auto& [mode, c] : basis.state(i).occupations())
            e += std::abs(omega(mode, p)) * c;
        if (e != 0.0) op.entries.push_back({i, i, Complex(e, 0.0)});
    }
    op.hermitian = true;
    return op;
}

namespace {

enum class Op : std::uint8_t { lower, raise };

// One normal-ordered monomial applied right to left. Returns false when the
// chain annihilates the state.
bool apply_chain(const FockState& start, const std::vector<std::pair<Op, ModeIndex>>& ops,
                 const StringParams& p, FockState& out, Complex& amp) {
    out = start;
    amp = Complex(1.0, 0.0);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        auto branches = apply_ladder(out, it->second, it->first == Op::raise, p);
        if (branches.empty()) return false;
        out = std::move(branches[0].first);
        amp *= branches[0].second;
    }
    return true;
}

bool in_range(int m, int cutoff) { return m != 0 && std::abs(m) <= cutoff; }

}  // namespace

std::map<std::int64_t, Complex>
h2_column(const FockBasis& basis, std::int64_t col, const StringParams& p) {
    std::map<std::int64_t, Complex> out;
    if (p.gamma == 0.0) return out;
    const int N = basis.cutoff();
    const FockState& src = basis.state(col);

    auto add = [&](double coeff, const std::vector<std::pair<Op, ModeIndex>>& ops) {
        if (coeff == 0.0) return;
        FockState dst;
        Complex amp;
        if (!apply_chain(src, ops, p, dst, amp)) return;
        if (auto row = basis.find(dst)) out[*row] += coeff * amp;
    };

    // The five quartic families. Mode indices outside +-N are dropped
    // (projection onto the truncated basis); the fourth index coincides with
    // the (n+s+t)-type factor of M, so the excluded zero-mode combinations all
    // carry vanishing coefficients anyway.
    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        for (int s = -N; s <= N; ++s) {
            if (s == 0) continue;
            for (int t = -N; t <= N; ++t) {
                if (t == 0) continue;
                const double Mnst = coupling_M(n, s, t, p);
                const double Mnsmt = coupling_M(n, s, -t, p);
                int f;

                f = n + s - t;  // B+_n B+_s B_t B_{n+s-t}
                if (in_range(f, N))
                    add(-6.0 * Mnsmt, {{Op::raise, n}, {Op::raise, s}, {Op::lower, t}, {Op::lower, f}});

                f = t - s - n;  // B+_t B_s B_n B_{t-s-n}
                if (in_range(f, N))
                    add(-4.0 * Mnsmt, {{Op::raise, t}, {Op::lower, s}, {Op::lower, n}, {Op::lower, f}});

                f = -n - s - t;  // B+_n B+_s B+_t B+_{-n-s-t}
                if (in_range(f, N))
                    add(-1.0 * Mnst, {{Op::raise, n}, {Op::raise, s}, {Op::raise, t}, {Op::raise, f}});

                f = n + s + t;  // B+_n B+_s B+_t B_{n+s+t}
                if (in_range(f, N))
                    add(-4.0 * Mnst, {{Op::raise, n}, {Op::raise, s}, {Op::raise, t}, {Op::lower, f}});

                f = -n - s - t;  // B_n B_s B_t B_{-n-s-t}
                if (in_range(f, N))
                    add(-1.0 * Mnst, {{Op::lower, n}, {Op::lower, s}, {Op::lower, t}, {Op::lower, f}});
            }
        }
    }
    return out;
}

SparseOperator build_H2(const FockBasis& basis, const StringParams& p) {
    if (basis.size() == 0) throw std::invalid_argument("build_H2: empty basis");
    const std::int64_t dim = basis.size();

    std::vector<std::map<std::int64_t, Complex>> columns(static_cast<size_t>(dim));
    const int nthreads = std::min<std::int64_t>(io::worker_thread_count(), dim);
    std::vector<std::thread> pool;
    std::int64_t chunk = (dim + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
        const std::int64_t lo = w * chunk, hi = std::min(dim, lo + chunk);
        pool.emplace_back([&, lo, hi] {
            for (std::int64_t c = lo; c < hi; ++c)
                columns[static_cast<size_t>(c)] = h2_column(basis, c, p);
        });
    }
    for (auto& th : pool) th.join();

    SparseOperator op;
    op.dim = dim;
    for (std::int64_t c = 0; c < dim; ++c)
        for (const auto& [r, v] : columns[static_cast<size_t>(c)])
            if (v != Complex(0.0)) op.entries.push_back({r, c, v});
    op.hermitian = op.hermiticity_defect() < 1e-13;
    return op;
}

// ---------------------------------------------------------------------------
// Dense oracles

namespace {

Eigen::MatrixXcd to_dense(const SparseOperator& H, std::int64_t dense_cap, const char* who) {
    if (!H.hermitian || H.hermiticity_defect() >= 1e-13)
        throw std::invalid_argument(std::string(who) + ": operator is not Hermitian");
    if (H.dim > dense_cap)
        throw std::invalid_argument(std::string(who) + ": dimension " + std::to_string(H.dim) +
                                    " exceeds dense cap " + std::to_string(dense_cap));
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(H.dim, H.dim);
    for (const auto& e : H.entries) A(e.row, e.col) += e.value;
    return A;
}

}  // namespace

std::vector<std::pair<double, std::vector<Complex>>>
exact_eigs(const SparseOperator& H, int k, std::int64_t dense_cap) {
    Eigen::MatrixXcd A = to_dense(H, dense_cap, "exact_eigs");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("exact_eigs: eigensolver failed to converge");

    const std::int64_t dim = H.dim;
    const std::int64_t want = std::min<std::int64_t>(std::max(k, 0), dim);
    const double scale = std::max(std::abs(solver.eigenvalues()(0)),
                                  std::abs(solver.eigenvalues()(dim - 1)));

    std::vector<std::pair<double, std::vector<Complex>>> out;
    out.reserve(static_cast<size_t>(want));
    for (std::int64_t i = 0; i < want; ++i) {
        const double lambda = solver.eigenvalues()(i);
        Eigen::VectorXcd x = solver.eigenvectors().col(i);
        const double resid = (A * x - lambda * x).norm();
        if (scale > 0.0 && resid > 1e-10 * scale)
            throw std::runtime_error("exact_eigs: residual " + std::to_string(resid) +
                                     " exceeds bound");
        out.emplace_back(lambda, std::vector<Complex>(x.data(), x.data() + dim));
    }
    return out;
}

std::vector<Complex>
evolve_exact(const SparseOperator& H, const std::vector<Complex>& initial, double t,
             std::int64_t dense_cap) {
    if (static_cast<std::int64_t>(initial.size()) != H.dim)
        throw std::invalid_argument("evolve_exact: initial vector size mismatch");
    Eigen::MatrixXcd A = to_dense(H, dense_cap, "evolve_exact");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("evolve_exact: eigensolver failed to converge");

    Eigen::VectorXcd psi = Eigen::Map<const Eigen::VectorXcd>(initial.data(), H.dim);
    Eigen::VectorXcd coeff = solver.eigenvectors().adjoint() * psi;
    for (std::int64_t i = 0; i < H.dim; ++i)
        coeff(i) *= std::exp(Complex(0.0, -solver.eigenvalues()(i) * t));
    Eigen::VectorXcd result = solver.eigenvectors() * coeff;
    return {result.data(), result.data() + H.dim};
}

}  // namespace nlstring::fock
