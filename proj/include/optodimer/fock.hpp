#ifndef OPTODIMER_FOCK_HPP
#define OPTODIMER_FOCK_HPP

// Truncated two-mode Fock space. Joint basis index = n_a * dim_b + n_b
// (mode-a major); every index in files and tests refers to this ordering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "optodimer/errors.hpp"
#include "optodimer/params.hpp"

namespace optodimer {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cdouble, Eigen::RowMajor>;

enum class Mode { A, B };

struct FockSpace {
    int dim_a = 2;
    int dim_b = 2;

    FockSpace() = default;
    FockSpace(int da, int db) : dim_a(da), dim_b(db) {
        if (da < 2 || db < 2) throw TruncationError("FockSpace: per-mode dimension must be >= 2");
    }

    int dim() const { return dim_a * dim_b; }
    int index(int n_a, int n_b) const { return n_a * dim_b + n_b; }
    int n_a(int joint) const { return joint / dim_b; }
    int n_b(int joint) const { return joint % dim_b; }
    int mode_dim(Mode m) const { return m == Mode::A ? dim_a : dim_b; }

    bool operator==(const FockSpace&) const = default;
};

/// Per-mode truncation for Fock inputs: maximum excitation number plus two.
inline int truncation_dim(int max_excitations) {
    if (max_excitations < 0) throw DomainError("truncation_dim: negative excitation number");
    return max_excitations + 2;
}

/// Smallest per-mode dimension whose discarded thermal tail (nbar/(1+nbar))^dim is below `tail_tol`.
inline int thermal_truncation_dim(double nbar, double tail_tol = 1e-6) {
    if (!(nbar >= 0.0)) throw DomainError("thermal_truncation_dim: nbar must be >= 0");
    if (nbar == 0.0) return 2;
    const double q = nbar / (1.0 + nbar);
    const double d = std::ceil(std::log(tail_tol) / std::log(q));
    return std::max(2, static_cast<int>(d));
}

class FockOperator {
public:
    FockOperator() = default;
    FockOperator(FockSpace space, SparseMatrix m) : space_(space), m_(std::move(m)) {
        if (m_.rows() != space_.dim() || m_.cols() != space_.dim())
            throw ShapeError("FockOperator: matrix does not match joint dimension");
        m_.makeCompressed();
    }

    static FockOperator identity(FockSpace space) {
        SparseMatrix m(space.dim(), space.dim());
        m.setIdentity();
        return {space, std::move(m)};
    }

    const FockSpace& space() const { return space_; }
    const SparseMatrix& matrix() const { return m_; }
    cmat dense() const { return cmat(m_); }
    Eigen::Index nonzeros() const { return m_.nonZeros(); }

    Eigen::Index max_row_nonzeros() const {
        Eigen::Index best = 0;
        for (Eigen::Index r = 0; r < m_.outerSize(); ++r)
            best = std::max<Eigen::Index>(best, m_.outerIndexPtr()[r + 1] - m_.outerIndexPtr()[r]);
        return best;
    }

    FockOperator adjoint() const { return {space_, SparseMatrix(m_.adjoint())}; }

    friend FockOperator operator+(const FockOperator& x, const FockOperator& y) {
        check_same(x, y);
        return {x.space_, SparseMatrix(x.m_ + y.m_)};
    }
    friend FockOperator operator-(const FockOperator& x, const FockOperator& y) {
        check_same(x, y);
        return {x.space_, SparseMatrix(x.m_ - y.m_)};
    }
    friend FockOperator operator*(const FockOperator& x, const FockOperator& y) {
        check_same(x, y);
        return {x.space_, SparseMatrix((x.m_ * y.m_).pruned())};
    }
    friend FockOperator operator*(cdouble s, const FockOperator& x) { return {x.space_, SparseMatrix(s * x.m_)}; }

private:
    static void check_same(const FockOperator& x, const FockOperator& y) {
        if (!(x.space_ == y.space_)) throw ShapeError("FockOperator: operands live on different spaces");
    }

    FockSpace space_;
    SparseMatrix m_;
};

inline FockOperator commutator(const FockOperator& x, const FockOperator& y) { return x * y - y * x; }

/// Single-mode ladder operator, A[n-1, n] = sqrt(n).
inline SparseMatrix annihilation(int dim) {
    if (dim < 2) throw TruncationError("annihilation: dimension must be >= 2");
    SparseMatrix a(dim, dim);
    std::vector<Eigen::Triplet<cdouble>> t;
    for (int n = 1; n < dim; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

/// op (x) 1 for mode A, 1 (x) op for mode B.
inline FockOperator embed(const SparseMatrix& op, Mode mode, FockSpace space) {
    if (op.rows() != op.cols() || op.rows() != space.mode_dim(mode))
        throw ShapeError("embed: operator dimension does not match mode truncation");
    std::vector<Eigen::Triplet<cdouble>> t;
    t.reserve(static_cast<size_t>(op.nonZeros()) * static_cast<size_t>(space.dim() / space.mode_dim(mode)));
    for (Eigen::Index r = 0; r < op.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(op, r); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            if (mode == Mode::A) {
                for (int k = 0; k < space.dim_b; ++k) t.emplace_back(space.index(i, k), space.index(j, k), it.value());
            } else {
                for (int k = 0; k < space.dim_a; ++k) t.emplace_back(space.index(k, i), space.index(k, j), it.value());
            }
        }
    }
    SparseMatrix m(space.dim(), space.dim());
    m.setFromTriplets(t.begin(), t.end());
    return {space, std::move(m)};
}

/// The named operators of the dimer on one truncated space.
struct ModeOperators {
    FockOperator c, d;      // annihilators
    FockOperator cdag, ddag;
    FockOperator n_c, n_d;  // number operators
    FockOperator cdag_d;    // coherence c^dag d
    FockOperator total;     // N = n_c + n_d

    explicit ModeOperators(FockSpace space)
        : c(embed(annihilation(space.dim_a), Mode::A, space)),
          d(embed(annihilation(space.dim_b), Mode::B, space)),
          cdag(c.adjoint()),
          ddag(d.adjoint()),
          n_c(cdag * c),
          n_d(ddag * d),
          cdag_d(cdag * d),
          total(n_c + n_d) {}
};

/// omega_b (c^dag c + d^dag d) + g (c^dag d + c d^dag).
inline FockOperator beam_splitter_hamiltonian(double omega_b, double g, FockSpace space) {
    if (!(g >= 0.0)) throw DomainError("beam_splitter_hamiltonian: g must be >= 0");
    const ModeOperators ops(space);
    return cdouble(omega_b) * ops.total + cdouble(g) * (ops.cdag_d + ops.c * ops.ddag);
}

/// H - i (gamma_a c^dag c + gamma_b d^dag d) / 2.
inline FockOperator lossy_hamiltonian(double omega_b, double g, double gamma_a, double gamma_b, FockSpace space) {
    using namespace std::complex_literals;
    const ModeOperators ops(space);
    return beam_splitter_hamiltonian(omega_b, g, space) +
           (-0.5i) * (cdouble(gamma_a) * ops.n_c + cdouble(gamma_b) * ops.n_d);
}

inline FockOperator lossy_hamiltonian(const SystemParams& p, FockSpace space) {
    return lossy_hamiltonian(p.omega_b, coupling(p), p.gamma_a, p.gamma_b, space);
}

/// Pure state vector or density matrix on a truncated space.
class QuantumState {
public:
    static QuantumState pure(FockSpace space, cvec psi) {
        if (psi.size() != space.dim()) throw ShapeError("QuantumState: vector does not match joint dimension");
        return QuantumState(space, std::move(psi));
    }

    static QuantumState mixed(FockSpace space, cmat rho, double herm_tol = 1e-12) {
        if (rho.rows() != space.dim() || rho.cols() != space.dim())
            throw ShapeError("QuantumState: matrix does not match joint dimension");
        const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
            throw DomainError("QuantumState: density matrix is not Hermitian");
        return QuantumState(space, std::move(rho));
    }

    const FockSpace& space() const { return space_; }
    bool is_pure() const { return std::holds_alternative<cvec>(data_); }
    const cvec& vector() const { return std::get<cvec>(data_); }
    const cmat& density() const { return std::get<cmat>(data_); }

    cmat to_density() const {
        if (is_pure()) return vector() * vector().adjoint();
        return density();
    }

    /// <psi|psi> or tr(rho).
    double norm() const {
        if (is_pure()) return vector().squaredNorm();
        return density().trace().real();
    }

    /// Unnormalized expectation <psi|X|psi> or tr(X rho).
    cdouble expectation(const FockOperator& op) const;

    QuantumState scaled(double s) const {
        if (is_pure()) return QuantumState(space_, cvec(s * vector()));
        return QuantumState(space_, cmat(s * s * density()));
    }

private:
    QuantumState(FockSpace space, cvec psi) : space_(space), data_(std::move(psi)) {}
    QuantumState(FockSpace space, cmat rho) : space_(space), data_(std::move(rho)) {}

    FockSpace space_;
    std::variant<cvec, cmat> data_;
};

/// tr(X rho) without forming X rho.
inline cdouble trace_product(const SparseMatrix& op, const Eigen::Ref<const cmat>& rho) {
    cdouble acc = 0.0;
    for (Eigen::Index r = 0; r < op.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(op, r); it; ++it) acc += it.value() * rho(it.col(), it.row());
    return acc;
}

inline cdouble expectation_pure(const SparseMatrix& op, const Eigen::Ref<const cvec>& psi) {
    cdouble acc = 0.0;
    for (Eigen::Index r = 0; r < op.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(op, r); it; ++it)
            acc += std::conj(psi(it.row())) * it.value() * psi(it.col());
    return acc;
}

inline cdouble QuantumState::expectation(const FockOperator& op) const {
    if (!(op.space() == space_)) throw ShapeError("expectation: operator and state live on different spaces");
    if (is_pure()) return expectation_pure(op.matrix(), vector());
    return trace_product(op.matrix(), density());
}

inline QuantumState fock_product_state(int n_a, int n_b, FockSpace space) {
    if (n_a < 0 || n_b < 0) throw DomainError("fock_product_state: negative occupation");
    if (n_a > space.dim_a - 2 || n_b > space.dim_b - 2)
        throw TruncationError("fock_product_state: excitation exceeds truncation margin");
    cvec psi = cvec::Zero(space.dim());
    psi(space.index(n_a, n_b)) = 1.0;
    return QuantumState::pure(space, std::move(psi));
}

/// (|N,0> + |0,N>) / sqrt(2).
inline QuantumState noon_state(int N, FockSpace space) {
    if (N < 1) throw DomainError("noon_state: N must be >= 1");
    if (N > std::min(space.dim_a, space.dim_b) - 2)
        throw TruncationError("noon_state: N exceeds truncation margin");
    cvec psi = cvec::Zero(space.dim());
    psi(space.index(N, 0)) = M_SQRT1_2;
    psi(space.index(0, N)) = M_SQRT1_2;
    return QuantumState::pure(space, std::move(psi));
}

/// Single-mode thermal weights nbar^n / (1+nbar)^(n+1) for n < dim (not renormalized).
inline std::vector<double> thermal_weights(double nbar, int dim) {
    std::vector<double> w(static_cast<size_t>(dim));
    const double q = nbar / (1.0 + nbar);
    double x = 1.0 / (1.0 + nbar);
    for (int n = 0; n < dim; ++n) {
        w[static_cast<size_t>(n)] = x;
        x *= q;
    }
    return w;
}

/// Product of single-mode thermal states, renormalized over the truncated space.
/// Each mode's discarded tail (nbar/(1+nbar))^dim must not exceed `tail_tol`.
inline QuantumState thermal_density_matrix(double nbar_a, double nbar_b, FockSpace space, double tail_tol = 1e-6) {
    if (!(nbar_a >= 0.0) || !(nbar_b >= 0.0)) throw DomainError("thermal_density_matrix: nbar must be >= 0");
    const auto wa = thermal_weights(nbar_a, space.dim_a);
    const auto wb = thermal_weights(nbar_b, space.dim_b);
    const double tail = std::max(std::pow(nbar_a / (1.0 + nbar_a), space.dim_a),
                                 std::pow(nbar_b / (1.0 + nbar_b), space.dim_b));
    if (tail > tail_tol * (1.0 + 1e-9))
        throw TruncationError("thermal_density_matrix: discarded tail weight " + std::to_string(tail) +
                              " exceeds threshold");
    double kept_a = 0.0, kept_b = 0.0;
    for (double x : wa) kept_a += x;
    for (double x : wb) kept_b += x;
    cmat rho = cmat::Zero(space.dim(), space.dim());
    for (int i = 0; i < space.dim_a; ++i)
        for (int j = 0; j < space.dim_b; ++j)
            rho(space.index(i, j), space.index(i, j)) =
                wa[static_cast<size_t>(i)] * wb[static_cast<size_t>(j)] / (kept_a * kept_b);
    return QuantumState::mixed(space, std::move(rho));
}

}  // namespace optodimer

#endif
