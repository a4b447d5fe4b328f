#ifndef OPTODIMER_TESTS_ORACLES_HPP
#define OPTODIMER_TESTS_ORACLES_HPP

// Test-only reference computations, independent of the library's evolution paths.

#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracles {

using cdouble = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

/// exp(t A) for a diagonalizable 2x2 matrix via its eigen-decomposition.
inline Eigen::Matrix2cd expm2_eigen(const Eigen::Matrix2cd& A, double t) {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(A);
    const Eigen::Matrix2cd V = es.eigenvectors();
    Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) D(i, i) = std::exp(es.eigenvalues()(i) * t);
    return V * D * V.inverse();
}

/// Dense truncated ladder operator a (n-1, n) = sqrt(n), built independently of the library.
inline cmat ladder(int dim) {
    cmat a = cmat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline cmat kron(const cmat& x, const cmat& y) {
    cmat out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

/// Column-major vec(A X B) = (B^T kron A) vec(X).
inline cmat superop(const cmat& left, const cmat& right) { return kron(right.transpose(), left); }

/// Dense Liouvillian superoperator of the thermal beam-splitter master equation.
inline cmat liouvillian(int dim_a, int dim_b, double g, double ga, double gb, double na, double nb) {
    using namespace std::complex_literals;
    const cmat Ia = cmat::Identity(dim_a, dim_a), Ib = cmat::Identity(dim_b, dim_b);
    const cmat c = kron(ladder(dim_a), Ib);
    const cmat d = kron(Ia, ladder(dim_b));
    const cmat H = g * (c.adjoint() * d + c * d.adjoint());
    const int n = dim_a * dim_b;
    const cmat I = cmat::Identity(n, n);
    cmat L = -1.0i * (superop(H, I) - superop(I, H));
    auto add = [&](const cmat& A, double rate) {
        const cmat AdA = A.adjoint() * A;
        L += rate * (superop(A, A.adjoint()) - 0.5 * superop(AdA, I) - 0.5 * superop(I, AdA));
    };
    add(c.adjoint(), ga * na);
    add(c, ga * (na + 1));
    add(d.adjoint(), gb * nb);
    add(d, gb * (nb + 1));
    return L;
}

/// rho(t) = unvec(exp(L t) vec(rho0)).
inline cmat evolve_exact(const cmat& L, const cmat& rho0, double t) {
    const cmat E = (L * t).exp();
    const cvec v = E * Eigen::Map<const cvec>(rho0.data(), rho0.size());
    return Eigen::Map<const cmat>(v.data(), rho0.rows(), rho0.cols());
}

/// Random density matrix of the given dimension, optionally confined to the
/// first `support` basis states.
inline cmat random_density(int dim, std::mt19937& rng, int support = -1) {
    std::normal_distribution<double> nd;
    const int s = support > 0 ? support : dim;
    cmat X = cmat::Zero(dim, dim);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) X(i, j) = cdouble(nd(rng), nd(rng));
    cmat rho = X * X.adjoint();
    return rho / rho.trace();
}

}  // namespace oracles

#endif
