#include <gtest/gtest.h>

#include <random>

#include "optodimer/fock.hpp"
#include "oracles.hpp"

using namespace optodimer;

TEST(Annihilation, MatrixElements) {
    const cmat a = cmat(annihilation(4));
    EXPECT_EQ(a.rows(), 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const cdouble expected = (i == j - 1) ? std::sqrt(static_cast<double>(j)) : 0.0;
            EXPECT_EQ(a(i, j), expected);
        }
    EXPECT_THROW(annihilation(1), TruncationError);
}

TEST(Annihilation, CanonicalCommutatorBelowTopLevel) {
    const cmat a = cmat(annihilation(6));
    const cmat comm = a * a.adjoint() - a.adjoint() * a;
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(comm(i, i) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(comm(5, 5).real(), -5.0, 1e-14);
}

TEST(Embed, MatchesIndependentKroneckerProduct) {
    const FockSpace s(3, 4);
    const ModeOperators ops(s);
    const cmat c_ref = oracles::kron(oracles::ladder(3), cmat::Identity(4, 4));
    const cmat d_ref = oracles::kron(cmat::Identity(3, 3), oracles::ladder(4));
    EXPECT_NEAR((ops.c.dense() - c_ref).norm(), 0.0, 1e-15);
    EXPECT_NEAR((ops.d.dense() - d_ref).norm(), 0.0, 1e-15);
}

TEST(Embed, ModesCommute) {
    const FockSpace s(4, 3);
    const ModeOperators ops(s);
    EXPECT_EQ(commutator(ops.c, ops.d).matrix().norm(), 0.0);
    EXPECT_EQ(commutator(ops.c, ops.ddag).matrix().norm(), 0.0);
    EXPECT_EQ(commutator(ops.n_c, ops.n_d).matrix().norm(), 0.0);
}

TEST(FockSpace, IndexRoundTrip) {
    const FockSpace s(5, 3);
    for (int j = 0; j < s.dim(); ++j) EXPECT_EQ(s.index(s.n_a(j), s.n_b(j)), j);
    EXPECT_THROW(FockSpace(1, 3), TruncationError);
}

TEST(FockOperator, MismatchedSpacesThrow) {
    const ModeOperators x(FockSpace(3, 3)), y(FockSpace(3, 4));
    EXPECT_THROW(x.c + y.c, ShapeError);
    EXPECT_THROW(x.c * y.c, ShapeError);
    const auto psi = fock_product_state(1, 0, FockSpace(3, 4));
    EXPECT_THROW(psi.expectation(x.n_c), ShapeError);
}

TEST(BeamSplitter, HermitianSparseAndExcitationConserving) {
    const FockSpace s(7, 7);
    const auto H = beam_splitter_hamiltonian(1.59e7, 2.1e5, s);
    EXPECT_NEAR((H.dense() - H.dense().adjoint()).norm(), 0.0, 1e-9);
    EXPECT_LE(H.max_row_nonzeros(), 3);
    const ModeOperators ops(s);
    EXPECT_NEAR(commutator(H, ops.total).matrix().norm(), 0.0, 1e-6);
    EXPECT_THROW(beam_splitter_hamiltonian(1.0, -1.0, s), DomainError);
}

TEST(LossyHamiltonian, SingleExcitationBlockMatchesDimerEigenvalues) {
    const double wb = 1.59e7, ga = 3.26e5, gb = 300.0;
    const FockSpace s(3, 3);
    for (double g : {2.1147e5, 2.1147e4, 0.0}) {
        const cmat H = lossy_hamiltonian(wb, g, ga, gb, s).dense();
        Eigen::Matrix2cd block;
        const int i10 = s.index(1, 0), i01 = s.index(0, 1);
        block << H(i10, i10), H(i10, i01), H(i01, i10), H(i01, i01);
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(block);
        auto [m1, m2] = dimer_mode_eigenvalues(wb, g, ga, gb);
        const auto ev = es.eigenvalues();
        const double err = std::min(std::abs(ev(0) - m1) + std::abs(ev(1) - m2), std::abs(ev(0) - m2) + std::abs(ev(1) - m1));
        EXPECT_LT(err / wb, 1e-10);
    }
}

TEST(States, FockProductAndNoon) {
    const FockSpace s(5, 5);
    const ModeOperators ops(s);
    const auto f = fock_product_state(3, 2, s);
    EXPECT_DOUBLE_EQ(f.norm(), 1.0);
    EXPECT_DOUBLE_EQ(f.expectation(ops.n_c).real(), 3.0);
    EXPECT_DOUBLE_EQ(f.expectation(ops.n_d).real(), 2.0);

    const auto noon = noon_state(3, s);
    EXPECT_NEAR(noon.norm(), 1.0, 1e-15);
    EXPECT_NEAR(noon.expectation(ops.n_c).real(), 1.5, 1e-14);
    EXPECT_NEAR(noon.expectation(ops.n_d).real(), 1.5, 1e-14);
    EXPECT_NEAR(std::abs(noon.expectation(ops.cdag_d)), 0.0, 1e-15);

    // N = 1 is the only N00N state with first-order coherence.
    const auto w = noon_state(1, FockSpace(3, 3));
    EXPECT_NEAR(w.expectation(ModeOperators(FockSpace(3, 3)).cdag_d).real(), 0.5, 1e-15);
}

TEST(States, TruncationMarginEnforced) {
    const FockSpace s(4, 4);
    EXPECT_NO_THROW(fock_product_state(2, 2, s));
    EXPECT_THROW(fock_product_state(3, 0, s), TruncationError);
    EXPECT_THROW(noon_state(3, s), TruncationError);
    EXPECT_THROW(fock_product_state(-1, 0, s), DomainError);
    EXPECT_EQ(truncation_dim(5), 7);
}

TEST(States, MixedRejectsNonHermitian) {
    const FockSpace s(2, 2);
    cmat rho = cmat::Identity(4, 4) / 4.0;
    EXPECT_NO_THROW(QuantumState::mixed(s, rho));
    rho(0, 1) = 0.1;
    EXPECT_THROW(QuantumState::mixed(s, rho), DomainError);
    EXPECT_THROW(QuantumState::mixed(FockSpace(2, 3), cmat::Identity(4, 4)), ShapeError);
}

TEST(States, ExpectationPureMatchesDensity) {
    std::mt19937 rng(1);
    std::normal_distribution<double> nd;
    const FockSpace s(4, 3);
    const ModeOperators ops(s);
    cvec psi(s.dim());
    for (auto& x : psi) x = cdouble(nd(rng), nd(rng));
    const auto pure = QuantumState::pure(s, psi);
    const auto mixed = QuantumState::mixed(s, pure.to_density());
    for (const auto* op : {&ops.n_c, &ops.n_d, &ops.cdag_d}) {
        const cdouble direct = psi.dot(op->dense() * psi);
        EXPECT_NEAR(std::abs(pure.expectation(*op) - direct), 0.0, 1e-12 * std::abs(direct));
        EXPECT_NEAR(std::abs(mixed.expectation(*op) - direct), 0.0, 1e-12 * std::abs(direct));
    }
}

TEST(Thermal, WeightsAreGeometric) {
    const auto w = thermal_weights(0.5, 6);
    for (size_t n = 0; n < w.size(); ++n) EXPECT_NEAR(w[n], std::pow(0.5, n) / std::pow(1.5, n + 1), 1e-16);
    EXPECT_EQ(thermal_weights(0.0, 3)[0], 1.0);
    EXPECT_EQ(thermal_weights(0.0, 3)[1], 0.0);
}

TEST(Thermal, DensityMatrixNormalizedWithCorrectOccupations) {
    const double na = 0.1, nb = 0.2;
    const FockSpace s(thermal_truncation_dim(na), thermal_truncation_dim(nb));
    const auto rho = thermal_density_matrix(na, nb, s);
    const ModeOperators ops(s);
    EXPECT_NEAR(rho.norm(), 1.0, 1e-14);
    EXPECT_NEAR(rho.expectation(ops.n_c).real(), na, 1e-5);
    EXPECT_NEAR(rho.expectation(ops.n_d).real(), nb, 1e-5);
    EXPECT_THROW(thermal_density_matrix(5.0, 0.0, FockSpace(3, 3)), TruncationError);
    EXPECT_THROW(thermal_density_matrix(-0.1, 0.0, s), DomainError);
}
