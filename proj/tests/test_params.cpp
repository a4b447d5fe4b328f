#include <gtest/gtest.h>

#include <random>

#include "optodimer/ode.hpp"
#include "optodimer/params.hpp"
#include "oracles.hpp"

using namespace optodimer;

namespace {
constexpr double omega_b = 1.59e7;
constexpr double gamma_a = 3.26e5;
constexpr double gamma_b = 3.00e2;
}  // namespace

TEST(ThermalOccupation, MatchesPublishedRoomTemperatureValues) {
    EXPECT_NEAR(thermal_occupation(1.02e10, 293.0), 3.76e3, 0.01 * 3.76e3);
    EXPECT_NEAR(thermal_occupation(1.59e7, 293.0), 2.41e6, 0.01 * 2.41e6);
}

TEST(ThermalOccupation, ZeroTemperatureIsExactlyZero) {
    EXPECT_EQ(thermal_occupation(1.0, 0.0), 0.0);
    EXPECT_EQ(thermal_occupation(1e12, 0.0), 0.0);
}

TEST(ThermalOccupation, RejectsNonPositiveFrequency) {
    EXPECT_THROW(thermal_occupation(0.0, 1.0), DomainError);
    EXPECT_THROW(thermal_occupation(-1.0, 1.0), DomainError);
    EXPECT_THROW(thermal_occupation(1.0, -1.0), DomainError);
}

TEST(ThermalOccupation, MonotoneAndBelowClassicalLimit) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> logw(5.0, 12.0), temp(0.01, 500.0);
    for (int i = 0; i < 1000; ++i) {
        const double w = std::pow(10.0, logw(rng));
        const double T = temp(rng);
        const double n = thermal_occupation(w, T);
        EXPECT_LT(n, thermal_occupation(w * 0.9, T));
        EXPECT_GT(n, thermal_occupation(w, T * 0.9));
        EXPECT_LT(n, constants::k_B * T / (constants::hbar * w));
    }
}

TEST(SteadyState, NoDriveNoDisplacement) {
    auto [a, b] = steady_state_amplitudes(1.0, 0.5, 0.7, 0.1, 0.01, 0.3, 0.0);
    EXPECT_EQ(a, cdouble(0.0));
    EXPECT_EQ(b, cdouble(0.0));
}

TEST(SteadyState, ResonantDriveClosedForm) {
    // omega_a = omega_p, Omega = 2 gamma_a, g0 = 0: alpha = Omega / gamma_a = 2.
    auto [a, b] = steady_state_amplitudes(5.0, 1.0, 5.0, 0.3, 0.01, 0.0, 0.6);
    EXPECT_NEAR(a.real(), 2.0, 1e-14);
    EXPECT_NEAR(a.imag(), 0.0, 1e-14);
    EXPECT_EQ(b, cdouble(0.0));
}

TEST(SteadyState, ClosedFormMatchesRelaxedSemiclassicalEquations) {
    // Relax the mean-field equations in the pump frame to their fixed point. The
    // closed form carries a global phase convention for alpha, so |alpha| and beta are compared.
    using namespace std::complex_literals;
    const double delta = 0.4, wb = 1.3, ga = 0.3, gb = 0.2, g0 = 0.05, pump = 0.6;
    ode::OdeProblem p;
    p.rhs = [&](double, const ode::cvec& y, ode::cvec& dy) {
        dy(0) = -(1.0i * delta + ga / 2) * y(0) - 0.5i * pump;
        dy(1) = -(1.0i * wb + gb / 2) * y(1) - 1.0i * g0 * std::norm(y(0));
    };
    p.y0 = ode::cvec::Zero(2);
    p.t1 = 600.0;
    p.sample_times = {600.0};
    const auto tr = ode::integrate_adaptive(p);
    auto [a, b] = steady_state_amplitudes(1.0 + delta, wb, 1.0, ga, gb, g0, pump);
    EXPECT_NEAR(std::abs(tr.final_state(0)), std::abs(a), 1e-8);
    EXPECT_NEAR(std::abs(tr.final_state(1) - b), 0.0, 1e-8);
}

TEST(SteadyState, BetaRealNegativeWithoutMechanicalDamping) {
    auto [a, b] = steady_state_amplitudes(5.0, 1.0, 5.0, 0.3, 0.0, 0.2, 0.6);
    EXPECT_NEAR(b.imag(), 0.0, 1e-15);
    EXPECT_LT(b.real(), 0.0);
}

TEST(SteadyState, SingularDenominatorThrows) {
    EXPECT_THROW(steady_state_amplitudes(5.0, 1.0, 5.0, 0.0, 0.0, 0.2, 0.6), SingularityError);
}

TEST(SteadyState, RedSidebandFixedPointSatisfiesCondition) {
    SystemParams p;
    p.omega_a = 10.0;
    p.omega_b = 1.0;
    p.gamma_a = 0.5;
    p.gamma_b = 0.01;
    p.g0 = 0.02;
    p.pump = 0.3;
    const auto ss = red_sideband_steady_state(p);
    EXPECT_NEAR(ss.omega_p, p.omega_a - p.omega_b + 2 * (*p.g0) * ss.beta.real(), 1e-12 * ss.omega_p);
    auto [a, b] = steady_state_amplitudes(p.omega_a, p.omega_b, ss.omega_p, p.gamma_a, p.gamma_b, *p.g0, *p.pump);
    EXPECT_NEAR(std::abs(a - ss.alpha), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(b - ss.beta), 0.0, 1e-12);
}

TEST(Coupling, EnhancedCouplingIsModulus) {
    EXPECT_EQ(enhanced_coupling(2.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(enhanced_coupling(1.0, cdouble(3.0, 4.0)), 5.0);
    EXPECT_NEAR(*experimental_params(1.33e-2).g, 2.1147e5, 1e-6);
}

TEST(Coupling, ExactlyOneSourceOfCoupling) {
    SystemParams p;
    p.g.reset();
    EXPECT_THROW(coupling(p), DomainError);
    p.g0 = 0.02;
    p.pump = 0.3;
    p.omega_a = 10.0;
    p.omega_b = 1.0;
    p.gamma_a = 0.5;
    const double derived = coupling(p);
    EXPECT_GT(derived, 0.0);
    p.g = derived;
    EXPECT_DOUBLE_EQ(coupling(p), derived);
    p.g = derived * 1.1;
    EXPECT_THROW(coupling(p), DomainError);
}

TEST(Params, InvariantsRejected) {
    SystemParams p = experimental_params();
    p.omega_b = 0.0;
    EXPECT_THROW(validate(p), DomainError);
    p = experimental_params();
    p.gamma_a = -1.0;
    EXPECT_THROW(validate(p), DomainError);
    p = experimental_params();
    p.temperature = -1.0;
    EXPECT_THROW(validate(p), DomainError);
    p = experimental_params();
    p.g = -1.0;
    EXPECT_THROW(validate(p), DomainError);
}

TEST(GammaContrast, Examples) {
    EXPECT_NEAR(gamma_contrast(gamma_a, gamma_b), 8.1425e4, 1e-9);
    EXPECT_EQ(gamma_contrast(2.5, 2.5), 0.0);
    EXPECT_EQ(gamma_contrast(0.0, 4.0), -1.0);
}

TEST(PtSpectrum, Examples) {
    auto [p1, m1] = pt_spectrum(2.1147e5, 8.1425e4);
    EXPECT_NEAR(p1.real(), 1.9517e5, 1e-3 * 1.9517e5);
    EXPECT_NEAR(m1.real(), -1.9517e5, 1e-3 * 1.9517e5);
    EXPECT_EQ(p1.imag(), 0.0);

    auto [p2, m2] = pt_spectrum(8.1425e4, 8.1425e4);
    EXPECT_EQ(p2, cdouble(0.0));
    EXPECT_EQ(m2, cdouble(0.0));

    auto [p3, m3] = pt_spectrum(2.1147e4, 8.1425e4);
    EXPECT_NEAR(p3.imag(), 7.863e4, 1e-3 * 7.863e4);
    EXPECT_NEAR(m3.imag(), -7.863e4, 1e-3 * 7.863e4);
    EXPECT_EQ(p3.real(), 0.0);
}

TEST(PtSpectrum, MatchesBruteForceEigensolver) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double g = u(rng), G = u(rng) - 5.0;
        Eigen::Matrix2cd H;
        H << cdouble(0, -G), g, g, cdouble(0, G);
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(H);
        auto [lp, lm] = pt_spectrum(g, G);
        const auto ev = es.eigenvalues();
        const double e1 = std::min(std::abs(ev(0) - lp) + std::abs(ev(1) - lm), std::abs(ev(0) - lm) + std::abs(ev(1) - lp));
        EXPECT_LT(e1, 1e-9 * (1 + g + std::abs(G)));
    }
}

TEST(PtSpectrum, PropertiesAgreeWithClassification) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double g = u(rng) * 1e5;
        // Mix of generic points and exact exceptional points.
        const double G = (i % 10 == 0) ? (i % 20 == 0 ? g : -g) : (u(rng) - 0.5) * 2e5;
        auto [lp, lm] = pt_spectrum(g, G);
        EXPECT_EQ(lp, -lm);
        switch (classify_regime(g, G).tag) {
            case RegimeTag::PTSymmetric:
                EXPECT_EQ(lp.imag(), 0.0);
                EXPECT_GT(lp.real(), 0.0);
                break;
            case RegimeTag::Broken:
                EXPECT_EQ(lp.real(), 0.0);
                EXPECT_GT(lp.imag(), 0.0);
                break;
            case RegimeTag::ExceptionalPoint:
                EXPECT_LT(std::abs(lp), 1e-3 * std::max(g, 1.0));
                break;
        }
    }
}

TEST(ClassifyRegime, PublishedCouplings) {
    const double G = gamma_contrast(gamma_a, gamma_b);
    EXPECT_EQ(classify_regime(2.1147e5, G).tag, RegimeTag::PTSymmetric);
    EXPECT_EQ(classify_regime(8.1425e4, G).tag, RegimeTag::ExceptionalPoint);
    EXPECT_EQ(classify_regime(2.1147e4, G).tag, RegimeTag::Broken);
    EXPECT_EQ(classify_regime(8.1425e4, -G).tag, RegimeTag::ExceptionalPoint);
    EXPECT_THROW(classify_regime(1.0, 1.0, 0.0), DomainError);
}

TEST(ClassifyRegime, TolerancePinsTheExceptionalBand) {
    const double G = 1.0;
    EXPECT_EQ(classify_regime(1.0 + 1e-10, G).tag, RegimeTag::ExceptionalPoint);
    EXPECT_EQ(classify_regime(1.0 + 1e-6, G).tag, RegimeTag::PTSymmetric);
    EXPECT_EQ(classify_regime(1.0 - 1e-6, G).tag, RegimeTag::Broken);
    EXPECT_EQ(classify_regime(1.0 - 1e-6, G, 1e-3).tag, RegimeTag::ExceptionalPoint);
}

TEST(DimerModes, DecoupledAndExceptionalLimits) {
    auto [m1, m2] = dimer_mode_eigenvalues(omega_b, 0.0, gamma_a, gamma_b);
    // Ordering follows pt_spectrum: the broken-phase root with positive imaginary part first.
    EXPECT_NEAR(std::abs(m1 - cdouble(omega_b, -gamma_b / 2)), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(m2 - cdouble(omega_b, -gamma_a / 2)), 0.0, 1e-6);

    const double G = gamma_contrast(gamma_a, gamma_b);
    auto [e1, e2] = dimer_mode_eigenvalues(omega_b, G, gamma_a, gamma_b);
    EXPECT_EQ(e1, cdouble(omega_b, -(gamma_a + gamma_b) / 4));
    EXPECT_EQ(e2, e1);
}

TEST(DimerModes, BrokenRegimeSlowDecayRate) {
    // 2[(gamma_a + gamma_b)/4 - sqrt(Gamma^2 - g^2)] with g = 1.33e-3 omega_b.
    const auto [slow, fast] = mode_decay_rates(1.33e-3 * omega_b, gamma_a, gamma_b);
    EXPECT_NEAR(slow, 5887.989126426, 1e-6);
    EXPECT_GT(fast, slow);
}

TEST(DimerModes, ImaginaryPartsSumToMeanLoss) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1e6);
    for (int i = 0; i < 500; ++i) {
        const double g = u(rng), ga = u(rng), gb = u(rng);
        auto [m1, m2] = dimer_mode_eigenvalues(omega_b, g, ga, gb);
        EXPECT_NEAR(m1.imag() + m2.imag(), -(ga + gb) / 2, 1e-9 * (ga + gb + g));
    }
}
