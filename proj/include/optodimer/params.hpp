#ifndef OPTODIMER_PARAMS_HPP
#define OPTODIMER_PARAMS_HPP

// Physical parameters of the linearized optomechanical dimer, the
// semi-classical steady state behind the enhanced coupling, and the
// PT-symmetry classification of the lossy beam splitter.
//
// Every frequency and rate is an angular quantity in rad/s.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include "optodimer/errors.hpp"

namespace optodimer {

using cdouble = std::complex<double>;

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K
}  // namespace constants

struct SystemParams {
    double omega_a = 1.02e10;
    double omega_b = 1.59e7;
    std::optional<double> omega_p;  // unset: red-sideband condition
    double gamma_a = 3.26e5;
    double gamma_b = 3.00e2;
    std::optional<double> g0;
    std::optional<double> pump;  // drive strength Omega
    std::optional<double> g;     // enhanced coupling, supplied directly
    double temperature = 0.0;    // bath temperature, K
    // Explicit bath occupations; override the Bose-Einstein value from temperature.
    std::optional<double> nbar_a;
    std::optional<double> nbar_b;
};

/// Experimental parameter set with the given coupling (in units of omega_b).
inline SystemParams experimental_params(double g_over_omega_b = 1.33e-2) {
    SystemParams p;
    p.g = g_over_omega_b * p.omega_b;
    return p;
}

inline double thermal_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) throw DomainError("thermal_occupation: omega must be positive");
    if (!(temperature >= 0.0)) throw DomainError("thermal_occupation: temperature must be >= 0");
    if (temperature == 0.0) return 0.0;
    const double x = constants::hbar * omega / (constants::k_B * temperature);
    return 1.0 / std::expm1(x);
}

/// Steady-state coherent amplitudes for a fixed pump frequency.
inline std::pair<cdouble, cdouble> steady_state_amplitudes(double omega_a, double omega_b, double omega_p,
                                                           double gamma_a, double gamma_b, double g0,
                                                           double pump) {
    using namespace std::complex_literals;
    const cdouble den_a = 2.0 * (cdouble(omega_a - omega_p) - 0.5i * gamma_a);
    const cdouble den_b = cdouble(omega_b) - 0.5i * gamma_b;
    if (den_a == 0.0 || den_b == 0.0)
        throw SingularityError("steady_state_amplitudes: undamped resonant denominator");
    const cdouble alpha = -1.0i * pump / den_a;
    const cdouble beta = -g0 * std::norm(alpha) / den_b;
    return {alpha, beta};
}

struct SemiclassicalSteadyState {
    double omega_p;
    cdouble alpha;
    cdouble beta;
    int iterations;
};

/// Solves the red-sideband condition omega_p = omega_a - omega_b + 2 g0 Re(beta)
/// self-consistently with (alpha, beta) by fixed-point iteration.
inline SemiclassicalSteadyState red_sideband_steady_state(const SystemParams& p, double rel_tol = 1e-12,
                                                         int max_iterations = 10000) {
    if (!p.g0 || !p.pump) throw DomainError("red_sideband_steady_state: g0 and pump required");
    double omega_p = p.omega_a - p.omega_b;
    for (int it = 1; it <= max_iterations; ++it) {
        auto [alpha, beta] =
            steady_state_amplitudes(p.omega_a, p.omega_b, omega_p, p.gamma_a, p.gamma_b, *p.g0, *p.pump);
        const double next = p.omega_a - p.omega_b + 2.0 * (*p.g0) * beta.real();
        if (std::abs(next - omega_p) <= rel_tol * std::abs(next)) {
            auto [a2, b2] =
                steady_state_amplitudes(p.omega_a, p.omega_b, next, p.gamma_a, p.gamma_b, *p.g0, *p.pump);
            return {next, a2, b2, it};
        }
        omega_p = next;
    }
    throw SingularityError("red_sideband_steady_state: fixed-point iteration did not converge");
}

/// Steady-state amplitudes (alpha, beta). Uses p.omega_p when set, otherwise
/// the self-consistent red-sideband pump frequency.
inline std::pair<cdouble, cdouble> steady_state_amplitudes(const SystemParams& p) {
    if (!p.g0 || !p.pump) throw DomainError("steady_state_amplitudes: g0 and pump required");
    if (p.omega_p)
        return steady_state_amplitudes(p.omega_a, p.omega_b, *p.omega_p, p.gamma_a, p.gamma_b, *p.g0, *p.pump);
    const auto ss = red_sideband_steady_state(p);
    return {ss.alpha, ss.beta};
}

inline double enhanced_coupling(double g0, cdouble alpha) { return g0 * std::abs(alpha); }

inline double gamma_contrast(double gamma_a, double gamma_b) { return (gamma_a - gamma_b) / 4.0; }

inline void validate(const SystemParams& p) {
    if (!(p.omega_a > 0.0) || !(p.omega_b > 0.0)) throw DomainError("omega_a and omega_b must be positive");
    if (!(p.gamma_a >= 0.0) || !(p.gamma_b >= 0.0)) throw DomainError("decay rates must be >= 0");
    if (!(p.temperature >= 0.0)) throw DomainError("temperature must be >= 0");
    if (p.g && !(*p.g >= 0.0)) throw DomainError("g must be >= 0");
    if (p.g0 && !(*p.g0 >= 0.0)) throw DomainError("g0 must be >= 0");
    if (p.nbar_a && !(*p.nbar_a >= 0.0)) throw DomainError("nbar_a must be >= 0");
    if (p.nbar_b && !(*p.nbar_b >= 0.0)) throw DomainError("nbar_b must be >= 0");
    const bool derived = p.g0.has_value() && p.pump.has_value();
    if (!p.g && !derived) throw DomainError("coupling: supply g, or both g0 and pump");
    if (p.g0.has_value() != p.pump.has_value() && !p.g)
        throw DomainError("coupling: g0 and pump must be supplied together");
}

/// Enhanced coupling g, either as supplied or derived from g0 |alpha|.
/// Supplying both with values that disagree beyond `rel_tol` is an error.
inline double coupling(const SystemParams& p, double rel_tol = 1e-9) {
    validate(p);
    const bool derived = p.g0.has_value() && p.pump.has_value();
    if (!derived) return *p.g;
    const double g_derived = enhanced_coupling(*p.g0, steady_state_amplitudes(p).first);
    if (p.g && std::abs(*p.g - g_derived) > rel_tol * std::max(*p.g, g_derived))
        throw DomainError("coupling: supplied g inconsistent with g0 |alpha|");
    return p.g ? *p.g : g_derived;
}

/// Bath occupations (nbar_a, nbar_b): explicit overrides, else Bose-Einstein at p.temperature.
inline std::pair<double, double> bath_occupations(const SystemParams& p) {
    const double na = p.nbar_a ? *p.nbar_a : thermal_occupation(p.omega_a, p.temperature);
    const double nb = p.nbar_b ? *p.nbar_b : thermal_occupation(p.omega_b, p.temperature);
    return {na, nb};
}

/// Eigenvalues of g sigma_x - i Gamma sigma_z, ordered by descending real
/// part, then descending imaginary part.
inline std::pair<cdouble, cdouble> pt_spectrum(double g, double Gamma) {
    const cdouble root = std::sqrt(cdouble(g * g - Gamma * Gamma, 0.0));
    cdouble plus = root;
    cdouble minus = -root;
    auto before = [](cdouble x, cdouble y) {
        return x.real() > y.real() || (x.real() == y.real() && x.imag() > y.imag());
    };
    if (before(minus, plus)) std::swap(plus, minus);
    return {plus, minus};
}

enum class RegimeTag { PTSymmetric, ExceptionalPoint, Broken };

struct Regime {
    RegimeTag tag;
    double gap;  // g - |Gamma|
};

inline constexpr double default_classify_tol = 1e-9;

inline Regime classify_regime(double g, double Gamma, double tol = default_classify_tol) {
    if (!(tol > 0.0)) throw DomainError("classify_regime: tolerance must be positive");
    const double abs_gamma = std::abs(Gamma);
    const double gap = g - abs_gamma;
    const double scale = tol * std::max(g, abs_gamma);
    if (gap > scale) return {RegimeTag::PTSymmetric, gap};
    if (-gap > scale) return {RegimeTag::Broken, gap};
    return {RegimeTag::ExceptionalPoint, gap};
}

inline std::string to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::PTSymmetric: return "PTSymmetric";
        case RegimeTag::ExceptionalPoint: return "ExceptionalPoint";
        case RegimeTag::Broken: return "Broken";
    }
    return "?";
}

/// Single-excitation complex mode frequencies
/// omega_b - i (gamma_a + gamma_b)/4 +- sqrt(g^2 - Gamma^2).
inline std::pair<cdouble, cdouble> dimer_mode_eigenvalues(double omega_b, double g, double gamma_a, double gamma_b) {
    const cdouble center(omega_b, -(gamma_a + gamma_b) / 4.0);
    const auto [lp, lm] = pt_spectrum(g, gamma_contrast(gamma_a, gamma_b));
    return {center + lp, center + lm};
}

inline std::pair<cdouble, cdouble> dimer_mode_eigenvalues(const SystemParams& p) {
    return dimer_mode_eigenvalues(p.omega_b, coupling(p), p.gamma_a, p.gamma_b);
}

/// Occupation decay rates -2 Im(mu) of the two dimer modes, slowest first.
inline std::pair<double, double> mode_decay_rates(double g, double gamma_a, double gamma_b) {
    const auto [mp, mm] = dimer_mode_eigenvalues(0.0, g, gamma_a, gamma_b);
    double r1 = -2.0 * mp.imag();
    double r2 = -2.0 * mm.imag();
    if (r1 > r2) std::swap(r1, r2);
    return {r1, r2};
}

}  // namespace optodimer

#endif
