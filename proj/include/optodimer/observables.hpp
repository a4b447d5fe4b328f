#ifndef OPTODIMER_OBSERVABLES_HPP
#define OPTODIMER_OBSERVABLES_HPP

// Observable records shared by the Lindblad, non-Hermitian and Gaussian engines.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "optodimer/errors.hpp"
#include "optodimer/fock.hpp"
#include "optodimer/ode.hpp"
#include "optodimer/params.hpp"

namespace optodimer {

struct RenormalizedObservables {
    double n_a;
    double n_b;
    cdouble g1;
};

/// Ratios <c^dag c>/<N>, <d^dag d>/<N>, <c^dag d>/<N> of (possibly unnormalized) expectations.
inline RenormalizedObservables renormalized_observables(double raw_a, double raw_b, cdouble coherence) {
    const double total = raw_a + raw_b;
    if (!(total > 0.0)) throw UndefinedObservableError("renormalized observables undefined for <N> = 0");
    return {raw_a / total, raw_b / total, coherence / total};
}

struct ObservableRecord {
    double t = 0.0;
    double n_a_raw = 0.0;
    double n_b_raw = 0.0;
    cdouble coherence{};  // <c^dag d>
    double trace = 1.0;   // tr(rho), <psi|psi>, or 1 for moment engines
    double n_a = std::numeric_limits<double>::quiet_NaN();
    double n_b = std::numeric_limits<double>::quiet_NaN();
    cdouble g1{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    // <c^dag c (gamma_a c^dag c + gamma_b d^dag d)> and the d-mode analogue (state-vector engines only).
    double loss_a = 0.0;
    double loss_b = 0.0;
};

/// Fills the renormalized fields; leaves NaN when <N> = 0.
inline void fill_renormalized(ObservableRecord& r) {
    if (r.n_a_raw + r.n_b_raw > 0.0) {
        const auto ren = renormalized_observables(r.n_a_raw, r.n_b_raw, r.coherence);
        r.n_a = ren.n_a;
        r.n_b = ren.n_b;
        r.g1 = ren.g1;
    }
}

/// Conservation and truncation diagnostics accumulated over a run.
struct Diagnostics {
    double max_trace_error = 0.0;        // |tr rho - 1|
    double max_hermiticity_error = 0.0;  // max |rho - rho^dag|
    double min_eigenvalue = std::numeric_limits<double>::infinity();  // spot checks
    double max_top_level_population = 0.0;
    double min_relative_eigenvalue = std::numeric_limits<double>::infinity();  // lambda_min / tr (moment engine)
    bool norm_monotone = true;  // non-Hermitian engine
    std::vector<std::string> warnings;
};

enum class Engine { Lindblad, NonHermitian, Gaussian };

inline std::string to_string(Engine e) {
    switch (e) {
        case Engine::Lindblad: return "lindblad";
        case Engine::NonHermitian: return "nonhermitian";
        case Engine::Gaussian: return "gaussian";
    }
    return "?";
}

struct ObservableTrajectory {
    Engine engine = Engine::Lindblad;
    double omega_b = 0.0;
    double g = 0.0;
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    double nbar_a = 0.0;
    double nbar_b = 0.0;
    std::vector<ObservableRecord> records;
    std::vector<cmat> states;  // optional snapshots (density matrices, state vectors as columns, or moment matrices)
    Diagnostics diagnostics;
    ode::OdeStats stats;
    bool stopped_early = false;
};

/// Engine-independent evolution controls.
struct EvolveOptions {
    ode::OdeOptions ode;
    bool keep_states = false;
    int positivity_checks = 10;       // eigenvalue spot checks (density engines)
    double leakage_threshold = 1e-6;  // top Fock level population
    // Drop the common rotation omega_b N; it commutes with the generator and
    // leaves every recorded observable unchanged.
    bool interaction_picture = true;
};

/// Fourth-order five-point central derivatives on a uniform grid. Entry i
/// holds the derivative at sample i + 2 (interior samples only).
template <typename T>
std::vector<T> five_point_derivatives(const std::vector<double>& times, const std::vector<T>& values) {
    const size_t n = times.size();
    if (n < 5 || values.size() != n)
        throw Error("finite differences need at least 5 equally spaced samples");
    const double h = (times.back() - times.front()) / static_cast<double>(n - 1);
    for (size_t i = 1; i < n; ++i)
        if (std::abs((times[i] - times[i - 1]) - h) > 1e-6 * h)
            throw Error("finite differences need a uniform sampling grid");
    std::vector<T> out;
    out.reserve(n - 4);
    for (size_t i = 2; i + 2 < n; ++i)
        out.push_back((values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h));
    return out;
}

}  // namespace optodimer

#endif
