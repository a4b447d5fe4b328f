#ifndef OPTODIMER_RUNNER_HPP
#define OPTODIMER_RUNNER_HPP

// Runs a scenario through the selected engines, compares them, and writes
// CSV / SVG / report files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optodimer/errors.hpp"
#include "optodimer/fock.hpp"
#include "optodimer/gaussian.hpp"
#include "optodimer/io.hpp"
#include "optodimer/lindblad.hpp"
#include "optodimer/nonhermitian.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/params.hpp"
#include "optodimer/scenario.hpp"

namespace optodimer {

struct EngineDeviation {
    Engine reference;
    Engine other;
    std::vector<double> t;
    std::vector<double> d_n_a, d_n_b, d_re_g1, d_im_g1;  // other - reference
    double max_n_a = 0.0;
    double max_n_b = 0.0;
    double max_g1 = 0.0;  // max |g1_other - g1_ref|
    double l2_n_a = 0.0;  // RMS over samples
};

struct ComparisonReport {
    Regime regime{RegimeTag::ExceptionalPoint, 0.0};
    std::vector<EngineDeviation> pairs;
    std::vector<std::string> warnings;
};

/// Per-sample differences of renormalized observables (samples matched by index).
inline EngineDeviation compare_trajectories(const ObservableTrajectory& ref, const ObservableTrajectory& other) {
    EngineDeviation d{ref.engine, other.engine, {}, {}, {}, {}, {}};
    const size_t n = std::min(ref.records.size(), other.records.size());
    double sq = 0.0;
    size_t counted = 0;
    for (size_t i = 0; i < n; ++i) {
        const auto& a = ref.records[i];
        const auto& b = other.records[i];
        d.t.push_back(a.t);
        d.d_n_a.push_back(b.n_a - a.n_a);
        d.d_n_b.push_back(b.n_b - a.n_b);
        d.d_re_g1.push_back(b.g1.real() - a.g1.real());
        d.d_im_g1.push_back(b.g1.imag() - a.g1.imag());
        if (std::isfinite(d.d_n_a.back())) {
            d.max_n_a = std::max(d.max_n_a, std::abs(d.d_n_a.back()));
            d.max_n_b = std::max(d.max_n_b, std::abs(d.d_n_b.back()));
            d.max_g1 = std::max(d.max_g1, std::abs(b.g1 - a.g1));
            sq += d.d_n_a.back() * d.d_n_a.back();
            ++counted;
        }
    }
    d.l2_n_a = counted ? std::sqrt(sq / static_cast<double>(counted)) : 0.0;
    return d;
}

struct ScenarioResult {
    ScenarioConfig config;
    std::map<Engine, ObservableTrajectory> trajectories;
    std::optional<ComparisonReport> comparison;
    Regime regime{RegimeTag::ExceptionalPoint, 0.0};
    std::vector<std::filesystem::path> files;
};

inline QuantumState initial_quantum_state(const ScenarioConfig& c, FockSpace space) {
    switch (c.state.kind) {
        case StateKind::Fock: return fock_product_state(c.state.n_a, c.state.n_b, space);
        case StateKind::Noon: return noon_state(c.state.N, space);
        case StateKind::Thermal:
        case StateKind::ThermalNbar: {
            const auto [na, nb] = initial_thermal_occupations(c);
            return thermal_density_matrix(na, nb, space, c.thermal_tail_tol);
        }
    }
    throw ConfigError("unknown initial state");
}

inline MomentState initial_moments(const ScenarioConfig& c) {
    if (c.state.kind == StateKind::Thermal || c.state.kind == StateKind::ThermalNbar) {
        const auto [na, nb] = initial_thermal_occupations(c);
        return thermal_moments(na, nb);
    }
    return moments_from_triple(moments_of(initial_quantum_state(c, space_for(c))));
}

/// Integrates every selected engine; no file output.
inline ScenarioResult simulate_scenario(const ScenarioConfig& c) {
    validate(c);
    ScenarioResult res;
    res.config = c;
    const double g = coupling(c.params);
    res.regime = classify_regime(g, gamma_contrast(c.params.gamma_a, c.params.gamma_b), c.classify_tol);

    const auto times = ode::linspace(0.0, t_end_seconds(c), c.samples);
    EvolveOptions opts;
    opts.ode.rtol = c.rtol;
    opts.ode.atol = c.atol;

    std::optional<QuantumState> state;
    auto quantum_state = [&]() -> const QuantumState& {
        if (!state) state = initial_quantum_state(c, space_for(c));
        return *state;
    };
    for (Engine e : c.engines) {
        switch (e) {
            case Engine::Lindblad:
                res.trajectories[e] = evolve_density(quantum_state(), c.params, times, opts);
                break;
            case Engine::NonHermitian:
                res.trajectories[e] = evolve_nonhermitian(quantum_state(), c.params, times, opts);
                break;
            case Engine::Gaussian:
                res.trajectories[e] = evolve_moments(initial_moments(c), c.params, times, opts);
                break;
        }
    }

    if (res.trajectories.size() >= 2) {
        ComparisonReport rep;
        rep.regime = res.regime;
        const auto& ref = res.trajectories.begin()->second;
        for (auto it = std::next(res.trajectories.begin()); it != res.trajectories.end(); ++it)
            rep.pairs.push_back(compare_trajectories(ref, it->second));
        for (const auto& [e, tr] : res.trajectories)
            for (const auto& w : tr.diagnostics.warnings) rep.warnings.push_back(to_string(e) + ": " + w);
        res.comparison = rep;
    }
    return res;
}

inline std::string comparison_csv_text(const ComparisonReport& rep, double omega_b) {
    std::string s = "t_seconds,omega_b_t";
    for (const auto& p : rep.pairs) {
        const std::string tag = to_string(p.other) + "_minus_" + to_string(p.reference);
        s += "," + tag + "_n_a," + tag + "_n_b," + tag + "_re_g1," + tag + "_im_g1";
    }
    s += '\n';
    const size_t n = rep.pairs.empty() ? 0 : rep.pairs.front().t.size();
    for (size_t i = 0; i < n; ++i) {
        const double t = rep.pairs.front().t[i];
        s += format_double(t) + ',' + format_double(omega_b * t);
        for (const auto& p : rep.pairs)
            s += ',' + format_double(p.d_n_a[i]) + ',' + format_double(p.d_n_b[i]) + ',' + format_double(p.d_re_g1[i]) +
                 ',' + format_double(p.d_im_g1[i]);
        s += '\n';
    }
    return s;
}

inline std::string report_text(const ScenarioResult& res) {
    const auto& c = res.config;
    std::ostringstream os;
    os.precision(10);
    os << "scenario: " << c.id << '\n';
    if (!c.title.empty()) os << "title: " << c.title << '\n';
    os << "initial: " << c.state.describe() << '\n';
    os << "g: " << coupling(c.params) << " rad/s\n";
    os << "Gamma: " << gamma_contrast(c.params.gamma_a, c.params.gamma_b) << " rad/s\n";
    os << "regime: " << to_string(res.regime.tag) << " (gap " << res.regime.gap << " rad/s)\n";
    for (const auto& [e, tr] : res.trajectories) {
        os << "engine " << to_string(e) << ": steps " << tr.stats.steps << ", rejected " << tr.stats.rejected
           << ", rhs " << tr.stats.rhs_evals << '\n';
        for (const auto& w : tr.diagnostics.warnings) os << "  warning: " << w << '\n';
    }
    if (res.comparison)
        for (const auto& p : res.comparison->pairs)
            os << to_string(p.other) << " vs " << to_string(p.reference) << ": max|dn_a| " << p.max_n_a
               << ", max|dn_b| " << p.max_n_b << ", max|dg1| " << p.max_g1 << ", rms dn_a " << p.l2_n_a << '\n';
    return os.str();
}

/// Writes outputs for a simulated scenario; returns the written paths.
inline std::vector<std::filesystem::path> write_outputs(const ScenarioResult& res) {
    namespace fs = std::filesystem;
    const auto& c = res.config;
    const fs::path dir(c.out_dir);
    std::vector<fs::path> files;
    for (const auto& [e, tr] : res.trajectories) {
        const fs::path p = dir / (c.id + "_" + to_string(e) + ".csv");
        write_csv(tr, p);
        files.push_back(p);
    }
    if (res.comparison) {
        const fs::path p = dir / (c.id + "_comparison.csv");
        write_text(p, comparison_csv_text(*res.comparison, c.params.omega_b));
        files.push_back(p);
    }
    const fs::path rp = dir / (c.id + "_report.txt");
    write_text(rp, report_text(res));
    files.push_back(rp);
    if (c.svg) {
        std::vector<const ObservableTrajectory*> trs;
        for (const auto& [e, tr] : res.trajectories) trs.push_back(&tr);
        const fs::path p = dir / (c.id + ".svg");
        write_svg(trs, p, c.plot, c.title);
        files.push_back(p);
    }
    return files;
}

/// Simulates and writes outputs. On a numerical failure a `<id>.partial` marker
/// naming the failure is written before the error propagates.
inline ScenarioResult run_scenario(const ScenarioConfig& c) {
    namespace fs = std::filesystem;
    const fs::path marker = fs::path(c.out_dir) / (c.id + ".partial");
    ScenarioResult res;
    try {
        res = simulate_scenario(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        try {
            write_text(marker, std::string("partial results: ") + e.what() + "\n");
        } catch (const IoError&) {
        }
        throw;
    }
    res.files = write_outputs(res);
    std::error_code ec;
    fs::remove(marker, ec);
    return res;
}

// ---------------------------------------------------------------- classify

struct ClassifyReport {
    double g, gamma_a, gamma_b, omega_b;
    double Gamma;
    double ep_coupling;  // |Gamma|
    Regime regime;
    std::pair<cdouble, cdouble> spectrum;
    std::pair<double, double> decay_rates;  // slowest first
};

inline ClassifyReport classify(double g, double gamma_a, double gamma_b, double omega_b,
                               double tol = default_classify_tol) {
    if (!(g >= 0.0) || !(gamma_a >= 0.0) || !(gamma_b >= 0.0) || !(omega_b > 0.0))
        throw DomainError("classify: need g, gamma_a, gamma_b >= 0 and omega_b > 0");
    const double G = gamma_contrast(gamma_a, gamma_b);
    return {g,
            gamma_a,
            gamma_b,
            omega_b,
            G,
            std::abs(G),
            classify_regime(g, G, tol),
            pt_spectrum(g, G),
            mode_decay_rates(g, gamma_a, gamma_b)};
}

inline std::string format_classify(const ClassifyReport& r) {
    auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6e", x);
        return std::string(buf);
    };
    auto cnum = [&](cdouble z) { return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i"; };
    std::ostringstream os;
    os << "g              = " << num(r.g) << " rad/s (" << num(r.g / r.omega_b) << " omega_b)\n"
       << "Gamma          = " << num(r.Gamma) << " rad/s\n"
       << "ep_coupling    = " << num(r.ep_coupling) << " rad/s (" << num(r.ep_coupling / r.omega_b) << " omega_b)\n"
       << "regime         = " << to_string(r.regime.tag) << "\n"
       << "gap            = " << num(r.regime.gap) << " rad/s\n"
       << "pt_eigenvalues = " << cnum(r.spectrum.first) << ", " << cnum(r.spectrum.second) << " rad/s\n"
       << "decay_rates    = " << num(r.decay_rates.first) << ", " << num(r.decay_rates.second) << " 1/s\n";
    return os.str();
}

}  // namespace optodimer

#endif
