#ifndef OPTODIMER_NONHERMITIAN_HPP
#define OPTODIMER_NONHERMITIAN_HPP

// Evolution under the lossy Hamiltonian H_L with post-selected (renormalized)
// observables. The stored state is never renormalized.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "optodimer/fock.hpp"
#include "optodimer/lindblad.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/ode.hpp"
#include "optodimer/params.hpp"

namespace optodimer {

inline constexpr double norm_underflow = 1e-300;

inline RenormalizedObservables renormalized_observables(const QuantumState& s) {
    const ModeOperators ops(s.space());
    return renormalized_observables(s.expectation(ops.n_c).real(), s.expectation(ops.n_d).real(),
                                    s.expectation(ops.cdag_d));
}

/// Pure states follow d|psi>/dt = -i H_L |psi>; mixed states d rho/dt = -i (H_L rho - rho H_L^dag).
inline ObservableTrajectory evolve_nonhermitian(const QuantumState& state0, const SystemParams& p,
                                                const std::vector<double>& sample_times,
                                                const EvolveOptions& opts = {}) {
    using namespace std::complex_literals;
    validate(p);
    if (sample_times.empty()) throw DomainError("evolve_nonhermitian: no sample times");
    const FockSpace space = state0.space();
    const double g = coupling(p);
    const double omega = opts.interaction_picture ? 0.0 : p.omega_b;
    const SparseMatrix HL = lossy_hamiltonian(omega, g, p.gamma_a, p.gamma_b, space).matrix();
    const SparseMatrix HL_dag = HL.adjoint();
    const ModeOperators ops(space);
    const SparseMatrix loss = (cdouble(p.gamma_a) * ops.n_c + cdouble(p.gamma_b) * ops.n_d).matrix();
    const SparseMatrix loss_a = ops.n_c.matrix() * loss;
    const SparseMatrix loss_b = ops.n_d.matrix() * loss;

    ObservableTrajectory traj;
    traj.engine = Engine::NonHermitian;
    traj.omega_b = p.omega_b;
    traj.g = g;
    traj.gamma_a = p.gamma_a;
    traj.gamma_b = p.gamma_b;

    const bool pure = state0.is_pure();
    const int n = space.dim();

    ode::OdeProblem prob;
    if (pure) {
        prob.y0 = state0.vector();
        prob.rhs = [&HL](double, const cvec& y, cvec& dy) { dy.noalias() = -1.0i * (HL * y); };
    } else {
        const cmat& rho = state0.density();
        prob.y0 = Eigen::Map<const cvec>(rho.data(), rho.size());
        prob.rhs = [&HL, &HL_dag, n](double, const cvec& y, cvec& dy) {
            const Eigen::Map<const cmat> r(y.data(), n, n);
            Eigen::Map<cmat> out(dy.data(), n, n);
            out.noalias() = -1.0i * (HL * r);
            out.noalias() += 1.0i * (r * HL_dag);
        };
    }
    prob.t0 = std::min(0.0, sample_times.front());
    prob.options = opts.ode;
    prob.options.store_states = false;

    // The integrated state is periodically rescaled to unit norm so the error
    // control stays relative; `log_scale` holds the log of the removed
    // squared-norm factor and every recorded raw value is multiplied back.
    constexpr double rescale_below = 1e-4;
    const double log_underflow = std::log(norm_underflow);
    double log_scale = 0.0;
    double prev_log_norm = std::numeric_limits<double>::infinity();
    bool underflow = false;
    bool rescale = false;
    double stored_norm = 1.0;

    auto observe = [&](double t, const cvec& y) {
        ObservableRecord r;
        r.t = t;
        if (pure) {
            stored_norm = y.squaredNorm();
            r.n_a_raw = expectation_pure(ops.n_c.matrix(), y).real();
            r.n_b_raw = expectation_pure(ops.n_d.matrix(), y).real();
            r.coherence = expectation_pure(ops.cdag_d.matrix(), y);
            r.loss_a = expectation_pure(loss_a, y).real();
            r.loss_b = expectation_pure(loss_b, y).real();
        } else {
            const Eigen::Map<const cmat> rho(y.data(), n, n);
            stored_norm = rho.trace().real();
            r.n_a_raw = trace_product(ops.n_c.matrix(), rho).real();
            r.n_b_raw = trace_product(ops.n_d.matrix(), rho).real();
            r.coherence = trace_product(ops.cdag_d.matrix(), rho);
            r.loss_a = trace_product(loss_a, rho).real();
            r.loss_b = trace_product(loss_b, rho).real();
            traj.diagnostics.max_hermiticity_error =
                std::max(traj.diagnostics.max_hermiticity_error,
                         (rho - rho.adjoint()).cwiseAbs().maxCoeff() / std::max(stored_norm, 1e-300));
        }
        const double log_norm = std::log(std::max(stored_norm, 1e-300)) + log_scale;
        const double factor = std::exp(log_scale);
        r.trace = stored_norm * factor;
        r.n_a_raw *= factor;
        r.n_b_raw *= factor;
        r.coherence *= factor;
        r.loss_a *= factor;
        r.loss_b *= factor;
        fill_renormalized(r);
        traj.records.push_back(r);
        if (opts.keep_states) {
            if (pure)
                traj.states.emplace_back(cmat(std::sqrt(factor) * y));
            else
                traj.states.emplace_back(factor * Eigen::Map<const cmat>(y.data(), n, n));
        }
        if (log_norm > prev_log_norm + 1e-12) traj.diagnostics.norm_monotone = false;
        prev_log_norm = log_norm;
        if (!(stored_norm > 0.0) || log_norm < log_underflow) {
            underflow = true;
            traj.diagnostics.warnings.push_back("norm underflow below 1e-300 at t = " + std::to_string(t) +
                                                "; stopped early");
            return false;
        }
        if (stored_norm < rescale_below) {
            rescale = true;
            return false;
        }
        return true;
    };

    size_t next = 0;
    while (next < sample_times.size()) {
        prob.sample_times.assign(sample_times.begin() + static_cast<std::ptrdiff_t>(next), sample_times.end());
        prob.t1 = sample_times.back() > prob.t0 ? sample_times.back() : prob.t0 + 1.0;
        rescale = false;
        const size_t before = traj.records.size();
        const auto res = ode::integrate_adaptive(prob, observe);
        traj.stats.steps += res.stats.steps;
        traj.stats.rejected += res.stats.rejected;
        traj.stats.rhs_evals += res.stats.rhs_evals;
        next += traj.records.size() - before;
        if (underflow || !rescale) break;
        prob.y0 = res.final_state / (pure ? std::sqrt(stored_norm) : stored_norm);
        log_scale += std::log(stored_norm);
        prob.t0 = res.final_time;
        if (res.next_step > 0.0) prob.options.initial_step = res.next_step;
    }
    traj.stopped_early = underflow;
    return traj;
}

/// Largest residual of the unnormalized occupation equations
///   d<n_c>/dt = +2g Im<c^dag d> - <n_c (gamma_a n_c + gamma_b n_d)>
///   d<n_d>/dt = -2g Im<c^dag d> - <n_d (gamma_a n_c + gamma_b n_d)>
/// from five-point finite differences, divided by max(gamma_a, gamma_b, g) * max_t <N>.
inline double occupation_ode_residual(const ObservableTrajectory& traj) {
    std::vector<double> ts, a, b;
    double occ_scale = 0.0;
    for (const auto& r : traj.records) {
        ts.push_back(r.t);
        a.push_back(r.n_a_raw);
        b.push_back(r.n_b_raw);
        occ_scale = std::max(occ_scale, r.n_a_raw + r.n_b_raw);
    }
    const auto da = five_point_derivatives(ts, a);
    const auto db = five_point_derivatives(ts, b);
    const double scale = std::max({traj.gamma_a, traj.gamma_b, traj.g}) * std::max(occ_scale, 1e-300);
    double worst = 0.0;
    for (size_t i = 0; i < da.size(); ++i) {
        const auto& r = traj.records[i + 2];
        const double exchange = 2.0 * traj.g * r.coherence.imag();
        worst = std::max({worst, std::abs(da[i] - (exchange - r.loss_a)), std::abs(db[i] - (-exchange - r.loss_b))});
    }
    return worst / scale;
}

}  // namespace optodimer

#endif
