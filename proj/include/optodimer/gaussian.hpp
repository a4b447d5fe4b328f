#ifndef OPTODIMER_GAUSSIAN_HPP
#define OPTODIMER_GAUSSIAN_HPP

// Finite-temperature Langevin dynamics realized through the normally ordered
// second moments N_jk = <v_j^dag v_k>, v = (c, d). For the linear Langevin
// equations i dv/dt = M v - i xi the moments close exactly:
//
//   dN/dt = i (conj(M) N - N M^T) + D,   D = diag(gamma_a nbar_a, gamma_b nbar_b).

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "optodimer/errors.hpp"
#include "optodimer/fock.hpp"
#include "optodimer/lindblad.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/ode.hpp"
#include "optodimer/params.hpp"

namespace optodimer {

using DriftMatrix = Eigen::Matrix2cd;
using MomentState = Eigen::Matrix2cd;
using DiffusionMatrix = Eigen::Matrix2d;

inline DriftMatrix drift_matrix(double omega_b, double g, double gamma_a, double gamma_b) {
    DriftMatrix m;
    m << cdouble(omega_b, -0.5 * gamma_a), g, g, cdouble(omega_b, -0.5 * gamma_b);
    return m;
}

inline DriftMatrix drift_matrix(const SystemParams& p) {
    return drift_matrix(p.omega_b, coupling(p), p.gamma_a, p.gamma_b);
}

inline DiffusionMatrix diffusion_matrix(double gamma_a, double gamma_b, double nbar_a, double nbar_b) {
    DiffusionMatrix d = DiffusionMatrix::Zero();
    d(0, 0) = gamma_a * nbar_a;
    d(1, 1) = gamma_b * nbar_b;
    return d;
}

/// Diffusion at bath temperature T (explicit nbar overrides in p still win).
inline DiffusionMatrix diffusion_matrix(const SystemParams& p, double temperature) {
    if (!(temperature >= 0.0)) throw DomainError("diffusion_matrix: temperature must be >= 0");
    SystemParams q = p;
    q.temperature = temperature;
    const auto [na, nb] = bath_occupations(q);
    return diffusion_matrix(p.gamma_a, p.gamma_b, na, nb);
}

inline MomentState moment_flow_rhs(const MomentState& N, const DriftMatrix& M, const DiffusionMatrix& D) {
    using namespace std::complex_literals;
    return 1.0i * (M.conjugate() * N - N * M.transpose()) + D.cast<cdouble>();
}

inline MomentState moments_from_triple(const MomentTriple& m) {
    MomentState N;
    N << m.n_a, m.coherence, std::conj(m.coherence), m.n_b;
    return N;
}

inline MomentState thermal_moments(double nbar_a, double nbar_b) {
    MomentState N = MomentState::Zero();
    N(0, 0) = nbar_a;
    N(1, 1) = nbar_b;
    return N;
}

namespace detail {

inline Eigen::Matrix4cd moment_flow_operator(const DriftMatrix& M) {
    Eigen::Matrix4cd L;
    for (int k = 0; k < 4; ++k) {
        MomentState E = MomentState::Zero();
        E(k % 2, k / 2) = 1.0;  // column-major vec
        const MomentState out = moment_flow_rhs(E, M, DiffusionMatrix::Zero());
        L.col(k) = Eigen::Map<const Eigen::Vector4cd>(out.data());
    }
    return L;
}

}  // namespace detail

/// Solves i (conj(M) N - N M^T) + D = 0.
inline MomentState steady_state_moments(const DriftMatrix& M, const DiffusionMatrix& D) {
    const double loss = -2.0 * (M(0, 0).imag() + M(1, 1).imag());
    if (!(loss > 0.0)) throw NoSteadyStateError("steady_state_moments: no damping, no steady state");
    const Eigen::Matrix4cd L = detail::moment_flow_operator(M);
    Eigen::FullPivLU<Eigen::Matrix4cd> lu(L);
    if (!lu.isInvertible()) throw NoSteadyStateError("steady_state_moments: singular moment flow");
    const MomentState Dc = D.cast<cdouble>();
    const Eigen::Vector4cd rhs = -Eigen::Map<const Eigen::Vector4cd>(Dc.data());
    const Eigen::Vector4cd x = lu.solve(rhs);
    MomentState N = Eigen::Map<const MomentState>(x.data());
    N = 0.5 * (N + N.adjoint()).eval();
    return N;
}

inline MomentState steady_state_moments(const SystemParams& p, double temperature) {
    return steady_state_moments(drift_matrix(p), diffusion_matrix(p, temperature));
}

inline double min_moment_eigenvalue(const MomentState& N) {
    return detail::min_hermitian_eigenvalue(cmat(N));
}

/// Integrates the moment flow from N0 with the bath given by p (temperature or nbar overrides).
inline ObservableTrajectory evolve_moments(const MomentState& N0, const SystemParams& p,
                                           const std::vector<double>& sample_times, const EvolveOptions& opts = {}) {
    validate(p);
    if (sample_times.empty()) throw DomainError("evolve_moments: no sample times");
    const double g = coupling(p);
    const auto [nbar_a, nbar_b] = bath_occupations(p);
    const double omega = opts.interaction_picture ? 0.0 : p.omega_b;
    const DriftMatrix M = drift_matrix(omega, g, p.gamma_a, p.gamma_b);
    const DiffusionMatrix D = diffusion_matrix(p.gamma_a, p.gamma_b, nbar_a, nbar_b);

    ObservableTrajectory traj;
    traj.engine = Engine::Gaussian;
    traj.omega_b = p.omega_b;
    traj.g = g;
    traj.gamma_a = p.gamma_a;
    traj.gamma_b = p.gamma_b;
    traj.nbar_a = nbar_a;
    traj.nbar_b = nbar_b;

    ode::OdeProblem prob;
    prob.rhs = [&M, &D](double, const ode::cvec& y, ode::cvec& dy) {
        const Eigen::Map<const MomentState> N(y.data());
        Eigen::Map<MomentState>(dy.data()) = moment_flow_rhs(N, M, D);
    };
    prob.y0 = Eigen::Map<const ode::cvec>(N0.data(), 4);
    prob.t0 = std::min(0.0, sample_times.front());
    prob.t1 = sample_times.back() > prob.t0 ? sample_times.back() : prob.t0 + 1.0;
    prob.sample_times = sample_times;
    prob.options = opts.ode;
    prob.options.store_states = false;

    const auto res = ode::integrate_adaptive(prob, [&](double t, const ode::cvec& y) {
        const MomentState N = Eigen::Map<const MomentState>(y.data());
        ObservableRecord r;
        r.t = t;
        r.n_a_raw = N(0, 0).real();
        r.n_b_raw = N(1, 1).real();
        r.coherence = N(0, 1);
        fill_renormalized(r);
        traj.records.push_back(r);
        auto& d = traj.diagnostics;
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, (N - N.adjoint()).cwiseAbs().maxCoeff());
        const double tr = N.trace().real();
        if (tr > 0.0) d.min_relative_eigenvalue = std::min(d.min_relative_eigenvalue, min_moment_eigenvalue(N) / tr);
        if (opts.keep_states) traj.states.emplace_back(cmat(N));
        return true;
    });
    traj.stats = res.stats;
    return traj;
}

}  // namespace optodimer

#endif
