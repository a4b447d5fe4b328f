#ifndef OPTODIMER_LINDBLAD_HPP
#define OPTODIMER_LINDBLAD_HPP

// Thermal Lindblad master equation for the beam-splitter dimer, plus the
// closed equations for <c^dag c>, <d^dag d>, <c^dag d>.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "optodimer/fock.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/ode.hpp"
#include "optodimer/params.hpp"

namespace optodimer {

struct LindbladChannel {
    FockOperator jump;
    double rate = 0.0;
};

inline void check_shape(const FockOperator& op, const cmat& rho, const char* who) {
    if (rho.rows() != op.space().dim() || rho.cols() != op.space().dim())
        throw ShapeError(std::string(who) + ": density matrix does not match operator space");
}

/// A rho A^dag - (A^dag A rho + rho A^dag A) / 2.
inline cmat dissipator_apply(const FockOperator& A, const cmat& rho) {
    check_shape(A, rho, "dissipator_apply");
    const SparseMatrix& a = A.matrix();
    const SparseMatrix adag = a.adjoint();
    const SparseMatrix ada = adag * a;
    const cmat a_rho = a * rho;
    return a_rho * adag - 0.5 * (ada * rho + rho * ada);
}

/// i [rho, H] + sum_k rate_k D[A_k] rho.
inline cmat lindblad_rhs(const cmat& rho, const FockOperator& H, const std::vector<LindbladChannel>& channels) {
    using namespace std::complex_literals;
    check_shape(H, rho, "lindblad_rhs");
    cmat out = 1.0i * (rho * H.matrix() - H.matrix() * rho);
    for (const auto& ch : channels) {
        if (ch.rate < 0.0) throw DomainError("lindblad_rhs: negative channel rate");
        if (ch.rate > 0.0) out += ch.rate * dissipator_apply(ch.jump, rho);
    }
    return out;
}

/// Thermal channels on c^dag, c, d^dag, d with rates gamma nbar and gamma (nbar + 1).
inline std::vector<LindbladChannel> thermal_channels(double gamma_a, double gamma_b, double nbar_a, double nbar_b,
                                                     FockSpace space) {
    const ModeOperators ops(space);
    return {{ops.cdag, gamma_a * nbar_a},
            {ops.c, gamma_a * (nbar_a + 1.0)},
            {ops.ddag, gamma_b * nbar_b},
            {ops.d, gamma_b * (nbar_b + 1.0)}};
}

/// Generator written as i(rho H_eff^dag - H_eff rho) + sum_k rate_k A_k rho A_k^dag
/// with H_eff = H - (i/2) sum_k rate_k A_k^dag A_k. Zero-rate channels are dropped.
class LindbladGenerator {
public:
    LindbladGenerator(const FockOperator& H, const std::vector<LindbladChannel>& channels)
        : dim_(H.space().dim()) {
        using namespace std::complex_literals;
        SparseMatrix heff = H.matrix();
        for (const auto& ch : channels) {
            if (ch.rate < 0.0) throw DomainError("LindbladGenerator: negative channel rate");
            if (ch.rate == 0.0) continue;
            const SparseMatrix& a = ch.jump.matrix();
            SparseMatrix ada = a.adjoint() * a;
            heff -= (0.5i * ch.rate) * ada;
            jumps_.push_back(a);
            jumps_dag_.push_back(a.adjoint());
            rates_.push_back(ch.rate);
        }
        heff_ = heff;
        heff_dag_ = heff.adjoint();
    }

    void apply(const Eigen::Ref<const cmat>& rho, Eigen::Ref<cmat> out) const {
        using namespace std::complex_literals;
        tmp_.noalias() = heff_ * rho;
        out.noalias() = -1.0i * tmp_;
        tmp_.noalias() = rho * heff_dag_;
        out.noalias() += 1.0i * tmp_;
        for (size_t k = 0; k < jumps_.size(); ++k) {
            tmp_.noalias() = jumps_[k] * rho;
            out.noalias() += rates_[k] * (tmp_ * jumps_dag_[k]);
        }
    }

    int dim() const { return dim_; }

private:
    int dim_;
    SparseMatrix heff_, heff_dag_;
    std::vector<SparseMatrix> jumps_, jumps_dag_;
    std::vector<double> rates_;
    mutable cmat tmp_;
};

namespace detail {

inline double top_level_population(const cmat& rho, FockSpace space) {
    double acc = 0.0;
    for (int i = 0; i < space.dim(); ++i)
        if (space.n_a(i) == space.dim_a - 1 || space.n_b(i) == space.dim_b - 1) acc += rho(i, i).real();
    return acc;
}

/// Sample indices for eigenvalue spot checks, evenly spread.
inline std::vector<size_t> spot_check_indices(size_t samples, int checks) {
    std::vector<size_t> idx;
    if (samples == 0 || checks <= 0) return idx;
    const size_t k = std::min<size_t>(samples, static_cast<size_t>(checks));
    for (size_t j = 0; j < k; ++j) idx.push_back(k == 1 ? 0 : j * (samples - 1) / (k - 1));
    return idx;
}

inline double min_hermitian_eigenvalue(const cmat& m) {
    const cmat herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<cmat> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace detail

/// Lindblad evolution of rho0 (pure inputs are promoted to |psi><psi|).
/// Records observables at `sample_times` (seconds, starting at or after 0).
inline ObservableTrajectory evolve_density(const QuantumState& rho0, const SystemParams& p,
                                           const std::vector<double>& sample_times, const EvolveOptions& opts = {}) {
    validate(p);
    if (sample_times.empty()) throw DomainError("evolve_density: no sample times");
    const FockSpace space = rho0.space();
    const double g = coupling(p);
    const auto [nbar_a, nbar_b] = bath_occupations(p);
    const double omega = opts.interaction_picture ? 0.0 : p.omega_b;
    const FockOperator H = beam_splitter_hamiltonian(omega, g, space);
    const LindbladGenerator gen(H, thermal_channels(p.gamma_a, p.gamma_b, nbar_a, nbar_b, space));
    const ModeOperators ops(space);

    ObservableTrajectory traj;
    traj.engine = Engine::Lindblad;
    traj.omega_b = p.omega_b;
    traj.g = g;
    traj.gamma_a = p.gamma_a;
    traj.gamma_b = p.gamma_b;
    traj.nbar_a = nbar_a;
    traj.nbar_b = nbar_b;

    const int n = space.dim();
    const cmat rho_init = rho0.to_density();
    cvec y0 = Eigen::Map<const cvec>(rho_init.data(), rho_init.size());

    ode::OdeProblem prob;
    prob.rhs = [&gen, n](double, const cvec& y, cvec& dy) {
        gen.apply(Eigen::Map<const cmat>(y.data(), n, n), Eigen::Map<cmat>(dy.data(), n, n));
    };
    prob.y0 = std::move(y0);
    prob.t0 = std::min(0.0, sample_times.front());
    prob.t1 = sample_times.back() > prob.t0 ? sample_times.back() : prob.t0 + 1.0;
    prob.sample_times = sample_times;
    prob.options = opts.ode;
    prob.options.store_states = false;

    const auto spot = detail::spot_check_indices(sample_times.size(), opts.positivity_checks);
    size_t sample = 0;
    auto observe = [&](double t, const cvec& y) {
        const Eigen::Map<const cmat> rho(y.data(), n, n);
        ObservableRecord r;
        r.t = t;
        r.trace = rho.trace().real();
        r.n_a_raw = trace_product(ops.n_c.matrix(), rho).real();
        r.n_b_raw = trace_product(ops.n_d.matrix(), rho).real();
        r.coherence = trace_product(ops.cdag_d.matrix(), rho);
        fill_renormalized(r);
        traj.records.push_back(r);

        auto& d = traj.diagnostics;
        d.max_trace_error = std::max(d.max_trace_error, std::abs(r.trace - 1.0));
        d.max_hermiticity_error = std::max(d.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        d.max_top_level_population = std::max(d.max_top_level_population, detail::top_level_population(rho, space));
        if (std::binary_search(spot.begin(), spot.end(), sample))
            d.min_eigenvalue = std::min(d.min_eigenvalue, detail::min_hermitian_eigenvalue(rho));
        if (opts.keep_states) traj.states.emplace_back(rho);
        ++sample;
        return true;
    };

    const auto res = ode::integrate_adaptive(prob, observe);
    traj.stats = res.stats;
    if (traj.diagnostics.max_top_level_population > opts.leakage_threshold)
        traj.diagnostics.warnings.push_back("truncation leakage: top Fock level population " +
                                            std::to_string(traj.diagnostics.max_top_level_population));
    return traj;
}

/// (<c^dag c>, <d^dag d>, <c^dag d>).
struct MomentTriple {
    double n_a = 0.0;
    double n_b = 0.0;
    cdouble coherence{};
};

/// Closed moment equations of the thermal Lindblad generator.
inline MomentTriple moment_rhs(const MomentTriple& m, double g, double gamma_a, double gamma_b, double nbar_a,
                               double nbar_b) {
    using namespace std::complex_literals;
    MomentTriple d;
    d.n_a = 2.0 * g * m.coherence.imag() - gamma_a * m.n_a + gamma_a * nbar_a;
    d.n_b = -2.0 * g * m.coherence.imag() - gamma_b * m.n_b + gamma_b * nbar_b;
    d.coherence = 1.0i * g * (m.n_b - m.n_a) - 0.5 * (gamma_a + gamma_b) * m.coherence;
    return d;
}

inline MomentTriple moment_rhs(const MomentTriple& m, const SystemParams& p) {
    const auto [na, nb] = bath_occupations(p);
    return moment_rhs(m, coupling(p), p.gamma_a, p.gamma_b, na, nb);
}

inline MomentTriple moments_of(const QuantumState& s) {
    const ModeOperators ops(s.space());
    const double norm = s.norm();
    return {s.expectation(ops.n_c).real() / norm, s.expectation(ops.n_d).real() / norm,
            s.expectation(ops.cdag_d) / norm};
}

/// Integrates the moment triple directly (fast path; exact for this quadratic model).
inline ObservableTrajectory evolve_moment_triple(const MomentTriple& m0, const SystemParams& p,
                                                 const std::vector<double>& sample_times,
                                                 const EvolveOptions& opts = {}) {
    validate(p);
    if (sample_times.empty()) throw DomainError("evolve_moment_triple: no sample times");
    const double g = coupling(p);
    const auto [nbar_a, nbar_b] = bath_occupations(p);

    ObservableTrajectory traj;
    traj.engine = Engine::Lindblad;
    traj.omega_b = p.omega_b;
    traj.g = g;
    traj.gamma_a = p.gamma_a;
    traj.gamma_b = p.gamma_b;
    traj.nbar_a = nbar_a;
    traj.nbar_b = nbar_b;

    ode::OdeProblem prob;
    prob.rhs = [&](double, const cvec& y, cvec& dy) {
        const auto d = moment_rhs({y(0).real(), y(1).real(), y(2)}, g, p.gamma_a, p.gamma_b, nbar_a, nbar_b);
        dy(0) = d.n_a;
        dy(1) = d.n_b;
        dy(2) = d.coherence;
    };
    prob.y0 = cvec(3);
    prob.y0 << m0.n_a, m0.n_b, m0.coherence;
    prob.t0 = std::min(0.0, sample_times.front());
    prob.t1 = sample_times.back() > prob.t0 ? sample_times.back() : prob.t0 + 1.0;
    prob.sample_times = sample_times;
    prob.options = opts.ode;
    prob.options.store_states = false;

    const auto res = ode::integrate_adaptive(prob, [&](double t, const cvec& y) {
        ObservableRecord r;
        r.t = t;
        r.n_a_raw = y(0).real();
        r.n_b_raw = y(1).real();
        r.coherence = y(2);
        fill_renormalized(r);
        traj.records.push_back(r);
        return true;
    });
    traj.stats = res.stats;
    return traj;
}

/// Largest dimensionless residual between finite-difference derivatives of the
/// recorded raw moments and moment_rhs, normalized by max(gamma_a, gamma_b, g) * max_t <N>.
/// Records are normalized by their trace first.
inline double moment_closure_residual(const ObservableTrajectory& traj) {
    const auto& rec = traj.records;
    std::vector<double> ts;
    std::vector<cdouble> a, b, c;
    double occ_scale = 0.0;
    for (const auto& r : rec) {
        ts.push_back(r.t);
        a.emplace_back(r.n_a_raw / r.trace);
        b.emplace_back(r.n_b_raw / r.trace);
        c.push_back(r.coherence / r.trace);
        occ_scale = std::max(occ_scale, (r.n_a_raw + r.n_b_raw) / r.trace);
    }
    const auto da = five_point_derivatives(ts, a);
    const auto db = five_point_derivatives(ts, b);
    const auto dc = five_point_derivatives(ts, c);
    const double rate_scale = std::max({traj.gamma_a, traj.gamma_b, traj.g});
    const double scale = rate_scale * std::max(occ_scale, 1e-300);
    double worst = 0.0;
    for (size_t i = 0; i < da.size(); ++i) {
        const size_t k = i + 2;
        const auto m = moment_rhs({a[k].real(), b[k].real(), c[k]}, traj.g, traj.gamma_a, traj.gamma_b, traj.nbar_a,
                                  traj.nbar_b);
        worst = std::max({worst, std::abs(da[i] - m.n_a), std::abs(db[i] - m.n_b), std::abs(dc[i] - m.coherence)});
    }
    return worst / scale;
}

}  // namespace optodimer

#endif
