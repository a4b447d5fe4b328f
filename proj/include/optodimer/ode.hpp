#ifndef OPTODIMER_ODE_HPP
#define OPTODIMER_ODE_HPP

// Adaptive Dormand-Prince 5(4) integration over flat complex state arrays.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "optodimer/errors.hpp"

namespace optodimer::ode {

using cvec = Eigen::VectorXcd;

/// dydt = f(t, y). `dydt` is pre-sized to y.size().
using RhsFunction = std::function<void(double t, const cvec& y, cvec& dydt)>;

/// Called at each sample time; return false to stop integrating.
using SampleObserver = std::function<bool(double t, const cvec& y)>;

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0: automatic
    long max_steps = 50'000'000;
    bool store_states = true;
};

struct OdeProblem {
    RhsFunction rhs;
    cvec y0;
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> sample_times;  // sorted, inside [t0, t1]
    OdeOptions options;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<cvec> states;  // empty unless options.store_states
    cvec final_state;
    double final_time = 0.0;
    double next_step = 0.0;  // proposed step at exit, usable as a warm start
    OdeStats stats;
    bool stopped_early = false;
};

namespace dopri5 {
// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
// Fifth minus fourth order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dopri5

/// Stage workspace for one problem size.
struct StepWorkspace {
    cvec k2, k3, k4, k5, k6, k7, tmp;
    explicit StepWorkspace(Eigen::Index n)
        : k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n) {}
};

/// One Dormand-Prince step from (t, y) with first stage k1 = f(t, y). Writes the
/// fifth-order solution to y_next, the embedded error to err, and f(t+h, y_next) to ws.k7.
inline void step_dopri5(const RhsFunction& f, double t, const cvec& y, const cvec& k1, double h, cvec& y_next,
                        cvec& err, StepWorkspace& ws) {
    using namespace dopri5;
    ws.tmp = y + h * (a21 * k1);
    f(t + c2 * h, ws.tmp, ws.k2);
    ws.tmp = y + h * (a31 * k1 + a32 * ws.k2);
    f(t + c3 * h, ws.tmp, ws.k3);
    ws.tmp = y + h * (a41 * k1 + a42 * ws.k2 + a43 * ws.k3);
    f(t + c4 * h, ws.tmp, ws.k4);
    ws.tmp = y + h * (a51 * k1 + a52 * ws.k2 + a53 * ws.k3 + a54 * ws.k4);
    f(t + c5 * h, ws.tmp, ws.k5);
    ws.tmp = y + h * (a61 * k1 + a62 * ws.k2 + a63 * ws.k3 + a64 * ws.k4 + a65 * ws.k5);
    f(t + h, ws.tmp, ws.k6);
    y_next = y + h * (a71 * k1 + a73 * ws.k3 + a74 * ws.k4 + a75 * ws.k5 + a76 * ws.k6);
    f(t + h, y_next, ws.k7);
    err = h * (e1 * k1 + e3 * ws.k3 + e4 * ws.k4 + e5 * ws.k5 + e6 * ws.k6 + e7 * ws.k7);
}

struct EmbeddedStep {
    cvec y_next;
    cvec error;
};

inline EmbeddedStep step_embedded(const RhsFunction& f, double t, const cvec& y, double h) {
    if (!(h > 0.0)) throw DomainError("step_embedded: step must be positive");
    StepWorkspace ws(y.size());
    cvec k1(y.size());
    f(t, y, k1);
    EmbeddedStep out{cvec(y.size()), cvec(y.size())};
    step_dopri5(f, t, y, k1, h, out.y_next, out.error, ws);
    return out;
}

/// Scaled RMS over real and imaginary parts with scale atol + rtol * max(|y|, |y_next|).
inline double error_norm(const cvec& err, const cvec& y, const cvec& y_next, double rtol, double atol) {
    const Eigen::Index n = err.size();
    if (n == 0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(y_next(i)));
        const double re = err(i).real() / sc;
        const double im = err(i).imag() / sc;
        acc += re * re + im * im;
    }
    return std::sqrt(acc / (2.0 * static_cast<double>(n)));
}

namespace detail {

inline double initial_step(const RhsFunction& f, double t0, const cvec& y0, const cvec& f0, double span,
                           const OdeOptions& o, OdeStats& stats) {
    const cvec zero = cvec::Zero(y0.size());
    const double d0 = error_norm(y0, y0, zero, o.rtol, o.atol);
    const double d1 = error_norm(f0, y0, zero, o.rtol, o.atol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const cvec y1 = y0 + h0 * f0;
    cvec f1(y0.size());
    f(t0 + h0, y1, f1);
    ++stats.rhs_evals;
    const double d2 = error_norm(cvec(f1 - f0), y0, zero, o.rtol, o.atol) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace detail

/// Adaptive integration with PI step control. Steps are clipped to land exactly
/// on every sample time; one record per sample time.
inline OdeTrajectory integrate_adaptive(const OdeProblem& p, const SampleObserver& observer = {}) {
    const OdeOptions& o = p.options;
    if (!(o.rtol > 0.0) || !(o.atol > 0.0)) throw DomainError("integrate_adaptive: tolerances must be positive");
    if (!(p.t1 > p.t0)) throw DomainError("integrate_adaptive: empty time span");
    for (size_t i = 0; i < p.sample_times.size(); ++i) {
        const double ts = p.sample_times[i];
        if (ts < p.t0 || ts > p.t1) throw DomainError("integrate_adaptive: sample time outside span");
        if (i > 0 && !(ts > p.sample_times[i - 1]))
            throw DomainError("integrate_adaptive: sample times must be strictly increasing");
    }

    OdeTrajectory out;
    const Eigen::Index n = p.y0.size();
    cvec y = p.y0;
    double t = p.t0;

    auto record = [&](double ts) {
        out.times.push_back(ts);
        if (o.store_states) out.states.push_back(y);
        if (observer && !observer(ts, y)) {
            out.stopped_early = true;
            return false;
        }
        return true;
    };

    size_t next = 0;
    while (next < p.sample_times.size() && p.sample_times[next] == t) {
        if (!record(t)) {
            out.final_state = y;
            out.final_time = t;
            return out;
        }
        ++next;
    }

    cvec k1(n), y_new(n), err(n);
    p.rhs(t, y, k1);
    ++out.stats.rhs_evals;
    StepWorkspace ws(n);

    const double span = p.t1 - p.t0;
    double h = o.initial_step > 0.0 ? std::min(o.initial_step, span)
                                    : detail::initial_step(p.rhs, t, y, k1, span, o, out.stats);

    constexpr double beta = 0.04;
    constexpr double expo = 0.2 - 0.75 * beta;
    constexpr double safety = 0.9;
    double err_old = 1e-4;

    while (t < p.t1) {
        if (out.stats.steps + out.stats.rejected >= o.max_steps)
            throw IntegrationError("integrate_adaptive: step budget exhausted", t);
        const double target = next < p.sample_times.size() ? p.sample_times[next] : p.t1;
        bool clipped = false;
        double h_step = h;
        // Stretch slightly rather than leave a sliver before the target.
        if (t + 1.01 * h_step >= target) {
            h_step = target - t;
            clipped = true;
        }
        if (h_step < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span * 1e-3))
            throw IntegrationError("integrate_adaptive: step size underflow", t);

        step_dopri5(p.rhs, t, y, k1, h_step, y_new, err, ws);
        out.stats.rhs_evals += 6;
        const double e = error_norm(err, y, y_new, o.rtol, o.atol);

        if (std::isfinite(e) && e <= 1.0) {
            ++out.stats.steps;
            const double fac = std::clamp(safety * std::pow(std::max(e, 1e-10), -expo) * std::pow(err_old, beta),
                                          0.2, 10.0);
            err_old = std::max(e, 1e-4);
            y.swap(y_new);
            k1.swap(ws.k7);
            t = clipped ? target : t + h_step;
            const double h_next = h_step * fac;
            h = clipped ? std::max(h, h_next) : h_next;
            while (next < p.sample_times.size() && p.sample_times[next] <= t) {
                if (!record(p.sample_times[next])) {
                    out.final_state = y;
                    out.final_time = p.sample_times[next];
                    out.next_step = h;
                    return out;
                }
                ++next;
            }
        } else {
            ++out.stats.rejected;
            const double fac = std::isfinite(e) ? std::clamp(safety * std::pow(e, -expo), 0.2, 1.0) : 0.2;
            h = h_step * fac;
        }
    }
    out.final_state = y;
    out.final_time = t;
    out.next_step = h;
    return out;
}

/// Fixed-step Dormand-Prince (fifth-order solution, no error control).
inline cvec integrate_fixed(const RhsFunction& f, const cvec& y0, double t0, double t1, long steps) {
    if (steps < 1) throw DomainError("integrate_fixed: need at least one step");
    const double h = (t1 - t0) / static_cast<double>(steps);
    cvec y = y0, k1(y0.size()), y_new(y0.size()), err(y0.size());
    StepWorkspace ws(y0.size());
    f(t0, y, k1);
    for (long s = 0; s < steps; ++s) {
        const double t = t0 + static_cast<double>(s) * h;
        step_dopri5(f, t, y, k1, h, y_new, err, ws);
        y.swap(y_new);
        k1.swap(ws.k7);
    }
    return y;
}

/// `count` evenly spaced times on [t0, t1], both ends included.
inline std::vector<double> linspace(double t0, double t1, int count) {
    std::vector<double> ts(static_cast<size_t>(std::max(count, 0)));
    if (count == 1) ts[0] = t0;
    for (int i = 0; i < count && count > 1; ++i)
        ts[static_cast<size_t>(i)] = i == count - 1 ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / (count - 1);
    return ts;
}

}  // namespace optodimer::ode

#endif
