#pragma once

// Deterministic mean-field dynamics of the cavity amplitude a and mirror
// amplitude b (normal-ordered cubic, semiclassical factorisation), integrated
// with an adaptive Dormand-Prince stepper, and attractor matching against the
// steady-state branches.

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "optomech/errors.hpp"
#include "optomech/params.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/types.hpp"

namespace optomech {

using OdeState = std::array<double, 4>;  // Re a, Im a, Re b, Im b

struct MeanFieldState {
    std::complex<double> a;
    std::complex<double> b;
};

[[nodiscard]] inline OdeState pack(const MeanFieldState& s) {
    return {s.a.real(), s.a.imag(), s.b.real(), s.b.imag()};
}

[[nodiscard]] inline MeanFieldState unpack(const OdeState& s) {
    return {{s[0], s[1]}, {s[2], s[3]}};
}

/// Right-hand side in units of omega_m, drive amplitude real and positive.
///   da/dt = -i Delta a + i g x a + 2 G0 e^{i theta} a* + eps - kappa a
///   db/dt = -i b - 2 i lambda (x^3 + 3 x) + i g |a|^2 - gamma b,  x = 2 Re b
[[nodiscard]] inline MeanFieldState mean_field_rhs(const NormalizedParams& p, const MeanFieldState& s) {
    using namespace std::complex_literals;
    const double x = 2.0 * s.b.real();
    const std::complex<double> pump = 2.0 * p.opa_gain * std::exp(1i * p.opa_phase);
    MeanFieldState d;
    d.a = -1i * p.detuning * s.a + 1i * p.g * x * s.a + pump * std::conj(s.a) + p.epsilon - p.kappa * s.a;
    d.b = -1i * s.b - 2i * p.duffing * (x * x * x + 3.0 * x) + 1i * p.g * std::norm(s.a) - p.gamma * s.b;
    return d;
}

struct MeanFieldOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double overflow_guard = 1e12;  // |state| above this counts as divergence
};

struct TrajectoryPoint {
    double t = 0.0;
    MeanFieldState state;
};

/// Samples the trajectory at multiples of dt up to t_end. Stops early (last
/// sample beyond the guard) if the state diverges.
[[nodiscard]] inline std::vector<TrajectoryPoint> integrate_mean_field(const NormalizedParams& p,
                                                                      const MeanFieldState& initial,
                                                                      double t_end, double dt,
                                                                      const MeanFieldOptions& opt = {}) {
    namespace ode = boost::numeric::odeint;
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidParameter("integrate_mean_field: need dt > 0, t_end >= 0");
    auto rhs = [&p](const OdeState& s, OdeState& ds, double) { ds = pack(mean_field_rhs(p, unpack(s))); };
    auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<OdeState>());

    std::vector<TrajectoryPoint> out;
    OdeState s = pack(initial);
    out.push_back({0.0, initial});
    stepper.initialize(s, 0.0, dt);
    const auto steps = static_cast<long>(std::floor(t_end / dt + 1e-9));
    for (long k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (stepper.current_time() < t) stepper.do_step(rhs);
        OdeState x{};
        stepper.calc_state(t, x);
        out.push_back({t, unpack(x)});
        const double mag = std::hypot(std::hypot(x[0], x[1]), std::hypot(x[2], x[3]));
        if (!std::isfinite(mag) || mag > opt.overflow_guard) break;
    }
    return out;
}

/// Exact fixed points of the mean-field ODE (G0 = 0 or alpha_s real). The
/// mechanical damping adds gamma^2 to the linear stiffness of the quintic;
/// the stationary analysis drops this term.
[[nodiscard]] inline std::vector<SteadyStateBranch> ode_fixed_points(const NormalizedParams& p,
                                                                     const SolveOptions& opt = {}) {
    Quintic c = quintic_coefficients(p);
    const double w = 1.0 + 12.0 * p.duffing;
    const double wd = w + p.gamma * p.gamma;
    // coefficients carrying the linear stiffness w
    c[2] += 4.0 * p.g * p.g * (wd - w);
    c[3] *= wd / w;
    c[4] *= wd / w;
    const auto rr = poly::real_roots(std::span<const double>(c), {opt.tol_imag, opt.tol_degenerate});
    std::vector<SteadyStateBranch> out;
    for (const auto& r : rr) {
        SteadyStateBranch b = make_branch(p, r.value, opt);
        b.near_degenerate = r.near_degenerate;
        out.push_back(b);
    }
    return out;
}

enum class AttractorStatus { fixed_point, diverged, not_converged };

[[nodiscard]] inline const char* to_string(AttractorStatus s) {
    switch (s) {
        case AttractorStatus::fixed_point: return "fixed point";
        case AttractorStatus::diverged: return "no attractor from this seed";
        case AttractorStatus::not_converged: return "not converged";
    }
    return "?";
}

struct AttractorOptions {
    MeanFieldOptions ode;
    double chunk = 50.0;       // integration chunk between convergence checks
    double max_dt = 0.5;       // step cap; uncapped steps sit at the stability edge and never settle
    double t_max = 2.0e5;
    double rhs_tol = 1e-7;     // |rhs| <= rhs_tol (1 + |state|) ends the integration
    int newton_iterations = 30;  // polishing of the end point
    double match_tol = 1e-6;   // |beta - beta_branch| <= match_tol max(1, |beta|)
};

struct AttractorResult {
    AttractorStatus status = AttractorStatus::not_converged;
    MeanFieldState state;
    double t = 0.0;
    double beta = 0.0;          // Re b at the end point
    int matched_branch = -1;    // index into the branch list, -1 if none
    bool matched_stable = false;
};

namespace detail {

// Newton iterations on rhs = 0 with a central-difference Jacobian. The
// integrator only gets within its own tolerance of the rest point.
inline OdeState polish_fixed_point(const NormalizedParams& p, OdeState s, int iterations) {
    auto f = [&p](const OdeState& v) { return pack(mean_field_rhs(p, unpack(v))); };
    for (int it = 0; it < iterations; ++it) {
        const OdeState f0 = f(s);
        Eigen::Matrix4d jac;
        for (int j = 0; j < 4; ++j) {
            const double h = 1e-7 * (1.0 + std::abs(s[j]));
            OdeState up = s, dn = s;
            up[j] += h;
            dn[j] -= h;
            const OdeState fu = f(up), fd = f(dn);
            for (int i = 0; i < 4; ++i) jac(i, j) = (fu[i] - fd[i]) / (2.0 * h);
        }
        const Eigen::Vector4d step = jac.fullPivLu().solve(-Eigen::Vector4d(f0[0], f0[1], f0[2], f0[3]));
        if (!step.allFinite()) break;
        double scale = 1.0;
        for (int i = 0; i < 4; ++i) {
            s[i] += step(i);
            scale = std::max(scale, std::abs(s[i]));
        }
        if (step.norm() <= 1e-14 * scale) break;
    }
    return s;
}

}  // namespace detail

/// Integrates from `initial` until the flow comes to rest, then looks for the
/// branch whose beta_s and alpha_s match the end point.
[[nodiscard]] inline AttractorResult find_attractor(const NormalizedParams& p, const MeanFieldState& initial,
                                                    const std::vector<SteadyStateBranch>& branches,
                                                    const AttractorOptions& opt = {}) {
    namespace ode = boost::numeric::odeint;
    auto rhs = [&p](const OdeState& s, OdeState& ds, double) { ds = pack(mean_field_rhs(p, unpack(s))); };
    auto stepper =
        ode::make_controlled(opt.ode.abs_tol, opt.ode.rel_tol, opt.max_dt, ode::runge_kutta_dopri5<OdeState>());

    AttractorResult res;
    OdeState s = pack(initial);
    double t = 0.0;
    double dt = 1e-2;
    auto norm4 = [](const OdeState& v) { return std::hypot(std::hypot(v[0], v[1]), std::hypot(v[2], v[3])); };
    while (t < opt.t_max) {
        const double t_stop = t + opt.chunk;
        while (t < t_stop) {
            dt = std::min(dt, t_stop - t);
            if (stepper.try_step(rhs, s, t, dt) == ode::fail) continue;
            const double mag = norm4(s);
            if (!std::isfinite(mag) || mag > opt.ode.overflow_guard) {
                res.status = AttractorStatus::diverged;
                res.state = unpack(s);
                res.t = t;
                return res;
            }
        }
        OdeState f{};
        rhs(s, f, t);
        if (norm4(f) <= opt.rhs_tol * (1.0 + norm4(s))) {
            res.status = AttractorStatus::fixed_point;
            break;
        }
    }
    if (res.status == AttractorStatus::fixed_point) s = detail::polish_fixed_point(p, s, opt.newton_iterations);
    res.state = unpack(s);
    res.t = t;
    res.beta = res.state.b.real();
    if (res.status != AttractorStatus::fixed_point) return res;

    const double alpha = std::abs(res.state.a);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const double db = std::abs(res.beta - branches[i].beta);
        const double da = std::abs(alpha - branches[i].alpha);
        if (db <= opt.match_tol * std::max(1.0, std::abs(res.beta)) &&
            da <= opt.match_tol * std::max(1.0, alpha) && db < best) {
            best = db;
            res.matched_branch = static_cast<int>(i);
            res.matched_stable = branches[i].stable;
        }
    }
    return res;
}

}  // namespace optomech
