#pragma once

// Self-consistent operating point with the effective detuning pinned to the
// transformed mechanical frequency, Delta' = Omega_m(beta_s). Omega_m depends
// on beta_s through the enhanced Duffing parameter, so beta_s, Delta' and r
// are solved together.

#include <cmath>
#include <string>

#include "optomech/errors.hpp"
#include "optomech/params.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

struct OptimalDetuningOptions {
    double relaxation = 0.5;
    int max_iterations = 200;
    double tol = 1e-10;  // relative change in beta_s
    int bisection_iterations = 200;
};

struct OptimalDetuning {
    double beta = 0.0;
    double eff_detuning = 0.0;  // Delta' = Omega_m
    double detuning = 0.0;      // bare Delta = Delta' + 2 g beta_s
    int iterations = 0;
    bool used_bisection = false;
    double residual = 0.0;      // |f(beta)| / (g eps^2 / kbar^2 scale)
};

namespace detail {

inline double omega_m_of_beta(const NormalizedParams& p, double beta) {
    return std::sqrt(1.0 + 12.0 * p.duffing * (1.0 + 4.0 * beta * beta));
}

// Radiation-pressure side g alpha_s^2 with Delta' = Omega_m(beta).
inline double pressure_at(const NormalizedParams& p, double beta) {
    const double dd = omega_m_of_beta(p, beta) - p.opa_detuning();
    const double kb = p.net_loss();
    return p.g * p.epsilon * p.epsilon / (dd * dd + kb * kb);
}

// Unique real root of 16 lambda x^3 + w x = rhs (monotone in x).
inline double invert_restoring(const NormalizedParams& p, double rhs) {
    const double w = 1.0 + 12.0 * p.duffing;
    const double a = 16.0 * p.duffing;
    if (a == 0.0) return rhs / w;
    const double pp = w / a;
    const double qq = -rhs / a;
    const double disc = std::sqrt(qq * qq / 4.0 + pp * pp * pp / 27.0);
    double x = std::cbrt(-qq / 2.0 + disc) + std::cbrt(-qq / 2.0 - disc);
    for (int i = 0; i < 3; ++i) x -= (a * x * x * x + w * x - rhs) / (3.0 * a * x * x + w);
    return x;
}

inline double constraint_residual(const NormalizedParams& p, double beta) {
    const double w = 1.0 + 12.0 * p.duffing;
    return 16.0 * p.duffing * beta * beta * beta + w * beta - pressure_at(p, beta);
}

}  // namespace detail

/// Solves 16 lambda b^3 + (1 + 12 lambda) b = g eps^2 / ((Omega_m(b) - Delta_p)^2 + kbar^2)
/// by damped fixed-point iteration, falling back to bisection in beta_s
/// (the residual is increasing in beta_s).
[[nodiscard]] inline OptimalDetuning solve_optimal_detuning(const NormalizedParams& p,
                                                            const OptimalDetuningOptions& opt = {}) {
    OptimalDetuning out;
    const double kb = p.net_loss();
    const double scale = std::max(std::abs(detail::pressure_at(p, 0.0)), 1e-300);
    double beta = detail::invert_restoring(p, detail::pressure_at(p, 0.0));
    bool ok = false;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const double target = detail::invert_restoring(p, detail::pressure_at(p, beta));
        const double next = (1.0 - opt.relaxation) * beta + opt.relaxation * target;
        out.iterations = it;
        const double change = std::abs(next - beta);
        beta = next;
        if (!std::isfinite(beta)) break;
        if (change <= opt.tol * std::max(1.0, std::abs(beta))) {
            ok = std::abs(detail::constraint_residual(p, beta)) <= 1e-8 * scale + 1e-12;
            if (ok) break;
        }
    }
    if (!ok) {
        if (kb == 0.0) throw Error("solve_optimal_detuning: kbar = 0, constraint has no bracket");
        double lo = 0.0;
        double hi = std::max(1.0, p.g * p.epsilon * p.epsilon / ((1.0 + 12.0 * p.duffing) * kb * kb));
        for (int i = 0; i < opt.bisection_iterations && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (detail::constraint_residual(p, mid) > 0.0 ? hi : lo) = mid;
        }
        beta = 0.5 * (lo + hi);
        out.used_bisection = true;
    }
    out.beta = beta;
    out.eff_detuning = detail::omega_m_of_beta(p, beta);
    out.detuning = out.eff_detuning + 2.0 * p.g * beta;
    out.residual = std::abs(detail::constraint_residual(p, beta)) / scale;
    return out;
}

/// Parameters with the bare detuning moved to the optimal point, plus the
/// matching branch.
struct OptimalOperatingPoint {
    NormalizedParams params;
    SteadyStateBranch branch;
    OptimalDetuning solve;
};

[[nodiscard]] inline OptimalOperatingPoint optimal_operating_point(const NormalizedParams& p,
                                                                   const SolveOptions& sopt = {},
                                                                   const OptimalDetuningOptions& opt = {}) {
    OptimalOperatingPoint op;
    op.solve = solve_optimal_detuning(p, opt);
    op.params = p;
    op.params.detuning = op.solve.detuning;
    op.branch = make_branch(op.params, op.solve.beta, sopt);
    return op;
}

}  // namespace optomech
