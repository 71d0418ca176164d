#pragma once

// Mean-field steady states: every real root beta_s of the quintic amplitude
// equation becomes a SteadyStateBranch with its intracavity amplitude and a
// stability verdict.

#include <array>
#include <cmath>
#include <vector>

#include "optomech/params.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/stability.hpp"
#include "optomech/types.hpp"

namespace optomech {

using Quintic = std::array<double, 6>;

/// Coefficients (descending degree) of the quintic in beta_s obtained by
/// eliminating alpha_s between the two stationary mean-field equations:
///   (16 lambda b^3 + (1 + 12 lambda) b) ((d0 - 2 g b)^2 + kbar^2) - g eps^2 = 0
/// with d0 = Delta - 2 G0 sin(theta) and kbar = kappa - 2 G0 cos(theta).
[[nodiscard]] inline Quintic quintic_coefficients(const NormalizedParams& p) {
    const double g = p.g;
    const double lam = p.duffing;
    const double d0 = p.shifted_detuning();
    const double kb = p.net_loss();
    const double w = 1.0 + 12.0 * lam;
    const double loss = d0 * d0 + kb * kb;
    return {
        64.0 * g * g * lam,
        -64.0 * g * lam * d0,
        4.0 * (g * g * w + 4.0 * lam * loss),
        -4.0 * g * w * d0,
        w * loss,
        -g * p.epsilon * p.epsilon,
    };
}

/// |quintic(beta)| / max |coefficient|.
[[nodiscard]] inline double quintic_residual(const NormalizedParams& p, double beta) {
    const Quintic c = quintic_coefficients(p);
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    return std::abs(poly::evaluate(std::span<const double>(c), beta)) / scale;
}

/// Intracavity amplitude alpha_s >= 0 for mechanical amplitude beta.
[[nodiscard]] inline double cavity_amplitude(const NormalizedParams& p, double beta) {
    const double dd = p.shifted_detuning() - 2.0 * p.g * beta;
    const double kb = p.net_loss();
    return p.epsilon / std::sqrt(dd * dd + kb * kb);
}

struct SolveOptions {
    double tol_imag = 1e-8;
    double tol_degenerate = 1e-6;
    double beta_threshold = 40.0;
    double ratio_threshold = 0.1;
};

[[nodiscard]] inline LinearizationValidity linearization_validity(const NormalizedParams& p, double beta,
                                                                  const TransformedFrame& f,
                                                                  const SolveOptions& opt = {}) {
    LinearizationValidity v;
    v.beta_threshold = opt.beta_threshold;
    v.ratio_threshold = opt.ratio_threshold;
    const double lb = p.duffing * std::abs(beta);
    v.duffing_to_enhanced = f.enhanced_duffing > 0.0 ? lb / f.enhanced_duffing : 0.0;
    v.duffing_to_coupling = f.coupling > 0.0 ? lb / f.coupling : (lb > 0.0 ? INFINITY : 0.0);
    v.beta_large = beta >= opt.beta_threshold;
    v.duffing_small = v.duffing_to_enhanced <= opt.ratio_threshold && v.duffing_to_coupling <= opt.ratio_threshold;
    return v;
}

/// Branch at a given beta (assumed to solve the quintic) with stability filled in.
[[nodiscard]] inline SteadyStateBranch make_branch(const NormalizedParams& p, double beta,
                                                   const SolveOptions& opt = {}) {
    SteadyStateBranch b;
    b.beta = beta;
    b.alpha = cavity_amplitude(p, beta);
    b.intensity = b.alpha * b.alpha;
    b.eff_detuning = p.detuning - 2.0 * p.g * beta;
    b.frame = transform_frame(beta, b.alpha, p);
    b.verdict = routh_hurwitz(linearize(b.frame, b.eff_detuning, p));
    b.eigenvalues = b.verdict.eigenvalues;
    b.stable = b.verdict.eigen_stable;
    b.validity = linearization_validity(p, beta, b.frame, opt);
    return b;
}

/// All real steady states sorted by beta_s ascending (at most five).
[[nodiscard]] inline std::vector<SteadyStateBranch> solve_branches(const NormalizedParams& p,
                                                                   const SolveOptions& opt = {}) {
    const Quintic c = quintic_coefficients(p);
    const auto rr = poly::real_roots(std::span<const double>(c), {opt.tol_imag, opt.tol_degenerate});
    std::vector<SteadyStateBranch> out;
    out.reserve(rr.size());
    for (const auto& r : rr) {
        SteadyStateBranch b = make_branch(p, r.value, opt);
        b.near_degenerate = r.near_degenerate;
        out.push_back(b);
    }
    return out;
}

/// Number of positive real roots of the quintic (independent of branch construction).
[[nodiscard]] inline int count_steady_states(const NormalizedParams& p, const SolveOptions& opt = {}) {
    const Quintic c = quintic_coefficients(p);
    const auto rr = poly::real_roots(std::span<const double>(c), {opt.tol_imag, opt.tol_degenerate});
    return static_cast<int>(std::count_if(rr.begin(), rr.end(), [](const auto& r) { return r.value > 0.0; }));
}

}  // namespace optomech
