#pragma once

// Squeezed-frame quantities, the 4x4 drift matrix of the quadrature
// fluctuations (x, y, q, p), and two independent stability tests on it:
// drift-matrix eigenvalues (ground truth) and the Routh-Hurwitz s-conditions.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "optomech/params.hpp"
#include "optomech/types.hpp"

namespace optomech {

/// Frame quantities for mechanical amplitude beta and intracavity amplitude alpha.
[[nodiscard]] inline TransformedFrame transform_frame(double beta, double alpha, const NormalizedParams& p) {
    TransformedFrame f;
    f.enhanced_duffing = 3.0 * p.duffing * (1.0 + 4.0 * beta * beta);
    f.squeeze = 0.25 * std::log1p(4.0 * f.enhanced_duffing);
    f.mech_freq = std::exp(2.0 * f.squeeze);
    f.coupling = 2.0 * p.g * alpha;
    f.coupling_eff = std::exp(-f.squeeze) * f.coupling;
    f.opa_detuning = p.opa_detuning();
    f.opa_damping = p.opa_damping();
    return f;
}

[[nodiscard]] inline TransformedFrame transform_frame(const SteadyStateBranch& b, const NormalizedParams& p) {
    return transform_frame(b.beta, b.alpha, p);
}

/// Frame fixed by its squeezing parameter r instead of a Duffing strength.
[[nodiscard]] inline TransformedFrame frame_from_squeeze(double r, double coupling, double opa_gain,
                                                         double opa_phase) {
    TransformedFrame f;
    f.squeeze = r;
    f.enhanced_duffing = 0.25 * std::expm1(4.0 * r);
    f.mech_freq = std::exp(2.0 * r);
    f.coupling = coupling;
    f.coupling_eff = std::exp(-r) * coupling;
    f.opa_detuning = 2.0 * opa_gain * std::sin(opa_phase);
    f.opa_damping = 2.0 * opa_gain * std::cos(opa_phase);
    return f;
}

[[nodiscard]] inline LinearizedSystem linearize(const TransformedFrame& frame, double eff_detuning,
                                                const NormalizedParams& p) {
    LinearizedSystem s;
    s.frame = frame;
    s.detuning = eff_detuning;
    s.kappa = p.kappa;
    s.gamma = p.gamma;
    s.opa_gain = p.opa_gain;
    s.n_mech = p.n_mech;
    s.n_phot = p.n_phot;
    return s;
}

[[nodiscard]] inline LinearizedSystem linearize(const SteadyStateBranch& b, const NormalizedParams& p) {
    return linearize(transform_frame(b, p), b.eff_detuning, p);
}

/// Drift matrix of the transformed-frame quadratures, order (x, y, q, p).
[[nodiscard]] inline Eigen::Matrix4d drift_matrix(const LinearizedSystem& s) {
    const auto& f = s.frame;
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    a(0, 0) = -(s.kappa - f.opa_damping);
    a(0, 1) = s.detuning + f.opa_detuning;
    a(1, 0) = -(s.detuning - f.opa_detuning);
    a(1, 1) = -(s.kappa + f.opa_damping);
    a(1, 2) = f.coupling_eff;
    a(2, 2) = -s.gamma;
    a(2, 3) = f.mech_freq;
    a(3, 0) = f.coupling_eff;
    a(3, 2) = -f.mech_freq;
    a(3, 3) = -s.gamma;
    return a;
}

[[nodiscard]] inline Eigen::Matrix4d build_drift(const TransformedFrame& frame, const SteadyStateBranch& b,
                                                 const NormalizedParams& p) {
    return drift_matrix(linearize(frame, b.eff_detuning, p));
}

/// Real parts at or above -marginal_tol are not counted as decaying.
inline constexpr double marginal_tol = 1e-12;

[[nodiscard]] inline std::array<std::complex<double>, 4> drift_eigenvalues(const Eigen::Matrix4d& a) {
    Eigen::EigenSolver<Eigen::Matrix4d> solver(a, false);
    std::array<std::complex<double>, 4> ev{};
    for (int i = 0; i < 4; ++i) ev[i] = solver.eigenvalues()[i];
    std::sort(ev.begin(), ev.end(), [](auto x, auto y) {
        return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    return ev;
}

/// The three Routh-Hurwitz quantities. Together with kappa + gamma > 0 they are
/// exactly the Hurwitz minors of the drift characteristic polynomial:
/// Delta_2 = 2 s1, Delta_3 = 4 s3 and a_4 = s2.
struct RouthHurwitzTerms {
    double s1, s2, s3;
};

[[nodiscard]] inline RouthHurwitzTerms routh_hurwitz_terms(const LinearizedSystem& s) {
    const double k = s.kappa;
    const double g = s.gamma;
    const double om2 = s.frame.mech_freq * s.frame.mech_freq;  // e^{4r} omega_m^2
    const double stiff = s.optical_stiffness();
    // omega_m G^2 (Delta' + Delta_p); omega_m = 1 in normalised units.
    const double drive = s.frame.coupling * s.frame.coupling * s.red_detuning();
    RouthHurwitzTerms t{};
    t.s1 = g * ((2.0 * k + g) * (2.0 * k + g) + om2) + k * stiff;
    t.s2 = stiff * (om2 + g * g) - drive;
    const double inner = stiff - om2 + g * (g + 2.0 * k);
    t.s3 = g * k * (inner * inner + 4.0 * (g + k) * (g + k) * om2) + (g + k) * (g + k) * drive;
    return t;
}

[[nodiscard]] inline StabilityVerdict routh_hurwitz(const LinearizedSystem& s) {
    StabilityVerdict v;
    const auto t = routh_hurwitz_terms(s);
    v.s1 = t.s1;
    v.s2 = t.s2;
    v.s3 = t.s3;
    v.rh_stable = t.s1 > 0.0 && t.s2 > 0.0 && t.s3 > 0.0 && (s.kappa + s.gamma) > 0.0;
    v.eigenvalues = drift_eigenvalues(drift_matrix(s));
    v.max_real = v.eigenvalues[0].real();
    if (v.max_real < -marginal_tol)
        v.eigen_class = EigenStability::stable;
    else if (v.max_real <= marginal_tol)
        v.eigen_class = EigenStability::marginal;
    else
        v.eigen_class = EigenStability::unstable;
    v.eigen_stable = v.eigen_class == EigenStability::stable;
    const double red = s.red_detuning();
    v.regime_sign = red > 0.0 ? 1 : (red < 0.0 ? -1 : 0);
    return v;
}

}  // namespace optomech
