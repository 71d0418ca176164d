#pragma once

// Stationary second moments of the quadrature fluctuations and the derived
// observables. Two independent routes to the covariance:
//  - Lyapunov: A V + V A^T + D = 0 solved as a 16x16 linear system,
//  - spectral: closed-form transfer functions integrated over frequency.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/params.hpp"
#include "optomech/stability.hpp"
#include "optomech/types.hpp"

namespace optomech {

/// Symmetrised white-noise diffusion of the transformed-frame inputs, order (x, y, q, p).
[[nodiscard]] inline Eigen::Matrix4d diffusion_matrix(const LinearizedSystem& s) {
    const double r = s.frame.squeeze;
    const double opt = s.kappa * (2.0 * s.n_phot + 1.0);
    const double mech = s.gamma * (2.0 * s.n_mech + 1.0);
    Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
    d(0, 0) = opt;
    d(1, 1) = opt;
    d(2, 2) = mech * std::exp(2.0 * r);
    d(3, 3) = mech * std::exp(-2.0 * r);
    return d;
}

inline constexpr double lyapunov_residual_tol = 1e-10;

/// Unique symmetric solution of A V + V A^T + D = 0 for strictly stable A.
[[nodiscard]] inline Eigen::Matrix4d covariance_lyapunov(const Eigen::Matrix4d& a, const Eigen::Matrix4d& d) {
    const auto ev = drift_eigenvalues(a);
    if (!(ev[0].real() < -marginal_tol))
        throw NoStationaryState("no stationary state: drift matrix is not strictly stable (max Re = " +
                                std::to_string(ev[0].real()) + ")");
    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    Eigen::Matrix<double, 16, 16> k;
    // column-major vec: vec(A V) = (I kron A) vec V, vec(V A^T) = (A kron I) vec V
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = id(i, j) * a + a(i, j) * id;
    Eigen::Matrix<double, 16, 1> rhs;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) rhs(4 * c + r) = -d(r, c);
    const Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(k);
    Eigen::Matrix<double, 16, 1> sol = lu.solve(rhs);
    // one step of iterative refinement
    sol += lu.solve(rhs - k * sol);
    Eigen::Matrix4d v;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) v(r, c) = sol(4 * c + r);
    v = 0.5 * (v + v.transpose()).eval();
    const double resid = (a * v + v * a.transpose() + d).norm();
    if (!(resid <= lyapunov_residual_tol * std::max(d.norm(), 1e-300) * std::max(1.0, a.norm())))
        throw Error("covariance_lyapunov: residual " + std::to_string(resid) + " too large");
    return v;
}

/// Frequency-domain response of the transformed mechanical quadratures to the
/// four input noises. Each function includes the sqrt(2 kappa) or
/// sqrt(2 gamma) input coupling.
struct TransferFunctions {
    using cd = std::complex<double>;
    cd a1, a2, a3, a4;  // q response to x_in, y_in, q_in, p_in
    cd b1, b2, b3, b4;  // p response to x_in, y_in, q_in, p_in
    cd d;
    cd chi_inv;
};

[[nodiscard]] inline TransferFunctions transfer_functions(const LinearizedSystem& s, double omega) {
    using cd = std::complex<double>;
    const cd iw(0.0, omega);
    const auto& f = s.frame;
    const double er = std::exp(f.squeeze);
    const double e2r = f.mech_freq;
    const double g = s.gamma;
    const double k = s.kappa;
    const double red = s.red_detuning();
    const double G = f.coupling;
    const double sk = std::sqrt(2.0 * k);
    const double sg = std::sqrt(2.0 * g);
    const cd kw = k - iw;
    const cd gw = g - iw;
    const cd optical = s.detuning * s.detuning + kw * kw - 4.0 * s.opa_gain * s.opa_gain;

    TransferFunctions t;
    t.chi_inv = g * g - 2.0 * iw * g - omega * omega + e2r * e2r;
    t.d = optical * t.chi_inv - G * G * red;
    t.a1 = sk / t.d * er * G * (k + f.opa_damping - iw);
    t.a2 = sk / t.d * er * G * red;
    t.a3 = sg / t.d * gw * optical;
    t.a4 = e2r / gw * t.a3;
    t.b1 = gw / e2r * t.a1;
    t.b2 = sk / t.d / er * G * gw * red;
    t.b3 = sg / t.d * (G * G * red / (e2r) - e2r * optical);
    t.b4 = t.a3;
    return t;
}

struct SpectralOptions {
    double rel_tol = 1e-10;  // per-segment Gauss-Kronrod tolerance
    unsigned max_depth = 15;
};

struct SpectralCovariance {
    double qq = 0.0;
    double pp = 0.0;
    double qp = 0.0;            // symmetrised cross moment
    double cutoff = 0.0;        // W, start of the mapped tail
    double error_estimate = 0.0;
};

namespace detail {

struct SpectralDensity {
    double qq, pp, qp;
};

inline SpectralDensity spectral_density(const LinearizedSystem& s, double omega) {
    const auto t = transfer_functions(s, omega);
    const double r = s.frame.squeeze;
    const double nopt = 0.5 * (2.0 * s.n_phot + 1.0);
    const double nm = 0.5 * (2.0 * s.n_mech + 1.0);
    const std::array<double, 4> c{nopt, nopt, nm * std::exp(2.0 * r), nm * std::exp(-2.0 * r)};
    const std::array<std::complex<double>, 4> q{t.a1, t.a2, t.a3, t.a4};
    const std::array<std::complex<double>, 4> p{t.b1, t.b2, t.b3, t.b4};
    SpectralDensity out{0.0, 0.0, 0.0};
    for (int j = 0; j < 4; ++j) {
        out.qq += std::norm(q[j]) * c[j];
        out.pp += std::norm(p[j]) * c[j];
        out.qp += (q[j] * std::conj(p[j])).real() * c[j];
    }
    return out;
}

}  // namespace detail

/// q,p block of the transformed-frame covariance from the symmetrised spectra,
/// (1/2 pi) Int S(w) dw over the real line. The spectra are even in w, so the
/// half line is integrated and doubled.
[[nodiscard]] inline SpectralCovariance covariance_spectral(const LinearizedSystem& s,
                                                            const SpectralOptions& opt = {}) {
    using boost::math::quadrature::gauss_kronrod;
    const Eigen::Matrix4d a = drift_matrix(s);
    const auto ev = drift_eigenvalues(a);
    if (!(ev[0].real() < -marginal_tol))
        throw NoStationaryState("no stationary state: drift matrix is not strictly stable");

    // Breakpoints around every resonance, at several multiples of its width.
    std::vector<double> pts{0.0};
    for (const auto& z : ev) {
        const double c = std::abs(z.imag());
        const double w = std::abs(z.real());
        pts.push_back(c);
        for (double m : {0.01, 0.1, 1.0, 3.0, 10.0, 100.0}) {
            pts.push_back(c + m * w);
            if (c - m * w > 0.0) pts.push_back(c - m * w);
        }
    }
    double cutoff = 50.0 * std::max({s.frame.mech_freq, s.kappa, std::abs(s.detuning) + std::abs(s.frame.opa_detuning)});
    for (const double p : pts) cutoff = std::max(cutoff, 2.0 * p);

    SpectralCovariance res;
    auto integrate = [&](auto component, double lo, double hi, double& err) {
        std::vector<double> seg;
        for (double p : pts)
            if (p > lo && p < hi) seg.push_back(p);
        seg.push_back(lo);
        seg.push_back(hi);
        std::sort(seg.begin(), seg.end());
        seg.erase(std::unique(seg.begin(), seg.end()), seg.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
            const double mid = 0.5 * (seg[i] + seg[i + 1]);
            const double half = 0.5 * (seg[i + 1] - seg[i]);
            double e = 0.0;
            // Integrate on [-1, 1]: Boost's local error is not rescaled by the
            // interval width, so narrow segments would otherwise never converge.
            total += half * gauss_kronrod<double, 61>::integrate(
                             [&](double x) { return component(detail::spectral_density(s, mid + half * x)); },
                             -1.0, 1.0, opt.max_depth, opt.rel_tol, &e);
            err += half * e;
        }
        return total;
    };

    const auto qq = [](const detail::SpectralDensity& x) { return x.qq; };
    const auto pp = [](const detail::SpectralDensity& x) { return x.pp; };
    const auto qp = [](const detail::SpectralDensity& x) { return x.qp; };

    // Beyond the last resonance S(w) ~ C / w^2, so w = 1/t maps [W, inf) onto a
    // smooth integrand on (0, 1/W].
    auto tail = [&](auto component, double& err) {
        const double half = 0.5 / cutoff;
        double e = 0.0;
        const double v = half * gauss_kronrod<double, 61>::integrate(
                                    [&](double x) {
                                        const double t = half * (1.0 + x);
                                        return component(detail::spectral_density(s, 1.0 / t)) / (t * t);
                                    },
                                    -1.0, 1.0, opt.max_depth, opt.rel_tol, &e);
        err += half * e;
        return v;
    };

    double err = 0.0;
    const double iqq = integrate(qq, 0.0, cutoff, err) + tail(qq, err);
    const double ipp = integrate(pp, 0.0, cutoff, err) + tail(pp, err);
    const double iqp = integrate(qp, 0.0, cutoff, err) + tail(qp, err);
    if (!std::isfinite(iqq) || !std::isfinite(ipp))
        throw QuadratureError("covariance_spectral: non-finite integral (near-marginal stability?)");
    res.qq = iqq / pi;
    res.pp = ipp / pi;
    res.qp = iqp / pi;
    res.cutoff = cutoff;
    res.error_estimate = err / pi;
    return res;
}

enum class CovarianceMethod { lyapunov, spectral };

[[nodiscard]] inline const char* to_string(CovarianceMethod m) {
    return m == CovarianceMethod::lyapunov ? "lyapunov" : "spectral";
}

/// Bistability parameter eta.
[[nodiscard]] inline double bistability_parameter(const LinearizedSystem& s) {
    const double G = s.frame.coupling;
    const double e4r = s.frame.mech_freq * s.frame.mech_freq;
    return 1.0 - G * G * s.red_detuning() / (e4r * s.optical_stiffness());
}

struct FluctuationReport {
    double var_q = 0.0, var_p = 0.0;      // original frame
    double var_q_t = 0.0, var_p_t = 0.0;  // transformed frame
    double cov_qp_t = 0.0;
    double n_eff = 0.0, n_eff_t = 0.0;
    double T_eff = 0.0;                   // [K]
    double D_q = 0.0, D_p = 0.0;          // [dB]
    double eta = 0.0;
    bool clamped = false;                 // n_eff <= 0 was clamped to 0
    CovarianceMethod method = CovarianceMethod::lyapunov;
    LinearizationValidity validity;
};

/// Degree of squeezing in dB relative to the vacuum variance 1/2.
[[nodiscard]] inline double squeezing_db(double variance) { return -10.0 * std::log10(variance / 0.5); }

/// Mode temperature [K] of occupation n at angular frequency omega [rad/s].
[[nodiscard]] inline double effective_temperature(double n, double omega) {
    if (!(n > 0.0)) return 0.0;
    return PhysicalConstants::hbar * omega / (PhysicalConstants::k_B * std::log1p(1.0 / n));
}

/// Observables from the transformed-frame (q, p) moments. omega_m_si is the
/// mechanical frequency in rad/s, needed for T_eff only.
[[nodiscard]] inline FluctuationReport make_report(const LinearizedSystem& s, double vqq, double vpp, double vqp,
                                                   CovarianceMethod method, double omega_m_si) {
    FluctuationReport rep;
    const double r = s.frame.squeeze;
    rep.method = method;
    rep.var_q_t = vqq;
    rep.var_p_t = vpp;
    rep.cov_qp_t = vqp;
    rep.n_eff_t = 0.5 * (vqq + vpp - 1.0);
    rep.var_q = std::exp(-2.0 * r) * vqq;
    rep.var_p = std::exp(2.0 * r) * vpp;
    rep.n_eff = 0.5 * (rep.var_q + rep.var_p - 1.0);
    if (!(rep.n_eff > 0.0)) {
        rep.n_eff = 0.0;
        rep.clamped = true;
    }
    rep.T_eff = effective_temperature(rep.n_eff, omega_m_si);
    rep.D_q = squeezing_db(rep.var_q);
    rep.D_p = squeezing_db(rep.var_p);
    rep.eta = bistability_parameter(s);
    return rep;
}

[[nodiscard]] inline FluctuationReport fluctuation_report(const LinearizedSystem& s, CovarianceMethod method,
                                                          double omega_m_si) {
    if (method == CovarianceMethod::lyapunov) {
        const Eigen::Matrix4d v = covariance_lyapunov(drift_matrix(s), diffusion_matrix(s));
        return make_report(s, v(2, 2), v(3, 3), v(2, 3), method, omega_m_si);
    }
    const auto c = covariance_spectral(s);
    return make_report(s, c.qq, c.pp, c.qp, method, omega_m_si);
}

[[nodiscard]] inline FluctuationReport fluctuation_report(const SteadyStateBranch& b, const NormalizedParams& p,
                                                          CovarianceMethod method = CovarianceMethod::lyapunov) {
    FluctuationReport rep = fluctuation_report(linearize(b, p), method, p.scale.omega_m);
    rep.validity = b.validity;
    return rep;
}

struct ApproxVariances {
    double var_q = 0.0;
    double var_p = 0.0;
    double eta = 0.0;
    bool high_quality = false;   // Q_m = 1 / gamma >= quality_threshold
    bool low_temperature = false;  // kappa >= ratio_threshold * gamma n_m
};

/// Closed-form variances valid for large Q_m and kappa >> gamma n_m.
[[nodiscard]] inline ApproxVariances approx_variances(const LinearizedSystem& s, double quality_threshold = 1e3,
                                                      double ratio_threshold = 100.0) {
    ApproxVariances a;
    const double r = s.frame.squeeze;
    const double red = s.red_detuning();
    const double kk = s.kappa + s.frame.opa_damping;
    const double e2r = std::exp(2.0 * r);
    a.eta = bistability_parameter(s);
    a.var_q = 1.0 / (4.0 * red) + std::exp(-4.0 * r) * (red * red + kk * kk) / (4.0 * a.eta * red);
    a.var_p = 0.5 * e2r + ((red - e2r) * (red - e2r) + kk * kk) / (4.0 * red);
    a.high_quality = s.gamma > 0.0 && 1.0 / s.gamma >= quality_threshold;
    a.low_temperature = s.kappa >= ratio_threshold * s.gamma * s.n_mech;
    return a;
}

/// Optimal effective detuning for cooling at eta ~ 1: -Delta_p + sqrt(1 + (kappa + kappa_p)^2).
[[nodiscard]] inline double optimal_cooling_detuning(double kappa_eff, double opa_detuning) {
    return -opa_detuning + std::sqrt(1.0 + kappa_eff * kappa_eff);
}

/// Small-r series of n_eff at the optimal cooling detuning; kappa_eff = (kappa + kappa_p) / omega_m.
[[nodiscard]] inline double neff_series(double kappa_eff, double r) {
    const double k2 = kappa_eff * kappa_eff;
    const double s = std::sqrt(1.0 + k2);
    const double r2 = r * r;
    return -0.5 + 0.5 * s * (1.0 + 4.0 * r2 + 16.0 / 3.0 * r2 * r2) -
           k2 / s * (r + 8.0 / 3.0 * r * r2 + 32.0 / 15.0 * r * r2 * r2);
}

[[nodiscard]] inline double optimal_squeeze(double kappa_eff) {
    const double k2 = kappa_eff * kappa_eff;
    return 0.25 * k2 / (k2 + 1.0);
}

[[nodiscard]] inline double minimum_neff(double kappa_eff) {
    const double k2 = kappa_eff * kappa_eff;
    const double s = std::sqrt(1.0 + k2);
    return 0.5 * (s - 1.0) - k2 * k2 / (8.0 * s * s * s);
}

}  // namespace optomech
