#pragma once

// Critical surface for the onset of multistability. Three routes:
//  - exact: roots of the discriminant Delta_quad(beta^2) of Q[d0] = 0,
//  - perturbative: closed-form series in kbar and lambda / omega_m,
//  - harmonic: the lambda = 0 limit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "optomech/errors.hpp"
#include "optomech/params.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/types.hpp"

namespace optomech {

enum class CriticalMethod { exact, perturbative, harmonic };

[[nodiscard]] inline const char* to_string(CriticalMethod m) {
    switch (m) {
        case CriticalMethod::exact: return "exact";
        case CriticalMethod::perturbative: return "perturbative";
        case CriticalMethod::harmonic: return "harmonic";
    }
    return "?";
}

struct CriticalValues {
    double beta = 0.0;       // beta_s^crit
    double detuning = 0.0;   // Delta^crit / omega_m
    double power = 0.0;      // P_in^crit [W]
    CriticalMethod method = CriticalMethod::exact;
    bool trusted = true;     // false when the series is evaluated outside its range
    double series_parameter = 0.0;  // 16 kbar^2 lambda / omega_m
};

/// Coefficients of Delta_quad = R3 y^3 + R2 y^2 + R1 y + R0 with y = beta_s^2,
/// plus the discriminant of that cubic.
struct CriticalIntermediate {
    double R3 = 0.0, R2 = 0.0, R1 = 0.0, R0 = 0.0;
    double cubic_discriminant = 0.0;

    [[nodiscard]] double discriminant_at(double beta) const {
        const double y = beta * beta;
        return ((R3 * y + R2) * y + R1) * y + R0;
    }
    /// Sum of the magnitudes of the individual terms; scale for relative checks.
    [[nodiscard]] double discriminant_scale(double beta) const {
        const double y = beta * beta;
        return std::abs(R3 * y * y * y) + std::abs(R2 * y * y) + std::abs(R1 * y) + std::abs(R0);
    }
};

[[nodiscard]] inline CriticalIntermediate critical_intermediate(const NormalizedParams& p) {
    const double g = p.g;
    const double lam = p.duffing;
    const double kb = p.net_loss();
    const double w = 1.0 + 12.0 * lam;
    CriticalIntermediate c;
    c.R3 = 1024.0 * g * g * lam * lam;
    c.R2 = 128.0 * lam * (g * g * w - 18.0 * lam * kb * kb);
    c.R1 = 4.0 * w * (g * g * w - 24.0 * lam * kb * kb);
    c.R0 = -kb * kb * w * w;
    if (c.R3 != 0.0) {
        // p^3 + q^2 = -disc / 108 for the monic cubic. Taken from the roots:
        // the two lower roots nearly coincide at small lambda and the textbook
        // form cancels to zero in double precision.
        const std::array<double, 4> cubic{c.R3, c.R2, c.R1, c.R0};
        const auto z = poly::roots(std::span<const double>(cubic));
        std::complex<double> disc = 1.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = i + 1; j < z.size(); ++j) disc *= (z[i] - z[j]) * (z[i] - z[j]);
        c.cubic_discriminant = -disc.real() / 108.0;
    }
    return c;
}

/// Bare detuning (units of omega_m) at which Q[d0] vanishes for amplitude beta,
/// taking the root without the radical.
[[nodiscard]] inline double critical_detuning_at(const NormalizedParams& p, double beta) {
    const double g = p.g;
    const double lam = p.duffing;
    const double w = 1.0 + 12.0 * lam;
    return p.opa_detuning() + (128.0 * beta * beta * beta * g * lam + 4.0 * beta * g * w) /
                                  (12.0 * (1.0 + 4.0 * beta * beta) * lam + 1.0);
}

/// Power [W] at which beta solves the quintic at bare detuning `detuning`;
/// the quintic is linear in eps^2.
[[nodiscard]] inline double power_on_quintic(const NormalizedParams& p, double beta, double detuning) {
    NormalizedParams q = p;
    q.detuning = detuning;
    q.epsilon = 0.0;
    const Quintic c = quintic_coefficients(q);
    const double eps2 = poly::evaluate(std::span<const double>(c), beta) / p.g;
    return p.power_from_eps2(eps2);
}

[[nodiscard]] inline CriticalValues critical_values_exact(const NormalizedParams& p) {
    if (!(p.g > 0.0)) throw InvalidParameter("critical_values_exact: g must be > 0");
    if (!(p.duffing > 0.0))
        throw InvalidParameter("critical_values_exact: requires lambda > 0; use the harmonic route");
    const CriticalIntermediate c = critical_intermediate(p);
    const std::array<double, 4> cubic{c.R3, c.R2, c.R1, c.R0};
    if (!(c.cubic_discriminant > 0.0)) {
        std::vector<double> rr;
        for (const auto& r : poly::real_roots(std::span<const double>(cubic))) rr.push_back(r.value);
        throw MultiCriticalError("discriminant cubic has several real roots (Delta_cub <= 0)", rr);
    }
    // Cardano with the sign-preserving real cube root, then Newton on the cubic
    const double pp = c.R1 / (3.0 * c.R3) - c.R2 * c.R2 / (9.0 * c.R3 * c.R3);
    const double qq = c.R0 / (2.0 * c.R3) - c.R1 * c.R2 / (6.0 * c.R3 * c.R3) +
                      c.R2 * c.R2 * c.R2 / (27.0 * c.R3 * c.R3 * c.R3);
    const double u = std::cbrt(-qq + std::sqrt(c.cubic_discriminant));
    const double y = poly::polish(std::span<const double>(cubic), -c.R2 / (3.0 * c.R3) + u - pp / u, 5);
    if (!(y > 0.0)) throw Error("critical_values_exact: discriminant root beta_s^2 is not positive");

    CriticalValues cv;
    cv.method = CriticalMethod::exact;
    cv.beta = std::sqrt(y);
    cv.detuning = critical_detuning_at(p, cv.beta);
    cv.power = power_on_quintic(p, cv.beta, cv.detuning);
    const double kb = p.k_bar();
    cv.series_parameter = 16.0 * kb * kb * p.duffing;
    return cv;
}

inline constexpr double perturbative_trust_limit = 0.1;

[[nodiscard]] inline CriticalValues critical_values_perturbative(const NormalizedParams& p) {
    if (!(p.g > 0.0)) throw InvalidParameter("critical_values_perturbative: g must be > 0");
    const double k = p.k_bar();
    const double k2 = k * k;
    const double l = p.duffing;  // lambda / omega_m
    CriticalValues cv;
    cv.method = CriticalMethod::perturbative;
    cv.beta = k * std::sqrt(1.0 + 64.0 * k2 * l + 256.0 * k2 * l * l * (16.0 * k2 - 1.0));
    cv.detuning = p.opa_detuning() +
                  4.0 * p.g * k * (1.0 + 16.0 * k2 * l + 192.0 * k2 * l * l * (4.0 * k2 - 1.0));
    const double hbar = PhysicalConstants::hbar;
    // 4 hbar g kbar^3 omega_L omega_m / kappa_c with g, kappa_c in units of omega_m.
    cv.power = 4.0 * hbar * p.g * k2 * k * p.scale.omega_L * p.scale.omega_m / p.kappa *
               (1.0 + 12.0 * l * (1.0 + 4.0 * k2) + 3072.0 * k2 * k2 * l * l);
    cv.series_parameter = 16.0 * k2 * l;
    cv.trusted = cv.series_parameter <= perturbative_trust_limit;
    return cv;
}

/// lambda = 0 formulas; any Duffing strength in p is ignored.
[[nodiscard]] inline CriticalValues critical_values_harmonic(const NormalizedParams& p) {
    if (!(p.g > 0.0)) throw InvalidParameter("critical_values_harmonic: g must be > 0");
    const double kb = p.net_loss();
    CriticalValues cv;
    cv.method = CriticalMethod::harmonic;
    cv.beta = std::abs(kb / (2.0 * p.g));
    cv.detuning = p.opa_detuning() + 4.0 * p.g * cv.beta;
    cv.power = PhysicalConstants::hbar * p.scale.omega_L * p.scale.omega_m / (p.g * p.kappa) * kb * kb * cv.beta;
    return cv;
}

/// Exact route for lambda > 0, harmonic route for lambda = 0.
[[nodiscard]] inline CriticalValues critical_values(const NormalizedParams& p) {
    return p.duffing > 0.0 ? critical_values_exact(p) : critical_values_harmonic(p);
}

struct MultistabilityVerdict {
    bool inside = false;
    double beta_margin = 0.0;      // beta_s - beta^crit
    double detuning_margin = 0.0;  // (Delta - Delta^crit) / omega_m
    double power_margin = 0.0;     // P_in - P^crit [W]
};

/// All three strict inequalities beta_s > beta^crit, Delta > Delta^crit,
/// P_in > P^crit must hold at once.
[[nodiscard]] inline MultistabilityVerdict multistability_test(const NormalizedParams& p,
                                                               const SteadyStateBranch& branch,
                                                               const CriticalValues& crit) {
    MultistabilityVerdict v;
    v.beta_margin = branch.beta - crit.beta;
    v.detuning_margin = p.detuning - crit.detuning;
    v.power_margin = p.input_power() - crit.power;
    v.inside = v.beta_margin > 0.0 && v.detuning_margin > 0.0 && v.power_margin > 0.0;
    return v;
}

[[nodiscard]] inline MultistabilityVerdict multistability_test(const NormalizedParams& p,
                                                               const SteadyStateBranch& branch) {
    return multistability_test(p, branch, critical_values(p));
}

struct DetuningWindow {
    bool found = false;
    double start = 0.0;  // first grid detuning with >= 3 real roots [omega_m]
    double stop = 0.0;   // last such detuning [omega_m]
    [[nodiscard]] double width() const { return found ? stop - start : 0.0; }
};

/// Extent of the multi-solution region along the bare detuning on a uniform grid.
[[nodiscard]] inline DetuningWindow multistability_window(NormalizedParams p, double lo, double hi, int points) {
    DetuningWindow w;
    for (int i = 0; i < points; ++i) {
        p.detuning = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        if (count_steady_states(p) >= 3) {
            if (!w.found) w.start = p.detuning;
            w.found = true;
            w.stop = p.detuning;
        }
    }
    return w;
}

}  // namespace optomech
