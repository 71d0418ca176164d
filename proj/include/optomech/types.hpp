#pragma once

#include <array>
#include <complex>

namespace optomech {

/// Checks on the assumptions behind the Duffing linearisation.
struct LinearizationValidity {
    bool beta_large = false;     // beta_s >= beta_threshold
    bool duffing_small = false;  // both ratios below ratio_threshold
    double duffing_to_enhanced = 0.0;  // lambda beta_s / Lambda
    double duffing_to_coupling = 0.0;  // lambda beta_s / G
    double beta_threshold = 40.0;
    double ratio_threshold = 0.1;

    [[nodiscard]] bool ok() const { return beta_large && duffing_small; }
};

/// Quantities of the squeezed (rotated) mechanical frame. Rates in units of omega_m.
struct TransformedFrame {
    double enhanced_duffing = 0.0;  // Lambda = 3 lambda (1 + 4 beta_s^2)
    double squeeze = 0.0;           // r = ln(1 + 4 Lambda) / 4
    double mech_freq = 1.0;         // Omega_m = e^{2r}
    double coupling = 0.0;          // G  = 2 g alpha_s
    double coupling_eff = 0.0;      // G' = e^{-r} G
    double opa_detuning = 0.0;      // Delta_p = 2 G0 sin(theta)
    double opa_damping = 0.0;       // kappa_p = 2 G0 cos(theta)
};

/// Everything the linear fluctuation dynamics depend on, in units of omega_m.
/// Built from a steady-state branch or directly (randomised tests, r scans).
struct LinearizedSystem {
    TransformedFrame frame;
    double detuning = 0.0;  // Delta' (effective detuning)
    double kappa = 0.0;
    double gamma = 0.0;
    double opa_gain = 0.0;
    double n_mech = 0.0;
    double n_phot = 0.0;

    /// Delta'^2 + kappa^2 - 4 G0^2.
    [[nodiscard]] double optical_stiffness() const {
        return detuning * detuning + kappa * kappa - 4.0 * opa_gain * opa_gain;
    }
    /// Delta' + Delta_p.
    [[nodiscard]] double red_detuning() const { return detuning + frame.opa_detuning; }
};

enum class EigenStability { stable, marginal, unstable };

struct StabilityVerdict {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    bool rh_stable = false;
    bool eigen_stable = false;
    EigenStability eigen_class = EigenStability::unstable;
    double max_real = 0.0;  // largest real part of the drift eigenvalues
    int regime_sign = 0;    // sign of Delta' + Delta_p
    std::array<std::complex<double>, 4> eigenvalues{};
};

/// One real solution of the mean-field steady-state equations.
struct SteadyStateBranch {
    double beta = 0.0;           // mechanical amplitude beta_s
    double alpha = 0.0;          // intracavity amplitude alpha_s >= 0
    double eff_detuning = 0.0;   // Delta' = Delta - 2 g beta_s
    double intensity = 0.0;      // I_a = alpha_s^2
    bool stable = false;         // ground truth: drift eigenvalues
    bool near_degenerate = false;
    std::array<std::complex<double>, 4> eigenvalues{};
    StabilityVerdict verdict;
    TransformedFrame frame;
    LinearizationValidity validity;
};

}  // namespace optomech
