#pragma once

// Physical inputs of the driven cavity / OPA / Duffing-mirror system, the
// derived single-valued rates, and the omega_m-normalised parameter set every
// solver in the library works with.

#include <cmath>
#include <optional>
#include <string>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

/// Raw SI inputs. Rates are angular (rad/s).
struct SystemParams {
    double cavity_length = 0.0;     // L [m]
    double laser_wavelength = 0.0;  // lambda_L [m]
    double input_power = 0.0;       // P_in [W]
    std::optional<double> cavity_decay;  // kappa_c [rad/s]; exclusive with finesse
    std::optional<double> finesse;       // F [-]
    double effective_mass = 0.0;    // m [kg]
    double mech_freq = 0.0;         // omega_m [rad/s]
    double quality_factor = 0.0;    // Q_m [-]
    double duffing = 0.0;           // lambda [rad/s]
    double opa_gain = 0.0;          // G0 [rad/s]
    double opa_phase = 0.0;         // theta [rad], in [0, 2 pi)
    double bare_detuning = 0.0;     // Delta = omega_c - omega_L [rad/s]
    double bath_temp = 0.0;         // T [K]
    double thermal_photons = 0.0;   // n_ph [-]
};

/// Rates derived from SystemParams, SI units.
struct DerivedParams {
    double g = 0.0;           // single-photon coupling [rad/s]
    double epsilon = 0.0;     // drive amplitude, real and positive [1/s]
    double gamma_m = 0.0;     // mechanical damping [rad/s]
    double omega_L = 0.0;     // laser angular frequency [rad/s]
    double n_mech = 0.0;      // thermal phonon number [-]
    double k_bar = 0.0;       // |kappa_c - 2 G0 cos(theta)| / (2 g) [-]
    double kappa_c = 0.0;     // resolved cavity decay [rad/s]
};

/// Cavity decay rate for a Fabry-Perot of finesse F and length L.
[[nodiscard]] inline double cavity_decay_from_finesse(double finesse, double length) {
    return pi * PhysicalConstants::c / (2.0 * finesse * length);
}

/// Bose occupation of a mode of angular frequency omega at temperature T.
[[nodiscard]] inline double bose_occupation(double omega, double temperature) {
    if (temperature <= 0.0) return 0.0;
    const double x = PhysicalConstants::hbar * omega / (PhysicalConstants::k_B * temperature);
    return 1.0 / std::expm1(x);
}

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

inline bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
inline bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

/// Throws InvalidParameter when an invariant of SystemParams is violated.
inline void validate(const SystemParams& p) {
    using detail::require;
    require(detail::finite_pos(p.cavity_length), "cavity_length must be > 0");
    require(detail::finite_pos(p.laser_wavelength), "laser_wavelength must be > 0");
    require(detail::finite_pos(p.effective_mass), "effective_mass must be > 0");
    require(detail::finite_pos(p.mech_freq), "mech_freq must be > 0");
    require(detail::finite_pos(p.quality_factor), "quality_factor must be > 0");
    require(detail::finite_nonneg(p.input_power), "input_power must be >= 0");
    require(detail::finite_nonneg(p.opa_gain), "opa_gain must be >= 0");
    require(detail::finite_nonneg(p.bath_temp), "bath_temp must be >= 0");
    require(detail::finite_nonneg(p.thermal_photons), "thermal_photons must be >= 0");
    require(detail::finite_nonneg(p.duffing), "duffing must be >= 0 (stiffening only)");
    require(std::isfinite(p.opa_phase) && p.opa_phase >= 0.0 && p.opa_phase < two_pi,
            "opa_phase must lie in [0, 2 pi)");
    require(std::isfinite(p.bare_detuning), "bare_detuning must be finite");
    require(p.cavity_decay.has_value() != p.finesse.has_value(),
            "exactly one of cavity_decay and finesse must be given");
    if (p.cavity_decay) require(detail::finite_nonneg(*p.cavity_decay), "cavity_decay must be >= 0");
    if (p.finesse) require(detail::finite_pos(*p.finesse), "finesse must be > 0");
}

[[nodiscard]] inline double resolved_cavity_decay(const SystemParams& p) {
    return p.cavity_decay ? *p.cavity_decay : cavity_decay_from_finesse(*p.finesse, p.cavity_length);
}

/// The cavity frequency entering g is approximated by the laser frequency.
[[nodiscard]] inline DerivedParams derive_params(const SystemParams& p) {
    validate(p);
    using C = PhysicalConstants;
    DerivedParams d;
    d.kappa_c = resolved_cavity_decay(p);
    d.omega_L = two_pi * C::c / p.laser_wavelength;
    d.g = (d.omega_L / p.cavity_length) * std::sqrt(C::hbar / (2.0 * p.effective_mass * p.mech_freq));
    d.epsilon = std::sqrt(2.0 * d.kappa_c * p.input_power / (C::hbar * d.omega_L));
    d.gamma_m = p.mech_freq / p.quality_factor;
    d.n_mech = bose_occupation(p.mech_freq, p.bath_temp);
    d.k_bar = std::abs((d.kappa_c - 2.0 * p.opa_gain * std::cos(p.opa_phase)) / (2.0 * d.g));
    return d;
}

/// SI quantities that are not rates; they survive normalisation unchanged so
/// the map back to SystemParams is exact.
struct Scale {
    double omega_m = 1.0;           // [rad/s]
    double omega_L = 1.0;           // [rad/s]
    double cavity_length = 0.0;     // [m]
    double laser_wavelength = 0.0;  // [m]
    double effective_mass = 0.0;    // [kg]
    double bath_temp = 0.0;         // [K]
    std::optional<double> finesse;
};

/// Every rate in units of omega_m (omega_m itself is 1). Plain aggregate: tests
/// and sweeps build or tweak instances directly.
struct NormalizedParams {
    double g = 0.0;
    double epsilon = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double duffing = 0.0;
    double opa_gain = 0.0;
    double opa_phase = 0.0;
    double detuning = 0.0;
    double n_mech = 0.0;
    double n_phot = 0.0;
    Scale scale;

    [[nodiscard]] double opa_damping() const { return 2.0 * opa_gain * std::cos(opa_phase); }
    [[nodiscard]] double opa_detuning() const { return 2.0 * opa_gain * std::sin(opa_phase); }
    /// kappa_c - 2 G0 cos(theta); may be negative.
    [[nodiscard]] double net_loss() const { return kappa - opa_damping(); }
    /// Delta - 2 G0 sin(theta), called d0 in the critical-point algebra.
    [[nodiscard]] double shifted_detuning() const { return detuning - opa_detuning(); }
    [[nodiscard]] double k_bar() const { return std::abs(net_loss() / (2.0 * g)); }

    /// Input power [W] that produces the normalised squared drive eps2.
    [[nodiscard]] double power_from_eps2(double eps2) const {
        return eps2 * scale.omega_m * PhysicalConstants::hbar * scale.omega_L / (2.0 * kappa);
    }
    [[nodiscard]] double eps2_from_power(double power) const {
        return 2.0 * kappa * power / (PhysicalConstants::hbar * scale.omega_L * scale.omega_m);
    }
    [[nodiscard]] double input_power() const { return power_from_eps2(epsilon * epsilon); }
    void set_input_power(double power) { epsilon = std::sqrt(eps2_from_power(power)); }
};

[[nodiscard]] inline NormalizedParams normalize(const SystemParams& p) {
    const DerivedParams d = derive_params(p);
    const double w = p.mech_freq;
    NormalizedParams n;
    n.g = d.g / w;
    n.epsilon = d.epsilon / w;
    n.kappa = d.kappa_c / w;
    n.gamma = d.gamma_m / w;
    n.duffing = p.duffing / w;
    n.opa_gain = p.opa_gain / w;
    n.opa_phase = p.opa_phase;
    n.detuning = p.bare_detuning / w;
    n.n_mech = d.n_mech;
    n.n_phot = p.thermal_photons;
    n.scale = Scale{w, d.omega_L, p.cavity_length, p.laser_wavelength, p.effective_mass,
                    p.bath_temp, p.finesse};
    return n;
}

/// Inverse of normalize().
[[nodiscard]] inline SystemParams denormalize(const NormalizedParams& n) {
    const double w = n.scale.omega_m;
    SystemParams p;
    p.cavity_length = n.scale.cavity_length;
    p.laser_wavelength = n.scale.laser_wavelength;
    p.input_power = n.input_power();
    if (n.scale.finesse)
        p.finesse = n.scale.finesse;
    else
        p.cavity_decay = n.kappa * w;
    p.effective_mass = n.scale.effective_mass;
    p.mech_freq = w;
    p.quality_factor = 1.0 / n.gamma;
    p.duffing = n.duffing * w;
    p.opa_gain = n.opa_gain * w;
    p.opa_phase = n.opa_phase;
    p.bare_detuning = n.detuning * w;
    p.bath_temp = n.scale.bath_temp;
    p.thermal_photons = n.n_phot;
    return p;
}

}  // namespace optomech
