#include <gtest/gtest.h>

#include <cmath>

#include "optomech/config.hpp"
#include "optomech/params.hpp"
#include "optomech/presets.hpp"

using namespace optomech;

namespace {

SystemParams fig2_set() {
    SystemParams p;
    p.cavity_length = 1e-3;
    p.laser_wavelength = 512e-9;
    p.input_power = 3e-3;
    p.finesse = 1.67e4;
    p.effective_mass = 5e-12;
    p.mech_freq = 2.0 * M_PI * 5e6;
    p.quality_factor = 1e5;
    return p;
}

}  // namespace

TEST(Params, CouplingRegressionValue) {
    // (omega_L / L) sqrt(hbar / 2 m omega_m), worked out by hand for this set
    const double g_ref = 2131.541312586166;  // rad/s
    EXPECT_NEAR(derive_params(fig2_set()).g / g_ref, 1.0, 1e-12);
}

TEST(Params, FinesseGivesKappaNearPointNineOmegaM) {
    const auto d = derive_params(fig2_set());
    EXPECT_NEAR(d.kappa_c / fig2_set().mech_freq, 0.9, 0.9 * 0.01);
}

TEST(Params, DriveAmplitudeFromPower) {
    const auto p = fig2_set();
    const auto d = derive_params(p);
    const double omega_l = 2.0 * M_PI * 299792458.0 / 512e-9;
    const double kappa = M_PI * 299792458.0 / (2.0 * 1.67e4 * 1e-3);
    EXPECT_NEAR(d.epsilon, std::sqrt(2.0 * kappa * 3e-3 / (1.054571817e-34 * omega_l)), 1e-9 * d.epsilon);
}

TEST(Params, ZeroTemperatureHasNoPhonons) {
    auto p = fig2_set();
    p.bath_temp = 0.0;
    EXPECT_EQ(derive_params(p).n_mech, 0.0);
    p.bath_temp = 25e-3;
    const double x = 1.054571817e-34 * p.mech_freq / (1.380649e-23 * 25e-3);
    EXPECT_NEAR(derive_params(p).n_mech, 1.0 / (std::exp(x) - 1.0), 1e-9);
}

TEST(Params, KappaInOmegaMUnits) {
    auto p = fig2_set();
    p.finesse.reset();
    p.cavity_decay = 0.2 * p.mech_freq;
    EXPECT_DOUBLE_EQ(normalize(p).kappa, 0.2);
}

TEST(Params, NormalizeRoundTrip) {
    for (bool use_finesse : {true, false}) {
        auto p = fig2_set();
        p.duffing = 1e-4 * p.mech_freq;
        p.opa_gain = 0.1 * p.mech_freq;
        p.opa_phase = 1.3;
        p.bare_detuning = 0.8 * p.mech_freq;
        p.bath_temp = 0.02;
        p.thermal_photons = 0.5;
        if (!use_finesse) {
            p.finesse.reset();
            p.cavity_decay = 0.3 * p.mech_freq;
        }
        const auto q = denormalize(normalize(p));
        EXPECT_NEAR(q.input_power, p.input_power, 1e-12 * p.input_power);
        EXPECT_NEAR(q.quality_factor, p.quality_factor, 1e-9 * p.quality_factor);
        EXPECT_NEAR(q.duffing, p.duffing, 1e-12 * p.duffing);
        EXPECT_NEAR(q.opa_gain, p.opa_gain, 1e-12 * p.opa_gain);
        EXPECT_NEAR(q.bare_detuning, p.bare_detuning, 1e-12 * p.bare_detuning);
        EXPECT_EQ(q.opa_phase, p.opa_phase);
        EXPECT_EQ(q.bath_temp, p.bath_temp);
        EXPECT_EQ(q.thermal_photons, p.thermal_photons);
        EXPECT_EQ(q.finesse.has_value(), use_finesse);
        EXPECT_NEAR(resolved_cavity_decay(q), resolved_cavity_decay(p), 1e-12 * resolved_cavity_decay(p));
    }
}

TEST(Params, Fig3NormalizedTuple) {
    const auto n = normalize(preset_params("fig3"));
    EXPECT_NEAR(n.kappa, 0.2, 1e-15);
    EXPECT_NEAR(n.opa_gain, 0.06, 1e-15);
    EXPECT_NEAR(n.opa_phase, M_PI / 8.0, 1e-15);
    EXPECT_NEAR(n.g, 2.681969870765647e-4, 1e-12 * 2.681969870765647e-4);
    EXPECT_NEAR(n.gamma, 1e-5, 1e-18);
    EXPECT_NEAR(n.input_power(), 3e-3, 1e-15);
}

TEST(Params, ValidationRejectsBadInput) {
    auto p = fig2_set();
    p.input_power = -1.0;
    EXPECT_THROW(validate(p), InvalidParameter);
    p = fig2_set();
    p.cavity_decay = 1.0;  // both set
    EXPECT_THROW(validate(p), InvalidParameter);
    p = fig2_set();
    p.opa_phase = 2.0 * M_PI;
    EXPECT_THROW(validate(p), InvalidParameter);
    p = fig2_set();
    p.duffing = -1.0;
    EXPECT_THROW(validate(p), InvalidParameter);
    p = fig2_set();
    p.mech_freq = 0.0;
    EXPECT_THROW((void)normalize(p), InvalidParameter);
}
