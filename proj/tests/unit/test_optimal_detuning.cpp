#include <gtest/gtest.h>

#include <cmath>

#include "optomech/optimal_detuning.hpp"
#include "optomech/presets.hpp"

using namespace optomech;

TEST(OptimalDetuning, PinsEffectiveDetuningToMechanicalFrequency) {
    auto p = normalize(preset_params("fig7"));
    for (double mw : {3.0, 5.0, 8.0, 12.0})
        for (double lam : {1e-11, 1e-9, 1e-7, 1e-6}) {
            p.set_input_power(mw * 1e-3);
            p.duffing = lam;
            const auto op = optimal_operating_point(p);
            EXPECT_LT(op.solve.residual, 1e-10);
            const auto& b = op.branch;
            EXPECT_LT(quintic_residual(op.params, b.beta), 1e-9);
            EXPECT_NEAR(b.eff_detuning, b.frame.mech_freq, 1e-9 * b.frame.mech_freq);
            EXPECT_NEAR(b.eff_detuning, std::exp(2.0 * b.frame.squeeze), 1e-9);
            EXPECT_NEAR(op.params.detuning, b.eff_detuning + 2.0 * p.g * b.beta, 1e-12 * op.params.detuning);
        }
}

TEST(OptimalDetuning, HarmonicLimitIsLinearInPower) {
    // lambda = 0: Delta' = omega_m and beta = g eps^2 / (1 + kappa^2)
    auto p = normalize(preset_params("fig7"));
    p.duffing = 0.0;
    const auto s = solve_optimal_detuning(p);
    EXPECT_NEAR(s.eff_detuning, 1.0, 1e-15);
    EXPECT_NEAR(s.beta, p.g * p.epsilon * p.epsilon / (1.0 + p.kappa * p.kappa), 1e-9 * s.beta);
}

TEST(OptimalDetuning, BisectionFallbackAgrees) {
    auto p = normalize(preset_params("fig7"));
    p.duffing = 1e-8;
    OptimalDetuningOptions forced;
    forced.max_iterations = 1;
    const auto a = solve_optimal_detuning(p);
    const auto b = solve_optimal_detuning(p, forced);
    EXPECT_TRUE(b.used_bisection);
    EXPECT_NEAR(a.beta, b.beta, 1e-9 * a.beta);
}
