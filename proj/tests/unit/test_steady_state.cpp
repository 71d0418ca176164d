#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "optomech/criticality.hpp"
#include "optomech/presets.hpp"
#include "optomech/steady_state.hpp"

using namespace optomech;

namespace {

NormalizedParams fig3_at(double detuning, double duffing) {
    NormalizedParams p = normalize(preset_params("fig3"));
    p.detuning = detuning;
    p.duffing = duffing;
    return p;
}

// Product of two polynomials, descending order.
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

// Positive roots of the harmonic cubic b ((d0 - 2 g b)^2 + k^2) = g eps^2 by
// scanning for sign changes and bisecting.
std::vector<double> cubic_roots_by_bisection(double g, double d0, double k, double eps2) {
    auto f = [&](double b) { return b * ((d0 - 2 * g * b) * (d0 - 2 * g * b) + k * k) - g * eps2; };
    const double hi = 2.0 * (g * eps2 / (k * k)) + 1.0;
    std::vector<double> out;
    const int n = 200000;
    double x0 = 0.0, f0 = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double x1 = hi * i / n, f1 = f(x1);
        if ((f0 < 0) != (f1 < 0)) {
            double lo = x0, up = x1;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (lo + up);
                ((f(m) < 0) == (f0 < 0) ? lo : up) = m;
            }
            out.push_back(0.5 * (lo + up));
        }
        x0 = x1, f0 = f1;
    }
    return out;
}

}  // namespace

TEST(SteadyState, NoDriveGivesOnlyTheRestPoint) {
    auto p = fig3_at(0.8, 1e-4);
    p.epsilon = 0.0;
    const auto br = solve_branches(p);
    ASSERT_EQ(br.size(), 1u);
    EXPECT_EQ(br[0].beta, 0.0);
    EXPECT_EQ(br[0].alpha, 0.0);
}

TEST(SteadyState, HarmonicCubicMatchesBisection) {
    auto p = fig3_at(0.0, 0.0);
    p.opa_gain = 0.0;
    for (double delta : {0.5, 2.0, 6.0, 8.0, 12.0}) {
        p.detuning = delta;
        const auto c = quintic_coefficients(p);
        EXPECT_EQ(c[0], 0.0);
        EXPECT_EQ(c[1], 0.0);
        const auto ref = cubic_roots_by_bisection(p.g, delta, p.kappa, p.epsilon * p.epsilon);
        const auto br = solve_branches(p);
        ASSERT_EQ(br.size(), ref.size()) << "Delta=" << delta;
        for (std::size_t i = 0; i < br.size(); ++i) {
            EXPECT_NEAR(br[i].beta, ref[i], 1e-9 * ref[i]);
            const double dd = br[i].eff_detuning;
            EXPECT_NEAR(br[i].intensity, p.epsilon * p.epsilon / (dd * dd + p.kappa * p.kappa),
                        1e-12 * br[i].intensity);
            // force balance at lambda = 0: beta = g I_a
            EXPECT_NEAR(br[i].beta, p.g * br[i].intensity, 1e-9 * br[i].beta);
        }
    }
}

TEST(SteadyState, QuinticCoefficientsMatchExpansion) {
    const auto p = fig3_at(0.8, 1e-4);
    const double g = p.g, lam = p.duffing;
    const double d0 = p.detuning - 2 * p.opa_gain * std::sin(p.opa_phase);
    const double k = p.kappa - 2 * p.opa_gain * std::cos(p.opa_phase);
    const std::vector<double> restoring{16 * lam, 0.0, 1 + 12 * lam, 0.0};
    const std::vector<double> loss{4 * g * g, -4 * g * d0, d0 * d0 + k * k};
    auto ref = multiply(restoring, loss);
    ref.back() -= g * p.epsilon * p.epsilon;
    const auto c = quintic_coefficients(p);
    ASSERT_EQ(ref.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], ref[i], 1e-14 * std::abs(ref[i]) + 1e-300);
    for (const auto& b : solve_branches(p)) EXPECT_LT(quintic_residual(p, b.beta), 1e-9);
}

TEST(SteadyState, RootCountWithinDescartesBound) {
    for (double delta = 0.0; delta <= 3.0; delta += 0.05)
        for (double lam : {0.0, 1e-6, 1e-4}) {
            const auto p = fig3_at(delta, lam);
            const auto c = quintic_coefficients(p);
            EXPECT_LE(count_steady_states(p), poly::descartes_bound(c));
            EXPECT_GE(count_steady_states(p), 1);
        }
}

TEST(SteadyState, BranchesCarryStabilityAndFrame) {
    const auto p = fig3_at(0.8, 1e-4);
    for (const auto& b : solve_branches(p)) {
        EXPECT_GT(b.alpha, 0.0);
        EXPECT_NEAR(b.frame.enhanced_duffing, 3e-4 * (1 + 4 * b.beta * b.beta), 1e-12 * b.frame.enhanced_duffing);
        EXPECT_EQ(b.stable, b.verdict.eigen_stable);
        EXPECT_NEAR(b.eff_detuning, p.detuning - 2 * p.g * b.beta, 1e-14);
    }
}

TEST(SteadyState, MultiSolutionWindowNarrowsWithDuffing) {
    auto base = fig3_at(0.0, 0.0);
    double previous = INFINITY;
    for (double lam : {1e-6, 1e-5, 1e-4}) {
        base.duffing = lam;
        const auto w = multistability_window(base, 0.0, 10.0, 1001);
        ASSERT_TRUE(w.found) << lam;
        EXPECT_LT(w.width(), previous);
        previous = w.width();
    }
    base.duffing = 0.0;
    const auto harmonic = multistability_window(base, 0.0, 10.0, 1001);
    ASSERT_TRUE(harmonic.found);
    EXPECT_GT(harmonic.width(), previous);
}

TEST(SteadyState, ValidityFlags) {
    const auto p = fig3_at(0.8, 1e-4);
    const auto br = solve_branches(p);
    ASSERT_FALSE(br.empty());
    const auto& b = br.back();
    EXPECT_EQ(b.validity.beta_large, b.beta >= 40.0);
    EXPECT_NEAR(b.validity.duffing_to_coupling, p.duffing * b.beta / b.frame.coupling, 1e-15);
}
