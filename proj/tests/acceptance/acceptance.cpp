// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "optomech/optomech.hpp"

using namespace optomech;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s  %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Drift matrix written out from the printed (x, y, q, p) form.
Eigen::Matrix4d drift_oracle(const LinearizedSystem& s) {
    const double kc = s.kappa, kp = s.frame.opa_damping, dp = s.frame.opa_detuning;
    const double d = s.detuning, gp = s.frame.coupling_eff, om = s.frame.mech_freq, g = s.gamma;
    Eigen::Matrix4d a;
    a << -(kc - kp), d + dp, 0, 0,
         -(d - dp), -(kc + kp), gp, 0,
         0, 0, -g, om,
         gp, 0, -om, -g;
    return a;
}

double max_real_oracle(const LinearizedSystem& s) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(drift_oracle(s), false);
    return es.eigenvalues().real().maxCoeff();
}

LinearizedSystem make_system(double r, double coupling, double kappa, double gamma, double opa_gain,
                             double opa_phase, double eff_detuning, double n_mech) {
    LinearizedSystem s;
    s.frame = frame_from_squeeze(r, coupling, opa_gain, opa_phase);
    s.detuning = eff_detuning;
    s.kappa = kappa;
    s.gamma = gamma;
    s.opa_gain = opa_gain;
    s.n_mech = n_mech;
    return s;
}

// --- 1 ---------------------------------------------------------------------
void critical_point() {
    // fig4 preset with the OPA switched off.
    SystemParams sp = preset_params("fig4");
    sp.opa_gain = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cv = critical_values_exact(normalize(sp));
    const double dt = seconds_since(t0);
    const double e_d = rel(cv.detuning, 0.7998);
    const double e_p = rel(cv.power, 8.116e-3);
    report("critical_point", e_d <= 0.01 && e_p <= 0.01 && dt < 1.0,
           fmt("Delta_crit=%.5f (rel %.2e)  P_crit=%.4f mW (rel %.2e)  tol 1%%  %.3f ms", cv.detuning, e_d,
               1e3 * cv.power, e_p, 1e3 * dt));
}

// --- 2 ---------------------------------------------------------------------
void harmonic_limit() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_pair = 0.0, worst_id = 0.0;
    for (int i = 0; i < 200; ++i) {
        NormalizedParams p;
        p.g = 1e-6 * std::pow(10.0, 3.0 * u(rng));
        p.kappa = 0.05 + 2.0 * u(rng);
        p.gamma = 1e-5;
        p.scale.omega_L = 2e15;
        p.scale.omega_m = 1e7;
        const bool opa = i % 2 == 1;
        if (opa) {
            p.opa_gain = 0.4 * p.kappa * u(rng);
            p.opa_phase = 2.0 * pi * u(rng);
        }
        const auto a = critical_values_perturbative(p);
        const auto b = critical_values_harmonic(p);
        worst_pair = std::max({worst_pair, rel(a.beta, b.beta), rel(a.detuning, b.detuning), rel(a.power, b.power)});
        if (!opa) {
            // harmonic oscillator: beta = kappa / 2g, Delta = 2 kappa
            worst_id = std::max({worst_id, rel(b.beta, p.kappa / (2.0 * p.g)), rel(b.detuning, 2.0 * p.kappa),
                                 rel(a.beta, p.kappa / (2.0 * p.g)), rel(a.detuning, 2.0 * p.kappa)});
        }
    }
    report("harmonic_limit", worst_pair <= 1e-12 && worst_id <= 1e-12,
           fmt("200 draws: perturbative vs harmonic max rel %.2e, G0=0 identities max rel %.2e  tol 1e-12",
               worst_pair, worst_id));
}

// --- 3 ---------------------------------------------------------------------
void covariance_dual() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    int accepted = 0, drawn = 0;
    double worst = 0.0, r_max = 0.0, g0_max = 0.0, n_max = 0.0;
    while (accepted < 60 && drawn < 100000) {
        ++drawn;
        const double kappa = 0.05 + 1.5 * u(rng);
        const double r = 0.5 * u(rng);
        const double g0 = 0.9 * u(rng);
        const double theta = 2.0 * pi * u(rng);
        // the two ends of the phonon range are always represented
        const double n = accepted == 0 ? 0.0 : accepted == 1 ? 1e3 : 1e3 * std::pow(u(rng), 3);
        const double red = 0.1 + 3.0 * u(rng);
        const double dp = 2.0 * g0 * kappa * std::sin(theta);
        auto s = make_system(r, 0.6 * u(rng), kappa, std::pow(10.0, -5.0 + 3.0 * u(rng)), g0 * kappa, theta,
                             red - dp, n);
        if (!(max_real_oracle(s) < -1e-7)) continue;
        const Eigen::Matrix4d v = covariance_lyapunov(drift_matrix(s), diffusion_matrix(s));
        const auto c = covariance_spectral(s);
        worst = std::max({worst, rel(c.qq, v(2, 2)), rel(c.pp, v(3, 3))});
        r_max = std::max(r_max, r);
        g0_max = std::max(g0_max, g0);
        n_max = std::max(n_max, n);
        ++accepted;
    }
    const double dt = seconds_since(t0);
    report("covariance_dual", accepted >= 50 && worst <= 1e-6 && dt < 60.0,
           fmt("%d stable points (r<=%.3f, G0/kappa<=%.3f, n<=%.0f): max rel %.2e  tol 1e-6  %.2f s", accepted,
               r_max, g0_max, n_max, worst, dt));
}

// --- 4 ---------------------------------------------------------------------
void stability_equivalence() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    int disagreements = 0, marginal = 0, stable = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const double kappa = 0.01 + 2.0 * u(rng);
        const double g0 = kappa * u(rng);
        const double theta = 2.0 * pi * u(rng);
        const double red = 5.0 * u(rng) + 1e-9;
        const double dp = 2.0 * g0 * std::sin(theta);
        const auto s = make_system(u(rng), 3.0 * u(rng), kappa, std::pow(10.0, -6.0 + 5.0 * u(rng)), g0, theta,
                                   red - dp, 0.0);
        const double mr = max_real_oracle(s);
        if (std::abs(mr) < 1e-12) {
            ++marginal;
            continue;
        }
        const bool eig = mr < 0.0;
        stable += eig;
        if (routh_hurwitz(s).rh_stable != eig) ++disagreements;
    }
    const double dt = seconds_since(t0);
    report("stability_equivalence", disagreements == 0 && dt < 30.0,
           fmt("%d draws (%d stable, %d marginal skipped): %d disagreements  %.2f s", draws, stable, marginal,
               disagreements, dt));
}

// --- 5 ---------------------------------------------------------------------
void thermal_baseline() {
    double worst = 0.0;
    for (double n : {0.0, 1.0, 100.0}) {
        const auto s = make_system(0.0, 0.0, 0.3, 1e-3, 0.0, 0.0, 1.0, n);
        const auto rep = fluctuation_report(s, CovarianceMethod::lyapunov, 1.0);
        worst = std::max(worst, std::abs(rep.n_eff - n) / std::max(1.0, n));
    }
    report("thermal_baseline", worst <= 1e-9, fmt("n_eff vs n_m for n_m in {0,1,100}: max dev %.2e  tol 1e-9", worst));
}

// --- 6 ---------------------------------------------------------------------
void r_opt_check() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (double k : {0.1, 0.2, 0.3}) {
        // weak coupling keeps eta ~ 1; no thermal phonons
        const double coupling = 0.02;
        const double eff_detuning = std::sqrt(1.0 + k * k);
        auto neff = [&](double r) {
            const auto s = make_system(r, coupling, k, 1e-7, 0.0, 0.0, eff_detuning, 0.0);
            return fluctuation_report(s, CovarianceMethod::lyapunov, 1.0).n_eff;
        };
        const auto [r_num, n_num] = boost::math::tools::brent_find_minima(neff, 0.0, 0.25, 40);
        // closed-form optimum and minimum occupation, typed in here
        const double r_formula = k * k / (4.0 * (k * k + 1.0));
        const double sq = std::sqrt(1.0 + k * k);
        const double n_formula = 0.5 * (sq - 1.0) - std::pow(k, 4) / (8.0 * sq * sq * sq);
        const double er = rel(r_num, r_formula), en = rel(n_num, n_formula);
        ok = ok && er <= 0.10 && en <= 0.10;
        detail += fmt("k=%.1f r %.5f/%.5f (%.1f%%) n %.3e/%.3e (%.1f%%); ", k, r_num, r_formula, 100 * er, n_num,
                      n_formula, 100 * en);
    }
    const double dt = seconds_since(t0);
    report("r_opt", ok && dt < 10.0, detail + fmt("tol 10%%  %.2f s", dt));
}

// --- 7 ---------------------------------------------------------------------
struct SeriesTrace {
    std::vector<double> x, n_eff, d_q;
};

std::map<std::string, SeriesTrace> selected_traces(const SweepResult& res) {
    std::map<std::string, SeriesTrace> out;
    for (const auto& r : res.rows) {
        if (!r.selected || !r.fluct) continue;
        auto& t = out[r.series];
        t.x.push_back(r.axis_value);
        t.n_eff.push_back(r.fluct->n_eff);
        t.d_q.push_back(r.fluct->D_q);
    }
    return out;
}

// Momentum variance over every reported row with Delta' + Delta_p > 0.
void momentum_floor(const SweepSpec& spec, const SweepResult& res, double& min_var_p, int& count) {
    std::map<std::string, double> opa_detuning;
    for (const auto& s : spec.series) opa_detuning[s.label] = normalize(series_params(spec, s)).opa_detuning();
    for (const auto& r : res.rows) {
        if (!r.fluct || !(r.eff_detuning + opa_detuning[r.series] > 0.0)) continue;
        min_var_p = std::min(min_var_p, r.fluct->var_p);
        ++count;
    }
}

void figure_claims() {
    double min_var_p = std::numeric_limits<double>::infinity();
    int n_var_p = 0;

    // (a) multistability window along Delta for the fig3 lambda set
    auto t0 = std::chrono::steady_clock::now();
    const SweepSpec s3 = figure_preset("fig3");
    std::vector<double> widths;
    std::string wdetail;
    for (const auto& ser : s3.series) {
        const auto w = multistability_window(normalize(series_params(s3, ser)), 0.0, 500.0, 5001);
        widths.push_back(w.width());
        wdetail += fmt("%s:[%.2f,%.2f] ", ser.label.c_str(), w.start, w.stop);
    }
    bool a_ok = widths.front() > 0.0;
    for (std::size_t i = 1; i < widths.size(); ++i)
        a_ok = a_ok && (widths[i] < widths[i - 1] || (widths[i] == 0.0 && widths[i - 1] == 0.0));
    const double dt_a = seconds_since(t0);

    // (b) cooling window and lambda_opt vs P_in
    t0 = std::chrono::steady_clock::now();
    const SweepSpec s7 = figure_preset("fig7");
    const auto r7 = run_sweep(s7);
    momentum_floor(s7, r7, min_var_p, n_var_p);
    const double n_bath = normalize(s7.fixed).n_mech;
    bool b_ok = true;
    std::vector<double> lam_opt;
    std::string bdetail;
    auto traces7 = selected_traces(r7);
    for (const auto& ser : s7.series) {
        const auto& t = traces7[ser.label];
        if (t.x.size() < 3) {
            b_ok = false;
            continue;
        }
        const auto it = std::min_element(t.n_eff.begin(), t.n_eff.end());
        const std::size_t k = static_cast<std::size_t>(it - t.n_eff.begin());
        const bool interior = k > 0 && k + 1 < t.x.size();
        b_ok = b_ok && interior && *it < n_bath;
        lam_opt.push_back(t.x[k]);
        bdetail += fmt("%s:%.2e ", ser.label.c_str(), t.x[k]);
    }
    for (std::size_t i = 1; i < lam_opt.size(); ++i) b_ok = b_ok && lam_opt[i] < lam_opt[i - 1];
    const double dt_b = seconds_since(t0);

    // (c) 3 dB onset in the fig8 family
    t0 = std::chrono::steady_clock::now();
    const SweepSpec s8 = figure_preset("fig8");
    const auto r8 = run_sweep(s8);
    momentum_floor(s8, r8, min_var_p, n_var_p);
    bool c_ok = true;
    std::vector<double> onset;
    std::string cdetail;
    auto traces8 = selected_traces(r8);
    for (const auto& ser : s8.series) {
        const auto& t = traces8[ser.label];
        double on = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < t.x.size(); ++i)
            if (t.d_q[i] > 3.0) {
                on = t.x[i];
                break;
            }
        c_ok = c_ok && std::isfinite(on) && !t.d_q.empty() && t.d_q.back() > 3.0;
        onset.push_back(on);
        cdetail += fmt("%s:%.2e ", ser.label.c_str(), on);
    }
    for (std::size_t i = 1; i < onset.size(); ++i) c_ok = c_ok && onset[i] < onset[i - 1];
    const double dt_c = seconds_since(t0);

    // (d) also over the remaining lambda-axis families
    t0 = std::chrono::steady_clock::now();
    for (const char* name : {"fig9", "fig11"}) {
        const SweepSpec s = figure_preset(name);
        momentum_floor(s, run_sweep(s), min_var_p, n_var_p);
    }
    const bool d_ok = n_var_p > 0 && min_var_p >= 0.5;
    const double dt_d = seconds_since(t0);

    const bool time_ok = std::max({dt_a, dt_b, dt_c, dt_d}) < 300.0;
    report("figure_claims", a_ok && b_ok && c_ok && d_ok && time_ok,
           fmt("(a) %s windows %s| (b) %s n_m=%.1f lambda_opt %s| (c) %s onset %s| (d) %s min var_p=%.4f over %d "
               "rows | max %.2f s",
               a_ok ? "ok" : "no", wdetail.c_str(), b_ok ? "ok" : "no", n_bath, bdetail.c_str(), c_ok ? "ok" : "no",
               cdetail.c_str(), d_ok ? "ok" : "no", min_var_p, n_var_p, std::max({dt_a, dt_b, dt_c, dt_d})));
}

// --- 8 ---------------------------------------------------------------------
NormalizedParams ode_point(std::mt19937_64& rng, bool want_bistable) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        NormalizedParams p;
        p.g = 0.005 + 0.015 * u(rng);
        p.kappa = 0.2 + 0.6 * u(rng);
        p.gamma = 0.05 + 0.15 * u(rng);
        p.duffing = std::pow(10.0, -6.0 + 2.0 * u(rng));
        const double beta_c = p.kappa / (2.0 * p.g);
        p.detuning = 2.0 * p.kappa * (0.5 + 2.0 * u(rng));
        // drive around the harmonic critical power
        p.epsilon = std::sqrt(p.kappa * p.kappa + p.detuning * p.detuning) *
                    std::sqrt(beta_c / p.g) * (0.5 + 2.0 * u(rng));
        const auto fp = ode_fixed_points(p);
        int stable = 0;
        for (const auto& b : fp) stable += b.stable;
        // a lone unstable branch means a limit cycle, not a point attractor
        if (want_bistable ? (fp.size() == 3 && stable == 2) : (fp.size() == 1 && stable == 1)) return p;
    }
}

void ode_consistency() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    int points = 0, bistable_points = 0, runs = 0, matched = 0, both_reached = 0;
    std::string issues;
    for (int i = 0; i < 20; ++i) {
        const bool bi = i % 2 == 0;
        const NormalizedParams p = ode_point(rng, bi);
        const auto fp = ode_fixed_points(p);
        double amax = 0.0, bmax = 0.0;
        for (const auto& b : fp) {
            amax = std::max(amax, b.alpha);
            bmax = std::max(bmax, std::abs(b.beta));
        }
        std::vector<int> hits(fp.size(), 0);
        for (int seed = 0; seed < 100; ++seed) {
            MeanFieldState init;
            init.a = std::polar(2.0 * amax * u(rng), 2.0 * pi * u(rng));
            init.b = {2.0 * bmax * (2.0 * u(rng) - 1.0), 2.0 * bmax * (2.0 * u(rng) - 1.0)};
            const auto res = find_attractor(p, init, fp);
            ++runs;
            if (res.status == AttractorStatus::fixed_point && res.matched_branch >= 0 && res.matched_stable) {
                ++matched;
                ++hits[static_cast<std::size_t>(res.matched_branch)];
            } else if (issues.size() < 200) {
                issues += fmt("[pt %d seed %d: %s beta=%.6g] ", i, seed, to_string(res.status), res.beta);
            }
        }
        ++points;
        if (bi) {
            ++bistable_points;
            int reached = 0;
            for (int h : hits) reached += h > 0;
            both_reached += reached == 2;
        }
    }
    const double dt = seconds_since(t0);
    report("ode_consistency", matched == runs && dt < 120.0,
           fmt("%d points (%d bistable, %d with both attractors reached), %d/%d runs matched a stable branch "
               "within 1e-6  %.1f s %s",
               points, bistable_points, both_reached, matched, runs, dt, issues.c_str()));
}

}  // namespace

int main() {
    critical_point();
    harmonic_limit();
    covariance_dual();
    stability_equivalence();
    thermal_baseline();
    r_opt_check();
    figure_claims();
    ode_consistency();
    std::printf("%d criteria failed\n", failures);
    return failures;
}
