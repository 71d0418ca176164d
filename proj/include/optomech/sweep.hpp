#pragma once

// Parameter sweeps: one axis, optional named series of parameter overrides,
// optional optimal-detuning constraint. Points run on a worker pool; rows are
// gathered in (series, axis) order so the output does not depend on
// scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/criticality.hpp"
#include "optomech/errors.hpp"
#include "optomech/fluctuations.hpp"
#include "optomech/optimal_detuning.hpp"
#include "optomech/params.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/table.hpp"

namespace optomech {

// Axis units: detuning and duffing in omega_m, input_power in W, opa_gain in
// kappa_c, opa_phase in rad.
enum class SweepAxis { detuning, input_power, duffing, opa_gain, opa_phase };
enum class AxisScale { linear, log };
enum class SweepConstraint { none, optimal_detuning };

[[nodiscard]] inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::detuning: return "detuning";
        case SweepAxis::input_power: return "input_power";
        case SweepAxis::duffing: return "duffing";
        case SweepAxis::opa_gain: return "opa_gain";
        case SweepAxis::opa_phase: return "opa_phase";
    }
    return "?";
}

[[nodiscard]] inline SweepAxis parse_axis(const std::string& s) {
    for (auto a : {SweepAxis::detuning, SweepAxis::input_power, SweepAxis::duffing, SweepAxis::opa_gain,
                   SweepAxis::opa_phase})
        if (s == to_string(a)) return a;
    throw InvalidParameter("unknown sweep axis '" + s + "'");
}

[[nodiscard]] inline const char* to_string(SweepConstraint c) {
    return c == SweepConstraint::none ? "none" : "optimal_detuning";
}

[[nodiscard]] inline SweepConstraint parse_constraint(const std::string& s) {
    if (s == "none") return SweepConstraint::none;
    if (s == "optimal_detuning") return SweepConstraint::optimal_detuning;
    throw InvalidParameter("unknown constraint '" + s + "'");
}

struct SweepSeries {
    std::string label;
    std::vector<std::pair<std::string, double>> settings;  // applied on top of SweepSpec::fixed
};

struct SweepSpec {
    std::string name;
    SweepAxis axis = SweepAxis::detuning;
    double start = 0.0;
    double stop = 0.0;
    int points = 2;
    AxisScale scale = AxisScale::linear;
    SystemParams fixed;
    SweepConstraint constraint = SweepConstraint::none;
    std::vector<SweepSeries> series;  // empty: a single unnamed series
    double beta_floor = 0.0;          // rows with beta_s below this are dropped
    std::optional<int> branch;        // fluctuation branch override
    bool fluctuations = true;
    std::string caption;              // parameter summary of the figure being reproduced
};

inline void validate(const SweepSpec& s) {
    if (s.points < 1) throw InvalidParameter("sweep: points must be >= 1");
    if (!std::isfinite(s.start) || !std::isfinite(s.stop)) throw InvalidParameter("sweep: range must be finite");
    if (s.scale == AxisScale::log && !(s.start > 0.0 && s.stop > 0.0))
        throw InvalidParameter("sweep: log scale needs a positive range");
    if (s.constraint == SweepConstraint::optimal_detuning && s.axis == SweepAxis::detuning)
        throw InvalidParameter("sweep: optimal_detuning fixes the detuning; choose another axis");
}

[[nodiscard]] inline std::vector<double> axis_values(const SweepSpec& s) {
    std::vector<double> v;
    if (s.points == 1) return {s.start};
    for (int i = 0; i < s.points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(s.points - 1);
        if (s.scale == AxisScale::linear)
            v.push_back(s.start + (s.stop - s.start) * t);
        else
            v.push_back(std::exp(std::log(s.start) + (std::log(s.stop) - std::log(s.start)) * t));
    }
    return v;
}

inline void apply_axis(SystemParams& p, SweepAxis axis, double v) {
    switch (axis) {
        case SweepAxis::detuning: p.bare_detuning = v * p.mech_freq; break;
        case SweepAxis::input_power: p.input_power = v; break;
        case SweepAxis::duffing: p.duffing = v * p.mech_freq; break;
        case SweepAxis::opa_gain: p.opa_gain = v * resolved_cavity_decay(p); break;
        case SweepAxis::opa_phase: p.opa_phase = v; break;
    }
}

[[nodiscard]] inline SystemParams series_params(const SweepSpec& spec, const SweepSeries& s) {
    SystemParams p = spec.fixed;
    for (const auto& [k, v] : s.settings) apply_setting(p, k, v);
    return p;
}

struct SweepRow {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::string series;
    int point = 0;
    double axis_value = 0.0;
    double detuning = nan;     // bare Delta / omega_m
    double input_power = nan;  // [W]
    double duffing = nan;      // lambda / omega_m
    int branch_count = 0;
    int branch = -1;
    int trace = -1;
    double beta = nan, alpha = nan, intensity = nan, eff_detuning = nan;
    bool stable = false, rh_stable = false, near_degenerate = false;
    double s1 = nan, s2 = nan, s3 = nan, max_re = nan;
    double squeeze = nan, mech_freq_t = nan, enhanced_duffing = nan, coupling = nan;
    bool beta_large = false, duffing_small = false;
    double crit_beta = nan, crit_detuning = nan, crit_power = nan;
    std::string crit_method;
    std::string crit_error;  // critical values unavailable; the row itself is valid
    bool multistable = false;
    double margin_beta = nan, margin_detuning = nan, margin_power = nan;
    bool selected = false;
    std::optional<FluctuationReport> fluct;
    std::string error;
};

/// The stable branch with the largest intracavity intensity, or the
/// requested index. Returns -1 when there is nothing to select.
[[nodiscard]] inline int select_branch(const std::vector<SteadyStateBranch>& branches, std::optional<int> forced) {
    if (forced) return (*forced >= 0 && *forced < static_cast<int>(branches.size())) ? *forced : -1;
    int best = -1;
    for (int i = 0; i < static_cast<int>(branches.size()); ++i)
        if (branches[i].stable && (best < 0 || branches[i].intensity > branches[best].intensity)) best = i;
    return best;
}

namespace detail {

inline void append_error(std::string& e, const std::string& msg) { e += (e.empty() ? "" : "; ") + msg; }

inline std::vector<SweepRow> evaluate_point(const SweepSpec& spec, const SweepSeries& series, int index,
                                            double value) {
    SweepRow base;
    base.series = series.label;
    base.point = index;
    base.axis_value = value;
    try {
        SystemParams sp = series_params(spec, series);
        apply_axis(sp, spec.axis, value);
        NormalizedParams p = normalize(sp);

        std::optional<OptimalOperatingPoint> op;
        if (spec.constraint == SweepConstraint::optimal_detuning) {
            op = optimal_operating_point(p);
            p = op->params;
        }
        base.detuning = p.detuning;
        base.input_power = p.input_power();
        base.duffing = p.duffing;

        std::optional<CriticalValues> crit;
        try {
            crit = critical_values(p);
            base.crit_beta = crit->beta;
            base.crit_detuning = crit->detuning;
            base.crit_power = crit->power;
            base.crit_method = to_string(crit->method);
        } catch (const Error& e) {
            base.crit_error = e.what();
        }

        const auto branches = solve_branches(p);
        int selected = -1;
        if (op) {
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(branches.size()); ++i) {
                const double d = std::abs(branches[i].beta - op->solve.beta);
                if (d < best) {
                    best = d;
                    selected = i;
                }
            }
        } else {
            selected = select_branch(branches, spec.branch);
        }

        std::vector<SweepRow> rows;
        for (int i = 0; i < static_cast<int>(branches.size()); ++i) {
            const auto& b = branches[i];
            SweepRow r = base;
            r.branch_count = static_cast<int>(branches.size());
            r.branch = i;
            r.beta = b.beta;
            r.alpha = b.alpha;
            r.intensity = b.intensity;
            r.eff_detuning = b.eff_detuning;
            r.stable = b.stable;
            r.rh_stable = b.verdict.rh_stable;
            r.near_degenerate = b.near_degenerate;
            r.s1 = b.verdict.s1;
            r.s2 = b.verdict.s2;
            r.s3 = b.verdict.s3;
            r.max_re = b.verdict.max_real;
            r.squeeze = b.frame.squeeze;
            r.mech_freq_t = b.frame.mech_freq;
            r.enhanced_duffing = b.frame.enhanced_duffing;
            r.coupling = b.frame.coupling;
            r.beta_large = b.validity.beta_large;
            r.duffing_small = b.validity.duffing_small;
            if (crit) {
                const auto m = multistability_test(p, b, *crit);
                r.multistable = m.inside;
                r.margin_beta = m.beta_margin;
                r.margin_detuning = m.detuning_margin;
                r.margin_power = m.power_margin;
            }
            r.selected = i == selected;
            const SteadyStateBranch& fb = op ? op->branch : b;
            // fluctuation columns stay null on unstable branches
            if (r.selected && spec.fluctuations && fb.stable) {
                try {
                    r.fluct = fluctuation_report(fb, p);
                } catch (const Error& e) {
                    append_error(r.error, std::string("fluctuations: ") + e.what());
                }
            }
            if (r.beta < spec.beta_floor) continue;
            rows.push_back(std::move(r));
        }
        if (branches.empty()) {
            append_error(base.error, "no real steady state");
            rows.push_back(base);
        }
        return rows;
    } catch (const std::exception& e) {
        append_error(base.error, e.what());
        return {base};
    }
}

// Nearest-beta continuation of branch labels along the axis within a series.
inline void assign_traces(std::vector<std::vector<SweepRow>>& points) {
    std::vector<std::pair<int, double>> prev;  // (trace, beta)
    int next_id = 0;
    for (auto& rows : points) {
        std::vector<std::pair<int, double>> cur;
        std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].branch < 0) continue;
            for (std::size_t j = 0; j < prev.size(); ++j)
                pairs.emplace_back(std::abs(rows[i].beta - prev[j].second), i, j);
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<bool> row_done(rows.size(), false), prev_done(prev.size(), false);
        for (const auto& [d, i, j] : pairs) {
            if (row_done[i] || prev_done[j]) continue;
            rows[i].trace = prev[j].first;
            row_done[i] = prev_done[j] = true;
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].branch < 0) continue;
            if (!row_done[i]) rows[i].trace = next_id++;
            cur.emplace_back(rows[i].trace, rows[i].beta);
        }
        if (!cur.empty()) prev = std::move(cur);
    }
}

}  // namespace detail

struct SweepResult {
    std::vector<SweepRow> rows;
    int total_points = 0;
    int failed_points = 0;  // points that produced no branch row
    [[nodiscard]] bool all_failed() const { return total_points > 0 && failed_points == total_points; }
};

[[nodiscard]] inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    validate(spec);
    validate(spec.fixed);
    std::vector<SweepSeries> series = spec.series;
    if (series.empty()) series.push_back({"", {}});
    for (const auto& s : series) validate(series_params(spec, s));
    const auto values = axis_values(spec);

    const std::size_t n = series.size() * values.size();
    std::vector<std::vector<SweepRow>> results(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            const std::size_t si = k / values.size();
            const std::size_t pi = k % values.size();
            results[k] = detail::evaluate_point(spec, series[si], static_cast<int>(pi), values[pi]);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    SweepResult out;
    out.total_points = static_cast<int>(n);
    for (std::size_t si = 0; si < series.size(); ++si) {
        std::vector<std::vector<SweepRow>> pts(results.begin() + static_cast<long>(si * values.size()),
                                               results.begin() + static_cast<long>((si + 1) * values.size()));
        detail::assign_traces(pts);
        for (auto& rows : pts) {
            const bool ok = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.branch >= 0; });
            const bool dropped = rows.empty();
            if (!ok && !dropped) ++out.failed_points;
            for (auto& r : rows) out.rows.push_back(std::move(r));
        }
    }
    return out;
}

[[nodiscard]] inline Table to_table(const std::vector<SweepRow>& rows) {
    Table t;
    t.columns = {"series", "point", "axis_value", "detuning", "input_power", "duffing", "branch_count", "branch",
                 "trace", "beta", "alpha", "intensity", "eff_detuning", "stable", "rh_stable", "near_degenerate",
                 "s1", "s2", "s3", "max_re", "squeeze", "mech_freq_t", "enhanced_duffing", "coupling",
                 "beta_large", "duffing_small", "crit_method", "crit_beta", "crit_detuning", "crit_power", "crit_error",
                 "multistable", "margin_beta", "margin_detuning", "margin_power", "selected", "var_q", "var_p",
                 "var_q_t", "var_p_t", "n_eff", "n_eff_t", "T_eff", "D_q", "D_p", "eta", "error"};
    const auto null = Cell{};
    for (const auto& r : rows) {
        std::vector<Cell> c{r.series, static_cast<long long>(r.point), r.axis_value, r.detuning, r.input_power,
                            r.duffing, static_cast<long long>(r.branch_count)};
        if (r.branch < 0) {
            c.insert(c.end(), {null, null});
        } else {
            c.emplace_back(static_cast<long long>(r.branch));
            c.emplace_back(static_cast<long long>(r.trace));
        }
        c.insert(c.end(), {r.beta, r.alpha, r.intensity, r.eff_detuning});
        if (r.branch < 0)
            c.insert(c.end(), {null, null, null});
        else
            c.insert(c.end(), {r.stable, r.rh_stable, r.near_degenerate});
        c.insert(c.end(), {r.s1, r.s2, r.s3, r.max_re, r.squeeze, r.mech_freq_t, r.enhanced_duffing, r.coupling});
        if (r.branch < 0)
            c.insert(c.end(), {null, null});
        else
            c.insert(c.end(), {r.beta_large, r.duffing_small});
        c.emplace_back(r.crit_method.empty() ? null : Cell{r.crit_method});
        c.insert(c.end(), {r.crit_beta, r.crit_detuning, r.crit_power});
        c.emplace_back(r.crit_error);
        c.emplace_back(r.branch < 0 || std::isnan(r.margin_beta) ? null : Cell{r.multistable});
        c.insert(c.end(), {r.margin_beta, r.margin_detuning, r.margin_power});
        c.emplace_back(r.branch < 0 ? null : Cell{r.selected});
        if (r.fluct) {
            const auto& f = *r.fluct;
            c.insert(c.end(), {f.var_q, f.var_p, f.var_q_t, f.var_p_t, f.n_eff, f.n_eff_t, f.T_eff, f.D_q, f.D_p,
                               f.eta});
        } else {
            for (int i = 0; i < 10; ++i) c.push_back(null);
        }
        c.emplace_back(r.error);
        t.rows.push_back(std::move(c));
    }
    return t;
}

}  // namespace optomech
