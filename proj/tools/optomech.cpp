// Command-line front end: steady states, critical values, stability,
// fluctuation reports, sweeps and figure presets.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optomech/optomech.hpp"

namespace om = optomech;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_failed = 3;

struct CommonOptions {
    std::string preset = "fig2";
    std::string config;
    std::vector<std::string> sets;
    std::string format = "text";
    std::string out;
    std::optional<double> detuning_over_omegam;
    std::optional<int> branch;
    unsigned threads = 0;
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--preset", o.preset, "Figure preset supplying the base parameters")->capture_default_str();
    sub->add_option("--config", o.config, "JSON file with SystemParams fields (SI) and an optional sweep block");
    sub->add_option("--set", o.sets, "Parameter override key=value (repeatable, applied in order)");
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", o.out, "Write output to this file instead of stdout");
    sub->add_option("--detuning-over-omegam", o.detuning_over_omegam, "Bare detuning in units of omega_m");
    sub->add_option("--branch", o.branch, "Branch index (ascending beta_s) for fluctuation output");
    sub->add_option("--threads", o.threads, "Worker threads for sweeps (0 = hardware)");
}

om::OutputFormat output_format(const CommonOptions& o) {
    if (o.format == "csv") return om::OutputFormat::csv;
    if (o.format == "json") return om::OutputFormat::json;
    return om::OutputFormat::text;
}

nlohmann::ordered_json load_config(const CommonOptions& o) {
    return o.config.empty() ? nlohmann::ordered_json::object() : om::read_json_file(o.config);
}

om::SystemParams resolve_params(const CommonOptions& o, const nlohmann::ordered_json& doc) {
    om::SystemParams p = om::preset_params(o.preset);
    om::apply_json(p, doc, {"sweep"});
    for (const auto& s : o.sets) om::apply_assignment(p, s);
    if (o.detuning_over_omegam) om::apply_setting(p, "detuning_over_omegam", *o.detuning_over_omegam);
    om::validate(p);
    return p;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw om::InvalidParameter("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string eigen_text(const std::complex<double>& z) {
    return om::format_number(z.real(), 8) + (z.imag() < 0 ? "-" : "+") + om::format_number(std::abs(z.imag()), 8) + "i";
}

const char* eigen_class_name(om::EigenStability c) {
    switch (c) {
        case om::EigenStability::stable: return "stable";
        case om::EigenStability::marginal: return "marginal";
        case om::EigenStability::unstable: return "unstable";
    }
    return "?";
}

int cmd_steady_state(const CommonOptions& o) {
    const auto p = om::normalize(resolve_params(o, load_config(o)));
    const auto branches = om::solve_branches(p);
    om::Table t;
    t.columns = {"branch", "beta", "alpha", "intensity", "eff_detuning", "stable", "near_degenerate",
                 "beta_large", "duffing_small", "quintic_residual"};
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto& b = branches[i];
        t.rows.push_back({static_cast<long long>(i), b.beta, b.alpha, b.intensity, b.eff_detuning, b.stable,
                          b.near_degenerate, b.validity.beta_large, b.validity.duffing_small,
                          om::quintic_residual(p, b.beta)});
    }
    Output out(o.out);
    om::write_table(out.stream(), t, output_format(o));
    return exit_ok;
}

struct Grid {
    double start = 0.0, stop = 0.0;
    int n = 1;
};

Grid parse_grid(const std::string& s) {
    Grid g;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.n) || c1 != ':' || c2 != ':' || g.n < 1)
        throw om::InvalidParameter("grid must be start:stop:points, got '" + s + "'");
    return g;
}

double grid_value(const Grid& g, int i) {
    return g.n == 1 ? g.start : g.start + (g.stop - g.start) * i / (g.n - 1);
}

om::Cell cv_cell(double v) { return std::isfinite(v) ? om::Cell{v} : om::Cell{}; }

int cmd_critical(const CommonOptions& o, const std::string& g0_grid, const std::string& theta_grid) {
    const auto sp = resolve_params(o, load_config(o));
    om::Table t;
    if (!g0_grid.empty() || !theta_grid.empty()) {
        const Grid gg = g0_grid.empty() ? Grid{sp.opa_gain / om::resolved_cavity_decay(sp), 0.0, 1} : parse_grid(g0_grid);
        const Grid tg = theta_grid.empty() ? Grid{sp.opa_phase, 0.0, 1} : parse_grid(theta_grid);
        t.columns = {"opa_gain_over_kappa", "opa_phase", "method", "beta", "detuning", "power", "error"};
        for (int i = 0; i < gg.n; ++i)
            for (int j = 0; j < tg.n; ++j) {
                om::SystemParams q = sp;
                om::apply_setting(q, "opa_gain_over_kappa", grid_value(gg, i));
                q.opa_phase = grid_value(tg, j);
                std::vector<om::Cell> row{grid_value(gg, i), grid_value(tg, j)};
                try {
                    const auto cv = om::critical_values(om::normalize(q));
                    row.insert(row.end(), {std::string(om::to_string(cv.method)), cv.beta, cv.detuning, cv.power, std::string()});
                } catch (const om::InvalidParameter&) {
                    throw;
                } catch (const om::Error& e) {
                    row.insert(row.end(), {{}, {}, {}, {}, std::string(e.what())});
                }
                t.rows.push_back(std::move(row));
            }
    } else {
        const auto p = om::normalize(sp);
        t.columns = {"method", "beta", "detuning", "power", "power_mW", "trusted", "series_parameter", "error"};
        auto add = [&](const char* name, auto fn) {
            try {
                const om::CriticalValues cv = fn(p);
                t.rows.push_back({std::string(name), cv.beta, cv.detuning, cv.power, 1e3 * cv.power, cv.trusted,
                                  cv_cell(cv.series_parameter), std::string()});
            } catch (const om::Error& e) {
                t.rows.push_back({std::string(name), {}, {}, {}, {}, {}, {}, std::string(e.what())});
            }
        };
        add("exact", [](const auto& q) { return om::critical_values_exact(q); });
        add("perturbative", [](const auto& q) { return om::critical_values_perturbative(q); });
        add("harmonic", [](const auto& q) { return om::critical_values_harmonic(q); });
    }
    Output out(o.out);
    om::write_table(out.stream(), t, output_format(o));
    return exit_ok;
}

int cmd_stability(const CommonOptions& o) {
    const auto p = om::normalize(resolve_params(o, load_config(o)));
    const auto branches = om::solve_branches(p);
    om::Table t;
    t.columns = {"branch", "beta", "eff_detuning", "s1", "s2", "s3", "rh_stable", "eigen_class", "max_re",
                 "regime_sign", "eig1", "eig2", "eig3", "eig4"};
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto& b = branches[i];
        const auto& v = b.verdict;
        t.rows.push_back({static_cast<long long>(i), b.beta, b.eff_detuning, v.s1, v.s2, v.s3, v.rh_stable,
                          std::string(eigen_class_name(v.eigen_class)), v.max_real,
                          static_cast<long long>(v.regime_sign), eigen_text(v.eigenvalues[0]),
                          eigen_text(v.eigenvalues[1]), eigen_text(v.eigenvalues[2]), eigen_text(v.eigenvalues[3])});
    }
    Output out(o.out);
    om::write_table(out.stream(), t, output_format(o));
    return exit_ok;
}

int cmd_fluctuations(const CommonOptions& o, const std::string& method, bool optimal) {
    om::NormalizedParams p = om::normalize(resolve_params(o, load_config(o)));
    om::SteadyStateBranch branch;
    int index = -1;
    if (optimal) {
        const auto op = om::optimal_operating_point(p);
        p = op.params;
        branch = op.branch;
        index = 0;
    } else {
        const auto branches = om::solve_branches(p);
        index = om::select_branch(branches, o.branch);
        if (index < 0) {
            std::cerr << "optomech: no stable branch to report on (use --branch to force one)\n";
            return exit_failed;
        }
        branch = branches[static_cast<std::size_t>(index)];
    }

    std::vector<om::CovarianceMethod> methods;
    if (method != "spectral") methods.push_back(om::CovarianceMethod::lyapunov);
    if (method != "lyapunov") methods.push_back(om::CovarianceMethod::spectral);

    om::Table t;
    t.columns = {"method", "branch", "beta", "detuning", "eff_detuning", "squeeze", "var_q", "var_p", "var_q_t",
                 "var_p_t", "n_eff", "n_eff_t", "T_eff", "D_q", "D_p", "eta", "clamped", "beta_large",
                 "duffing_small"};
    std::vector<om::FluctuationReport> reps;
    for (auto m : methods) {
        const auto r = om::fluctuation_report(branch, p, m);
        reps.push_back(r);
        t.rows.push_back({std::string(om::to_string(m)), static_cast<long long>(index), branch.beta, p.detuning,
                          branch.eff_detuning, branch.frame.squeeze, r.var_q, r.var_p, r.var_q_t, r.var_p_t, r.n_eff,
                          r.n_eff_t, r.T_eff, r.D_q, r.D_p, r.eta, r.clamped, r.validity.beta_large,
                          r.validity.duffing_small});
    }
    Output out(o.out);
    om::write_table(out.stream(), t, output_format(o));
    if (reps.size() == 2) {
        const double dq = std::abs(reps[0].var_q_t - reps[1].var_q_t) / std::abs(reps[0].var_q_t);
        const double dp = std::abs(reps[0].var_p_t - reps[1].var_p_t) / std::abs(reps[0].var_p_t);
        std::cerr << "lyapunov vs spectral: max relative difference " << om::format_number(std::max(dq, dp), 3)
                  << '\n';
    }
    return exit_ok;
}

int run_and_write(const om::SweepSpec& spec, const CommonOptions& o) {
    const auto res = om::run_sweep(spec, o.threads);
    Output out(o.out);
    om::write_table(out.stream(), om::to_table(res.rows), output_format(o));
    if (res.failed_points > 0)
        std::cerr << "optomech: " << res.failed_points << " of " << res.total_points << " points failed\n";
    return res.all_failed() ? exit_failed : exit_ok;
}

struct SweepCli {
    std::string axis, range, constraint;
    bool log = false;
};

int cmd_sweep(const CommonOptions& o, const SweepCli& s) {
    const auto doc = load_config(o);
    om::SweepSpec spec = om::sweep_from_json(doc, om::preset_params(o.preset));
    for (const auto& a : o.sets) om::apply_assignment(spec.fixed, a);
    if (o.detuning_over_omegam) om::apply_setting(spec.fixed, "detuning_over_omegam", *o.detuning_over_omegam);
    if (!s.axis.empty()) spec.axis = om::parse_axis(s.axis);
    if (!s.range.empty()) {
        const Grid g = parse_grid(s.range);
        spec.start = g.start;
        spec.stop = g.stop;
        spec.points = g.n;
    }
    if (s.log) spec.scale = om::AxisScale::log;
    if (!s.constraint.empty()) spec.constraint = om::parse_constraint(s.constraint);
    if (o.branch) spec.branch = o.branch;
    if (!doc.contains("sweep") && s.range.empty())
        throw om::InvalidParameter("sweep needs a range (--range start:stop:points or a 'sweep' config block)");
    return run_and_write(spec, o);
}

int cmd_figure(const CommonOptions& o, const std::string& name, int points, bool list) {
    if (list) {
        for (const auto& n : om::figure_names()) std::cout << n << "  " << om::preset_recipe(n).caption << '\n';
        return exit_ok;
    }
    if (name.empty()) throw om::InvalidParameter("figure: name required (see --list)");
    om::SweepSpec spec = om::figure_preset(name);
    if (!o.config.empty()) om::apply_json(spec.fixed, load_config(o), {"sweep"});
    for (const auto& a : o.sets) om::apply_assignment(spec.fixed, a);
    if (points > 0) spec.points = points;
    if (o.branch) spec.branch = o.branch;
    return run_and_write(spec, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, stability and fluctuations of a driven optomechanical cavity with an OPA and a "
                 "Duffing mirror"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* ss = app.add_subcommand("steady-state", "All real steady-state branches");
    add_common(ss, common);

    auto* cr = app.add_subcommand("critical", "Critical values by the exact, perturbative and harmonic routes");
    add_common(cr, common);
    std::string g0_grid, theta_grid;
    cr->add_option("--g0-grid", g0_grid, "G0/kappa_c grid start:stop:points (exact route surface)");
    cr->add_option("--theta-grid", theta_grid, "theta grid start:stop:points [rad]");

    auto* st = app.add_subcommand("stability", "Routh-Hurwitz terms and drift eigenvalues per branch");
    add_common(st, common);

    auto* fl = app.add_subcommand("fluctuations", "Covariance-based fluctuation report");
    add_common(fl, common);
    std::string method = "both";
    bool optimal = false;
    fl->add_option("--method", method, "Covariance route")
        ->check(CLI::IsMember({"lyapunov", "spectral", "both"}))
        ->capture_default_str();
    fl->add_flag("--optimal-detuning", optimal, "Pin Delta' to Omega_m before reporting");

    auto* sw = app.add_subcommand("sweep", "Parameter sweep (range from --range or the config 'sweep' block)");
    add_common(sw, common);
    SweepCli swc;
    sw->add_option("--axis", swc.axis, "detuning | input_power | duffing | opa_gain | opa_phase");
    sw->add_option("--range", swc.range, "start:stop:points in axis units");
    sw->add_flag("--log", swc.log, "Logarithmic axis spacing");
    sw->add_option("--constraint", swc.constraint, "none | optimal_detuning");

    auto* fg = app.add_subcommand("figure", "Run a figure preset sweep");
    add_common(fg, common);
    std::string fig_name;
    int fig_points = 0;
    bool fig_list = false;
    fg->add_option("name", fig_name, "Preset name (fig2 ... fig12)");
    fg->add_option("--points", fig_points, "Override the number of axis points");
    fg->add_flag("--list", fig_list, "List presets and their parameter summaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid;
    }

    try {
        if (*ss) return cmd_steady_state(common);
        if (*cr) return cmd_critical(common, g0_grid, theta_grid);
        if (*st) return cmd_stability(common);
        if (*fl) return cmd_fluctuations(common, method, optimal);
        if (*sw) return cmd_sweep(common, swc);
        if (*fg) return cmd_figure(common, fig_name, fig_points, fig_list);
    } catch (const om::InvalidParameter& e) {
        std::cerr << "optomech: invalid configuration: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "optomech: " << e.what() << '\n';
        return exit_failed;
    }
    return exit_ok;
}
