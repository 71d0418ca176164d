#pragma once

// Sweep recipes for the figure set. Each preset lists the parameters its
// caption fixes, the figure it inherits the rest from, and the series values
// chosen where the caption only says "different values".

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/sweep.hpp"

namespace optomech {

using Settings = std::vector<std::pair<std::string, double>>;

struct PresetRecipe {
    std::string name;
    std::string inherits;  // empty for the root set
    Settings settings;     // applied on top of the inherited parameters
    std::string caption;   // parameter summary of the caption, for audit
};

[[nodiscard]] inline const std::vector<PresetRecipe>& preset_recipes() {
    static const std::vector<PresetRecipe> recipes{
        {"fig2", "",
         {{"cavity_length", 1e-3}, {"laser_wavelength", 512e-9}, {"input_power_mw", 3.0}, {"finesse", 1.67e4},
          {"effective_mass", 5e-12}, {"mech_freq_hz", 5e6}, {"quality_factor", 1e5}, {"opa_gain", 0.0},
          {"opa_phase", 0.0}, {"bath_temp", 0.0}},
         "L = 1 mm; lambda_L = 512 nm; P_in = 3 mW; F = 1.67e4 (kappa_c ~ 0.9 omega_m); m = 5 ng; "
         "omega_m/2pi = 5 MHz; Q_m = 1e5; G0 = 0; axis Delta/omega_m; series lambda"},
        {"fig3", "fig2",
         {{"mech_freq_hz", 2e6}, {"kappa_over_omegam", 0.2}, {"opa_gain_over_kappa", 0.3},
          {"opa_phase_over_pi", 0.125}, {"input_power_mw", 3.0}},
         "omega_m/2pi = 2 MHz; kappa_c = 0.2 omega_m; G0 = 0.3 kappa_c; theta = pi/8; P_in = 3 mW; "
         "rest as fig2; axis Delta/omega_m; series lambda"},
        {"fig4", "fig3",
         {{"duffing_over_omegam", 1e-4}, {"detuning_over_omegam", 0.7998}},
         "Delta = 0.7998 omega_m; lambda = 1e-4 omega_m; (a) G0 = 0.3 kappa_c, series theta; "
         "(b) theta = 5pi/3, series G0; rest as fig3; axis P_in"},
        {"fig5", "fig4",
         {{"mech_freq_hz", 10e6}, {"quality_factor", 1e6}, {"kappa_over_omegam", 0.3},
          {"laser_wavelength", 1064e-9}, {"input_power_mw", 3.0}, {"bath_temp", 25e-3}, {"opa_gain", 0.0},
          {"opa_phase", 0.0}, {"duffing_over_omegam", 1e-4}, {"detuning_over_omegam", 0.7998}},
         "G0 = 0; omega_m/2pi = 10 MHz; Q_m = 1e6; kappa_c = 0.3 omega_m; lambda_L = 1064 nm; P_in = 3 mW; "
         "T = 25 mK; rest as fig4; axis Delta/omega_m; series lambda"},
        {"fig6", "fig5",
         {{"opa_gain", 0.0}, {"kappa_over_omegam", 0.3}, {"input_power_mw", 3.0}},
         "G0 = 0; kappa_c = 0.3 omega_m; P_in = 3 mW; rest as fig5; axis Delta/omega_m; series lambda"},
        {"fig7", "fig6",
         {{"opa_gain", 0.0}, {"kappa_over_omegam", 0.3}},
         "G0 = 0; kappa_c = 0.3 omega_m; Delta' = Omega_m; series P_in = 3, 5, 8, 12 mW; rest as fig6; "
         "axis lambda/omega_m"},
        {"fig8", "fig7",
         {{"opa_gain", 0.0}, {"kappa_over_omegam", 0.3}},
         "G0 = 0; kappa_c = 0.3 omega_m; Delta' = Omega_m; series P_in; rest as fig7; axis lambda/omega_m"},
        {"fig9", "fig8",
         {{"input_power_mw", 3.0}, {"kappa_over_omegam", 0.3}, {"opa_gain_over_kappa", 0.3}},
         "P_in = 3 mW; kappa_c = 0.3 omega_m; G0 = 0.3 kappa_c; Delta' = Omega_m; series theta plus G0 = 0; "
         "rest as fig8; axis lambda/omega_m"},
        {"fig10", "fig9",
         {{"input_power_mw", 3.0}},
         "P_in = 3 mW; lambda in {0, 4e-9 omega_m}; (G0, theta) in {(0.3 kappa_c, pi), (0.3 kappa_c, 1.3 pi), "
         "(0.6 kappa_c, 0.71 pi), (0, -)}; Delta' = Omega_m; rest as fig9; axis Delta/omega_m"},
        {"fig11", "fig10",
         {{"kappa_over_omegam", 0.3}},
         "kappa_c = 0.3 omega_m; (a) G0 = kappa_c, series theta; (b) theta = 0, G0 in {0, 0.7, 1.2, 1.6, 2.8} "
         "kappa_c; Delta' = Omega_m; rest as fig10; axis lambda/omega_m"},
        {"fig12", "fig11",
         {{"duffing_over_omegam", 1e-4}, {"input_power_mw", 3.0}, {"kappa_over_omegam", 0.3},
          {"opa_phase_over_pi", 0.5}},
         "lambda = 1e-4 omega_m; P_in = 3 mW; kappa_c = 0.3 omega_m; theta = pi/2; series G0; beta_s >= 40; "
         "rest as fig11; axis Delta/omega_m"},
    };
    return recipes;
}

[[nodiscard]] inline std::vector<std::string> figure_names() {
    std::vector<std::string> n;
    for (const auto& r : preset_recipes()) n.push_back(r.name);
    return n;
}

[[nodiscard]] inline const PresetRecipe& preset_recipe(const std::string& name) {
    for (const auto& r : preset_recipes())
        if (r.name == name) return r;
    throw InvalidParameter("unknown figure preset '" + name + "'");
}

/// Parameters of a preset with its inheritance chain resolved root first.
[[nodiscard]] inline SystemParams preset_params(const std::string& name) {
    std::vector<const PresetRecipe*> chain;
    for (const PresetRecipe* r = &preset_recipe(name);; r = &preset_recipe(r->inherits)) {
        chain.push_back(r);
        if (r->inherits.empty()) break;
    }
    SystemParams p;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        for (const auto& [k, v] : (*it)->settings) apply_setting(p, k, v);
    return p;
}

namespace detail {

inline std::string pi_label(double over_pi) { return format_number(over_pi, 4) + "pi"; }

inline std::vector<SweepSeries> duffing_series(std::initializer_list<double> values) {
    std::vector<SweepSeries> s;
    for (double v : values) s.push_back({"lambda=" + format_number(v, 4), {{"duffing_over_omegam", v}}});
    return s;
}

inline std::vector<SweepSeries> power_series(std::initializer_list<double> mw) {
    std::vector<SweepSeries> s;
    for (double v : mw) s.push_back({"P=" + format_number(v, 4) + "mW", {{"input_power_mw", v}}});
    return s;
}

}  // namespace detail

[[nodiscard]] inline SweepSpec figure_preset(const std::string& name) {
    const PresetRecipe& recipe = preset_recipe(name);
    SweepSpec s;
    s.name = name;
    s.fixed = preset_params(name);
    s.caption = recipe.caption;
    using detail::duffing_series;
    using detail::pi_label;
    using detail::power_series;

    if (name == "fig2") {
        s.axis = SweepAxis::detuning;
        s.start = 0.0, s.stop = 3.0, s.points = 601;
        s.series = duffing_series({0.0, 1e-5, 1e-4});
    } else if (name == "fig3") {
        s.axis = SweepAxis::detuning;
        s.start = 0.0, s.stop = 10.0, s.points = 1001;
        s.series = duffing_series({0.0, 1e-6, 1e-5, 1e-4});
    } else if (name == "fig4") {
        s.axis = SweepAxis::input_power;
        s.start = 0.0, s.stop = 20e-3, s.points = 401;
        for (double th : {0.125, 0.5, 1.0, 5.0 / 3.0})
            s.series.push_back({"a:theta=" + pi_label(th), {{"opa_gain_over_kappa", 0.3}, {"opa_phase_over_pi", th}}});
        for (double g : {0.0, 0.1, 0.2, 0.3})
            s.series.push_back({"b:G0=" + format_number(g, 4) + "kappa",
                                {{"opa_gain_over_kappa", g}, {"opa_phase_over_pi", 5.0 / 3.0}}});
    } else if (name == "fig5") {
        s.axis = SweepAxis::detuning;
        s.start = 0.0, s.stop = 3.0, s.points = 601;
        s.series = duffing_series({0.0, 1e-6, 1e-5, 1e-4});
    } else if (name == "fig6") {
        s.axis = SweepAxis::detuning;
        s.start = 0.0, s.stop = 3.0, s.points = 601;
        s.series = duffing_series({0.0, 1e-9, 3e-9, 1e-8});
    } else if (name == "fig7") {
        s.axis = SweepAxis::duffing;
        s.scale = AxisScale::log;
        s.start = 1e-11, s.stop = 1e-6, s.points = 151;
        s.constraint = SweepConstraint::optimal_detuning;
        s.series = power_series({3.0, 5.0, 8.0, 12.0});
    } else if (name == "fig8") {
        s.axis = SweepAxis::duffing;
        s.scale = AxisScale::log;
        s.start = 1e-10, s.stop = 1e-5, s.points = 151;
        s.constraint = SweepConstraint::optimal_detuning;
        s.series = power_series({3.0, 5.0, 8.0, 12.0});
    } else if (name == "fig9") {
        s.axis = SweepAxis::duffing;
        s.scale = AxisScale::log;
        s.start = 1e-11, s.stop = 1e-6, s.points = 151;
        s.constraint = SweepConstraint::optimal_detuning;
        for (double th : {0.0, 0.5, 1.0, 1.5})
            s.series.push_back({"theta=" + pi_label(th), {{"opa_phase_over_pi", th}}});
        s.series.push_back({"G0=0", {{"opa_gain", 0.0}}});
    } else if (name == "fig10") {
        // Delta is the axis here, so the detuning is not pinned to Omega_m.
        s.axis = SweepAxis::detuning;
        s.start = 0.0, s.stop = 3.0, s.points = 601;
        const std::vector<std::pair<double, double>> opa{{0.3, 1.0}, {0.3, 1.3}, {0.6, 0.71}, {0.0, 0.0}};
        for (double lam : {0.0, 4e-9})
            for (const auto& [g, th] : opa)
                s.series.push_back({"lambda=" + format_number(lam, 4) + ",G0=" + format_number(g, 4) +
                                        "kappa,theta=" + pi_label(th),
                                    {{"duffing_over_omegam", lam}, {"opa_gain_over_kappa", g}, {"opa_phase_over_pi", th}}});
    } else if (name == "fig11") {
        s.axis = SweepAxis::duffing;
        s.scale = AxisScale::log;
        s.start = 1e-10, s.stop = 1e-5, s.points = 151;
        s.constraint = SweepConstraint::optimal_detuning;
        for (double th : {0.0, 0.5, 1.0, 1.5})
            s.series.push_back({"a:theta=" + pi_label(th), {{"opa_gain_over_kappa", 1.0}, {"opa_phase_over_pi", th}}});
        s.series.push_back({"a:G0=0", {{"opa_gain", 0.0}}});
        for (double g : {0.0, 0.7, 1.2, 1.6, 2.8})
            s.series.push_back({"b:G0=" + format_number(g, 4) + "kappa",
                                {{"opa_gain_over_kappa", g}, {"opa_phase", 0.0}}});
    } else if (name == "fig12") {
        s.axis = SweepAxis::detuning;
        s.start = 0.0, s.stop = 5.0, s.points = 1001;
        s.beta_floor = 40.0;
        for (double g : {0.0, 0.1, 0.2, 0.3})
            s.series.push_back({"G0=" + format_number(g, 4) + "kappa", {{"opa_gain_over_kappa", g}}});
    }
    return s;
}

/// SweepSpec from a config document: SystemParams fields at top level and a
/// "sweep" object with axis, start, stop, points, scale, constraint,
/// beta_floor, branch and series [{label, set: {key: value}}].
[[nodiscard]] inline SweepSpec sweep_from_json(const nlohmann::ordered_json& doc, SystemParams base) {
    apply_json(base, doc, {"sweep"});
    SweepSpec s;
    s.name = "custom";
    s.fixed = base;
    if (!doc.contains("sweep")) return s;
    const auto& j = doc.at("sweep");
    if (!j.is_object()) throw InvalidParameter("'sweep' must be an object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "axis") s.axis = parse_axis(v.get<std::string>());
            else if (key == "start") s.start = v.get<double>();
            else if (key == "stop") s.stop = v.get<double>();
            else if (key == "points") s.points = v.get<int>();
            else if (key == "scale") {
                const auto sc = v.get<std::string>();
                if (sc == "linear") s.scale = AxisScale::linear;
                else if (sc == "log") s.scale = AxisScale::log;
                else throw InvalidParameter("unknown scale '" + sc + "'");
            } else if (key == "constraint") s.constraint = parse_constraint(v.get<std::string>());
            else if (key == "beta_floor") s.beta_floor = v.get<double>();
            else if (key == "branch") s.branch = v.get<int>();
            else if (key == "name") s.name = v.get<std::string>();
            else if (key == "series") {
                for (const auto& e : v) {
                    SweepSeries ser;
                    ser.label = e.value("label", "");
                    if (e.contains("set"))
                        for (const auto& [k, x] : e.at("set").items()) ser.settings.emplace_back(k, x.get<double>());
                    s.series.push_back(std::move(ser));
                }
            } else
                throw InvalidParameter("unknown sweep field '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter(std::string("sweep: ") + e.what());
    }
    return s;
}

}  // namespace optomech
