#pragma once

// SystemParams from JSON and from key=value overrides. JSON field names are
// the SystemParams member names (SI units). A few normalised convenience keys
// are also accepted; they are resolved against the values current at the
// moment they are applied, so order matters.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/params.hpp"

namespace optomech {

namespace detail {

inline double parse_double(const std::string& key, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') throw InvalidParameter("setting '" + key + "': not a number: '" + text + "'");
    return v;
}

inline double current_kappa(const SystemParams& p) {
    if (p.cavity_decay) return *p.cavity_decay;
    if (p.finesse && p.cavity_length > 0.0) return cavity_decay_from_finesse(*p.finesse, p.cavity_length);
    throw InvalidParameter("cavity decay must be set before a kappa-relative key");
}

inline double current_omega(const SystemParams& p) {
    if (!(p.mech_freq > 0.0)) throw InvalidParameter("mech_freq must be set before an omega_m-relative key");
    return p.mech_freq;
}

}  // namespace detail

/// Keys understood by apply_setting, in documentation order.
[[nodiscard]] inline const std::vector<std::string>& setting_keys() {
    static const std::vector<std::string> keys{
        "cavity_length", "laser_wavelength", "input_power", "cavity_decay", "finesse",
        "effective_mass", "mech_freq", "quality_factor", "duffing", "opa_gain", "opa_phase",
        "bare_detuning", "bath_temp", "thermal_photons",
        // convenience keys
        "mech_freq_hz", "input_power_mw", "kappa_over_omegam", "duffing_over_omegam",
        "opa_gain_over_kappa", "opa_phase_over_pi", "detuning_over_omegam"};
    return keys;
}

inline void apply_setting(SystemParams& p, const std::string& key, double v) {
    if (key == "cavity_length") p.cavity_length = v;
    else if (key == "laser_wavelength") p.laser_wavelength = v;
    else if (key == "input_power") p.input_power = v;
    else if (key == "cavity_decay") { p.cavity_decay = v; p.finesse.reset(); }
    else if (key == "finesse") { p.finesse = v; p.cavity_decay.reset(); }
    else if (key == "effective_mass") p.effective_mass = v;
    else if (key == "mech_freq") p.mech_freq = v;
    else if (key == "quality_factor") p.quality_factor = v;
    else if (key == "duffing") p.duffing = v;
    else if (key == "opa_gain") p.opa_gain = v;
    else if (key == "opa_phase") p.opa_phase = v;
    else if (key == "bare_detuning") p.bare_detuning = v;
    else if (key == "bath_temp") p.bath_temp = v;
    else if (key == "thermal_photons") p.thermal_photons = v;
    else if (key == "mech_freq_hz") p.mech_freq = two_pi * v;
    else if (key == "input_power_mw") p.input_power = 1e-3 * v;
    else if (key == "kappa_over_omegam") { p.cavity_decay = v * detail::current_omega(p); p.finesse.reset(); }
    else if (key == "duffing_over_omegam") p.duffing = v * detail::current_omega(p);
    else if (key == "opa_gain_over_kappa") p.opa_gain = v * detail::current_kappa(p);
    else if (key == "opa_phase_over_pi") p.opa_phase = v * pi;
    else if (key == "detuning_over_omegam") p.bare_detuning = v * detail::current_omega(p);
    else throw InvalidParameter("unknown parameter key '" + key + "'");
}

/// Parses "key=value".
[[nodiscard]] inline std::pair<std::string, double> parse_assignment(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidParameter("expected key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    return {key, detail::parse_double(key, s.substr(eq + 1))};
}

inline void apply_assignment(SystemParams& p, const std::string& s) {
    const auto [k, v] = parse_assignment(s);
    apply_setting(p, k, v);
}

/// Applies every numeric member of a JSON object in document order. Non-numeric
/// values and unknown keys are errors; keys listed in `skip` are ignored.
inline void apply_json(SystemParams& p, const nlohmann::ordered_json& j, const std::vector<std::string>& skip = {}) {
    if (!j.is_object()) throw InvalidParameter("parameter block must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
        if (value.is_null()) continue;
        if (!value.is_number()) throw InvalidParameter("parameter '" + key + "' must be a number");
        apply_setting(p, key, value.get<double>());
    }
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const SystemParams& p) {
    nlohmann::ordered_json j;
    j["cavity_length"] = p.cavity_length;
    j["laser_wavelength"] = p.laser_wavelength;
    j["input_power"] = p.input_power;
    if (p.cavity_decay) j["cavity_decay"] = *p.cavity_decay;
    if (p.finesse) j["finesse"] = *p.finesse;
    j["effective_mass"] = p.effective_mass;
    j["mech_freq"] = p.mech_freq;
    j["quality_factor"] = p.quality_factor;
    j["duffing"] = p.duffing;
    j["opa_gain"] = p.opa_gain;
    j["opa_phase"] = p.opa_phase;
    j["bare_detuning"] = p.bare_detuning;
    j["bath_temp"] = p.bath_temp;
    j["thermal_photons"] = p.thermal_photons;
    return j;
}

[[nodiscard]] inline nlohmann::ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open config file '" + path + "'");
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidParameter("config '" + path + "': " + e.what());
    }
}

}  // namespace optomech
