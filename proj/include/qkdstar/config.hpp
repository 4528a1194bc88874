#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qkdstar/errors.hpp"
#include "qkdstar/mac_rates.hpp"
#include "qkdstar/network_model.hpp"

namespace qkdstar {

// ============================================================================
// Flat key-value configuration files: physics parameters plus an optional
// parameter sweep. '#' starts a comment; unknown or duplicate keys are hard
// errors so typos cannot silently change the physics.
// ============================================================================

/// One parameter sweep: evaluate each scheme at each value of one variable.
struct SweepSpec {
    std::string variable;             ///< SystemParams field name or "n_active"
    std::vector<double> values;       ///< sweep points, ascending emission order
    std::vector<SchemeSpec> schemes;  ///< schemes evaluated at every point
    int n_active = 0;                 ///< fixed pair count; 0 = full (n_star)
    bool ignore_capacity = false;     ///< allow CDMA past code capacity
    std::string output;               ///< file path; empty = stdout
    std::string format = "csv";      ///< csv | keyvalue
};

struct LoadedConfig {
    SystemParams params;
    std::vector<SweepSpec> sweeps;  ///< at most one per file
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[nodiscard]] inline double parse_number(const std::string& text,
                                         const std::string& key) {
    const std::string t = trim(text);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw config_error("key '" + key + "': cannot parse number from '" + t + "'");
    return value;
}

[[nodiscard]] inline long parse_integer(const std::string& text,
                                        const std::string& key) {
    const double v = parse_number(text, key);
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9)
        throw config_error("key '" + key + "': expected an integer, got '" +
                           trim(text) + "'");
    return static_cast<long>(r);
}

[[nodiscard]] inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

} // namespace detail

/// Parses a scheme token: `tdma` | `cdma:w=<int>` | `lbs:k=<int>`, optionally
/// wrapped as `wdm(<channels>,<alpha_xt>):<inner>`.
[[nodiscard]] inline SchemeSpec parse_scheme(const std::string& token) {
    std::string t = detail::trim(token);
    SchemeSpec spec;
    if (t.rfind("wdm(", 0) == 0) {
        const auto close = t.find(')');
        if (close == std::string::npos || close + 1 >= t.size() || t[close + 1] != ':')
            throw config_error("scheme '" + token +
                               "': expected wdm(<channels>,<alpha_xt>):<inner>");
        const auto args = detail::split(t.substr(4, close - 4), ',');
        if (args.size() != 2)
            throw config_error("scheme '" + token + "': wdm needs two arguments");
        WdmParams wdm;
        wdm.n_channels = static_cast<int>(detail::parse_integer(args[0], "wdm channels"));
        wdm.alpha_xt = detail::parse_number(args[1], "wdm alpha_xt");
        spec.wdm = wdm;
        t = detail::trim(t.substr(close + 2));
    }
    if (t == "tdma") {
        spec.kind = SchemeKind::tdma;
    } else if (t == "cdma" || t.rfind("cdma:w=", 0) == 0) {
        spec.kind = SchemeKind::cdma;
        spec.weight = t == "cdma" ? 1
                                  : static_cast<int>(detail::parse_integer(
                                        t.substr(7), "cdma weight"));
        if (spec.weight < 1)
            throw config_error("scheme '" + token + "': cdma weight must be >= 1");
    } else if (t == "lbs" || t.rfind("lbs:k=", 0) == 0) {
        spec.kind = SchemeKind::lbs;
        spec.listen_periods =
            t == "lbs" ? 0 : detail::parse_integer(t.substr(6), "lbs k");
        if (spec.listen_periods < 0)
            throw config_error("scheme '" + token + "': lbs k must be >= 0");
    } else {
        throw config_error("unknown scheme '" + token +
                           "' (expected tdma, cdma:w=<int>, lbs:k=<int>, or a "
                           "wdm(...): wrapper)");
    }
    return spec;
}

/// Loads a config file into validated parameters plus at most one sweep.
/// Every SystemParams key is required except e0 (default 0.5) and dead_time
/// (default 0). A sweep is present iff the `variable` key is present.
[[nodiscard]] inline LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");

    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error(path + ":" + std::to_string(line_no) + ": empty key");
        if (kv.count(key))
            throw config_error(path + ":" + std::to_string(line_no) +
                               ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    static const std::set<std::string> param_keys = {
        "mu",      "gamma_dc", "gamma_xtalk", "b_opt",   "eta_d",   "path_loss_db",
        "n_star",  "n_chips",  "tau_p",       "tau_d",   "tau_c",   "frame_t",
        "dead_time", "f_ec",   "e_d",         "e0"};
    static const std::set<std::string> sweep_keys = {
        "variable", "values", "range", "schemes", "n_active", "ignore_capacity",
        "output",   "format"};
    static const std::set<std::string> optional_params = {"e0", "dead_time"};

    for (const auto& [key, value] : kv)
        if (!param_keys.count(key) && !sweep_keys.count(key))
            throw config_error(path + ": unknown key '" + key + "'");

    LoadedConfig cfg;
    SystemParams& p = cfg.params;
    auto want = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end())
            throw config_error(path + ": missing required key '" + key + "'");
        return it->second;
    };
    p.mu = detail::parse_number(want("mu"), "mu");
    p.gamma_dc = detail::parse_number(want("gamma_dc"), "gamma_dc");
    p.gamma_xtalk = detail::parse_number(want("gamma_xtalk"), "gamma_xtalk");
    p.b_opt = detail::parse_number(want("b_opt"), "b_opt");
    p.eta_d = detail::parse_number(want("eta_d"), "eta_d");
    p.path_loss_db = detail::parse_number(want("path_loss_db"), "path_loss_db");
    p.n_star = static_cast<int>(detail::parse_integer(want("n_star"), "n_star"));
    p.n_chips = static_cast<int>(detail::parse_integer(want("n_chips"), "n_chips"));
    p.tau_p = detail::parse_number(want("tau_p"), "tau_p");
    p.tau_d = detail::parse_number(want("tau_d"), "tau_d");
    p.tau_c = detail::parse_number(want("tau_c"), "tau_c");
    p.frame_t = detail::parse_number(want("frame_t"), "frame_t");
    p.f_ec = detail::parse_number(want("f_ec"), "f_ec");
    p.e_d = detail::parse_number(want("e_d"), "e_d");
    p.dead_time = kv.count("dead_time")
                      ? detail::parse_number(kv.at("dead_time"), "dead_time")
                      : 0.0;
    p.e0 = kv.count("e0") ? detail::parse_number(kv.at("e0"), "e0") : 0.5;

    const auto violations = params_violations(p);
    if (!violations.empty())
        throw config_error(path + ": invalid parameters: " +
                           join_violations(violations));

    const bool has_sweep = kv.count("variable") > 0;
    for (const auto& key : sweep_keys)
        if (!has_sweep && kv.count(key))
            throw config_error(path + ": sweep key '" + key +
                               "' given without 'variable'");
    if (!has_sweep) return cfg;

    SweepSpec sweep;
    sweep.variable = kv.at("variable");
    static const std::set<std::string> sweepable = [] {
        std::set<std::string> s = {"mu",      "gamma_dc", "gamma_xtalk",
                                   "b_opt",   "eta_d",    "path_loss_db",
                                   "n_star",  "n_chips",  "tau_p",
                                   "tau_d",   "tau_c",    "frame_t",
                                   "dead_time", "f_ec",   "e_d",
                                   "e0",      "n_active"};
        return s;
    }();
    if (!sweepable.count(sweep.variable))
        throw config_error(path + ": cannot sweep unknown variable '" +
                           sweep.variable + "'");

    const bool has_values = kv.count("values") > 0;
    const bool has_range = kv.count("range") > 0;
    if (has_values == has_range)
        throw config_error(path + ": a sweep needs exactly one of 'values' or 'range'");
    if (has_values) {
        for (const auto& item : detail::split(kv.at("values"), ','))
            sweep.values.push_back(detail::parse_number(item, "values"));
        if (sweep.values.empty())
            throw config_error(path + ": 'values' must not be empty");
    } else {
        const auto parts = detail::split(kv.at("range"), ',');
        if (parts.size() != 3)
            throw config_error(path + ": 'range' must be start,stop,step");
        const double start = detail::parse_number(parts[0], "range start");
        const double stop = detail::parse_number(parts[1], "range stop");
        const double step = detail::parse_number(parts[2], "range step");
        if (!(step > 0.0)) throw config_error(path + ": range step must be > 0");
        if (stop < start) throw config_error(path + ": range stop must be >= start");
        for (double v = start; v <= stop + step * 1e-9; v += step)
            sweep.values.push_back(v);
    }

    if (!kv.count("schemes"))
        throw config_error(path + ": missing required key 'schemes'");
    for (const auto& token : detail::split(kv.at("schemes"), ';'))
        if (!token.empty()) sweep.schemes.push_back(parse_scheme(token));
    if (sweep.schemes.empty())
        throw config_error(path + ": 'schemes' must name at least one scheme");

    if (kv.count("n_active")) {
        const std::string na = kv.at("n_active");
        if (na == "full") {
            sweep.n_active = 0;
        } else {
            sweep.n_active = static_cast<int>(detail::parse_integer(na, "n_active"));
            if (sweep.n_active < 1)
                throw config_error(path + ": n_active must be >= 1 or 'full'");
        }
    }
    if (kv.count("ignore_capacity")) {
        const std::string flag = kv.at("ignore_capacity");
        if (flag == "true") sweep.ignore_capacity = true;
        else if (flag == "false") sweep.ignore_capacity = false;
        else throw config_error(path + ": ignore_capacity must be true or false");
    }
    if (kv.count("output")) sweep.output = kv.at("output");
    if (kv.count("format")) {
        sweep.format = kv.at("format");
        if (sweep.format != "csv" && sweep.format != "keyvalue")
            throw config_error(path + ": format must be csv or keyvalue");
    }
    cfg.sweeps.push_back(std::move(sweep));
    return cfg;
}

/// Assigns one swept variable on a parameter record; "n_active" is handled by
/// the sweep driver, not here.
inline void apply_variable(SystemParams& p, const std::string& name, double value) {
    auto as_int = [&](const char* what) {
        const double r = std::round(value);
        if (std::abs(value - r) > 1e-9)
            throw config_error(std::string("swept value for ") + what +
                               " must be an integer");
        return static_cast<int>(r);
    };
    if (name == "mu") p.mu = value;
    else if (name == "gamma_dc") p.gamma_dc = value;
    else if (name == "gamma_xtalk") p.gamma_xtalk = value;
    else if (name == "b_opt") p.b_opt = value;
    else if (name == "eta_d") p.eta_d = value;
    else if (name == "path_loss_db") p.path_loss_db = value;
    else if (name == "n_star") p.n_star = as_int("n_star");
    else if (name == "n_chips") p.n_chips = as_int("n_chips");
    else if (name == "tau_p") p.tau_p = value;
    else if (name == "tau_d") p.tau_d = value;
    else if (name == "tau_c") p.tau_c = value;
    else if (name == "frame_t") p.frame_t = value;
    else if (name == "dead_time") p.dead_time = value;
    else if (name == "f_ec") p.f_ec = value;
    else if (name == "e_d") p.e_d = value;
    else if (name == "e0") p.e0 = value;
    else
        throw config_error("cannot apply unknown sweep variable '" + name + "'");
}

} // namespace qkdstar
