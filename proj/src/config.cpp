#include "vtherm/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vtherm {

namespace {

struct Entry {
    std::vector<std::string> tokens;
    int line = 0;
};

std::unordered_map<std::string, Entry> tokenize(const std::string& text) {
    std::unordered_map<std::string, Entry> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::istringstream probe(line);
            std::string t;
            if (probe >> t) {
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + line + "'");
            }
            continue;
        }
        std::istringstream keys(line.substr(0, eq));
        std::string key, extra;
        if (!(keys >> key) || (keys >> extra)) {
            throw ConfigError("line " + std::to_string(lineno) + ": malformed key");
        }
        Entry e;
        e.line = lineno;
        std::istringstream vals(line.substr(eq + 1));
        std::string t;
        while (vals >> t) e.tokens.push_back(t);
        if (e.tokens.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                              "' has no value");
        }
        if (kv.count(key)) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        }
        kv.emplace(std::move(key), std::move(e));
    }
    return kv;
}

double to_number(const std::string& tok, const std::string& key) {
    try {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "': expected a number, got '" + tok + "'");
    }
}

double convert_unit(double v, const std::string& unit, const std::string& key) {
    if (unit == "m" || unit == "K" || unit == "m3/s" || unit == "W/m/K") return v;
    if (unit == "mm") return v * 1e-3;
    if (unit == "cm") return v * 1e-2;
    if (unit == "mL/min") return v * kMlPerMinToM3PerS;
    if (unit == "C") return v + 273.15;
    throw ConfigError("key '" + key + "': unknown unit '" + unit + "'");
}

// value with optional unit token: lengths (m, mm, cm), flow (m3/s, mL/min),
// temperature (K, C). `default_unit` is assumed for bare numbers.
double parse_quantity(const Entry& e, const std::string& key,
                      const std::string& default_unit) {
    if (e.tokens.empty() || e.tokens.size() > 2) {
        throw ConfigError("key '" + key + "': expected '<value> [unit]'");
    }
    const double v = to_number(e.tokens[0], key);
    const std::string& unit = e.tokens.size() == 2 ? e.tokens[1] : default_unit;
    return convert_unit(v, unit, key);
}

std::vector<double> parse_number_list(const Entry& e, const std::string& key,
                                      double scale = 1.0) {
    std::vector<double> out;
    for (const auto& t : e.tokens) {
        out.push_back(to_number(t, key) * scale);
    }
    return out;
}

}  // namespace

double material_kappa(const std::string& name) {
    // Table-1 values, W/m/K
    if (name == "GFRP") return 0.6360;
    if (name == "CFRP") return 3.2110;
    if (name == "In718" || name == "Inconel" || name == "IN718") return 11.2;
    throw ConfigError("unknown material preset '" + name +
                      "' (expected GFRP, CFRP or In718)");
}

RunConfig parse_config(const std::string& text) {
    auto kv = tokenize(text);
    RunConfig cfg;

    const std::unordered_set<std::string> known = {
        "geometry",    "L",          "H",           "nx",          "ny",
        "diagonal",    "material",   "kappa",       "rho_f",       "c_f",
        "Q",           "Q_list",     "f0",          "h_T",         "theta_amb",
        "d",           "tol",        "spacing_l",   "leg_top",     "leg_bottom",
        "passes",      "margin",     "waypoints",   "snap_tol",    "sweep",
        "sweep_values", "outputs",   "fd_check"};
    for (const auto& [key, e] : kv) {
        if (!known.count(key)) {
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + key +
                              "'");
        }
    }

    auto has = [&](const char* k) { return kv.count(k) != 0; };
    auto word = [&](const char* k) -> const std::string& {
        const Entry& e = kv.at(k);
        if (e.tokens.size() != 1) {
            throw ConfigError(std::string("key '") + k + "': expected a single word");
        }
        return e.tokens[0];
    };

    if (!has("geometry")) {
        throw ConfigError("missing required key 'geometry'");
    }
    const std::string geom = word("geometry");
    if (geom == "straight") {
        cfg.geometry.kind = VascularKind::straight;
    } else if (geom == "u_shape") {
        cfg.geometry.kind = VascularKind::u_shape;
    } else if (geom == "serpentine") {
        cfg.geometry.kind = VascularKind::serpentine;
    } else if (geom == "polyline") {
        cfg.geometry.kind = VascularKind::polyline;
    } else {
        throw ConfigError("key 'geometry': unknown value '" + geom + "'");
    }

    if (has("L")) cfg.domain_length = parse_quantity(kv.at("L"), "L", "m");
    if (has("H")) cfg.domain_height = parse_quantity(kv.at("H"), "H", "m");
    if (has("nx")) cfg.nx = static_cast<int>(to_number(word("nx"), "nx"));
    if (has("ny")) cfg.ny = static_cast<int>(to_number(word("ny"), "ny"));
    if (cfg.nx < 1 || cfg.ny < 1) {
        throw ConfigError("key 'nx'/'ny': cell counts must be at least 1");
    }
    if (has("diagonal")) {
        const std::string& dg = word("diagonal");
        if (dg == "right") cfg.diagonal = Diagonal::right;
        else if (dg == "left") cfg.diagonal = Diagonal::left;
        else if (dg == "alternating") cfg.diagonal = Diagonal::alternating;
        else throw ConfigError("key 'diagonal': unknown value '" + dg + "'");
    }

    if (has("material")) {
        cfg.material = word("material");
        cfg.params.kappa = ElementField(material_kappa(cfg.material));
    }
    if (has("kappa")) {
        cfg.params.kappa = ElementField(parse_quantity(kv.at("kappa"), "kappa", "W/m/K"));
        cfg.material.clear();
    } else if (!has("material")) {
        cfg.params.kappa = ElementField(material_kappa(cfg.material));  // default preset
    }

    if (has("rho_f")) cfg.params.rho_f = to_number(word("rho_f"), "rho_f");
    if (has("c_f")) cfg.params.c_f = to_number(word("c_f"), "c_f");
    if (has("f0")) cfg.params.f = ElementField(to_number(word("f0"), "f0"));
    if (has("h_T")) cfg.params.h_T = to_number(word("h_T"), "h_T");
    if (has("theta_amb")) {
        cfg.params.theta_amb = parse_quantity(kv.at("theta_amb"), "theta_amb", "K");
    }
    if (has("d")) cfg.params.d = parse_quantity(kv.at("d"), "d", "m");
    if (has("tol")) cfg.solver_tolerance = to_number(word("tol"), "tol");
    if (!(cfg.solver_tolerance > 0.0)) {
        throw ConfigError("key 'tol': solver tolerance must be positive");
    }

    if (has("Q_list")) {
        cfg.q_list = parse_number_list(kv.at("Q_list"), "Q_list", kMlPerMinToM3PerS);
    }
    if (has("Q")) {
        cfg.q_list.insert(cfg.q_list.begin(),
                          parse_quantity(kv.at("Q"), "Q", "mL/min"));
    }
    if (cfg.q_list.empty()) {
        cfg.q_list.push_back(1.0 * kMlPerMinToM3PerS);
    }
    cfg.params.Q = cfg.q_list.front();

    if (has("spacing_l")) {
        cfg.geometry.spacing_l = parse_quantity(kv.at("spacing_l"), "spacing_l", "m");
    }
    if (has("leg_top")) {
        cfg.geometry.leg_top_y = parse_quantity(kv.at("leg_top"), "leg_top", "m");
    }
    if (has("leg_bottom")) {
        cfg.geometry.leg_bottom_y = parse_quantity(kv.at("leg_bottom"), "leg_bottom", "m");
    }
    if (has("passes")) cfg.geometry.passes = static_cast<int>(to_number(word("passes"), "passes"));
    if (has("margin")) cfg.geometry.margin = parse_quantity(kv.at("margin"), "margin", "m");
    if (has("snap_tol")) {
        cfg.geometry.snap_tol = parse_quantity(kv.at("snap_tol"), "snap_tol", "m");
    }
    if (has("waypoints")) {
        // "(x,y) (x,y) ..." in meters
        const Entry& e = kv.at("waypoints");
        for (const auto& tok : e.tokens) {
            if (tok.size() < 5 || tok.front() != '(' || tok.back() != ')') {
                throw ConfigError("key 'waypoints': expected (x,y) pairs, got '" + tok + "'");
            }
            const auto comma = tok.find(',');
            if (comma == std::string::npos) {
                throw ConfigError("key 'waypoints': expected (x,y) pairs, got '" + tok + "'");
            }
            cfg.geometry.waypoints.push_back(
                {to_number(tok.substr(1, comma - 1), "waypoints"),
                 to_number(tok.substr(comma + 1, tok.size() - comma - 2), "waypoints")});
        }
    }

    if (has("outputs")) {
        cfg.outputs = {};
        for (const auto& t : kv.at("outputs").tokens) {
            if (t == "csv") cfg.outputs.csv = true;
            else if (t == "vtk") cfg.outputs.vtk = true;
            else if (t == "profile") cfg.outputs.profile = true;
            else throw ConfigError("key 'outputs': unknown output '" + t + "'");
        }
    }
    if (has("fd_check")) {
        const std::string& v = word("fd_check");
        if (v == "on" || v == "true" || v == "1") cfg.fd_check = true;
        else if (v == "off" || v == "false" || v == "0") cfg.fd_check = false;
        else throw ConfigError("key 'fd_check': expected on/off");
    }

    if (has("sweep")) {
        SweepSpec sw;
        const std::string& p = word("sweep");
        if (p == "Q") sw.parameter = SweepParameter::Q;
        else if (p == "kappa") sw.parameter = SweepParameter::kappa;
        else throw ConfigError("key 'sweep': parameter must be Q or kappa");
        if (has("sweep_values")) {
            const double scale =
                sw.parameter == SweepParameter::Q ? kMlPerMinToM3PerS : 1.0;
            sw.values = parse_number_list(kv.at("sweep_values"), "sweep_values", scale);
        } else if (sw.parameter == SweepParameter::Q) {
            sw.values = cfg.q_list;
        } else {
            throw ConfigError("key 'sweep_values' is required for a kappa sweep");
        }
        if (sw.values.size() < 1) {
            throw ConfigError("key 'sweep_values': empty sweep");
        }
        for (size_t i = 0; i + 1 < sw.values.size(); ++i) {
            if (!(sw.values[i] < sw.values[i + 1])) {
                throw ConfigError("key 'sweep_values': values must be strictly increasing");
            }
        }
        cfg.sweep = std::move(sw);
    } else if (has("sweep_values")) {
        throw ConfigError("key 'sweep_values' given without 'sweep'");
    }

    if (!(cfg.domain_length > 0.0) || !(cfg.domain_height > 0.0)) {
        throw ConfigError("key 'L'/'H': domain dimensions must be positive");
    }
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("parameter invariant violated: ") + err.what());
    }
    return cfg;
}

}  // namespace vtherm
