#include "pcf/config.hpp"

#include "pcf/diagnostics.hpp"
#include "pcf/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pcf {

using nlohmann::json;

namespace {

// Reject keys the schema does not know about.
void expect_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<double> get_list(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return {};
    const json& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + " must be a list of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw ConfigError(where + "." + key + " must be a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

BumpSpec parse_bump(const json& obj, const std::string& where) {
    expect_keys(obj, where, {"family", "center", "half_width", "amplitude"});
    BumpSpec b;
    b.family = bump_family_from_string(get_string(obj, "family", where, "quartic-cosine"));
    b.center = get_number(obj, "center", where, 0.0);
    b.half_width = get_number(obj, "half_width", where, 1.0);
    b.amplitude = get_number(obj, "amplitude", where, 0.0);
    return b;
}

json bump_json(const BumpSpec& b) {
    return {{"family", to_string(b.family)}, {"center", b.center}, {"half_width", b.half_width}, {"amplitude", b.amplitude}};
}

} // namespace

std::string to_string(RunMode mode) { return mode == RunMode::full ? "full" : "perturbation"; }

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_keys(root, "config",
                {"scenario", "mode", "soliton", "perturbation", "grid", "t_end", "cadence", "snapshot_every", "eta",
                 "R_exterior", "v_window", "virial_width", "output_dir", "tolerances", "sweep"});
    RunConfig c;
    c.scenario = get_string(root, "scenario", "config", c.scenario);
    const std::string mode = get_string(root, "mode", "config", "perturbation");
    if (mode == "perturbation")
        c.mode = RunMode::perturbation;
    else if (mode == "full")
        c.mode = RunMode::full;
    else
        throw ConfigError("mode must be 'perturbation' or 'full'");

    if (root.contains("soliton")) {
        const json& s = root.at("soliton");
        expect_keys(s, "soliton", {"mu", "lambda", "epsilon", "theta", "sigma"});
        c.soliton.mu = get_number(s, "mu", "soliton", c.soliton.mu);
        c.soliton.lambda = get_number(s, "lambda", "soliton", c.soliton.lambda);
        c.soliton.epsilon = get_number(s, "epsilon", "soliton", c.soliton.epsilon);
        if (s.contains("theta")) c.soliton.theta = parse_bump(s.at("theta"), "soliton.theta");
        if (s.contains("sigma")) c.soliton.sigma = parse_bump(s.at("sigma"), "soliton.sigma");
    }
    if (root.contains("perturbation")) {
        const json& p = root.at("perturbation");
        expect_keys(p, "perturbation", {"delta_scale", "z0", "w0", "s0", "m0"});
        c.delta_scale = get_number(p, "delta_scale", "perturbation", 0.0);
        if (p.contains("z0")) c.perturbation.z0 = parse_bump(p.at("z0"), "perturbation.z0");
        if (p.contains("w0")) c.perturbation.w0 = parse_bump(p.at("w0"), "perturbation.w0");
        if (p.contains("s0")) c.perturbation.s0 = parse_bump(p.at("s0"), "perturbation.s0");
        if (p.contains("m0")) c.perturbation.m0 = parse_bump(p.at("m0"), "perturbation.m0");
    }
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        expect_keys(g, "grid", {"x_min", "dx", "n", "cfl", "guard_width"});
        c.grid.x_min = get_number(g, "x_min", "grid", c.grid.x_min);
        c.grid.dx = get_number(g, "dx", "grid", c.grid.dx);
        c.grid.n = get_int(g, "n", "grid", c.grid.n);
        c.grid.cfl = get_number(g, "cfl", "grid", c.grid.cfl);
        c.grid.guard_width = get_int(g, "guard_width", "grid", c.grid.guard_width);
    }
    c.t_end = get_number(root, "t_end", "config", c.t_end);
    c.cadence = get_int(root, "cadence", "config", c.cadence);
    c.snapshot_every = get_int(root, "snapshot_every", "config", c.snapshot_every);
    c.eta = get_number(root, "eta", "config", c.eta);
    c.R_exterior = get_number(root, "R_exterior", "config", c.R_exterior);
    c.v_window = get_number(root, "v_window", "config", c.v_window);
    c.virial_width = get_number(root, "virial_width", "config", c.virial_width);
    c.output_dir = get_string(root, "output_dir", "config", c.output_dir);
    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        expect_keys(t, "tolerances", {"conservation_tol", "exterior_tol", "boundary_tol", "lambda_floor"});
        c.tolerances.conservation_tol = get_number(t, "conservation_tol", "tolerances", c.tolerances.conservation_tol);
        c.tolerances.exterior_tol = get_number(t, "exterior_tol", "tolerances", c.tolerances.exterior_tol);
        c.tolerances.boundary_tol = get_number(t, "boundary_tol", "tolerances", c.tolerances.boundary_tol);
        c.tolerances.lambda_floor = get_number(t, "lambda_floor", "tolerances", c.tolerances.lambda_floor);
    }
    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        expect_keys(s, "sweep", {"delta_scale", "epsilon", "workers"});
        c.sweep.delta_scale = get_list(s, "delta_scale", "sweep");
        c.sweep.epsilon = get_list(s, "epsilon", "sweep");
        c.sweep.workers = get_int(s, "workers", "sweep", 0);
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    json root;
    root["scenario"] = c.scenario;
    root["mode"] = to_string(c.mode);
    root["soliton"] = {{"mu", c.soliton.mu},
                       {"lambda", c.soliton.lambda},
                       {"epsilon", c.soliton.epsilon},
                       {"theta", bump_json(c.soliton.theta)},
                       {"sigma", bump_json(c.soliton.sigma)}};
    root["perturbation"] = {{"delta_scale", c.delta_scale},
                            {"z0", bump_json(c.perturbation.z0)},
                            {"w0", bump_json(c.perturbation.w0)},
                            {"s0", bump_json(c.perturbation.s0)},
                            {"m0", bump_json(c.perturbation.m0)}};
    root["grid"] = {{"x_min", c.grid.x_min},
                    {"dx", c.grid.dx},
                    {"n", c.grid.n},
                    {"cfl", c.grid.cfl},
                    {"guard_width", c.grid.guard_width}};
    root["t_end"] = c.t_end;
    root["cadence"] = c.cadence;
    root["snapshot_every"] = c.snapshot_every;
    root["eta"] = c.eta;
    root["R_exterior"] = c.R_exterior;
    root["v_window"] = c.v_window;
    root["virial_width"] = c.virial_width;
    root["output_dir"] = c.output_dir;
    root["tolerances"] = {{"conservation_tol", c.tolerances.conservation_tol},
                          {"exterior_tol", c.tolerances.exterior_tol},
                          {"boundary_tol", c.tolerances.boundary_tol},
                          {"lambda_floor", c.tolerances.lambda_floor}};
    root["sweep"] = {{"delta_scale", c.sweep.delta_scale}, {"epsilon", c.sweep.epsilon}, {"workers", c.sweep.workers}};
    return root.dump(2) + "\n";
}

void validate(const RunConfig& c) {
    // Translate library domain errors into configuration errors.
    try {
        validate(c.soliton);
        validate_eta(c.eta);
        c.grid.validate();
        for (const BumpSpec* b : {&c.perturbation.z0, &c.perturbation.w0, &c.perturbation.s0, &c.perturbation.m0})
            validate(*b);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!(c.delta_scale >= 0.0) || !std::isfinite(c.delta_scale)) throw ConfigError("delta_scale must be >= 0");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end must be >= 0");
    if (c.cadence < 1) throw ConfigError("cadence must be >= 1");
    if (c.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
    if (!(c.R_exterior > 0.0)) throw ConfigError("R_exterior must be positive");
    if (!(std::abs(c.v_window) < 1.0)) throw ConfigError("v_window must satisfy |v| < 1");
    if (!(c.virial_width > 0.0)) throw ConfigError("virial_width must be positive");
    if (!(c.tolerances.conservation_tol > 0.0) || !(c.tolerances.exterior_tol > 0.0) ||
        !(c.tolerances.boundary_tol > 0.0) || !(c.tolerances.lambda_floor > 0.0))
        throw ConfigError("tolerances must be positive");
    for (double d : c.sweep.delta_scale)
        if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("sweep.delta_scale entries must be finite and >= 0");
    for (double e : c.sweep.epsilon)
        if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("sweep.epsilon entries must be finite and >= 0");
    if (c.sweep.workers < 0) throw ConfigError("sweep.workers must be >= 0");

    // Supports, widened by the light cone through t_end, must stay clear of the guard band.
    const double lo = c.grid.inner_min(), hi = c.grid.inner_max();
    auto fits = [&](const BumpSpec& b, const char* name) {
        if (!b.active()) return;
        if (b.support_min() - c.t_end < lo || b.support_max() + c.t_end > hi)
            throw ConfigError(std::string("support of ") + name +
                              " plus light-cone growth through t_end leaves the non-guard interior");
    };
    if (c.soliton.epsilon > 0.0 || !c.sweep.epsilon.empty()) {
        fits(c.soliton.theta, "soliton.theta");
        fits(c.soliton.sigma, "soliton.sigma");
    }
    if (c.delta_scale > 0.0 || !c.sweep.delta_scale.empty()) {
        fits(c.perturbation.z0, "perturbation.z0");
        fits(c.perturbation.w0, "perturbation.w0");
        fits(c.perturbation.s0, "perturbation.s0");
        fits(c.perturbation.m0, "perturbation.m0");
    }
}

} // namespace pcf
