#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "circumnav/controller.hpp"
#include "circumnav/errors.hpp"
#include "circumnav/target.hpp"

namespace circumnav {

enum class EstimatorMode { adaptive, oracle };

struct SatelliteConfig {
    // "exact": truth; "paper": exact centre, doubled radius; "gaussian":
    // additive noise with the scales below. Explicit values win over mode.
    std::string mode = "exact";
    double noise_c = 0.0;
    double noise_r = 0.0;
    std::optional<Vec2> c_hat0;
    std::optional<double> r_hat0;
};

struct MeasurementNoiseConfig {
    bool enabled = false;
    double sigma_dc = 0.0;
    double sigma_db = 0.0;
};

struct PEConfig {
    double window = 20.0;     // excitation period T
    double threshold = 0.1;   // epsilon
    std::size_t stride = 10;  // window-start thinning, in samples
};

struct SimConfig {
    std::size_t n_agents = 4;
    double dt = 0.01;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    bool strict = true;

    TargetScript script;
    Vec2 c0{25.0, 25.0};
    double r0 = 10.0;

    SatelliteConfig satellite;

    double alpha = 0.5;
    double gamma = 0.06;
    double r_floor = 0.1;
    EstimatorMode estimator_mode = EstimatorMode::adaptive;

    ControllerParams controller;

    std::vector<Vec2> agent_positions;

    MeasurementNoiseConfig measurement_noise;
    std::size_t broadcast_staleness_steps = 0;

    PEConfig pe;
    double transient_cutoff_fraction = 0.3;

    nlohmann::json echo;  // the fully resolved document, for the summary file
};

namespace cfgdetail {

using nlohmann::json;

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw SchemaError("unknown key '" + path + it.key() + "'");
        }
    }
}

inline double get_num(const json& j, const std::string& key, double fallback,
                      const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw SchemaError("'" + path + key + "' must be a number");
    return j.at(key).get<double>();
}

inline Vec2 get_vec2(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw SchemaError("'" + where + "' must be [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

// Overlays src onto dst recursively; scalar/array values in src win.
inline void merge_into(json& dst, const json& src) {
    for (auto it = src.begin(); it != src.end(); ++it) {
        if (it->is_object() && dst.contains(it.key()) && dst[it.key()].is_object()) {
            merge_into(dst[it.key()], *it);
        } else {
            dst[it.key()] = *it;
        }
    }
}

}  // namespace cfgdetail

inline SimConfig parse_config_json(nlohmann::json j);

// Loads, expands an optional "preset" reference (a sibling JSON file), and
// validates. Throws ParseError / SchemaError / ValidationError.
inline SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw SchemaError("config file is empty: " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config parse failure in " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw SchemaError("config root must be a JSON object");

    if (j.contains("preset")) {
        if (!j.at("preset").is_string()) throw SchemaError("'preset' must be a string");
        const auto name = j.at("preset").get<std::string>();
        const auto base_path = path.parent_path() / (name + ".json");
        std::ifstream base_in(base_path);
        if (!base_in) throw ParseError("preset '" + name + "' not found at " + base_path.string());
        nlohmann::json base;
        try {
            base_in >> base;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("preset parse failure in " + base_path.string() + ": " + e.what());
        }
        j.erase("preset");
        cfgdetail::merge_into(base, j);
        j = std::move(base);
    }
    return parse_config_json(std::move(j));
}

inline SimConfig parse_config_json(nlohmann::json j) {
    using cfgdetail::get_num;
    using cfgdetail::get_vec2;
    using cfgdetail::require_keys;
    using nlohmann::json;

    SimConfig c;
    require_keys(j, {"n_agents", "dt", "horizon", "seed", "strict", "target", "satellite",
                     "estimator", "controller", "agents", "measurement_noise",
                     "broadcast_staleness_steps", "pe", "metrics"},
                 "");

    if (j.contains("n_agents")) {
        if (!j["n_agents"].is_number_unsigned()) throw SchemaError("'n_agents' must be a nonnegative integer");
        c.n_agents = j["n_agents"].get<std::size_t>();
    }
    c.dt = get_num(j, "dt", c.dt, "");
    c.horizon = get_num(j, "horizon", c.horizon, "");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw SchemaError("'seed' must be a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("strict")) {
        if (!j["strict"].is_boolean()) throw SchemaError("'strict' must be a boolean");
        c.strict = j["strict"].get<bool>();
    }

    if (j.contains("target")) {
        const json& t = j["target"];
        require_keys(t, {"script", "c0", "r0", "drift", "noise_scale", "noise_scale_r",
                         "path_center", "angular_rate", "waypoints",
                         "max_centre_speed", "max_radius_rate", "min_radius"},
                     "target.");
        if (t.contains("script")) {
            const auto s = t["script"].get<std::string>();
            if (s == "stationary") c.script.kind = ScriptKind::stationary;
            else if (s == "paper-random-walk") c.script.kind = ScriptKind::paper_random_walk;
            else if (s == "circular-path") c.script.kind = ScriptKind::circular_path;
            else if (s == "piecewise") c.script.kind = ScriptKind::piecewise;
            else throw SchemaError("'target.script' must be one of stationary|paper-random-walk|circular-path|piecewise");
        }
        if (t.contains("c0")) c.c0 = get_vec2(t["c0"], "target.c0");
        c.r0 = get_num(t, "r0", c.r0, "target.");
        if (t.contains("drift")) c.script.drift = get_vec2(t["drift"], "target.drift");
        c.script.noise_scale = get_num(t, "noise_scale", c.script.noise_scale, "target.");
        c.script.noise_scale_r = get_num(t, "noise_scale_r", c.script.noise_scale_r, "target.");
        if (t.contains("path_center")) c.script.path_center = get_vec2(t["path_center"], "target.path_center");
        c.script.angular_rate = get_num(t, "angular_rate", c.script.angular_rate, "target.");
        if (t.contains("waypoints")) {
            if (!t["waypoints"].is_array()) throw SchemaError("'target.waypoints' must be an array");
            for (const auto& w : t["waypoints"]) {
                require_keys(w, {"t", "c", "r"}, "target.waypoints[].");
                Waypoint wp;
                wp.t = get_num(w, "t", 0.0, "target.waypoints[].");
                if (w.contains("c")) wp.c = get_vec2(w["c"], "target.waypoints[].c");
                wp.r = get_num(w, "r", 1.0, "target.waypoints[].");
                c.script.waypoints.push_back(wp);
            }
        }
        c.script.max_centre_speed = get_num(t, "max_centre_speed", c.script.max_centre_speed, "target.");
        c.script.max_radius_rate = get_num(t, "max_radius_rate", c.script.max_radius_rate, "target.");
        c.script.r_min = get_num(t, "min_radius", c.script.r_min, "target.");
    }

    if (j.contains("satellite")) {
        const json& s = j["satellite"];
        require_keys(s, {"mode", "noise_c", "noise_r", "c_hat0", "r_hat0"}, "satellite.");
        if (s.contains("mode")) {
            const auto m = s["mode"].get<std::string>();
            if (m != "exact" && m != "paper" && m != "gaussian") {
                throw SchemaError("'satellite.mode' must be one of exact|paper|gaussian");
            }
            c.satellite.mode = m;
        }
        c.satellite.noise_c = get_num(s, "noise_c", 0.0, "satellite.");
        c.satellite.noise_r = get_num(s, "noise_r", 0.0, "satellite.");
        if (s.contains("c_hat0")) c.satellite.c_hat0 = get_vec2(s["c_hat0"], "satellite.c_hat0");
        if (s.contains("r_hat0")) c.satellite.r_hat0 = get_num(s, "r_hat0", 0.0, "satellite.");
    }

    if (j.contains("estimator")) {
        const json& e = j["estimator"];
        require_keys(e, {"alpha", "gamma", "r_floor", "mode"}, "estimator.");
        c.alpha = get_num(e, "alpha", c.alpha, "estimator.");
        c.gamma = get_num(e, "gamma", c.gamma, "estimator.");
        c.r_floor = get_num(e, "r_floor", c.r_floor, "estimator.");
        if (e.contains("mode")) {
            const auto m = e["mode"].get<std::string>();
            if (m == "adaptive") c.estimator_mode = EstimatorMode::adaptive;
            else if (m == "oracle") c.estimator_mode = EstimatorMode::oracle;
            else throw SchemaError("'estimator.mode' must be adaptive|oracle");
        }
    }

    if (j.contains("controller")) {
        const json& k = j["controller"];
        require_keys(k, {"mode", "delta", "u_max"}, "controller.");
        if (k.contains("mode")) {
            const auto m = k["mode"].get<std::string>();
            if (m == "scale") c.controller.mode = ActuationMode::scale;
            else if (m == "saturate") c.controller.mode = ActuationMode::saturate;
            else throw SchemaError("'controller.mode' must be scale|saturate");
        }
        c.controller.delta = get_num(k, "delta", c.controller.delta, "controller.");
        c.controller.u_max = get_num(k, "u_max", c.controller.u_max, "controller.");
    }

    if (j.contains("agents")) {
        const json& a = j["agents"];
        require_keys(a, {"positions"}, "agents.");
        if (!a.contains("positions") || !a["positions"].is_array()) {
            throw SchemaError("'agents.positions' must be an array of [x, y]");
        }
        for (const auto& p : a["positions"]) {
            c.agent_positions.push_back(get_vec2(p, "agents.positions[]"));
        }
    }

    if (j.contains("measurement_noise")) {
        const json& m = j["measurement_noise"];
        require_keys(m, {"enabled", "sigma_dc", "sigma_db"}, "measurement_noise.");
        if (m.contains("enabled")) c.measurement_noise.enabled = m["enabled"].get<bool>();
        c.measurement_noise.sigma_dc = get_num(m, "sigma_dc", 0.0, "measurement_noise.");
        c.measurement_noise.sigma_db = get_num(m, "sigma_db", 0.0, "measurement_noise.");
    }

    if (j.contains("broadcast_staleness_steps")) {
        if (!j["broadcast_staleness_steps"].is_number_unsigned()) {
            throw SchemaError("'broadcast_staleness_steps' must be a nonnegative integer");
        }
        c.broadcast_staleness_steps = j["broadcast_staleness_steps"].get<std::size_t>();
    }

    if (j.contains("pe")) {
        const json& p = j["pe"];
        require_keys(p, {"window", "threshold", "stride"}, "pe.");
        c.pe.window = get_num(p, "window", c.pe.window, "pe.");
        c.pe.threshold = get_num(p, "threshold", c.pe.threshold, "pe.");
        if (p.contains("stride")) c.pe.stride = p["stride"].get<std::size_t>();
    }

    if (j.contains("metrics")) {
        const json& m = j["metrics"];
        require_keys(m, {"transient_cutoff_fraction"}, "metrics.");
        c.transient_cutoff_fraction =
            get_num(m, "transient_cutoff_fraction", c.transient_cutoff_fraction, "metrics.");
    }

    // ---- validation ----
    if (c.n_agents < 2) throw ValidationError("n_agents must be >= 2");
    if (!(c.dt > 0.0)) throw ValidationError("dt must be > 0");
    if (!(c.horizon > 0.0)) throw ValidationError("horizon must be > 0");
    if (!(c.r0 > 0.0)) throw ValidationError("target.r0 must be > 0");
    if (!(c.alpha > 0.0)) throw ValidationError("estimator.alpha must be > 0");
    if (!(c.gamma > 0.0)) throw ValidationError("estimator.gamma must be > 0");
    if (!(c.r_floor > 0.0)) throw ValidationError("estimator.r_floor must be > 0");
    if (!(c.controller.delta > 0.0)) throw ValidationError("controller.delta must be > 0");
    if (!(c.controller.u_max > 0.0)) throw ValidationError("controller.u_max must be > 0");
    if (c.satellite.noise_c < 0.0 || c.satellite.noise_r < 0.0) {
        throw ValidationError("satellite noise scales must be >= 0");
    }
    if (c.satellite.r_hat0 && !(*c.satellite.r_hat0 > 0.0)) {
        throw ValidationError("satellite.r_hat0 must be > 0");
    }
    if (c.agent_positions.empty()) throw ValidationError("agents.positions is required");
    if (c.agent_positions.size() != c.n_agents) {
        throw ValidationError("agents.positions size must equal n_agents");
    }
    if (!(c.script.max_centre_speed > 0.0) || !(c.script.max_radius_rate > 0.0)) {
        throw ValidationError("target velocity caps must be > 0");
    }
    if (!(c.script.r_min > 0.0)) throw ValidationError("target.min_radius must be > 0");
    if (c.script.kind == ScriptKind::piecewise) {
        for (std::size_t i = 0; i + 1 < c.script.waypoints.size(); ++i) {
            if (!(c.script.waypoints[i + 1].t > c.script.waypoints[i].t)) {
                throw ValidationError("target.waypoints must have strictly increasing t");
            }
        }
    }
    if (!(c.pe.window > 0.0) || !(c.pe.threshold > 0.0)) {
        throw ValidationError("pe.window and pe.threshold must be > 0");
    }
    if (!(c.transient_cutoff_fraction >= 0.0 && c.transient_cutoff_fraction < 1.0)) {
        throw ValidationError("metrics.transient_cutoff_fraction must be in [0, 1)");
    }

    // Theorem hypothesis, checkable here when the initial estimate is
    // deterministic: every agent starts outside the estimated circle.
    std::optional<Vec2> chat0;
    std::optional<double> rhat0;
    if (c.satellite.c_hat0) chat0 = *c.satellite.c_hat0;
    else if (c.satellite.mode == "exact" || c.satellite.mode == "paper") chat0 = c.c0;
    if (c.satellite.r_hat0) rhat0 = *c.satellite.r_hat0;
    else if (c.satellite.mode == "exact") rhat0 = c.r0;
    else if (c.satellite.mode == "paper") rhat0 = 2.0 * c.r0;
    if (chat0 && rhat0) {
        for (std::size_t i = 0; i < c.agent_positions.size(); ++i) {
            const double d = (c.agent_positions[i] - *chat0).norm();
            if (!(d > *rhat0)) {
                throw ValidationError("agent " + std::to_string(i + 1) +
                                      " initialized inside the estimated circle (D=" +
                                      std::to_string(d) + " <= r_hat0=" +
                                      std::to_string(*rhat0) + ")");
            }
        }
    }

    c.echo = std::move(j);
    return c;
}

}  // namespace circumnav
