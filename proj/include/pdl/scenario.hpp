#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "pdl/simulation.hpp"

namespace pdl {

struct PerimeterSpec {
    std::string type = "circle";  // circle | polygon
    double radius = 1.0;
    Vec2 center{};
    std::vector<Vec2> vertices;
    int resolution = Perimeter::kDefaultResolution;

    Perimeter build() const {
        if (type == "circle") return Perimeter::circle(radius, center, resolution);
        if (type == "polygon") return Perimeter::polygon(vertices, resolution);
        throw ValidationError("unknown perimeter type: " + type);
    }
};

struct DefenderSpec {
    std::vector<double> positions;   // explicit arc positions win over count
    int count = 0;
    std::string placement = "uniform";  // uniform | random
};

struct IntruderSpec {
    std::vector<Vec2> points;
    int count = 0;
    double distance = 0.0;  // from the perimeter along the outward normal, random azimuth
};

// Unset timing fields fall back to defaults derived from the perimeter length.
struct ScenarioSpec {
    PerimeterSpec perimeter;
    double v_defender = 1.0;
    double nu = 1.0;
    DefenderSpec defenders;
    IntruderSpec intruders;
    std::optional<double> dt, capture_radius, breach_band, max_time;
    std::uint64_t seed = 0;
};

// ScenarioSpec with every random choice made and every default filled in
struct Scenario {
    Arena arena;
    GameState state;
    double dt = 0.0;
    double max_time = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline Vec2 read_point(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError("a point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline double read_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field: ") + key);
    if (!j[key].is_number()) throw ValidationError(std::string("field must be a number: ") + key);
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) throw ValidationError(std::string("field must be finite: ") + key);
    return v;
}

inline std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return read_number(j, key);
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ValidationError("unknown field in " + std::string(where) + ": " + it.key());
    }
}

}  // namespace detail

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    using detail::check_keys;
    check_keys(j, {"perimeter", "speeds", "defenders", "intruders", "dt", "capture_radius", "breach_band", "max_time", "seed"},
               "scenario");
    ScenarioSpec s;
    if (!j.contains("perimeter")) throw ValidationError("missing field: perimeter");
    const auto& p = j["perimeter"];
    check_keys(p, {"type", "radius", "center", "vertices", "sample_resolution"}, "perimeter");
    if (!p.contains("type") || !p["type"].is_string()) throw ValidationError("perimeter.type must be a string");
    s.perimeter.type = p["type"].get<std::string>();
    if (p.contains("sample_resolution")) {
        if (!p["sample_resolution"].is_number_integer()) throw ValidationError("sample_resolution must be an integer");
        s.perimeter.resolution = p["sample_resolution"].get<int>();
    }
    if (s.perimeter.type == "circle") {
        s.perimeter.radius = detail::read_number(p, "radius");
        if (p.contains("center")) s.perimeter.center = detail::read_point(p["center"]);
    } else if (s.perimeter.type == "polygon") {
        if (!p.contains("vertices") || !p["vertices"].is_array()) throw ValidationError("polygon needs vertices");
        for (const auto& v : p["vertices"]) s.perimeter.vertices.push_back(detail::read_point(v));
    } else {
        throw ValidationError("unknown perimeter type: " + s.perimeter.type);
    }

    if (!j.contains("speeds")) throw ValidationError("missing field: speeds");
    check_keys(j["speeds"], {"v_defender", "nu"}, "speeds");
    s.v_defender = detail::read_number(j["speeds"], "v_defender");
    s.nu = detail::read_number(j["speeds"], "nu");

    if (!j.contains("defenders")) throw ValidationError("missing field: defenders");
    const auto& d = j["defenders"];
    check_keys(d, {"positions", "count", "placement"}, "defenders");
    if (d.contains("positions")) {
        if (!d["positions"].is_array()) throw ValidationError("defenders.positions must be an array");
        for (const auto& v : d["positions"]) {
            if (!v.is_number()) throw ValidationError("defender positions must be numbers");
            s.defenders.positions.push_back(v.get<double>());
        }
    } else {
        if (!d.contains("count") || !d["count"].is_number_integer()) throw ValidationError("defenders need positions or count");
        s.defenders.count = d["count"].get<int>();
        if (d.contains("placement")) {
            if (!d["placement"].is_string()) throw ValidationError("defenders.placement must be a string");
            s.defenders.placement = d["placement"].get<std::string>();
        }
    }

    if (!j.contains("intruders")) throw ValidationError("missing field: intruders");
    const auto& a = j["intruders"];
    check_keys(a, {"points", "count", "distance"}, "intruders");
    if (a.contains("points")) {
        if (!a["points"].is_array()) throw ValidationError("intruders.points must be an array");
        for (const auto& v : a["points"]) s.intruders.points.push_back(detail::read_point(v));
    } else {
        if (!a.contains("count") || !a["count"].is_number_integer()) throw ValidationError("intruders need points or count");
        s.intruders.count = a["count"].get<int>();
        s.intruders.distance = detail::read_number(a, "distance");
    }

    s.dt = detail::read_optional(j, "dt");
    s.capture_radius = detail::read_optional(j, "capture_radius");
    s.breach_band = detail::read_optional(j, "breach_band");
    s.max_time = detail::read_optional(j, "max_time");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw ValidationError("seed must be an integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    return s;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
    nlohmann::json j;
    auto pt = [](Vec2 v) { return nlohmann::json::array({v.x, v.y}); };
    nlohmann::json p{{"type", s.perimeter.type}, {"sample_resolution", s.perimeter.resolution}};
    if (s.perimeter.type == "circle") {
        p["radius"] = s.perimeter.radius;
        p["center"] = pt(s.perimeter.center);
    } else {
        p["vertices"] = nlohmann::json::array();
        for (Vec2 v : s.perimeter.vertices) p["vertices"].push_back(pt(v));
    }
    j["perimeter"] = p;
    j["speeds"] = {{"v_defender", s.v_defender}, {"nu", s.nu}};
    if (!s.defenders.positions.empty() || s.defenders.count == 0) j["defenders"] = {{"positions", s.defenders.positions}};
    else j["defenders"] = {{"count", s.defenders.count}, {"placement", s.defenders.placement}};
    if (!s.intruders.points.empty() || s.intruders.count == 0) {
        j["intruders"] = {{"points", nlohmann::json::array()}};
        for (Vec2 v : s.intruders.points) j["intruders"]["points"].push_back(pt(v));
    } else {
        j["intruders"] = {{"count", s.intruders.count}, {"distance", s.intruders.distance}};
    }
    if (s.dt) j["dt"] = *s.dt;
    if (s.capture_radius) j["capture_radius"] = *s.capture_radius;
    if (s.breach_band) j["breach_band"] = *s.breach_band;
    if (s.max_time) j["max_time"] = *s.max_time;
    j["seed"] = s.seed;
    return j;
}

// Makes the random choices of a count-form spec; explicit entries pass through.
// Uniform defenders sit at k L / N_D; random ones are redrawn until no two are
// closer than 1e-6 L.  Intruders sit at the given distance along the outward
// normal of a uniformly random boundary point.
inline ScenarioSpec generate_scenario(ScenarioSpec s, std::uint64_t seed) {
    s.seed = seed;
    if (s.defenders.count < 0 || s.intruders.count < 0) throw ValidationError("team sizes must be non-negative");
    const Perimeter per = s.perimeter.build();
    const double L = per.length();
    std::mt19937_64 rng(split_seed(seed, 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (s.defenders.positions.empty() && s.defenders.count > 0) {
        const int n = s.defenders.count;
        if (s.defenders.placement == "uniform") {
            for (int i = 0; i < n; ++i) s.defenders.positions.push_back(L * i / n);
        } else if (s.defenders.placement == "random") {
            for (int attempt = 0;; ++attempt) {
                if (attempt > 10000) throw ValidationError("cannot space random defenders");
                std::vector<double> pos;
                for (int i = 0; i < n; ++i) pos.push_back(unit(rng) * L);
                std::vector<double> sorted = pos;
                std::sort(sorted.begin(), sorted.end());
                bool ok = true;
                for (int i = 0; i < n && n > 1; ++i) {
                    const double gap = i + 1 < n ? sorted[i + 1] - sorted[i] : sorted[0] + L - sorted[i];
                    ok = ok && gap >= 1e-6 * L;
                }
                if (ok) {
                    s.defenders.positions = pos;
                    break;
                }
            }
        } else {
            throw ValidationError("unknown defender placement: " + s.defenders.placement);
        }
        s.defenders.count = 0;
    }
    if (s.intruders.points.empty() && s.intruders.count > 0) {
        if (!(s.intruders.distance > 0.0)) throw ValidationError("intruder distance must be positive");
        std::mt19937_64 irng(split_seed(seed, 2));
        for (int i = 0; i < s.intruders.count; ++i) {
            const double az = unit(irng) * L;
            s.intruders.points.push_back(per.point_at(az) + per.normal_at(az) * s.intruders.distance);
        }
        s.intruders.count = 0;
    }
    return s;
}

inline Scenario materialize(const ScenarioSpec& in) {
    SpeedModel speeds = SpeedModel::from_ratio(in.v_defender, in.nu);
    const ScenarioSpec s = generate_scenario(in, in.seed);
    const Perimeter per = s.perimeter.build();
    const double L = per.length();
    const int nd = static_cast<int>(s.defenders.positions.size());
    const int na = static_cast<int>(s.intruders.points.size());
    if (na >= nd && na > 0) throw ValidationError("need fewer intruders than defenders");
    for (double x : s.defenders.positions)
        if (!std::isfinite(x)) throw ValidationError("defender position is not finite");
    for (Vec2 x : s.intruders.points) {
        if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw ValidationError("intruder position is not finite");
        if (per.contains(x)) throw ValidationError("intruders must start strictly outside the target");
    }
    Scenario out{Arena{per, speeds, s.capture_radius.value_or(1e-3 * L), s.breach_band.value_or(1e-4 * L)}, {}};
    if (!(out.arena.capture_radius > 0.0) || !(out.arena.breach_band >= 0.0))
        throw ValidationError("capture_radius must be positive and breach_band non-negative");
    for (Vec2 x : s.intruders.points)
        if (per.boundary_distance(x) <= out.arena.breach_band)
            throw ValidationError("intruder starts inside the breach band");
    std::vector<double> ds;
    for (double x : s.defenders.positions) ds.push_back(per.wrap(x));
    out.state = GameState::from(ds, s.intruders.points);
    out.dt = s.dt.value_or(out.arena.capture_radius / (4.0 * speeds.v_defender));
    out.max_time = s.max_time.value_or(4.0 * L / speeds.v_intruder);
    if (!(out.dt > 0.0) || !(out.max_time > 0.0)) throw ValidationError("dt and max_time must be positive");
    out.seed = s.seed;
    return out;
}

inline std::uint64_t scenario_digest(const ScenarioSpec& s) {
    const std::string text = to_json(s).dump();
    std::uint64_t h = 1469598103934665603ull;
    detail::mix(h, text.data(), text.size());
    return h;
}

}  // namespace pdl
