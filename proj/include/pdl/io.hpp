#pragma once

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pdl/scenario.hpp"

namespace pdl {

inline nlohmann::json to_json(const AssignmentSet& as) {
    nlohmann::json j;
    j["removed"] = as.removed;
    j["two_v_one"] = nlohmann::json::array();
    for (const auto& e : as.two_v_one)
        j["two_v_one"].push_back({{"region", e.region}, {"right", e.right}, {"left", e.left}, {"intruder", e.intruder}, {"n_d", e.n_d}});
    j["one_v_one"] = nlohmann::json::array();
    for (auto [d, a] : as.one_v_one) j["one_v_one"].push_back({{"defender", d}, {"intruder", a}});
    j["implicit"] = nlohmann::json::array();
    for (auto [e, a] : as.implicit) {
        const auto& entry = as.two_v_one[static_cast<std::size_t>(e)];
        j["implicit"].push_back({{"right", entry.right}, {"left", entry.left}, {"pincered", entry.intruder}, {"intruder", a}});
    }
    j["unassigned_defenders"] = as.unassigned_defenders;
    if (!as.fallback.empty()) {
        j["fallback"] = nlohmann::json::array();
        for (auto [d, a] : as.fallback) j["fallback"].push_back({{"defender", d}, {"intruder", a}});
    }
    j["envelope_violation"] = as.envelope_violation;
    if (as.envelope_violation) j["note"] = as.note;
    return j;
}

// regions with counts over the unremoved intruders
inline nlohmann::json regions_json(const TeamSnapshot& snap, const std::vector<char>& counted) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : snap.tally(counted)) {
        nlohmann::json inner = nlohmann::json::array();
        for (int d : r.inner) inner.push_back(d);
        out.push_back({{"id", r.id},
                       {"right", snap.defender_id(r.right)},
                       {"left", snap.defender_id(r.left)},
                       {"start", r.interval.start},
                       {"length", r.degenerate() ? snap.arena().length() : r.interval.length},
                       {"degenerate", r.degenerate()},
                       {"inner", inner},
                       {"n_d", r.n_d},
                       {"n_a", r.n_a},
                       {"n_hat_a", r.n_hat_a},
                       {"q", r.q()},
                       {"q_hat", r.q_hat()},
                       {"cooperative", r.cooperative_members},
                       {"independent", r.independent_members}});
    }
    return out;
}

inline nlohmann::json state_json(const GameState& g) {
    nlohmann::json j;
    j["t"] = g.time;
    j["defenders"] = nlohmann::json::array();
    for (const auto& d : g.defenders) j["defenders"].push_back({{"id", d.id}, {"s", d.s}, {"alive", d.alive}});
    j["intruders"] = nlohmann::json::array();
    for (const auto& a : g.intruders)
        j["intruders"].push_back({{"id", a.id}, {"x", a.x.x}, {"y", a.x.y}, {"alive", a.alive}, {"removed", a.removed}, {"scored", a.scored}});
    return j;
}

inline nlohmann::json to_json(const SimEvent& e) {
    nlohmann::json j{{"kind", to_string(e.kind)}, {"t", e.time}};
    if (e.defender >= 0) j["defender"] = e.defender;
    if (e.intruder >= 0) j["intruder"] = e.intruder;
    if (e.kind == SimEvent::Kind::breach) j["s"] = e.s;
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

inline nlohmann::json final_json(const SimResult& r) {
    nlohmann::json f;
    f["Q"] = r.score;
    f["q_lg0"] = r.q_lg0;
    f["removed"] = r.removed;
    f["events"] = nlohmann::json::array();
    for (const auto& e : r.events) f["events"].push_back(to_json(e));
    f["monitors"] = nlohmann::json::array();
    for (const auto& v : r.violations) f["monitors"].push_back({{"monitor", v.monitor}, {"tick", v.tick}});
    f["envelope_violation_ticks"] = r.envelope_violations;
    f["ticks"] = r.ticks;
    f["timed_out"] = r.timed_out;
    f["surviving"] = r.survivors;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.digest));
    f["digest"] = buf;
    return f;
}

// JSON-lines trace, one record per tick, and trajectory capture for the SVG
class TraceWriter {
public:
    explicit TraceWriter(std::ostream* out) : out_(out) {}

    std::function<void(const TickRecord&)> callback() {
        return [this](const TickRecord& r) { record(r); };
    }

    void record(const TickRecord& r) {
        if (out_) {
            nlohmann::json j = state_json(*r.state);
            j["assignment"] = to_json(*r.assignment);
            j["monitors"] = {{"max_q", r.monitors.max_q}, {"max_q_hat", r.monitors.max_q_hat}, {"two_v_one", r.monitors.two_v_one}};
            *out_ << j.dump() << '\n';
        }
        if (paths_.empty()) paths_.resize(r.state->intruders.size());
        if (arcs_.empty()) arcs_.resize(r.state->defenders.size());
        for (const auto& a : r.state->intruders)
            if (a.alive) paths_[static_cast<std::size_t>(a.id)].push_back(a.x);
        for (const auto& d : r.state->defenders)
            if (d.alive) arcs_[static_cast<std::size_t>(d.id)].push_back(d.s);
    }

    void finish(const SimResult& r) {
        if (out_) *out_ << nlohmann::json{{"final", final_json(r)}}.dump() << '\n';
    }

    const std::vector<std::vector<Vec2>>& intruder_paths() const { return paths_; }
    const std::vector<std::vector<double>>& defender_arcs() const { return arcs_; }

private:
    std::ostream* out_;
    std::vector<std::vector<Vec2>> paths_;
    std::vector<std::vector<double>> arcs_;
};

// Static overlay: target, initial region intervals, trajectories, captures and breaches.
inline void write_svg(std::ostream& os, const Arena& arena, const GameState& initial, const TraceWriter& trace,
                      const SimResult& result) {
    const Perimeter& per = arena.perimeter;
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    auto grow = [&](Vec2 p) {
        lo_x = std::min(lo_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_x = std::max(hi_x, p.x);
        hi_y = std::max(hi_y, p.y);
    };
    for (int j = 0; j < per.resolution(); ++j) grow(per.sample(j));
    for (const auto& path : trace.intruder_paths())
        for (Vec2 p : path) grow(p);
    const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y);
    lo_x -= pad;
    lo_y -= pad;
    hi_x += pad;
    hi_y += pad;
    const double scale = 800.0 / std::max(hi_x - lo_x, hi_y - lo_y);
    auto X = [&](Vec2 p) { return (p.x - lo_x) * scale; };
    auto Y = [&](Vec2 p) { return (hi_y - p.y) * scale; };
    auto polyline = [&](const std::vector<Vec2>& pts, const char* style) {
        os << "<polyline fill=\"none\" " << style << " points=\"";
        for (Vec2 p : pts) os << X(p) << ',' << Y(p) << ' ';
        os << "\"/>\n";
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (hi_x - lo_x) * scale << "\" height=\""
       << (hi_y - lo_y) * scale << "\">\n";
    std::vector<Vec2> ring;
    for (int j = 0; j <= per.resolution(); ++j) ring.push_back(per.sample(j % per.resolution()));
    polyline(ring, "stroke=\"#444\" stroke-width=\"2\"");

    // initial regions with a positive score, nudged outward so they stay visible
    TeamSnapshot snap(arena, initial);
    const std::vector<char> everyone(static_cast<std::size_t>(snap.intruder_count()), 1);
    const auto regions = snap.tally(everyone);
    for (const auto& r : regions) {
        if (r.q() <= 0 || r.degenerate()) continue;
        std::vector<Vec2> arc;
        for (int k = 0; k <= 64; ++k) {
            const double s = r.interval.start + r.interval.length * k / 64.0;
            arc.push_back(per.point_at(s) + per.normal_at(s) * (0.02 * per.length() / 6.283185307179586));
        }
        polyline(arc, "stroke=\"#d62728\" stroke-width=\"3\" stroke-opacity=\"0.5\"");
    }
    for (const auto& path : trace.intruder_paths())
        if (!path.empty()) polyline(path, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
    for (const auto& arcs : trace.defender_arcs()) {
        if (arcs.empty()) continue;
        std::vector<Vec2> pts;
        // drawn just inside the boundary
        for (double s : arcs) pts.push_back(per.point_at(s) - per.normal_at(s) * (0.01 * per.length() / 6.283185307179586));
        polyline(pts, "stroke=\"#2ca02c\" stroke-width=\"1.5\"");
        const Vec2 p = per.point_at(arcs.front());
        os << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"5\" fill=\"#2ca02c\"/>\n";
    }
    for (const auto& e : result.events) {
        if (e.kind == SimEvent::Kind::capture) {
            const Vec2 p = per.point_at(e.s);
            os << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"6\" fill=\"none\" stroke=\"#000\"/>\n";
        } else if (e.kind == SimEvent::Kind::breach) {
            const Vec2 p = per.point_at(e.s);
            os << "<rect x=\"" << X(p) - 5 << "\" y=\"" << Y(p) - 5 << "\" width=\"10\" height=\"10\" fill=\"#d62728\"/>\n";
        }
    }
    os << "</svg>\n";
}

}  // namespace pdl
