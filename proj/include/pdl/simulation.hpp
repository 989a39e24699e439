#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pdl/assignment.hpp"

namespace pdl {

enum class DefenderPolicy { lgr, mm, stationary };
enum class IntruderPolicy { optimal, greedy, random };

inline const char* to_string(DefenderPolicy p) {
    switch (p) {
    case DefenderPolicy::lgr: return "lgr";
    case DefenderPolicy::mm: return "mm";
    default: return "static";
    }
}

inline const char* to_string(IntruderPolicy p) {
    switch (p) {
    case IntruderPolicy::optimal: return "optimal";
    case IntruderPolicy::greedy: return "greedy";
    default: return "random";
    }
}

inline DefenderPolicy parse_defender_policy(const std::string& s) {
    if (s == "lgr") return DefenderPolicy::lgr;
    if (s == "mm") return DefenderPolicy::mm;
    if (s == "static") return DefenderPolicy::stationary;
    throw ValidationError("unknown defender policy: " + s);
}

inline IntruderPolicy parse_intruder_policy(const std::string& s) {
    if (s == "optimal") return IntruderPolicy::optimal;
    if (s == "greedy") return IntruderPolicy::greedy;
    if (s == "random") return IntruderPolicy::random;
    throw ValidationError("unknown intruder policy: " + s);
}

struct ControlVector {
    std::vector<double> omega;     // by defender id, + is ccw
    std::vector<Vec2> velocity;    // by intruder id

    ControlVector(std::size_t defenders, std::size_t intruders) : omega(defenders, 0.0), velocity(intruders) {}

    void set_defender(std::size_t id, double w, const SpeedModel& m) {
        omega[id] = std::clamp(w, -m.v_defender, m.v_defender);
    }

    void set_intruder(std::size_t id, Vec2 v, const SpeedModel& m) {
        const double n = norm(v);
        velocity[id] = n > m.v_intruder ? v * (m.v_intruder / n) : v;
    }
};

struct SimEvent {
    enum class Kind { capture, breach, transition, envelope_violation };
    Kind kind = Kind::capture;
    double time = 0.0;
    int defender = -1;
    int intruder = -1;
    double s = 0.0;
    std::string note;
};

inline const char* to_string(SimEvent::Kind k) {
    switch (k) {
    case SimEvent::Kind::capture: return "capture";
    case SimEvent::Kind::breach: return "breach";
    case SimEvent::Kind::transition: return "transition";
    default: return "envelope_violation";
    }
}

struct MonitorValues {
    int max_q = 0;
    int max_q_hat = 0;
    int two_v_one = 0;
};

struct MonitorViolation {
    std::string monitor;  // q_hat_nonincreasing, q_nonpositive, two_v_one_nonincreasing, implicit_zone
    int tick = 0;
};

struct TickRecord {
    int tick = 0;
    const GameState* state = nullptr;
    const AssignmentSet* assignment = nullptr;
    MonitorValues monitors;
};

struct RunOptions {
    DefenderPolicy defender = DefenderPolicy::lgr;
    IntruderPolicy intruder = IntruderPolicy::optimal;
    std::uint64_t seed = 0;
    double dt = 0.0;        // 0: capture_radius / (4 v_D)
    double max_time = 0.0;  // 0: 4 L / v_A
    double random_switch_time = 0.5;  // mean time between target changes of a random intruder
    std::function<void(const TickRecord&)> on_tick;
};

struct SimResult {
    int score = 0;
    int q_lg0 = 0;
    std::vector<int> removed;
    std::vector<SimEvent> events;
    std::vector<MonitorViolation> violations;
    int envelope_violations = 0;  // ticks flagged
    int ticks = 0;
    bool timed_out = false;
    int survivors = 0;            // alive, not removed, at timeout
    std::uint64_t digest = 0;
    GameState final_state;
};

namespace detail {

inline void mix(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

inline void mix(std::uint64_t& h, double v) { mix(h, &v, sizeof v); }

// signed shortest arc offset from a to b, in (-L/2, L/2]
inline double signed_offset(const Perimeter& p, double a, double b) {
    double d = p.wrap(b - a);
    if (d > 0.5 * p.length()) d -= p.length();
    return d;
}

}  // namespace detail

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// sup over the sample grid of the race margin against a defender parked at s
inline double worst_margin(const RaceProfile& prof, double s) {
    const Perimeter& per = prof.arena().perimeter;
    const int m = per.resolution();
    const double h = per.spacing(), len = per.length();
    s = per.wrap(s);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        double arc = std::fabs(j * h - s);
        if (arc > 0.5 * len) arc = len - arc;
        best = std::max(best, prof.defender_time(arc) - prof.sample_time(j));
    }
    return best;
}

// Pincer demands and 1v1 feedback; idle defenders hold still.  Returns false on
// opposing pincer demands for one defender.
inline bool defender_controls(const TeamSnapshot& snap, const AssignmentSet& as, double dt, ControlVector& u) {
    const Arena& arena = snap.arena();
    const auto& sp = arena.speeds;
    bool ok = true;
    std::map<int, int> demand;
    for (const auto& e : as.two_v_one) {
        for (auto [id, dir] : {std::pair{e.right, +1}, std::pair{e.left, -1}}) {
            auto it = demand.find(id);
            if (it == demand.end()) demand[id] = dir;
            else if (it->second != dir) ok = false;
        }
    }
    for (auto [id, dir] : demand) u.set_defender(static_cast<std::size_t>(id), dir * sp.v_defender, sp);
    // line search over reachable positions for the smallest worst-case margin;
    // chasing the argmax breaks down on plateaus and at the antipodal kink
    auto chase = [&](int did, int aid) {
        const int d = snap.defender_index(did), a = snap.intruder_index(aid);
        if (d < 0 || a < 0) return;
        const double reach = sp.v_defender * dt;
        double best = 0.0, best_val = worst_margin(snap.profile(a), snap.defender_s(d));
        for (double f : {0.5, -0.5, 1.0, -1.0}) {
            const double v = worst_margin(snap.profile(a), snap.defender_s(d) + f * reach);
            if (v < best_val - 1e-12) {
                best_val = v;
                best = f * reach;
            }
        }
        u.set_defender(static_cast<std::size_t>(did), best / dt, sp);
    };
    for (auto [did, aid] : as.one_v_one) chase(did, aid);
    for (auto [did, aid] : as.fallback) chase(did, aid);
    return ok;
}

// Euler step and event resolution: captures, then breaches.
inline std::vector<SimEvent> step(const Arena& arena, GameState& g, const ControlVector& u, double dt) {
    const Perimeter& per = arena.perimeter;
    for (auto& d : g.defenders)
        if (d.alive) d.s = per.wrap(d.s + u.omega[static_cast<std::size_t>(d.id)] * dt);
    for (auto& a : g.intruders) {
        if (!a.alive) continue;
        const Vec2 from = a.x;
        Vec2 to = from + u.velocity[static_cast<std::size_t>(a.id)] * dt;
        if (!per.contains(from) && per.contains(to)) {
            // stop on the boundary
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (per.contains(from + (to - from) * mid)) hi = mid;
                else lo = mid;
            }
            to = from + (to - from) * hi;
        }
        a.x = to;
    }
    g.time += dt;

    std::vector<SimEvent> events;
    struct Cand {
        double d;
        int def, intr;
    };
    std::vector<Cand> cands;
    for (const auto& d : g.defenders) {
        if (!d.alive) continue;
        const Vec2 p = per.point_at(d.s);
        for (const auto& a : g.intruders) {
            if (!a.alive) continue;
            const double dd = dist(p, a.x);
            if (dd <= arena.capture_radius) cands.push_back({dd, d.id, a.id});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.def != b.def) return a.def < b.def;
        return a.intr < b.intr;
    });
    for (const auto& c : cands) {
        auto& d = g.defenders[static_cast<std::size_t>(c.def)];
        auto& a = g.intruders[static_cast<std::size_t>(c.intr)];
        if (!d.alive || !a.alive) continue;
        d.alive = false;
        a.alive = false;
        events.push_back({SimEvent::Kind::capture, g.time, d.id, a.id, d.s, {}});
    }
    for (auto& a : g.intruders) {
        if (!a.alive) continue;
        if (per.contains(a.x) || per.boundary_distance(a.x) <= arena.breach_band) {
            a.alive = false;
            a.scored = true;
            ++g.score;
            events.push_back({SimEvent::Kind::breach, g.time, -1, a.id, per.project(a.x), {}});
        }
    }
    return events;
}

inline MonitorValues monitor_values(const TeamSnapshot& snap, const AssignmentSet* as) {
    MonitorValues m;
    std::vector<int> n_a, n_hat;
    snap.counts(snap.unremoved(), n_a, n_hat);
    bool first = true;
    for (int k = 0; k < snap.region_count(); ++k) {
        const int q = n_a[k] - snap.region(k).n_d, qh = n_hat[k] - snap.region(k).n_d;
        m.max_q = first ? q : std::max(m.max_q, q);
        m.max_q_hat = first ? qh : std::max(m.max_q_hat, qh);
        first = false;
    }
    m.two_v_one = as ? static_cast<int>(as->two_v_one.size()) : 0;
    return m;
}

// Idle defenders take the nearest intruders nobody covers.  Only happens once
// the envelope has been left.
inline void fill_fallback(const TeamSnapshot& snap, AssignmentSet& as) {
    if (as.unassigned_defenders.empty()) return;
    std::vector<char> open = snap.unremoved();
    for (const auto& e : as.two_v_one) open[static_cast<std::size_t>(snap.intruder_index(e.intruder))] = 0;
    for (auto [d, a] : as.one_v_one) open[static_cast<std::size_t>(snap.intruder_index(a))] = 0;
    for (auto [e, a] : as.implicit) open[static_cast<std::size_t>(snap.intruder_index(a))] = 0;
    const Perimeter& per = snap.arena().perimeter;
    struct Cand {
        double d;
        int def, intr;
    };
    std::vector<Cand> cands;
    for (int did : as.unassigned_defenders) {
        const int d = snap.defender_index(did);
        for (int a = 0; a < snap.intruder_count(); ++a)
            if (open[static_cast<std::size_t>(a)])
                cands.push_back({per.arc_distance(snap.defender_s(d), per.project(snap.intruder_x(a)), Direction::either), did, snap.intruder_id(a)});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.def != b.def) return a.def < b.def;
        return a.intr < b.intr;
    });
    std::map<int, char> taken;
    for (const auto& c : cands) {
        if (as.fallback.count(c.def) || taken[c.intr]) continue;
        as.fallback[c.def] = c.intr;
        taken[c.intr] = 1;
    }
}

// One episode.  The lgr defense removes at t=0 and reassigns every tick; the
// optimal intruders commit to G* and their breach points at t=0.
inline SimResult run(const Arena& arena, GameState g, const RunOptions& opt) {
    SimResult res;
    const auto& sp = arena.speeds;
    const Perimeter& per = arena.perimeter;
    const double dt = opt.dt > 0.0 ? opt.dt : arena.capture_radius / (4.0 * sp.v_defender);
    const double max_time = opt.max_time > 0.0 ? opt.max_time : 4.0 * per.length() / sp.v_intruder;
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    std::mt19937_64 rng(split_seed(opt.seed, 0x51u));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::optional<double>> committed(g.intruders.size());
    std::vector<double> wander(g.intruders.size(), 0.0);
    {
        TeamSnapshot snap(arena, g);
        std::vector<char> everyone(static_cast<std::size_t>(snap.intruder_count()), 1);
        const PartitionResult part = q_lg(snap, everyone);
        res.q_lg0 = part.q_lg;
        if (opt.intruder == IntruderPolicy::optimal)
            for (int id : part.g_star)
                for (int a = 0; a < snap.intruder_count(); ++a)
                    if (snap.cooperative(id - 1, a)) committed[static_cast<std::size_t>(snap.intruder_id(a))] = snap.pincer_point(id - 1, a);
        if (opt.defender == DefenderPolicy::lgr) {
            res.removed = remove_uncapturable(snap);
            for (int id : res.removed) g.intruders[static_cast<std::size_t>(id)].removed = true;
        }
        for (auto& w : wander) w = unit(rng) * per.length();
    }

    std::uint64_t digest = 1469598103934665603ull;
    std::optional<MonitorValues> prev, first;
    std::vector<TwoVsOne> prev_entries;
    std::map<int, int> prev_implicit;  // intruder id in an implicit zone -> index into prev_entries
    int tick = 0;
    while (g.alive_intruders() > 0 && g.time < max_time - 0.5 * dt) {
        TeamSnapshot snap(arena, g);
        AssignmentSet as;
        if (opt.defender == DefenderPolicy::lgr) {
            as = lgr_assign(snap, false);
            fill_fallback(snap, as);
        } else if (opt.defender == DefenderPolicy::mm) {
            as.one_v_one = mm_assignment(snap, std::vector<char>(static_cast<std::size_t>(snap.intruder_count()), 1)).matching;
        }
        ControlVector u(g.defenders.size(), g.intruders.size());
        const bool coherent = defender_controls(snap, as, dt, u);
        if (as.envelope_violation || !coherent) {
            if (res.envelope_violations == 0)
                res.events.push_back({SimEvent::Kind::envelope_violation, g.time, -1, -1, 0.0,
                                      coherent ? as.note : std::string("opposing pincer demands")});
            ++res.envelope_violations;
        }

        // transitions: a pincered intruder no longer beats one of its pair alone
        for (const auto& e : prev_entries) {
            const int a = snap.intruder_index(e.intruder);
            if (a < 0) continue;
            for (int side : {e.right, e.left}) {
                const int d = snap.defender_index(side);
                if (d >= 0 && !snap.wins(a, d)) {
                    res.events.push_back({SimEvent::Kind::transition, g.time, side, e.intruder, 0.0, {}});
                    break;
                }
            }
        }

        MonitorValues mv = monitor_values(snap, opt.defender == DefenderPolicy::lgr ? &as : nullptr);
        if (opt.defender == DefenderPolicy::lgr) {
            if (!first) first = mv;
            if (prev) {
                if (mv.max_q_hat > prev->max_q_hat) res.violations.push_back({"q_hat_nonincreasing", tick});
                if (mv.two_v_one > prev->two_v_one) res.violations.push_back({"two_v_one_nonincreasing", tick});
            }
            if (first->max_q <= 0 && mv.max_q > 0) res.violations.push_back({"q_nonpositive", tick});
            for (auto [y, idx] : prev_implicit) {
                const auto& e = prev_entries[static_cast<std::size_t>(idx)];
                const bool unresolved = std::any_of(as.two_v_one.begin(), as.two_v_one.end(), [&](const TwoVsOne& o) {
                    return o.right == e.right && o.left == e.left && o.intruder == e.intruder;
                });
                const int a = snap.intruder_index(y);
                if (!unresolved || a < 0) continue;
                const int r = snap.defender_index(e.right), l = snap.defender_index(e.left);
                if ((r >= 0 && snap.wins(a, r)) || (l >= 0 && snap.wins(a, l)))
                    res.violations.push_back({"implicit_zone", tick});
            }
            prev = mv;
            prev_entries = as.two_v_one;
            prev_implicit.clear();
            for (auto [idx, y] : as.implicit) prev_implicit[y] = idx;
        }

        for (int a = 0; a < snap.intruder_count(); ++a) {
            const int id = snap.intruder_id(a);
            double target = snap.home(a);
            if (opt.intruder == IntruderPolicy::optimal && committed[static_cast<std::size_t>(id)])
                target = *committed[static_cast<std::size_t>(id)];
            if (opt.intruder == IntruderPolicy::random) {
                if (unit(rng) < dt / opt.random_switch_time) wander[static_cast<std::size_t>(id)] = unit(rng) * per.length();
                target = wander[static_cast<std::size_t>(id)];
            }
            const Vec2 x = snap.intruder_x(a);
            const Vec2 dir = snap.profile(a).waypoint(target) - x;
            const double n = norm(dir);
            u.set_intruder(static_cast<std::size_t>(id), n > 0.0 ? dir * (sp.v_intruder / n) : Vec2{}, sp);
        }

        if (opt.on_tick) opt.on_tick({tick, &g, &as, mv});
        for (const auto& d : g.defenders) detail::mix(digest, d.alive ? d.s : -1.0);
        for (const auto& a : g.intruders) {
            detail::mix(digest, a.alive ? a.x.x : -1.0);
            detail::mix(digest, a.alive ? a.x.y : -1.0);
        }

        for (auto& ev : step(arena, g, u, dt)) res.events.push_back(std::move(ev));
        ++tick;
    }
    res.ticks = tick;
    res.score = g.score;
    if (g.alive_intruders() > 0) {
        res.timed_out = true;
        for (const auto& a : g.intruders) res.survivors += (a.alive && !a.removed) ? 1 : 0;
    }
    detail::mix(digest, static_cast<double>(g.score));
    res.digest = digest;
    res.final_state = std::move(g);
    return res;
}

}  // namespace pdl
