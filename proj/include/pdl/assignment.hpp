#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdl/regions.hpp"

namespace pdl {

// Residual game has a region with q_hat >= 2, or a positive score left over.
class EnvelopeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TwoVsOne {
    int region = 0;  // region id
    int right = 0, left = 0;  // defender ids
    int intruder = 0;
    int n_d = 0;
};

struct AssignmentSet {
    std::vector<int> removed;
    std::vector<TwoVsOne> two_v_one;
    std::map<int, int> one_v_one;          // defender id -> intruder id
    std::vector<int> implicit_eligible;    // indices into two_v_one
    std::map<int, int> implicit;           // two_v_one index -> intruder left to that pair
    std::vector<int> unassigned_defenders;
    std::map<int, int> fallback;           // best effort chases outside the guarantee, filled by the simulator
    bool envelope_violation = false;
    std::string note;
};

inline int q_lg_value(const TeamSnapshot& snap, const std::vector<char>& counted) {
    std::vector<int> n_a, n_hat;
    snap.counts(counted, n_a, n_hat);
    std::vector<detail::Arc> arcs;
    for (int k = 0; k < snap.region_count(); ++k) {
        const auto& r = snap.region(k);
        const int q = n_a[k] - r.n_d;
        if (q > 0) arcs.push_back({r.id, q, r.seg_start, r.degenerate() ? r.seg_total : r.seg_count, r.seg_total});
    }
    return detail::circular_best(arcs);
}

inline PartitionResult q_lg(const TeamSnapshot& snap, const std::vector<char>& counted) {
    return q_lg(snap.tally(counted));
}

// Greedy removal: one pass in ascending id, drop an intruder whenever that lowers Q_LG.
inline std::vector<int> remove_uncapturable(const TeamSnapshot& snap) {
    std::vector<char> counted = snap.unremoved();
    std::vector<int> removed;
    int q = q_lg_value(snap, counted);
    for (int a = 0; a < snap.intruder_count() && q > 0; ++a) {
        if (!counted[a]) continue;
        counted[a] = 0;
        const int next = q_lg_value(snap, counted);
        if (next < q) {
            removed.push_back(snap.intruder_id(a));
            q = next;
        } else {
            counted[a] = 1;
        }
    }
    return removed;
}

struct TwoVsOneResult {
    std::vector<TwoVsOne> entries;
    std::vector<int> one_v_one_defenders;  // defender ids still free for 1v1
    bool violation = false;
    std::string note;
};

// Pincer assignments over independent regions with q_hat >= 1, largest n_D first.
// strict: throw on leaving the envelope instead of flagging it.
inline TwoVsOneResult assign_2v1(const TeamSnapshot& snap, std::vector<char> residual, bool strict = true) {
    TwoVsOneResult out;
    const int nd = snap.defender_count(), na = snap.intruder_count(), nk = snap.region_count();
    std::vector<int> n_a, n_hat;
    snap.counts(residual, n_a, n_hat);
    auto flag = [&](const std::string& why) {
        if (strict) throw EnvelopeError("outside guarantee envelope: " + why);
        if (!out.violation) out.note = why;
        out.violation = true;
    };
    for (int k = 0; k < nk; ++k)
        if (n_hat[k] - snap.region(k).n_d >= 2) {
            flag("q_hat >= 2 in region " + std::to_string(snap.region(k).id));
            break;
        }
    std::vector<char> free(static_cast<std::size_t>(nd), 1), skip(static_cast<std::size_t>(nk), 0);
    while (true) {
        int m = -1;
        for (int k = 0; k < nk; ++k) {
            if (skip[k] || n_hat[k] - snap.region(k).n_d < 1) continue;
            if (m < 0 || snap.region(k).n_d > snap.region(m).n_d) m = k;
        }
        if (m < 0) break;
        const auto& r = snap.region(m);
        int pick = -1;
        if (!r.degenerate() && r.interval.length > 0.0) {
            const Vec2 mid = snap.arena().perimeter.point_at(r.interval.start + 0.5 * r.interval.length);
            double best = 0.0;
            for (int a = 0; a < na; ++a) {
                if (!residual[a] || !snap.paired(m, a)) continue;
                const double d = dist(snap.intruder_x(a), mid);
                if (pick < 0 || d < best) {
                    pick = a;
                    best = d;
                }
            }
        }
        if (pick < 0) {
            flag("region " + std::to_string(r.id) + " has a positive score");
            skip[m] = 1;
            continue;
        }
        out.entries.push_back({r.id, snap.defender_id(r.right), snap.defender_id(r.left), snap.intruder_id(pick), r.n_d});
        free[r.right] = free[r.left] = 0;
        residual[pick] = 0;
        for (int k = 0; k < nk; ++k) {
            n_a[k] -= snap.cooperative(k, pick) ? 1 : 0;
            n_hat[k] -= snap.independent(k, pick) ? 1 : 0;
        }
    }
    for (int d = 0; d < nd; ++d)
        if (free[d]) out.one_v_one_defenders.push_back(snap.defender_id(d));
    return out;
}

// Eq. 9: strictly larger n_D than every other entry sharing a boundary defender
inline bool implicit_eligible(std::size_t entry, const std::vector<TwoVsOne>& entries) {
    const auto& e = entries[entry];
    for (std::size_t m = 0; m < entries.size(); ++m) {
        if (m == entry) continue;
        const auto& o = entries[m];
        const bool share = o.right == e.right || o.right == e.left || o.left == e.right || o.left == e.left;
        if (share && !(e.n_d > o.n_d)) return false;
    }
    return true;
}

// Maximum-cardinality bipartite matching by augmenting paths.  Left nodes are
// tried in order, neighbours in ascending order.  Returns right -> left.
inline std::vector<int> max_matching(const std::vector<std::vector<int>>& adj, int right_count) {
    std::vector<int> match(static_cast<std::size_t>(right_count), -1);
    std::vector<char> seen;
    auto augment = [&](auto&& self, int u) -> bool {
        for (int v : adj[u]) {
            if (seen[v]) continue;
            seen[v] = 1;
            if (match[v] < 0 || self(self, match[v])) {
                match[v] = u;
                return true;
            }
        }
        return false;
    };
    for (int u = 0; u < static_cast<int>(adj.size()); ++u) {
        seen.assign(static_cast<std::size_t>(right_count), 0);
        augment(augment, u);
    }
    return match;
}

struct OneVsOneResult {
    std::map<int, int> one_v_one;
    std::vector<int> eligible;        // entry indices
    std::map<int, int> implicit;      // entry index -> intruder id
    std::vector<int> unmatched;       // intruder ids left without any edge
};

inline OneVsOneResult assign_1v1(const TeamSnapshot& snap, const std::vector<char>& residual,
                                 const std::vector<TwoVsOne>& entries, const std::vector<int>& singles) {
    OneVsOneResult out;
    std::vector<char> open = residual;
    for (const auto& e : entries) {
        const int a = snap.intruder_index(e.intruder);
        if (a >= 0) open[a] = 0;
    }
    std::vector<int> right;  // intruder indices
    for (int a = 0; a < snap.intruder_count(); ++a)
        if (open[a]) right.push_back(a);
    std::vector<std::vector<int>> adj;
    for (int id : singles) {
        const int d = snap.defender_index(id);
        std::vector<int> nb;
        for (int v = 0; v < static_cast<int>(right.size()); ++v)
            if (!snap.wins(right[v], d)) nb.push_back(v);
        adj.push_back(std::move(nb));
    }
    for (std::size_t e = 0; e < entries.size(); ++e) {
        if (!implicit_eligible(e, entries)) continue;
        out.eligible.push_back(static_cast<int>(e));
        const int k = entries[e].region - 1;
        std::vector<int> nb;
        for (int v = 0; v < static_cast<int>(right.size()); ++v)
            if (snap.implicit(k, right[v])) nb.push_back(v);
        adj.push_back(std::move(nb));
    }
    const std::vector<int> match = max_matching(adj, static_cast<int>(right.size()));
    const int singles_n = static_cast<int>(singles.size());
    for (int v = 0; v < static_cast<int>(right.size()); ++v) {
        const int u = match[v];
        const int id = snap.intruder_id(right[v]);
        if (u < 0) out.unmatched.push_back(id);
        else if (u < singles_n) out.one_v_one[singles[u]] = id;
        else out.implicit[out.eligible[u - singles_n]] = id;
    }
    return out;
}

// Assignment for the current tick; removal flags already sit in the state.
inline AssignmentSet lgr_assign(const TeamSnapshot& snap, bool strict = true) {
    AssignmentSet out;
    const std::vector<char> residual = snap.unremoved();
    for (int a = 0; a < snap.intruder_count(); ++a)
        if (snap.removed(a)) out.removed.push_back(snap.intruder_id(a));
    TwoVsOneResult two = assign_2v1(snap, residual, strict);
    out.two_v_one = two.entries;
    out.envelope_violation = two.violation;
    out.note = two.note;
    OneVsOneResult one = assign_1v1(snap, residual, two.entries, two.one_v_one_defenders);
    out.one_v_one = one.one_v_one;
    out.implicit_eligible = one.eligible;
    out.implicit = one.implicit;
    for (int id : two.one_v_one_defenders)
        if (!out.one_v_one.count(id)) out.unassigned_defenders.push_back(id);
    return out;
}

// Full pipeline on a fresh state: removal, then the per-tick assignment.
inline AssignmentSet lgr_defense(const Arena& arena, GameState state, bool strict = true) {
    std::vector<int> removed;
    {
        TeamSnapshot snap(arena, state);
        removed = remove_uncapturable(snap);
    }
    for (int id : removed) state.intruders[static_cast<std::size_t>(id)].removed = true;
    TeamSnapshot snap(arena, state);
    return lgr_assign(snap, strict);
}

struct MatchingResult {
    std::map<int, int> matching;  // defender id -> intruder id
    int q_mm = 0;
};

// baseline: every alive defender against every counted intruder it can capture alone
inline MatchingResult mm_assignment(const TeamSnapshot& snap, const std::vector<char>& counted) {
    MatchingResult out;
    std::vector<int> right;
    for (int a = 0; a < snap.intruder_count(); ++a)
        if (counted[a]) right.push_back(a);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(snap.defender_count()));
    for (int d = 0; d < snap.defender_count(); ++d)
        for (int v = 0; v < static_cast<int>(right.size()); ++v)
            if (!snap.wins(right[v], d)) adj[d].push_back(v);
    const std::vector<int> match = max_matching(adj, static_cast<int>(right.size()));
    int captured = 0;
    for (int v = 0; v < static_cast<int>(right.size()); ++v)
        if (match[v] >= 0) {
            out.matching[snap.defender_id(match[v])] = snap.intruder_id(right[v]);
            ++captured;
        }
    out.q_mm = static_cast<int>(right.size()) - captured;
    return out;
}

// baseline: exhaustive search over 1v1 and pincer assignments with no shared agent
inline int mis_assignment(const TeamSnapshot& snap, const std::vector<char>& counted) {
    std::vector<int> intr;
    for (int a = 0; a < snap.intruder_count(); ++a)
        if (counted[a]) intr.push_back(a);
    const int na = static_cast<int>(intr.size()), nd = snap.defender_count();
    if (nd + na > 14) throw OracleSizeError("MIS instance too large");
    // options[i]: defender bitmasks that can take intruder i
    std::vector<std::vector<unsigned>> options(static_cast<std::size_t>(na));
    for (int i = 0; i < na; ++i) {
        for (int d = 0; d < nd; ++d)
            if (!snap.wins(intr[i], d)) options[i].push_back(1u << d);
        for (int k = 0; k < snap.region_count(); ++k) {
            const auto& r = snap.region(k);
            if (!r.degenerate() && snap.paired(k, intr[i])) options[i].push_back((1u << r.right) | (1u << r.left));
        }
    }
    // plain enumeration of every conflict-free assignment; no pruning
    int best = 0;
    auto rec = [&](auto&& self, int i, unsigned used, int taken) -> void {
        if (i == na) {
            best = std::max(best, taken);
            return;
        }
        for (unsigned m : options[i])
            if (!(used & m)) self(self, i + 1, used | m, taken + 1);
        self(self, i + 1, used, taken);
    };
    rec(rec, 0, 0u, 0);
    return na - best;
}

}  // namespace pdl
