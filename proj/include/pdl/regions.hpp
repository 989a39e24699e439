#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pdl/race.hpp"
#include "pdl/state.hpp"

namespace pdl {

class OracleSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LocalGameRegion {
    int id = 0;  // 1-based; (right, left) index pair in ascending defender id order
    int right = 0, left = 0;
    ArcInterval interval;
    std::vector<int> inner;  // defenders strictly inside, ccw order
    int n_d = 0;
    int n_a = 0;      // counted intruders in the cooperative region
    int n_hat_a = 0;  // counted intruders in the independent region
    std::vector<int> cooperative_members, independent_members;
    // positions on the circle of distinct defender locations, for the interval DP
    int seg_start = 0, seg_count = 0, seg_total = 0;

    bool degenerate() const { return interval.degenerate_full; }
    int q() const { return n_a - n_d; }
    int q_hat() const { return n_hat_a - n_d; }
    int delta_n_a() const { return n_hat_a - n_a; }
};

inline bool regions_disjoint(const Perimeter& p, const LocalGameRegion& a, const LocalGameRegion& b) {
    return intervals_disjoint(p, a.interval, b.interval);
}

// Every race quantity of one state: per-intruder sweeps for every alive defender,
// 1v1 outcomes, each intruder's home point and the region memberships.
//
// An intruder is credited to a non-degenerate region only when its home point,
// the breach point where it does best against the whole team, lies in the
// half-open interval [s_R, s_L).  Arc-disjoint regions then never share an intruder.
class TeamSnapshot {
public:
    TeamSnapshot(const Arena& arena, const GameState& state) : arena_(&arena) {
        for (const auto& d : state.defenders)
            if (d.alive) {
                def_ids_.push_back(d.id);
                def_s_.push_back(arena.perimeter.wrap(d.s));
            }
        for (const auto& a : state.intruders)
            if (a.alive) {
                int_ids_.push_back(a.id);
                int_x_.push_back(a.x);
                removed_.push_back(a.removed ? 1 : 0);
            }
        order_defenders();
        build_regions();
        const int na = intruder_count(), nd = defender_count(), nk = static_cast<int>(regions_.size());
        const double half = 0.5 * arena.length();
        profiles_.reserve(static_cast<std::size_t>(na));
        sweeps_.resize(static_cast<std::size_t>(na * nd * 2));
        wins_.assign(static_cast<std::size_t>(na * nd), 0);
        home_.assign(static_cast<std::size_t>(na), 0.0);
        home_margin_.assign(static_cast<std::size_t>(na), 0.0);
        ac_.assign(static_cast<std::size_t>(nk * na), 0);
        ai_.assign(static_cast<std::size_t>(nk * na), 0);
        const double thr = arena.time_tol();
        for (int a = 0; a < na; ++a) {
            profiles_.push_back(std::make_unique<RaceProfile>(arena, int_x_[a]));
            const RaceProfile& p = *profiles_.back();
            for (int d = 0; d < nd; ++d) {
                sweep(a, d, +1).build(p, def_s_[d], +1, half);
                sweep(a, d, -1).build(p, def_s_[d], -1, half);
                wins_[a * nd + d] = race::beats_single(sweep(a, d, +1), sweep(a, d, -1), arena.length(), thr);
            }
            home_[a] = compute_home(a);
            for (int k = 0; k < nk; ++k) classify(k, a, thr);
        }
    }

    TeamSnapshot(const TeamSnapshot&) = delete;
    TeamSnapshot& operator=(const TeamSnapshot&) = delete;

    const Arena& arena() const { return *arena_; }
    int defender_count() const { return static_cast<int>(def_ids_.size()); }
    int intruder_count() const { return static_cast<int>(int_ids_.size()); }
    int defender_id(int d) const { return def_ids_[d]; }
    int intruder_id(int a) const { return int_ids_[a]; }
    double defender_s(int d) const { return def_s_[d]; }
    Vec2 intruder_x(int a) const { return int_x_[a]; }
    bool removed(int a) const { return removed_[a] != 0; }

    int defender_index(int id) const { return index_of(def_ids_, id); }
    int intruder_index(int id) const { return index_of(int_ids_, id); }

    bool wins(int a, int d) const { return wins_[a * defender_count() + d] != 0; }
    double home(int a) const { return home_[a]; }
    double home_margin(int a) const { return home_margin_[a]; }

    const LocalGameRegion& region(int k) const { return regions_[k]; }
    int region_count() const { return static_cast<int>(regions_.size()); }
    bool cooperative(int k, int a) const { return ac_[k * intruder_count() + a] != 0; }
    bool independent(int k, int a) const { return ai_[k * intruder_count() + a] != 0; }
    bool paired(int k, int a) const { return independent(k, a) && !cooperative(k, a); }
    // implicit assignment zone of region k's boundary pair
    bool implicit(int k, int a) const {
        return !wins(a, regions_[k].right) && !wins(a, regions_[k].left);
    }

    // mask over intruder indices: alive and not removed
    std::vector<char> unremoved() const {
        std::vector<char> m(int_ids_.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = removed_[i] ? 0 : 1;
        return m;
    }

    // regions with subteam counts over the masked intruders
    std::vector<LocalGameRegion> tally(const std::vector<char>& counted) const {
        std::vector<LocalGameRegion> out = regions_;
        const int na = intruder_count();
        for (int k = 0; k < region_count(); ++k) {
            auto& r = out[k];
            for (int a = 0; a < na; ++a) {
                if (!counted[a]) continue;
                if (cooperative(k, a)) {
                    ++r.n_a;
                    r.cooperative_members.push_back(int_ids_[a]);
                }
                if (independent(k, a)) {
                    ++r.n_hat_a;
                    r.independent_members.push_back(int_ids_[a]);
                }
            }
        }
        return out;
    }

    void counts(const std::vector<char>& counted, std::vector<int>& n_a, std::vector<int>& n_hat) const {
        const int na = intruder_count(), nk = region_count();
        n_a.assign(static_cast<std::size_t>(nk), 0);
        n_hat.assign(static_cast<std::size_t>(nk), 0);
        for (int k = 0; k < nk; ++k)
            for (int a = 0; a < na; ++a)
                if (counted[a]) {
                    n_a[k] += ac_[k * na + a];
                    n_hat[k] += ai_[k * na + a];
                }
    }

    // most threatened breach point of a 1v1 duel: argmax of the shortest-route margin
    WindowMax pursuit(int d, int a, double* s_out) const {
        const double half = 0.5 * arena_->length();
        WindowMax c = sweep(a, d, +1).sup(half), w = sweep(a, d, -1).sup(half);
        if (w.value > c.value) {
            *s_out = sweep(a, d, -1).point(w.u);
            return w;
        }
        *s_out = sweep(a, d, +1).point(c.u);
        return c;
    }

    // sups of the ccw and cw margins of defender d against intruder a
    std::pair<double, double> directional_sups(int d, int a) const {
        const double half = 0.5 * arena_->length();
        return {sweep(a, d, +1).sup(half).value, sweep(a, d, -1).sup(half).value};
    }

    // best interior breach point against region k's pincer
    double pincer_point(int k, int a) const {
        const auto& r = regions_[k];
        double s = 0.0;
        race::pincer_sup(sweep(a, r.right, +1), sweep(a, r.left, -1), r.interval.length, &s);
        return s;
    }

    const RaceProfile& profile(int a) const { return *profiles_[a]; }

private:
    static int index_of(const std::vector<int>& v, int id) {
        auto it = std::lower_bound(v.begin(), v.end(), id);
        if (it == v.end() || *it != id) return -1;
        return static_cast<int>(it - v.begin());
    }

    Sweep& sweep(int a, int d, int sign) { return sweeps_[(a * defender_count() + d) * 2 + (sign > 0 ? 0 : 1)]; }
    const Sweep& sweep(int a, int d, int sign) const {
        return sweeps_[(a * defender_count() + d) * 2 + (sign > 0 ? 0 : 1)];
    }

    void order_defenders() {
        const int nd = defender_count();
        by_rank_.resize(static_cast<std::size_t>(nd));
        std::iota(by_rank_.begin(), by_rank_.end(), 0);
        std::sort(by_rank_.begin(), by_rank_.end(), [&](int a, int b) {
            if (def_s_[a] != def_s_[b]) return def_s_[a] < def_s_[b];
            return def_ids_[a] < def_ids_[b];
        });
        rank_.resize(static_cast<std::size_t>(nd));
        for (int r = 0; r < nd; ++r) rank_[by_rank_[r]] = r;
        // distinct locations, for the interval DP
        spot_.resize(static_cast<std::size_t>(nd));
        int m = 0;
        for (int r = 0; r < nd; ++r) {
            if (r > 0 && def_s_[by_rank_[r]] != def_s_[by_rank_[r - 1]]) ++m;
            spot_[by_rank_[r]] = m;
        }
        spots_ = nd > 0 ? m + 1 : 0;
    }

    // ccw length from right to left; coincident defenders are ordered by rank
    double span(int right, int left) const {
        const double L = arena_->length();
        double len = arena_->perimeter.arc_distance(def_s_[right], def_s_[left], Direction::ccw);
        if (len == 0.0 && rank_[left] < rank_[right]) len = L;
        return len;
    }

    void build_regions() {
        const int nd = defender_count();
        regions_.clear();
        regions_.reserve(static_cast<std::size_t>(nd * nd));
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j) {
                LocalGameRegion r;
                r.id = i * nd + j + 1;
                r.right = i;
                r.left = j;
                r.seg_total = spots_;
                if (i == j) {
                    r.interval = {def_s_[i], arena_->length(), true};
                    for (int t = 1; t < nd; ++t) r.inner.push_back(by_rank_[(rank_[i] + t) % nd]);
                    r.seg_start = spot_[i];
                    r.seg_count = spots_;
                } else {
                    r.interval = {def_s_[i], span(i, j), false};
                    const int steps = (rank_[j] - rank_[i] + nd) % nd;
                    for (int t = 1; t < steps; ++t) r.inner.push_back(by_rank_[(rank_[i] + t) % nd]);
                    r.seg_start = spot_[i];
                    r.seg_count = (spot_[j] - spot_[i] + spots_) % spots_;
                    if (r.seg_count == 0 && r.interval.length > 0.0) r.seg_count = spots_;
                }
                r.n_d = static_cast<int>(r.inner.size());
                regions_.push_back(std::move(r));
            }
        // report defender ids, not indices
        for (auto& r : regions_)
            for (int& d : r.inner) d = def_ids_[d];
    }

    double compute_home(int a) {
        const int nd = defender_count();
        const double L = arena_->length();
        if (nd == 0) {
            home_margin_[a] = -profiles_[a]->intruder_time(arena_->perimeter.project(int_x_[a]));
            return arena_->perimeter.project(int_x_[a]);
        }
        double best = -std::numeric_limits<double>::infinity(), best_s = 0.0;
        bool first = true;
        auto consider = [&](WindowMax w, double s) {
            const double tie = 1e-12 * (1.0 + std::abs(w.value));
            if (first || w.value > best + tie || (w.value >= best - tie && s < best_s)) {
                best = first ? w.value : std::max(best, w.value);
                best_s = s;
                first = false;
            }
        };
        if (nd == 1) {
            double s = 0.0;
            WindowMax w = pursuit(0, a, &s);
            consider(w, s);
        } else {
            // a gap whose grid max trails the best grid max by more than the
            // sampling slack cannot hold the sup
            std::vector<double> coarse(static_cast<std::size_t>(nd), -std::numeric_limits<double>::infinity());
            double top = -std::numeric_limits<double>::infinity();
            for (int r = 0; r < nd; ++r) {
                const int right = by_rank_[r], left = by_rank_[(r + 1) % nd];
                const double len = std::min(span(right, left), L);
                if (len <= 0.0) continue;
                coarse[r] = std::max(sweep(a, right, +1).grid_max(0.5 * len).value, sweep(a, left, -1).grid_max(0.5 * len).value);
                top = std::max(top, coarse[r]);
            }
            const double slack = 2.0 * arena_->lipschitz() * arena_->perimeter.spacing();
            for (int r = 0; r < nd; ++r) {
                const int right = by_rank_[r], left = by_rank_[(r + 1) % nd];
                const double len = span(right, left);
                if (len <= 0.0 || coarse[r] < top - slack) continue;
                double s = 0.0;
                WindowMax w = race::pincer_sup(sweep(a, right, +1), sweep(a, left, -1), std::min(len, L), &s);
                consider(w, s);
            }
        }
        home_margin_[a] = best;
        return best_s;
    }

    void classify(int k, int a, double thr) {
        const auto& r = regions_[k];
        const int na = intruder_count();
        if (r.degenerate()) {
            ac_[k * na + a] = ai_[k * na + a] = wins(a, r.right) ? 1 : 0;
            return;
        }
        const double len = r.interval.length;
        if (len <= 0.0) return;
        const double off = arena_->perimeter.wrap(home_[a] - r.interval.start);
        if (!(off < len)) return;
        const Sweep& cr = sweep(a, r.right, +1);
        const Sweep& cl = sweep(a, r.left, -1);
        const bool ind = race::beats_in_interval(cr, cl, len, *arena_, thr) && race::beats_in_interval(cl, cr, len, *arena_, thr);
        if (!ind) return;
        ai_[k * na + a] = 1;
        ac_[k * na + a] = race::beats_pincer(cr, cl, len, thr) ? 1 : 0;
    }

    const Arena* arena_;
    std::vector<int> def_ids_, int_ids_;
    std::vector<double> def_s_;
    std::vector<Vec2> int_x_;
    std::vector<char> removed_;
    std::vector<int> by_rank_, rank_, spot_;
    int spots_ = 0;
    std::vector<LocalGameRegion> regions_;
    std::vector<std::unique_ptr<RaceProfile>> profiles_;
    std::vector<Sweep> sweeps_;
    std::vector<char> wins_, ac_, ai_;
    std::vector<double> home_, home_margin_;
};

inline std::vector<LocalGameRegion> enumerate_regions(const Arena& arena, const GameState& state) {
    TeamSnapshot snap(arena, state);
    return snap.tally(snap.unremoved());
}

struct PartitionResult {
    int q_lg = 0;
    std::vector<int> g_star;  // region ids, ascending
};

namespace detail {

struct Arc {
    int id;
    int weight;
    int start, count, total;
    bool full() const { return count >= total; }
};

inline bool arcs_disjoint(const Arc& a, const Arc& b) {
    if (a.count == 0 || b.count == 0) return true;
    if (a.full() || b.full()) return false;
    const int m = a.total;
    const int ab = (b.start - a.start + m) % m, ba = (a.start - b.start + m) % m;
    return ab >= a.count && ba >= b.count;
}

// weighted interval scheduling over arcs inside the linear window [lo, hi)
inline int linear_best(const std::vector<const Arc*>& arcs, int lo, int hi) {
    if (hi <= lo) return 0;
    std::vector<int> dp(static_cast<std::size_t>(hi - lo + 1), 0);
    std::vector<std::vector<const Arc*>> ending(static_cast<std::size_t>(hi - lo + 1));
    for (const Arc* a : arcs) ending[a->start + a->count - lo].push_back(a);
    for (int x = 1; x <= hi - lo; ++x) {
        dp[x] = dp[x - 1];
        for (const Arc* a : ending[x]) dp[x] = std::max(dp[x], dp[a->start - lo] + a->weight);
    }
    return dp[hi - lo];
}

// maximum weight of pairwise-disjoint arcs on the circle of `total` segments
inline int circular_best(const std::vector<Arc>& arcs) {
    int best = 0;
    std::vector<const Arc*> plain;
    for (const auto& a : arcs) {
        if (a.count == 0) continue;
        if (a.full()) best = std::max(best, a.weight);
        else plain.push_back(&a);
    }
    if (plain.empty()) return best;
    const int m = plain.front()->total;
    // cut at the start of segment 0: arcs that avoid it form a line
    auto covers_cut = [m](const Arc* a) { return a->start == 0 || a->start + a->count > m; };
    std::vector<const Arc*> line;
    for (const Arc* a : plain)
        if (!covers_cut(a)) line.push_back(a);
    best = std::max(best, linear_best(line, 1, m));
    for (const Arc* c : plain) {
        if (!covers_cut(c)) continue;
        const int lo = (c->start + c->count) % m, hi = c->start == 0 ? m : c->start;
        std::vector<const Arc*> inside;
        for (const Arc* a : line)
            if (a->start >= lo && a->start + a->count <= hi) inside.push_back(a);
        best = std::max(best, c->weight + linear_best(inside, lo, hi));
    }
    return best;
}

inline std::vector<Arc> positive_arcs(const std::vector<LocalGameRegion>& regions) {
    std::vector<Arc> arcs;
    for (const auto& r : regions)
        if (r.q() > 0) arcs.push_back({r.id, r.q(), r.seg_start, r.degenerate() ? r.seg_total : r.seg_count, r.seg_total});
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.id < b.id; });
    return arcs;
}

}  // namespace detail

// Eq. "guaranteed total score": maximum weight independent set on the circular-arc
// graph of positive-score regions; ties resolved toward the smallest id set.
inline PartitionResult q_lg(const std::vector<LocalGameRegion>& regions) {
    using detail::Arc;
    const std::vector<Arc> arcs = detail::positive_arcs(regions);
    PartitionResult out;
    out.q_lg = detail::circular_best(arcs);
    if (out.q_lg == 0) return out;
    std::vector<const Arc*> chosen;
    int chosen_w = 0;
    for (const Arc& a : arcs) {
        bool ok = true;
        for (const Arc* c : chosen) ok = ok && detail::arcs_disjoint(a, *c);
        if (!ok) continue;
        std::vector<Arc> rest;
        for (const Arc& b : arcs) {
            if (&b == &a) continue;
            bool fits = detail::arcs_disjoint(a, b);
            for (const Arc* c : chosen) fits = fits && detail::arcs_disjoint(*c, b);
            if (fits) rest.push_back(b);
        }
        if (chosen_w + a.weight + detail::circular_best(rest) == out.q_lg) {
            chosen.push_back(&a);
            chosen_w += a.weight;
            out.g_star.push_back(a.id);
        }
        if (chosen_w == out.q_lg) break;
    }
    return out;
}

// value only, for the removal loop
inline int q_lg_value(const std::vector<LocalGameRegion>& regions) {
    return detail::circular_best(detail::positive_arcs(regions));
}

// exhaustive oracle over pairwise-disjoint subsets of positive-score regions
inline PartitionResult q_lg_bruteforce(const Perimeter& p, const std::vector<LocalGameRegion>& regions, int defenders) {
    if (defenders > 8) throw OracleSizeError("oracle instance too large");
    std::vector<const LocalGameRegion*> pos;
    for (const auto& r : regions)
        if (r.q() > 0) pos.push_back(&r);
    std::sort(pos.begin(), pos.end(), [](auto* a, auto* b) { return a->id < b->id; });
    PartitionResult best;
    std::vector<const LocalGameRegion*> cur;
    auto better = [&](int value) {
        if (value != best.q_lg) return value > best.q_lg;
        std::vector<int> ids;
        for (auto* r : cur) ids.push_back(r->id);
        return std::lexicographical_compare(ids.begin(), ids.end(), best.g_star.begin(), best.g_star.end());
    };
    auto rec = [&](auto&& self, std::size_t i, int value) -> void {
        if (i == pos.size()) {
            if (value > 0 && better(value)) {
                best.q_lg = value;
                best.g_star.clear();
                for (auto* r : cur) best.g_star.push_back(r->id);
            }
            return;
        }
        bool ok = true;
        for (auto* c : cur) ok = ok && regions_disjoint(p, *c, *pos[i]);
        if (ok) {
            cur.push_back(pos[i]);
            self(self, i + 1, value + pos[i]->q());
            cur.pop_back();
        }
        self(self, i + 1, value);
    };
    rec(rec, 0, 0);
    return best;
}

}  // namespace pdl
