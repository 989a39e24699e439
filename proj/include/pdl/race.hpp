#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "pdl/geometry.hpp"

namespace pdl {

struct SpeedModel {
    double v_defender = 1.0;
    double v_intruder = 1.0;

    double nu() const { return v_intruder / v_defender; }

    static SpeedModel from_ratio(double v_defender, double nu) {
        SpeedModel m{v_defender, v_defender * nu};
        m.validate();
        return m;
    }

    void validate() const {
        if (!(v_defender > 0.0) || !(v_intruder > 0.0) || !std::isfinite(v_defender) || !std::isfinite(v_intruder))
            throw ValidationError("speeds must be positive");
        if (nu() > 1.0 + 1e-12) throw ValidationError("speed ratio nu must lie in (0, 1]");
    }
};

// Everything a race between one intruder and perimeter-bound defenders depends on.
// capture_radius and breach_band shift the race so that it matches the
// discrete capture/breach rule of the simulator; both are zero for pure geometry.
struct Arena {
    Perimeter perimeter;
    SpeedModel speeds;
    double capture_radius = 0.0;
    double breach_band = 0.0;

    double length() const { return perimeter.length(); }
    double time_tol() const { return 1e-9 * perimeter.length() / speeds.v_defender; }
    double arc_tol() const { return 1e-6 * perimeter.length(); }
    // slope bound of a margin as a function of the breach point
    double lipschitz() const { return 1.0 / speeds.v_defender + 1.0 / speeds.v_intruder; }
};

// An intruder's arrival times at every sample of the perimeter.
class RaceProfile {
public:
    RaceProfile(const Arena& arena, Vec2 x)
        : arena_(&arena), eye_(arena.perimeter.observer(x)), times_(arena.perimeter.resolution()) {
        arena.perimeter.travel_distances(x, times_);
        const double band = arena.breach_band, v = arena.speeds.v_intruder;
        for (double& t : times_) t = std::max(0.0, t - band) / v;
    }

    const Arena& arena() const { return *arena_; }
    Vec2 position() const { return eye_.position(); }
    double sample_time(int j) const { return times_[static_cast<std::size_t>(j)]; }

    double intruder_time(double s) const {
        return std::max(0.0, eye_.travel(s) - arena_->breach_band) / arena_->speeds.v_intruder;
    }

    double defender_time(double arc) const { return (arc - arena_->capture_radius) / arena_->speeds.v_defender; }

    // race margin at the point u along the perimeter from anchor (sign +1 ccw, -1 cw)
    double value(double anchor, int sign, double u) const {
        return defender_time(u) - intruder_time(anchor + sign * u);
    }

    Vec2 waypoint(double s) const { return eye_.waypoint(s); }

private:
    const Arena* arena_;
    Perimeter::Observer eye_;
    std::vector<double> times_;
};

struct WindowMax {
    double value = -std::numeric_limits<double>::infinity();
    double u = 0.0;
};

// Margins of one defender running one way from its position, evaluated on the
// shared sample grid: prefix maxima give the sup over any window [0, len] in O(1).
class Sweep {
public:
    Sweep() = default;

    Sweep(const RaceProfile& p, double anchor, int sign, double cap) { build(p, anchor, sign, cap); }

    void build(const RaceProfile& p, double anchor, int sign, double cap) {
        p_ = &p;
        const Perimeter& per = p.arena().perimeter;
        const int M = per.resolution();
        h_ = per.spacing();
        anchor_ = per.wrap(anchor);
        sign_ = sign;
        if (sign > 0) {
            j0_ = static_cast<int>(std::floor(anchor_ / h_)) + 1;
            u0_ = j0_ * h_ - anchor_;
        } else {
            j0_ = static_cast<int>(std::ceil(anchor_ / h_)) - 1;
            u0_ = anchor_ - j0_ * h_;
        }
        if (u0_ <= 0.0) {
            j0_ += sign;
            u0_ += h_;
        }
        const int n = std::min(M, count(cap));
        // rebuilt every tick; skip zero-filling
        if (n > cap_) {
            val_.reset(new double[static_cast<std::size_t>(n)]);
            best_.reset(new int[static_cast<std::size_t>(n)]);
            cap_ = n;
        }
        n_ = n;
        const double inv_vd = 1.0 / p.arena().speeds.v_defender, c = p.arena().capture_radius;
        double run = -std::numeric_limits<double>::infinity();
        int arg = 0;
        int j = j0_ % M;
        if (j < 0) j += M;
        for (int k = 0; k < n; ++k, j += sign) {
            if (j >= M) j -= M;
            else if (j < 0) j += M;
            const double v = (u0_ + k * h_ - c) * inv_vd - p.sample_time(j);
            val_[k] = v;
            if (v > run) {
                run = v;
                arg = k;
            }
            best_[k] = arg;
        }
    }

    double anchor() const { return anchor_; }
    int sign() const { return sign_; }
    double point(double u) const { return p_->arena().perimeter.wrap(anchor_ + sign_ * u); }

    // grid samples inside [0, len] plus the exact value at len
    WindowMax grid_max(double len) const {
        WindowMax w{p_->value(anchor_, sign_, len), len};
        const int k = std::min(count(len), n_);
        if (k > 0) {
            const int a = best_[k - 1];
            if (val_[a] > w.value) w = {val_[a], u0_ + a * h_};
        }
        return w;
    }

    // sup over [0, len] to the arc tolerance: golden sections around sampled local maxima
    WindowMax sup(double len) const {
        WindowMax w = grid_max(len);
        const int k = std::min(count(len), n_);
        const double band = p_->arena().lipschitz() * h_;
        for (int i = 0; i < k; ++i) {
            if (val_[i] < w.value - band) continue;
            if (i > 0 && val_[i - 1] > val_[i]) continue;
            if (i + 1 < k && val_[i + 1] > val_[i]) continue;
            const double u = u0_ + i * h_;
            WindowMax r = golden(std::max(0.0, u - h_), std::min(len, u + h_));
            if (r.value > w.value) w = r;
        }
        return w;
    }

    // base + sup over [0, len] > thr, refining only when the grid cannot decide
    bool exceeds(double len, double base, double thr) const {
        if (len <= 0.0) return false;
        const double g = base + grid_max(len).value;
        if (g > thr) return true;
        if (g <= thr - p_->arena().lipschitz() * h_) return false;
        return base + sup(len).value > thr;
    }

private:
    int count(double len) const {
        if (len < u0_) return 0;
        return static_cast<int>(std::floor((len - u0_) / h_)) + 1;
    }

    WindowMax golden(double a, double b) const {
        const double tol = p_->arena().arc_tol();
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = p_->value(anchor_, sign_, x1), f2 = p_->value(anchor_, sign_, x2);
        while (b - a > tol) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = p_->value(anchor_, sign_, x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = p_->value(anchor_, sign_, x1);
            }
        }
        const double u = 0.5 * (a + b);
        return {p_->value(anchor_, sign_, u), u};
    }

    const RaceProfile* p_ = nullptr;
    double anchor_ = 0.0, h_ = 1.0, u0_ = 0.0;
    int sign_ = 1, j0_ = 0;
    std::unique_ptr<double[]> val_;
    std::unique_ptr<int[]> best_;
    int n_ = 0, cap_ = 0;
};

// Queries shared by the pure predicates and the team snapshot.
// ccw_r / cw_r: sweeps of the right defender; ccw_l / cw_l likewise; caps are L/2.
namespace race {

inline bool beats_single(const Sweep& ccw, const Sweep& cw, double L, double thr) {
    return ccw.exceeds(0.5 * L, 0.0, thr) || cw.exceeds(0.5 * L, 0.0, thr);
}

// Beats `near` at some point of the open interval of length len that starts at
// near's position running `near`'s way; `far` is the other boundary defender
// running back toward near.  Past the half-perimeter near's shortest route goes
// around through far's position.
inline bool beats_in_interval(const Sweep& near, const Sweep& far, double len, const Arena& a, double thr) {
    const double L = a.length();
    if (near.exceeds(std::min(len, 0.5 * L), 0.0, thr)) return true;
    if (len > 0.5 * L) return far.exceeds(len - 0.5 * L, (L - len) / a.speeds.v_defender, thr);
    return false;
}

inline bool beats_pincer(const Sweep& ccw_r, const Sweep& cw_l, double len, double thr) {
    return ccw_r.exceeds(0.5 * len, 0.0, thr) || cw_l.exceeds(0.5 * len, 0.0, thr);
}

inline WindowMax pincer_sup(const Sweep& ccw_r, const Sweep& cw_l, double len, double* s_out) {
    WindowMax r = ccw_r.sup(0.5 * len), l = cw_l.sup(0.5 * len);
    if (l.value > r.value) {
        if (s_out) *s_out = cw_l.point(l.u);
        return l;
    }
    if (s_out) *s_out = ccw_r.point(r.u);
    return r;
}

}  // namespace race

// ordered pair: right is the cw-side boundary defender, left the ccw side
struct DefenderPair {
    double right = 0.0;
    double left = 0.0;
    bool degenerate = false;
};

inline double interior_length(const Perimeter& p, const DefenderPair& pair) {
    if (pair.degenerate) return p.length();
    return p.arc_distance(pair.right, pair.left, Direction::ccw);
}

inline double win_margin_1v1(const Arena& a, double s_d, Vec2 x, Direction dir) {
    RaceProfile prof(a, x);
    const double L = a.length();
    // a directional margin covers the half perimeter on that side
    if (dir == Direction::ccw) return Sweep(prof, s_d, +1, 0.5 * L).sup(0.5 * L).value;
    if (dir == Direction::cw) return Sweep(prof, s_d, -1, 0.5 * L).sup(0.5 * L).value;
    return std::max(Sweep(prof, s_d, +1, 0.5 * L).sup(0.5 * L).value,
                    Sweep(prof, s_d, -1, 0.5 * L).sup(0.5 * L).value);
}

inline bool in_intruder_win_1v1(const Arena& a, double s_d, Vec2 x) {
    RaceProfile prof(a, x);
    const double L = a.length();
    return race::beats_single(Sweep(prof, s_d, +1, 0.5 * L), Sweep(prof, s_d, -1, 0.5 * L), L, a.time_tol());
}

namespace detail {
struct PairSweeps {
    RaceProfile prof;
    Sweep ccw_r, cw_l;
    PairSweeps(const Arena& a, const DefenderPair& p, Vec2 x)
        : prof(a, x), ccw_r(prof, p.right, +1, 0.5 * a.length()), cw_l(prof, p.left, -1, 0.5 * a.length()) {}
    PairSweeps(const PairSweeps&) = delete;
};
}  // namespace detail

inline bool in_independent_region(const Arena& a, const DefenderPair& pair, Vec2 x) {
    if (pair.degenerate) return in_intruder_win_1v1(a, pair.right, x);
    const double len = interior_length(a.perimeter, pair);
    if (len <= 0.0) return false;
    detail::PairSweeps s(a, pair, x);
    const double thr = a.time_tol();
    return race::beats_in_interval(s.ccw_r, s.cw_l, len, a, thr) && race::beats_in_interval(s.cw_l, s.ccw_r, len, a, thr);
}

inline bool in_cooperative_region(const Arena& a, const DefenderPair& pair, Vec2 x) {
    if (pair.degenerate) return in_intruder_win_1v1(a, pair.right, x);
    const double len = interior_length(a.perimeter, pair);
    if (len <= 0.0) return false;
    detail::PairSweeps s(a, pair, x);
    const double thr = a.time_tol();
    if (!race::beats_pincer(s.ccw_r, s.cw_l, len, thr)) return false;
    return race::beats_in_interval(s.ccw_r, s.cw_l, len, a, thr) && race::beats_in_interval(s.cw_l, s.ccw_r, len, a, thr);
}

inline bool in_paired_defense_region(const Arena& a, const DefenderPair& pair, Vec2 x) {
    return in_independent_region(a, pair, x) && !in_cooperative_region(a, pair, x);
}

inline bool in_implicit_zone(const Arena& a, const DefenderPair& pair, Vec2 x) {
    return !in_intruder_win_1v1(a, pair.right, x) && !in_intruder_win_1v1(a, pair.left, x);
}

inline double breach_target_pincer(const Perimeter& p, const DefenderPair& pair) {
    const double len = pair.degenerate ? 0.0 : interior_length(p, pair);
    if (len <= 0.0) throw ValidationError("no interior breach target");
    return p.wrap(pair.right + 0.5 * len);
}

}  // namespace pdl
