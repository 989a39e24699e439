#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdl {

// thrown for malformed inputs; the CLI maps it to exit code 1
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// ccw = positive arc direction
enum class Direction { ccw, cw, either };

inline const char* to_string(Direction d) {
    switch (d) {
    case Direction::ccw: return "ccw";
    case Direction::cw: return "cw";
    default: return "either";
    }
}

// Closed convex curve parameterized by arc length s in [0, L).
// The sample table is immutable and shared between copies.
class Perimeter {
public:
    enum class Kind { circle, polygon };

    static constexpr int kDefaultResolution = 2048;

    static Perimeter circle(double radius, Vec2 center = {}, int resolution = kDefaultResolution) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw ValidationError("circle radius must be positive");
        auto d = std::make_shared<Data>();
        d->kind = Kind::circle;
        d->center = center;
        d->radius = radius;
        d->length = 2.0 * std::numbers::pi * radius;
        build_samples(*d, resolution);
        return Perimeter(std::move(d));
    }

    static Perimeter polygon(std::vector<Vec2> vertices, int resolution = kDefaultResolution) {
        const std::size_t n = vertices.size();
        if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
        double turning = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 a = vertices[i], b = vertices[(i + 1) % n], c = vertices[(i + 2) % n];
            if (!std::isfinite(a.x) || !std::isfinite(a.y))
                throw ValidationError("polygon vertex is not finite");
            Vec2 e1 = b - a, e2 = c - b;
            if (norm(e1) == 0.0) throw ValidationError("polygon has repeated vertices");
            if (!(cross(e1, e2) > 0.0))
                throw ValidationError("polygon must be strictly convex and counter-clockwise");
            turning += std::atan2(cross(e1, e2), dot(e1, e2));
        }
        // a self-intersecting star also turns left at every vertex
        if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6)
            throw ValidationError("polygon is not simple");

        auto d = std::make_shared<Data>();
        d->kind = Kind::polygon;
        d->vertices = std::move(vertices);
        d->cumulative.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            d->cumulative[i + 1] = d->cumulative[i] + dist(d->vertices[i], d->vertices[(i + 1) % n]);
        d->length = d->cumulative[n];
        build_samples(*d, resolution);
        return Perimeter(std::move(d));
    }

    Kind kind() const { return d_->kind; }
    double length() const { return d_->length; }
    double radius() const { return d_->radius; }
    Vec2 center() const { return d_->center; }
    const std::vector<Vec2>& vertices() const { return d_->vertices; }
    int resolution() const { return static_cast<int>(d_->samples.size()); }
    double spacing() const { return d_->length / static_cast<double>(d_->samples.size()); }
    Vec2 sample(int j) const { return d_->samples[static_cast<std::size_t>(j)]; }

    // same shape, different sample table
    Perimeter with_resolution(int resolution) const {
        if (kind() == Kind::circle) return circle(radius(), center(), resolution);
        return polygon(vertices(), resolution);
    }

    double wrap(double s) const {
        const double L = d_->length;
        double r = std::fmod(s, L);
        if (r < 0.0) r += L;
        if (r >= L) r = 0.0;
        return r;
    }

    Vec2 point_at(double s) const {
        s = wrap(s);
        const Data& d = *d_;
        if (d.kind == Kind::circle) {
            const double th = s / d.radius;
            return {d.center.x + d.radius * std::cos(th), d.center.y + d.radius * std::sin(th)};
        }
        const std::size_t e = edge_of(s);
        const std::size_t n = d.vertices.size();
        const double elen = d.cumulative[e + 1] - d.cumulative[e];
        const double t = elen > 0.0 ? (s - d.cumulative[e]) / elen : 0.0;
        Vec2 a = d.vertices[e], b = d.vertices[(e + 1) % n];
        return a + (b - a) * t;
    }

    // outward unit normal at s (edge normal on a polygon, lower edge at corners)
    Vec2 normal_at(double s) const {
        const Data& d = *d_;
        if (d.kind == Kind::circle) {
            const double th = wrap(s) / d.radius;
            return {std::cos(th), std::sin(th)};
        }
        const std::size_t e = edge_of(wrap(s));
        Vec2 t = d.vertices[(e + 1) % d.vertices.size()] - d.vertices[e];
        const double l = norm(t);
        return {t.y / l, -t.x / l};
    }

    double project(Vec2 x) const {
        const Data& d = *d_;
        if (d.kind == Kind::circle) {
            Vec2 r = x - d.center;
            if (r.x == 0.0 && r.y == 0.0) return 0.0;
            double th = std::atan2(r.y, r.x);
            if (th < 0.0) th += 2.0 * std::numbers::pi;
            return wrap(th * d.radius);
        }
        const std::size_t n = d.vertices.size();
        double best = std::numeric_limits<double>::infinity(), best_s = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
            Vec2 a = d.vertices[e], b = d.vertices[(e + 1) % n];
            Vec2 ab = b - a;
            double t = std::clamp(dot(x - a, ab) / dot(ab, ab), 0.0, 1.0);
            double dd = dist(x, a + ab * t);
            if (dd < best) {
                best = dd;
                best_s = d.cumulative[e] + t * (d.cumulative[e + 1] - d.cumulative[e]);
            }
        }
        return wrap(best_s);
    }

    double arc_distance(double s1, double s2, Direction dir) const {
        const double ccw = wrap(s2 - s1);
        const double cw = ccw == 0.0 ? 0.0 : d_->length - ccw;
        switch (dir) {
        case Direction::ccw: return ccw;
        case Direction::cw: return cw;
        default: return std::min(ccw, cw);
        }
    }

    bool contains(Vec2 x) const {
        const Data& d = *d_;
        if (d.kind == Kind::circle) return dist(x, d.center) <= d.radius;
        const std::size_t n = d.vertices.size();
        for (std::size_t e = 0; e < n; ++e)
            if (cross(d.vertices[(e + 1) % n] - d.vertices[e], x - d.vertices[e]) < 0.0) return false;
        return true;
    }

    double boundary_distance(Vec2 x) const {
        const Data& d = *d_;
        if (d.kind == Kind::circle) return std::abs(dist(x, d.center) - d.radius);
        return dist(x, point_at(project(x)));
    }

    class Observer;
    Observer observer(Vec2 x) const;

    // Shortest path length from x to gamma(s) that stays outside the target.
    // Straight segment when gamma(s) is visible from x, otherwise tangent + boundary.
    double travel_distance(Vec2 x, double s) const;

    // travel_distance for every sample of the table
    void travel_distances(Vec2 x, std::span<double> out) const;

    // First waypoint on the outside-shortest path from x toward gamma(s).
    Vec2 waypoint(Vec2 x, double s) const;

private:
    struct Data {
        Kind kind = Kind::circle;
        Vec2 center{};
        double radius = 0.0;
        std::vector<Vec2> vertices;
        std::vector<double> cumulative;
        double length = 0.0;
        std::vector<Vec2> samples;
        std::vector<double> sample_s;
    };

    explicit Perimeter(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

    static void build_samples(Data& d, int resolution) {
        if (resolution < 8) throw ValidationError("sample_resolution must be at least 8");
        d.samples.resize(static_cast<std::size_t>(resolution));
        d.sample_s.resize(static_cast<std::size_t>(resolution));
        Perimeter tmp(std::make_shared<Data>(d));
        for (int j = 0; j < resolution; ++j) {
            double s = d.length * j / resolution;
            d.sample_s[j] = s;
            d.samples[j] = tmp.point_at(s);
        }
    }

    std::size_t edge_of(double s) const {
        const auto& c = d_->cumulative;
        auto it = std::upper_bound(c.begin(), c.end(), s);
        std::size_t e = static_cast<std::size_t>(it - c.begin());
        e = e == 0 ? 0 : e - 1;
        return std::min(e, d_->vertices.size() - 1);
    }

    std::shared_ptr<const Data> d_;
};

// Distances from one fixed point to the boundary. Cheap to query repeatedly.
class Perimeter::Observer {
public:
    Vec2 position() const { return x_; }
    bool inside() const { return inside_; }

    double travel(double s) const {
        s = owner_->wrap(s);
        const Data& d = *owner_->d_;
        if (inside_) return dist(x_, owner_->point_at(s));
        if (d.kind == Kind::circle) {
            const double phi = std::abs(std::remainder(s / d.radius - thx_, 2.0 * std::numbers::pi));
            if (phi <= alpha_) return dist(x_, owner_->point_at(s));
            return tangent_ + d.radius * (phi - alpha_);
        }
        if (visible(s)) return dist(x_, owner_->point_at(s));
        return std::min(dist(x_, first_) + owner_->wrap(first_s_ - s), dist(x_, last_) + owner_->wrap(s - last_s_));
    }

    Vec2 waypoint(double s) const {
        s = owner_->wrap(s);
        const Data& d = *owner_->d_;
        Vec2 p = owner_->point_at(s);
        if (inside_) return p;
        if (d.kind == Kind::circle) {
            const double phi = std::remainder(s / d.radius - thx_, 2.0 * std::numbers::pi);
            if (std::abs(phi) <= alpha_) return p;
            const double th = thx_ + (phi > 0.0 ? alpha_ : -alpha_);
            return {d.center.x + d.radius * std::cos(th), d.center.y + d.radius * std::sin(th)};
        }
        if (visible(s)) return p;
        const double via_first = dist(x_, first_) + owner_->wrap(first_s_ - s);
        const double via_last = dist(x_, last_) + owner_->wrap(s - last_s_);
        return via_first <= via_last ? first_ : last_;
    }

private:
    friend class Perimeter;

    bool visible(double s) const { return owner_->wrap(s - first_s_) <= owner_->wrap(last_s_ - first_s_); }

    const Perimeter* owner_ = nullptr;
    Vec2 x_{};
    bool inside_ = true;
    // circle
    double rho_ = 0.0, thx_ = 0.0, alpha_ = 0.0, tangent_ = 0.0;
    // polygon: tangent vertices bounding the visible chain
    Vec2 first_{}, last_{};
    double first_s_ = 0.0, last_s_ = 0.0;
};

inline Perimeter::Observer Perimeter::observer(Vec2 x) const {
    Observer o;
    o.owner_ = this;
    o.x_ = x;
    const Data& d = *d_;
    if (d.kind == Kind::circle) {
        Vec2 r = x - d.center;
        o.rho_ = norm(r);
        o.inside_ = o.rho_ < d.radius;
        if (!o.inside_) {
            o.thx_ = std::atan2(r.y, r.x);
            o.alpha_ = std::acos(d.radius / o.rho_);
            o.tangent_ = std::sqrt(o.rho_ * o.rho_ - d.radius * d.radius);
        }
        return o;
    }
    const std::size_t n = d.vertices.size();
    std::vector<char> vis(n);
    std::size_t count = 0;
    for (std::size_t e = 0; e < n; ++e) {
        vis[e] = cross(d.vertices[(e + 1) % n] - d.vertices[e], x - d.vertices[e]) <= 0.0;
        count += vis[e] ? 1 : 0;
    }
    if (count == 0 || count == n) return o;
    o.inside_ = false;
    std::size_t a = 0;
    while (!(vis[a] && !vis[(a + n - 1) % n])) a = (a + 1) % n;
    std::size_t b = a;
    while (vis[(b + 1) % n]) b = (b + 1) % n;
    o.first_ = d.vertices[a];
    o.first_s_ = d.cumulative[a];
    o.last_ = d.vertices[(b + 1) % n];
    o.last_s_ = wrap(d.cumulative[b + 1]);
    return o;
}

inline double Perimeter::travel_distance(Vec2 x, double s) const { return observer(x).travel(s); }

inline Vec2 Perimeter::waypoint(Vec2 x, double s) const { return observer(x).waypoint(s); }

inline void Perimeter::travel_distances(Vec2 x, std::span<double> out) const {
    const Data& d = *d_;
    const int M = resolution();
    Observer o = observer(x);
    if (d.kind == Kind::circle && !o.inside_) {
        const double h = 2.0 * std::numbers::pi / M;
        const double two_pi = 2.0 * std::numbers::pi;
        for (int j = 0; j < M; ++j) {
            double phi = j * h - o.thx_;
            if (phi > std::numbers::pi) phi -= two_pi;
            else if (phi < -std::numbers::pi) phi += two_pi;
            phi = std::abs(phi);
            out[j] = phi <= o.alpha_ ? dist(x, d.samples[j]) : o.tangent_ + d.radius * (phi - o.alpha_);
        }
        return;
    }
    for (int j = 0; j < M; ++j) out[j] = o.travel(d.sample_s[j]);
}

// Open ccw arc from start; degenerate_full is the (i,i) case, everything but start.
struct ArcInterval {
    double start = 0.0;
    double length = 0.0;
    bool degenerate_full = false;

    double end(const Perimeter& p) const { return p.wrap(start + length); }

    bool contains(const Perimeter& p, double s) const {
        const double off = p.wrap(s - start);
        if (degenerate_full) return off > 0.0;
        return off > 0.0 && off < length;
    }
};

inline ArcInterval ccw_interval(const Perimeter& p, double s_from, double s_to) {
    return {p.wrap(s_from), p.arc_distance(s_from, s_to, Direction::ccw), false};
}

// shared endpoints are allowed; full intervals overlap everything
inline bool intervals_disjoint(const Perimeter& p, const ArcInterval& a, const ArcInterval& b) {
    if (a.length <= 0.0 && !a.degenerate_full) return true;
    if (b.length <= 0.0 && !b.degenerate_full) return true;
    if (a.degenerate_full || b.degenerate_full) return false;
    const double ab = p.wrap(b.start - a.start);
    const double ba = p.wrap(a.start - b.start);
    return ab >= a.length && ba >= b.length;
}

}  // namespace pdl
