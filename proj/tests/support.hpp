#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <numbers>
#include <random>
#include <vector>

#include "pdl.hpp"

namespace pdl::testing {

inline constexpr double kPi = std::numbers::pi;

// Shortest exterior path from x to the boundary point at angle theta on a circle
// of radius R at the origin: straight if visible, else tangent plus arc.
inline double circle_travel(double R, Vec2 x, double theta) {
    const double rho = std::hypot(x.x, x.y);
    const Vec2 b{R * std::cos(theta), R * std::sin(theta)};
    if (rho <= R) return std::hypot(x.x - b.x, x.y - b.y);
    const double phi = std::atan2(x.y, x.x);
    double delta = std::fabs(std::remainder(theta - phi, 2 * kPi));
    const double alpha = std::acos(R / rho);
    if (delta <= alpha) return std::hypot(x.x - b.x, x.y - b.y);
    return std::sqrt(rho * rho - R * R) + R * (delta - alpha);
}

// Brute-force 1v1 margin on a unit circle with zero offsets; dir: +1 ccw, -1 cw, 0 shortest.
// A directional margin only looks at the half perimeter on its side.
inline double brute_margin(double vd, double va, double s_d, Vec2 x, int dir, int samples) {
    const double L = 2 * kPi;
    double best = -1e300;
    for (int j = 0; j < samples; ++j) {
        const double s = L * j / samples;
        const double ccw = std::fmod(s - s_d + 2 * L, L);
        const double cw = std::fmod(L - ccw, L);
        const double arc = dir > 0 ? ccw : dir < 0 ? cw : std::min(ccw, cw);
        if (arc > 0.5 * L) continue;
        best = std::max(best, arc / vd - circle_travel(1.0, x, s) / va);
    }
    return best;
}

// Random point outside the unit circle at radius in [rmin, rmax].
inline Vec2 random_exterior(std::mt19937_64& rng, double rmin, double rmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double th = 2 * kPi * u(rng), r = rmin + (rmax - rmin) * u(rng);
    return {r * std::cos(th), r * std::sin(th)};
}

struct RandomState {
    std::vector<double> defenders;
    std::vector<Vec2> intruders;
    GameState state() const { return GameState::from(defenders, intruders); }
};

inline RandomState random_state(std::mt19937_64& rng, int nd, int na, double rmin = 1.02, double rmax = 2.0) {
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    RandomState s;
    for (int i = 0; i < nd; ++i) s.defenders.push_back(u(rng));
    for (int i = 0; i < na; ++i) s.intruders.push_back(random_exterior(rng, rmin, rmax));
    return s;
}

inline Arena unit_arena(double nu, double cap = 0.0, double band = 0.0) {
    return Arena{Perimeter::circle(1.0), SpeedModel::from_ratio(1.0, nu), cap, band};
}

#ifdef PDL_SCENARIOS
inline ScenarioSpec load_spec(const std::string& name) {
    std::ifstream in(std::string(PDL_SCENARIOS) + "/" + name);
    if (!in) throw std::runtime_error("cannot open scenario " + name);
    return scenario_from_json(nlohmann::json::parse(in));
}

inline Scenario load_scenario(const std::string& name) { return materialize(load_spec(name)); }
#endif

// offsets used by the simulator defaults
inline Arena sim_arena(double nu) { return unit_arena(nu, 1e-3 * 2 * kPi, 1e-4 * 2 * kPi); }

}  // namespace pdl::testing
