#pragma once

#include <vector>

#include "pdl/geometry.hpp"

namespace pdl {

struct Defender {
    int id = 0;
    double s = 0.0;
    bool alive = true;
};

struct Intruder {
    int id = 0;
    Vec2 x{};
    bool alive = true;
    bool removed = false;  // ignored by the lgr defense, still simulated
    bool scored = false;
};

// ids equal vector positions
struct GameState {
    double time = 0.0;
    std::vector<Defender> defenders;
    std::vector<Intruder> intruders;
    int score = 0;

    static GameState from(const std::vector<double>& defender_s, const std::vector<Vec2>& intruder_x) {
        GameState g;
        for (std::size_t i = 0; i < defender_s.size(); ++i) g.defenders.push_back({static_cast<int>(i), defender_s[i], true});
        for (std::size_t i = 0; i < intruder_x.size(); ++i) g.intruders.push_back({static_cast<int>(i), intruder_x[i]});
        return g;
    }

    int alive_defenders() const {
        int n = 0;
        for (const auto& d : defenders) n += d.alive ? 1 : 0;
        return n;
    }

    int alive_intruders() const {
        int n = 0;
        for (const auto& a : intruders) n += a.alive ? 1 : 0;
        return n;
    }
};

}  // namespace pdl
