#include <gtest/gtest.h>

#include "support.hpp"

using namespace pdl;
using pdl::testing::brute_margin;
using pdl::testing::kPi;
using pdl::testing::unit_arena;

TEST(Margin1v1, ColocatedIntruderLoses) {
    const Arena a = unit_arena(1.0);
    for (double s : {0.0, 1.0, 4.0}) {
        const Vec2 x = a.perimeter.point_at(s);
        EXPECT_LE(win_margin_1v1(a, s, x, Direction::either), a.time_tol());
        EXPECT_FALSE(in_intruder_win_1v1(a, s, x));
    }
}

TEST(Margin1v1, CenterAgainstOneDefender) {
    const Arena a = unit_arena(1.0);
    // 1e5-point brute-force sampler, computed independently of the library
    const double oracle = brute_margin(1.0, 1.0, 0.0, {0, 0}, 0, 100000);
    EXPECT_NEAR(oracle, kPi - 1.0, 1e-9);
    EXPECT_NEAR(win_margin_1v1(a, 0.0, {0, 0}, Direction::either), oracle, 1e-9);
    EXPECT_TRUE(in_intruder_win_1v1(a, 0.0, {0, 0}));
}

TEST(Margin1v1, NearAntipodeAgreesWithFineSampler) {
    const Arena a = unit_arena(0.5);
    const Vec2 x{-1.05, 0.0};
    const double m = win_margin_1v1(a, 0.0, x, Direction::either);
    const double fine = brute_margin(1.0, 0.5, 0.0, x, 0, 10 * a.perimeter.resolution());
    EXPECT_EQ(m > 0.0, fine > 0.0);
    EXPECT_NEAR(m, fine, 1e-6);
}

TEST(Margin1v1, AgreesWithBruteForceOnRandomPoints) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    for (double nu : {0.3, 0.7, 1.0}) {
        const Arena a = unit_arena(nu);
        for (int i = 0; i < 40; ++i) {
            const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 3.0);
            const double s = u(rng);
            for (auto [dir, sign] : {std::pair{Direction::ccw, 1}, std::pair{Direction::cw, -1}, std::pair{Direction::either, 0}}) {
                // the sampler sits below the true sup by at most slope * spacing / 2; the
                // refined value is attained somewhere, so it cannot exceed the true sup
                const int n = 20000;
                const double fine = brute_margin(1.0, nu, s, x, sign, n);
                const double m = win_margin_1v1(a, s, x, dir);
                EXPECT_GE(m, fine - 1e-9) << "nu " << nu << " dir " << to_string(dir);
                EXPECT_LE(m, fine + a.lipschitz() * a.length() / n) << "nu " << nu << " dir " << to_string(dir);
            }
        }
    }
}

TEST(Margin1v1, EitherIsMaxOfDirections) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    const Arena a = unit_arena(0.8);
    for (int i = 0; i < 200; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 3.0);
        const double s = u(rng);
        const double e = win_margin_1v1(a, s, x, Direction::either);
        const double m = std::max(win_margin_1v1(a, s, x, Direction::ccw), win_margin_1v1(a, s, x, Direction::cw));
        EXPECT_NEAR(e, m, a.time_tol());
    }
}

TEST(Win1v1, ExactTieGoesToDefender) {
    // the intruder sits on the defender: the best breach point is a dead heat
    const Arena a = unit_arena(1.0);
    const Vec2 x = a.perimeter.point_at(2.0);
    EXPECT_NEAR(win_margin_1v1(a, 2.0, x, Direction::either), 0.0, 1e-12);
    EXPECT_FALSE(in_intruder_win_1v1(a, 2.0, x));
}

TEST(Independent, IntersectionOfOneOnOnes) {
    const Arena a = unit_arena(1.0);
    const DefenderPair pair{0.0, kPi};
    EXPECT_EQ(in_independent_region(a, pair, {0, 0}), in_intruder_win_1v1(a, 0.0, {0, 0}) && in_intruder_win_1v1(a, kPi, {0, 0}));
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 2.5);
        if (!in_intruder_win_1v1(a, 0.0, x) || !in_intruder_win_1v1(a, kPi, x)) { EXPECT_FALSE(in_independent_region(a, pair, x)); }
    }
}

TEST(Independent, DegeneratePairIsOneOnOne) {
    std::mt19937_64 rng(9);
    const Arena a = unit_arena(0.7);
    const DefenderPair pair{1.3, 1.3, true};
    for (int i = 0; i < 200; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 2.5);
        EXPECT_EQ(in_independent_region(a, pair, x), in_intruder_win_1v1(a, 1.3, x));
        EXPECT_EQ(in_cooperative_region(a, pair, x), in_intruder_win_1v1(a, 1.3, x));
    }
}

TEST(Cooperative, BreachPointItselfIsInside) {
    const Arena a = unit_arena(0.9);
    const DefenderPair pair{0.5, 2.5};
    const Vec2 x = a.perimeter.point_at(1.5);
    EXPECT_TRUE(in_cooperative_region(a, pair, x));
    EXPECT_TRUE(in_independent_region(a, pair, x));
}

TEST(Cooperative, DiskAroundBreachPoint) {
    const double nu = 0.7;
    const Arena a = unit_arena(nu);
    const DefenderPair pair{0.0, kPi};
    const double delta = kPi / 2;
    const Vec2 mid = a.perimeter.point_at(kPi / 2), n = a.perimeter.normal_at(kPi / 2);
    // on the circle of radius nu * delta: a dead heat, so the defenders win
    EXPECT_FALSE(in_cooperative_region(a, pair, mid + n * (nu * delta)));
    EXPECT_TRUE(in_cooperative_region(a, pair, mid + n * (nu * delta * 0.999)));
    EXPECT_FALSE(in_cooperative_region(a, pair, mid + n * (nu * delta * 1.001)));
}

TEST(Cooperative, DefenderWinningPointsExcluded) {
    const Arena a = unit_arena(1.0);
    const DefenderPair pair{0.0, kPi};
    std::mt19937_64 rng(10);
    for (int i = 0; i < 300; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 3.0);
        if (!in_intruder_win_1v1(a, 0.0, x) && !in_intruder_win_1v1(a, kPi, x)) {
            EXPECT_FALSE(in_cooperative_region(a, pair, x));
            EXPECT_FALSE(in_paired_defense_region(a, pair, x));
        }
    }
}

TEST(PairedDefense, SampledBetweenBoundaries) {
    // nu = 0.7 with the pair one radian apart; above the interior midpoint the
    // pincer disk ends near height 0.35 while each single race is won up to about
    // 0.49, so that band is paired-defense territory
    const Arena a = unit_arena(0.7);
    const DefenderPair pair{0.0, 1.0};
    const Vec2 mid = a.perimeter.point_at(0.5), n = a.perimeter.normal_at(0.5);
    EXPECT_TRUE(in_paired_defense_region(a, pair, mid + n * 0.42));
    EXPECT_FALSE(in_paired_defense_region(a, pair, mid + n * 0.2));
    EXPECT_FALSE(in_paired_defense_region(a, pair, mid + n * 0.7));
    std::mt19937_64 rng(12);
    int found = 0;
    for (int i = 0; i < 4000; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 1.8);
        const bool ai = in_independent_region(a, pair, x), ac = in_cooperative_region(a, pair, x);
        EXPECT_EQ(in_paired_defense_region(a, pair, x), ai && !ac);
        if (ai && !ac) {
            ++found;
            EXPECT_TRUE(in_intruder_win_1v1(a, 0.0, x) && in_intruder_win_1v1(a, 1.0, x));
        }
    }
    EXPECT_GE(found, 10);
}

TEST(SetInclusions, RandomConfigurations) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    int points = 0;
    for (double nu : {0.3, 0.7, 1.0}) {
        const Arena a = unit_arena(nu);
        for (int cfg = 0; cfg < 17; ++cfg) {
            const double r = u(rng), l = u(rng);
            const DefenderPair pair{r, l};
            for (int i = 0; i < 200; ++i, ++points) {
                const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 1.0 + 2.0 * nu);
                const bool ac = in_cooperative_region(a, pair, x);
                const bool ai = in_independent_region(a, pair, x);
                const bool wr = in_intruder_win_1v1(a, r, x), wl = in_intruder_win_1v1(a, l, x);
                if (ac) { ASSERT_TRUE(ai); }
                if (ai) { ASSERT_TRUE(wr && wl); }
                ASSERT_FALSE(in_paired_defense_region(a, pair, x) && ac);
                ASSERT_FALSE(in_implicit_zone(a, pair, x) && ai);
            }
        }
    }
    EXPECT_GE(points, 10000);
}

TEST(Resolution, DoublingRarelyFlipsMembership) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    const Arena coarse = unit_arena(0.8);
    const Arena fine{coarse.perimeter.with_resolution(2 * coarse.perimeter.resolution()), coarse.speeds};
    const double eta = 1e-6 * coarse.length();
    int checked = 0, flips = 0;
    for (int i = 0; i < 3000; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 2.5);
        const double s = u(rng);
        const double m = win_margin_1v1(fine, s, x, Direction::either);
        if (std::abs(m) <= 2 * eta * coarse.lipschitz()) continue;
        ++checked;
        flips += in_intruder_win_1v1(coarse, s, x) != in_intruder_win_1v1(fine, s, x) ? 1 : 0;
    }
    EXPECT_GT(checked, 2500);
    EXPECT_LT(flips, 0.005 * checked);
}

TEST(Symmetry, ReflectionAcrossAxis) {
    std::mt19937_64 rng(41);
    const Arena a = unit_arena(0.9);
    const double r = 2 * kPi - 1.1, l = 1.1;  // symmetric about the x axis
    const DefenderPair pair{r, l};
    for (int i = 0; i < 300; ++i) {
        const Vec2 x = pdl::testing::random_exterior(rng, 1.0, 2.5);
        const Vec2 y{x.x, -x.y};
        EXPECT_EQ(in_intruder_win_1v1(a, 0.0, x), in_intruder_win_1v1(a, 0.0, y));
        EXPECT_EQ(in_cooperative_region(a, pair, x), in_cooperative_region(a, pair, y));
        EXPECT_EQ(in_independent_region(a, pair, x), in_independent_region(a, pair, y));
        EXPECT_NEAR(win_margin_1v1(a, 0.0, x, Direction::either), win_margin_1v1(a, 0.0, y, Direction::either), a.time_tol());
    }
}

TEST(ImplicitZone, Examples) {
    const Arena a = unit_arena(0.8);
    const DefenderPair pair{0.0, 1.0};
    // far away: both defenders reach every breach point first
    EXPECT_TRUE(in_implicit_zone(a, pair, {0.0, 50.0}));
    // beating either defender alone rules it out
    const Vec2 x{-1.3, 0.0};
    ASSERT_TRUE(in_intruder_win_1v1(a, 0.0, x));
    EXPECT_FALSE(in_implicit_zone(a, pair, x));
    // sitting on the right defender: inside its defender-winning set, but with no
    // capture radius it breaches on the spot against the left one
    const Vec2 on_r = a.perimeter.point_at(0.0);
    EXPECT_FALSE(in_intruder_win_1v1(a, 0.0, on_r));
    EXPECT_TRUE(in_intruder_win_1v1(a, 1.0, on_r));
    EXPECT_FALSE(in_implicit_zone(a, pair, on_r));
    // coincident pair: the point is in both defender-winning sets
    EXPECT_TRUE(in_implicit_zone(a, DefenderPair{0.0, 0.0}, on_r));
}

TEST(PincerTarget, Examples) {
    const Perimeter c = Perimeter::circle(1.0);
    EXPECT_NEAR(breach_target_pincer(c, {0.0, kPi}), kPi / 2, 1e-12);
    EXPECT_NEAR(std::remainder(breach_target_pincer(c, {3 * kPi / 2, kPi / 2}), 2 * kPi), 0.0, 1e-12);
    const Perimeter sq = Perimeter::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    EXPECT_NEAR(breach_target_pincer(sq, {0.0, 3.0}), 1.5, 1e-12);
    EXPECT_THROW(breach_target_pincer(c, {1.0, 1.0}), ValidationError);
}
