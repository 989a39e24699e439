#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace pdl;
using pdl::testing::kPi;
using pdl::testing::unit_arena;

namespace {

GameState with_removed(GameState g, const std::vector<int>& ids) {
    for (int id : ids) g.intruders[static_cast<std::size_t>(id)].removed = true;
    return g;
}

// smallest number of intruders whose removal leaves no positive score, by subsets
int brute_min_removal(const Arena& a, const GameState& g) {
    TeamSnapshot snap(a, g);
    const int na = snap.intruder_count();
    int best = na;
    for (unsigned mask = 0; mask < (1u << na); ++mask) {
        const int k = __builtin_popcount(mask);
        if (k >= best) continue;
        std::vector<char> counted(static_cast<std::size_t>(na), 1);
        for (int i = 0; i < na; ++i)
            if (mask & (1u << i)) counted[static_cast<std::size_t>(i)] = 0;
        if (q_lg_value(snap, counted) == 0) best = k;
    }
    return best;
}

}  // namespace

TEST(Removal, SingleBeatenIntruderGoes) {
    const Arena a = unit_arena(1.0);
    const GameState g = GameState::from({0.0, 0.3}, {{-1.2, 0.0}});
    TeamSnapshot snap(a, g);
    EXPECT_EQ(remove_uncapturable(snap), (std::vector<int>{0}));
}

TEST(Removal, NothingToRemoveWhenCovered) {
    const Arena a = unit_arena(0.5);
    const GameState g = GameState::from({0.0, kPi}, {{1.5, 0.0}});
    TeamSnapshot snap(a, g);
    EXPECT_TRUE(remove_uncapturable(snap).empty());
}

TEST(Removal, CountEqualsQlgAndIsMinimal) {
    std::mt19937_64 rng(21);
    const double nus[3] = {0.5, 0.8, 1.0};
    int positive = 0;
    for (int t = 0; t < 120; ++t) {
        const int nd = 2 + static_cast<int>(rng() % 5), na = 1 + static_cast<int>(rng() % (nd - 1));
        const Arena a = unit_arena(nus[t % 3]);
        const auto st = pdl::testing::random_state(rng, nd, na, 1.01, 1.6).state();
        TeamSnapshot snap(a, st);
        const int q = q_lg_value(snap, snap.unremoved());
        const auto removed = remove_uncapturable(snap);
        positive += q > 0 ? 1 : 0;
        ASSERT_EQ(static_cast<int>(removed.size()), q);
        ASSERT_EQ(static_cast<int>(removed.size()), brute_min_removal(a, st));
        TeamSnapshot rest(a, with_removed(st, removed));
        EXPECT_EQ(q_lg_value(rest, rest.unremoved()), 0);
    }
    EXPECT_GT(positive, 10);
}

TEST(Removal, CountDoesNotDependOnIdOrder) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 60; ++t) {
        const int nd = 3 + static_cast<int>(rng() % 4), na = nd - 1;
        const Arena a = unit_arena(0.8);
        auto st = pdl::testing::random_state(rng, nd, na, 1.01, 1.6);
        TeamSnapshot s1(a, st.state());
        const auto r1 = remove_uncapturable(s1);
        std::shuffle(st.intruders.begin(), st.intruders.end(), rng);
        std::shuffle(st.defenders.begin(), st.defenders.end(), rng);
        TeamSnapshot s2(a, st.state());
        EXPECT_EQ(r1.size(), remove_uncapturable(s2).size());
    }
}

TEST(TwoVsOne, EmptyResidual) {
    const Arena a = unit_arena(0.8);
    const GameState g = GameState::from({0.0, 2.0, 4.0}, {});
    TeamSnapshot snap(a, g);
    const TwoVsOneResult r = assign_2v1(snap, snap.unremoved());
    EXPECT_TRUE(r.entries.empty());
    EXPECT_EQ(r.one_v_one_defenders, (std::vector<int>{0, 1, 2}));
    EXPECT_FALSE(r.violation);
}

TEST(TwoVsOne, SequentialPairSharesLeftDefender) {
    const Scenario sc = pdl::testing::load_scenario("sequential_pair.json");
    TeamSnapshot snap(sc.arena, sc.state);
    const TwoVsOneResult r = assign_2v1(snap, snap.unremoved());
    ASSERT_EQ(r.entries.size(), 2u);
    // larger n_D first
    EXPECT_EQ(r.entries[0].region, 4);
    EXPECT_EQ(r.entries[0].right, 1);
    EXPECT_EQ(r.entries[0].left, 0);
    EXPECT_EQ(r.entries[0].intruder, 1);
    EXPECT_EQ(r.entries[0].n_d, 1);
    EXPECT_EQ(r.entries[1].region, 7);
    EXPECT_EQ(r.entries[1].right, 2);
    EXPECT_EQ(r.entries[1].left, 0);
    EXPECT_EQ(r.entries[1].intruder, 0);
    EXPECT_EQ(r.entries[1].n_d, 0);
    EXPECT_TRUE(r.one_v_one_defenders.empty());
    ControlVector u(3, 2);
    const AssignmentSet as = lgr_assign(snap);
    EXPECT_TRUE(defender_controls(snap, as, sc.dt, u));
}

TEST(TwoVsOne, StrictThrowsOutsideEnvelopeLenientFlags) {
    std::mt19937_64 rng(23);
    int found = 0;
    for (int t = 0; t < 3000 && found < 5; ++t) {
        const Arena a = unit_arena(1.0);
        const auto st = pdl::testing::random_state(rng, 3, 2, 1.01, 1.3).state();
        TeamSnapshot snap(a, st);
        if (monitor_values(snap, nullptr).max_q_hat < 2) continue;
        ++found;
        EXPECT_THROW(assign_2v1(snap, snap.unremoved(), true), EnvelopeError);
        const TwoVsOneResult r = assign_2v1(snap, snap.unremoved(), false);
        EXPECT_TRUE(r.violation);
        EXPECT_FALSE(r.note.empty());
    }
    EXPECT_EQ(found, 5);
}

TEST(ImplicitEligible, Examples) {
    const std::vector<TwoVsOne> one{{1, 0, 1, 0, 1}};
    EXPECT_TRUE(implicit_eligible(0, one));
    const std::vector<TwoVsOne> nested{{5, 0, 3, 0, 2}, {2, 0, 1, 1, 1}};
    EXPECT_TRUE(implicit_eligible(0, nested));
    EXPECT_FALSE(implicit_eligible(1, nested));
    const std::vector<TwoVsOne> tie{{5, 0, 2, 0, 1}, {9, 2, 3, 1, 1}};
    EXPECT_FALSE(implicit_eligible(0, tie));
    EXPECT_FALSE(implicit_eligible(1, tie));
    const std::vector<TwoVsOne> apart{{2, 0, 1, 0, 0}, {12, 2, 3, 1, 0}};
    EXPECT_TRUE(implicit_eligible(0, apart));
    EXPECT_TRUE(implicit_eligible(1, apart));
}

TEST(MaxMatching, Examples) {
    // 0 - {0, 1}, 1 - {0}: augmenting path moves left 0 over to right 1
    const auto m = max_matching({{0, 1}, {0}}, 2);
    EXPECT_EQ(m, (std::vector<int>{1, 0}));
    EXPECT_EQ(max_matching({{}, {}}, 3), (std::vector<int>{-1, -1, -1}));
    const auto full = max_matching({{0}, {0, 1}, {1, 2}}, 3);
    EXPECT_EQ(std::count(full.begin(), full.end(), -1), 0);
}

TEST(OneVsOne, ImplicitScenarioUsesTheZone) {
    const Scenario sc = pdl::testing::load_scenario("implicit_resolution.json");
    const AssignmentSet as = lgr_defense(sc.arena, sc.state);
    EXPECT_TRUE(as.removed.empty());
    ASSERT_EQ(as.two_v_one.size(), 1u);
    ASSERT_EQ(as.implicit.size(), 1u);
    const auto [entry, y] = *as.implicit.begin();
    EXPECT_EQ(entry, 0);
    EXPECT_NE(y, as.two_v_one[0].intruder);
    TeamSnapshot snap(sc.arena, sc.state);
    EXPECT_TRUE(snap.implicit(as.two_v_one[0].region - 1, snap.intruder_index(y)));
    // the third defender has nobody left
    EXPECT_EQ(as.one_v_one.size() + as.unassigned_defenders.size(), 1u);
}

TEST(Baselines, MatchingExamples) {
    const Arena a = unit_arena(0.5);
    const GameState far = GameState::from({0.0, kPi}, {{0.0, 15.0}});
    TeamSnapshot s1(a, far);
    EXPECT_EQ(mm_assignment(s1, s1.unremoved()).q_mm, 0);
    const Arena b = unit_arena(1.0);
    const GameState beaten = GameState::from({0.0, 0.2}, {{-1.2, 0.0}});
    TeamSnapshot s2(b, beaten);
    const MatchingResult m = mm_assignment(s2, s2.unremoved());
    EXPECT_EQ(m.q_mm, 1);
    EXPECT_TRUE(m.matching.empty());
}

TEST(Baselines, MisExamples) {
    const Scenario sc = pdl::testing::load_scenario("implicit_resolution.json");
    TeamSnapshot snap(sc.arena, sc.state);
    EXPECT_EQ(q_lg_value(snap, snap.unremoved()), 0);
    EXPECT_EQ(mis_assignment(snap, snap.unremoved()), 1);
    EXPECT_EQ(mm_assignment(snap, snap.unremoved()).q_mm, 1);
    const Arena a = unit_arena(1.0);
    const GameState none = GameState::from({0.0, 2.0}, {});
    TeamSnapshot s0(a, none);
    EXPECT_EQ(mis_assignment(s0, s0.unremoved()), 0);
    std::mt19937_64 rng(24);
    const auto big = pdl::testing::random_state(rng, 8, 7).state();
    TeamSnapshot sb(a, big);
    EXPECT_THROW(mis_assignment(sb, sb.unremoved()), OracleSizeError);
}

TEST(Baselines, OrderingOnRandomStates) {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 150; ++t) {
        const int nd = 2 + static_cast<int>(rng() % 5), na = static_cast<int>(rng() % nd);
        const Arena a = unit_arena(t % 2 ? 0.7 : 1.0);
        const auto st = pdl::testing::random_state(rng, nd, na, 1.01, 1.8).state();
        TeamSnapshot snap(a, st);
        const auto all = snap.unremoved();
        const int lg = q_lg_value(snap, all), mis = mis_assignment(snap, all), mm = mm_assignment(snap, all).q_mm;
        EXPECT_LE(lg, mis);
        EXPECT_LE(mis, mm);
    }
}

TEST(Lgr, CompleteAndConflictFreeInsideEnvelope) {
    std::mt19937_64 rng(26);
    int accepted = 0;
    for (int t = 0; t < 2000 && accepted < 80; ++t) {
        const int nd = 3 + static_cast<int>(rng() % 5), na = nd - 1;
        const Arena a = unit_arena(t % 3 == 0 ? 0.5 : t % 3 == 1 ? 0.8 : 1.0);
        const auto st = pdl::testing::random_state(rng, nd, na, 1.05, 2.0).state();
        if (!analyze_initial(a, st).envelope()) continue;
        ++accepted;
        AssignmentSet as;
        ASSERT_NO_THROW(as = lgr_defense(a, st, true));
        EXPECT_FALSE(as.envelope_violation);
        std::set<int> covered, pincer_defenders;
        for (const auto& e : as.two_v_one) {
            EXPECT_TRUE(covered.insert(e.intruder).second);
            pincer_defenders.insert(e.right);
            pincer_defenders.insert(e.left);
        }
        for (auto [d, i] : as.one_v_one) {
            EXPECT_FALSE(pincer_defenders.count(d));
            EXPECT_TRUE(covered.insert(i).second);
        }
        for (auto [e, i] : as.implicit) EXPECT_TRUE(covered.insert(i).second);
        for (int id : as.removed) EXPECT_FALSE(covered.count(id));
        EXPECT_EQ(covered.size() + as.removed.size(), static_cast<std::size_t>(na));
        TeamSnapshot snap(a, with_removed(st, as.removed));
        ControlVector u(static_cast<std::size_t>(nd), static_cast<std::size_t>(na));
        EXPECT_TRUE(defender_controls(snap, as, 1e-3, u));
    }
    EXPECT_EQ(accepted, 80);
}

TEST(Lgr, JsonIsDeterministic) {
    const Scenario sc = pdl::testing::load_scenario("random_circle.json");
    const std::string a = to_json(lgr_defense(sc.arena, sc.state, false)).dump();
    const std::string b = to_json(lgr_defense(sc.arena, sc.state, false)).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("\"removed\":[4,5]"), std::string::npos);
}
