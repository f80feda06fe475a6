#include "oracles.hpp"
#include "sge/policies.hpp"

#include <doctest.h>

using namespace sge;

namespace {

SubtaskGraph two_leaves(double ra, double rb, BudgetRange budget = {30, 30}) {
    return SubtaskGraph({{0, "A", 0, ra, false}, {1, "B", 0, rb, false}}, {}, {{}, {}}, budget);
}

}  // namespace

TEST_CASE("random choice is uniform over the eligible set") {
    Rng rng(2024);
    SubtaskSet e;
    e.set(2);
    e.set(5);
    e.set(7);
    int hits[8] = {};
    const int n = 30000;
    for (int t = 0; t < n; ++t) ++hits[*random_choice(e, rng)];
    for (int i : {2, 5, 7}) CHECK(hits[i] / double(n) == doctest::Approx(1.0 / 3).epsilon(0.06));
    CHECK(hits[0] + hits[1] + hits[3] + hits[4] + hits[6] == 0);
    CHECK(*random_choice(SubtaskSet(0b1000), rng) == 3);
    CHECK_FALSE(random_choice(SubtaskSet(0), rng).has_value());
}

TEST_CASE("greedy picks the largest reward, ties to the lowest id") {
    const auto g = two_leaves(0.3, 0.9);
    CHECK(*greedy_choice(g, initial_state(g, 10)) == 1);
    const auto tie = two_leaves(0.4, 0.4);
    CHECK(*greedy_choice(tie, initial_state(tie, 10)) == 0);
    auto st = initial_state(g, 10);
    st.eligibility = SubtaskSet(0);
    CHECK_FALSE(greedy_choice(g, st).has_value());
}

TEST_CASE("greedy takes the bait on the distractor instance") {
    const auto g = oracle::distractor_instance();
    const auto a = greedy_choice(g, initial_state(g, 30));
    REQUIRE(a);
    CHECK(g.subtask(*a).distractor);
}

TEST_CASE("optimal search on two leaves") {
    const auto g = two_leaves(0.3, 0.9, {40, 40});
    Environment env(oracle::config_for(g, 5));
    const auto res = optimal_search(env);
    CHECK(res.best_return == doctest::Approx(1.2));
    CHECK(res.sequence.size() == 2);
}

TEST_CASE("optimal search prefers the nearer of two equal leaves") {
    const auto g = two_leaves(0.5, 0.5);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200 && checked < 10; ++seed) {
        auto cfg = oracle::config_for(g, seed);
        Environment probe(cfg);
        const auto da = nearest_path(probe.map(), probe.option(0).target).distance;
        const auto db = nearest_path(probe.map(), probe.option(1).target).distance;
        if (da == db || da < 0 || db < 0) continue;
        const int near = da < db ? 0 : 1;
        // Enough budget for the nearer leaf only.
        cfg.budget = std::min(da, db) + 1;
        if (std::max(da, db) + 1 <= *cfg.budget) continue;
        Environment env(cfg);
        const auto res = optimal_search(env);
        CHECK(res.best_return == doctest::Approx(0.5));
        REQUIRE(res.sequence.size() == 1);
        CHECK(res.sequence[0] == near);
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("branch and bound equals the unpruned enumerator") {
    int n = 0;
    for (std::uint64_t seed = 1; n < 60; ++seed) {
        const auto g = oracle::small_graph(mix_seed({41, seed}));
        if (g.size() > 8) continue;
        auto cfg = oracle::config_for(g, seed);
        Rng rng(seed);
        cfg.budget = uniform_int(rng, 6, 12);
        Environment env(cfg);
        const auto res = optimal_search(env);
        CHECK(res.best_return == oracle::unpruned_optimum(env));

        // The witness replays to the claimed return on a frozen clone.
        auto replay = env.frozen_clone();
        double ret = 0.0;
        for (SubtaskId a : res.sequence) ret += replay.execute(a).reward;
        CHECK(ret == doctest::Approx(res.best_return));
        ++n;
    }
}

TEST_CASE("optimal dominates the other policies on frozen episodes") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto g = generate_playground_graph(preset("D1"), seed);
        const auto cfg = oracle::config_for(g, seed + 100);
        Environment env(cfg);
        const double best = optimal_search(env).best_return;
        RandomPolicy rnd;
        GreedyPolicy greedy;
        GrpropPolicy grprop(SmoothParams::playground());
        for (Policy* p : std::initializer_list<Policy*>{&rnd, &greedy, &grprop})
            CHECK(run_episode(cfg, *p).total_return <= best + 1e-9);
    }
}

TEST_CASE("optimal refuses graphs above the guard") {
    const auto g = generate_playground_graph(preset("D2"), 1);
    Environment env(oracle::config_for(g, 1));
    REQUIRE(g.size() > 13);
    CHECK_THROWS_AS(optimal_search(env), IntractableError);
    CHECK_NOTHROW(optimal_search(env, OptimalOptions{g.size()}));
}

TEST_CASE("optimal policy replays its plan") {
    const auto g = generate_playground_graph(preset("D1"), 4);
    const auto cfg = oracle::config_for(g, 8);
    OptimalPolicy opt;
    const auto rec = run_episode(cfg, opt);
    CHECK(rec.total_return == doctest::Approx(optimal_search(Environment(cfg)).best_return));
}

TEST_CASE("policy tags") {
    for (auto t : {PolicyTag::random, PolicyTag::greedy, PolicyTag::grprop, PolicyTag::optimal, PolicyTag::mcts,
                   PolicyTag::mcts_grprop})
        CHECK(parse_policy_tag(policy_tag_name(t)) == t);
    CHECK_THROWS(parse_policy_tag("oracle"));
}
