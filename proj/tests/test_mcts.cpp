#include "oracles.hpp"
#include "sge/mcts.hpp"
#include "sge/policies.hpp"

#include <doctest.h>

#include <climits>
#include <cmath>

using namespace sge;

namespace {

MctsConfig iterations(long n, SearchGuide guide = SearchGuide::none, std::uint64_t seed = 1) {
    auto c = MctsConfig::for_domain(Domain::playground, guide);
    c.iteration_budget = n;
    c.seed = seed;
    return c;
}

// Three leaves, or a leaf feeding a parent, with rewards and a budget
// drawn from `seed`.
SubtaskGraph three_subtasks(std::uint64_t seed) {
    Rng rng(seed);
    auto r = [&] { return std::round(uniform_real(rng, 0.1, 1.0) * 100) / 100; };
    const int budget = uniform_int(rng, 6, 20);
    if (seed % 2 == 0)
        return SubtaskGraph({{0, "A", 0, r(), false}, {1, "B", 0, r(), false}, {2, "C", 0, r(), false}}, {},
                            {{}, {}, {}}, {budget, budget});
    return SubtaskGraph({{0, "A", 0, r(), false}, {1, "B", 0, r(), false}, {2, "C", 1, r() * 2, false}},
                        {{0, {Literal{0, false}, Literal{1, false}}}}, {{}, {}, {0}}, {budget, budget});
}

}  // namespace

TEST_CASE("ucb score") {
    const double c = 2 * std::sqrt(2.0);
    CHECK(ucb_score(5, 2, 10, c) == doctest::Approx(5.5346).epsilon(1e-4));
    CHECK(ucb_score(5, 2, 10, 0.0) == doctest::Approx(2.5));
    CHECK(std::isinf(ucb_score(0, 0, 10, c)));
    CHECK(ucb_score(3, 3, 20, c) > ucb_score(6, 6, 20, c));
}

TEST_CASE("config validation") {
    auto c = MctsConfig::for_domain(Domain::mining, SearchGuide::grprop);
    CHECK(c.max_depth == 10);
    CHECK(MctsConfig::for_domain(Domain::playground, SearchGuide::none).max_depth == 7);
    CHECK(c.c_ucb == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK_THROWS(c.validate());  // no budget
    c.iteration_budget = 0;
    CHECK_THROWS(c.validate());
    c.iteration_budget = 5;
    CHECK_NOTHROW(c.validate());
    c.c_ucb = -1;
    CHECK_THROWS(c.validate());
}

TEST_CASE("one iteration expands exactly one root child") {
    const auto g = generate_playground_graph(preset("D1"), 2);
    Environment env(oracle::config_for(g, 3));
    MctsTree tree(env, iterations(1));
    tree.search();
    CHECK(tree.stats().iterations == 1);
    CHECK(tree.root().visits == 1);
    CHECK(tree.root().children.size() == 1);
    CHECK(tree.best_action() == tree.node(tree.root().children[0]).action);
}

TEST_CASE("back-propagation conservation and unvisited-first") {
    const auto g = generate_playground_graph(preset("D2"), 6);
    Environment env(oracle::config_for(g, 6));
    for (auto guide : {SearchGuide::none, SearchGuide::grprop}) {
        MctsTree tree(env, iterations(400, guide));
        for (int k = 1; k <= 400; ++k) {
            tree.iterate();
            CHECK(tree.root().visits == k);
            CHECK(tree.root().total_return == doctest::Approx(tree.returns_sum()));
            const auto& kids = tree.root().children;
            if (!tree.root().untried.empty()) {
                for (int ch : kids) CHECK(tree.node(ch).visits >= 1);
            } else {
                long lo = LONG_MAX;
                for (int ch : kids) lo = std::min(lo, tree.node(ch).visits);
                CHECK(lo >= 1);
            }
        }
        long child_visits = 0;
        for (int ch : tree.root().children) child_visits += tree.node(ch).visits;
        CHECK(child_visits == tree.root().visits);
        CHECK(tree.stats().rollout_steps <= tree.stats().simulated_steps);
    }
}

TEST_CASE("step budget charges every iteration at least one step") {
    // Once both leaves are done every iteration simulates nothing; the
    // search must still stop.
    const SubtaskGraph g({{0, "A", 0, 0.3, false}, {1, "B", 0, 0.6, false}}, {}, {{}, {}}, {40, 40});
    Environment env(oracle::config_for(g, 1));
    auto c = MctsConfig::for_domain(Domain::playground, SearchGuide::none);
    c.simulated_step_budget = 60;
    MctsTree tree(env, c);
    tree.search();
    CHECK(tree.stats().iterations >= 1);
    CHECK(tree.stats().iterations <= 60);
    CHECK(tree.best_action().has_value());
}

TEST_CASE("guided search with one iteration replays GRProp") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = generate_playground_graph(preset("D1"), seed);
        const auto cfg = oracle::config_for(g, seed);
        MctsPolicy mcts(iterations(1, SearchGuide::grprop));
        GrpropPolicy grprop(SmoothParams::playground());
        const auto a = run_episode(cfg, mcts);
        const auto b = run_episode(cfg, grprop);
        CHECK(a.options == b.options);
        CHECK(a.total_return == b.total_return);
    }
}

TEST_CASE("MCTS finds the optimum on three-subtask instances") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto g = three_subtasks(seed);
        const auto cfg = oracle::config_for(g, seed);
        const auto best = optimal_search(Environment(cfg)).best_return;
        const auto run = mcts_plan(cfg, iterations(10000, SearchGuide::none, seed));
        CHECK(run.record.total_return == doctest::Approx(best).epsilon(1e-12));
        CHECK(run.stats.iterations > 0);
    }
}

TEST_CASE("search is deterministic for a fixed seed") {
    const auto g = generate_playground_graph(preset("D2"), 9);
    const auto cfg = oracle::config_for(g, 9);
    const auto a = mcts_plan(cfg, iterations(200, SearchGuide::none, 5));
    const auto b = mcts_plan(cfg, iterations(200, SearchGuide::none, 5));
    CHECK(a.record == b.record);
    CHECK(a.stats.simulated_steps == b.stats.simulated_steps);
}
