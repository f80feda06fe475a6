#include "oracles.hpp"
#include "sge/graph.hpp"

#include <doctest.h>

using namespace sge;

namespace {

SubtaskGraph two_leaves(double ra, double rb) {
    return SubtaskGraph({{0, "A", 0, ra, false}, {1, "B", 0, rb, false}}, {}, {{}, {}}, {5, 5});
}

std::vector<bool> bits_to_bools(std::uint64_t m, int n) {
    std::vector<bool> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = (m >> i) & 1u;
    return v;
}

}  // namespace

TEST_CASE("SubtaskSet basics") {
    SubtaskSet s;
    CHECK(s.empty());
    s.set(3);
    s.set(63);
    CHECK(s.test(3));
    CHECK(s.test(63));
    CHECK_FALSE(s.test(4));
    CHECK(s.count() == 2);
    CHECK(s.to_vector() == std::vector<SubtaskId>{3, 63});
    s.reset(3);
    CHECK(s.count() == 1);
    CHECK(SubtaskSet(0b0110).subset_of(SubtaskSet(0b1110)));
    CHECK_FALSE(SubtaskSet(0b0001).subset_of(SubtaskSet(0b1110)));
    const bool raw[] = {true, false, true};
    CHECK(SubtaskSet::from_bools(raw) == SubtaskSet(0b101));
}

TEST_CASE("OR of two single-literal clauses") {
    const auto g = oracle::furnace_fragment();
    const SubtaskSet d_only(0b001);
    CHECK(compute_eligibility(g, d_only).test(2));
    CHECK(compute_eligibility(g, SubtaskSet(0b010)).test(2));
    CHECK_FALSE(compute_eligibility(g, SubtaskSet(0b000)).test(2));
    CHECK_FALSE(compute_eligibility(g, SubtaskSet(0b111)).test(2));
}

TEST_CASE("leaf eligibility follows the executed-once rule") {
    const auto g = two_leaves(0.3, 0.9);
    CHECK(compute_eligibility(g, SubtaskSet(0)).test(0));
    CHECK_FALSE(compute_eligibility(g, SubtaskSet(1)).test(0));
}

TEST_CASE("eligibility agrees with the truth-table oracle") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        const auto g = oracle::small_graph(seed);
        REQUIRE(g.size() <= 10);
        const int n = g.size();
        for (std::uint64_t m = 0; m < (1ull << n); ++m) {
            const auto x = bits_to_bools(m, n);
            const auto expected = oracle::truth_table_eligibility(g, x);
            const auto got_mask = compute_eligibility(g, SubtaskSet(m));
            for (int i = 0; i < n; ++i) REQUIRE(got_mask.test(i) == expected[static_cast<std::size_t>(i)]);
            bool raw[10] = {};
            std::copy(x.begin(), x.end(), raw);
            CHECK(compute_eligibility(g, std::span<const bool>(raw, x.size())) == expected);
        }
    }
}

TEST_CASE("eligibility rejects a completion vector of the wrong length") {
    const auto g = two_leaves(0.1, 0.2);
    const bool x[] = {false, false, false};
    CHECK_THROWS_AS(compute_eligibility(g, std::span<const bool>(x)), GraphError);
}

TEST_CASE("execute_subtask") {
    const auto g = oracle::furnace_fragment();
    const auto s0 = initial_state(g, 10);
    CHECK(s0.eligibility == SubtaskSet(0b011));
    CHECK(s0.remaining_steps == 10);

    SUBCASE("eligible subtask pays and completes") {
        const auto r = execute_subtask(g, s0, 0, 3);
        CHECK(r.executed);
        CHECK(r.reward == doctest::Approx(0.1));
        CHECK(r.state.completion.test(0));
        CHECK(r.state.eligibility == compute_eligibility(g, r.state.completion));
        CHECK(r.state.remaining_steps == 7);
    }
    SUBCASE("ineligible subtask leaves the state alone") {
        const auto r = execute_subtask(g, s0, 2);
        CHECK_FALSE(r.executed);
        CHECK(r.reward == 0.0);
        CHECK(r.state == s0);
    }
    SUBCASE("completed subtask pays nothing again") {
        const auto once = execute_subtask(g, s0, 0);
        const auto twice = execute_subtask(g, once.state, 0);
        CHECK(twice.reward == 0.0);
        CHECK(twice.state.completion == once.state.completion);
    }
    SUBCASE("bad id") {
        CHECK_THROWS_AS(execute_subtask(g, s0, 3), GraphError);
        CHECK_THROWS_AS(execute_subtask(g, s0, -1), GraphError);
    }
    SUBCASE("budget clamps at zero") {
        CHECK(execute_subtask(g, s0, 0, 25).state.remaining_steps == 0);
    }
}

TEST_CASE("episode_return") {
    CHECK(episode_return({}) == 0.0);
    const double r[] = {0.3, 0.7};
    CHECK(episode_return(r) == doctest::Approx(1.0));
}

TEST_CASE("random executions: monotone completion and reward conservation") {
    Rng rng(99);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto g = oracle::small_graph(seed * 7919);
        auto st = initial_state(g, 100);
        std::vector<double> rewards;
        for (int t = 0; t < 20; ++t) {
            const SubtaskId i = uniform_int(rng, 0, g.size() - 1);
            const auto r = execute_subtask(g, st, i, 1);
            CHECK(st.completion.subset_of(r.state.completion));
            CHECK((r.state.eligibility & r.state.completion).empty());
            rewards.push_back(r.reward);
            st = r.state;
        }
        CHECK(episode_return(rewards) == doctest::Approx(completion_value(g, st.completion)));
    }
}

TEST_CASE("graph validation") {
    using L = Literal;
    SUBCASE("child layer must be below the parent") {
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 1, 0, false}, {1, "B", 1, 0, false}}, {{0, {L{0, false}}}},
                                     {{}, {0}}, {1, 1}),
                        GraphError);
    }
    SUBCASE("duplicate AND pattern under one subtask") {
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 0, 0, false}, {1, "B", 1, 0, false}},
                                     {{0, {L{0, false}}}, {1, {L{0, false}}}}, {{}, {0, 1}}, {1, 1}),
                        GraphError);
    }
    SUBCASE("same literal set with a different negation pattern is fine") {
        CHECK_NOTHROW(SubtaskGraph({{0, "A", 0, 0, false}, {1, "B", 1, 0, false}},
                                   {{0, {L{0, false}}}, {1, {L{0, true}}}}, {{}, {0, 1}}, {1, 1}));
    }
    SUBCASE("dangling references") {
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 0, 0, false}, {1, "B", 1, 0, false}}, {{0, {L{5, false}}}},
                                     {{}, {0}}, {1, 1}),
                        GraphError);
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 0, 0, false}, {1, "B", 1, 0, false}}, {{0, {L{0, false}}}},
                                     {{}, {7}}, {1, 1}),
                        GraphError);
    }
    SUBCASE("distractor cannot be a positive child") {
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 0, 0, true}, {1, "B", 1, 0, false}}, {{0, {L{0, false}}}},
                                     {{}, {0}}, {1, 1}),
                        GraphError);
    }
    SUBCASE("non-distractor leaf above layer 0") {
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 0, 0, false}, {1, "B", 1, 0, false}}, {}, {{}, {}}, {1, 1}),
                        GraphError);
    }
    SUBCASE("ids must be dense") {
        CHECK_THROWS_AS(SubtaskGraph({{1, "A", 0, 0, false}}, {}, {{}}, {1, 1}), GraphError);
    }
    SUBCASE("budget range") {
        CHECK_THROWS_AS(SubtaskGraph({{0, "A", 0, 0, false}}, {}, {{}}, {5, 4}), GraphError);
    }
}

TEST_CASE("parents and precondition children") {
    const auto g = oracle::furnace_fragment();
    CHECK(g.parents(0) == std::vector<SubtaskId>{2});
    CHECK(g.precondition_children(2) == std::vector<SubtaskId>{0, 1});
    CHECK(g.is_leaf(0));
    CHECK_FALSE(g.is_leaf(2));
    CHECK(g.num_layers() == 2);
}
