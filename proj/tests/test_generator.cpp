#include "oracles.hpp"
#include "sge/generator.hpp"
#include "sge/graph_io.hpp"

#include <doctest.h>

#include <set>

using namespace sge;

namespace {

struct LayerCounts {
    std::vector<int> tasks, distractors, and_nodes;
};

LayerCounts audit(const SubtaskGraph& g) {
    LayerCounts c;
    const int layers = g.num_layers();
    c.tasks.assign(static_cast<std::size_t>(layers), 0);
    c.distractors.assign(static_cast<std::size_t>(layers), 0);
    c.and_nodes.assign(static_cast<std::size_t>(layers), 0);
    for (SubtaskId i = 0; i < g.size(); ++i) {
        const auto l = static_cast<std::size_t>(g.subtask(i).layer);
        ++c.tasks[l];
        if (g.subtask(i).distractor) ++c.distractors[l];
        c.and_nodes[l] += static_cast<int>(g.or_children(i).size());
    }
    return c;
}

}  // namespace

TEST_CASE("preset parameter blocks") {
    const auto d1 = preset("D1");
    CHECK(d1.tasks_per_layer == std::vector<int>{6, 4, 2, 1});
    CHECK(d1.distractors_per_layer == std::vector<int>{2, 1, 0, 0});
    CHECK(d1.and_per_layer == std::vector<IntRange>{{3, 5}, {3, 4}, {2, 2}});
    CHECK(d1.reward_per_layer[3] == RealRange{1.8, 2.0});
    CHECK(d1.step_budget == BudgetRange{48, 72});

    const auto d4 = preset("D4");
    CHECK(d4.tasks_per_layer == std::vector<int>{4, 3, 3, 3, 2, 1});
    for (int n : d4.distractors_per_layer) CHECK(n == 0);
    CHECK(d4.step_budget == BudgetRange{56, 84});

    for (const auto& r : preset("Base-OR").or_children) CHECK(r == IntRange{1, 1});

    const auto delayed = preset("Base+Delayed");
    for (int l = 0; l + 1 < delayed.num_layers(); ++l)
        CHECK(delayed.reward_per_layer[static_cast<std::size_t>(l)] == RealRange{0, 0});
    CHECK(delayed.reward_per_layer.back() == RealRange{1.6, 1.8});

    for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
    CHECK_THROWS_AS(preset("D9"), GenerationError);
}

TEST_CASE("D1 draws have 13 subtasks in 4 layers") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = generate_playground_graph(preset("D1"), seed);
        CHECK(g.size() == 13);
        CHECK(g.num_layers() == 4);
        const auto c = audit(g);
        CHECK(c.tasks == std::vector<int>{6, 4, 2, 1});
        CHECK(c.distractors == std::vector<int>{2, 1, 0, 0});
        const double top = g.reward(g.size() - 1);
        CHECK(top >= 1.8);
        CHECK(top <= 2.0);
    }
}

TEST_CASE("zero negation and distractor counts give a plain AND-OR graph") {
    auto p = preset("Base");
    for (auto& r : p.and_children_neg) r = {0, 0};
    for (auto& n : p.distractors_per_layer) n = 0;
    for (auto& r : p.distractor_neg_parents) r = {0, 0};
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = generate_playground_graph(p, seed);
        for (const auto& a : g.and_nodes())
            for (const auto& lit : a.children) CHECK_FALSE(lit.negated);
        for (SubtaskId i = 0; i < g.size(); ++i) CHECK_FALSE(g.subtask(i).distractor);
    }
}

TEST_CASE("500 D1 draws are structurally distinct") {
    std::set<std::uint64_t> hashes;
    for (std::uint64_t seed = 0; seed < 500; ++seed)
        hashes.insert(canonical_hash(generate_playground_graph(preset("D1"), mix_seed({7, seed})), false));
    CHECK(hashes.size() == 500);
}

TEST_CASE("generation is deterministic and byte-stable") {
    for (const auto& name : preset_names()) {
        const auto a = graph_to_text(generate_playground_graph(preset(name), 1234));
        const auto b = graph_to_text(generate_playground_graph(preset(name), 1234));
        CHECK(a == b);
    }
}

TEST_CASE("count audit and distractor definition across presets") {
    for (const auto& name : preset_names()) {
        const auto p = preset(name);
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const auto g = generate_playground_graph(p, seed);
            const auto c = audit(g);
            REQUIRE(static_cast<int>(c.tasks.size()) == p.num_layers());
            for (int l = 0; l < p.num_layers(); ++l) {
                const auto ul = static_cast<std::size_t>(l);
                CHECK(c.tasks[ul] == p.tasks_per_layer[ul]);
                CHECK(c.distractors[ul] == p.distractors_per_layer[ul]);
                if (l > 0) {
                    // Every regular subtask of the layer has between N_oc.lo and N_oc.hi disjuncts.
                    const auto& oc = p.or_children[ul - 1];
                    const int regular = c.tasks[ul] - c.distractors[ul];
                    CHECK(c.and_nodes[ul] >= regular * oc.lo);
                    CHECK(c.and_nodes[ul] <= regular * oc.hi);
                }
            }
            for (SubtaskId i = 0; i < g.size(); ++i) {
                const auto& s = g.subtask(i);
                const auto& r = p.reward_per_layer[static_cast<std::size_t>(s.layer)];
                CHECK(s.reward >= r.lo);
                CHECK(s.reward <= r.hi);
                if (!s.distractor) continue;
                CHECK(g.or_children(i).empty());
                for (const auto& a : g.and_nodes())
                    for (const auto& lit : a.children)
                        if (lit.subtask == i) CHECK(lit.negated);
            }
        }
    }
}

TEST_CASE("unsatisfiable parameters are rejected") {
    auto p = preset("D1");
    p.and_children_pos[0] = {7, 9};
    CHECK_THROWS_AS(p.validate(), GenerationError);
    CHECK_THROWS_AS(generate_playground_graph(p, 1), GenerationError);
}

TEST_CASE("mining template") {
    const auto& t = mining_template();
    CHECK(t.size() == 26);
    std::set<std::string> labels;
    for (SubtaskId i = 0; i < t.size(); ++i) labels.insert(t.subtask(i).label);
    CHECK(labels.size() == 26);
    for (const char* l : {"get wood", "make stone pickaxe", "light furnace", "make necklace"}) CHECK(labels.count(l) == 1);

    SUBCASE("light furnace is firewood OR coal") {
        SubtaskId furnace = -1, firewood = -1, coal = -1;
        for (SubtaskId i = 0; i < t.size(); ++i) {
            if (t.subtask(i).label == "light furnace") furnace = i;
            if (t.subtask(i).label == "make firewood") firewood = i;
            if (t.subtask(i).label == "get coal") coal = i;
        }
        REQUIRE(furnace >= 0);
        CHECK(t.or_children(furnace).size() == 2);
        SubtaskSet done;
        done.set(firewood);
        CHECK(precondition_closure(t, done).test(firewood));
        const auto pre = t.precondition_children(furnace);
        CHECK(std::find(pre.begin(), pre.end(), firewood) != pre.end());
        CHECK(std::find(pre.begin(), pre.end(), coal) != pre.end());
    }

    SUBCASE("subgraph enumeration") {
        Rng rng(3);
        const auto graphs = enumerate_mining_subgraphs(t, rng, 640);
        CHECK(graphs.size() == 640);
        std::set<std::set<std::string>> distinct;
        const auto keep = mining_keep_set();
        CHECK(keep.count() == 10);
        for (const auto& g : graphs) {
            std::set<std::string> have;
            for (SubtaskId i = 0; i < g.size(); ++i) have.insert(g.subtask(i).label);
            distinct.insert(have);
            keep.for_each([&](SubtaskId k) { CHECK(have.count(t.subtask(k).label) == 1); });
            CHECK(g.step_budget_range() == mining_budget_range());
            for (SubtaskId i = 0; i < g.size(); ++i) {
                SubtaskId ti = 0;
                while (t.subtask(ti).label != g.subtask(i).label) ++ti;
                if (t.reward(ti) == 0.0) continue;
                const double ratio = g.reward(i) / t.reward(ti);
                CHECK(ratio >= 0.8 - 1e-12);
                CHECK(ratio <= 1.2 + 1e-12);
            }
        }
        CHECK(distinct.size() == 640);
    }
}

TEST_CASE("induced subgraph keeps preconditions closed") {
    const auto& t = mining_template();
    SubtaskSet top;
    top.set(t.size() - 1);
    const auto closed = precondition_closure(t, top);
    const auto g = induced_subgraph(t, closed);
    CHECK(g.size() == closed.count());
    CHECK(g.subtask(g.size() - 1).label == t.subtask(t.size() - 1).label);
    CHECK_THROWS(induced_subgraph(t, top));
}
