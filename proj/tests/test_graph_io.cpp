#include "oracles.hpp"
#include "sge/graph_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>

using namespace sge;

TEST_CASE("text round trip is lossless and byte-stable") {
    for (const char* name : {"D1", "D3", "Base+NOT"}) {
        const auto g = generate_playground_graph(preset(name), 42);
        const auto text = graph_to_text(g);
        const auto back = graph_from_text(text);
        CHECK(graph_to_text(back) == text);
        CHECK(canonical_hash(back) == canonical_hash(g));
        CHECK(back.size() == g.size());
        for (SubtaskId i = 0; i < g.size(); ++i) {
            CHECK(back.subtask(i).label == g.subtask(i).label);
            CHECK(back.subtask(i).layer == g.subtask(i).layer);
            CHECK(back.reward(i) == g.reward(i));
            CHECK(back.subtask(i).distractor == g.subtask(i).distractor);
            CHECK(back.or_children(i) == g.or_children(i));
        }
    }
}

TEST_CASE("normative field names") {
    const auto j = nlohmann::json::parse(graph_to_text(oracle::furnace_fragment()));
    for (const char* key : {"version", "n_subtasks", "subtasks", "and_nodes", "or_children", "step_budget_range"})
        CHECK(j.contains(key));
    CHECK(j["n_subtasks"] == 3);
    CHECK(j["subtasks"][2]["label"] == "J");
    CHECK(j["and_nodes"][0]["children"][0].contains("negated"));
    CHECK(j["or_children"]["2"] == nlohmann::json::array({0, 1}));
    CHECK(j["step_budget_range"] == nlohmann::json::array({10, 10}));
}

TEST_CASE("hand-written document parses") {
    const std::string text = R"({
      "version": 1, "n_subtasks": 2,
      "subtasks": [{"id": 0, "label": "a", "layer": 0, "reward": 0.5},
                   {"id": 1, "label": "b", "layer": 1, "reward": 1.0}],
      "and_nodes": [{"id": 4, "children": [{"subtask": 0, "negated": true}]}],
      "or_children": {"1": [4]},
      "step_budget_range": [3, 9]
    })";
    const auto g = graph_from_text(text);
    CHECK(g.size() == 2);
    CHECK(g.or_children(0).empty());
    CHECK(compute_eligibility(g, SubtaskSet(0)).test(1));
    CHECK_FALSE(compute_eligibility(g, SubtaskSet(1)).test(1));
    CHECK(g.step_budget_range() == BudgetRange{3, 9});
}

TEST_CASE("malformed documents raise GraphError") {
    CHECK_THROWS_AS(graph_from_text("{not json"), GraphError);
    CHECK_THROWS_AS(graph_from_text(R"({"version": 1})"), GraphError);
    CHECK_THROWS_AS(graph_from_text(R"({"version": 2, "n_subtasks": 0, "subtasks": [], "and_nodes": [],
                                        "or_children": {}, "step_budget_range": [1, 1]})"),
                    GraphError);
    CHECK_THROWS_AS(graph_from_text(R"({"version": 1, "n_subtasks": 2, "subtasks": [{"id": 0, "label": "a",
                                        "layer": 0, "reward": 0}], "and_nodes": [], "or_children": {},
                                        "step_budget_range": [1, 1]})"),
                    GraphError);
}

TEST_CASE("file io") {
    const auto dir = std::filesystem::temp_directory_path() / "sge_graph_io_test";
    std::filesystem::create_directories(dir);
    const auto g = generate_playground_graph(preset("D2"), 5);
    write_graph(g, dir / "g.json");
    CHECK(graph_to_text(read_graph(dir / "g.json")) == graph_to_text(g));
    CHECK_THROWS(read_graph(dir / "missing.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("canonical hash") {
    const auto a = generate_playground_graph(preset("D1"), 1);
    const auto b = generate_playground_graph(preset("D1"), 2);
    CHECK(canonical_hash(a) != canonical_hash(b));
    CHECK(canonical_hash(a) == canonical_hash(generate_playground_graph(preset("D1"), 1)));
    CHECK(canonical_hash(a, false) == canonical_hash(graph_from_text(graph_to_text(a)), false));
}
