#include "sge/graph_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace sge {

using nlohmann::json;

std::string graph_to_text(const SubtaskGraph& graph) {
    json j;
    j["version"] = graph_format_version;
    j["n_subtasks"] = graph.size();
    json subtasks = json::array();
    for (const auto& s : graph.subtasks()) {
        json e = {{"id", s.id}, {"label", s.label}, {"layer", s.layer}, {"reward", s.reward}};
        if (s.distractor) e["distractor"] = true;
        subtasks.push_back(std::move(e));
    }
    j["subtasks"] = std::move(subtasks);
    json ands = json::array();
    for (const auto& a : graph.and_nodes()) {
        json kids = json::array();
        for (const auto& lit : a.children) kids.push_back({{"subtask", lit.subtask}, {"negated", lit.negated}});
        ands.push_back({{"id", a.id}, {"children", std::move(kids)}});
    }
    j["and_nodes"] = std::move(ands);
    json ors = json::object();
    for (SubtaskId i = 0; i < graph.size(); ++i) ors[std::to_string(i)] = graph.or_children(i);
    j["or_children"] = std::move(ors);
    j["step_budget_range"] = {graph.step_budget_range().lo, graph.step_budget_range().hi};
    return j.dump(1) + "\n";
}

SubtaskGraph graph_from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw GraphError(std::string("graph text is not valid JSON: ") + e.what());
    }
    try {
        const int version = j.at("version").get<int>();
        if (version != graph_format_version)
            throw GraphError("unsupported graph format version " + std::to_string(version));
        const int n = j.at("n_subtasks").get<int>();
        std::vector<SubtaskSpec> subtasks;
        for (const auto& e : j.at("subtasks")) {
            SubtaskSpec s;
            s.id = e.at("id").get<int>();
            s.label = e.value("label", std::string{});
            s.layer = e.at("layer").get<int>();
            s.reward = e.at("reward").get<double>();
            s.distractor = e.value("distractor", false);
            subtasks.push_back(std::move(s));
        }
        if (static_cast<int>(subtasks.size()) != n)
            throw GraphError("n_subtasks is " + std::to_string(n) + " but " + std::to_string(subtasks.size()) +
                             " subtasks are listed");
        std::sort(subtasks.begin(), subtasks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

        std::vector<AndNode> ands;
        for (const auto& e : j.at("and_nodes")) {
            AndNode a;
            a.id = e.at("id").get<int>();
            for (const auto& c : e.at("children"))
                a.children.push_back({c.at("subtask").get<int>(), c.at("negated").get<bool>()});
            ands.push_back(std::move(a));
        }

        std::vector<std::vector<int>> ors(static_cast<std::size_t>(std::max(n, 0)));
        for (const auto& [key, val] : j.at("or_children").items()) {
            int i = -1;
            try {
                std::size_t used = 0;
                i = std::stoi(key, &used);
                if (used != key.size()) i = -1;
            } catch (const std::exception&) {
            }
            if (i < 0 || i >= n) throw GraphError("or_children key '" + key + "' is not a subtask id");
            ors[static_cast<std::size_t>(i)] = val.get<std::vector<int>>();
        }

        const auto& range = j.at("step_budget_range");
        if (!range.is_array() || range.size() != 2) throw GraphError("step_budget_range must be [lo, hi]");
        return SubtaskGraph(std::move(subtasks), std::move(ands), std::move(ors),
                            {range[0].get<int>(), range[1].get<int>()});
    } catch (const json::exception& e) {
        throw GraphError(std::string("malformed graph text: ") + e.what());
    }
}

void write_graph(const SubtaskGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << graph_to_text(graph);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

SubtaskGraph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return graph_from_text(ss.str());
}

namespace {

// FNV-1a over 64-bit words.
struct Hasher {
    std::uint64_t h = 1469598103934665603ull;
    void add(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
};

}  // namespace

std::uint64_t canonical_hash(const SubtaskGraph& graph, bool include_rewards) {
    Hasher hs;
    hs.add(static_cast<std::uint64_t>(graph.size()));
    if (include_rewards) {
        hs.add(static_cast<std::uint64_t>(graph.step_budget_range().lo));
        hs.add(static_cast<std::uint64_t>(graph.step_budget_range().hi));
    }
    for (const auto& s : graph.subtasks()) {
        hs.add(static_cast<std::uint64_t>(s.layer));
        if (include_rewards) hs.add(std::bit_cast<std::uint64_t>(s.reward));
        hs.add(s.distractor ? 1 : 0);
        std::vector<std::pair<std::uint64_t, std::uint64_t>> clauses;
        for (const auto& c : graph.clauses(s.id)) clauses.emplace_back(c.pos, c.neg);
        std::sort(clauses.begin(), clauses.end());
        hs.add(clauses.size());
        for (auto [p, n] : clauses) {
            hs.add(p);
            hs.add(n);
        }
    }
    return hs.h;
}

}  // namespace sge
