#pragma once

#include "sge/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace sge {

/// Structured-text (JSON) form of a SubtaskGraph. Field names:
/// version, n_subtasks, subtasks[{id,label,layer,reward[,distractor]}],
/// and_nodes[{id,children[{subtask,negated}]}], or_children{id -> [and ids]},
/// step_budget_range [lo,hi].
constexpr int graph_format_version = 1;

std::string graph_to_text(const SubtaskGraph& graph);
SubtaskGraph graph_from_text(const std::string& text);

void write_graph(const SubtaskGraph& graph, const std::filesystem::path& path);
SubtaskGraph read_graph(const std::filesystem::path& path);

/// Hash of the graph structure that ignores AND node ids, AND node order and
/// child order within a node. Two graphs with the same canonical hash have the
/// same subtasks, rewards, budgets and preconditions. With
/// `include_rewards = false` only layers, distractor flags and preconditions
/// are hashed.
std::uint64_t canonical_hash(const SubtaskGraph& graph, bool include_rewards = true);

}  // namespace sge
