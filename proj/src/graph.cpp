#include "sge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sge {

std::vector<SubtaskId> SubtaskSet::to_vector() const {
    std::vector<SubtaskId> out;
    out.reserve(static_cast<std::size_t>(count()));
    for_each([&](SubtaskId i) { out.push_back(i); });
    return out;
}

SubtaskSet SubtaskSet::from_bools(std::span<const bool> v) {
    if (v.size() > static_cast<std::size_t>(capacity))
        throw GraphError("bit vector longer than " + std::to_string(capacity));
    SubtaskSet s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) s.set(static_cast<SubtaskId>(i));
    return s;
}

namespace {

std::string subtask_name(const SubtaskSpec& s) {
    return "subtask " + std::to_string(s.id) + (s.label.empty() ? "" : " (" + s.label + ")");
}

}  // namespace

SubtaskGraph::SubtaskGraph(std::vector<SubtaskSpec> subtasks, std::vector<AndNode> and_nodes,
                           std::vector<std::vector<int>> or_children, BudgetRange step_budget_range)
    : subtasks_(std::move(subtasks)),
      and_nodes_(std::move(and_nodes)),
      or_children_(std::move(or_children)),
      budget_(step_budget_range) {
    const int n = size();
    if (n > SubtaskSet::capacity)
        throw GraphError("graph has " + std::to_string(n) + " subtasks; at most " +
                         std::to_string(SubtaskSet::capacity) + " supported");
    if (static_cast<int>(or_children_.size()) != n)
        throw GraphError("or_children has " + std::to_string(or_children_.size()) + " entries for " +
                         std::to_string(n) + " subtasks");
    if (budget_.lo < 0 || budget_.lo > budget_.hi)
        throw GraphError("invalid step_budget_range [" + std::to_string(budget_.lo) + ", " +
                         std::to_string(budget_.hi) + "]");

    for (int i = 0; i < n; ++i) {
        const auto& s = subtasks_[static_cast<std::size_t>(i)];
        if (s.id != i) throw GraphError("subtask ids must be dense 0..N-1; found id " + std::to_string(s.id) + " at position " + std::to_string(i));
        if (s.layer < 0) throw GraphError(subtask_name(s) + " has negative layer");
        if (!std::isfinite(s.reward)) throw GraphError(subtask_name(s) + " has non-finite reward");
        num_layers_ = std::max(num_layers_, s.layer + 1);
    }

    int max_and_id = -1;
    for (const auto& a : and_nodes_) {
        if (a.id < 0) throw GraphError("negative AND node id " + std::to_string(a.id));
        max_and_id = std::max(max_and_id, a.id);
    }
    and_index_.assign(static_cast<std::size_t>(max_and_id + 1), -1);
    for (std::size_t p = 0; p < and_nodes_.size(); ++p) {
        const auto& a = and_nodes_[p];
        auto& slot = and_index_[static_cast<std::size_t>(a.id)];
        if (slot != -1) throw GraphError("duplicate AND node id " + std::to_string(a.id));
        slot = static_cast<int>(p);
        if (a.children.empty()) throw GraphError("AND node " + std::to_string(a.id) + " has no children");
        std::set<SubtaskId> seen;
        for (const auto& lit : a.children) {
            if (lit.subtask < 0 || lit.subtask >= n)
                throw GraphError("AND node " + std::to_string(a.id) + " references unknown subtask " +
                                 std::to_string(lit.subtask));
            if (!seen.insert(lit.subtask).second)
                throw GraphError("AND node " + std::to_string(a.id) + " mentions subtask " +
                                 std::to_string(lit.subtask) + " twice");
            const auto& child = subtasks_[static_cast<std::size_t>(lit.subtask)];
            if (child.distractor && !lit.negated)
                throw GraphError("distractor " + subtask_name(child) + " used as a non-negated child of AND node " +
                                 std::to_string(a.id));
        }
    }

    rewards_.resize(static_cast<std::size_t>(n));
    parents_.assign(static_cast<std::size_t>(n), {});
    pre_children_.assign(static_cast<std::size_t>(n), {});
    clause_range_.resize(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        const auto& s = subtasks_[static_cast<std::size_t>(i)];
        rewards_[static_cast<std::size_t>(i)] = s.reward;
        const auto& ors = or_children_[static_cast<std::size_t>(i)];
        if (ors.empty() && s.layer != 0 && !s.distractor)
            throw GraphError(subtask_name(s) + " has no precondition but sits at layer " + std::to_string(s.layer));
        if (!ors.empty() && s.distractor)
            throw GraphError("distractor " + subtask_name(s) + " must not have a precondition");

        std::set<std::vector<Literal>> patterns;
        std::set<SubtaskId> kids;
        const std::size_t first = clauses_.size();
        for (int j : ors) {
            if (j < 0 || j >= static_cast<int>(and_index_.size()) || and_index_[static_cast<std::size_t>(j)] < 0)
                throw GraphError(subtask_name(s) + " references unknown AND node " + std::to_string(j));
            const auto& a = and_node(j);
            auto sorted = a.children;
            std::sort(sorted.begin(), sorted.end());
            if (!patterns.insert(sorted).second)
                throw GraphError(subtask_name(s) + " has duplicated AND nodes with the same children (AND node " +
                                 std::to_string(j) + ")");
            Clause c;
            for (const auto& lit : a.children) {
                const auto& child = subtasks_[static_cast<std::size_t>(lit.subtask)];
                if (child.layer >= s.layer)
                    throw GraphError("layering violated: " + subtask_name(child) + " (layer " +
                                     std::to_string(child.layer) + ") feeds " + subtask_name(s) + " (layer " +
                                     std::to_string(s.layer) + ")");
                (lit.negated ? c.neg : c.pos) |= std::uint64_t{1} << lit.subtask;
                kids.insert(lit.subtask);
            }
            clauses_.push_back(c);
        }
        clause_range_[static_cast<std::size_t>(i)] = {first, clauses_.size() - first};
        pre_children_[static_cast<std::size_t>(i)].assign(kids.begin(), kids.end());
        for (SubtaskId k : kids) parents_[static_cast<std::size_t>(k)].push_back(i);
    }
}

SubtaskSet SubtaskGraph::all() const {
    const int n = size();
    return SubtaskSet(n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
}

SubtaskSet compute_eligibility(const SubtaskGraph& graph, SubtaskSet completion) {
    const std::uint64_t x = completion.bits();
    std::uint64_t e = 0;
    for (SubtaskId i = 0; i < graph.size(); ++i) {
        if ((x >> i) & 1u) continue;
        auto cl = graph.clauses(i);
        bool ok = cl.empty();
        for (const auto& c : cl) {
            if ((x & c.pos) == c.pos && (x & c.neg) == 0) {
                ok = true;
                break;
            }
        }
        if (ok) e |= std::uint64_t{1} << i;
    }
    return SubtaskSet(e);
}

std::vector<bool> compute_eligibility(const SubtaskGraph& graph, std::span<const bool> completion) {
    if (static_cast<int>(completion.size()) != graph.size())
        throw GraphError("completion vector has length " + std::to_string(completion.size()) + ", graph has " +
                         std::to_string(graph.size()) + " subtasks");
    const SubtaskSet e = compute_eligibility(graph, SubtaskSet::from_bools(completion));
    std::vector<bool> out(completion.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = e.test(static_cast<SubtaskId>(i));
    return out;
}

TaskState initial_state(const SubtaskGraph& graph, int budget) {
    TaskState s;
    s.remaining_steps = std::max(0, budget);
    s.eligibility = compute_eligibility(graph, s.completion);
    return s;
}

ExecuteResult execute_subtask(const SubtaskGraph& graph, const TaskState& state, SubtaskId i, int duration) {
    if (i < 0 || i >= graph.size())
        throw GraphError("subtask id " + std::to_string(i) + " out of range [0, " + std::to_string(graph.size()) + ")");
    ExecuteResult out{state, 0.0, false};
    if (state.eligibility.test(i)) {
        out.state.completion.set(i);
        out.state.eligibility = compute_eligibility(graph, out.state.completion);
        out.reward = graph.reward(i);
        out.executed = true;
    }
    out.state.remaining_steps = std::max(0, state.remaining_steps - duration);
    return out;
}

double episode_return(std::span<const double> rewards) {
    return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

double completion_value(const SubtaskGraph& graph, SubtaskSet completion) {
    double v = 0.0;
    completion.for_each([&](SubtaskId i) { v += graph.reward(i); });
    return v;
}

}  // namespace sge
