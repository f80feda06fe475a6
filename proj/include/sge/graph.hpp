#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sge {

using SubtaskId = int;

/// Thrown when a graph or a vector passed against it is structurally invalid.
class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed-capacity bit set over subtask ids (completion and eligibility vectors).
class SubtaskSet {
public:
    static constexpr int capacity = 64;

    constexpr SubtaskSet() = default;
    constexpr explicit SubtaskSet(std::uint64_t bits) : bits_(bits) {}

    constexpr bool test(SubtaskId i) const { return (bits_ >> i) & 1u; }
    constexpr void set(SubtaskId i) { bits_ |= std::uint64_t{1} << i; }
    constexpr void reset(SubtaskId i) { bits_ &= ~(std::uint64_t{1} << i); }
    constexpr std::uint64_t bits() const { return bits_; }
    constexpr int count() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool subset_of(SubtaskSet other) const { return (bits_ & ~other.bits_) == 0; }

    friend constexpr bool operator==(SubtaskSet, SubtaskSet) = default;
    friend constexpr SubtaskSet operator&(SubtaskSet a, SubtaskSet b) { return SubtaskSet(a.bits_ & b.bits_); }
    friend constexpr SubtaskSet operator|(SubtaskSet a, SubtaskSet b) { return SubtaskSet(a.bits_ | b.bits_); }

    /// Calls fn(id) for every member, in increasing id order.
    template <typename Fn>
    constexpr void for_each(Fn&& fn) const {
        for (std::uint64_t b = bits_; b != 0; b &= b - 1)
            fn(static_cast<SubtaskId>(std::countr_zero(b)));
    }

    std::vector<SubtaskId> to_vector() const;
    static SubtaskSet from_bools(std::span<const bool> v);

private:
    std::uint64_t bits_ = 0;
};

struct SubtaskSpec {
    SubtaskId id = 0;
    std::string label;
    int layer = 0;
    double reward = 0.0;
    bool distractor = false;
};

struct Literal {
    SubtaskId subtask = 0;
    bool negated = false;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct AndNode {
    int id = 0;
    std::vector<Literal> children;
};

struct BudgetRange {
    int lo = 0;
    int hi = 0;

    friend bool operator==(const BudgetRange&, const BudgetRange&) = default;
};

/// Layered AND-OR-NOT precondition structure over N subtasks.
///
/// Each subtask is an OR node whose inputs are AND nodes; each AND node is a
/// conjunction of (possibly negated) subtask completion literals. A subtask
/// with no AND inputs has an always-true precondition. Immutable once built.
class SubtaskGraph {
public:
    SubtaskGraph() = default;

    /// Validates and builds. Throws GraphError on any invariant violation.
    SubtaskGraph(std::vector<SubtaskSpec> subtasks, std::vector<AndNode> and_nodes,
                 std::vector<std::vector<int>> or_children, BudgetRange step_budget_range);

    int size() const { return static_cast<int>(subtasks_.size()); }
    const std::vector<SubtaskSpec>& subtasks() const { return subtasks_; }
    const SubtaskSpec& subtask(SubtaskId i) const { return subtasks_.at(static_cast<std::size_t>(i)); }
    const std::vector<AndNode>& and_nodes() const { return and_nodes_; }
    const AndNode& and_node(int j) const { return and_nodes_.at(static_cast<std::size_t>(and_index_.at(j))); }
    /// AND node ids feeding subtask i (empty for leaves).
    const std::vector<int>& or_children(SubtaskId i) const { return or_children_.at(static_cast<std::size_t>(i)); }
    BudgetRange step_budget_range() const { return budget_; }
    int num_layers() const { return num_layers_; }

    bool is_leaf(SubtaskId i) const { return or_children(i).empty(); }
    double reward(SubtaskId i) const { return rewards_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& rewards() const { return rewards_; }
    SubtaskSet all() const;

    /// Subtasks whose precondition mentions k through some AND node (Parent_k).
    const std::vector<SubtaskId>& parents(SubtaskId k) const { return parents_.at(static_cast<std::size_t>(k)); }
    /// Subtasks mentioned in i's precondition (Child set of i, flattened over AND nodes).
    const std::vector<SubtaskId>& precondition_children(SubtaskId i) const {
        return pre_children_.at(static_cast<std::size_t>(i));
    }

    /// Positive / negated literal masks of the AND nodes feeding subtask i.
    struct Clause {
        std::uint64_t pos = 0;
        std::uint64_t neg = 0;
    };
    std::span<const Clause> clauses(SubtaskId i) const {
        const auto& r = clause_range_[static_cast<std::size_t>(i)];
        return std::span<const Clause>(clauses_).subspan(r.first, r.second);
    }

private:
    std::vector<SubtaskSpec> subtasks_;
    std::vector<AndNode> and_nodes_;
    std::vector<std::vector<int>> or_children_;
    BudgetRange budget_;
    int num_layers_ = 0;

    std::vector<int> and_index_;  // and id -> position in and_nodes_, -1 if unused id
    std::vector<double> rewards_;
    std::vector<std::vector<SubtaskId>> parents_;
    std::vector<std::vector<SubtaskId>> pre_children_;
    std::vector<Clause> clauses_;
    std::vector<std::pair<std::size_t, std::size_t>> clause_range_;
};

/// Completion x, eligibility e, and remaining step budget.
struct TaskState {
    SubtaskSet completion;
    SubtaskSet eligibility;
    int remaining_steps = 0;

    friend bool operator==(const TaskState&, const TaskState&) = default;
};

/// e^i = OR_j AND_k xhat^{j,k}, conjoined with "not yet executed".
SubtaskSet compute_eligibility(const SubtaskGraph& graph, SubtaskSet completion);

/// Bool-vector overload; throws GraphError on a length mismatch.
std::vector<bool> compute_eligibility(const SubtaskGraph& graph, std::span<const bool> completion);

TaskState initial_state(const SubtaskGraph& graph, int budget);

struct ExecuteResult {
    TaskState state;
    double reward = 0.0;
    bool executed = false;
};

/// Fires subtask i. Pays r^i and marks it complete only when it is eligible;
/// otherwise the completion vector is unchanged. `duration` is subtracted from
/// the remaining budget (clamped at 0).
ExecuteResult execute_subtask(const SubtaskGraph& graph, const TaskState& state, SubtaskId i, int duration = 0);

/// Undiscounted sum.
double episode_return(std::span<const double> rewards);

/// r^T x.
double completion_value(const SubtaskGraph& graph, SubtaskSet completion);

}  // namespace sge
