#pragma once

#include "sge/graph.hpp"
#include "sge/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sge {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const RealRange&, const RealRange&) = default;
};

/// Parameters of the layered random graph generator.
///
/// Layer-indexed lists have one entry per layer (L entries). Edge lists that
/// describe the connection between layer l-1 and layer l have L-1 entries;
/// entry l-1 applies to the AND nodes feeding layer l. `tasks_per_layer`
/// counts every subtask of the layer, distractors included.
struct GenParams {
    std::string name;
    std::vector<int> tasks_per_layer;               // N_T
    std::vector<int> distractors_per_layer;         // N_D
    std::vector<IntRange> and_per_layer;            // N_A
    std::vector<IntRange> and_children_pos;         // N_ac+
    std::vector<IntRange> and_children_neg;         // N_ac-
    std::vector<IntRange> distractor_neg_parents;   // N_dp
    std::vector<IntRange> or_children;              // N_oc
    std::vector<RealRange> reward_per_layer;        // r
    BudgetRange step_budget{};                      // N_step
    int dedup_retries = 100;

    int num_layers() const { return static_cast<int>(tasks_per_layer.size()); }
    /// Throws GenerationError naming the first violated constraint.
    void validate() const;
};

/// One of D1, D2, D3, D4, Base, Base-OR, Base+Distractor, Base+NOT,
/// Base+NegDistractor, Base+Delayed. Throws GenerationError on unknown names.
GenParams preset(std::string_view name);
const std::vector<std::string>& preset_names();

/// Samples a layered AND-OR-NOT graph. N_A is drawn once per layer; the
/// per-node counts (N_ac+, N_ac-, N_oc, N_dp) are drawn per node and clamped to
/// the number of available candidates in the adjacent layer.
SubtaskGraph generate_playground_graph(const GenParams& params, Rng& rng);
SubtaskGraph generate_playground_graph(const GenParams& params, std::uint64_t seed);

/// The 26-subtask Mining recipe graph (labels are the subtask names).
const SubtaskGraph& mining_template();

/// Letter code (A..Z) of each Mining template subtask, by template id.
char mining_letter(SubtaskId template_id);

/// Template ids that every Mining subgraph keeps.
SubtaskSet mining_keep_set();

/// Mining step budget range used for every generated subgraph.
BudgetRange mining_budget_range();

/// Subgraphs of the template obtained by deleting subtasks that nothing
/// depends on (never deleting the keep-set), capped at `cap` distinct
/// subgraphs. Rewards are scaled per subtask by U[0.8, 1.2].
std::vector<SubtaskGraph> enumerate_mining_subgraphs(const SubtaskGraph& tmpl, Rng& rng, int cap = 640);

/// Restriction of `graph` to `keep` (must be closed under preconditions);
/// ids are re-densified in increasing order.
SubtaskGraph induced_subgraph(const SubtaskGraph& graph, SubtaskSet keep);

/// Smallest superset of `s` closed under "is a precondition child of".
SubtaskSet precondition_closure(const SubtaskGraph& graph, SubtaskSet s);

}  // namespace sge
