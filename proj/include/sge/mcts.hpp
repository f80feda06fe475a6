#pragma once

#include "sge/gridworld.hpp"
#include "sge/grprop.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace sge {

/// R / n + c * sqrt(ln N / n); +infinity for an unvisited node.
double ucb_score(double total_return, long visits, long total_iterations, double c);

enum class SearchGuide { none, grprop };

struct MctsConfig {
    double c_ucb = 2.0 * std::sqrt(2.0);
    int max_depth = 7;
    /// Per decision. At least one of the two budgets must be set.
    std::optional<long> iteration_budget;
    std::optional<long> simulated_step_budget;
    SearchGuide expansion = SearchGuide::none;
    SearchGuide rollout = SearchGuide::none;
    SmoothParams smooth = SmoothParams::playground();
    /// Simulate on a clone with object motion enabled and a fresh RNG stream
    /// instead of a frozen clone.
    bool resample_stochastic = false;
    std::uint64_t seed = 0;

    /// Depth 7 (Playground) / 10 (Mining), domain smoothing, guide applied to
    /// both expansion and rollout.
    static MctsConfig for_domain(Domain d, SearchGuide guide);
    void validate() const;
};

struct SearchStats {
    long iterations = 0;
    long simulated_steps = 0;  // all environment steps simulated (in-tree + rollout)
    long rollout_steps = 0;    // subset spent in rollouts

    SearchStats& operator+=(const SearchStats& o) {
        iterations += o.iterations;
        simulated_steps += o.simulated_steps;
        rollout_steps += o.rollout_steps;
        return *this;
    }
};

/// One search tree rooted at an environment snapshot.
class MctsTree {
public:
    struct Node {
        std::optional<SubtaskId> action;  // edge from parent; empty at the root
        int parent = -1;
        int depth = 0;
        std::vector<int> children;
        SubtaskSet untried;
        double total_return = 0.0;  // R_i
        long visits = 0;            // n_i
        double best_return = -INFINITY;
        double prefix_return = 0.0;  // reward collected from the root to this node
        Environment env;
    };

    MctsTree(const Environment& root, const MctsConfig& config);

    /// Runs selection, expansion, rollout and back-propagation once.
    void iterate();
    /// Iterates until the configured budget is spent. For the step budget an
    /// iteration that simulates nothing still counts as one step.
    void search();

    /// Child of the root to execute: highest best-seen return on frozen
    /// simulations (most visits when resampling), ties to more visits, then
    /// the lower subtask id. nullopt when the root has no children.
    std::optional<SubtaskId> best_action() const;

    const Node& root() const { return nodes_.front(); }
    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const SearchStats& stats() const { return stats_; }
    /// Sum of all rollout returns so far (back-propagation audit).
    double returns_sum() const { return returns_sum_; }

private:
    SubtaskId pick(const Environment& env, SubtaskSet candidates, SearchGuide guide);
    int select_child(const Node& n) const;

    MctsConfig config_;
    std::vector<Node> nodes_;
    SearchStats stats_;
    Rng rng_;
    double returns_sum_ = 0.0;
};

/// Receding-horizon MCTS: a fresh tree is searched before every option.
class MctsPolicy final : public Policy {
public:
    explicit MctsPolicy(MctsConfig config) : config_(config) {}
    std::string name() const override { return config_.expansion == SearchGuide::grprop ? "mcts+grprop" : "mcts"; }
    void begin_episode(const Environment& env, std::uint64_t seed) override;
    std::optional<SubtaskId> act(const Environment& env) override;
    const SearchStats& totals() const { return totals_; }

private:
    MctsConfig config_;
    SearchStats totals_;
    std::uint64_t seed_ = 0;
    int decision_ = 0;
};

struct MctsEpisode {
    EpisodeRecord record;
    SearchStats stats;
};

/// Plays one episode of receding-horizon MCTS.
MctsEpisode mcts_plan(const EpisodeConfig& config, const MctsConfig& mcfg);

}  // namespace sge
