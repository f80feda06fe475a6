#pragma once

#include "sge/gridworld.hpp"
#include "sge/grprop.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sge {

enum class PolicyTag { random, greedy, grprop, optimal, mcts, mcts_grprop };

std::string_view policy_tag_name(PolicyTag t);
PolicyTag parse_policy_tag(std::string_view s);

/// Uniform over eligible subtasks; nullopt if none.
std::optional<SubtaskId> random_choice(SubtaskSet eligible, Rng& rng);

/// Eligible subtask with the largest reward, ties to the lowest id.
std::optional<SubtaskId> greedy_choice(const SubtaskGraph& graph, const TaskState& state);

class RandomPolicy final : public Policy {
public:
    std::string name() const override { return "random"; }
    void begin_episode(const Environment&, std::uint64_t seed) override { rng_.seed(seed); }
    std::optional<SubtaskId> act(const Environment& env) override { return random_choice(env.state().eligibility, rng_); }

private:
    Rng rng_;
};

class GreedyPolicy final : public Policy {
public:
    std::string name() const override { return "greedy"; }
    std::optional<SubtaskId> act(const Environment& env) override { return greedy_choice(env.graph(), env.state()); }
};

class GrpropPolicy final : public Policy {
public:
    explicit GrpropPolicy(SmoothParams params, GrpropMode mode = GrpropMode::argmax()) : params_(params), mode_(mode) {}
    std::string name() const override { return "grprop"; }
    void begin_episode(const Environment&, std::uint64_t seed) override { rng_.seed(seed); }
    std::optional<SubtaskId> act(const Environment& env) override {
        return grprop_policy(env.graph(), env.state(), params_, mode_, &rng_);
    }

private:
    SmoothParams params_;
    GrpropMode mode_;
    Rng rng_;
};

/// Default smoothing for a domain.
SmoothParams smooth_params_for(Domain d);

class IntractableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OptimalOptions {
    /// Refuse graphs larger than this.
    int max_subtasks = 13;
};

struct OptimalResult {
    double best_return = 0.0;
    std::vector<SubtaskId> sequence;
    std::uint64_t nodes = 0;
};

/// Exhaustive depth-first search over sequences of eligible options on a
/// frozen clone of `start`, charging each option its path cost.
///
/// Pruning: (1) branch-and-bound against the best return so far, with the
/// bound "sum of the k largest positive rewards still uncompleted", k being the
/// number of options that can still fit in the budget; (2) a state
/// (completion, map, agent cell) already reached with at least as much budget
/// is dominated, since the collected reward is a function of the completion
/// vector. Neither changes the optimum.
OptimalResult optimal_search(const Environment& start, const OptimalOptions& options = {});

/// Plans once per episode on the frozen initial state and replays the
/// witness, re-planning if the executed state diverges from the plan.
class OptimalPolicy final : public Policy {
public:
    explicit OptimalPolicy(OptimalOptions options = {}) : options_(options) {}
    std::string name() const override { return "optimal"; }
    void begin_episode(const Environment& env, std::uint64_t seed) override;
    std::optional<SubtaskId> act(const Environment& env) override;

private:
    OptimalOptions options_;
    std::vector<SubtaskId> plan_;
    std::size_t next_ = 0;
};

}  // namespace sge
