#include "sge/policies.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <unordered_map>

namespace sge {

std::string_view policy_tag_name(PolicyTag t) {
    switch (t) {
        case PolicyTag::random: return "random";
        case PolicyTag::greedy: return "greedy";
        case PolicyTag::grprop: return "grprop";
        case PolicyTag::optimal: return "optimal";
        case PolicyTag::mcts: return "mcts";
        case PolicyTag::mcts_grprop: return "mcts+grprop";
    }
    return "?";
}

PolicyTag parse_policy_tag(std::string_view s) {
    for (auto t : {PolicyTag::random, PolicyTag::greedy, PolicyTag::grprop, PolicyTag::optimal, PolicyTag::mcts,
                   PolicyTag::mcts_grprop})
        if (policy_tag_name(t) == s) return t;
    throw std::invalid_argument("unknown policy '" + std::string(s) + "'");
}

std::optional<SubtaskId> random_choice(SubtaskSet eligible, Rng& rng) {
    const int n = eligible.count();
    if (n == 0) return std::nullopt;
    int k = uniform_int(rng, 0, n - 1);
    std::optional<SubtaskId> out;
    eligible.for_each([&](SubtaskId i) {
        if (k-- == 0) out = i;
    });
    return out;
}

std::optional<SubtaskId> greedy_choice(const SubtaskGraph& graph, const TaskState& state) {
    std::optional<SubtaskId> best;
    state.eligibility.for_each([&](SubtaskId i) {
        if (!best || graph.reward(i) > graph.reward(*best)) best = i;
    });
    return best;
}

SmoothParams smooth_params_for(Domain d) {
    return d == Domain::mining ? SmoothParams::mining() : SmoothParams::playground();
}

// ---------------------------------------------------------------------------

namespace {

struct StateKey {
    std::uint64_t completion;
    std::uint64_t map;
    friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const { return static_cast<std::size_t>(splitmix64(k.completion ^ splitmix64(k.map))); }
};

class Search {
public:
    explicit Search(const SubtaskGraph& graph, Domain domain) : graph_(graph), domain_(domain) {
        for (SubtaskId i = 0; i < graph.size(); ++i)
            if (graph.reward(i) > 0) positive_.push_back(i);
        for (SubtaskId i = 0; i < graph.size(); ++i) by_layer_.push_back(i);
        std::stable_sort(by_layer_.begin(), by_layer_.end(),
                         [&](SubtaskId a, SubtaskId b) { return graph.subtask(a).layer < graph.subtask(b).layer; });
        std::sort(positive_.begin(), positive_.end(),
                  [&](SubtaskId a, SubtaskId b) { return graph.reward(a) > graph.reward(b) || (graph.reward(a) == graph.reward(b) && a < b); });
    }

    void run(const Environment& env) {
        best_ = 0.0;
        best_seq_.clear();
        path_.clear();
        // Seed the incumbent with cheap heuristic rollouts so pruning starts early.
        const auto params = smooth_params_for(domain_);
        for (int heuristic = 0; heuristic < 2; ++heuristic) {
            Environment sim = env;
            std::vector<SubtaskId> seq;
            while (!sim.done()) {
                const auto a = heuristic == 0 ? grprop_policy(sim.graph(), sim.state(), params, GrpropMode::argmax(), nullptr)
                                              : greedy_choice(sim.graph(), sim.state());
                if (!a) break;
                const auto out = sim.execute(*a);
                if (out.executed) seq.push_back(*a);
            }
            const double ret = completion_value(graph_, sim.state().completion);
            if (ret > best_) {
                best_ = ret;
                best_seq_ = seq;
            }
        }
        dfs(env);
    }

    double best() const { return best_; }
    const std::vector<SubtaskId>& best_sequence() const { return best_seq_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    // Upper bound on options that can still complete: every option costs at
    // least one step, and in Playground every option after the first needs at
    // least one move because the agent's cell no longer holds a target.
    int max_options(int budget) const {
        if (domain_ == Domain::playground) return (budget + 1) / 2;
        return budget;
    }

    double top_k_bound(SubtaskSet completion, int budget) const {
        int k = max_options(budget);
        double b = 0.0;
        for (SubtaskId i : positive_) {
            if (k == 0) break;
            if (completion.test(i)) continue;
            b += graph_.reward(i);
            --k;
        }
        return b;
    }

    // Subtasks that may still fire: uncompleted, with a target on the map and
    // some clause whose negated literals are all uncompleted and whose
    // positive literals are completed or themselves still possible.
    SubtaskSet reachable(const Environment& env, const std::vector<std::vector<Cell>>& where) const {
        const std::uint64_t done = env.state().completion.bits();
        std::uint64_t ok = 0;
        for (SubtaskId i : by_layer_) {
            if (done >> i & 1) continue;
            if (where[static_cast<std::size_t>(i)].empty()) continue;
            bool sat = graph_.is_leaf(i);
            for (const auto& c : graph_.clauses(i)) {
                if ((c.neg & done) == 0 && (c.pos & ~(done | ok)) == 0) {
                    sat = true;
                    break;
                }
            }
            if (sat) ok |= std::uint64_t{1} << i;
        }
        SubtaskSet out;
        for (SubtaskId i = 0; i < graph_.size(); ++i)
            if (ok >> i & 1) out.set(i);
        return out;
    }

    // Fractional knapsack over reachable positive rewards. Each option costs
    // one interaction step plus the Manhattan distance to its target from the
    // closest place the agent could be standing beforehand: its current cell
    // or a target cell of another uncompleted subtask.
    double knapsack_bound(const Environment& env, SubtaskSet completion, int budget) const {
        const auto& map = env.map();
        std::vector<std::vector<Cell>> where(static_cast<std::size_t>(graph_.size()));
        for (int r = 0; r < map.height(); ++r)
            for (int c = 0; c < map.width(); ++c) {
                const ObjectType t = map.at({r, c});
                if (t == ObjectType::none) continue;
                for (SubtaskId i = 0; i < graph_.size(); ++i)
                    if (!completion.test(i) && env.option(i).target == t) where[static_cast<std::size_t>(i)].push_back({r, c});
            }
        const SubtaskSet live = reachable(env, where);

        struct Item {
            double reward;
            int cost;
        };
        std::vector<Item> items;
        for (SubtaskId i : positive_) {
            if (!live.test(i)) continue;
            int d = std::numeric_limits<int>::max();
            for (const Cell q : where[static_cast<std::size_t>(i)]) {
                d = std::min(d, manhattan(map.agent(), q));
                for (SubtaskId j = 0; j < graph_.size() && d > 0; ++j) {
                    if (j == i) continue;
                    for (const Cell p : where[static_cast<std::size_t>(j)]) d = std::min(d, manhattan(p, q));
                }
            }
            if (d + 1 <= budget) items.push_back({graph_.reward(i), d + 1});
        }
        std::sort(items.begin(), items.end(),
                  [](const Item& a, const Item& b) { return a.reward * b.cost > b.reward * a.cost; });
        double b = 0.0;
        int left = budget;
        for (const auto& it : items) {
            if (left <= 0) break;
            if (it.cost <= left) {
                b += it.reward;
                left -= it.cost;
            } else {
                b += it.reward * left / it.cost;
                left = 0;
            }
        }
        return b;
    }

    double bound(const Environment& env) const {
        const auto& st = env.state();
        const double cheap = top_k_bound(st.completion, st.remaining_steps);
        if (cheap <= 0.0) return 0.0;
        return std::min(cheap, knapsack_bound(env, st.completion, st.remaining_steps));
    }

    // Returns are scored as the completion value of the completed set, which
    // makes the optimum independent of the order rewards were summed in.
    void dfs(const Environment& env) {
        ++nodes_;
        const double acc = completion_value(graph_, env.state().completion);
        if (acc > best_) {
            best_ = acc;
            best_seq_ = path_;
        }
        if (env.done()) return;
        const auto& st = env.state();
        if (acc + bound(env) <= best_) return;

        const StateKey key{st.completion.bits(), env.map().hash()};
        auto [it, fresh] = seen_.try_emplace(key, st.remaining_steps);
        if (!fresh) {
            if (it->second >= st.remaining_steps) return;
            it->second = st.remaining_steps;
        }

        std::vector<SubtaskId> order = st.eligibility.to_vector();
        std::stable_sort(order.begin(), order.end(), [&](SubtaskId a, SubtaskId b) { return graph_.reward(a) > graph_.reward(b); });
        for (SubtaskId i : order) {
            Environment child = env;
            const auto out = child.execute(i);
            if (!out.executed) continue;
            path_.push_back(i);
            dfs(child);
            path_.pop_back();
        }
    }

    const SubtaskGraph& graph_;
    Domain domain_;
    std::vector<SubtaskId> positive_;
    std::vector<SubtaskId> by_layer_;
    std::unordered_map<StateKey, int, StateKeyHash> seen_;
    std::vector<SubtaskId> path_;
    std::vector<SubtaskId> best_seq_;
    double best_ = 0.0;
    std::uint64_t nodes_ = 0;
};

}  // namespace

OptimalResult optimal_search(const Environment& start, const OptimalOptions& options) {
    if (start.graph().size() > options.max_subtasks)
        throw IntractableError("optimal search refuses a graph with " + std::to_string(start.graph().size()) +
                               " subtasks (limit " + std::to_string(options.max_subtasks) + ")");
    Search search(start.graph(), start.domain());
    search.run(start.frozen_clone());
    return {search.best(), search.best_sequence(), search.nodes()};
}

void OptimalPolicy::begin_episode(const Environment& env, std::uint64_t) {
    plan_ = optimal_search(env, options_).sequence;
    next_ = 0;
}

std::optional<SubtaskId> OptimalPolicy::act(const Environment& env) {
    if (next_ < plan_.size() && env.state().eligibility.test(plan_[next_])) return plan_[next_++];
    if (env.state().eligibility.empty()) return std::nullopt;
    plan_ = optimal_search(env, options_).sequence;
    next_ = 0;
    if (plan_.empty()) return std::nullopt;
    return plan_[next_++];
}

}  // namespace sge
