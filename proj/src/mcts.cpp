#include "sge/mcts.hpp"

#include "sge/policies.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sge {

double ucb_score(double total_return, long visits, long total_iterations, double c) {
    if (visits <= 0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(visits);
    const double big_n = static_cast<double>(std::max(1L, total_iterations));
    return total_return / n + c * std::sqrt(std::log(big_n) / n);
}

MctsConfig MctsConfig::for_domain(Domain d, SearchGuide guide) {
    MctsConfig c;
    c.max_depth = d == Domain::mining ? 10 : 7;
    c.smooth = d == Domain::mining ? SmoothParams::mining() : SmoothParams::playground();
    c.expansion = guide;
    c.rollout = guide;
    return c;
}

void MctsConfig::validate() const {
    if (!iteration_budget && !simulated_step_budget) throw std::invalid_argument("MCTS needs an iteration or step budget");
    if (iteration_budget && *iteration_budget <= 0) throw std::invalid_argument("MCTS iteration budget must be positive");
    if (simulated_step_budget && *simulated_step_budget <= 0)
        throw std::invalid_argument("MCTS step budget must be positive");
    if (!(c_ucb >= 0)) throw std::invalid_argument("c_ucb must be non-negative");
    if (max_depth < 1) throw std::invalid_argument("MCTS max depth must be at least 1");
    smooth.validate();
}

namespace {

MctsTree::Node make_node(Environment env, std::optional<SubtaskId> action, int parent, int depth, double prefix) {
    MctsTree::Node n{action, parent, depth, {}, SubtaskSet{}, 0.0, 0, -INFINITY, prefix, std::move(env)};
    if (!n.env.done()) n.untried = n.env.state().eligibility;
    return n;
}

}  // namespace

MctsTree::MctsTree(const Environment& root, const MctsConfig& config) : config_(config), rng_(config.seed) {
    config_.validate();
    Environment sim = config_.resample_stochastic ? root.reseeded_clone(mix_seed({config.seed, 0x73696dull}))
                                                  : root.frozen_clone();
    nodes_.push_back(make_node(std::move(sim), std::nullopt, -1, 0, 0.0));
}

SubtaskId MctsTree::pick(const Environment& env, SubtaskSet candidates, SearchGuide guide) {
    if (guide == SearchGuide::grprop) {
        const auto scores = grprop_scores(env.graph(), env.state(), config_.smooth);
        return *masked_argmax(scores, candidates);
    }
    return *random_choice(candidates, rng_);
}

int MctsTree::select_child(const Node& n) const {
    const long total = nodes_.front().visits;
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c : n.children) {
        const auto& ch = nodes_[static_cast<std::size_t>(c)];
        const double s = ucb_score(ch.total_return, ch.visits, total, config_.c_ucb);
        if (best < 0 || s > best_score) {
            best = c;
            best_score = s;
        }
    }
    return best;
}

void MctsTree::iterate() {
    // Selection.
    int cur = 0;
    while (true) {
        const auto& n = nodes_[static_cast<std::size_t>(cur)];
        if (n.env.done() || n.depth >= config_.max_depth || !n.untried.empty() || n.children.empty()) break;
        cur = select_child(n);
    }

    // Expansion.
    {
        auto& n = nodes_[static_cast<std::size_t>(cur)];
        if (!n.env.done() && n.depth < config_.max_depth && !n.untried.empty()) {
            const SubtaskId a = pick(n.env, n.untried, config_.expansion);
            n.untried.reset(a);
            Environment child = n.env;
            const auto out = child.execute(a);
            stats_.simulated_steps += out.steps_used;
            const double prefix = n.prefix_return + out.reward;
            const int depth = n.depth + 1;
            nodes_.push_back(make_node(std::move(child), a, cur, depth, prefix));
            const int id = static_cast<int>(nodes_.size()) - 1;
            nodes_[static_cast<std::size_t>(cur)].children.push_back(id);
            cur = id;
        }
    }

    // Rollout.
    const auto& leaf = nodes_[static_cast<std::size_t>(cur)];
    double ret = leaf.prefix_return;
    if (!leaf.env.done()) {
        Environment sim = leaf.env;
        while (!sim.done()) {
            const SubtaskId a = pick(sim, sim.state().eligibility, config_.rollout);
            const auto out = sim.execute(a);
            stats_.simulated_steps += out.steps_used;
            stats_.rollout_steps += out.steps_used;
            ret += out.reward;
        }
    }

    // Back-propagation.
    for (int i = cur; i >= 0; i = nodes_[static_cast<std::size_t>(i)].parent) {
        auto& n = nodes_[static_cast<std::size_t>(i)];
        n.total_return += ret;
        n.visits += 1;
        n.best_return = std::max(n.best_return, ret);
    }
    returns_sum_ += ret;
    stats_.iterations += 1;
}

void MctsTree::search() {
    // Revisiting a terminal leaf simulates nothing, so for the step budget
    // every iteration is charged at least one step when deciding to stop.
    long charged = 0;
    while (true) {
        if (config_.iteration_budget && stats_.iterations >= *config_.iteration_budget) break;
        if (config_.simulated_step_budget && charged >= *config_.simulated_step_budget) break;
        const long before = stats_.simulated_steps;
        iterate();
        charged += std::max(1L, stats_.simulated_steps - before);
    }
}

std::optional<SubtaskId> MctsTree::best_action() const {
    const auto& r = root();
    int best = -1;
    for (int c : r.children) {
        if (best < 0) {
            best = c;
            continue;
        }
        const auto& a = nodes_[static_cast<std::size_t>(c)];
        const auto& b = nodes_[static_cast<std::size_t>(best)];
        bool better;
        if (config_.resample_stochastic)
            better = a.visits > b.visits ||
                     (a.visits == b.visits && a.total_return / a.visits > b.total_return / b.visits) ||
                     (a.visits == b.visits && a.total_return / a.visits == b.total_return / b.visits && *a.action < *b.action);
        else
            better = a.best_return > b.best_return || (a.best_return == b.best_return && a.visits > b.visits) ||
                     (a.best_return == b.best_return && a.visits == b.visits && *a.action < *b.action);
        if (better) best = c;
    }
    if (best < 0) return std::nullopt;
    return nodes_[static_cast<std::size_t>(best)].action;
}

void MctsPolicy::begin_episode(const Environment&, std::uint64_t seed) {
    seed_ = seed;
    decision_ = 0;
    totals_ = {};
}

std::optional<SubtaskId> MctsPolicy::act(const Environment& env) {
    if (env.done()) return std::nullopt;
    MctsConfig cfg = config_;
    cfg.seed = mix_seed({config_.seed, seed_, static_cast<std::uint64_t>(decision_++)});
    MctsTree tree(env, cfg);
    tree.search();
    totals_ += tree.stats();
    return tree.best_action();
}

MctsEpisode mcts_plan(const EpisodeConfig& config, const MctsConfig& mcfg) {
    MctsPolicy policy(mcfg);
    MctsEpisode out;
    out.record = run_episode(config, policy);
    out.stats = policy.totals();
    return out;
}

}  // namespace sge
