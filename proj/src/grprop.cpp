#include "sge/grprop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sge {

SmoothParams SmoothParams::playground() { return {1.0, 1.5, 1.0 / sigmoid(0.25), 0.5}; }
SmoothParams SmoothParams::mining() { return {1.0, 2.0, 1.0 / sigmoid(0.25), 0.6}; }

void SmoothParams::validate() const {
    if (!(alpha_or > 0 && beta_or > 0 && alpha_and > 0 && beta_and > 0))
        throw std::invalid_argument("smoothing parameters must be strictly positive");
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double ez = std::exp(z);
    return ez / (1.0 + ez);
}

namespace {

double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

// Value and derivative of the gates w.r.t. their pre-activation argument.
struct Gate {
    double value;
    double slope;
};

Gate h_and(double z, const SmoothParams& p) {
    const double s = sigmoid(z / p.beta_and);
    return {p.alpha_and * s, p.alpha_and * s * (1.0 - s) / p.beta_and};
}

Gate h_or(double z, const SmoothParams& p) {
    const double t = std::tanh(z / p.beta_or);
    return {p.alpha_or * t, p.alpha_or * (1.0 - t * t) / p.beta_or};
}

double xhat(double x, bool negated) { return negated ? 1.0 - x : x; }

void check_length(const SubtaskGraph& graph, std::span<const double> x) {
    if (static_cast<int>(x.size()) != graph.size())
        throw GraphError("completion vector has length " + std::to_string(x.size()) + ", graph has " +
                         std::to_string(graph.size()) + " subtasks");
}

// AND pre-activations, indexed by position in graph.and_nodes().
std::vector<double> and_arguments(const SubtaskGraph& graph, std::span<const double> x) {
    std::vector<double> z;
    z.reserve(graph.and_nodes().size());
    for (const auto& a : graph.and_nodes()) {
        double s = 0.0;
        for (const auto& lit : a.children) s += xhat(x[static_cast<std::size_t>(lit.subtask)], lit.negated);
        z.push_back(s - static_cast<double>(a.children.size()) + 0.5);
    }
    return z;
}

std::vector<int> and_positions(const SubtaskGraph& graph) {
    int max_id = -1;
    for (const auto& a : graph.and_nodes()) max_id = std::max(max_id, a.id);
    std::vector<int> pos(static_cast<std::size_t>(max_id + 1), -1);
    for (std::size_t p = 0; p < graph.and_nodes().size(); ++p) pos[static_cast<std::size_t>(graph.and_nodes()[p].id)] = static_cast<int>(p);
    return pos;
}

}  // namespace

double smoothed_and(std::span<const double> inputs, const SmoothParams& p) {
    if (inputs.empty()) throw std::invalid_argument("smoothed_and needs at least one input");
    return h_and(sum(inputs) - static_cast<double>(inputs.size()) + 0.5, p).value;
}

double smoothed_or(std::span<const double> inputs, const SmoothParams& p) {
    if (inputs.empty()) throw std::invalid_argument("smoothed_or needs at least one input");
    return h_or(sum(inputs), p).value;
}

SmoothedEval smoothed_eligibility(const SubtaskGraph& graph, std::span<const double> x, const SmoothParams& p,
                                  bool with_gradient) {
    check_length(graph, x);
    const int n = graph.size();
    const auto z = and_arguments(graph, x);
    const auto pos = and_positions(graph);

    SmoothedEval out;
    out.y_and.reserve(z.size());
    std::vector<double> and_slope;
    and_slope.reserve(z.size());
    for (double zj : z) {
        const Gate g = h_and(zj, p);
        out.y_and.push_back(g.value);
        and_slope.push_back(g.slope);
    }

    out.e_tilde.assign(static_cast<std::size_t>(n), 1.0);
    if (with_gradient) {
        out.jacobian.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
        out.scores.assign(static_cast<std::size_t>(n), 0.0);
    }
    for (SubtaskId i = 0; i < n; ++i) {
        const auto& ors = graph.or_children(i);
        if (ors.empty()) continue;
        double s = 0.0;
        for (int j : ors) s += out.y_and[static_cast<std::size_t>(pos[static_cast<std::size_t>(j)])];
        const Gate g = h_or(s, p);
        out.e_tilde[static_cast<std::size_t>(i)] = g.value;
        if (!with_gradient) continue;
        for (int j : ors) {
            const auto jp = static_cast<std::size_t>(pos[static_cast<std::size_t>(j)]);
            const double dj = g.slope * and_slope[jp];
            for (const auto& lit : graph.and_nodes()[jp].children)
                out.jacobian[static_cast<std::size_t>(i * n + lit.subtask)] += lit.negated ? -dj : dj;
        }
    }

    double u = 0.0;
    for (SubtaskId i = 0; i < n; ++i) u += graph.reward(i) * (x[static_cast<std::size_t>(i)] + out.e_tilde[static_cast<std::size_t>(i)]);
    out.utility = 0.5 * u;

    if (with_gradient) {
        for (SubtaskId k = 0; k < n; ++k) {
            double acc = 0.0;
            for (SubtaskId i = 0; i < n; ++i) acc += graph.reward(i) * out.jacobian[static_cast<std::size_t>(i * n + k)];
            out.scores[static_cast<std::size_t>(k)] = 0.5 * graph.reward(k) + 0.5 * acc;
        }
    }
    return out;
}

std::vector<double> grprop_scores(const SubtaskGraph& graph, std::span<const double> x, const SmoothParams& p) {
    check_length(graph, x);
    const int n = graph.size();
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (SubtaskId k = 0; k < n; ++k) scores[static_cast<std::size_t>(k)] = 0.5 * graph.reward(k);

    const auto z = and_arguments(graph, x);
    const auto pos = and_positions(graph);
    std::vector<Gate> ands;
    ands.reserve(z.size());
    for (double zj : z) ands.push_back(h_and(zj, p));

    for (SubtaskId i = 0; i < n; ++i) {
        const double ri = graph.reward(i);
        const auto& ors = graph.or_children(i);
        if (ors.empty() || ri == 0.0) continue;
        double s = 0.0;
        for (int j : ors) s += ands[static_cast<std::size_t>(pos[static_cast<std::size_t>(j)])].value;
        const double upstream = 0.5 * ri * h_or(s, p).slope;
        for (int j : ors) {
            const auto jp = static_cast<std::size_t>(pos[static_cast<std::size_t>(j)]);
            const double g = upstream * ands[jp].slope;
            for (const auto& lit : graph.and_nodes()[jp].children)
                scores[static_cast<std::size_t>(lit.subtask)] += lit.negated ? -g : g;
        }
    }
    return scores;
}

std::vector<double> grprop_scores(const SubtaskGraph& graph, const TaskState& state, const SmoothParams& p) {
    std::vector<double> x(static_cast<std::size_t>(graph.size()));
    for (SubtaskId i = 0; i < graph.size(); ++i) x[static_cast<std::size_t>(i)] = state.completion.test(i) ? 1.0 : 0.0;
    return grprop_scores(graph, x, p);
}

std::vector<double> masked_softmax(std::span<const double> scores, SubtaskSet mask, double temperature) {
    if (!(temperature > 0)) throw std::invalid_argument("softmax temperature must be positive");
    std::vector<double> prob(scores.size(), 0.0);
    double hi = -std::numeric_limits<double>::infinity();
    mask.for_each([&](SubtaskId i) { hi = std::max(hi, scores[static_cast<std::size_t>(i)]); });
    double total = 0.0;
    mask.for_each([&](SubtaskId i) {
        const double v = std::exp((scores[static_cast<std::size_t>(i)] - hi) / temperature);
        prob[static_cast<std::size_t>(i)] = v;
        total += v;
    });
    if (total > 0)
        for (double& v : prob) v /= total;
    return prob;
}

std::optional<SubtaskId> masked_argmax(std::span<const double> scores, SubtaskSet mask) {
    std::optional<SubtaskId> best;
    mask.for_each([&](SubtaskId i) {
        if (!best || scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(*best)]) best = i;
    });
    return best;
}

std::optional<SubtaskId> grprop_policy(const SubtaskGraph& graph, const TaskState& state, const SmoothParams& p,
                                       GrpropMode mode, Rng* rng) {
    if (state.eligibility.empty()) return std::nullopt;
    const auto scores = grprop_scores(graph, state, p);
    if (mode.kind == GrpropMode::Kind::argmax) return masked_argmax(scores, state.eligibility);
    if (rng == nullptr) throw std::invalid_argument("grprop_policy: sample mode needs an rng");
    const auto prob = masked_softmax(scores, state.eligibility, mode.temperature);
    std::discrete_distribution<int> dist(prob.begin(), prob.end());
    return dist(*rng);
}

}  // namespace sge
