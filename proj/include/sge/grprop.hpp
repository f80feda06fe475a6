#pragma once

#include "sge/graph.hpp"
#include "sge/rng.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sge {

/// Hyperparameters of the smoothed gates:
///   h_and(z) = alpha_and * sigmoid(z / beta_and)
///   h_or(z)  = alpha_or  * tanh(z / beta_or)
struct SmoothParams {
    double alpha_or = 1.0;
    double beta_or = 1.5;
    double alpha_and = 0.0;
    double beta_and = 0.5;

    static SmoothParams playground();
    static SmoothParams mining();
    void validate() const;
};

double sigmoid(double z);

/// h_and(sum(inputs) - |inputs| + 0.5). Throws std::invalid_argument when empty.
double smoothed_and(std::span<const double> inputs, const SmoothParams& p);

/// h_or(sum(inputs)). Throws std::invalid_argument when empty.
double smoothed_or(std::span<const double> inputs, const SmoothParams& p);

/// Smoothed eligibility evaluated at a real-valued completion vector.
struct SmoothedEval {
    std::vector<double> e_tilde;  // per subtask; 1 for leaves
    std::vector<double> y_and;    // per AND node, indexed by position in graph.and_nodes()
    /// Row-major N x N, jacobian[i * N + k] = d e_tilde_i / d x_k. Empty unless requested.
    std::vector<double> jacobian;
    double utility = 0.0;         // r^T (x + e_tilde) / 2
    std::vector<double> scores;   // d utility / d x. Empty unless requested.

    double d(int i, int k) const { return jacobian[static_cast<std::size_t>(i * static_cast<int>(e_tilde.size()) + k)]; }
};

/// One-hop smoothing: each e_tilde_i is computed from xhat(x) of its own
/// precondition children; intermediate e_tilde values are not substituted
/// for x. With `with_gradient`, the Jacobian and scores are filled too.
SmoothedEval smoothed_eligibility(const SubtaskGraph& graph, std::span<const double> completion, const SmoothParams& p,
                                  bool with_gradient = false);

/// Scores 1/2 r + 1/2 r^T (d e_tilde / d x), accumulated in reverse over the
/// OR -> AND -> literal edges without materialising the Jacobian.
std::vector<double> grprop_scores(const SubtaskGraph& graph, std::span<const double> completion, const SmoothParams& p);
std::vector<double> grprop_scores(const SubtaskGraph& graph, const TaskState& state, const SmoothParams& p);

/// Softmax of `scores / temperature` restricted to `mask`; zero outside it.
std::vector<double> masked_softmax(std::span<const double> scores, SubtaskSet mask, double temperature);

struct GrpropMode {
    enum class Kind { argmax, sample } kind = Kind::argmax;
    double temperature = 1.0;

    static GrpropMode argmax() { return {}; }
    static GrpropMode sample(double temperature = 1.0) { return {Kind::sample, temperature}; }
};

/// Highest-scoring member of `mask`, ties to the lowest id; nullopt if empty.
std::optional<SubtaskId> masked_argmax(std::span<const double> scores, SubtaskSet mask);

/// GRProp action among the eligible subtasks; nullopt when none is eligible.
/// `rng` is only consulted in sample mode.
std::optional<SubtaskId> grprop_policy(const SubtaskGraph& graph, const TaskState& state, const SmoothParams& p,
                                       GrpropMode mode = GrpropMode::argmax(), Rng* rng = nullptr);

}  // namespace sge
