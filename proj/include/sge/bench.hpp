#pragma once

#include "sge/gridworld.hpp"
#include "sge/mcts.hpp"
#include "sge/policies.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sge {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (R - R_min) / (R_max - R_min); nullopt when R_max == R_min. Throws
/// DataError when R_max < R_min.
std::optional<double> normalized_reward(double r, double r_min, double r_max);

struct CorpusEntry {
    std::string graph_id;  // file stem
    std::shared_ptr<const SubtaskGraph> graph;
};

struct Corpus {
    Domain domain = Domain::playground;
    std::vector<CorpusEntry> graphs;  // sorted by graph_id
    std::vector<std::string> errors;  // one line per unreadable file
};

/// Loads every *.json graph file of `dir` except manifest.json. Unreadable or
/// invalid files are reported in `errors` and skipped. The domain comes from
/// `domain` if given, else from dir/manifest.json, else Playground.
Corpus load_corpus(const std::filesystem::path& dir, std::optional<Domain> domain = std::nullopt);

/// Runs fn(i) for i in [0, n) on `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Per-episode seed: corpus seed, graph id and episode index mixed together.
std::uint64_t episode_seed(std::uint64_t corpus_seed, const std::string& graph_id, int episode);

struct BenchOptions {
    int episodes = 16;
    std::uint64_t seed = 0;
    bool freeze_stochastic = false;
    unsigned threads = 0;
    int optimal_max_subtasks = 16;
    long mcts_iterations = 1000;
    WorldParams world;
};

struct BenchRow {
    std::string graph_id;
    PolicyTag policy = PolicyTag::random;
    int episodes = 0;
    double mean_return = 0.0;
    double r_min = 0.0;                  // Random mean on the same episodes
    std::optional<double> r_max;         // Optimal mean; absent for Mining
    std::optional<double> normalized;    // absent for Mining or when undefined
    double wall_time = 0.0;              // seconds
    long simulated_steps = 0;
};

/// Builds the policy for a tag with domain defaults.
std::unique_ptr<Policy> make_policy(PolicyTag tag, Domain domain, const BenchOptions& options);

/// Every (graph, policy) cell over the same per-episode maps and budgets.
/// Random and Optimal means are always computed on Playground for
/// normalization (Optimal on frozen clones); Mining rows carry raw means.
/// Rows are sorted by graph_id, then by policy tag name.
std::vector<BenchRow> run_bench(const Corpus& corpus, const std::vector<PolicyTag>& policies, const BenchOptions& options);

/// Column-wise means over rows of one policy: {mean_return, mean normalized}.
struct PolicySummary {
    PolicyTag policy = PolicyTag::random;
    int graphs = 0;
    double mean_return = 0.0;
    std::optional<double> mean_normalized;
};
std::vector<PolicySummary> summarize(const std::vector<BenchRow>& rows);

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool with_timing = false);

struct EpisodeRow {
    std::string graph_id;
    int episode = 0;
    std::uint64_t seed = 0;
    int budget = 0;
    PolicyTag policy = PolicyTag::random;
    double total_return = 0.0;
    int steps_used = 0;
    int options = 0;
    long simulated_steps = 0;
    std::vector<SubtaskId> sequence;
};

/// One row per (graph, episode) for a single policy.
std::vector<EpisodeRow> run_policy(const Corpus& corpus, PolicyTag policy, const BenchOptions& options);
void write_episode_csv(std::ostream& os, const std::vector<EpisodeRow>& rows);

struct CurveRow {
    std::string graph_id;
    int episode = 0;
    std::uint64_t seed = 0;
    SearchGuide guide = SearchGuide::none;
    long budget = 0;  // simulated steps per decision
    long iterations = 0;
    long simulated_steps = 0;
    long rollout_steps = 0;
    double total_return = 0.0;
};

/// MCTS return against per-decision simulated-step budgets.
std::vector<CurveRow> run_curve(const Corpus& corpus, const std::vector<long>& step_budgets, SearchGuide guide,
                                const BenchOptions& options);
void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows);

/// Fixed-precision decimal used by every CSV writer.
std::string format_real(double v);

}  // namespace sge
