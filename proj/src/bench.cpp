#include "sge/bench.hpp"

#include "sge/graph_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace sge {

std::optional<double> normalized_reward(double r, double r_min, double r_max) {
    if (r_max < r_min) throw DataError("normalization range is inverted (R_max < R_min)");
    if (r_max == r_min) return std::nullopt;
    return (r - r_min) / (r_max - r_min);
}

Corpus load_corpus(const std::filesystem::path& dir, std::optional<Domain> domain) {
    namespace fs = std::filesystem;
    Corpus corpus;
    if (!fs::is_directory(dir)) throw DataError("corpus directory not found: " + dir.string());

    std::optional<Domain> manifest_domain;
    const fs::path manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        try {
            std::ifstream in(manifest);
            const auto j = nlohmann::json::parse(in);
            if (j.contains("domain")) manifest_domain = parse_domain(j.at("domain").get<std::string>());
        } catch (const std::exception& e) {
            corpus.errors.push_back(manifest.string() + ": " + e.what());
        }
    }
    corpus.domain = domain.value_or(manifest_domain.value_or(Domain::playground));

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        if (entry.path().filename() == "manifest.json") continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            corpus.graphs.push_back({f.stem().string(), std::make_shared<const SubtaskGraph>(read_graph(f))});
        } catch (const std::exception& e) {
            corpus.errors.push_back(f.string() + ": " + e.what());
        }
    }
    return corpus;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

std::uint64_t string_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

EpisodeConfig episode_config(const Corpus& corpus, const CorpusEntry& entry, std::uint64_t seed, const BenchOptions& o) {
    EpisodeConfig c;
    c.domain = corpus.domain;
    c.graph = entry.graph;
    c.seed = seed;
    c.freeze_stochastic = o.freeze_stochastic;
    c.world = o.world;
    return c;
}

std::string join_ids(const std::vector<SubtaskId>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(ids[i]);
    }
    return s;
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

struct Tally {
    double return_sum = 0.0;
    double seconds = 0.0;
    long simulated_steps = 0;
};

}  // namespace

std::uint64_t episode_seed(std::uint64_t corpus_seed, const std::string& graph_id, int episode) {
    return mix_seed({corpus_seed, string_hash(graph_id), static_cast<std::uint64_t>(episode)});
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::unique_ptr<Policy> make_policy(PolicyTag tag, Domain domain, const BenchOptions& options) {
    switch (tag) {
        case PolicyTag::random: return std::make_unique<RandomPolicy>();
        case PolicyTag::greedy: return std::make_unique<GreedyPolicy>();
        case PolicyTag::grprop: return std::make_unique<GrpropPolicy>(smooth_params_for(domain));
        case PolicyTag::optimal: return std::make_unique<OptimalPolicy>(OptimalOptions{options.optimal_max_subtasks});
        case PolicyTag::mcts:
        case PolicyTag::mcts_grprop: {
            auto cfg = MctsConfig::for_domain(domain, tag == PolicyTag::mcts ? SearchGuide::none : SearchGuide::grprop);
            cfg.iteration_budget = options.mcts_iterations;
            cfg.seed = options.seed;
            return std::make_unique<MctsPolicy>(cfg);
        }
    }
    throw std::invalid_argument("unknown policy tag");
}

std::vector<BenchRow> run_bench(const Corpus& corpus, const std::vector<PolicyTag>& requested,
                                const BenchOptions& options) {
    const bool normalize = corpus.domain == Domain::playground;
    std::vector<PolicyTag> tags = requested;
    auto ensure = [&](PolicyTag t) {
        if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
    };
    ensure(PolicyTag::random);
    if (normalize) ensure(PolicyTag::optimal);

    const std::size_t n_graphs = corpus.graphs.size();
    const std::size_t n_eps = static_cast<std::size_t>(std::max(0, options.episodes));
    const std::size_t n_tags = tags.size();
    std::vector<Tally> cells(n_graphs * n_eps * n_tags);

    parallel_for(n_graphs * n_eps, options.threads, [&](std::size_t job) {
        const std::size_t g = job / n_eps;
        const int e = static_cast<int>(job % n_eps);
        const auto& entry = corpus.graphs[g];
        const auto seed = episode_seed(options.seed, entry.graph_id, e);
        const auto config = episode_config(corpus, entry, seed, options);
        for (std::size_t t = 0; t < n_tags; ++t) {
            Tally& cell = cells[job * n_tags + t];
            const auto start = std::chrono::steady_clock::now();
            if (tags[t] == PolicyTag::optimal) {
                // Scalar optimum of the frozen episode start.
                const Environment env(config);
                cell.return_sum = optimal_search(env, OptimalOptions{options.optimal_max_subtasks}).best_return;
            } else {
                auto policy = make_policy(tags[t], corpus.domain, options);
                cell.return_sum = run_episode(config, *policy).total_return;
                if (auto* m = dynamic_cast<MctsPolicy*>(policy.get())) cell.simulated_steps = m->totals().simulated_steps;
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    });

    auto index_of = [&](PolicyTag t) {
        return static_cast<std::size_t>(std::find(tags.begin(), tags.end(), t) - tags.begin());
    };
    std::vector<BenchRow> rows;
    for (std::size_t g = 0; g < n_graphs; ++g) {
        std::vector<Tally> agg(n_tags);
        for (std::size_t e = 0; e < n_eps; ++e)
            for (std::size_t t = 0; t < n_tags; ++t) {
                const Tally& c = cells[(g * n_eps + e) * n_tags + t];
                agg[t].return_sum += c.return_sum;
                agg[t].seconds += c.seconds;
                agg[t].simulated_steps += c.simulated_steps;
            }
        const double denom = n_eps ? static_cast<double>(n_eps) : 1.0;
        const double r_min = agg[index_of(PolicyTag::random)].return_sum / denom;
        std::optional<double> r_max;
        if (normalize) r_max = agg[index_of(PolicyTag::optimal)].return_sum / denom;
        for (PolicyTag t : requested) {
            const auto& a = agg[index_of(t)];
            BenchRow row;
            row.graph_id = corpus.graphs[g].graph_id;
            row.policy = t;
            row.episodes = static_cast<int>(n_eps);
            row.mean_return = a.return_sum / denom;
            row.r_min = r_min;
            row.r_max = r_max;
            if (r_max && n_eps) {
                // Random on moving objects can edge past the frozen optimum;
                // such a cell is reported as undefined instead of failing.
                row.normalized = normalized_reward(row.mean_return, r_min, std::max(*r_max, r_min));
            }
            row.wall_time = a.seconds;
            row.simulated_steps = a.simulated_steps;
            rows.push_back(row);
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        if (a.graph_id != b.graph_id) return a.graph_id < b.graph_id;
        return policy_tag_name(a.policy) < policy_tag_name(b.policy);
    });
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const BenchRow& a, const BenchRow& b) {
                               return a.graph_id == b.graph_id && a.policy == b.policy;
                           }),
               rows.end());
    return rows;
}

std::vector<PolicySummary> summarize(const std::vector<BenchRow>& rows) {
    std::map<std::string_view, PolicySummary> by_tag;
    std::map<std::string_view, int> normalized_count;
    std::map<std::string_view, double> normalized_sum;
    for (const auto& r : rows) {
        const auto key = policy_tag_name(r.policy);
        auto& s = by_tag[key];
        s.policy = r.policy;
        s.graphs += 1;
        s.mean_return += r.mean_return;
        if (r.normalized) {
            normalized_count[key] += 1;
            normalized_sum[key] += *r.normalized;
        }
    }
    std::vector<PolicySummary> out;
    for (auto& [key, s] : by_tag) {
        s.mean_return /= s.graphs;
        if (normalized_count[key] > 0) s.mean_normalized = normalized_sum[key] / normalized_count[key];
        out.push_back(s);
    }
    return out;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool with_timing) {
    os << "graph_id,policy,episodes,mean_return,r_min,r_max,normalized,simulated_steps";
    if (with_timing) os << ",wall_time";
    os << '\n';
    for (const auto& r : rows) {
        os << r.graph_id << ',' << policy_tag_name(r.policy) << ',' << r.episodes << ',' << format_real(r.mean_return)
           << ',' << format_real(r.r_min) << ',' << opt_real(r.r_max) << ',' << opt_real(r.normalized) << ','
           << r.simulated_steps;
        if (with_timing) os << ',' << format_real(r.wall_time);
        os << '\n';
    }
}

std::vector<EpisodeRow> run_policy(const Corpus& corpus, PolicyTag tag, const BenchOptions& options) {
    const std::size_t n_eps = static_cast<std::size_t>(std::max(0, options.episodes));
    std::vector<EpisodeRow> rows(corpus.graphs.size() * n_eps);
    parallel_for(rows.size(), options.threads, [&](std::size_t job) {
        const auto& entry = corpus.graphs[job / n_eps];
        const int e = static_cast<int>(job % n_eps);
        const auto seed = episode_seed(options.seed, entry.graph_id, e);
        const auto config = episode_config(corpus, entry, seed, options);
        auto policy = make_policy(tag, corpus.domain, options);
        const auto rec = run_episode(config, *policy);
        EpisodeRow& row = rows[job];
        row.graph_id = entry.graph_id;
        row.episode = e;
        row.seed = seed;
        row.budget = rec.budget;
        row.policy = tag;
        row.total_return = rec.total_return;
        row.steps_used = rec.steps_used;
        row.options = static_cast<int>(rec.options.size());
        for (const auto& o : rec.options) row.sequence.push_back(o.subtask);
        if (auto* m = dynamic_cast<MctsPolicy*>(policy.get())) row.simulated_steps = m->totals().simulated_steps;
    });
    return rows;
}

void write_episode_csv(std::ostream& os, const std::vector<EpisodeRow>& rows) {
    os << "graph_id,episode,seed,budget,policy,return,steps_used,options,simulated_steps,sequence\n";
    for (const auto& r : rows)
        os << r.graph_id << ',' << r.episode << ',' << r.seed << ',' << r.budget << ',' << policy_tag_name(r.policy)
           << ',' << format_real(r.total_return) << ',' << r.steps_used << ',' << r.options << ',' << r.simulated_steps
           << ',' << join_ids(r.sequence) << '\n';
}

std::vector<CurveRow> run_curve(const Corpus& corpus, const std::vector<long>& step_budgets, SearchGuide guide,
                                const BenchOptions& options) {
    const std::size_t n_eps = static_cast<std::size_t>(std::max(0, options.episodes));
    const std::size_t n_b = step_budgets.size();
    std::vector<CurveRow> rows(corpus.graphs.size() * n_eps * n_b);
    parallel_for(rows.size(), options.threads, [&](std::size_t job) {
        const std::size_t b = job % n_b;
        const std::size_t ge = job / n_b;
        const auto& entry = corpus.graphs[ge / n_eps];
        const int e = static_cast<int>(ge % n_eps);
        const auto seed = episode_seed(options.seed, entry.graph_id, e);
        auto mcfg = MctsConfig::for_domain(corpus.domain, guide);
        mcfg.simulated_step_budget = step_budgets[b];
        mcfg.seed = options.seed;
        const auto res = mcts_plan(episode_config(corpus, entry, seed, options), mcfg);
        CurveRow& row = rows[job];
        row.graph_id = entry.graph_id;
        row.episode = e;
        row.seed = seed;
        row.guide = guide;
        row.budget = step_budgets[b];
        row.iterations = res.stats.iterations;
        row.simulated_steps = res.stats.simulated_steps;
        row.rollout_steps = res.stats.rollout_steps;
        row.total_return = res.record.total_return;
    });
    return rows;
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
    os << "graph_id,episode,seed,guide,step_budget,iterations,simulated_steps,rollout_steps,return\n";
    for (const auto& r : rows)
        os << r.graph_id << ',' << r.episode << ',' << r.seed << ',' << (r.guide == SearchGuide::grprop ? "grprop" : "none")
           << ',' << r.budget << ',' << r.iterations << ',' << r.simulated_steps << ',' << r.rollout_steps << ','
           << format_real(r.total_return) << '\n';
}

}  // namespace sge
