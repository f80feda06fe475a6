// Command-line front end: corpus generation, policy runs, benchmark tables,
// MCTS budget curves and graph inspection.

#include "sge/bench.hpp"
#include "sge/generator.hpp"
#include "sge/graph_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    bool freeze = false;
    unsigned threads = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::optional<sge::Domain> domain_arg(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return sge::parse_domain(s);
}

sge::Corpus open_corpus(const std::string& dir, const std::string& domain) {
    auto corpus = sge::load_corpus(dir, domain_arg(domain));
    for (const auto& e : corpus.errors) std::cerr << "warning: skipped " << e << '\n';
    return corpus;
}

json corpus_manifest(const std::string& dir) {
    const fs::path p = fs::path(dir) / "manifest.json";
    if (!fs::exists(p)) return nullptr;
    try {
        std::ifstream in(p);
        auto j = json::parse(in);
        json summary;
        for (const char* key : {"preset", "seed", "domain", "count"})
            if (j.contains(key)) summary[key] = j[key];
        return summary;
    } catch (const std::exception&) {
        return nullptr;
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_run_manifest(const std::string& out_path, json m) {
    if (out_path.empty() || out_path == "-") return;
    write_text(out_path + ".manifest.json", m.dump(1) + "\n");
}

json options_json(const sge::BenchOptions& o, const sge::Corpus& corpus) {
    return {{"episodes", o.episodes},
            {"seed", o.seed},
            {"freeze_stochastic", o.freeze_stochastic},
            {"domain", std::string(sge::domain_name(corpus.domain))},
            {"graphs", corpus.graphs.size()},
            {"map", {o.world.height, o.world.width}},
            {"seed_mixing", "mix(seed, fnv1a(graph_id), episode)"}};
}

int cmd_gen(const std::string& preset_name, int count, std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    json manifest;
    manifest["preset"] = preset_name;
    manifest["seed"] = seed;
    json files = json::array();
    auto id_for = [](int i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "g%05d", i);
        return std::string(buf);
    };
    if (preset_name == "Mining") {
        sge::Rng rng(sge::mix_seed({seed, 0x6d696e65ull}));
        const auto graphs = sge::enumerate_mining_subgraphs(sge::mining_template(), rng, count);
        for (int i = 0; i < static_cast<int>(graphs.size()); ++i) {
            sge::write_graph(graphs[static_cast<std::size_t>(i)], fs::path(out_dir) / (id_for(i) + ".json"));
            files.push_back({{"id", id_for(i)}, {"split", i < 200 ? "train" : "test"}});
        }
        manifest["domain"] = "mining";
        manifest["count"] = graphs.size();
        manifest["split"] = {{"train", std::min<std::size_t>(200, graphs.size())},
                             {"test", graphs.size() > 200 ? graphs.size() - 200 : 0}};
    } else {
        const auto params = sge::preset(preset_name);
        for (int i = 0; i < count; ++i) {
            const auto gseed = sge::mix_seed({seed, static_cast<std::uint64_t>(i)});
            sge::write_graph(sge::generate_playground_graph(params, gseed), fs::path(out_dir) / (id_for(i) + ".json"));
            files.push_back({{"id", id_for(i)}, {"seed", gseed}});
        }
        manifest["domain"] = "playground";
        manifest["count"] = count;
    }
    manifest["graphs"] = files;
    write_text((fs::path(out_dir) / "manifest.json").string(), manifest.dump(1) + "\n");
    std::cerr << "wrote " << manifest["count"].get<std::size_t>() << " graphs to " << out_dir << '\n';
    return 0;
}

int cmd_inspect(const std::string& path, const std::string& domain) {
    const auto g = sge::read_graph(path);
    const auto d = domain_arg(domain).value_or(sge::Domain::playground);
    const auto p = sge::smooth_params_for(d);
    std::vector<double> zero(static_cast<std::size_t>(g.size()), 0.0);
    const auto scores = sge::grprop_scores(g, zero, p);
    const auto eligible = sge::compute_eligibility(g, sge::SubtaskSet{});

    std::printf("subtasks: %d  layers: %d  and-nodes: %zu  budget: [%d, %d]\n", g.size(), g.num_layers(),
                g.and_nodes().size(), g.step_budget_range().lo, g.step_budget_range().hi);
    std::printf("%4s %-10s %5s %9s %4s %4s %10s  precondition\n", "id", "label", "layer", "reward", "dist", "elig",
                "score@x=0");
    for (sge::SubtaskId i = 0; i < g.size(); ++i) {
        const auto& s = g.subtask(i);
        std::string pre;
        for (int a : g.or_children(i)) {
            if (!pre.empty()) pre += " | ";
            std::string clause;
            for (const auto& lit : g.and_node(a).children) {
                if (!clause.empty()) clause += " & ";
                clause += (lit.negated ? "!" : "") + g.subtask(lit.subtask).label;
            }
            pre += "(" + clause + ")";
        }
        if (pre.empty()) pre = "-";
        std::printf("%4d %-10s %5d %9.4f %4s %4s %10.6f  %s\n", i, s.label.c_str(), s.layer, s.reward,
                    s.distractor ? "yes" : "", eligible.test(i) ? "yes" : "", scores[static_cast<std::size_t>(i)],
                    pre.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subtask-graph execution engine and benchmark harness"};
    app.require_subcommand(1);
    Common common;
    app.add_flag("--freeze-stochastic", common.freeze, "Disable object motion in every environment");
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores)");

    // gen-graphs
    auto* gen = app.add_subcommand("gen-graphs", "Generate a graph corpus");
    std::string gen_preset = "D1", gen_out;
    int gen_count = 500;
    std::uint64_t gen_seed = 0;
    gen->add_option("--preset", gen_preset, "D1..D4, Base, Base-OR, Base+Distractor, Base+NOT, Base+NegDistractor, "
                                            "Base+Delayed or Mining")
        ->capture_default_str();
    gen->add_option("--count", gen_count, "Number of graphs (Mining: cap on subgraphs)")->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->required();

    // shared run options
    std::string graphs_dir, domain, out_path;
    sge::BenchOptions bopt;
    auto add_corpus_opts = [&](CLI::App* sub) {
        sub->add_option("--graphs", graphs_dir, "Corpus directory")->required();
        sub->add_option("--domain", domain, "playground | mining (default: from manifest)");
        sub->add_option("--episodes", bopt.episodes, "Episodes per graph")->capture_default_str();
        sub->add_option("--seed", bopt.seed)->capture_default_str();
        sub->add_option("--out", out_path, "Output CSV (default: stdout)");
        sub->add_option("--mcts-iterations", bopt.mcts_iterations, "MCTS iterations per decision")->capture_default_str();
        sub->add_option("--optimal-max-subtasks", bopt.optimal_max_subtasks)->capture_default_str();
        sub->add_option("--map-size", bopt.world.height, "Square map side")->capture_default_str();
    };

    auto* run = app.add_subcommand("run", "Run one policy, one row per episode");
    std::string run_policy = "grprop";
    add_corpus_opts(run);
    run->add_option("--policy", run_policy)->capture_default_str();

    auto* bench = app.add_subcommand("bench", "Mean return and normalized reward per graph and policy");
    std::string bench_policies = "random,greedy,grprop,optimal";
    bool timing = false;
    add_corpus_opts(bench);
    bench->add_option("--policies", bench_policies)->capture_default_str();
    bench->add_flag("--timing", timing, "Add a wall_time column (not reproducible)");

    auto* curve = app.add_subcommand("curve", "MCTS return against simulated-step budget");
    std::string curve_budgets = "1e3,1e4,1e5", curve_guide = "none";
    add_corpus_opts(curve);
    curve->add_option("--mcts-budgets", curve_budgets, "Simulated steps per decision")->capture_default_str();
    curve->add_option("--guide", curve_guide, "none | grprop")->capture_default_str();

    auto* inspect = app.add_subcommand("inspect", "Print a graph and its GRProp scores at x = 0");
    std::string inspect_graph;
    inspect->add_option("--graph", inspect_graph)->required();
    inspect->add_option("--domain", domain);

    CLI11_PARSE(app, argc, argv);

    try {
        bopt.world.width = bopt.world.height;
        bopt.freeze_stochastic = common.freeze;
        bopt.threads = common.threads;

        if (*gen) return cmd_gen(gen_preset, gen_count, gen_seed, gen_out);
        if (*inspect) return cmd_inspect(inspect_graph, domain);

        const auto corpus = open_corpus(graphs_dir, domain);
        json manifest = options_json(bopt, corpus);
        manifest["corpus"] = corpus_manifest(graphs_dir);
        manifest["skipped"] = corpus.errors.size();
        std::ostringstream os;

        if (*run) {
            const auto tag = sge::parse_policy_tag(run_policy);
            sge::write_episode_csv(os, sge::run_policy(corpus, tag, bopt));
            manifest["command"] = "run";
            manifest["policy"] = run_policy;
        } else if (*bench) {
            std::vector<sge::PolicyTag> tags;
            for (const auto& s : split(bench_policies, ',')) tags.push_back(sge::parse_policy_tag(s));
            const auto rows = sge::run_bench(corpus, tags, bopt);
            sge::write_bench_csv(os, rows, timing);
            manifest["command"] = "bench";
            manifest["policies"] = split(bench_policies, ',');
            json summary = json::object();
            for (const auto& s : sge::summarize(rows)) {
                json entry = {{"graphs", s.graphs}, {"mean_return", sge::format_real(s.mean_return)}};
                if (s.mean_normalized) entry["mean_normalized"] = sge::format_real(*s.mean_normalized);
                summary[std::string(sge::policy_tag_name(s.policy))] = entry;
            }
            manifest["summary"] = summary;
        } else if (*curve) {
            std::vector<long> budgets;
            for (const auto& s : split(curve_budgets, ',')) {
                const double v = std::stod(s);
                if (!(v >= 1)) throw std::invalid_argument("budget must be >= 1: " + s);
                budgets.push_back(static_cast<long>(v));
            }
            const auto guide = curve_guide == "grprop" ? sge::SearchGuide::grprop : sge::SearchGuide::none;
            if (curve_guide != "grprop" && curve_guide != "none")
                throw std::invalid_argument("--guide must be none or grprop");
            sge::write_curve_csv(os, sge::run_curve(corpus, budgets, guide, bopt));
            manifest["command"] = "curve";
            manifest["guide"] = curve_guide;
            manifest["budgets"] = budgets;
        }
        write_text(out_path, os.str());
        write_run_manifest(out_path, manifest);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
