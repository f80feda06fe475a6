#include "sge/generator.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

namespace sge {

namespace {

std::vector<IntRange> ranges(std::vector<int> lo, std::vector<int> hi) {
    std::vector<IntRange> out;
    for (std::size_t i = 0; i < lo.size(); ++i) out.push_back({lo[i], hi.at(i)});
    return out;
}

std::vector<RealRange> real_ranges(std::vector<double> lo, std::vector<double> hi) {
    std::vector<RealRange> out;
    for (std::size_t i = 0; i < lo.size(); ++i) out.push_back({lo[i], hi.at(i)});
    return out;
}

std::string layer_label(int id) {
    std::string s;
    int v = id;
    do {
        s.insert(s.begin(), static_cast<char>('A' + v % 26));
        v = v / 26 - 1;
    } while (v >= 0);
    return s;
}

// Distinct (positive, negative) child counts an AND node can take over a
// layer of n subtasks once the drawn counts are clamped.
std::set<std::pair<int, int>> and_shapes(int n, IntRange pos, IntRange neg) {
    std::set<std::pair<int, int>> out;
    for (int p = pos.lo; p <= pos.hi; ++p)
        for (int q = neg.lo; q <= neg.hi; ++q) {
            const int pc = std::min(n, p);
            const int qc = std::min(n - pc, q);
            if (pc + qc > 0) out.insert({pc, qc});
        }
    return out;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        if (r > (1ULL << 40)) return 1ULL << 40;  // large enough to never cap a pool
    }
    return r;
}

std::uint64_t and_pattern_count(int n, const std::set<std::pair<int, int>>& shapes) {
    std::uint64_t total = 0;
    for (auto [p, q] : shapes) total += binomial(n, p) * binomial(n - p, q);
    return total;
}

// Every literal set with one of the given shapes over `lower`, in sorted order.
std::vector<std::vector<Literal>> enumerate_and_patterns(const std::vector<SubtaskId>& lower,
                                                         const std::set<std::pair<int, int>>& shapes) {
    const int n = static_cast<int>(lower.size());
    std::vector<std::vector<Literal>> out;
    for (auto [p, q] : shapes) {
        // Each element is 0 (absent), 1 (positive) or 2 (negated).
        std::vector<int> sign(static_cast<std::size_t>(n), 0);
        std::fill(sign.end() - p - q, sign.end() - q, 1);
        std::fill(sign.end() - q, sign.end(), 2);
        do {
            std::vector<Literal> lits;
            for (int k = 0; k < n; ++k)
                if (sign[static_cast<std::size_t>(k)] > 0)
                    lits.push_back({lower[static_cast<std::size_t>(k)], sign[static_cast<std::size_t>(k)] == 2});
            std::sort(lits.begin(), lits.end());
            out.push_back(std::move(lits));
        } while (std::next_permutation(sign.begin(), sign.end()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

GenParams base_params() {
    GenParams p;
    p.name = "Base";
    p.tasks_per_layer = {4, 3, 2, 1};
    p.distractors_per_layer = {0, 0, 0, 0};
    p.and_per_layer = ranges({3, 3, 2}, {4, 3, 3});
    p.and_children_pos = ranges({1, 1, 2}, {3, 2, 2});
    p.and_children_neg = ranges({0, 0, 0}, {0, 0, 0});
    p.distractor_neg_parents = ranges({0, 0, 0, 0}, {0, 0, 0, 0});
    p.or_children = ranges({1, 1, 1}, {2, 2, 2});
    p.reward_per_layer = real_ranges({0.1, 0.3, 0.7, 1.8}, {0.2, 0.4, 0.9, 2.0});
    p.step_budget = {40, 60};
    return p;
}

}  // namespace

void GenParams::validate() const {
    const int L = num_layers();
    auto fail = [&](const std::string& what) { throw GenerationError("invalid parameters '" + name + "': " + what); };
    if (L < 1) fail("at least one layer is required");
    if (static_cast<int>(distractors_per_layer.size()) != L) fail("N_D must have one entry per layer");
    if (static_cast<int>(reward_per_layer.size()) != L) fail("r must have one entry per layer");
    if (static_cast<int>(distractor_neg_parents.size()) != L) fail("N_dp must have one entry per layer");
    for (const auto* v : {&and_per_layer, &and_children_pos, &and_children_neg, &or_children})
        if (static_cast<int>(v->size()) != L - 1) fail("N_A, N_ac+, N_ac-, N_oc must have L-1 entries");
    if (step_budget.lo < 0 || step_budget.lo > step_budget.hi) fail("N_step range must satisfy 0 <= lo <= hi");
    if (dedup_retries < 1) fail("dedup retry budget must be positive");
    int total = 0;
    for (int l = 0; l < L; ++l) {
        const int nt = tasks_per_layer[static_cast<std::size_t>(l)];
        const int nd = distractors_per_layer[static_cast<std::size_t>(l)];
        if (nt < 1) fail("layer " + std::to_string(l) + " needs at least one subtask (N_T)");
        if (nd < 0 || nd > nt) fail("layer " + std::to_string(l) + ": N_D must lie in [0, N_T]");
        if (l == L - 1 && nd > 0) fail("distractors on the top layer have no parents to negate");
        const auto& r = reward_per_layer[static_cast<std::size_t>(l)];
        if (r.lo > r.hi) fail("reward range of layer " + std::to_string(l) + " has lo > hi");
        const auto& dp = distractor_neg_parents[static_cast<std::size_t>(l)];
        if (dp.lo < 0 || dp.lo > dp.hi) fail("N_dp range of layer " + std::to_string(l) + " is invalid");
        total += nt;
    }
    if (total > SubtaskSet::capacity) fail("more than 64 subtasks");
    for (int l = 1; l < L; ++l) {
        const std::size_t e = static_cast<std::size_t>(l - 1);
        const std::string at = " feeding layer " + std::to_string(l);
        const int lower_regular = tasks_per_layer[e] - distractors_per_layer[e];
        if (and_per_layer[e].lo < 1 || and_per_layer[e].lo > and_per_layer[e].hi) fail("N_A" + at + " must satisfy 1 <= lo <= hi");
        if (or_children[e].lo < 1 || or_children[e].lo > or_children[e].hi) fail("N_oc" + at + " must satisfy 1 <= lo <= hi");
        if (and_children_pos[e].lo < 0 || and_children_pos[e].lo > and_children_pos[e].hi) fail("N_ac+" + at + " is invalid");
        if (and_children_neg[e].lo < 0 || and_children_neg[e].lo > and_children_neg[e].hi) fail("N_ac-" + at + " is invalid");
        if (and_children_pos[e].hi + and_children_neg[e].hi < 1) fail("AND nodes" + at + " can never have a child");
        if (and_children_pos[e].lo + and_children_neg[e].lo > lower_regular)
            fail("AND nodes" + at + " need more children than layer " + std::to_string(l - 1) + " can supply");
        if (lower_regular < 1) fail("layer " + std::to_string(l - 1) + " has no non-distractor subtask to serve as AND child");
        if (tasks_per_layer[static_cast<std::size_t>(l)] - distractors_per_layer[static_cast<std::size_t>(l)] < 1)
            fail("layer " + std::to_string(l) + " has no non-distractor subtask");
    }
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"D1",   "D2",      "D3",              "D4",       "Base",
                                                   "Base-OR", "Base+Distractor", "Base+NOT", "Base+NegDistractor",
                                                   "Base+Delayed"};
    return names;
}

GenParams preset(std::string_view name) {
    GenParams p;
    p.name = std::string(name);
    if (name == "D1") {
        p.tasks_per_layer = {6, 4, 2, 1};
        p.distractors_per_layer = {2, 1, 0, 0};
        p.and_per_layer = ranges({3, 3, 2}, {5, 4, 2});
        p.and_children_pos = ranges({1, 1, 1}, {3, 3, 3});
        p.and_children_neg = ranges({0, 0, 0}, {2, 2, 1});
        p.distractor_neg_parents = ranges({0, 0, 0, 0}, {3, 3, 0, 0});
        p.or_children = ranges({1, 1, 1}, {2, 2, 2});
        p.reward_per_layer = real_ranges({0.1, 0.3, 0.7, 1.8}, {0.2, 0.4, 0.9, 2.0});
        p.step_budget = {48, 72};
    } else if (name == "D2") {
        p.tasks_per_layer = {7, 5, 2, 1};
        p.distractors_per_layer = {2, 2, 0, 0};
        p.and_per_layer = ranges({4, 3, 2}, {5, 4, 2});
        p.and_children_pos = ranges({1, 1, 1}, {3, 3, 3});
        p.and_children_neg = ranges({0, 0, 0}, {2, 2, 1});
        p.distractor_neg_parents = ranges({0, 0, 0, 0}, {3, 3, 0, 0});
        p.or_children = ranges({1, 1, 1}, {2, 2, 2});
        p.reward_per_layer = real_ranges({0.1, 0.3, 0.7, 1.8}, {0.2, 0.4, 0.9, 2.0});
        p.step_budget = {52, 78};
    } else if (name == "D3") {
        p.tasks_per_layer = {5, 4, 4, 2, 1};
        p.distractors_per_layer = {1, 1, 1, 0, 0};
        p.and_per_layer = ranges({3, 3, 3, 2}, {5, 4, 4, 2});
        p.and_children_pos = ranges({1, 1, 1, 1}, {3, 3, 3, 3});
        p.and_children_neg = ranges({0, 0, 0, 0}, {2, 2, 1, 1});
        p.distractor_neg_parents = ranges({0, 0, 0, 0, 0}, {3, 3, 3, 0, 0});
        p.or_children = ranges({1, 1, 1, 1}, {2, 2, 2, 2});
        p.reward_per_layer = real_ranges({0.1, 0.3, 0.6, 1.0, 2.0}, {0.2, 0.4, 0.7, 1.2, 2.2});
        p.step_budget = {56, 84};
    } else if (name == "D4") {
        p.tasks_per_layer = {4, 3, 3, 3, 2, 1};
        p.distractors_per_layer = {0, 0, 0, 0, 0, 0};
        p.and_per_layer = ranges({3, 3, 3, 3, 2}, {5, 4, 4, 4, 2});
        p.and_children_pos = ranges({1, 1, 1, 1, 1}, {3, 3, 3, 3, 3});
        p.and_children_neg = ranges({0, 0, 0, 0, 0}, {2, 2, 1, 1, 0});
        p.distractor_neg_parents = ranges({0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0});
        p.or_children = ranges({1, 1, 1, 1, 1}, {2, 2, 2, 2, 2});
        p.reward_per_layer = real_ranges({0.1, 0.3, 0.6, 1.0, 1.4, 2.4}, {0.2, 0.4, 0.7, 1.2, 1.6, 2.6});
        p.step_budget = {56, 84};
    } else if (name == "Base") {
        p = base_params();
    } else if (name == "Base-OR") {
        p = base_params();
        p.or_children = ranges({1, 1, 1}, {1, 1, 1});
    } else if (name == "Base+Distractor") {
        // Distractors without parents: N_dp stays zero.
        p = base_params();
        p.distractors_per_layer = {2, 1, 0, 0};
    } else if (name == "Base+NOT") {
        p = base_params();
        p.and_children_neg = ranges({0, 0, 0}, {3, 2, 2});
    } else if (name == "Base+NegDistractor") {
        p = base_params();
        p.distractors_per_layer = {2, 1, 0, 0};
        p.distractor_neg_parents = ranges({0, 0, 0, 0}, {3, 3, 0, 0});
    } else if (name == "Base+Delayed") {
        p = base_params();
        p.reward_per_layer = real_ranges({0, 0, 0, 1.6}, {0, 0, 0, 1.8});
    } else {
        throw GenerationError("unknown preset '" + std::string(name) + "'");
    }
    p.name = std::string(name);
    return p;
}

SubtaskGraph generate_playground_graph(const GenParams& params, std::uint64_t seed) {
    Rng rng(seed);
    return generate_playground_graph(params, rng);
}

SubtaskGraph generate_playground_graph(const GenParams& params, Rng& rng) {
    params.validate();
    const int L = params.num_layers();

    // Lay out ids layer by layer; distractor positions within a layer are random.
    std::vector<SubtaskSpec> subtasks;
    std::vector<std::vector<SubtaskId>> regular(static_cast<std::size_t>(L)), distractors(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        const auto lu = static_cast<std::size_t>(l);
        const int nt = params.tasks_per_layer[lu];
        std::vector<bool> is_d(static_cast<std::size_t>(nt), false);
        std::fill(is_d.begin(), is_d.begin() + params.distractors_per_layer[lu], true);
        std::shuffle(is_d.begin(), is_d.end(), rng);
        for (int k = 0; k < nt; ++k) {
            SubtaskSpec s;
            s.id = static_cast<SubtaskId>(subtasks.size());
            s.label = layer_label(s.id);
            s.layer = l;
            s.distractor = is_d[static_cast<std::size_t>(k)];
            s.reward = uniform_real(rng, params.reward_per_layer[lu].lo, params.reward_per_layer[lu].hi);
            (s.distractor ? distractors : regular)[lu].push_back(s.id);
            subtasks.push_back(std::move(s));
        }
    }

    std::vector<AndNode> and_nodes;
    std::vector<std::vector<int>> or_children(subtasks.size());

    for (int l = 1; l < L; ++l) {
        const auto e = static_cast<std::size_t>(l - 1);
        const auto& lower = regular[e];
        const int n_lower = static_cast<int>(lower.size());

        // Pool of distinct AND nodes for this layer. Child counts are clamped to
        // the layer, so the number of distinct literal sets can fall below N_A;
        // the pool is then capped at that number. When the pool would use more
        // than half of the available sets they are enumerated and shuffled
        // instead of rejection-sampled.
        const auto shapes = and_shapes(n_lower, params.and_children_pos[e], params.and_children_neg[e]);
        const std::uint64_t capacity = and_pattern_count(n_lower, shapes);
        int n_and = uniform_int(rng, params.and_per_layer[e].lo, params.and_per_layer[e].hi);
        if (static_cast<std::uint64_t>(n_and) > capacity) n_and = static_cast<int>(capacity);
        std::vector<std::vector<Literal>> pool;
        if (2 * static_cast<std::uint64_t>(n_and) > capacity) {
            pool = enumerate_and_patterns(lower, shapes);
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(static_cast<std::size_t>(n_and));
        }
        std::set<std::vector<Literal>> seen;
        for (int a = static_cast<int>(pool.size()); a < n_and; ++a) {
            bool placed = false;
            for (int attempt = 0; attempt < params.dedup_retries && !placed; ++attempt) {
                const int npos = std::min(n_lower, uniform_int(rng, params.and_children_pos[e].lo, params.and_children_pos[e].hi));
                const int nneg =
                    std::min(n_lower - npos, uniform_int(rng, params.and_children_neg[e].lo, params.and_children_neg[e].hi));
                if (npos + nneg == 0) continue;
                std::vector<SubtaskId> pick = lower;
                std::shuffle(pick.begin(), pick.end(), rng);
                std::vector<Literal> lits;
                for (int k = 0; k < npos + nneg; ++k) lits.push_back({pick[static_cast<std::size_t>(k)], k >= npos});
                std::sort(lits.begin(), lits.end());
                if (seen.insert(lits).second) {
                    pool.push_back(std::move(lits));
                    placed = true;
                }
            }
            if (!placed)
                throw GenerationError("preset '" + params.name + "': could not sample " + std::to_string(n_and) +
                                      " distinct AND nodes feeding layer " + std::to_string(l) + " after " +
                                      std::to_string(params.dedup_retries) + " retries (duplicated AND nodes)");
        }

        // Each OR node of the layer picks distinct disjuncts from the pool.
        std::vector<int> pool_to_id(pool.size(), -1);
        std::vector<std::size_t> used_order;
        std::vector<std::pair<SubtaskId, std::vector<std::size_t>>> picks;
        for (SubtaskId i : regular[static_cast<std::size_t>(l)]) {
            const int k = std::min(static_cast<int>(pool.size()),
                                   uniform_int(rng, params.or_children[e].lo, params.or_children[e].hi));
            std::vector<std::size_t> idx(pool.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(static_cast<std::size_t>(k));
            std::sort(idx.begin(), idx.end());
            for (auto p : idx)
                if (pool_to_id[p] < 0) {
                    pool_to_id[p] = 0;
                    used_order.push_back(p);
                }
            picks.emplace_back(i, std::move(idx));
        }
        std::sort(used_order.begin(), used_order.end());

        // Distractors of the lower layer attach as NOT children of used AND nodes.
        for (SubtaskId d : distractors[e]) {
            const int ndp = std::min(static_cast<int>(used_order.size()),
                                     uniform_int(rng, params.distractor_neg_parents[e].lo, params.distractor_neg_parents[e].hi));
            std::vector<std::size_t> targets = used_order;
            std::shuffle(targets.begin(), targets.end(), rng);
            for (int k = 0; k < ndp; ++k) {
                auto& lits = pool[targets[static_cast<std::size_t>(k)]];
                lits.push_back({d, true});
                std::sort(lits.begin(), lits.end());
            }
        }

        for (auto p : used_order) {
            pool_to_id[p] = static_cast<int>(and_nodes.size());
            and_nodes.push_back({pool_to_id[p], pool[p]});
        }
        for (auto& [i, idx] : picks) {
            auto& ors = or_children[static_cast<std::size_t>(i)];
            for (auto p : idx) ors.push_back(pool_to_id[p]);
        }
    }

    try {
        return SubtaskGraph(std::move(subtasks), std::move(and_nodes), std::move(or_children), params.step_budget);
    } catch (const GraphError& err) {
        throw GenerationError("preset '" + params.name + "' produced an invalid graph: " + err.what());
    }
}

// ---------------------------------------------------------------------------
// Mining

namespace {

struct Recipe {
    char letter;
    const char* label;
    double reward;
    // Disjunction of conjunctions over letters.
    std::vector<std::string> any_of;
};

// Two precondition forms: ingredients for crafting, tools for mining.
const std::vector<Recipe>& mining_recipes() {
    static const std::vector<Recipe> recipes = {
        {'A', "get wood", 0.2, {}},
        {'B', "get stone", 0.05, {}},
        {'C', "get string", 0.08, {}},
        {'D', "make firewood", 0.44, {"A"}},
        {'E', "make stick", 0.2, {"A"}},
        {'F', "make stone pickaxe", 0.3, {"BE"}},
        {'G', "get coal", 0, {"F"}},
        {'H', "get iron", 0.08, {"F"}},
        {'I', "smelt iron", 0.63, {"HJ"}},
        {'J', "light furnace", 0.8, {"D", "G"}},
        {'K', "make iron pickaxe", 0.6, {"EI"}},
        {'L', "get silver", 0.9, {"F"}},
        {'M', "get gold", 0.94, {"K"}},
        {'N', "get diamond", 1.5, {"K"}},
        {'O', "get pork", 0.26, {}},
        {'P', "cook pork", 0.27, {"JO"}},
        {'Q', "make arrow", 0.79, {"BE"}},
        {'R', "make bow", 0.17, {"CE"}},
        {'S', "smelt silver", 1.5, {"JL"}},
        {'T', "smelt gold", 1.8, {"JM"}},
        {'U', "make silverware", 2.35, {"ES"}},
        {'V', "make goldware", 2.4, {"ET"}},
        {'W', "make bracelet", 2.35, {"S", "T"}},
        {'X', "make earrings", 4.1, {"NS"}},
        {'Y', "make ring", 3.54, {"NT"}},
        {'Z', "make necklace", 5.0, {"NST"}},
    };
    return recipes;
}

SubtaskGraph build_mining_template() {
    const auto& rs = mining_recipes();
    std::map<char, SubtaskId> id_of;
    for (std::size_t i = 0; i < rs.size(); ++i) id_of[rs[i].letter] = static_cast<SubtaskId>(i);

    // Longest-path depth; recipes are not listed in dependency order.
    std::vector<int> layer(rs.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (const auto& conj : rs[i].any_of)
                for (char c : conj) {
                    const int want = layer[static_cast<std::size_t>(id_of.at(c))] + 1;
                    if (want > layer[i]) {
                        layer[i] = want;
                        changed = true;
                    }
                }
    }

    std::vector<SubtaskSpec> subtasks;
    std::vector<AndNode> ands;
    std::vector<std::vector<int>> ors(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        subtasks.push_back({static_cast<SubtaskId>(i), rs[i].label, layer[i], rs[i].reward, false});
        for (const auto& conj : rs[i].any_of) {
            AndNode a{static_cast<int>(ands.size()), {}};
            for (char c : conj) a.children.push_back({id_of.at(c), false});
            ors[i].push_back(a.id);
            ands.push_back(std::move(a));
        }
    }
    return SubtaskGraph(std::move(subtasks), std::move(ands), std::move(ors), mining_budget_range());
}

}  // namespace

BudgetRange mining_budget_range() { return {70, 100}; }

const SubtaskGraph& mining_template() {
    static const SubtaskGraph g = build_mining_template();
    return g;
}

char mining_letter(SubtaskId template_id) {
    return mining_recipes().at(static_cast<std::size_t>(template_id)).letter;
}

SubtaskSet mining_keep_set() {
    SubtaskSet s;
    const auto& rs = mining_recipes();
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (std::string_view("ABDEFGHIKL").find(rs[i].letter) != std::string_view::npos) s.set(static_cast<SubtaskId>(i));
    return s;
}

SubtaskSet precondition_closure(const SubtaskGraph& graph, SubtaskSet s) {
    SubtaskSet out = s;
    std::vector<SubtaskId> stack = s.to_vector();
    while (!stack.empty()) {
        const SubtaskId i = stack.back();
        stack.pop_back();
        for (SubtaskId k : graph.precondition_children(i))
            if (!out.test(k)) {
                out.set(k);
                stack.push_back(k);
            }
    }
    return out;
}

SubtaskGraph induced_subgraph(const SubtaskGraph& graph, SubtaskSet keep) {
    if (!(precondition_closure(graph, keep) == keep))
        throw GraphError("induced_subgraph: kept set is not closed under preconditions");
    std::vector<SubtaskId> new_id(static_cast<std::size_t>(graph.size()), -1);
    std::vector<SubtaskSpec> subtasks;
    keep.for_each([&](SubtaskId i) {
        new_id[static_cast<std::size_t>(i)] = static_cast<SubtaskId>(subtasks.size());
        auto s = graph.subtask(i);
        s.id = static_cast<SubtaskId>(subtasks.size());
        subtasks.push_back(std::move(s));
    });
    std::vector<AndNode> ands;
    std::map<int, int> and_id;
    std::vector<std::vector<int>> ors(subtasks.size());
    keep.for_each([&](SubtaskId i) {
        for (int j : graph.or_children(i)) {
            auto [it, fresh] = and_id.try_emplace(j, static_cast<int>(ands.size()));
            if (fresh) {
                AndNode a{it->second, {}};
                for (const auto& lit : graph.and_node(j).children)
                    a.children.push_back({new_id[static_cast<std::size_t>(lit.subtask)], lit.negated});
                ands.push_back(std::move(a));
            }
            ors[static_cast<std::size_t>(new_id[static_cast<std::size_t>(i)])].push_back(it->second);
        }
    });
    return SubtaskGraph(std::move(subtasks), std::move(ands), std::move(ors), graph.step_budget_range());
}

std::vector<SubtaskGraph> enumerate_mining_subgraphs(const SubtaskGraph& tmpl, Rng& rng, int cap) {
    const SubtaskSet keep = precondition_closure(tmpl, mining_keep_set());
    std::vector<SubtaskId> optional;
    for (SubtaskId i = 0; i < tmpl.size(); ++i)
        if (!keep.test(i)) optional.push_back(i);

    // A kept set is reachable by deleting parentless nodes iff it is closed
    // under preconditions, so sampling a random closed superset of the keep-set
    // covers exactly the reachable subgraphs.
    std::vector<SubtaskSet> sets;
    std::unordered_set<std::uint64_t> seen;
    const int max_attempts = 200 * std::max(cap, 1);
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(sets.size()) < cap; ++attempt) {
        SubtaskSet s = keep;
        const double p = uniform_real(rng, 0.0, 1.0);
        for (SubtaskId i : optional)
            if (std::bernoulli_distribution(p)(rng)) s.set(i);
        s = precondition_closure(tmpl, s);
        if (seen.insert(s.bits()).second) sets.push_back(s);
    }

    std::vector<SubtaskGraph> out;
    out.reserve(sets.size());
    for (SubtaskSet s : sets) {
        const SubtaskGraph sub = induced_subgraph(tmpl, s);
        auto subtasks = sub.subtasks();
        for (auto& st : subtasks) st.reward *= uniform_real(rng, 0.8, 1.2);
        std::vector<std::vector<int>> ors;
        for (SubtaskId i = 0; i < sub.size(); ++i) ors.push_back(sub.or_children(i));
        out.emplace_back(std::move(subtasks), sub.and_nodes(), std::move(ors), sub.step_budget_range());
    }
    return out;
}

}  // namespace sge
