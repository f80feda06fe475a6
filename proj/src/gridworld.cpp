#include "sge/gridworld.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

namespace sge {

std::string_view domain_name(Domain d) { return d == Domain::playground ? "playground" : "mining"; }

Domain parse_domain(std::string_view s) {
    if (s == "playground") return Domain::playground;
    if (s == "mining") return Domain::mining;
    throw ConfigError("unknown domain '" + std::string(s) + "'");
}

namespace {

struct ObjectInfo {
    ObjectType type;
    std::string_view name;
    char glyph;
    bool impassable;
};

constexpr std::array<ObjectInfo, 24> object_table = {{
    {ObjectType::cow, "Cow", 'c', false},
    {ObjectType::milk, "Milk", 'm', false},
    {ObjectType::duck, "Duck", 'd', false},
    {ObjectType::egg, "Egg", 'e', false},
    {ObjectType::diamond, "Diamond", '*', false},
    {ObjectType::heart, "Heart", 'h', false},
    {ObjectType::box, "Box", 'b', false},
    {ObjectType::meat, "Meat", 'M', false},
    {ObjectType::block, "Block", '#', true},
    {ObjectType::ice, "Ice", 'i', false},
    {ObjectType::mountain, "Mountain", '^', true},
    {ObjectType::water, "Water", '~', true},
    {ObjectType::workspace, "Work space", 'W', false},
    {ObjectType::furnace, "Furnace", 'F', false},
    {ObjectType::tree, "Tree", 'T', false},
    {ObjectType::stone, "Stone", 's', false},
    {ObjectType::grass, "Grass", 'g', false},
    {ObjectType::pig, "Pig", 'p', false},
    {ObjectType::coal, "Coal", 'o', false},
    {ObjectType::iron, "Iron", 'I', false},
    {ObjectType::silver, "Silver", 'S', false},
    {ObjectType::gold, "Gold", 'G', false},
    {ObjectType::jeweler, "Jeweler's shop", 'J', false},
    {ObjectType::lumber, "Lumber shop", 'L', false},
}};

const ObjectInfo& info(ObjectType t) {
    const auto i = static_cast<std::size_t>(t);
    if (t == ObjectType::none || i >= object_table.size()) throw ConfigError("no object info for empty cell");
    return object_table[i];
}

constexpr std::array<ObjectType, 10> playground_objects = {
    ObjectType::cow,   ObjectType::milk, ObjectType::duck, ObjectType::egg,   ObjectType::diamond,
    ObjectType::heart, ObjectType::box,  ObjectType::meat, ObjectType::block, ObjectType::ice};

constexpr std::array<ObjectType, 15> mining_objects = {
    ObjectType::mountain, ObjectType::water,  ObjectType::workspace, ObjectType::furnace, ObjectType::tree,
    ObjectType::stone,    ObjectType::grass,  ObjectType::pig,       ObjectType::coal,    ObjectType::iron,
    ObjectType::silver,   ObjectType::gold,   ObjectType::diamond,   ObjectType::jeweler, ObjectType::lumber};

constexpr std::array<ObjectType, 8> playground_targets = {ObjectType::cow,     ObjectType::milk,  ObjectType::duck,
                                                          ObjectType::egg,     ObjectType::diamond, ObjectType::heart,
                                                          ObjectType::box,     ObjectType::meat};

const std::vector<OptionSpec>& playground_options() {
    static const std::vector<OptionSpec> v = [] {
        std::vector<OptionSpec> out;
        for (auto a : {Interaction::pickup, Interaction::transform})
            for (auto t : playground_targets) out.push_back({a, t});
        return out;
    }();
    return v;
}

const std::vector<std::pair<std::string_view, OptionSpec>>& mining_option_table() {
    using I = Interaction;
    using O = ObjectType;
    static const std::vector<std::pair<std::string_view, OptionSpec>> v = {
        {"get wood", {I::pickup, O::tree}},           {"get stone", {I::pickup, O::stone}},
        {"get string", {I::pickup, O::grass}},        {"get pork", {I::pickup, O::pig}},
        {"get coal", {I::pickup, O::coal}},           {"get iron", {I::pickup, O::iron}},
        {"get silver", {I::pickup, O::silver}},       {"get gold", {I::pickup, O::gold}},
        {"get diamond", {I::pickup, O::diamond}},     {"make firewood", {I::use1, O::lumber}},
        {"make stick", {I::use2, O::lumber}},         {"make arrow", {I::use3, O::lumber}},
        {"make bow", {I::use4, O::lumber}},           {"light furnace", {I::use1, O::furnace}},
        {"smelt iron", {I::use2, O::furnace}},        {"smelt silver", {I::use3, O::furnace}},
        {"smelt gold", {I::use4, O::furnace}},        {"cook pork", {I::use5, O::furnace}},
        {"make stone pickaxe", {I::use1, O::workspace}}, {"make iron pickaxe", {I::use2, O::workspace}},
        {"make silverware", {I::use3, O::workspace}}, {"make goldware", {I::use4, O::workspace}},
        {"make bracelet", {I::use5, O::workspace}},   {"make earrings", {I::use1, O::jeweler}},
        {"make ring", {I::use2, O::jeweler}},         {"make necklace", {I::use3, O::jeweler}},
    };
    return v;
}

const std::vector<OptionSpec>& mining_options() {
    static const std::vector<OptionSpec> v = [] {
        std::vector<OptionSpec> out;
        for (const auto& [label, opt] : mining_option_table()) out.push_back(opt);
        return out;
    }();
    return v;
}

constexpr std::array<ObjectType, 4> mining_stations = {ObjectType::workspace, ObjectType::furnace, ObjectType::lumber,
                                                       ObjectType::jeweler};

constexpr std::array<std::pair<int, int>, 4> moves = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

bool all_passable_connected(const GridMap& map) {
    const int h = map.height(), w = map.width();
    std::vector<char> seen(static_cast<std::size_t>(h * w), 0);
    int total = 0;
    std::optional<Cell> start;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (map.passable({r, c})) {
                ++total;
                if (!start) start = Cell{r, c};
            }
    if (!start) return true;
    std::deque<Cell> q{*start};
    seen[static_cast<std::size_t>(start->row * w + start->col)] = 1;
    int reached = 1;
    while (!q.empty()) {
        const Cell cur = q.front();
        q.pop_front();
        for (auto [dr, dc] : moves) {
            const Cell nb{cur.row + dr, cur.col + dc};
            if (!map.passable(nb)) continue;
            auto& s = seen[static_cast<std::size_t>(nb.row * w + nb.col)];
            if (s) continue;
            s = 1;
            ++reached;
            q.push_back(nb);
        }
    }
    return reached == total;
}

}  // namespace

std::string_view object_name(ObjectType t) { return t == ObjectType::none ? "empty" : info(t).name; }
char object_glyph(ObjectType t) { return t == ObjectType::none ? '.' : info(t).glyph; }
bool is_impassable(ObjectType t) { return t != ObjectType::none && info(t).impassable; }

std::string_view interaction_name(Interaction a) {
    switch (a) {
        case Interaction::pickup: return "pickup";
        case Interaction::transform: return "transform";
        case Interaction::use1: return "use1";
        case Interaction::use2: return "use2";
        case Interaction::use3: return "use3";
        case Interaction::use4: return "use4";
        case Interaction::use5: return "use5";
    }
    return "?";
}

std::span<const ObjectType> object_catalog(Domain d) {
    if (d == Domain::playground) return playground_objects;
    return mining_objects;
}

std::span<const OptionSpec> option_catalog(Domain d) {
    return d == Domain::playground ? std::span<const OptionSpec>(playground_options())
                                   : std::span<const OptionSpec>(mining_options());
}

std::vector<OptionSpec> assign_options(Domain d, const SubtaskGraph& graph, Rng& rng) {
    std::vector<OptionSpec> out;
    out.reserve(static_cast<std::size_t>(graph.size()));
    if (d == Domain::playground) {
        auto cat = playground_options();
        std::shuffle(cat.begin(), cat.end(), rng);
        for (SubtaskId i = 0; i < graph.size(); ++i) out.push_back(cat[static_cast<std::size_t>(i) % cat.size()]);
        return out;
    }
    for (const auto& s : graph.subtasks()) {
        const auto& table = mining_option_table();
        auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == s.label; });
        if (it == table.end())
            throw ConfigError("subtask " + std::to_string(s.id) + " label '" + s.label + "' is not a Mining subtask");
        out.push_back(it->second);
    }
    return out;
}

// ---------------------------------------------------------------------------

GridMap::GridMap(int height, int width) : height_(height), width_(width) {
    if (height < 1 || width < 1) throw ConfigError("map dimensions must be positive");
    cells_.assign(static_cast<std::size_t>(height * width), ObjectType::none);
}

int GridMap::count(ObjectType t) const { return static_cast<int>(std::count(cells_.begin(), cells_.end(), t)); }

int GridMap::object_count() const {
    return static_cast<int>(cells_.size()) - count(ObjectType::none);
}

bool GridMap::has_movers() const {
    return std::any_of(cells_.begin(), cells_.end(), [](ObjectType t) { return t == ObjectType::cow || t == ObjectType::duck; });
}

std::uint64_t GridMap::hash() const {
    std::uint64_t h = mix_seed({static_cast<std::uint64_t>(agent_.row), static_cast<std::uint64_t>(agent_.col)});
    for (auto t : cells_) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint8_t>(t)));
    return h;
}

std::vector<std::uint8_t> GridMap::observation(Domain d) const {
    const auto cat = object_catalog(d);
    std::vector<std::uint8_t> obs(cells_.size() * cat.size(), 0);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        auto it = std::find(cat.begin(), cat.end(), cells_[i]);
        if (it != cat.end()) obs[i * cat.size() + static_cast<std::size_t>(it - cat.begin())] = 1;
    }
    return obs;
}

std::string GridMap::to_ascii(Domain d) const {
    std::ostringstream os;
    os << "# " << domain_name(d) << ' ' << height_ << 'x' << width_ << " @=agent .=empty";
    for (auto t : object_catalog(d)) os << ' ' << object_glyph(t) << '=' << object_name(t);
    os << '\n';
    for (int r = 0; r < height_; ++r) {
        for (int c = 0; c < width_; ++c) os << (Cell{r, c} == agent_ ? '@' : object_glyph(at({r, c})));
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

GridMap sample_map(Domain d, std::span<const OptionSpec> options, const WorldParams& world, Rng& rng) {
    std::vector<ObjectType> objects;
    std::vector<ObjectType> obstacles;
    if (d == Domain::playground) {
        for (const auto& o : options) objects.push_back(o.target);
        obstacles.assign(static_cast<std::size_t>(std::max(0, world.playground_blocks)), ObjectType::block);
    } else {
        objects.assign(mining_stations.begin(), mining_stations.end());
        for (const auto& o : options)
            if (o.interaction == Interaction::pickup) objects.push_back(o.target);
        obstacles.assign(static_cast<std::size_t>(std::max(0, world.mining_mountains)), ObjectType::mountain);
        obstacles.insert(obstacles.end(), static_cast<std::size_t>(std::max(0, world.mining_water)), ObjectType::water);
    }
    const int cells = world.height * world.width;
    const int needed = static_cast<int>(objects.size() + obstacles.size()) + 1;
    if (world.height < 1 || world.width < 1 || needed > cells)
        throw ConfigError("map " + std::to_string(world.height) + "x" + std::to_string(world.width) + " cannot hold " +
                          std::to_string(needed - 1) + " objects and the agent");

    for (int attempt = 0; attempt < 1000; ++attempt) {
        GridMap map(world.height, world.width);
        std::vector<int> free(static_cast<std::size_t>(cells));
        std::iota(free.begin(), free.end(), 0);
        std::shuffle(free.begin(), free.end(), rng);
        std::size_t k = 0;
        auto cell_of = [&](int idx) { return Cell{idx / world.width, idx % world.width}; };
        for (auto t : obstacles) map.set(cell_of(free[k++]), t);
        if (!obstacles.empty() && !all_passable_connected(map)) continue;
        for (auto t : objects) map.set(cell_of(free[k++]), t);
        map.set_agent(cell_of(free[k++]));
        return map;
    }
    throw ConfigError("could not place obstacles without disconnecting the map");
}

void step_objects(GridMap& map, Domain d, const WorldParams& world, Rng& rng, bool frozen) {
    if (frozen || d != Domain::playground) return;
    std::vector<Cell> movers;
    for (int r = 0; r < map.height(); ++r)
        for (int c = 0; c < map.width(); ++c) {
            const auto t = map.at({r, c});
            if (t == ObjectType::cow || t == ObjectType::duck) movers.push_back({r, c});
        }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (Cell from : movers) {
        const auto t = map.at(from);
        const double p = t == ObjectType::cow ? world.cow_move_prob : world.duck_move_prob;
        if (coin(rng) >= p) continue;
        const auto [dr, dc] = moves[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
        const Cell to{from.row + dr, from.col + dc};
        if (from == map.agent() || !map.in_bounds(to) || to == map.agent() || map.at(to) != ObjectType::none) continue;
        map.set(to, t);
        map.set(from, ObjectType::none);
    }
}

PathInfo nearest_path(const GridMap& map, ObjectType target) {
    PathInfo out;
    const Cell start = map.agent();
    if (map.at(start) == target) return {0, start, start};
    const int w = map.width();
    std::vector<int> parent(static_cast<std::size_t>(map.height() * w), -2);
    std::vector<int> dist(parent.size(), -1);
    auto idx = [w](Cell c) { return c.row * w + c.col; };
    std::deque<Cell> q{start};
    parent[static_cast<std::size_t>(idx(start))] = -1;
    dist[static_cast<std::size_t>(idx(start))] = 0;
    int best = -1;
    std::optional<Cell> goal;
    while (!q.empty()) {
        const Cell cur = q.front();
        q.pop_front();
        const int dcur = dist[static_cast<std::size_t>(idx(cur))];
        if (best >= 0 && dcur >= best) break;
        for (auto [dr, dc] : moves) {
            const Cell nb{cur.row + dr, cur.col + dc};
            if (!map.passable(nb) || dist[static_cast<std::size_t>(idx(nb))] >= 0) continue;
            dist[static_cast<std::size_t>(idx(nb))] = dcur + 1;
            parent[static_cast<std::size_t>(idx(nb))] = idx(cur);
            if (map.at(nb) == target) {
                if (!goal || idx(nb) < idx(*goal)) goal = nb;
                best = dcur + 1;
            }
            q.push_back(nb);
        }
    }
    if (!goal) return out;
    out.distance = best;
    out.goal = *goal;
    int cur = idx(*goal);
    while (parent[static_cast<std::size_t>(cur)] != idx(start)) cur = parent[static_cast<std::size_t>(cur)];
    out.next = {cur / w, cur % w};
    return out;
}

OptionOutcome execute_option(GridMap& map, const SubtaskGraph& graph, TaskState& state, SubtaskId subtask,
                             const OptionSpec& option, Domain d, const WorldParams& world, Rng& rng, bool frozen) {
    if (subtask < 0 || subtask >= graph.size())
        throw GraphError("subtask id " + std::to_string(subtask) + " out of range");
    OptionOutcome out;
    const int budget = state.remaining_steps;
    if (budget <= 0) return out;
    const bool static_world = frozen || d != Domain::playground || !map.has_movers();

    auto spend = [&](int k) {
        out.steps_used += k;
        state.remaining_steps = budget - out.steps_used;
    };

    while (map.at(map.agent()) != option.target) {
        const PathInfo path = nearest_path(map, option.target);
        if (path.distance < 0) {
            out.missing_target = true;
            spend(std::min(1, budget - out.steps_used));
            return out;
        }
        if (static_world) {
            if (out.steps_used + path.distance >= budget) {
                out.aborted = true;
                spend(budget - out.steps_used);
                return out;
            }
            map.set_agent(path.goal);
            spend(path.distance);
            break;
        }
        if (out.steps_used + 1 >= budget) {
            out.aborted = true;
            spend(budget - out.steps_used);
            return out;
        }
        map.set_agent(path.next);
        spend(1);
        step_objects(map, d, world, rng, frozen);
    }

    // Interaction step.
    spend(1);
    if (option.interaction == Interaction::pickup)
        map.set(map.agent(), ObjectType::none);
    else if (option.interaction == Interaction::transform)
        map.set(map.agent(), ObjectType::ice);
    if (!static_world) step_objects(map, d, world, rng, frozen);

    const auto fired = execute_subtask(graph, state, subtask, 0);
    state = fired.state;
    out.reward = fired.reward;
    out.executed = fired.executed;
    return out;
}

// ---------------------------------------------------------------------------

Environment::Environment(const EpisodeConfig& config)
    : graph_(config.graph),
      domain_(config.domain),
      world_(config.world),
      rng_(config.seed),
      frozen_(config.freeze_stochastic),
      seed_(config.seed) {
    if (!graph_) throw ConfigError("episode config has no graph");
    options_ = std::make_shared<const std::vector<OptionSpec>>(assign_options(domain_, *graph_, rng_));
    map_ = sample_map(domain_, *options_, world_, rng_);
    const auto range = graph_->step_budget_range();
    initial_budget_ = config.budget ? *config.budget : uniform_int(rng_, range.lo, range.hi);
    if (initial_budget_ < 0) throw ConfigError("negative episode budget");
    state_ = initial_state(*graph_, initial_budget_);
}

OptionOutcome Environment::execute(SubtaskId i) {
    if (i < 0 || i >= graph_->size()) throw GraphError("subtask id " + std::to_string(i) + " out of range");
    return execute_option(map_, *graph_, state_, i, option(i), domain_, world_, rng_, frozen_);
}

Environment Environment::frozen_clone() const {
    Environment e = *this;
    e.frozen_ = true;
    return e;
}

Environment Environment::reseeded_clone(std::uint64_t seed) const {
    Environment e = *this;
    e.rng_.seed(seed);
    return e;
}

std::vector<double> EpisodeRecord::rewards() const {
    std::vector<double> r;
    r.reserve(options.size());
    for (const auto& o : options) r.push_back(o.reward);
    return r;
}

EpisodeRecord run_episode(Environment env, Policy& policy, std::uint64_t policy_seed) {
    EpisodeRecord rec;
    rec.seed = env.seed();
    rec.budget = env.state().remaining_steps;
    policy.begin_episode(env, policy_seed);
    while (!env.done()) {
        const auto choice = policy.act(env);
        if (!choice) break;
        const auto out = env.execute(*choice);
        rec.options.push_back({*choice, out.reward, out.steps_used, out.executed});
        rec.steps_used += out.steps_used;
    }
    rec.final_completion = env.state().completion;
    const auto rs = rec.rewards();
    rec.total_return = episode_return(rs);
    return rec;
}

EpisodeRecord run_episode(const EpisodeConfig& config, Policy& policy) {
    return run_episode(Environment(config), policy, mix_seed({config.seed, 0x706f6cull}));
}

}  // namespace sge
