#pragma once

#include "sge/graph.hpp"
#include "sge/rng.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sge {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Domain { playground, mining };

std::string_view domain_name(Domain d);
Domain parse_domain(std::string_view s);

enum class ObjectType : std::int8_t {
    none = -1,
    // Playground
    cow, milk, duck, egg, diamond, heart, box, meat, block, ice,
    // Mining (diamond is shared)
    mountain, water, workspace, furnace, tree, stone, grass, pig, coal, iron, silver, gold, jeweler, lumber,
};

enum class Interaction : std::uint8_t { pickup, transform, use1, use2, use3, use4, use5 };

std::string_view object_name(ObjectType t);
std::string_view interaction_name(Interaction a);
char object_glyph(ObjectType t);
bool is_impassable(ObjectType t);

/// Object types of a domain in observation-channel order (10 / 15 types).
std::span<const ObjectType> object_catalog(Domain d);

/// An option: walk to an object of `target` type and apply `interaction`.
struct OptionSpec {
    Interaction interaction = Interaction::pickup;
    ObjectType target = ObjectType::none;
    friend bool operator==(const OptionSpec&, const OptionSpec&) = default;
};

/// Every (interaction, target) pair a domain's subtasks may use.
std::span<const OptionSpec> option_catalog(Domain d);

/// Playground: a seeded assignment of distinct catalog options (cycling past
/// 16 subtasks). Mining: looked up from the subtask label; throws ConfigError
/// for labels outside the Mining recipe list.
std::vector<OptionSpec> assign_options(Domain d, const SubtaskGraph& graph, Rng& rng);

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

/// Typed occupancy grid with at most one object per cell plus the agent.
class GridMap {
public:
    GridMap() = default;
    GridMap(int height, int width);

    int height() const { return height_; }
    int width() const { return width_; }
    bool in_bounds(Cell c) const { return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_; }
    ObjectType at(Cell c) const { return cells_[index(c)]; }
    void set(Cell c, ObjectType t) { cells_[index(c)] = t; }
    bool passable(Cell c) const { return in_bounds(c) && !is_impassable(at(c)); }
    Cell agent() const { return agent_; }
    void set_agent(Cell c) { agent_ = c; }

    int count(ObjectType t) const;
    int object_count() const;
    bool has_movers() const;
    std::uint64_t hash() const;

    /// H x W x C one-hot view (row-major, channel fastest) over the domain catalog.
    std::vector<std::uint8_t> observation(Domain d) const;
    /// Legend line followed by one text row per map row; '@' marks the agent.
    std::string to_ascii(Domain d) const;

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * width_ + c.col); }

    int height_ = 0;
    int width_ = 0;
    std::vector<ObjectType> cells_;
    Cell agent_;
};

struct WorldParams {
    int height = 10;
    int width = 10;
    int playground_blocks = 0;
    int mining_mountains = 5;
    int mining_water = 3;
    double cow_move_prob = 0.1;
    double duck_move_prob = 0.2;
};

struct EpisodeConfig {
    Domain domain = Domain::playground;
    std::shared_ptr<const SubtaskGraph> graph;
    std::uint64_t seed = 0;
    bool freeze_stochastic = false;
    WorldParams world;
    /// Overrides the budget drawn from graph.step_budget_range().
    std::optional<int> budget;
};

/// Places one instance of each subtask's target (Mining stations once each,
/// plus Mountain/Water scatter with a connectivity check) and the agent on an
/// empty cell. Throws ConfigError when the map cannot hold everything.
GridMap sample_map(Domain d, std::span<const OptionSpec> options, const WorldParams& world, Rng& rng);

/// One tick of object motion: every Cow / Duck moves one cell in a random
/// cardinal direction with its probability. Moves off-map, into an occupied or
/// impassable cell, or onto the agent are cancelled; objects under the agent
/// stay put. No-op for Mining or when frozen.
void step_objects(GridMap& map, Domain d, const WorldParams& world, Rng& rng, bool frozen);

/// Shortest passable-path distance from the agent to the nearest instance of
/// `target` (ties broken row-major) and the first move of that path.
struct PathInfo {
    int distance = -1;  // -1: no reachable instance
    Cell goal;
    Cell next;
};
PathInfo nearest_path(const GridMap& map, ObjectType target);

struct OptionOutcome {
    double reward = 0.0;
    int steps_used = 0;
    bool executed = false;        // the subtask fired and changed the completion vector
    bool aborted = false;         // budget ran out before the interaction
    bool missing_target = false;  // no reachable instance of the target type
};

/// Runs one option: navigate (re-planning every step while objects move),
/// interact (one step), then fire the subtask against the graph.
OptionOutcome execute_option(GridMap& map, const SubtaskGraph& graph, TaskState& state, SubtaskId subtask,
                             const OptionSpec& option, Domain d, const WorldParams& world, Rng& rng, bool frozen);

/// Map, task state, option table and RNG stream of one episode. Copyable: a
/// copy is an independent simulator clone.
class Environment {
public:
    explicit Environment(const EpisodeConfig& config);

    const SubtaskGraph& graph() const { return *graph_; }
    const std::shared_ptr<const SubtaskGraph>& graph_ptr() const { return graph_; }
    Domain domain() const { return domain_; }
    const GridMap& map() const { return map_; }
    const TaskState& state() const { return state_; }
    const OptionSpec& option(SubtaskId i) const { return (*options_)[static_cast<std::size_t>(i)]; }
    const std::vector<OptionSpec>& options() const { return *options_; }
    const WorldParams& world() const { return world_; }
    int initial_budget() const { return initial_budget_; }
    bool frozen() const { return frozen_; }
    std::uint64_t seed() const { return seed_; }

    /// Budget exhausted or nothing left to execute.
    bool done() const { return state_.remaining_steps <= 0 || state_.eligibility.empty(); }

    OptionOutcome execute(SubtaskId i);

    /// Copy with object motion disabled.
    Environment frozen_clone() const;
    /// Copy whose RNG stream is re-seeded (for resampled simulations).
    Environment reseeded_clone(std::uint64_t seed) const;

private:
    std::shared_ptr<const SubtaskGraph> graph_;
    std::shared_ptr<const std::vector<OptionSpec>> options_;
    Domain domain_;
    WorldParams world_;
    GridMap map_;
    TaskState state_;
    Rng rng_;
    int initial_budget_ = 0;
    bool frozen_ = false;
    std::uint64_t seed_ = 0;
};

/// Chooses the next subtask to run. nullopt means "idle until the budget runs out".
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    /// Called once before the first decision of an episode.
    virtual void begin_episode(const Environment& env, std::uint64_t seed) {
        (void)env;
        (void)seed;
    }
    virtual std::optional<SubtaskId> act(const Environment& env) = 0;
};

struct OptionRecord {
    SubtaskId subtask = 0;
    double reward = 0.0;
    int steps_used = 0;
    bool executed = false;
    friend bool operator==(const OptionRecord&, const OptionRecord&) = default;
};

struct EpisodeRecord {
    std::uint64_t seed = 0;
    int budget = 0;
    std::vector<OptionRecord> options;
    SubtaskSet final_completion;
    double total_return = 0.0;
    int steps_used = 0;

    std::vector<double> rewards() const;
    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// Plays `policy` until the environment is done or the policy idles.
EpisodeRecord run_episode(Environment env, Policy& policy, std::uint64_t policy_seed);
EpisodeRecord run_episode(const EpisodeConfig& config, Policy& policy);

}  // namespace sge
