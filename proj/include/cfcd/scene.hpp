#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cfcd {

using AgentId = std::int64_t;

/// Uniform sampling grid shared by every series in a scene.
struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.04;
    std::size_t n_steps = 2;

    double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
    double t_end() const { return time(n_steps - 1); }

    /// Nearest grid index for `t`; may be negative or past the end.
    std::int64_t nearest_index(double t) const {
        return static_cast<std::int64_t>(std::llround((t - t_start) / dt));
    }

    /// Throws InvalidInput unless dt > 0 and n_steps >= 2.
    void validate() const;

    bool operator==(const TimeGrid&) const = default;
};

/// Recorded state of one agent over its capture window.
///
/// Series are sampled at `t_first + k * dt`. `speed` is the scalar speed along
/// `heading`; `long_accel` is the longitudinal acceleration applied from
/// sample k to sample k + 1.
struct AgentTrack {
    AgentId agent_id = 0;
    double t_first = 0.0;
    double dt = 0.04;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> heading;
    std::vector<double> speed;
    std::vector<double> long_accel;
    double length = 4.5;
    double width = 1.8;
    int lane_id = 0;

    std::size_t size() const { return speed.size(); }
    double time(std::size_t k) const { return t_first + static_cast<double>(k) * dt; }
    double t_last() const { return time(size() == 0 ? 0 : size() - 1); }
    bool covers(double t) const;
    /// Sample index of time `t`; throws InvalidInput if outside the window.
    std::size_t index_at(double t) const;

    /// Throws InvalidInput on unequal series lengths or non-positive extents.
    void validate() const;

    /// Largest |v[k+1] - (v[k] + a[k] dt)| over the track; a data-quality signal.
    double speed_accel_residual() const;

    bool operator==(const AgentTrack&) const = default;
};

struct Goal {
    double target_speed = 0.0;
    double target_time = 0.0;

    bool operator==(const Goal&) const = default;
};

/// A speed goal chosen by an agent at `decision_time`.
struct Decision {
    AgentId agent_id = 0;
    double decision_time = 0.0;
    Goal goal;

    bool operator==(const Decision&) const = default;
    std::partial_ordering operator<=>(const Decision& o) const {
        if (auto c = decision_time <=> o.decision_time; c != 0) return c;
        if (agent_id != o.agent_id) return agent_id <=> o.agent_id;
        if (auto c = goal.target_time <=> o.goal.target_time; c != 0) return c;
        return goal.target_speed <=> o.goal.target_speed;
    }
};

/// Per-agent, time-ordered decisions.
class DecisionSet {
public:
    DecisionSet() = default;

    /// Appends keeping per-agent order; validity is checked by validate().
    void add(const Decision& d);
    void set_agent(AgentId id, std::vector<Decision> decisions);

    const std::vector<Decision>& of(AgentId id) const;
    const std::map<AgentId, std::vector<Decision>>& by_agent() const { return by_agent_; }
    bool contains(const Decision& d) const;
    std::size_t size() const;
    bool empty() const { return size() == 0; }
    /// Every decision ordered by (time, agent id, target).
    std::vector<Decision> all() const;

    /// Strictly increasing decision times per agent, goal times not before
    /// decision times, and no decision before the previous goal is reached.
    void validate() const;

    bool operator==(const DecisionSet&) const = default;

private:
    std::map<AgentId, std::vector<Decision>> by_agent_;
};

enum class Role { convoy_head, convoy_tail, independent };

const char* to_string(Role r);
Role role_from_string(const std::string& s);

/// Directed agent-to-agent graph without self-loops.
class EntityCausalGraph {
public:
    EntityCausalGraph() = default;
    explicit EntityCausalGraph(std::vector<AgentId> nodes);

    void add_edge(AgentId src, AgentId dst);
    bool has_edge(AgentId src, AgentId dst) const { return edges_.count({src, dst}) > 0; }

    const std::vector<AgentId>& nodes() const { return nodes_; }
    const std::set<std::pair<AgentId, AgentId>>& edges() const { return edges_; }
    bool has_node(AgentId id) const;

    bool operator==(const EntityCausalGraph&) const = default;

private:
    std::vector<AgentId> nodes_;
    std::set<std::pair<AgentId, AgentId>> edges_;
};

struct DecisionLink {
    Decision cause;
    Decision effect;

    bool operator==(const DecisionLink&) const = default;
};

struct DecisionCausalGraph {
    DecisionSet decisions;
    std::vector<DecisionLink> links;

    /// Every link crosses agents, goes forward in time, and references decisions in the set.
    void validate() const;

    bool operator==(const DecisionCausalGraph&) const = default;
};

struct Scene {
    std::string id;
    TimeGrid grid;
    std::vector<AgentTrack> tracks;
    std::map<AgentId, Role> roles;
    std::optional<EntityCausalGraph> ground_truth;
    std::map<std::string, std::string> metadata;

    const AgentTrack& track(AgentId id) const;
    bool has_agent(AgentId id) const;
    std::vector<AgentId> agent_ids() const;

    /// Unique ids, tracks aligned to the grid and inside it, roles complete
    /// when ground truth is present.
    void validate() const;

    bool operator==(const Scene&) const = default;
};

/// Edge (a, b) iff some decision of a is linked to some decision of b.
EntityCausalGraph entity_projection(const DecisionCausalGraph& g);

} // namespace cfcd
