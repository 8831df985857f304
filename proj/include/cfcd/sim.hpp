#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <vector>

#include "cfcd/scene.hpp"

namespace cfcd {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Rigid body approximated as an oriented rectangle moving along its heading.
struct BodyState {
    Vec2 position;
    double heading = 0.0;           ///< rad
    double speed = 0.0;             ///< m/s, along heading, >= 0
    double angular_velocity = 0.0;  ///< rad/s
    double long_accel = 0.0;        ///< m/s^2 applied over the last step
    double half_length = 2.25;
    double half_width = 0.9;

    double bounding_radius() const;
    Vec2 velocity() const;
    /// Pose after `tau` seconds at constant speed and fixed heading.
    BodyState projected(double tau) const;
};

struct WorldState {
    double time = 0.0;
    std::map<AgentId, BodyState> bodies;
    std::map<AgentId, double> cumulative_collision_time;
};

struct SimConfig {
    double dt = 0.04;          ///< s
    double start_time = 0.0;   ///< s, t_alpha
    double horizon = 0.0;      ///< s
    double ttc_horizon = 20.0; ///< s, cap on the TTC search

    void validate() const;
};

struct CollisionEvent {
    AgentId a = 0;
    AgentId b = 0;
    double onset = 0.0;
    double end = 0.0;  ///< first time the pair is observed apart (exclusive)
};

/// Per-agent series sampled at `times`.
struct AgentSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> heading;
    std::vector<double> speed;
    std::vector<double> long_accel;
    std::vector<double> ttc;
    std::vector<double> cct;
};

struct SimTrace {
    std::vector<double> times;
    std::map<AgentId, AgentSeries> agents;
    std::vector<CollisionEvent> collisions;

    bool has_agent(AgentId id) const { return agents.count(id) > 0; }
    const AgentSeries& series(AgentId id) const;
    std::size_t size() const { return times.size(); }
};

inline constexpr double kNoCollision = std::numeric_limits<double>::infinity();

/// Acceleration that reaches `goal.target_speed` by `goal.target_time`, or
/// within one step once the target time has passed.
double controller_acceleration(double current_speed, const Goal& goal, double now, double dt);

/// True iff the two oriented rectangles overlap (touching counts).
bool check_collision(const BodyState& a, const BodyState& b);

/// Advances every body one step under its active goal and accumulates
/// collision time for bodies that overlap afterwards.
WorldState step(const WorldState& w, const std::map<AgentId, Goal>& active_goals, const SimConfig& cfg);

/// Constant-velocity time to first contact for `agent`, swept at cfg.dt up to
/// cfg.ttc_horizon; 0 when already in contact, kNoCollision when none.
double time_to_collision(const WorldState& w, AgentId agent, const SimConfig& cfg);

/// The goal an agent pursues at `t`: its latest decision at or before `t`,
/// else holding `initial_speed`.
Goal active_goal(const std::vector<Decision>& decisions, double t, double initial_speed, double start_time);

/// Re-simulates every agent captured at cfg.start_time from its decisions.
SimTrace simulate(const Scene& scene, const DecisionSet& decisions, const SimConfig& cfg);

/// CSV with columns time,agent_id,x,y,speed,accel,ttc,cct.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

} // namespace cfcd
