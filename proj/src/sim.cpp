#include "cfcd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>
#include <tuple>
#include <utility>

#include "cfcd/errors.hpp"

namespace cfcd {

namespace {

double wrap_angle(double a) {
    return std::remainder(a, 2.0 * std::numbers::pi);
}

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Projection radius of a rectangle onto a unit axis.
double projected_radius(const BodyState& b, Vec2 axis) {
    const Vec2 u{std::cos(b.heading), std::sin(b.heading)};
    const Vec2 v{-u.y, u.x};
    return b.half_length * std::abs(dot(axis, u)) + b.half_width * std::abs(dot(axis, v));
}

bool separated_on(const BodyState& a, const BodyState& b, Vec2 axis) {
    const Vec2 d{b.position.x - a.position.x, b.position.y - a.position.y};
    return std::abs(dot(d, axis)) > projected_radius(a, axis) + projected_radius(b, axis);
}

std::size_t step_count(double span, double dt) {
    if (span <= 0.0) return 0;
    return static_cast<std::size_t>(std::floor(span / dt + 1e-9));
}

double clamped_accel(double speed, const Goal& goal, double now, double dt) {
    const double a = controller_acceleration(speed, goal, now, dt);
    return speed + a * dt < 0.0 ? -speed / dt : a;
}

} // namespace

double BodyState::bounding_radius() const { return std::hypot(half_length, half_width); }

Vec2 BodyState::velocity() const { return {speed * std::cos(heading), speed * std::sin(heading)}; }

BodyState BodyState::projected(double tau) const {
    BodyState out = *this;
    const Vec2 v = velocity();
    out.position.x += v.x * tau;
    out.position.y += v.y * tau;
    return out;
}

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidInput("simulation step must be positive");
    if (!(horizon >= 0.0)) throw InvalidInput("simulation horizon must be non-negative");
    if (!(ttc_horizon > 0.0)) throw InvalidInput("TTC horizon must be positive");
}

const AgentSeries& SimTrace::series(AgentId id) const {
    auto it = agents.find(id);
    if (it == agents.end()) throw InvalidInput("agent " + std::to_string(id) + " not in trace");
    return it->second;
}

double controller_acceleration(double current_speed, const Goal& goal, double now, double dt) {
    return (goal.target_speed - current_speed) / std::max(goal.target_time - now, dt);
}

bool check_collision(const BodyState& a, const BodyState& b) {
    const double dx = b.position.x - a.position.x;
    const double dy = b.position.y - a.position.y;
    const double reach = a.bounding_radius() + b.bounding_radius();
    if (dx * dx + dy * dy > reach * reach) return false;

    // Axis-aligned boxes of the rotated rectangles.
    const auto extent = [](const BodyState& s) {
        const double c = std::abs(std::cos(s.heading));
        const double sn = std::abs(std::sin(s.heading));
        return Vec2{c * s.half_length + sn * s.half_width, sn * s.half_length + c * s.half_width};
    };
    const Vec2 ea = extent(a);
    const Vec2 eb = extent(b);
    if (std::abs(dx) > ea.x + eb.x || std::abs(dy) > ea.y + eb.y) return false;

    for (const BodyState* s : {&a, &b}) {
        const Vec2 u{std::cos(s->heading), std::sin(s->heading)};
        if (separated_on(a, b, u) || separated_on(a, b, Vec2{-u.y, u.x})) return false;
    }
    return true;
}

WorldState step(const WorldState& w, const std::map<AgentId, Goal>& active_goals, const SimConfig& cfg) {
    const double dt = cfg.dt;
    WorldState next;
    next.time = w.time + dt;
    for (const auto& [id, body] : w.bodies) {
        auto g = active_goals.find(id);
        if (g == active_goals.end()) throw InvalidInput("no active goal for agent " + std::to_string(id));
        BodyState b = body;
        const double a = clamped_accel(body.speed, g->second, w.time, dt);
        b.speed = std::max(0.0, body.speed + a * dt);
        b.long_accel = a;
        b.heading = body.heading + body.angular_velocity * dt;
        const double mid_heading = body.heading + 0.5 * body.angular_velocity * dt;
        const double travelled = 0.5 * (body.speed + b.speed) * dt;
        b.position.x += travelled * std::cos(mid_heading);
        b.position.y += travelled * std::sin(mid_heading);
        next.bodies.emplace(id, b);
    }
    next.cumulative_collision_time = w.cumulative_collision_time;
    std::set<AgentId> colliding;
    for (auto i = next.bodies.begin(); i != next.bodies.end(); ++i) {
        for (auto j = std::next(i); j != next.bodies.end(); ++j) {
            if (check_collision(i->second, j->second)) {
                colliding.insert(i->first);
                colliding.insert(j->first);
            }
        }
    }
    for (const auto& [id, body] : next.bodies) {
        auto& cct = next.cumulative_collision_time[id];
        if (colliding.count(id)) cct += dt;
    }
    return next;
}

double time_to_collision(const WorldState& w, AgentId agent, const SimConfig& cfg) {
    auto self_it = w.bodies.find(agent);
    if (self_it == w.bodies.end()) throw InvalidInput("agent " + std::to_string(agent) + " not in world");
    const BodyState& self = self_it->second;
    const std::size_t max_k = step_count(cfg.ttc_horizon, cfg.dt);
    const Vec2 vs = self.velocity();

    double best = kNoCollision;
    for (const auto& [id, other] : w.bodies) {
        if (id == agent) continue;
        if (check_collision(self, other)) return 0.0;

        // Only the steps where the bounding circles can touch need the full check.
        const Vec2 vo = other.velocity();
        const Vec2 p{other.position.x - self.position.x, other.position.y - self.position.y};
        const Vec2 u{vo.x - vs.x, vo.y - vs.y};
        const double reach = self.bounding_radius() + other.bounding_radius();
        const double qa = dot(u, u);
        const double qb = 2.0 * dot(p, u);
        const double qc = dot(p, p) - reach * reach;
        double lo = 0.0;
        double hi = 0.0;
        if (qa < 1e-12) {
            if (qc > 0.0) continue;
            lo = 0.0;
            hi = static_cast<double>(max_k) * cfg.dt;
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) continue;
            const double root = std::sqrt(disc);
            lo = (-qb - root) / (2.0 * qa);
            hi = (-qb + root) / (2.0 * qa);
        }
        if (hi < 0.0) continue;
        const auto k_lo = std::max<long long>(1, static_cast<long long>(std::floor(lo / cfg.dt)));
        const auto k_hi = std::min<long long>(static_cast<long long>(max_k),
                                              static_cast<long long>(std::ceil(hi / cfg.dt)) + 1);
        for (long long k = k_lo; k <= k_hi; ++k) {
            const double tau = static_cast<double>(k) * cfg.dt;
            if (tau >= best) break;
            if (check_collision(self.projected(tau), other.projected(tau))) {
                best = tau;
                break;
            }
        }
    }
    return best;
}

Goal active_goal(const std::vector<Decision>& decisions, double t, double initial_speed, double start_time) {
    const double eps = 1e-9;
    const Decision* latest = nullptr;
    for (const auto& d : decisions) {
        if (d.decision_time <= t + eps) latest = &d;
        else break;
    }
    return latest ? latest->goal : Goal{initial_speed, start_time};
}

SimTrace simulate(const Scene& scene, const DecisionSet& decisions, const SimConfig& cfg) {
    cfg.validate();
    for (const auto& [id, list] : decisions.by_agent()) {
        if (!scene.has_agent(id)) throw InvalidInput("decision agent " + std::to_string(id) + " not in scene");
    }
    const double eps = 1e-6 * scene.grid.dt;
    if (cfg.start_time < scene.grid.t_start - eps || cfg.start_time > scene.grid.t_end() + eps) {
        throw InvalidInput("simulation start time outside the scene grid");
    }

    WorldState world;
    world.time = cfg.start_time;
    std::map<AgentId, double> initial_speed;
    for (const auto& track : scene.tracks) {
        if (!track.covers(cfg.start_time)) continue;
        const auto k = track.index_at(cfg.start_time);
        BodyState b;
        b.position = {track.x[k], track.y[k]};
        b.heading = track.heading[k];
        b.speed = track.speed[k];
        b.half_length = 0.5 * track.length;
        b.half_width = 0.5 * track.width;
        if (k + 1 < track.size()) {
            b.angular_velocity = wrap_angle(track.heading[k + 1] - track.heading[k]) / track.dt;
        } else if (k > 0) {
            b.angular_velocity = wrap_angle(track.heading[k] - track.heading[k - 1]) / track.dt;
        }
        world.bodies.emplace(track.agent_id, b);
        world.cumulative_collision_time[track.agent_id] = 0.0;
        initial_speed[track.agent_id] = b.speed;
    }

    const std::size_t n = step_count(cfg.horizon, cfg.dt) + 1;
    SimTrace trace;
    trace.times.reserve(n);
    for (const auto& [id, b] : world.bodies) {
        auto& s = trace.agents[id];
        for (auto* v : {&s.x, &s.y, &s.heading, &s.speed, &s.long_accel, &s.ttc, &s.cct}) v->reserve(n);
    }

    const auto goals_at = [&](double t) {
        std::map<AgentId, Goal> goals;
        for (const auto& [id, b] : world.bodies) {
            goals[id] = active_goal(decisions.of(id), t, initial_speed[id], cfg.start_time);
        }
        return goals;
    };

    std::map<std::pair<AgentId, AgentId>, double> open_contacts;
    const auto record = [&](std::size_t i) {
        const double t = cfg.start_time + static_cast<double>(i) * cfg.dt;
        trace.times.push_back(t);
        for (const auto& [id, b] : world.bodies) {
            auto& s = trace.agents[id];
            s.x.push_back(b.position.x);
            s.y.push_back(b.position.y);
            s.heading.push_back(b.heading);
            s.speed.push_back(b.speed);
            s.ttc.push_back(time_to_collision(world, id, cfg));
            s.cct.push_back(world.cumulative_collision_time[id]);
        }
        for (auto a = world.bodies.begin(); a != world.bodies.end(); ++a) {
            for (auto b = std::next(a); b != world.bodies.end(); ++b) {
                const auto key = std::make_pair(a->first, b->first);
                const bool hit = check_collision(a->second, b->second);
                auto open = open_contacts.find(key);
                if (hit && open == open_contacts.end()) {
                    open_contacts.emplace(key, t);
                } else if (!hit && open != open_contacts.end()) {
                    trace.collisions.push_back({key.first, key.second, open->second, t});
                    open_contacts.erase(open);
                }
            }
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        record(i);
        const double t = cfg.start_time + static_cast<double>(i) * cfg.dt;
        const auto goals = goals_at(t);
        if (i + 1 == n) {
            for (const auto& [id, b] : world.bodies) {
                trace.agents[id].long_accel.push_back(clamped_accel(b.speed, goals.at(id), t, cfg.dt));
            }
            break;
        }
        world.time = t;
        world = step(world, goals, cfg);
        for (const auto& [id, b] : world.bodies) trace.agents[id].long_accel.push_back(b.long_accel);
    }
    const double t_last = trace.times.empty() ? cfg.start_time : trace.times.back();
    for (const auto& [key, onset] : open_contacts) {
        trace.collisions.push_back({key.first, key.second, onset, t_last + cfg.dt});
    }
    std::sort(trace.collisions.begin(), trace.collisions.end(), [](const CollisionEvent& x, const CollisionEvent& y) {
        return std::tie(x.onset, x.a, x.b) < std::tie(y.onset, y.a, y.b);
    });
    return trace;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "time,agent_id,x,y,speed,accel,ttc,cct\n";
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        for (const auto& [id, s] : trace.agents) {
            out << trace.times[i] << ',' << id << ',' << s.x[i] << ',' << s.y[i] << ',' << s.speed[i] << ','
                << s.long_accel[i] << ',';
            if (std::isinf(s.ttc[i])) out << "inf";
            else out << s.ttc[i];
            out << ',' << s.cct[i] << '\n';
        }
    }
    out.precision(old_precision);
}

} // namespace cfcd
