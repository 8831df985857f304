#include "cfcd/scene.hpp"

#include <algorithm>

#include "cfcd/errors.hpp"

namespace cfcd {

namespace {

// Tolerance for deciding that a time lies on a grid sample.
constexpr double kGridSnap = 1e-6;

} // namespace

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time grid step must be positive");
    if (n_steps < 2) throw InvalidInput("time grid needs at least two steps");
}

bool AgentTrack::covers(double t) const {
    if (size() == 0) return false;
    const double eps = kGridSnap * dt;
    return t >= t_first - eps && t <= t_last() + eps;
}

std::size_t AgentTrack::index_at(double t) const {
    if (!covers(t)) {
        throw InvalidInput("time " + std::to_string(t) + " outside capture window of agent " +
                           std::to_string(agent_id));
    }
    const auto k = std::llround((t - t_first) / dt);
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(size()) - 1));
}

void AgentTrack::validate() const {
    const auto n = speed.size();
    if (x.size() != n || y.size() != n || heading.size() != n || long_accel.size() != n) {
        throw InvalidInput("agent " + std::to_string(agent_id) + ": series lengths differ");
    }
    if (!(length > 0.0) || !(width > 0.0)) {
        throw InvalidInput("agent " + std::to_string(agent_id) + ": extents must be positive");
    }
    if (!(dt > 0.0)) throw InvalidInput("agent " + std::to_string(agent_id) + ": step must be positive");
    for (double v : speed) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidInput("agent " + std::to_string(agent_id) + ": speed must be finite and >= 0");
        }
    }
}

double AgentTrack::speed_accel_residual() const {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < size(); ++k) {
        worst = std::max(worst, std::abs(speed[k + 1] - (speed[k] + long_accel[k] * dt)));
    }
    return worst;
}

void DecisionSet::add(const Decision& d) {
    auto& list = by_agent_[d.agent_id];
    auto pos = std::upper_bound(list.begin(), list.end(), d, [](const Decision& a, const Decision& b) {
        return a.decision_time < b.decision_time;
    });
    list.insert(pos, d);
}

void DecisionSet::set_agent(AgentId id, std::vector<Decision> decisions) {
    std::stable_sort(decisions.begin(), decisions.end(),
                     [](const Decision& a, const Decision& b) { return a.decision_time < b.decision_time; });
    by_agent_[id] = std::move(decisions);
}

const std::vector<Decision>& DecisionSet::of(AgentId id) const {
    static const std::vector<Decision> none;
    auto it = by_agent_.find(id);
    return it == by_agent_.end() ? none : it->second;
}

bool DecisionSet::contains(const Decision& d) const {
    const auto& list = of(d.agent_id);
    return std::find(list.begin(), list.end(), d) != list.end();
}

std::size_t DecisionSet::size() const {
    std::size_t n = 0;
    for (const auto& [id, list] : by_agent_) n += list.size();
    return n;
}

std::vector<Decision> DecisionSet::all() const {
    std::vector<Decision> out;
    for (const auto& [id, list] : by_agent_) out.insert(out.end(), list.begin(), list.end());
    std::sort(out.begin(), out.end(), [](const Decision& a, const Decision& b) { return a < b; });
    return out;
}

void DecisionSet::validate() const {
    for (const auto& [id, list] : by_agent_) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& d = list[i];
            if (d.agent_id != id) throw InvalidInput("decision filed under the wrong agent");
            if (d.goal.target_time < d.decision_time) {
                throw InvalidInput("agent " + std::to_string(id) + ": goal time precedes decision time");
            }
            if (!(d.goal.target_speed >= 0.0)) {
                throw InvalidInput("agent " + std::to_string(id) + ": negative target speed");
            }
            if (i > 0) {
                const auto& prev = list[i - 1];
                if (!(d.decision_time > prev.decision_time)) {
                    throw InvalidInput("agent " + std::to_string(id) + ": decision times not increasing");
                }
                if (d.decision_time < prev.goal.target_time) {
                    throw InvalidInput("agent " + std::to_string(id) + ": overlapping goal pursuit");
                }
            }
        }
    }
}

const char* to_string(Role r) {
    switch (r) {
    case Role::convoy_head: return "convoy_head";
    case Role::convoy_tail: return "convoy_tail";
    case Role::independent: return "independent";
    }
    return "independent";
}

Role role_from_string(const std::string& s) {
    if (s == "convoy_head") return Role::convoy_head;
    if (s == "convoy_tail") return Role::convoy_tail;
    if (s == "independent") return Role::independent;
    throw InvalidInput("unknown role '" + s + "'");
}

EntityCausalGraph::EntityCausalGraph(std::vector<AgentId> nodes) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

bool EntityCausalGraph::has_node(AgentId id) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

void EntityCausalGraph::add_edge(AgentId src, AgentId dst) {
    if (src == dst) throw InvalidInput("self-loop on agent " + std::to_string(src));
    if (!has_node(src) || !has_node(dst)) throw InvalidInput("edge endpoint is not a graph node");
    edges_.emplace(src, dst);
}

void DecisionCausalGraph::validate() const {
    decisions.validate();
    for (const auto& l : links) {
        if (l.cause.agent_id == l.effect.agent_id) throw InvalidInput("link within a single agent");
        if (!(l.cause.decision_time < l.effect.decision_time)) throw InvalidInput("link goes back in time");
        if (!decisions.contains(l.cause) || !decisions.contains(l.effect)) {
            throw InvalidInput("link references a decision outside the set");
        }
    }
}

const AgentTrack& Scene::track(AgentId id) const {
    for (const auto& t : tracks) {
        if (t.agent_id == id) return t;
    }
    throw InvalidInput("agent " + std::to_string(id) + " not in scene " + this->id);
}

bool Scene::has_agent(AgentId id) const {
    return std::any_of(tracks.begin(), tracks.end(), [id](const AgentTrack& t) { return t.agent_id == id; });
}

std::vector<AgentId> Scene::agent_ids() const {
    std::vector<AgentId> ids;
    ids.reserve(tracks.size());
    for (const auto& t : tracks) ids.push_back(t.agent_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

void Scene::validate() const {
    grid.validate();
    auto ids = agent_ids();
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InvalidInput("duplicate agent ids");
    const double eps = kGridSnap * grid.dt;
    for (const auto& t : tracks) {
        t.validate();
        if (std::abs(t.dt - grid.dt) > eps) throw InvalidInput("track step differs from scene grid");
        const double offset = (t.t_first - grid.t_start) / grid.dt;
        if (std::abs(offset - std::round(offset)) > kGridSnap) {
            throw InvalidInput("track " + std::to_string(t.agent_id) + " is not aligned to the scene grid");
        }
        if (t.size() > 0 && (t.t_first < grid.t_start - eps || t.t_last() > grid.t_end() + eps)) {
            throw InvalidInput("track " + std::to_string(t.agent_id) + " extends past the scene grid");
        }
    }
    for (const auto& [id, role] : roles) {
        if (!std::binary_search(ids.begin(), ids.end(), id)) throw InvalidInput("role for unknown agent");
    }
    if (ground_truth) {
        if (roles.size() != tracks.size()) throw InvalidInput("roles must cover all agents");
        for (auto n : ground_truth->nodes()) {
            if (!std::binary_search(ids.begin(), ids.end(), n)) {
                throw InvalidInput("ground truth node is not a scene agent");
            }
        }
    }
}

EntityCausalGraph entity_projection(const DecisionCausalGraph& g) {
    std::vector<AgentId> nodes;
    for (const auto& [id, list] : g.decisions.by_agent()) nodes.push_back(id);
    EntityCausalGraph out(std::move(nodes));
    for (const auto& l : g.links) out.add_edge(l.cause.agent_id, l.effect.agent_id);
    return out;
}

} // namespace cfcd
