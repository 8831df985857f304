#include "cfcd/synth.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "cfcd/errors.hpp"
#include "cfcd/scene_io.hpp"
#include "cfcd/sim.hpp"

namespace cfcd {

namespace {

// Uniform in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double in(const Range& r) { return r.lo == r.hi ? r.lo : r.lo + (r.hi - r.lo) * unit(); }

private:
    std::mt19937_64 engine_;
};

void check_range(const Range& r, const char* name, bool allow_negative = false) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
        throw InvalidInput(std::string("synthetic spec: empty or invalid range '") + name + "'");
    }
    if (!allow_negative && r.lo < 0.0) throw InvalidInput(std::string("synthetic spec: negative '") + name + "'");
}

bool pair_collides(const SimTrace& trace, AgentId a, AgentId b) {
    for (const auto& ev : trace.collisions) {
        if ((ev.a == a && ev.b == b) || (ev.a == b && ev.b == a)) return true;
    }
    return false;
}

} // namespace

void SyntheticSpec::validate() const {
    if (!(dt > 0.0)) throw InvalidInput("synthetic spec: dt must be positive");
    if (!(duration >= 2.0 * dt)) throw InvalidInput("synthetic spec: duration shorter than two steps");
    if (!(lane_width > 0.0)) throw InvalidInput("synthetic spec: lane width must be positive");
    check_range(cruise_speed, "cruise_speed");
    check_range(headway, "headway");
    check_range(head_brake_time, "head_brake_time");
    check_range(head_decel, "head_decel");
    check_range(head_speed_drop, "head_speed_drop");
    check_range(follower_delay, "follower_delay");
    check_range(follower_decel_scale, "follower_decel_scale");
    check_range(follower_extra_drop, "follower_extra_drop", true);
    check_range(independent_speed, "independent_speed");
    check_range(independent_offset, "independent_offset", true);
    check_range(independent_change_time, "independent_change_time");
    check_range(independent_speed_change, "independent_speed_change");
    check_range(independent_change_duration, "independent_change_duration");
    check_range(vehicle_length, "vehicle_length");
    check_range(vehicle_width, "vehicle_width");
    if (!(headway.lo > 0.0)) throw InvalidInput("synthetic spec: headway must be positive");
    if (!(head_decel.lo > 0.0) || !(follower_decel_scale.lo > 0.0)) {
        throw InvalidInput("synthetic spec: decelerations must be positive");
    }
    if (!(vehicle_length.lo > 0.0) || !(vehicle_width.lo > 0.0)) {
        throw InvalidInput("synthetic spec: vehicle extents must be positive");
    }
    if (independent_lane_offset == 0) throw InvalidInput("synthetic spec: independent vehicle must use another lane");
    if (std::abs(independent_lane_offset) * lane_width < vehicle_width.hi) {
        throw InvalidInput("synthetic spec: lanes too narrow for the vehicles");
    }
    if (!(independent_change_probability >= 0.0 && independent_change_probability <= 1.0)) {
        throw InvalidInput("synthetic spec: change probability must lie in [0, 1]");
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finaliser
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Scene generate_synthetic_scene(std::uint64_t seed, const SyntheticSpec& spec) {
    spec.validate();
    Sampler rng(seed);
    const double dt = spec.dt;
    const auto snap = [dt](double t) { return static_cast<double>(std::llround(t / dt)) * dt; };
    const auto snap_span = [dt](double t) { return static_cast<double>(std::max<long long>(1, std::llround(t / dt))) * dt; };

    const double cruise = rng.in(spec.cruise_speed);
    const double headway = rng.in(spec.headway);
    const double head_len = rng.in(spec.vehicle_length);
    const double head_wid = rng.in(spec.vehicle_width);
    const double tail_len = rng.in(spec.vehicle_length);
    const double tail_wid = rng.in(spec.vehicle_width);
    const double ind_len = rng.in(spec.vehicle_length);
    const double ind_wid = rng.in(spec.vehicle_width);

    const double brake_time = snap(rng.in(spec.head_brake_time));
    const double head_decel = rng.in(spec.head_decel);
    const double head_drop = std::min(rng.in(spec.head_speed_drop), cruise);
    const double delay = snap(rng.in(spec.follower_delay));
    const double tail_decel = head_decel * rng.in(spec.follower_decel_scale);
    const double tail_drop = std::min(head_drop + rng.in(spec.follower_extra_drop), cruise);

    const double ind_speed = rng.in(spec.independent_speed);
    const double ind_offset = rng.in(spec.independent_offset);
    const bool ind_changes = rng.unit() < spec.independent_change_probability;
    const double ind_change_time = snap(rng.in(spec.independent_change_time));
    const double ind_dv = rng.in(spec.independent_speed_change) * (rng.unit() < 0.5 ? -1.0 : 1.0);
    const double ind_change_dur = snap_span(rng.in(spec.independent_change_duration));

    DecisionSet script;
    if (head_drop > 0.0) {
        script.add({kHeadId, brake_time, {cruise - head_drop, brake_time + snap_span(head_drop / head_decel)}});
    }
    if (tail_drop > 0.0) {
        const double t = brake_time + delay;
        script.add({kTailId, t, {cruise - tail_drop, t + snap_span(tail_drop / tail_decel)}});
    }
    if (ind_changes && ind_speed > 0.0) {
        script.add({kIndependentId, ind_change_time,
                    {std::max(0.0, ind_speed + ind_dv), ind_change_time + ind_change_dur}});
    }

    const auto n = static_cast<std::size_t>(std::llround(spec.duration / dt)) + 1;
    Scene seed_scene;
    seed_scene.grid = {0.0, dt, n};
    const double ind_y = spec.independent_lane_offset * spec.lane_width;
    const double head_x = 0.5 * tail_len + headway * cruise + 0.5 * head_len;
    const struct {
        AgentId id;
        double x, y, v, len, wid;
        int lane;
    } init[] = {{kHeadId, head_x, 0.0, cruise, head_len, head_wid, 1},
                {kTailId, 0.0, 0.0, cruise, tail_len, tail_wid, 1},
                {kIndependentId, ind_offset, ind_y, ind_speed, ind_len, ind_wid, 1 + spec.independent_lane_offset}};
    for (const auto& a : init) {
        AgentTrack t;
        t.agent_id = a.id;
        t.t_first = 0.0;
        t.dt = dt;
        t.x = {a.x};
        t.y = {a.y};
        t.heading = {0.0};
        t.speed = {a.v};
        t.long_accel = {0.0};
        t.length = a.len;
        t.width = a.wid;
        t.lane_id = a.lane;
        seed_scene.tracks.push_back(t);
    }

    SimConfig sim;
    sim.dt = dt;
    sim.start_time = 0.0;
    sim.horizon = static_cast<double>(n - 1) * dt;
    const auto trace = simulate(seed_scene, script, sim);

    Scene scene;
    scene.id = "synth_" + std::to_string(seed);
    scene.grid = seed_scene.grid;
    for (const auto& seed_track : seed_scene.tracks) {
        const auto& s = trace.series(seed_track.agent_id);
        AgentTrack t = seed_track;
        t.x = s.x;
        t.y = s.y;
        t.heading = s.heading;
        t.speed = s.speed;
        t.long_accel = s.long_accel;
        scene.tracks.push_back(std::move(t));
    }
    scene.roles = {{kHeadId, Role::convoy_head}, {kTailId, Role::convoy_tail}, {kIndependentId, Role::independent}};
    EntityCausalGraph truth({kHeadId, kTailId, kIndependentId});
    truth.add_edge(kHeadId, kTailId);
    scene.ground_truth = truth;

    bool counterfactual = false;
    const auto& tail_decisions = script.of(kTailId);
    if (!tail_decisions.empty()) {
        DecisionSet without_tail = script;
        without_tail.set_agent(kTailId, {});
        counterfactual = pair_collides(simulate(seed_scene, without_tail, sim), kHeadId, kTailId);
    }
    scene.metadata = {{"generator", "synthetic_convoy"},
                      {"seed", std::to_string(seed)},
                      {"scripted_decisions", to_json(script).dump()},
                      {"factual_collision", trace.collisions.empty() ? "false" : "true"},
                      {"counterfactual_collision", counterfactual ? "true" : "false"}};
    return scene;
}

DecisionSet scripted_decisions(const Scene& scene) {
    auto it = scene.metadata.find("scripted_decisions");
    if (it == scene.metadata.end()) throw InvalidInput("scene " + scene.id + " carries no scripted decisions");
    return decision_set_from_json(nlohmann::json::parse(it->second));
}

} // namespace cfcd
