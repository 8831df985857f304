#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cfcd/scene.hpp"
#include "cfcd/sim.hpp"

namespace testing {

// Straight-line track along x whose acceleration is a(t) applied over each step.
inline cfcd::AgentTrack accel_track(cfcd::AgentId id, double v0, double duration, double dt,
                                    const std::function<double(double)>& accel, double x0 = 0.0, double y0 = 0.0) {
    cfcd::AgentTrack t;
    t.agent_id = id;
    t.dt = dt;
    const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
    double x = x0;
    double v = v0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = accel(static_cast<double>(k) * dt);
        t.x.push_back(x);
        t.y.push_back(y0);
        t.heading.push_back(0.0);
        t.speed.push_back(v);
        t.long_accel.push_back(a);
        const double v_next = v + a * dt;
        x += 0.5 * (v + v_next) * dt;
        v = v_next;
    }
    return t;
}

inline cfcd::Scene scene_of(std::vector<cfcd::AgentTrack> tracks, double dt = 0.04) {
    cfcd::Scene s;
    s.id = "test";
    s.grid.dt = dt;
    std::size_t n = 2;
    for (const auto& t : tracks) n = std::max(n, t.size());
    s.grid.n_steps = n;
    s.tracks = std::move(tracks);
    return s;
}

inline cfcd::BodyState body(double x, double y, double heading = 0.0, double length = 4.0, double width = 2.0,
                            double speed = 0.0) {
    cfcd::BodyState b;
    b.position = {x, y};
    b.heading = heading;
    b.half_length = length / 2.0;
    b.half_width = width / 2.0;
    b.speed = speed;
    return b;
}

// Dense sampling overlap oracle: any grid point of a inside b.
inline bool sampled_overlap(const cfcd::BodyState& a, const cfcd::BodyState& b, int n = 120) {
    const double ca = std::cos(a.heading), sa = std::sin(a.heading);
    const double cb = std::cos(b.heading), sb = std::sin(b.heading);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const double u = (2.0 * i / n - 1.0) * a.half_length;
            const double w = (2.0 * j / n - 1.0) * a.half_width;
            const double px = a.position.x + u * ca - w * sa - b.position.x;
            const double py = a.position.y + u * sa + w * ca - b.position.y;
            const double lu = px * cb + py * sb;
            const double lw = -px * sb + py * cb;
            if (std::abs(lu) <= b.half_length && std::abs(lw) <= b.half_width) return true;
        }
    }
    return false;
}

inline cfcd::BodyState scaled(cfcd::BodyState b, double margin) {
    b.half_length += margin;
    b.half_width += margin;
    return b;
}

} // namespace testing
