#include "cfcd/decisions.hpp"

#include <algorithm>
#include <cmath>

#include "cfcd/errors.hpp"

namespace cfcd {

namespace {

void require_steps(const AgentTrack& track) {
    if (track.size() < 2) {
        throw InvalidInput("agent " + std::to_string(track.agent_id) + ": need at least two samples");
    }
    if (track.long_accel.size() != track.size()) {
        throw InvalidInput("agent " + std::to_string(track.agent_id) + ": acceleration series length mismatch");
    }
}

// Sample indices; index k + 1 marks a crossing between samples k and k + 1.
std::vector<std::size_t> rising_indices(const AgentTrack& track, double lambda) {
    const auto& a = track.long_accel;
    std::vector<std::size_t> out{0};
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        const bool up = a[k] < lambda && a[k + 1] >= lambda;
        const bool down = a[k] > -lambda && a[k + 1] <= -lambda;
        if (up || down) out.push_back(k + 1);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> falling_indices(const AgentTrack& track, double lambda) {
    const auto& a = track.long_accel;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        const bool up = a[k] >= lambda && a[k + 1] < lambda;
        const bool down = a[k] <= -lambda && a[k + 1] > -lambda;
        if (up || down) out.push_back(k + 1);
    }
    if (out.empty() || out.back() != a.size() - 1) out.push_back(a.size() - 1);
    return out;
}

std::vector<double> to_times(const AgentTrack& track, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto k : idx) out.push_back(track.time(k));
    return out;
}

} // namespace

void ExtractConfig::validate() const {
    if (!(accel_threshold > 0.0) || !(min_duration > 0.0) || !(min_speed_delta > 0.0)) {
        throw InvalidInput("extraction thresholds must be strictly positive");
    }
}

std::vector<double> candidate_start_times(const AgentTrack& track, const ExtractConfig& cfg) {
    require_steps(track);
    return to_times(track, rising_indices(track, cfg.accel_threshold));
}

std::vector<double> candidate_end_times(const AgentTrack& track, const ExtractConfig& cfg) {
    require_steps(track);
    return to_times(track, falling_indices(track, cfg.accel_threshold));
}

std::vector<Decision> extract_decisions(const AgentTrack& track, const ExtractConfig& cfg) {
    require_steps(track);
    cfg.validate();
    const auto starts = rising_indices(track, cfg.accel_threshold);
    const auto ends = falling_indices(track, cfg.accel_threshold);
    const auto& v = track.speed;
    // Compare spans in sample counts so grid rounding cannot flip a threshold.
    const double span_eps = 1e-9;

    std::vector<Decision> out;
    std::size_t j = 0;
    std::size_t k = 0;
    // The window start is always a start candidate, but unless the agent is
    // already actuating there it only serves the hold-speed fallback.
    if (starts.size() > 1 && std::abs(track.long_accel[0]) < cfg.accel_threshold) j = 1;

    while (j < starts.size() && k < ends.size()) {
        const auto s = starts[j];
        const auto f = ends[k];
        const double span = (static_cast<double>(f) - static_cast<double>(s)) * track.dt;
        if (f > s && span >= cfg.min_duration - span_eps && std::abs(v[s] - v[f]) >= cfg.min_speed_delta) {
            out.push_back({track.agent_id, track.time(s), {v[f], track.time(f)}});
            while (j < starts.size() && starts[j] < f) ++j;
        } else {
            ++k;
        }
    }
    if (out.empty()) {
        out.push_back({track.agent_id, track.time(0), {v[0], track.time(0)}});
    }
    return out;
}

DecisionSet extract_scene_decisions(const Scene& scene, const ExtractConfig& cfg) {
    DecisionSet out;
    for (const auto& t : scene.tracks) out.set_agent(t.agent_id, extract_decisions(t, cfg));
    return out;
}

} // namespace cfcd
