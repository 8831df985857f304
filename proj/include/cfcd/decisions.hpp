#pragma once

#include <vector>

#include "cfcd/scene.hpp"

namespace cfcd {

/// Thresholds for recovering speed decisions from an acceleration series.
struct ExtractConfig {
    double accel_threshold = 0.2;  ///< m/s^2, minimum actuation
    double min_duration = 1.0;     ///< s, minimum decision-to-target span
    double min_speed_delta = 1.0;  ///< m/s, minimum change towards the target

    void validate() const;
};

/// Times at which |a| rises to the threshold (either sign), plus the window start.
///
/// A crossing between samples k and k+1 is reported at sample k+1, the first
/// sample where the thresholded condition holds.
std::vector<double> candidate_start_times(const AgentTrack& track, const ExtractConfig& cfg);

/// Times at which |a| falls back below the threshold, plus the window end.
std::vector<double> candidate_end_times(const AgentTrack& track, const ExtractConfig& cfg);

/// Pairs start and end candidates into non-overlapping speed decisions.
///
/// Falls back to a single hold-speed decision at the window start when no
/// pair clears both the duration and the speed-change thresholds.
std::vector<Decision> extract_decisions(const AgentTrack& track, const ExtractConfig& cfg);

/// Runs extract_decisions on every track of a scene.
DecisionSet extract_scene_decisions(const Scene& scene, const ExtractConfig& cfg);

/// Whether `d` is the hold-current-speed fallback (target time == decision time).
inline bool is_fallback(const Decision& d) { return d.goal.target_time == d.decision_time; }

} // namespace cfcd
