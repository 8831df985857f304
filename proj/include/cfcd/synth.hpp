#pragma once

#include <cstdint>

#include "cfcd/scene.hpp"

namespace cfcd {

/// Closed interval sampled uniformly; lo == hi pins the value.
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Range&) const = default;
};

/// Parameters of a three-vehicle scene: a two-car convoy in one lane whose
/// head brakes and whose tail reacts after a delay, plus a vehicle in another lane.
struct SyntheticSpec {
    double dt = 0.04;        ///< s, 25 Hz
    double duration = 20.0;  ///< s
    double lane_width = 3.75;

    Range cruise_speed{24.0, 32.0};     ///< m/s, shared by head and tail
    Range headway{1.2, 2.0};            ///< s, bumper gap over tail speed
    Range head_brake_time{3.0, 6.0};    ///< s
    Range head_decel{1.5, 3.0};         ///< m/s^2
    Range head_speed_drop{6.0, 12.0};   ///< m/s
    Range follower_delay{0.5, 1.2};     ///< s
    Range follower_decel_scale{0.9, 1.2};
    Range follower_extra_drop{0.0, 1.5}; ///< m/s below the head's target

    int independent_lane_offset = 1;       ///< lanes away from the convoy
    Range independent_speed{20.0, 34.0};   ///< m/s, 0 for a parked vehicle
    Range independent_offset{-40.0, 60.0}; ///< m along the road from the tail
    double independent_change_probability = 0.5;
    Range independent_change_time{2.0, 10.0};
    Range independent_speed_change{2.0, 5.0};  ///< m/s magnitude, sign random
    Range independent_change_duration{2.0, 4.0};

    Range vehicle_length{4.0, 5.0};
    Range vehicle_width{1.7, 2.0};

    /// Throws InvalidInput on empty ranges or physically infeasible values.
    void validate() const;
};

inline constexpr AgentId kHeadId = 1;
inline constexpr AgentId kTailId = 2;
inline constexpr AgentId kIndependentId = 3;

/// Deterministic per (seed, spec). Tracks are produced by the kinematic
/// simulator from scripted decisions. Metadata records the scripted decisions
/// and whether removing the tail's decision leads to a head/tail collision
/// ("counterfactual_collision").
Scene generate_synthetic_scene(std::uint64_t seed, const SyntheticSpec& spec = {});

/// The decisions a generated scene was scripted with.
DecisionSet scripted_decisions(const Scene& synthetic_scene);

/// Per-scene seed for the i-th scene of a batch.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace cfcd
