#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cfcd/scene.hpp"

namespace cfcd {

struct LaneMarking {
    int lane_id = 0;
    double y_min = 0.0;
    double y_max = 0.0;

    bool operator==(const LaneMarking&) const = default;
};

struct RecordingMeta {
    std::string recording_id;
    double frame_rate = 25.0;  ///< Hz
    std::vector<LaneMarking> lanes;
    /// Whether x, y name the bounding-box corner instead of the center.
    bool corner_positions = false;

    bool operator==(const RecordingMeta&) const = default;
};

struct Recording {
    RecordingMeta meta;
    std::vector<AgentTrack> tracks;
};

/// Maps column names found in a file onto the canonical header names.
using ColumnRenames = std::map<std::string, std::string>;

/// Reads the trajectory CSV format:
///
///     # recording_id=01
///     # frame_rate=25
///     # lanes=2:4.1:7.9;3:7.9:11.6
///     # rows=1234                       (optional, checked when present)
///     # position=center|corner          (optional, default center)
///     frame,id,x,y,xVelocity,yVelocity,xAcceleration,yAcceleration,laneId,width,height
///
/// One row per agent per frame. `width`/`height` are the box extents along x
/// and y, i.e. vehicle length and width for traffic moving along x. The
/// acceleration columns are optional; without them acceleration is
/// finite-differenced from speed. A track's lane is its most frequent lane.
Recording parse_tracks(std::istream& in, const ColumnRenames& renames = {});
Recording parse_tracks_file(const std::filesystem::path& path, const ColumnRenames& renames = {});

/// Writes tracks in the format read by parse_tracks, including acceleration columns.
void write_tracks(std::ostream& out, const Recording& rec);

struct SceneExtractionParams {
    double min_rel_speed_change = 5.0;  ///< m/s, swing of follower-minus-leader speed
    double min_scene_duration = 10.0;   ///< s
    double max_headway = 3.0;           ///< s, bumper gap over follower speed
    std::size_t smoothing_window = 0;   ///< samples of moving-average on acceleration, 0 = off

    void validate() const;
};

/// Finds leader/follower pairs in one lane that stay within max_headway for
/// at least min_scene_duration while their relative speed swings by at least
/// min_rel_speed_change, and adds a vehicle from another lane covering the
/// same window. Scene tracks are cropped to that window.
std::vector<Scene> extract_causal_scenes(const std::vector<AgentTrack>& tracks, const RecordingMeta& meta,
                                         const SceneExtractionParams& params);

/// Centered moving average; windows shrink at the series ends.
std::vector<double> moving_average(const std::vector<double>& v, std::size_t window);

} // namespace cfcd
