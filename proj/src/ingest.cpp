#include "cfcd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>

#include "cfcd/errors.hpp"

namespace cfcd {

namespace {

const std::vector<std::string> kColumns{"frame",         "id",           "x",      "y",     "xVelocity", "yVelocity",
                                        "xAcceleration", "yAcceleration", "laneId", "width", "height"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::size_t line) {
    const auto t = trim(s);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || t.empty()) throw ParseError("bad number '" + t + "'", line);
    return v;
}

long long parse_int(std::string_view s, std::size_t line) {
    const double v = parse_double(s, line);
    if (v != std::floor(v)) throw ParseError("expected an integer, got '" + trim(s) + "'", line);
    return static_cast<long long>(v);
}

struct Row {
    long long frame;
    double x, y, vx, vy;
    std::optional<double> ax, ay;
    int lane;
    double box_x, box_y;
};

void parse_meta_line(const std::string& body, RecordingMeta& meta, std::optional<std::size_t>& rows,
                     std::size_t line) {
    const auto eq = body.find('=');
    if (eq == std::string::npos) return;
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (key == "recording_id") {
        meta.recording_id = value;
    } else if (key == "frame_rate") {
        meta.frame_rate = parse_double(value, line);
        if (!(meta.frame_rate > 0.0)) throw ParseError("frame_rate must be positive", line);
    } else if (key == "rows") {
        rows = static_cast<std::size_t>(parse_int(value, line));
    } else if (key == "position") {
        if (value != "center" && value != "corner") throw ParseError("position must be center or corner", line);
        meta.corner_positions = value == "corner";
    } else if (key == "lanes") {
        meta.lanes.clear();
        if (value.empty()) return;
        for (auto item : split(value, ';')) {
            const auto parts = split(item, ':');
            if (parts.size() != 3) throw ParseError("lane entries must be id:y_min:y_max", line);
            meta.lanes.push_back({static_cast<int>(parse_int(parts[0], line)), parse_double(parts[1], line),
                                  parse_double(parts[2], line)});
        }
    }
}

AgentTrack build_track(AgentId id, std::vector<Row>& rows, const RecordingMeta& meta) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].frame == rows[i - 1].frame) {
            throw ParseError("agent " + std::to_string(id) + " has two rows for frame " +
                             std::to_string(rows[i].frame));
        }
        if (rows[i].frame != rows[i - 1].frame + 1) {
            throw InvalidInput("agent " + std::to_string(id) + ": non-uniform frame spacing at frame " +
                               std::to_string(rows[i - 1].frame));
        }
    }
    const double dt = 1.0 / meta.frame_rate;
    AgentTrack t;
    t.agent_id = id;
    t.dt = dt;
    t.t_first = static_cast<double>(rows.front().frame) * dt;
    t.length = rows.front().box_x;
    t.width = rows.front().box_y;

    std::map<int, std::size_t> lane_votes;
    const bool has_accel = std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.ax && r.ay; });
    double last_heading = 0.0;
    for (const auto& r : rows) {
        const double speed = std::hypot(r.vx, r.vy);
        const double heading = speed > 1e-9 ? std::atan2(r.vy, r.vx) : last_heading;
        last_heading = heading;
        const double ox = meta.corner_positions ? 0.5 * r.box_x : 0.0;
        const double oy = meta.corner_positions ? 0.5 * r.box_y : 0.0;
        t.x.push_back(r.x + ox);
        t.y.push_back(r.y + oy);
        t.heading.push_back(heading);
        t.speed.push_back(speed);
        if (has_accel) t.long_accel.push_back(*r.ax * std::cos(heading) + *r.ay * std::sin(heading));
        ++lane_votes[r.lane];
    }
    if (!has_accel) {
        const auto n = t.speed.size();
        t.long_accel.assign(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) t.long_accel[k] = (t.speed[k + 1] - t.speed[k]) / dt;
        if (n > 1) t.long_accel[n - 1] = t.long_accel[n - 2];
    }
    t.lane_id = std::max_element(lane_votes.begin(), lane_votes.end(), [](const auto& a, const auto& b) {
                    return a.second < b.second;
                })->first;
    t.validate();
    return t;
}

// Frame index of a track's first sample.
long long first_frame(const AgentTrack& t) { return std::llround(t.t_first / t.dt); }

AgentTrack crop(const AgentTrack& t, long long frame_begin, long long frame_end, std::size_t smoothing) {
    const auto off = static_cast<std::size_t>(frame_begin - first_frame(t));
    const auto n = static_cast<std::size_t>(frame_end - frame_begin + 1);
    AgentTrack c = t;
    const auto cut = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(off),
                                   v.begin() + static_cast<std::ptrdiff_t>(off + n));
    };
    c.x = cut(t.x);
    c.y = cut(t.y);
    c.heading = cut(t.heading);
    c.speed = cut(t.speed);
    c.long_accel = cut(t.long_accel);
    if (smoothing > 1) c.long_accel = moving_average(c.long_accel, smoothing);
    c.t_first = static_cast<double>(frame_begin) * t.dt;
    return c;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Recording parse_tracks(std::istream& in, const ColumnRenames& renames) {
    Recording rec;
    std::optional<std::size_t> declared_rows;
    std::map<std::string, std::size_t> col;
    std::map<AgentId, std::vector<Row>> by_agent;
    std::map<AgentId, std::size_t> first_line;
    std::size_t data_rows = 0;
    std::size_t line_no = 0;
    bool have_header = false;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        const auto stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            parse_meta_line(stripped.substr(1), rec.meta, declared_rows, line_no);
            continue;
        }
        const auto cells = split(stripped, ',');
        if (!have_header) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                auto name = trim(cells[i]);
                if (auto r = renames.find(name); r != renames.end()) name = r->second;
                col[name] = i;
            }
            for (const auto& required : {"frame", "id", "x", "y", "xVelocity", "yVelocity", "laneId", "width", "height"}) {
                if (!col.count(required)) throw ParseError(std::string("missing column '") + required + "'", line_no);
            }
            have_header = true;
            continue;
        }
        if (cells.size() != col.size()) {
            throw ParseError("expected " + std::to_string(col.size()) + " fields, got " + std::to_string(cells.size()),
                             line_no);
        }
        const auto get = [&](const char* name) { return parse_double(cells[col.at(name)], line_no); };
        Row r{};
        r.frame = parse_int(cells[col.at("frame")], line_no);
        const AgentId id = parse_int(cells[col.at("id")], line_no);
        r.x = get("x");
        r.y = get("y");
        r.vx = get("xVelocity");
        r.vy = get("yVelocity");
        if (col.count("xAcceleration") && col.count("yAcceleration")) {
            r.ax = get("xAcceleration");
            r.ay = get("yAcceleration");
        }
        r.lane = static_cast<int>(parse_int(cells[col.at("laneId")], line_no));
        r.box_x = get("width");
        r.box_y = get("height");
        if (!(r.box_x > 0.0) || !(r.box_y > 0.0)) throw ParseError("vehicle extents must be positive", line_no);
        by_agent[id].push_back(r);
        first_line.emplace(id, line_no);
        ++data_rows;
    }
    if (declared_rows && *declared_rows != data_rows) {
        throw ParseError("declared " + std::to_string(*declared_rows) + " rows but found " + std::to_string(data_rows),
                         line_no);
    }
    for (auto& [id, rows] : by_agent) {
        try {
            rec.tracks.push_back(build_track(id, rows, rec.meta));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), first_line[id]);
        }
    }
    return rec;
}

Recording parse_tracks_file(const std::filesystem::path& path, const ColumnRenames& renames) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    auto rec = parse_tracks(in, renames);
    if (rec.meta.recording_id.empty()) rec.meta.recording_id = path.stem().string();
    return rec;
}

void write_tracks(std::ostream& out, const Recording& rec) {
    std::size_t rows = 0;
    for (const auto& t : rec.tracks) rows += t.size();
    out << "# recording_id=" << rec.meta.recording_id << '\n';
    out << "# frame_rate=" << fmt_double(rec.meta.frame_rate) << '\n';
    out << "# lanes=";
    for (std::size_t i = 0; i < rec.meta.lanes.size(); ++i) {
        const auto& l = rec.meta.lanes[i];
        out << (i ? ";" : "") << l.lane_id << ':' << fmt_double(l.y_min) << ':' << fmt_double(l.y_max);
    }
    out << '\n';
    out << "# position=" << (rec.meta.corner_positions ? "corner" : "center") << '\n';
    out << "# rows=" << rows << '\n';
    for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
    out << '\n';

    struct Ref {
        long long frame;
        AgentId id;
        const AgentTrack* track;
        std::size_t k;
    };
    std::vector<Ref> refs;
    refs.reserve(rows);
    for (const auto& t : rec.tracks) {
        const auto f0 = std::llround(t.t_first * rec.meta.frame_rate);
        for (std::size_t k = 0; k < t.size(); ++k) refs.push_back({f0 + static_cast<long long>(k), t.agent_id, &t, k});
    }
    std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
    });
    for (const auto& r : refs) {
        const auto& t = *r.track;
        const double c = std::cos(t.heading[r.k]);
        const double s = std::sin(t.heading[r.k]);
        const double ox = rec.meta.corner_positions ? 0.5 * t.length : 0.0;
        const double oy = rec.meta.corner_positions ? 0.5 * t.width : 0.0;
        out << r.frame << ',' << r.id << ',' << fmt_double(t.x[r.k] - ox) << ',' << fmt_double(t.y[r.k] - oy) << ','
            << fmt_double(t.speed[r.k] * c) << ',' << fmt_double(t.speed[r.k] * s) << ','
            << fmt_double(t.long_accel[r.k] * c) << ',' << fmt_double(t.long_accel[r.k] * s) << ',' << t.lane_id
            << ',' << fmt_double(t.length) << ',' << fmt_double(t.width) << '\n';
    }
}

void SceneExtractionParams::validate() const {
    if (!(min_rel_speed_change >= 0.0) || !(min_scene_duration >= 0.0) || !(max_headway >= 0.0)) {
        throw InvalidInput("scene extraction parameters must be non-negative");
    }
}

std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
    if (window <= 1 || v.empty()) return v;
    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    std::vector<double> out(v.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto lo = std::max<std::ptrdiff_t>(0, i - half);
        const auto hi = std::min<std::ptrdiff_t>(n - 1, i - half + static_cast<std::ptrdiff_t>(window) - 1);
        double sum = 0.0;
        for (auto k = lo; k <= hi; ++k) sum += v[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<Scene> extract_causal_scenes(const std::vector<AgentTrack>& tracks, const RecordingMeta& meta,
                                         const SceneExtractionParams& params) {
    params.validate();
    std::vector<Scene> scenes;
    if (tracks.size() < 3) return scenes;
    const double dt = 1.0 / meta.frame_rate;
    const auto min_frames = static_cast<long long>(std::ceil(params.min_scene_duration / dt - 1e-9));

    std::vector<const AgentTrack*> sorted;
    for (const auto& t : tracks) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->agent_id < b->agent_id; });

    for (const auto* lead : sorted) {
        for (const auto* follow : sorted) {
            if (lead == follow || lead->lane_id != follow->lane_id) continue;
            const auto lf0 = first_frame(*lead);
            const auto ff0 = first_frame(*follow);
            const auto begin = std::max(lf0, ff0);
            const auto end = std::min(lf0 + static_cast<long long>(lead->size()),
                                      ff0 + static_cast<long long>(follow->size())) - 1;
            if (end < begin) continue;

            const auto in_convoy = [&](long long f) {
                const auto i = static_cast<std::size_t>(f - lf0);
                const auto j = static_cast<std::size_t>(f - ff0);
                const double h = follow->heading[j];
                const double dx = lead->x[i] - follow->x[j];
                const double dy = lead->y[i] - follow->y[j];
                const double along = dx * std::cos(h) + dy * std::sin(h);
                const double across = -dx * std::sin(h) + dy * std::cos(h);
                if (std::abs(across) > 0.5 * (lead->width + follow->width)) return false;
                const double gap = along - 0.5 * (lead->length + follow->length);
                if (gap <= 0.0) return false;
                return gap / std::max(follow->speed[j], 0.1) <= params.max_headway;
            };

            long long f = begin;
            while (f <= end) {
                while (f <= end && !in_convoy(f)) ++f;
                const auto run_begin = f;
                while (f <= end && in_convoy(f)) ++f;
                const auto run_end = f - 1;
                if (run_begin > end || run_end - run_begin + 1 < std::max<long long>(min_frames, 2)) continue;

                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (auto g = run_begin; g <= run_end; ++g) {
                    const double rel = follow->speed[static_cast<std::size_t>(g - ff0)] -
                                       lead->speed[static_cast<std::size_t>(g - lf0)];
                    lo = std::min(lo, rel);
                    hi = std::max(hi, rel);
                }
                if (hi - lo < params.min_rel_speed_change) continue;

                const AgentTrack* indep = nullptr;
                for (const auto* other : sorted) {
                    if (other == lead || other == follow || other->lane_id == lead->lane_id) continue;
                    const auto of0 = first_frame(*other);
                    if (of0 <= run_begin && of0 + static_cast<long long>(other->size()) - 1 >= run_end) {
                        indep = other;
                        break;
                    }
                }
                if (!indep) continue;

                Scene s;
                s.id = (meta.recording_id.empty() ? std::string("rec") : meta.recording_id) + "_" +
                       std::to_string(lead->agent_id) + "_" + std::to_string(follow->agent_id) + "_" +
                       std::to_string(run_begin);
                s.grid = {static_cast<double>(run_begin) * dt, dt, static_cast<std::size_t>(run_end - run_begin + 1)};
                for (const auto* t : {lead, follow, indep}) {
                    s.tracks.push_back(crop(*t, run_begin, run_end, params.smoothing_window));
                }
                s.roles = {{lead->agent_id, Role::convoy_head},
                           {follow->agent_id, Role::convoy_tail},
                           {indep->agent_id, Role::independent}};
                EntityCausalGraph truth({lead->agent_id, follow->agent_id, indep->agent_id});
                truth.add_edge(lead->agent_id, follow->agent_id);
                s.ground_truth = truth;
                s.metadata = {{"recording_id", meta.recording_id},
                              {"min_rel_speed_change", fmt_double(params.min_rel_speed_change)},
                              {"min_scene_duration", fmt_double(params.min_scene_duration)},
                              {"max_headway", fmt_double(params.max_headway)},
                              {"smoothing_window", std::to_string(params.smoothing_window)}};
                scenes.push_back(std::move(s));
            }
        }
    }
    return scenes;
}

} // namespace cfcd
