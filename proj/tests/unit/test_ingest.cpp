#include <doctest.h>

#include <sstream>

#include "cfcd/decisions.hpp"
#include "cfcd/errors.hpp"
#include "cfcd/ingest.hpp"
#include "cfcd/sim.hpp"
#include "cfcd/synth.hpp"
#include "helpers.hpp"

using namespace cfcd;

namespace {

const char* kHeader = "frame,id,x,y,xVelocity,yVelocity,xAcceleration,yAcceleration,laneId,width,height\n";

// Convoy of 1 (lead) and 2 (follow) in lane 2, vehicle 3 in lane 3. The lead
// brakes while the follower holds speed, then the follower brakes as much.
Recording convoy_recording(double lead_drop = 6.0) {
    const double dt = 0.04;
    RecordingMeta meta;
    meta.recording_id = "07";
    meta.lanes = {{2, 0.0, 3.75}, {3, 3.75, 7.5}};
    Recording rec;
    rec.meta = meta;
    const double brake = lead_drop / 3.0;
    auto lead = testing::accel_track(1, 25.0, 16.0, dt, [&](double t) { return t >= 4.0 - 1e-9 && t < 7.0 - 1e-9 ? -brake : 0.0; }, 40.0, 1.8);
    auto follow = testing::accel_track(2, 25.0, 16.0, dt, [&](double t) { return t >= 7.0 - 1e-9 && t < 10.0 - 1e-9 ? -brake : 0.0; }, 0.0, 1.8);
    auto other = testing::accel_track(3, 30.0, 16.0, dt, [](double) { return 0.0; }, 10.0, 5.6);
    lead.lane_id = follow.lane_id = 2;
    other.lane_id = 3;
    rec.tracks = {lead, follow, other};
    return rec;
}

std::string to_text(const Recording& rec) {
    std::ostringstream out;
    write_tracks(out, rec);
    return out.str();
}

} // namespace

TEST_CASE("parse a minimal recording") {
    std::istringstream in(std::string("# recording_id=x\n# frame_rate=25\n# lanes=1:0:3.5;2:3.5:7\n") + kHeader +
                          "1,5,10,1.5,20,0,0.5,0,1,4.5,1.8\n"
                          "2,5,10.8,1.5,20.02,0,0.5,0,1,4.5,1.8\n"
                          "3,5,11.6,1.5,20.04,0,0.5,0,2,4.5,1.8\n");
    const auto rec = parse_tracks(in);
    CHECK(rec.meta.recording_id == "x");
    CHECK(rec.meta.frame_rate == 25.0);
    REQUIRE(rec.meta.lanes.size() == 2);
    CHECK(rec.meta.lanes[1].y_max == 7.0);
    REQUIRE(rec.tracks.size() == 1);
    const auto& t = rec.tracks[0];
    CHECK(t.dt == doctest::Approx(0.04));
    CHECK(t.t_first == doctest::Approx(0.04));
    CHECK(t.size() == 3);
    CHECK(t.lane_id == 1);
    CHECK(t.length == 4.5);
    CHECK(t.long_accel[1] == 0.5);
    CHECK(t.speed[2] == doctest::Approx(20.04));
}

TEST_CASE("velocity vector becomes speed and heading") {
    std::istringstream in(std::string(kHeader) + "0,1,0,0,3,4,0,0,1,4,2\n1,1,0.12,0.16,3,4,0,0,1,4,2\n");
    const auto t = parse_tracks(in).tracks.at(0);
    CHECK(t.speed[0] == doctest::Approx(5.0));
    CHECK(t.heading[0] == doctest::Approx(std::atan2(4.0, 3.0)));
}

TEST_CASE("acceleration is differenced when absent") {
    std::istringstream in("frame,id,x,y,xVelocity,yVelocity,laneId,width,height\n"
                          "0,1,0,0,10,0,1,4,2\n1,1,0.4,0,10.1,0,1,4,2\n2,1,0.8,0,10.1,0,1,4,2\n");
    const auto t = parse_tracks(in).tracks.at(0);
    CHECK(t.long_accel[0] == doctest::Approx(2.5));
    CHECK(t.long_accel[1] == doctest::Approx(0.0));
}

TEST_CASE("column renames") {
    std::istringstream in("frame,trackId,x,y,xVelocity,yVelocity,laneId,width,height\n0,1,0,0,10,0,1,4,2\n1,1,0.4,0,10,0,1,4,2\n");
    const auto rec = parse_tracks(in, {{"trackId", "id"}});
    CHECK(rec.tracks.at(0).agent_id == 1);
}

TEST_CASE("corner positions are shifted to the centre") {
    std::istringstream in(std::string("# position=corner\n") + kHeader + "0,1,0,0,10,0,0,0,1,4,2\n1,1,0.4,0,10,0,0,0,1,4,2\n");
    const auto t = parse_tracks(in).tracks.at(0);
    CHECK(t.x[0] == 2.0);
    CHECK(t.y[0] == 1.0);
}

TEST_CASE("parse errors") {
    SUBCASE("empty track section") {
        std::istringstream in(std::string("# frame_rate=25\n") + kHeader);
        const auto rec = parse_tracks(in);
        CHECK(rec.tracks.empty());
        CHECK(rec.meta.frame_rate == 25.0);
    }
    SUBCASE("malformed number reports its line") {
        std::istringstream in(std::string(kHeader) + "0,1,0,0,10,0,0,0,1,4,2\n1,1,zero,0,10,0,0,0,1,4,2\n");
        try {
            parse_tracks(in);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("wrong field count") {
        std::istringstream in(std::string(kHeader) + "0,1,0,0,10\n");
        CHECK_THROWS_AS(parse_tracks(in), ParseError);
    }
    SUBCASE("missing column") {
        std::istringstream in("frame,id,x,y\n0,1,0,0\n");
        CHECK_THROWS_AS(parse_tracks(in), ParseError);
    }
    SUBCASE("declared row count mismatch") {
        std::istringstream in(std::string("# rows=3\n") + kHeader + "0,1,0,0,10,0,0,0,1,4,2\n1,1,0.4,0,10,0,0,0,1,4,2\n");
        CHECK_THROWS_AS(parse_tracks(in), ParseError);
    }
    SUBCASE("frame gap") {
        std::istringstream in(std::string(kHeader) + "0,1,0,0,10,0,0,0,1,4,2\n2,1,0.8,0,10,0,0,0,1,4,2\n");
        CHECK_THROWS_AS(parse_tracks(in), InvalidInput);
    }
    SUBCASE("duplicate frame") {
        std::istringstream in(std::string(kHeader) + "0,1,0,0,10,0,0,0,1,4,2\n0,1,0.8,0,10,0,0,0,1,4,2\n");
        CHECK_THROWS_AS(parse_tracks(in), ParseError);
    }
    SUBCASE("bad frame rate") {
        std::istringstream in(std::string("# frame_rate=0\n") + kHeader);
        CHECK_THROWS_AS(parse_tracks(in), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_tracks_file("/nonexistent/tracks.csv"), ParseError);
    }
}

TEST_CASE("write then parse is the identity") {
    auto rec = convoy_recording();
    for (auto& t : rec.tracks) t.t_first = 1.0;  // frame 25
    std::istringstream in(to_text(rec));
    const auto back = parse_tracks(in);
    CHECK(back.meta.recording_id == rec.meta.recording_id);
    CHECK(back.meta.lanes.size() == 2);
    REQUIRE(back.tracks.size() == rec.tracks.size());
    for (std::size_t i = 0; i < rec.tracks.size(); ++i) CHECK(back.tracks[i] == rec.tracks[i]);

    // Oblique motion survives within printing precision.
    Recording tilted;
    tilted.tracks = {testing::accel_track(4, 20.0, 1.0, 0.04, [](double) { return 1.0; })};
    for (auto& h : tilted.tracks[0].heading) h = 0.3;
    std::istringstream tin(to_text(tilted));
    const auto tb = parse_tracks(tin).tracks.at(0);
    for (std::size_t k = 0; k < tb.size(); ++k) {
        CHECK(tb.speed[k] == doctest::Approx(tilted.tracks[0].speed[k]).epsilon(1e-14));
        CHECK(tb.heading[k] == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(tb.long_accel[k] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("moving average") {
    CHECK(moving_average({1, 2, 3}, 0) == std::vector<double>{1, 2, 3});
    const auto m = moving_average({0, 3, 6, 9}, 3);
    CHECK(m[0] == doctest::Approx(1.5));
    CHECK(m[1] == doctest::Approx(3.0));
    CHECK(m[3] == doctest::Approx(7.5));
}

TEST_CASE("convoy scene extraction") {
    SceneExtractionParams params;
    params.min_scene_duration = 10.0;

    SUBCASE("one convoy with a sufficient swing") {
        const auto rec = convoy_recording(6.0);
        const auto scenes = extract_causal_scenes(rec.tracks, rec.meta, params);
        REQUIRE(scenes.size() == 1);
        const auto& s = scenes[0];
        CHECK_NOTHROW(s.validate());
        CHECK(s.id == "07_1_2_0");
        CHECK(s.tracks.size() == 3);
        CHECK(s.roles.at(1) == Role::convoy_head);
        CHECK(s.roles.at(2) == Role::convoy_tail);
        CHECK(s.roles.at(3) == Role::independent);
        REQUIRE(s.ground_truth);
        CHECK(s.ground_truth->edges() == std::set<std::pair<AgentId, AgentId>>{{1, 2}});
        CHECK(s.metadata.at("min_rel_speed_change") == "5");
    }
    SUBCASE("too small a swing") {
        const auto rec = convoy_recording(3.0);
        CHECK(extract_causal_scenes(rec.tracks, rec.meta, params).empty());
    }
    SUBCASE("no independent vehicle") {
        auto rec = convoy_recording(6.0);
        rec.tracks.pop_back();
        CHECK(extract_causal_scenes(rec.tracks, rec.meta, params).empty());
    }
    SUBCASE("headway too long") {
        const auto rec = convoy_recording(6.0);
        params.max_headway = 0.5;
        CHECK(extract_causal_scenes(rec.tracks, rec.meta, params).empty());
    }
    SUBCASE("scene window shorter than required") {
        const auto rec = convoy_recording(6.0);
        params.min_scene_duration = 20.0;
        CHECK(extract_causal_scenes(rec.tracks, rec.meta, params).empty());
    }
    SUBCASE("smoothing only touches acceleration") {
        const auto rec = convoy_recording(6.0);
        params.smoothing_window = 5;
        const auto s = extract_causal_scenes(rec.tracks, rec.meta, params).at(0);
        CHECK(s.tracks[0].speed == rec.tracks[0].speed);
        CHECK(s.tracks[0].long_accel != rec.tracks[0].long_accel);
    }
    SUBCASE("invalid params") {
        params.max_headway = -1.0;
        const auto rec = convoy_recording(6.0);
        CHECK_THROWS_AS(extract_causal_scenes(rec.tracks, rec.meta, params), InvalidInput);
    }
}

TEST_CASE("synthetic scenes") {
    SUBCASE("deterministic per seed") {
        CHECK(generate_synthetic_scene(7) == generate_synthetic_scene(7));
        CHECK_FALSE(generate_synthetic_scene(7) == generate_synthetic_scene(8));
    }
    SUBCASE("default spec certifies a counterfactual collision") {
        const auto s = generate_synthetic_scene(7);
        CHECK_NOTHROW(s.validate());
        CHECK(s.metadata.at("counterfactual_collision") == "true");
        CHECK(s.metadata.at("factual_collision") == "false");

        // Re-check the certificate independently.
        auto d = scripted_decisions(s);
        DecisionSet without_tail;
        for (const auto& x : d.all())
            if (x.agent_id != kTailId) without_tail.add(x);
        SimConfig cfg;
        cfg.horizon = s.grid.t_end();
        const auto trace = simulate(s, without_tail, cfg);
        bool hit = false;
        for (const auto& ev : trace.collisions) hit |= ev.a == kHeadId && ev.b == kTailId;
        CHECK(hit);
        CHECK(simulate(s, d, cfg).collisions.empty());
    }
    SUBCASE("scripted decisions are recoverable") {
        SyntheticSpec spec;
        spec.follower_delay = {0.0, 0.0};
        spec.follower_decel_scale = {1.0, 1.0};
        spec.follower_extra_drop = {0.0, 0.0};
        const auto s = generate_synthetic_scene(11, spec);
        const auto got = extract_scene_decisions(s, ExtractConfig{});
        const auto want = scripted_decisions(s);
        for (AgentId id : {kHeadId, kTailId}) {
            REQUIRE(got.of(id).size() == want.of(id).size());
            for (std::size_t i = 0; i < got.of(id).size(); ++i) {
                CHECK(std::abs(got.of(id)[i].decision_time - want.of(id)[i].decision_time) <= s.grid.dt + 1e-9);
                CHECK(std::abs(got.of(id)[i].goal.target_speed - want.of(id)[i].goal.target_speed) <= 0.1);
            }
        }
        CHECK(got.of(kHeadId).front().decision_time == doctest::Approx(got.of(kTailId).front().decision_time));
    }
    SUBCASE("stationary distant independent vehicle only holds") {
        SyntheticSpec spec;
        spec.independent_speed = {0.0, 0.0};
        spec.independent_offset = {2000.0, 2000.0};
        spec.independent_change_probability = 0.0;
        const auto s = generate_synthetic_scene(2, spec);
        const auto d = extract_decisions(s.track(kIndependentId), ExtractConfig{});
        REQUIRE(d.size() == 1);
        CHECK(is_fallback(d[0]));
        CHECK(d[0].goal.target_speed == 0.0);
    }
    SUBCASE("infeasible specs") {
        SyntheticSpec spec;
        spec.headway = {-1.0, 1.0};
        CHECK_THROWS_AS(generate_synthetic_scene(1, spec), InvalidInput);
        spec = {};
        spec.cruise_speed = {30.0, 20.0};
        CHECK_THROWS_AS(generate_synthetic_scene(1, spec), InvalidInput);
        spec = {};
        spec.dt = 0.0;
        CHECK_THROWS_AS(generate_synthetic_scene(1, spec), InvalidInput);
    }
    SUBCASE("derived seeds differ") {
        CHECK(derive_seed(1, 0) != derive_seed(1, 1));
        CHECK(derive_seed(1, 0) != derive_seed(2, 0));
        CHECK(derive_seed(5, 9) == derive_seed(5, 9));
    }
}
