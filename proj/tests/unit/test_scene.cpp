#include <doctest.h>

#include "cfcd/errors.hpp"
#include "cfcd/scene.hpp"
#include "cfcd/scene_io.hpp"
#include "cfcd/synth.hpp"
#include "helpers.hpp"

using namespace cfcd;

namespace {

Decision dec(AgentId a, double t, double v = 10.0, double tt = -1.0) { return {a, t, {v, tt < 0 ? t + 1.0 : tt}}; }

DecisionCausalGraph three_agents() {
    DecisionCausalGraph g;
    g.decisions.add(dec(1, 1.0));
    g.decisions.add(dec(1, 5.0));
    g.decisions.add(dec(2, 2.0));
    g.decisions.add(dec(2, 6.0));
    g.decisions.add(dec(3, 0.0));
    return g;
}

} // namespace

TEST_CASE("time grid indexing and validation") {
    TimeGrid g{1.0, 0.5, 5};
    CHECK(g.time(2) == doctest::Approx(2.0));
    CHECK(g.t_end() == doctest::Approx(3.0));
    CHECK(g.nearest_index(2.24) == 2);
    CHECK_NOTHROW(g.validate());
    CHECK_THROWS_AS((TimeGrid{0.0, 0.0, 5}.validate()), InvalidInput);
    CHECK_THROWS_AS((TimeGrid{0.0, 0.1, 1}.validate()), InvalidInput);
}

TEST_CASE("track validation") {
    auto t = testing::accel_track(1, 10.0, 1.0, 0.04, [](double) { return 0.0; });
    CHECK_NOTHROW(t.validate());
    CHECK(t.covers(0.5));
    CHECK_FALSE(t.covers(1.5));
    CHECK(t.index_at(0.52) == 13);
    CHECK_THROWS_AS(t.index_at(2.0), InvalidInput);
    CHECK(t.speed_accel_residual() == doctest::Approx(0.0));

    auto bad = t;
    bad.x.pop_back();
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = t;
    bad.width = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("decision set ordering invariants") {
    DecisionSet d;
    d.add(dec(1, 5.0, 10.0, 7.0));
    d.add(dec(1, 1.0, 20.0, 3.0));
    CHECK(d.of(1).front().decision_time == 1.0);
    CHECK_NOTHROW(d.validate());
    CHECK(d.size() == 2);
    CHECK(d.contains(dec(1, 5.0, 10.0, 7.0)));
    CHECK(d.of(42).empty());

    DecisionSet overlap;
    overlap.add(dec(1, 1.0, 20.0, 4.0));
    overlap.add(dec(1, 3.0, 10.0, 5.0));
    CHECK_THROWS_AS(overlap.validate(), InvalidInput);

    DecisionSet backwards;
    backwards.add({1, 2.0, {10.0, 1.0}});
    CHECK_THROWS_AS(backwards.validate(), InvalidInput);
}

TEST_CASE("entity graph rejects self-loops and unknown nodes") {
    EntityCausalGraph g({3, 1, 2, 1});
    CHECK(g.nodes() == std::vector<AgentId>{1, 2, 3});
    CHECK_THROWS_AS(g.add_edge(1, 1), InvalidInput);
    CHECK_THROWS_AS(g.add_edge(1, 9), InvalidInput);
    g.add_edge(1, 2);
    CHECK(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(2, 1));
}

TEST_CASE("entity projection") {
    auto g = three_agents();

    SUBCASE("no links gives an empty graph over every agent") {
        const auto e = entity_projection(g);
        CHECK(e.nodes() == std::vector<AgentId>{1, 2, 3});
        CHECK(e.edges().empty());
    }
    SUBCASE("one link") {
        g.links.push_back({dec(1, 1.0), dec(2, 2.0)});
        const auto e = entity_projection(g);
        CHECK(e.edges() == std::set<std::pair<AgentId, AgentId>>{{1, 2}});
    }
    SUBCASE("parallel decision links collapse to one edge") {
        g.links.push_back({dec(1, 1.0), dec(2, 2.0)});
        g.links.push_back({dec(1, 5.0), dec(2, 6.0)});
        const auto once = entity_projection(g);
        CHECK(once.edges().size() == 1);
        g.links.push_back({dec(1, 5.0), dec(2, 6.0)});
        CHECK(entity_projection(g) == once);
    }
}

TEST_CASE("decision graph validation") {
    auto g = three_agents();
    g.links.push_back({dec(1, 1.0), dec(1, 5.0)});
    CHECK_THROWS_AS(g.validate(), InvalidInput);
    g.links = {{dec(2, 2.0), dec(1, 1.0)}};
    CHECK_THROWS_AS(g.validate(), InvalidInput);
    g.links = {{dec(1, 1.0), dec(2, 9.0)}};
    CHECK_THROWS_AS(g.validate(), InvalidInput);
    g.links = {{dec(1, 1.0), dec(2, 2.0)}};
    CHECK_NOTHROW(g.validate());
}

TEST_CASE("scene validation") {
    auto s = generate_synthetic_scene(3);
    CHECK_NOTHROW(s.validate());
    CHECK(s.agent_ids() == std::vector<AgentId>{1, 2, 3});

    auto dup = s;
    dup.tracks.push_back(dup.tracks.front());
    CHECK_THROWS_AS(dup.validate(), InvalidInput);

    auto misaligned = s;
    misaligned.tracks[0].t_first += 0.01;
    CHECK_THROWS_AS(misaligned.validate(), InvalidInput);

    auto no_roles = s;
    no_roles.roles.erase(kIndependentId);
    CHECK_THROWS_AS(no_roles.validate(), InvalidInput);
    no_roles.ground_truth.reset();
    CHECK_NOTHROW(no_roles.validate());
}

TEST_CASE("json round trips") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto s = generate_synthetic_scene(seed);
        CHECK(scene_from_json(json::parse(to_json(s).dump())) == s);
    }
    auto g = three_agents();
    g.links.push_back({dec(1, 1.0), dec(2, 2.0)});
    CHECK(decision_graph_from_json(json::parse(to_json(g).dump())) == g);
    const auto e = entity_projection(g);
    CHECK(entity_graph_from_json(json::parse(to_json(e).dump())) == e);

    // Non-representable decimals survive the text format.
    Decision d{7, 0.1 + 0.2, {1.0 / 3.0, 0.7}};
    CHECK(decision_from_json(json::parse(to_json(d).dump())) == d);
}

TEST_CASE("json errors") {
    CHECK_THROWS(scene_from_json(json::parse(R"({"grid": {"t_start": 0}})")));
    CHECK_THROWS_AS(read_json_file("/nonexistent/scene.json"), std::exception);
    CHECK_THROWS_AS(role_from_string("pilot"), InvalidInput);
}
