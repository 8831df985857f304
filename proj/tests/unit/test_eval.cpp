#include <doctest.h>

#include <sstream>

#include "cfcd/errors.hpp"
#include "cfcd/eval.hpp"
#include "cfcd/synth.hpp"

using namespace cfcd;

namespace {

EntityCausalGraph graph(std::initializer_list<std::pair<AgentId, AgentId>> edges) {
    EntityCausalGraph g({1, 2, 3});
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
}

} // namespace

TEST_CASE("confusion counts") {
    const auto truth = graph({{1, 2}});
    CHECK(confusion(truth, truth) == Confusion{1, 0, 5, 0});
    CHECK(confusion(graph({}), truth) == Confusion{0, 0, 5, 1});
    const auto c = confusion(graph({{1, 2}, {3, 2}}), truth);
    CHECK(c == Confusion{1, 1, 4, 0});
    CHECK(c.total() == 6);
    CHECK_THROWS_AS(confusion(EntityCausalGraph({1, 2}), truth), InvalidInput);
}

TEST_CASE("precision recall f1") {
    auto s = prf1({1, 0, 5, 0});
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    s = prf1({0, 0, 6, 0});
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    s = prf1({1, 1, 4, 0});
    CHECK(s.precision == 0.5);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
    s = prf1({0, 0, 5, 1});
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
    s = prf1({0, 2, 4, 0});
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 0.0);
    // F1 = 2tp / (2tp + fp + fn) everywhere.
    for (std::size_t tp = 0; tp < 4; ++tp)
        for (std::size_t fp = 0; fp < 4; ++fp)
            for (std::size_t fn = 0; fn < 4; ++fn) {
                if (tp + fp + fn == 0) continue;
                CHECK(prf1({tp, fp, 0, fn}).f1 == doctest::Approx(2.0 * tp / (2.0 * tp + fp + fn)));
            }
}

TEST_CASE("random baseline") {
    const auto scene = generate_synthetic_scene(1);
    CHECK(random_baseline(scene, 0.0, 3).edges().empty());
    CHECK(random_baseline(scene, 1.0, 3).edges().size() == 6);
    CHECK(random_baseline(scene, 0.5, 3) == random_baseline(scene, 0.5, 3));
    CHECK_THROWS_AS(random_baseline(scene, 1.5, 3), InvalidInput);

    double edges = 0.0;
    double f1_a = 0.0;
    double f1_b = 0.0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const auto g = random_baseline(scene, 0.5, seed);
        edges += static_cast<double>(g.edges().size());
        f1_a += prf1(confusion(g, *scene.ground_truth)).f1;
        f1_b += prf1(confusion(random_baseline(scene, 0.5, seed + 10000), *scene.ground_truth)).f1;
    }
    CHECK(edges / 1e4 == doctest::Approx(3.0).epsilon(0.1 / 3.0));
    CHECK(std::abs(f1_a - f1_b) / 1e4 <= 0.02);
    CHECK(f1_a / 1e4 < 0.5);
}

TEST_CASE("aggregation and grid") {
    const auto g = default_lambda_grid();
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.01);
    CHECK(g[1] == doctest::Approx(0.1));
    CHECK(g.back() == 1.0);

    const auto row = aggregate("reward", 0.5, {{1, 1, 1}, {0, 0.5, 0}}, {1.0, 3.0});
    CHECK(row.precision_mean == 0.5);
    CHECK(row.recall_mean == 0.75);
    CHECK(row.f1_mean == 0.5);
    CHECK(row.wall_time_mean_s == 2.0);
    CHECK(row.n_scenes == 2);
}

TEST_CASE("sweep rows") {
    std::vector<Scene> scenes;
    for (std::uint64_t s = 0; s < 4; ++s) scenes.push_back(generate_synthetic_scene(derive_seed(9, s)));
    auto unlabelled = scenes.back();
    unlabelled.ground_truth.reset();
    scenes.push_back(unlabelled);
    CdConfig base;
    base.sim.dt = 0.0;

    const auto agency = sweep(scenes, TestVariant::agency, default_lambda_grid(), base);
    REQUIRE(agency.rows.size() == 1);
    CHECK_FALSE(agency.rows[0].lambda.has_value());
    CHECK(agency.rows[0].f1_mean == 1.0);
    CHECK(agency.rows[0].n_scenes == 4);
    CHECK(agency.skipped == 1);

    const auto reward = sweep(scenes, TestVariant::reward, default_lambda_grid(), base);
    REQUIRE(reward.rows.size() == 11);
    CHECK(reward.rows[0].lambda == 0.01);
    for (const auto& r : reward.rows) {
        CHECK(r.f1_mean >= 0.0);
        CHECK(r.f1_mean <= 1.0);
    }

    std::ostringstream out;
    write_metrics_csv(out, {agency.rows[0], reward.rows[0]});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "variant,lambda,precision_mean,recall_mean,f1_mean,wall_time_mean_s,n_scenes");
    std::getline(in, line);
    CHECK(line.rfind("agency,NA,1,1,1,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("reward,0.01,", 0) == 0);
}
