#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>

#include "cfcd/decisions.hpp"
#include "cfcd/discovery.hpp"
#include "cfcd/errors.hpp"
#include "cfcd/eval.hpp"
#include "cfcd/pipeline.hpp"
#include "cfcd/scene_io.hpp"
#include "cfcd/sim.hpp"
#include "cfcd/synth.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

cfcd::ExtractConfig extract_config(double accel, double duration, double speed_delta) {
    cfcd::ExtractConfig c{accel, duration, speed_delta};
    c.validate();
    return c;
}

std::string extract_track(const std::string& track_json, double accel, double duration, double speed_delta) {
    const auto track = cfcd::track_from_json(json::parse(track_json));
    json out = json::array();
    for (const auto& d : cfcd::extract_decisions(track, extract_config(accel, duration, speed_delta))) {
        out.push_back(cfcd::to_json(d));
    }
    return out.dump();
}

std::string extract_scene(const std::string& scene_json, double accel, double duration, double speed_delta) {
    const auto scene = cfcd::scene_from_json(json::parse(scene_json));
    return cfcd::to_json(cfcd::extract_scene_decisions(scene, extract_config(accel, duration, speed_delta))).dump();
}

std::string synth(std::uint64_t seed) { return cfcd::to_json(cfcd::generate_synthetic_scene(seed)).dump(); }

std::string discover(const std::string& scene_json, const std::string& variant, double lambda, double ttc_horizon) {
    const auto scene = cfcd::scene_from_json(json::parse(scene_json));
    cfcd::RunConfig rc;
    rc.ttc_horizon = ttc_horizon;
    const auto v = cfcd::test_variant_from_string(variant);
    const auto cfg = rc.cd_config(v, lambda);
    const auto r = cfcd::discover(scene, cfg);
    const std::optional<double> tag = v == cfcd::TestVariant::agency ? std::nullopt : std::optional<double>(lambda);
    return cfcd::discovery_report(scene.id, r, v, tag, cfcd::config_hash(rc)).dump();
}

std::string simulate(const std::string& scene_json, const std::string& decisions_json, double start_time,
                     double horizon, double dt) {
    const auto scene = cfcd::scene_from_json(json::parse(scene_json));
    const auto decisions = cfcd::decision_set_from_json(json::parse(decisions_json));
    cfcd::SimConfig cfg;
    cfg.dt = dt > 0.0 ? dt : scene.grid.dt;
    cfg.start_time = start_time;
    cfg.horizon = horizon;
    std::ostringstream out;
    cfcd::write_trace_csv(out, cfcd::simulate(scene, decisions, cfg));
    return out.str();
}

cfcd::BodyState body(double x, double y, double heading, double length, double width) {
    cfcd::BodyState b;
    b.position = {x, y};
    b.heading = heading;
    b.half_length = length / 2.0;
    b.half_width = width / 2.0;
    return b;
}

py::tuple score(const std::string& pred_json, const std::string& truth_json) {
    const auto c = cfcd::confusion(cfcd::entity_graph_from_json(json::parse(pred_json)),
                                   cfcd::entity_graph_from_json(json::parse(truth_json)));
    const auto s = cfcd::prf1(c);
    return py::make_tuple(s.precision, s.recall, s.f1);
}

int run_command(const std::string& name, const std::string& config_json) {
    const auto cfg = cfcd::run_config_from_json(json::parse(config_json));
    std::ostringstream log;
    int rc = cfcd::kExitInputError;
    if (name == "ingest") rc = cfcd::cmd_ingest(cfg, log);
    else if (name == "synth") rc = cfcd::cmd_synth(cfg, log);
    else if (name == "discover") rc = cfcd::cmd_discover(cfg, log);
    else if (name == "evaluate") rc = cfcd::cmd_evaluate(cfg, log);
    else if (name == "sweep") rc = cfcd::cmd_sweep(cfg, log);
    else throw cfcd::InvalidInput("unknown command '" + name + "'");
    py::print(log.str(), py::arg("end") = "");
    return rc;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Counterfactual causal discovery core (JSON in, JSON out)";

    py::register_exception<cfcd::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<cfcd::ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("extract_track_decisions", &extract_track, py::arg("track_json"), py::arg("accel_threshold") = 0.2,
          py::arg("min_duration") = 1.0, py::arg("min_speed_delta") = 1.0);
    m.def("extract_scene_decisions", &extract_scene, py::arg("scene_json"), py::arg("accel_threshold") = 0.2,
          py::arg("min_duration") = 1.0, py::arg("min_speed_delta") = 1.0);
    m.def("generate_synthetic_scene", &synth, py::arg("seed"));
    m.def("discover", &discover, py::arg("scene_json"), py::arg("variant") = "agency", py::arg("reward_threshold") = 1.0,
          py::arg("ttc_horizon") = 20.0);
    m.def("simulate_csv", &simulate, py::arg("scene_json"), py::arg("decisions_json"), py::arg("start_time"),
          py::arg("horizon"), py::arg("dt") = 0.0);
    m.def(
        "check_collision",
        [](std::array<double, 5> a, std::array<double, 5> b) {
            return cfcd::check_collision(body(a[0], a[1], a[2], a[3], a[4]), body(b[0], b[1], b[2], b[3], b[4]));
        },
        py::arg("a"), py::arg("b"), "Rectangles as (x, y, heading, length, width).");
    m.def("controller_acceleration", [](double v, double target_speed, double target_time, double now, double dt) {
        return cfcd::controller_acceleration(v, cfcd::Goal{target_speed, target_time}, now, dt);
    });
    m.def("reward_ttc", &cfcd::reward_ttc);
    m.def("reward_cct", [](double cct) { return cfcd::reward_cct(cct); });
    m.def("reward_speed", &cfcd::reward_speed);
    m.def("score", &score, py::arg("pred_json"), py::arg("truth_json"));
    m.def("default_lambda_grid", &cfcd::default_lambda_grid);
    m.def("config_hash", [](const std::string& config_json) {
        return cfcd::config_hash(cfcd::run_config_from_json(json::parse(config_json)));
    });
    m.def("run_command", &run_command, py::arg("name"), py::arg("config_json"));
}
