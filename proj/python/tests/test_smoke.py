import json

import pytest

import cfcd


def test_synthetic_scene_recovers_convoy_link():
    scene = cfcd.generate_synthetic_scene(3)
    report = cfcd.discover(scene)
    assert report["variant"] == "agency"
    assert report["lambda_dR"] is None
    assert report["entity_edges"] == [[1, 2]]
    assert report["nodes"] == [1, 2, 3]


def test_generation_is_deterministic():
    assert cfcd.generate_synthetic_scene(11) == cfcd.generate_synthetic_scene(11)


def test_extracted_decisions_match_script():
    scene = cfcd.generate_synthetic_scene(5)
    scripted = json.loads(scene["metadata"]["scripted_decisions"])
    extracted = cfcd.extract_decisions(scene)
    by_agent = {d["agent_id"]: d for d in extracted if d["target_time"] > d["t"]}
    for d in scripted:
        if d["agent_id"] in (1, 2):
            got = by_agent[d["agent_id"]]
            assert abs(got["t"] - d["t"]) <= 0.04 + 1e-9
            assert abs(got["target_speed"] - d["target_speed"]) <= 0.1


def test_simulate_trace_header():
    scene = cfcd.generate_synthetic_scene(2)
    csv = cfcd.simulate(scene, [], start_time=0.0, horizon=1.0)
    assert csv.splitlines()[0] == "time,agent_id,x,y,speed,accel,ttc,cct"


def test_collision_and_rewards():
    assert cfcd.check_collision((0, 0, 0, 4, 2), (3.9, 0, 0, 4, 2))
    assert not cfcd.check_collision((0, 0, 0, 4, 2), (4.1, 0, 0, 4, 2))
    assert cfcd.reward_cct(0.0) == 1.0
    assert cfcd.reward_cct(0.04) == 0.0
    assert cfcd.reward_ttc(float("inf")) == 1.0
    assert cfcd.reward_speed(0.0) == pytest.approx(0.5)


def test_scores_and_errors():
    truth = {"nodes": [1, 2, 3], "edges": [[1, 2]]}
    assert cfcd.score(truth, truth) == (1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        cfcd.score({"nodes": [1, 2], "edges": []}, truth)
    with pytest.raises(ValueError):
        cfcd.discover(cfcd.generate_synthetic_scene(1), variant="bogus")
    assert len(cfcd.default_lambda_grid()) == 11


def test_run_pipeline(tmp_path):
    config = {
        "paths": {"scene_dir": str(tmp_path / "scenes"), "output_dir": str(tmp_path / "out")},
        "synth": {"n": 3},
        "seed": 4,
    }
    assert cfcd.run("synth", config) == 0
    assert cfcd.run("discover", config) == 0
    assert cfcd.run("evaluate", config) == 0
    text = (tmp_path / "out" / "metrics.csv").read_text()
    assert cfcd.config_hash(config) in text.splitlines()[0]
    assert text.splitlines()[2].startswith("agency,NA,1,1,1,")
