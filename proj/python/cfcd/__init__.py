"""Causal discovery between driving agents via counterfactual simulation."""

import json

from . import _core
from ._core import (
    InvalidInput,
    ParseError,
    check_collision,
    controller_acceleration,
    default_lambda_grid,
    reward_cct,
    reward_speed,
    reward_ttc,
)

__all__ = [
    "InvalidInput",
    "ParseError",
    "check_collision",
    "config_hash",
    "controller_acceleration",
    "default_lambda_grid",
    "discover",
    "extract_decisions",
    "generate_synthetic_scene",
    "reward_cct",
    "reward_speed",
    "reward_ttc",
    "run",
    "score",
    "simulate",
]


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def generate_synthetic_scene(seed):
    return json.loads(_core.generate_synthetic_scene(seed))


def extract_decisions(scene_or_track, accel_threshold=0.2, min_duration=1.0, min_speed_delta=1.0):
    """Decisions of a scene (dict with "tracks") or of a single track."""
    obj = json.loads(scene_or_track) if isinstance(scene_or_track, str) else scene_or_track
    fn = _core.extract_scene_decisions if "tracks" in obj else _core.extract_track_decisions
    return json.loads(fn(json.dumps(obj), accel_threshold, min_duration, min_speed_delta))


def discover(scene, variant="agency", reward_threshold=1.0, ttc_horizon=20.0):
    return json.loads(_core.discover(_dump(scene), variant, reward_threshold, ttc_horizon))


def simulate(scene, decisions, start_time, horizon, dt=0.0):
    """Trace CSV text with columns time,agent_id,x,y,speed,accel,ttc,cct."""
    return _core.simulate_csv(_dump(scene), _dump(decisions), start_time, horizon, dt)


def score(pred, truth):
    """(precision, recall, f1) of a predicted entity graph."""
    return _core.score(_dump(pred), _dump(truth))


def config_hash(config):
    return _core.config_hash(_dump(config))


def run(command, config):
    """Runs a CLI subcommand in-process and returns its exit code."""
    return _core.run_command(command, _dump(config))
