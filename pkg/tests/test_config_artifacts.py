import json

import numpy as np
import pytest

from tendbench import artifacts
from tendbench.artifacts import ArtifactError
from tendbench.config import ConfigError, WorkbenchConfig, config_from_dict, load_config, save_config
from tendbench.rl import LearnerConfig, QNetwork
from tendbench.teaching import ScriptedDemonstrator, TeachingRig, default_demo_waypoints, run_scripted_teaching
from tendbench.simenv import SceneConfig
from tendbench.transforms import Pose


def test_empty_config_gives_full_defaults(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{}")
    cfg = load_config(path)
    assert cfg.scene.peg_radius == pytest.approx(0.015)
    assert cfg.learner.episodes == 200
    assert cfg.teaching.servo_height == pytest.approx(0.15)


def test_config_validation_names_violated_invariant(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scene": {"hole_radius": 0.014, "peg_radius": 0.015}}))
    with pytest.raises(ConfigError, match="positive clearance"):
        load_config(path)


def test_config_parse_error_reports_position(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"scene": \n  nope}')
    with pytest.raises(ConfigError, match="line 2"):
        load_config(path)


def test_config_rejects_unknown_sections():
    with pytest.raises(ConfigError, match="unknown config sections"):
        config_from_dict({"typo_section": {}})


def test_config_save_load_round_trip(tmp_path):
    cfg = WorkbenchConfig()
    cfg.scene.hole_pose = Pose.from_translation(0.01, -0.02, 0.0)
    cfg.learner.episodes = 42
    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    again = load_config(path)
    assert again.to_dict() == cfg.to_dict()


def test_demo_script_round_trip(tmp_path):
    scene = SceneConfig()
    waypoints = default_demo_waypoints(scene)
    path = tmp_path / "demo.jsonl"
    artifacts.write_demo_script(path, waypoints)
    script = artifacts.read_demo_script(path)
    assert script.end_time == pytest.approx(waypoints[-1][0])
    assert script.pose_at(0.0).approx_equal(waypoints[0][1])


def test_demo_script_errors(tmp_path):
    with pytest.raises(ArtifactError, match="not found"):
        artifacts.read_demo_script(tmp_path / "nope.jsonl")
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"t": 0}\n')
    with pytest.raises(ArtifactError, match="bad script row"):
        artifacts.read_demo_script(bad)


@pytest.fixture(scope="module")
def teach_result():
    scene = SceneConfig()
    rig = TeachingRig()
    return run_scripted_teaching(rig, ScriptedDemonstrator(default_demo_waypoints(scene)))


def test_trajectory_round_trip(tmp_path, teach_result):
    path = tmp_path / "traj.jsonl"
    artifacts.write_trajectory(path, teach_result)
    loaded = artifacts.read_trajectory(path)
    assert loaded["dfp"].approx_equal(teach_result.final_pose, tol=1e-15)
    assert len(loaded["trajectory"]) == len(teach_result.session.trajectory)
    t0, p0 = loaded["trajectory"][0]
    assert p0.approx_equal(teach_result.session.trajectory[0][1], tol=1e-15)


def test_trajectory_missing_footer(tmp_path):
    path = tmp_path / "traj.jsonl"
    path.write_text('{"t": 0.0, "ee_pose": [0,0,0,1,0,0,0]}\n')
    with pytest.raises(ArtifactError, match="footer"):
        artifacts.read_trajectory(path)


def test_policy_round_trip_is_bit_faithful(tmp_path):
    rng = np.random.default_rng(0)
    net = QNetwork.initialize((6, 64, 64, 4), rng)
    learner = LearnerConfig()
    path = tmp_path / "policy.json"
    artifacts.save_policy(path, net, learner, seed=9)
    loaded, learner2, seed = artifacts.load_policy(path)
    x = rng.normal(size=6)
    assert np.array_equal(net.forward(x), loaded.forward(x))
    assert seed == 9
    assert learner2.to_dict() == learner.to_dict()


def test_policy_version_mismatch(tmp_path):
    rng = np.random.default_rng(0)
    net = QNetwork.initialize((6, 8, 8, 4), rng)
    path = tmp_path / "policy.json"
    artifacts.save_policy(path, net, LearnerConfig(), seed=0)
    doc = json.loads(path.read_text())
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ArtifactError, match="version"):
        artifacts.load_policy(path)


def test_policy_corrupt_file(tmp_path):
    path = tmp_path / "policy.json"
    path.write_text("{not json")
    with pytest.raises(ArtifactError, match="corrupt"):
        artifacts.load_policy(path)


def test_report_round_trip(tmp_path):
    doc = {"execution": [{"method": "spiral", "successes": 3}], "markdown": "# hi\n"}
    path = tmp_path / "report.json"
    artifacts.write_report(path, doc)
    loaded = artifacts.read_report(path)
    assert loaded == {"execution": [{"method": "spiral", "successes": 3}]}
    assert (tmp_path / "report.md").read_text() == "# hi\n"
