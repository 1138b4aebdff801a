"""Workbench configuration: one JSON document covering the scene, control,
camera, teaching, learner, and benchmark settings, with defaults for every
absent key."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .control import AdmittanceGains, ConstraintBox, SpiralParams
from .rl import LearnerConfig
from .servo import CameraModel
from .simenv import SceneConfig, SceneError
from .transforms import Pose


class ConfigError(ValueError):
    """Configuration file is unreadable or violates an invariant."""


@dataclass
class TeachingConfig:
    servo_height: float = 0.15  # m, observation pose above the grasp pose
    servo_dt: float = 0.01  # s
    servo_gain: float = 2.0  # 1/s
    settle_time: float = 1.0  # s of follow after the script ends
    pixel_noise_sigma: float = 0.0  # px
    noise_seed: int = 0
    feature_square_side: float = 0.04  # m
    feature_top_offset: float = 0.03  # m from the object tip to the fiducial plane

    def validate(self):
        if not self.servo_height > 0:
            raise ConfigError("teaching servo_height must be positive")
        if not self.servo_dt > 0:
            raise ConfigError("teaching servo_dt must be positive")


@dataclass
class ExecutionConfig:
    trials: int = 100
    replay_force_stop: float = 15.0  # N protective stop in the gross phase
    action_trials: int = 200  # per set in the action study
    action_step_cap: int = 20

    def validate(self):
        if self.trials <= 0 or self.action_trials <= 0:
            raise ConfigError("trial counts must be positive")


@dataclass
class WorkbenchConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    gains: AdmittanceGains = field(default_factory=AdmittanceGains)
    box: ConstraintBox = field(default_factory=ConstraintBox)
    spiral: SpiralParams = field(default_factory=SpiralParams)
    camera: CameraModel = field(default_factory=CameraModel)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    teaching: TeachingConfig = field(default_factory=TeachingConfig)
    execution: ExecutionConfig = field(default_factory=ExecutionConfig)
    artifacts_dir: str = "artifacts"

    def validate(self):
        self.scene.validate()
        self.teaching.validate()
        self.execution.validate()

    def to_dict(self) -> dict:
        return {
            "scene": self.scene.to_dict(),
            "gains": {"gain": self.gains.gain.tolist()},
            "box": {
                "q_min": self.box.q_min.tolist(),
                "q_max": self.box.q_max.tolist(),
                "qdot_min": self.box.qdot_min.tolist(),
                "qdot_max": self.box.qdot_max.tolist(),
                "delta": self.box.delta,
            },
            "spiral": {
                "pitch": self.spiral.pitch,
                "angular_rate": self.spiral.angular_rate,
                "push_force": self.spiral.push_force,
                "max_radius": self.spiral.max_radius,
            },
            "camera": {
                "fx": self.camera.fx,
                "fy": self.camera.fy,
                "cx": self.camera.cx,
                "cy": self.camera.cy,
                "e_x_c": self.camera.e_x_c.to_list(),
            },
            "learner": self.learner.to_dict(),
            "teaching": vars(self.teaching).copy(),
            "execution": vars(self.execution).copy(),
            "artifacts_dir": self.artifacts_dir,
        }


def _build_section(cls, data: dict, name: str):
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {name} section: {exc}") from exc


def config_from_dict(data: dict) -> WorkbenchConfig:
    known = {"scene", "gains", "box", "spiral", "camera", "learner",
             "teaching", "execution", "artifacts_dir"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    try:
        scene = SceneConfig.from_dict(data.get("scene", {}))
    except SceneError as exc:
        raise ConfigError(f"invalid scene section: {exc}") from exc

    gains = _build_section(AdmittanceGains, data.get("gains", {}), "gains")
    box = _build_section(ConstraintBox, data.get("box", {}), "box")
    spiral = _build_section(SpiralParams, data.get("spiral", {}), "spiral")

    camera_data = dict(data.get("camera", {}))
    if "e_x_c" in camera_data:
        camera_data["e_x_c"] = Pose.from_list(camera_data["e_x_c"])
    camera = _build_section(CameraModel, camera_data, "camera")

    try:
        learner = LearnerConfig.from_dict(data.get("learner", {}))
    except ValueError as exc:
        raise ConfigError(f"invalid learner section: {exc}") from exc

    teaching = _build_section(TeachingConfig, data.get("teaching", {}), "teaching")
    execution = _build_section(ExecutionConfig, data.get("execution", {}), "execution")

    cfg = WorkbenchConfig(scene=scene, gains=gains, box=box, spiral=spiral,
                          camera=camera, learner=learner, teaching=teaching,
                          execution=execution,
                          artifacts_dir=data.get("artifacts_dir", "artifacts"))
    cfg.validate()
    return cfg


def load_config(path) -> WorkbenchConfig:
    """Read and validate a config file; absent keys take defaults."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return config_from_dict(data)


def save_config(cfg: WorkbenchConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
