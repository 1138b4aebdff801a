"""Operational-space control pieces: admittance, constraint clamping with
Euler integration, the fixed return-to-target policy, and the spiral-search
baseline.

The 6-D configuration vector q is the task-space pose parameterization
(3 position components in meters, 3 orientation increments in radians); no
joint-space kinematics are modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .simenv.wrench import Wrench
from .transforms import FrameTag, Pose


@dataclass
class AdmittanceGains:
    """Velocity per unit force error, (m/s)/N and (rad/s)/(N*m).

    Lateral channels respond slowly so a 100 ms force action moves the tool
    by less than the insertion clearance; the vertical channel is faster so
    captures complete within a decision period.  Rotational gains are zero
    (position-mode orientation).
    """

    gain: np.ndarray = field(default_factory=lambda: np.array([0.0009, 0.0009, 0.003, 0.0, 0.0, 0.0]))

    def __post_init__(self):
        self.gain = np.asarray(self.gain, dtype=np.float64).reshape(6)
        if (self.gain < 0).any():
            raise ValueError("admittance gains must be non-negative")


@dataclass
class ConstraintBox:
    """Position/velocity box constraints plus the Euler integration step."""

    q_min: np.ndarray = field(default_factory=lambda: np.array([-0.5, -0.5, -0.5, -0.5, -0.5, -0.5]))
    q_max: np.ndarray = field(default_factory=lambda: np.array([0.5, 0.5, 0.05, 0.5, 0.5, 0.5]))
    qdot_min: np.ndarray = field(default_factory=lambda: np.array([-0.05, -0.05, -0.05, -0.5, -0.5, -0.5]))
    qdot_max: np.ndarray = field(default_factory=lambda: np.array([0.05, 0.05, 0.05, 0.5, 0.5, 0.5]))
    delta: float = 0.01

    def __post_init__(self):
        for name in ("q_min", "q_max", "qdot_min", "qdot_max"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64).reshape(6))
        if not (self.q_min < self.q_max).all():
            raise ValueError("q_min must be componentwise below q_max")
        if not (self.qdot_min < self.qdot_max).all():
            raise ValueError("qdot_min must be componentwise below qdot_max")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def with_delta(self, delta: float) -> "ConstraintBox":
        return replace(self, q_min=self.q_min.copy(), q_max=self.q_max.copy(),
                       qdot_min=self.qdot_min.copy(), qdot_max=self.qdot_max.copy(), delta=delta)


@dataclass
class SpiralParams:
    pitch: float = 0.0005  # m of radius per revolution
    # radius growth (pitch * rate / 2pi) sized so the search sweeps roughly
    # the middle of the start-error band within the episode budget
    angular_rate: float = 1.25 * math.pi  # rad/s
    push_force: float = 10.0  # N, downward during the search
    max_radius: float = 0.006  # m

    def __post_init__(self):
        if not self.pitch > 0:
            raise ValueError("spiral pitch must be positive")
        if not self.max_radius > 0:
            raise ValueError("spiral max_radius must be positive")


def admittance_step(f_desired: Wrench, f_measured: Wrench, gains: AdmittanceGains) -> np.ndarray:
    """Twist responding to the wrench error, before any constraint clamping."""
    f_desired.require_frame(FrameTag.EE)
    f_measured.require_frame(FrameTag.EE)
    return gains.gain * (f_desired.as_vector() - f_measured.as_vector())


def clamp_and_integrate(q: np.ndarray, qdot: np.ndarray, box: ConstraintBox) -> np.ndarray:
    """Clamp the velocity, Euler-integrate one step, clamp the position box."""
    q = np.asarray(q, dtype=np.float64).reshape(6)
    qdot = np.clip(np.asarray(qdot, dtype=np.float64).reshape(6), box.qdot_min, box.qdot_max)
    return np.clip(q + box.delta * qdot, box.q_min, box.q_max)


def fixed_policy_step(cp: Pose, uncertain_target: Pose, max_step: float) -> np.ndarray:
    """Position increment toward the (uncertain) target, capped at max_step."""
    if not max_step > 0:
        raise ValueError("max_step must be positive")
    delta = uncertain_target.position - cp.position
    dist = float(np.linalg.norm(delta))
    if dist <= max_step or dist == 0.0:
        return delta
    return delta * (max_step / dist)


def spiral_offset(params: SpiralParams, t: float) -> tuple[float, float]:
    """Archimedean spiral offset at time t, radius capped at max_radius."""
    if t < 0:
        raise ValueError("spiral time must be non-negative")
    theta = params.angular_rate * t
    r = min(params.pitch * theta / (2 * math.pi), params.max_radius)
    return r * math.cos(theta), r * math.sin(theta)
