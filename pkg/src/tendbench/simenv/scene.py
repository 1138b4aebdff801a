"""Scene description for the peg / chamfered-hole workspace.

The hole frame's surface plane sits at the hole pose's z; positive z runs
into the material (the package-wide insertion-axis convention).  The hole
pose must carry an identity rotation: the contact model assumes a vertical
bore axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from ..transforms import Pose

FORCE_SATURATION = 200.0  # N, contact force cap to avoid numeric blowup
FRICTION_V_EPS = 1e-4  # m/s, Coulomb regularization knee


class SceneError(ValueError):
    """A scene violates one of its invariants; the message names it."""


@dataclass
class SceneConfig:
    hole_pose: Pose = field(default_factory=Pose.identity)
    hole_radius: float = 0.0155
    peg_radius: float = 0.015
    chamfer_width: float = 0.0012
    chamfer_angle: float = math.pi / 4
    hole_depth: float = 0.020
    success_depth: float = 0.010
    contact_stiffness: float = 2.0e4
    # ratio contact_damping / peg_damping must stay < 1: the damping term is
    # evaluated with the previous substep's velocity, and a ratio of 1 makes
    # that feedback marginally stable (period-2 chatter in sustained contact)
    contact_damping: float = 20.0
    friction_mu: float = 0.3
    cup_lateral_stiffness: float = 5000.0
    cup_axial_stiffness: float = 10000.0
    peg_damping: float = 50.0
    sensor_noise_sigma: float = 0.05
    filter_cutoff_hz: float = 9.37
    physics_dt: float = 1e-3

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.hole_radius > self.peg_radius:
            raise SceneError("positive clearance required: hole_radius must exceed peg_radius")
        if not self.success_depth <= self.hole_depth:
            raise SceneError("success_depth must not exceed hole_depth")
        for name in ("contact_stiffness", "cup_lateral_stiffness", "cup_axial_stiffness", "peg_damping"):
            if not getattr(self, name) > 0:
                raise SceneError(f"{name} must be positive")
        if not self.filter_cutoff_hz > 0:
            raise SceneError("filter_cutoff_hz must be positive")
        if not self.physics_dt > 0:
            raise SceneError("physics_dt must be positive")
        if not self.chamfer_width >= 0 or not 0 < self.chamfer_angle < math.pi / 2:
            raise SceneError("chamfer geometry invalid: width >= 0 and 0 < angle < pi/2")
        if not np.allclose(self.hole_pose.orientation, [1.0, 0.0, 0.0, 0.0], atol=1e-9):
            raise SceneError("hole_pose rotation must be identity (vertical bore axis)")

    @property
    def clearance(self) -> float:
        return self.hole_radius - self.peg_radius

    @property
    def chamfer_depth(self) -> float:
        return self.chamfer_width * math.tan(self.chamfer_angle)

    @property
    def filter_alpha(self) -> float:
        """Per-step gain of the first-order low-pass, exact discretization."""
        tau = 1.0 / (2.0 * math.pi * self.filter_cutoff_hz)
        return 1.0 - math.exp(-self.physics_dt / tau)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.to_list() if isinstance(v, Pose) else v
        return out

    @staticmethod
    def from_dict(data: dict) -> "SceneConfig":
        known = {f.name for f in fields(SceneConfig)}
        unknown = set(data) - known
        if unknown:
            raise SceneError(f"unknown scene keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "hole_pose" in kwargs:
            kwargs["hole_pose"] = Pose.from_list(kwargs["hole_pose"])
        return SceneConfig(**kwargs)

    @staticmethod
    def from_json(path) -> "SceneConfig":
        with open(path) as fh:
            return SceneConfig.from_dict(json.load(fh))

    def pack_params(self) -> np.ndarray:
        """Flat parameter vector consumed by the contact/step kernels."""
        hx, hy, hz = self.hole_pose.position
        return np.array(
            [
                hx,
                hy,
                hz,
                self.hole_radius,
                self.peg_radius,
                self.hole_radius + self.chamfer_width,
                self.chamfer_depth,
                math.sin(self.chamfer_angle),
                math.cos(self.chamfer_angle),
                math.tan(self.chamfer_angle),
                self.hole_depth,
                self.success_depth,
                self.clearance,
                self.contact_stiffness,
                self.contact_damping,
                self.friction_mu,
                self.cup_lateral_stiffness,
                self.cup_axial_stiffness,
                self.peg_damping,
                self.physics_dt,
                self.filter_alpha,
                FORCE_SATURATION,
                FRICTION_V_EPS,
            ],
            dtype=np.float64,
        )
