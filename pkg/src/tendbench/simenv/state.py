"""Simulation state: a flat float64 vector plus the sensor RNG.

The vector layout is shared with the stepping kernels (`_simcore_py`
docstring documents the indices).  States behave as values at the API
surface: stepping returns a fresh state; only the sensor RNG object is
shared across the lineage of one episode, which keeps noise draws
sequential and reproducible.
"""

from __future__ import annotations

import numpy as np

from ..transforms import FrameTag, Pose
from .wrench import Wrench

STATE_SIZE = 26

I_PEG = slice(0, 3)
I_VEL = slice(3, 6)
I_EE = slice(6, 9)
I_RAW = slice(9, 15)
I_FILT = slice(15, 21)
I_MAXF = 21
I_STEPS = 22
I_SAT = 23
I_SUCCESS = 24


class SimState:
    __slots__ = ("vec", "rng", "noise_sigma", "noise_sigma_torque",
                 "ee_orientation", "peg_orientation")

    def __init__(self, vec: np.ndarray, rng: np.random.Generator, noise_sigma: float = 0.0,
                 noise_sigma_torque: float = 0.0, ee_orientation=None, peg_orientation=None):
        self.vec = vec
        self.rng = rng
        self.noise_sigma = noise_sigma
        self.noise_sigma_torque = noise_sigma_torque
        self.ee_orientation = ee_orientation if ee_orientation is not None else np.array([1.0, 0, 0, 0])
        self.peg_orientation = peg_orientation if peg_orientation is not None else np.array([1.0, 0, 0, 0])

    def copy(self) -> "SimState":
        return SimState(self.vec.copy(), self.rng, self.noise_sigma, self.noise_sigma_torque,
                        self.ee_orientation, self.peg_orientation)

    @property
    def peg_pose(self) -> Pose:
        return Pose(position=self.vec[I_PEG], orientation=self.peg_orientation)

    @property
    def ee_command_pose(self) -> Pose:
        return Pose(position=self.vec[I_EE], orientation=self.ee_orientation)

    @property
    def peg_velocity(self) -> np.ndarray:
        return self.vec[I_VEL].copy()

    @property
    def raw_wrench(self) -> Wrench:
        return Wrench.from_vector(self.vec[I_RAW], frame=FrameTag.EE)

    @property
    def filtered_wrench(self) -> Wrench:
        return Wrench.from_vector(self.vec[I_FILT], frame=FrameTag.EE)

    @property
    def max_abs_force_seen(self) -> float:
        return float(self.vec[I_MAXF])

    @property
    def step_count(self) -> int:
        return int(self.vec[I_STEPS])

    @property
    def saturated(self) -> bool:
        return bool(self.vec[I_SAT])

    @property
    def success_latched(self) -> bool:
        return bool(self.vec[I_SUCCESS])
