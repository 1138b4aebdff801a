"""Decision-rate task wrapper around the contact plant for the fine-motion
search phase.

Episodes start where the gross-motion approach would hand over: on the
vertical line above the uncertain target, just inside the gating region.
Per decision step the active arm is either the learned force action (through
the admittance inner loop) or the fixed return-toward-target step; success is
latched at physics rate inside the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..control import AdmittanceGains, ConstraintBox, fixed_policy_step
from ..simenv import SceneConfig, SimState, drive, reset, sensor_read
from ..transforms import Pose, translation_distance
from .config import LearnerConfig
from .policy import action_to_wrench, region_gate, search_reward

ENTRY_NUDGE = 2e-4  # m inside the region boundary at episode start


def sample_planar_error(rng: np.random.Generator, lo: float, hi: float) -> np.ndarray:
    """Positional error of magnitude U[lo, hi] at a uniform planar angle."""
    r = rng.uniform(lo, hi)
    ang = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([r * math.cos(ang), r * math.sin(ang), 0.0])


@dataclass
class TaskState:
    sim: SimState
    uncertain_target: Pose
    steps_used: int = 0
    commanded_max: float = 0.0  # largest |commanded force component| so far


@dataclass
class InsertionTask:
    scene: SceneConfig
    learner: LearnerConfig
    target_true: Pose  # precise taught placement pose
    gains: AdmittanceGains = field(default_factory=AdmittanceGains)
    box: ConstraintBox = field(default_factory=ConstraintBox)
    fixed_max_step: float = 0.005  # m per decision step for the return arm

    def __post_init__(self):
        self.substeps = round(self.learner.decision_period / self.scene.physics_dt)

    # -- episode lifecycle ---------------------------------------------------

    def entry_pose(self, uncertain_target: Pose) -> Pose:
        p = uncertain_target.position
        z_entry = p[2] - self.learner.region_radius + ENTRY_NUDGE
        return Pose(position=(p[0], p[1], z_entry), orientation=uncertain_target.orientation)

    def reset(self, seed: int, offset: np.ndarray | None = None) -> TaskState:
        """Fresh episode; ``offset`` displaces the target the policy believes
        in away from the true one (base repositioning error)."""
        if offset is None:
            offset = np.zeros(3)
        uncertain = Pose(position=self.target_true.position + np.asarray(offset),
                         orientation=self.target_true.orientation)
        sim = reset(self.scene, self.entry_pose(uncertain), seed)
        return TaskState(sim=sim, uncertain_target=uncertain)

    # -- observations ----------------------------------------------------------

    def observe(self, ts: TaskState) -> np.ndarray:
        """Noisy filtered wrench, normalized for conditioning: forces by the
        action amplitude, torques by amplitude times the peg radius (their
        natural lever scale), so both halves land O(1)."""
        vec = sensor_read(ts.sim).as_vector()
        vec[:3] /= self.learner.force_amplitude
        vec[3:] /= self.learner.force_amplitude * self.scene.peg_radius
        return vec

    def in_region(self, ts: TaskState) -> int:
        return region_gate(ts.sim.ee_command_pose, ts.uncertain_target,
                           self.learner.region_radius)

    def success(self, ts: TaskState) -> bool:
        return ts.sim.success_latched

    # -- one decision step -----------------------------------------------------

    def step(self, ts: TaskState, action: int | None) -> TaskState:
        """Advance one decision period: a force action when given, otherwise
        the fixed return arm toward the uncertain target."""
        if action is not None:
            w = action_to_wrench(action, self.learner.force_amplitude)
            ts.commanded_max = max(ts.commanded_max, float(np.max(np.abs(w.force))))
            sim = drive(
                ts.sim, self.scene, self.substeps,
                f_desired=w.force, gains=self.gains.gain[:3],
                qdot_max=self.box.qdot_max[:3], q_min=self.box.q_min[:3],
                q_max=self.box.q_max[:3],
            )
        else:
            waypoint = self._return_waypoint(ts)
            sim = drive(
                ts.sim, self.scene, self.substeps,
                waypoint=waypoint,
                qdot_max=self.box.qdot_max[:3], q_min=self.box.q_min[:3],
                q_max=self.box.q_max[:3],
            )
        ts.sim = sim
        ts.steps_used += 1
        return ts

    def _return_waypoint(self, ts: TaskState) -> np.ndarray:
        """Retract-then-approach profile for the fixed arm.

        Repositioning laterally while pressed would either gouge the surface
        or stall against a force guard, so the return arm first lifts to the
        region-entry height, translates, then descends on the target line.
        """
        cp = ts.sim.ee_command_pose
        target = ts.uncertain_target.position
        entry_z = self.entry_pose(ts.uncertain_target).position[2]
        lateral_err = float(np.hypot(cp.position[0] - target[0], cp.position[1] - target[1]))
        if lateral_err > 1e-4:
            goal = np.array([target[0], target[1], min(cp.position[2], entry_z)])
        else:
            goal = np.array([target[0], target[1], target[2]])
        inc = fixed_policy_step(cp, Pose(position=goal), self.fixed_max_step)
        return cp.position + inc

    def reward(self, ts: TaskState) -> float:
        return search_reward(self.success(ts), ts.steps_used, self.learner.k_max,
                             ts.sim.peg_pose, self.target_true)

    def final_error(self, ts: TaskState) -> float:
        return translation_distance(ts.sim.peg_pose, self.target_true)
