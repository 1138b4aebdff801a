"""The three-step demonstration session and its scripted driver.

A session captures the grasp pose, retreats to an observation pose where the
reference photo and the fixed camera-object relation are taken, then follows
the user-moved object by visual servoing while recording the trajectory.
Finishing re-estimates the object from a second reference photo and derives
the final placement pose from the frame chain, so the robot never needs to
physically reach it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .control import ConstraintBox, clamp_and_integrate
from .servo import (
    BehindCameraError,
    CameraModel,
    FeatureSet,
    camera_twist_to_ee,
    default_feature_square,
    ee_twist_to_base,
    estimate_object_pose,
    ibvs_twist,
    observe_pixels,
)
from .transforms import (
    Pose,
    compose,
    compute_dfp,
    inverse,
    quat_from_rotvec,
    quat_mul,
    quat_normalize_unchecked,
    quat_to_rotvec,
    relative_object_pose,
)


class WrongPhaseError(RuntimeError):
    """A session step was requested out of order."""


class ObjectNotVisibleError(RuntimeError):
    """The object's fiducials do not project into the camera."""


class TeachPhase(enum.Enum):
    IDLE = "Idle"
    DGP_CAPTURED = "DgpCaptured"
    FOLLOWING = "Following"
    FINISHED = "Finished"


@dataclass
class TeachSession:
    phase: TeachPhase = TeachPhase.IDLE
    grasp_pose: Pose | None = None  # wire key "dgp"
    observe_pose: Pose | None = None  # wire key "dvsp"
    rf1: FeatureSet | None = None
    camera_object_relation: Pose | None = None  # fixed at RF1 capture
    tracked_object: Pose | None = None  # running camera-frame estimate
    trajectory: list[tuple[float, Pose]] = field(default_factory=list)
    rf2_px: np.ndarray | None = None
    final_pose: Pose | None = None  # wire key "dfp"
    duration: float = 0.0

    def require(self, phase: TeachPhase) -> None:
        if self.phase is not phase:
            raise WrongPhaseError(f"step requires phase {phase.value}, session is {self.phase.value}")


@dataclass
class TeachingRig:
    """Camera, fiducial geometry, servo gain and constraints for one session."""

    camera: CameraModel = field(default_factory=CameraModel)
    model_points: np.ndarray = field(default_factory=default_feature_square)
    box: ConstraintBox = field(default_factory=ConstraintBox)
    servo_gain: float = 2.0
    pixel_noise_sigma: float = 0.0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    def observe(self, ee_pose: Pose, object_pose: Pose) -> np.ndarray:
        try:
            return observe_pixels(
                self.camera, ee_pose, object_pose, self.model_points,
                self.pixel_noise_sigma, self.rng,
            )
        except BehindCameraError as exc:
            raise ObjectNotVisibleError(str(exc)) from exc

    # -- session steps -----------------------------------------------------

    def capture_dgp(self, session: TeachSession, ee_pose: Pose) -> TeachSession:
        session.require(TeachPhase.IDLE)
        session.grasp_pose = ee_pose
        session.phase = TeachPhase.DGP_CAPTURED
        return session

    def capture_dvsp(self, session: TeachSession, ee_pose: Pose, object_pose: Pose) -> TeachSession:
        session.require(TeachPhase.DGP_CAPTURED)
        px = self.observe(ee_pose, object_pose)  # object must be in view
        session.observe_pose = ee_pose
        session.camera_object_relation = relative_object_pose(
            inverse(self.camera.e_x_c), ee_pose, session.grasp_pose
        )
        session.tracked_object = session.camera_object_relation
        session.rf1 = FeatureSet.build(self.camera, px, self.model_points,
                                       session.camera_object_relation)
        return session

    def start_follow(self, session: TeachSession) -> TeachSession:
        session.require(TeachPhase.DGP_CAPTURED)
        if session.rf1 is None:
            raise WrongPhaseError("observation pose not captured yet")
        session.phase = TeachPhase.FOLLOWING
        return session

    def follow_step(self, session: TeachSession, ee_pose: Pose, object_pose: Pose,
                    t: float, dt: float) -> tuple[TeachSession, Pose]:
        """One servo step; pauses recording when the object is out of view."""
        session.require(TeachPhase.FOLLOWING)
        try:
            px = self.observe(ee_pose, object_pose)
        except ObjectNotVisibleError:
            return session, ee_pose
        estimate = estimate_object_pose(self.camera, px, self.model_points,
                                        session.tracked_object)
        session.tracked_object = estimate
        current = FeatureSet.build(self.camera, px, self.model_points, estimate)
        twist_c = ibvs_twist(current, session.rf1, self.servo_gain)
        twist_b = ee_twist_to_base(ee_pose, camera_twist_to_ee(self.camera.e_x_c, twist_c))

        q6 = np.concatenate([ee_pose.position, quat_to_rotvec(ee_pose.orientation)])
        q6 = clamp_and_integrate(q6, twist_b, self.box.with_delta(dt))
        new_pose = Pose(position=q6[:3], orientation=quat_from_rotvec(q6[3:]))
        session.trajectory.append((t, new_pose))
        return session, new_pose

    def finish(self, session: TeachSession, ee_pose: Pose, object_pose: Pose) -> TeachSession:
        session.require(TeachPhase.FOLLOWING)
        px = self.observe(ee_pose, object_pose)
        session.rf2_px = px
        estimate = estimate_object_pose(self.camera, px, self.model_points,
                                        session.tracked_object)
        session.tracked_object = estimate
        session.final_pose = compute_dfp(ee_pose, self.camera.e_x_c, estimate)
        session.duration = session.trajectory[-1][0] if session.trajectory else 0.0
        session.phase = TeachPhase.FINISHED
        return session


# ---------------------------------------------------------------------------
# scripted demonstrator
# ---------------------------------------------------------------------------

def _slerp(qa: np.ndarray, qb: np.ndarray, s: float) -> np.ndarray:
    dot = float(np.dot(qa, qb))
    if dot < 0.0:
        qb = -qb
        dot = -dot
    if dot > 0.9995:
        return quat_normalize_unchecked(qa + s * (qb - qa))
    theta = math.acos(min(dot, 1.0))
    return (math.sin((1 - s) * theta) * qa + math.sin(s * theta) * qb) / math.sin(theta)


@dataclass
class ScriptedDemonstrator:
    """Piecewise-linear object motion from (t, pose) waypoints."""

    waypoints: list[tuple[float, Pose]]

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("demonstration script is empty")
        times = [t for t, _ in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("script timestamps must be strictly increasing")

    @property
    def end_time(self) -> float:
        return self.waypoints[-1][0]

    def pose_at(self, t: float) -> Pose:
        pts = self.waypoints
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                s = (t - t0) / (t1 - t0)
                pos = (1 - s) * p0.position + s * p1.position
                return Pose(position=pos, orientation=_slerp(p0.orientation, p1.orientation, s))
        return pts[-1][1]


@dataclass
class TeachResult:
    session: TeachSession
    servo_dt: float

    @property
    def final_pose(self) -> Pose:
        return self.session.final_pose


def run_scripted_teaching(rig: TeachingRig, script: ScriptedDemonstrator,
                          servo_height: float = 0.15, servo_dt: float = 0.01,
                          settle_time: float = 1.0) -> TeachResult:
    """Headless demonstration: grasp capture at the object's start pose,
    retreat to the observation pose, follow the scripted object, finish.

    ``settle_time`` extends the follow phase past the script so the servo
    converges before the second reference photo.
    """
    session = TeachSession()
    start_object = script.pose_at(0.0)
    rig.capture_dgp(session, start_object)
    observe = Pose(position=start_object.position - np.array([0.0, 0.0, servo_height]),
                   orientation=start_object.orientation)
    rig.capture_dvsp(session, observe, start_object)
    rig.start_follow(session)

    ee = observe
    t = 0.0
    end = script.end_time + settle_time
    while t < end - 1e-12:
        t = round(t + servo_dt, 12)
        session, ee = rig.follow_step(session, ee, script.pose_at(t), t, servo_dt)
    rig.finish(session, ee, script.pose_at(end))
    return TeachResult(session=session, servo_dt=servo_dt)


def default_demo_waypoints(scene, start_xy=(-0.15, 0.05)) -> list[tuple[float, Pose]]:
    """Canonical demonstration: lift the object, carry it over the hole, and
    lower it to the fully-inserted pose (2 mm past the success depth)."""
    hole = scene.hole_pose.position
    sx, sy = start_xy
    start_z = hole[2]  # object tip on the work surface
    inserted_z = hole[2] + scene.success_depth + 0.002
    return [
        (0.0, Pose.from_translation(sx, sy, start_z)),
        (0.5, Pose.from_translation(sx, sy, start_z)),
        (1.5, Pose.from_translation(sx, sy, start_z - 0.04)),
        (4.5, Pose.from_translation(hole[0], hole[1], start_z - 0.04)),
        (6.0, Pose.from_translation(hole[0], hole[1], inserted_z)),
        (6.5, Pose.from_translation(hole[0], hole[1], inserted_z)),
    ]


# ---------------------------------------------------------------------------
# kinesthetic variant: what pressing at the end of a hand-guided demo does
# ---------------------------------------------------------------------------

def kinesthetic_terminal_shift(scene, command_pose: Pose, start_pose: Pose,
                               settle_steps: int = 3000, seed: int = 0):
    """Drive the held object to ``command_pose`` and hold; returns the sensed
    terminal force and the offset between the recorded (commanded) target and
    where the object actually is.

    Models the taught-pose error of contact-at-the-end demonstrations: the
    compliant cup deflects under the terminal contact force, so the recorded
    EE pose misses the true object pose by force / stiffness.
    """
    from .simenv import drive, reset

    state = reset(scene, start_pose, seed)
    state = drive(state, scene, settle_steps, waypoint=command_pose.position,
                  qdot_max=np.full(3, 0.05))
    force = state.raw_wrench.force
    shift = state.ee_command_pose.position - state.peg_pose.position
    return force, shift
