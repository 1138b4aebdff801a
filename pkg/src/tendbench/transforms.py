"""Rigid-transform algebra for the workbench.

A :class:`Pose` is a position (meters) plus a unit quaternion (w, x, y, z),
read as a parent-from-child transform: ``a_x_b.apply(p)`` maps coordinates of
a point expressed in frame ``b`` into frame ``a``.  ``compose(a, b)`` chains
transforms in matrix-product order, i.e. it applies ``b`` first.

Workspace convention used throughout the package: the base frame's +z axis
points along the tool axis, from the end effector toward the work surface.
"Above the hole" therefore means negative z, and insertion increases z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

QUAT_TOLERANCE = 1e-6


class InvalidPoseError(ValueError):
    """Quaternion norm is too far from 1 to trust the pose."""


class FrameMismatchError(ValueError):
    """An operation mixed quantities tagged with different frames."""


class FrameTag(Enum):
    """Coordinate frames used by the workbench."""

    EE = "e"
    CAMERA = "c"
    BASE = "b"
    OBJECT = "o"


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    n = math.sqrt(float(np.dot(q, q)))
    if abs(n - 1.0) > QUAT_TOLERANCE:
        raise InvalidPoseError(f"quaternion norm {n:.9f} deviates from 1 beyond {QUAT_TOLERANCE}")
    return q / n


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector(s) ``v`` by unit quaternion ``q`` (matrix-free)."""
    u = np.asarray(q[1:], dtype=np.float64)
    w = float(q[0])
    v = np.asarray(v, dtype=np.float64)
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_rotvec(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    angle = math.sqrt(float(np.dot(r, r)))
    if angle < 1e-12:
        # first-order expansion keeps the map smooth through zero
        return quat_normalize_unchecked(np.array([1.0, 0.5 * r[0], 0.5 * r[1], 0.5 * r[2]]))
    axis = r / angle
    half = 0.5 * angle
    s = math.sin(half)
    return np.array([math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s])


def quat_to_rotvec(q: np.ndarray) -> np.ndarray:
    w = float(np.clip(q[0], -1.0, 1.0))
    v = np.asarray(q[1:], dtype=np.float64)
    s = math.sqrt(float(np.dot(v, v)))
    if s < 1e-12:
        return 2.0 * v
    angle = 2.0 * math.atan2(s, w)
    if angle > math.pi:
        angle -= 2.0 * math.pi
    return (angle / s) * v


def quat_normalize_unchecked(q: np.ndarray) -> np.ndarray:
    n = math.sqrt(float(np.dot(q, q)))
    return q / n


@dataclass(frozen=True)
class Pose:
    """Parent-from-child rigid transform: position (m) + unit quaternion (w,x,y,z)."""

    position: np.ndarray
    orientation: np.ndarray

    def __init__(self, position=(0.0, 0.0, 0.0), orientation=(1.0, 0.0, 0.0, 0.0)):
        p = np.array(position, dtype=np.float64).reshape(3)
        q = quat_normalize(np.array(orientation, dtype=np.float64).reshape(4))
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "orientation", q)

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @staticmethod
    def from_translation(x: float, y: float, z: float) -> "Pose":
        return Pose(position=(x, y, z))

    @staticmethod
    def from_rotvec(rotvec, position=(0.0, 0.0, 0.0)) -> "Pose":
        return Pose(position=position, orientation=quat_from_rotvec(np.asarray(rotvec)))

    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map point(s) from the child frame into the parent frame."""
        return quat_rotate(self.orientation, points) + self.position

    def to_list(self) -> list[float]:
        """Wire format: [px, py, pz, qw, qx, qy, qz], SI units."""
        return [*map(float, self.position), *map(float, self.orientation)]

    @staticmethod
    def from_list(values) -> "Pose":
        values = list(values)
        if len(values) != 7:
            raise InvalidPoseError(f"pose array needs 7 numbers, got {len(values)}")
        return Pose(position=values[:3], orientation=values[3:])

    def approx_equal(self, other: "Pose", tol: float = 1e-9) -> bool:
        if np.max(np.abs(self.position - other.position)) > tol:
            return False
        # q and -q encode the same rotation
        d = min(
            float(np.max(np.abs(self.orientation - other.orientation))),
            float(np.max(np.abs(self.orientation + other.orientation))),
        )
        return d <= tol

    def __repr__(self) -> str:  # keeps test failure output readable
        p = ", ".join(f"{v:.6g}" for v in self.position)
        q = ", ".join(f"{v:.6g}" for v in self.orientation)
        return f"Pose(p=[{p}], q=[{q}])"


def compose(a: Pose, b: Pose) -> Pose:
    """Chain transforms: the result applies ``b`` first, then ``a``.

    The quaternion product is renormalized so long chains cannot drift.
    """
    q = quat_normalize_unchecked(quat_mul(a.orientation, b.orientation))
    p = a.apply(b.position)
    return Pose(position=p, orientation=q)


def inverse(a: Pose) -> Pose:
    q = quat_conj(a.orientation)
    return Pose(position=-quat_rotate(q, a.position), orientation=q)


def relative_object_pose(c_x_e: Pose, b_x_dvsp: Pose, b_x_dgp: Pose) -> Pose:
    """Object pose in the camera frame implied by the two taught robot poses.

    The object frame is pinned to the grasp pose, so the camera-frame object
    pose is the camera-from-EE extrinsic chained with the observation-pose to
    grasp-pose displacement.
    """
    return compose(c_x_e, compose(inverse(b_x_dvsp), b_x_dgp))


def compute_dfp(b_x_e: Pose, e_x_c: Pose, c_x_o: Pose) -> Pose:
    """Final placement pose in the base frame from the current EE pose and the
    camera-frame object pose."""
    return compose(b_x_e, compose(e_x_c, c_x_o))


def translation_distance(a: Pose, b: Pose) -> float:
    """Euclidean distance between the two positions; orientation is ignored."""
    d = a.position - b.position
    return math.sqrt(float(np.dot(d, d)))
