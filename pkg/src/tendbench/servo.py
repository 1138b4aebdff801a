"""Pinhole camera, image-based visual servoing, and pose-from-features.

The camera looks along its +z axis; with the package's insertion-axis
convention that means straight at the work surface, so feature depths are
positive whenever the object is under the camera.  There is no simulated
sensor boundary: visibility only requires positive depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .transforms import (
    Pose,
    compose,
    inverse,
    quat_from_rotvec,
    quat_mul,
    quat_normalize_unchecked,
    quat_rotate,
    quat_to_matrix,
)

MIN_DEPTH = 1e-4  # m, in front of the camera


class BehindCameraError(ValueError):
    """A feature point is at or behind the camera plane."""


class DegenerateFeatureError(ValueError):
    """Feature geometry leaves the interaction matrix rank-deficient."""


class NonConvergenceError(RuntimeError):
    """Pose refinement failed to converge within its iteration budget."""


@dataclass
class CameraModel:
    fx: float = 1600.0
    fy: float = 1600.0
    cx: float = 640.0
    cy: float = 512.0
    e_x_c: Pose = field(default_factory=lambda: Pose.from_translation(0.05, 0.0, 0.02))

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("focal lengths must be positive")


def default_feature_square(side: float = 0.04, top_offset: float = 0.03) -> np.ndarray:
    """Four fiducial corners on the object's top face, object frame at the tip."""
    h = side / 2.0
    return np.array(
        [
            [-h, -h, -top_offset],
            [h, -h, -top_offset],
            [h, h, -top_offset],
            [-h, h, -top_offset],
        ]
    )


def project(cam: CameraModel, b_x_c: Pose, world_points: np.ndarray) -> np.ndarray:
    """Pinhole projection of base-frame points into pixel coordinates."""
    pts = np.atleast_2d(np.asarray(world_points, dtype=np.float64))
    cam_pts = inverse(b_x_c).apply(pts)
    z = cam_pts[:, 2]
    if (z <= MIN_DEPTH).any():
        raise BehindCameraError(f"point depth {z.min():.6f} m is behind the camera")
    u = cam.fx * cam_pts[:, 0] / z + cam.cx
    v = cam.fy * cam_pts[:, 1] / z + cam.cy
    return np.stack([u, v], axis=1)


@dataclass
class FeatureSet:
    """Observed pixels plus the model geometry and per-point depth estimates."""

    points_px: np.ndarray
    model_points: np.ndarray
    depths: np.ndarray
    normalized: np.ndarray

    @staticmethod
    def build(cam: CameraModel, points_px: np.ndarray, model_points: np.ndarray,
              c_x_o_est: Pose) -> "FeatureSet":
        """Depths come from the supplied pose estimate, keeping the estimator
        in the servo loop rather than leaking ground truth."""
        points_px = np.asarray(points_px, dtype=np.float64)
        model_points = np.asarray(model_points, dtype=np.float64)
        cam_pts = c_x_o_est.apply(model_points)
        depths = cam_pts[:, 2].copy()
        if (depths <= 0).any():
            raise BehindCameraError("estimated feature depth is non-positive")
        normalized = np.stack(
            [(points_px[:, 0] - cam.cx) / cam.fx, (points_px[:, 1] - cam.cy) / cam.fy], axis=1
        )
        return FeatureSet(points_px, model_points, depths, normalized)


def interaction_matrix(features: FeatureSet) -> np.ndarray:
    """Stacked point-feature interaction matrix in normalized coordinates."""
    rows = []
    for (x, y), z in zip(features.normalized, features.depths):
        rows.append([-1.0 / z, 0.0, x / z, x * y, -(1.0 + x * x), y])
        rows.append([0.0, -1.0 / z, y / z, 1.0 + y * y, -x * y, -x])
    return np.array(rows)


def ibvs_twist(current: FeatureSet, reference: FeatureSet, lam: float) -> np.ndarray:
    """Camera-frame twist [v; w] driving the features toward the reference."""
    if current.points_px.shape != reference.points_px.shape:
        raise ValueError("feature sets must have matching cardinality")
    L = interaction_matrix(current)
    sv = np.linalg.svd(L, compute_uv=False)
    if sv[-1] < 1e-9 * sv[0]:
        raise DegenerateFeatureError("interaction matrix is rank-deficient (collinear features?)")
    error = (current.normalized - reference.normalized).reshape(-1)
    return -lam * (np.linalg.pinv(L) @ error)


def pixel_error(current_px: np.ndarray, reference_px: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(current_px) - np.asarray(reference_px))))


def _reproject(cam: CameraModel, p: np.ndarray, q: np.ndarray, model_points: np.ndarray):
    cam_pts = model_points @ quat_to_matrix(q).T + p
    z = cam_pts[:, 2]
    if (z <= MIN_DEPTH).any():
        return None, None
    u = cam.fx * cam_pts[:, 0] / z + cam.cx
    v = cam.fy * cam_pts[:, 1] / z + cam.cy
    return cam_pts, np.stack([u, v], axis=1)


def estimate_object_pose(cam: CameraModel, observed_px: np.ndarray, model_points: np.ndarray,
                         init: Pose, max_iter: int = 50, tol: float = 1e-10) -> Pose:
    """Camera-frame object pose minimizing the pixel reprojection error.

    Gauss-Newton with Levenberg-Marquardt damping: small planar targets make
    the undamped normal equations nearly singular along the tilt/shift
    ambiguity, so pixel noise would otherwise blow up the step.
    """
    observed_px = np.asarray(observed_px, dtype=np.float64)
    model_points = np.asarray(model_points, dtype=np.float64)
    p = init.position.copy()
    q = init.orientation.copy()
    cam_pts, proj = _reproject(cam, p, q, model_points)
    if cam_pts is None:
        raise NonConvergenceError("initial pose puts features behind the camera")
    cost = float(np.sum((proj - observed_px) ** 2))
    lam = 1e-3
    for _ in range(max_iter):
        residual = proj - observed_px
        jac = np.zeros((2 * len(model_points), 6))
        for i, pt in enumerate(cam_pts):
            X, Y, Z = pt
            d_uv_dp = np.array(
                [[cam.fx / Z, 0.0, -cam.fx * X / (Z * Z)],
                 [0.0, cam.fy / Z, -cam.fy * Y / (Z * Z)]]
            )
            # left perturbation exp([w]) acts on the rotated model point only
            rx, ry, rz = pt - p
            skew = np.array([[0.0, -rz, ry], [rz, 0.0, -rx], [-ry, rx, 0.0]])
            jac[2 * i : 2 * i + 2, :3] = d_uv_dp
            jac[2 * i : 2 * i + 2, 3:] = d_uv_dp @ (-skew)
        g = jac.T @ residual.reshape(-1)
        h = jac.T @ jac

        accepted = False
        for _try in range(12):
            try:
                delta = np.linalg.solve(h + lam * np.diag(np.diag(h)), -g)
            except np.linalg.LinAlgError as exc:
                raise NonConvergenceError("normal equations are singular") from exc
            if float(np.linalg.norm(delta)) < tol:
                return Pose(position=p, orientation=q)
            p_new = p + delta[:3]
            q_new = quat_normalize_unchecked(quat_mul(quat_from_rotvec(delta[3:]), q))
            pts_new, proj_new = _reproject(cam, p_new, q_new, model_points)
            if pts_new is not None:
                cost_new = float(np.sum((proj_new - observed_px) ** 2))
                if cost_new <= cost * (1.0 + 1e-12):
                    stagnated = cost - cost_new <= 1e-10 * max(cost, 1e-30)
                    p, q, cam_pts, proj, cost = p_new, q_new, pts_new, proj_new, cost_new
                    lam = max(lam / 3.0, 1e-12)
                    accepted = True
                    if stagnated:
                        return Pose(position=p, orientation=q)
                    break
            lam *= 10.0
        if not accepted:
            # gradient is numerically zero relative to the residual: converged
            if float(np.linalg.norm(g)) <= 1e-9 * (1.0 + cost):
                return Pose(position=p, orientation=q)
            raise NonConvergenceError("damped step search failed to reduce the residual")
        if float(np.linalg.norm(delta)) < tol:
            return Pose(position=p, orientation=q)
    raise NonConvergenceError(f"no convergence after {max_iter} iterations")


def camera_twist_to_ee(e_x_c: Pose, twist_c: np.ndarray) -> np.ndarray:
    """Map a camera-frame twist to the EE frame through the fixed extrinsic."""
    r = quat_to_matrix(e_x_c.orientation)
    w_e = r @ twist_c[3:]
    v_e = r @ twist_c[:3] + np.cross(e_x_c.position, w_e)
    return np.concatenate([v_e, w_e])


def ee_twist_to_base(b_x_e: Pose, twist_e: np.ndarray) -> np.ndarray:
    """Rotate an EE-frame twist into base coordinates for integration."""
    r = quat_to_matrix(b_x_e.orientation)
    return np.concatenate([r @ twist_e[:3], r @ twist_e[3:]])


def observe_pixels(cam: CameraModel, b_x_e: Pose, b_x_o: Pose, model_points: np.ndarray,
                   noise_sigma: float = 0.0, rng: np.random.Generator | None = None) -> np.ndarray:
    """Render the object's fiducials into the eye-in-hand camera, with optional
    pixel noise."""
    b_x_c = compose(b_x_e, cam.e_x_c)
    px = project(cam, b_x_c, b_x_o.apply(model_points))
    if noise_sigma > 0.0:
        if rng is None:
            raise ValueError("pixel noise requires an RNG")
        px = px + rng.normal(0.0, noise_sigma, size=px.shape)
    return px
