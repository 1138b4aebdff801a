"""Independent reference implementations used to verify the package.

Everything here deliberately avoids the code paths under test: poses are
checked against 4x4 homogeneous matrices, contact wrenches against dense
surface sampling, Jacobians against central finite differences.
"""

from __future__ import annotations

import math

import numpy as np


# ---------------------------------------------------------------------------
# homogeneous-matrix pose algebra
# ---------------------------------------------------------------------------

def mat_from_pose(position, quaternion) -> np.ndarray:
    w, x, y, z = quaternion
    r = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
    m = np.eye(4)
    m[:3, :3] = r
    m[:3, 3] = position
    return m


def mat_apply(m: np.ndarray, point) -> np.ndarray:
    ph = np.append(np.asarray(point, dtype=float), 1.0)
    return (m @ ph)[:3]


def random_unit_quaternion(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_pose_parts(rng: np.random.Generator, span: float = 1.0):
    return rng.uniform(-span, span, size=3), random_unit_quaternion(rng)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def central_difference(f, x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Jacobian of f: R^n -> R^m by central differences, columns over x."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x), dtype=float)
    jac = np.zeros((f0.size, x.size))
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += eps
        lo[i] -= eps
        jac[:, i] = (np.asarray(f(hi), dtype=float) - np.asarray(f(lo), dtype=float)) / (2 * eps)
    return jac


# ---------------------------------------------------------------------------
# dense-sampling contact oracle
# ---------------------------------------------------------------------------

def sampled_contact_wrench(scene, peg_pos, peg_vel, n_rim=250, n_disc=250):
    """Contact wrench from dense sampling of the peg bottom.

    Samples points on the bottom rim and interior disc, classifies each one
    against the piecewise environment surface (flat top / chamfer band / bore
    wall / hole bottom) purely from its radial distance and height, measures
    the per-point penetration penalty, and reduces each regime with its
    maximum penetration before applying the spring-damper law.  Regime
    wrenches are then summed.  Application points and normals come from the
    sampled geometry, not from any closed-form case analysis.  All work is in
    hole-frame coordinates; the torque is about the peg bottom center.
    """
    peg_pos = np.asarray(peg_pos, dtype=float)
    peg_vel = np.asarray(peg_vel, dtype=float)
    hole = np.asarray(scene.hole_pose.position, dtype=float)
    rel = peg_pos - hole
    r_p = scene.peg_radius
    r_h = scene.hole_radius
    c_w = scene.chamfer_width
    c_d = scene.chamfer_width * math.tan(scene.chamfer_angle)
    r_o = r_h + c_w
    sin_t = math.sin(scene.chamfer_angle)
    cos_t = math.cos(scene.chamfer_angle)

    angles = np.linspace(0.0, 2 * math.pi, n_rim, endpoint=False)
    rim = np.stack([r_p * np.cos(angles), r_p * np.sin(angles), np.zeros(n_rim)], axis=1)
    # sunflower layout covers the interior evenly
    k = np.arange(1, n_disc + 1)
    rad = r_p * np.sqrt(k / n_disc)
    theta = k * math.pi * (3 - math.sqrt(5))
    disc = np.stack([rad * np.cos(theta), rad * np.sin(theta), np.zeros(n_disc)], axis=1)
    pts = np.concatenate([rim, disc]) + rel  # hole-frame points on the peg bottom

    z = rel[2]
    e = math.hypot(rel[0], rel[1])
    # slope contact is a rim-edge-on-face case: it applies only while the
    # deepest rim point is still inside the band; past the outer chamfer edge
    # the flat face carries the peg with a vertical normal.  Wall points only
    # count while the peg straddles the bore.
    chamfer_active = r_h < e + r_p <= r_o
    wall_reachable = e - r_p < r_h
    # velocity of every sampled point equals the peg velocity (no rotation)
    regimes = {}  # name -> (pen, normal, point)
    for j, p in enumerate(pts):
        rho = math.hypot(p[0], p[1])
        on_rim = j < n_rim
        if rho > 1e-12:
            rho_dir = np.array([p[0] / rho, p[1] / rho, 0.0])
        else:
            rho_dir = np.array([0.0, 0.0, 0.0])
        if z > 0.0 and rho >= r_o:
            _keep_max(regimes, "flat", z, np.array([0.0, 0.0, -1.0]), p)
        if 0.0 < z <= c_d and r_h <= rho <= r_o and chamfer_active and on_rim:
            z_surf = (r_o - rho) * (c_d / c_w)
            pen = (z - z_surf) * cos_t
            normal = -sin_t * rho_dir + np.array([0.0, 0.0, -cos_t])
            _keep_max(regimes, "chamfer", pen, normal, p)
        if z > c_d and rho > r_h and wall_reachable:
            _keep_max(regimes, "wall", rho - r_h, -rho_dir, p)
        if z > scene.hole_depth:
            _keep_max(regimes, "bottom", z - scene.hole_depth, np.array([0.0, 0.0, -1.0]), p)

    force = np.zeros(3)
    torque = np.zeros(3)
    for name, (pen, normal, point) in regimes.items():
        pen_rate = -float(peg_vel @ normal)
        magnitude = scene.contact_stiffness * pen + scene.contact_damping * pen_rate
        if magnitude <= 0.0:
            continue
        f = magnitude * normal
        v_t = peg_vel - float(peg_vel @ normal) * normal
        s = np.linalg.norm(v_t)
        if s > 1e-12:
            f = f - scene.friction_mu * magnitude * math.tanh(s / 1e-4) * (v_t / s)
        if name == "flat":
            point = _flat_centroid(rel, r_p, r_o)
        elif name == "wall":
            point = point.copy()
            point[2] = (c_d + z) / 2.0  # mid-height of the wall contact line
        elif name == "bottom":
            point = rel  # full-disc support acts through the center
        arm = point - rel
        torque = torque + np.cross(arm, f)
        force = force + f
    fmag = np.linalg.norm(force)
    if fmag > 200.0:  # same saturation cap as the plant
        force = force * (200.0 / fmag)
        torque = torque * (200.0 / fmag)
    return force, torque


def _keep_max(regimes, name, pen, normal, point):
    if pen <= 0.0:
        return
    if name not in regimes or pen > regimes[name][0]:
        regimes[name] = (pen, np.array(normal), np.array(point))


def _flat_centroid(rel, r_p, r_o, n_rad=160, n_ang=720):
    """Centroid (hole-frame coords) of the disc portion resting on the flat top.

    Dense annulus grid with area weights; the annulus starts at the smallest
    peg-frame radius that can reach past the opening, so thin crescents stay
    resolved.
    """
    e = math.hypot(rel[0], rel[1])
    r_in = max(0.0, r_o - e)
    if r_in >= r_p:
        return np.array([rel[0], rel[1], rel[2]])
    rad = np.linspace(r_in, r_p, n_rad)
    ang = np.linspace(0.0, 2 * math.pi, n_ang, endpoint=False)
    rr, aa = np.meshgrid(rad, ang)
    xs = rr * np.cos(aa) + rel[0]
    ys = rr * np.sin(aa) + rel[1]
    mask = np.hypot(xs, ys) >= r_o
    if not mask.any():
        return np.array([rel[0], rel[1], rel[2]])
    w = rr[mask]  # area element scales with radius
    return np.array([np.average(xs[mask], weights=w), np.average(ys[mask], weights=w), rel[2]])


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95 % Wilson score interval, computed from first principles."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return center - half, center + half
