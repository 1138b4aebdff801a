"""Plant operations over the contact kernel: reset, stepping, sensing.

The kernel backend (compiled extension or pure-Python twin) is chosen at
import time; set TENDBENCH_PURE=1 to force the fallback.
"""

from __future__ import annotations

import math
import os

import numpy as np

from ..transforms import FrameTag, Pose
from .scene import SceneConfig
from .state import I_EE, I_FILT, I_PEG, I_RAW, STATE_SIZE, SimState
from .wrench import Wrench

if os.environ.get("TENDBENCH_PURE"):
    from . import _simcore_py as _kernel

    BACKEND = "pure"
else:
    try:
        from . import _simcore as _kernel  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _simcore_py as _kernel

        BACKEND = "pure"

_WIDE = np.full(3, 1e9)
_ZERO3 = np.zeros(3)
_TRACK = np.zeros(3)
_FORCE = np.ones(3)


class InitialPenetrationError(ValueError):
    """The requested start pose already intersects the scene geometry."""


def contact_wrench(scene: SceneConfig, peg_pose: Pose, peg_velocity=(0.0, 0.0, 0.0)) -> Wrench:
    """Contact wrench acting on the peg (reaction), torque about the peg tip."""
    par = scene.pack_params()
    v = np.asarray(peg_velocity, dtype=np.float64)
    fx, fy, fz, tx, ty, tz, _sat = _kernel.contact_eval(
        par, *map(float, peg_pose.position), float(v[0]), float(v[1]), float(v[2])
    )
    return Wrench(force=(fx, fy, fz), torque=(tx, ty, tz), frame=FrameTag.EE)


def reset(scene: SceneConfig, start_pose: Pose, seed: int) -> SimState:
    """Fresh deterministic state with the peg settled at ``start_pose``."""
    w = contact_wrench(scene, start_pose)
    if float(np.linalg.norm(w.force)) > 0.0:
        raise InitialPenetrationError(
            f"start pose penetrates the scene (contact force {np.linalg.norm(w.force):.3f} N)"
        )
    vec = np.zeros(STATE_SIZE)
    vec[I_PEG] = start_pose.position
    vec[I_EE] = start_pose.position
    rng = np.random.default_rng(seed)
    return SimState(vec, rng, noise_sigma=scene.sensor_noise_sigma,
                    noise_sigma_torque=scene.sensor_noise_sigma,
                    ee_orientation=start_pose.orientation,
                    peg_orientation=start_pose.orientation)


def step(state: SimState, scene: SceneConfig, ee_target: Pose, dt: float) -> SimState:
    """One physics substep with the EE command set directly to ``ee_target``."""
    if not math.isclose(dt, scene.physics_dt, rel_tol=1e-12):
        raise ValueError(f"dt must equal scene.physics_dt ({scene.physics_dt}), got {dt}")
    out = state.copy()
    out.vec[I_EE] = ee_target.position
    _kernel.step_n(
        scene.pack_params(), out.vec,
        np.asarray(ee_target.position, dtype=np.float64), _ZERO3,
        _TRACK, _ZERO3, _WIDE, -_WIDE, _WIDE, 0.0, 1,
    )
    return out


def drive(
    state: SimState,
    scene: SceneConfig,
    n_substeps: int,
    waypoint=None,
    f_desired=None,
    axis_modes=None,
    gains=None,
    qdot_max=None,
    q_min=None,
    q_max=None,
    guard: float = 0.0,
) -> SimState:
    """Run ``n_substeps`` of the inner control + physics loop.

    Per axis, mode 0 rate-tracks the waypoint (frozen while the filtered
    force exceeds ``guard`` when guard > 0) and mode 1 integrates the
    admittance law toward ``f_desired``.
    """
    out = state.copy()
    if axis_modes is None:
        axis_modes = _TRACK if f_desired is None else _FORCE
    _kernel.step_n(
        scene.pack_params(), out.vec,
        np.asarray(waypoint if waypoint is not None else out.vec[I_EE], dtype=np.float64),
        np.asarray(f_desired if f_desired is not None else _ZERO3, dtype=np.float64),
        np.asarray(axis_modes, dtype=np.float64),
        np.asarray(gains if gains is not None else _ZERO3, dtype=np.float64),
        np.asarray(qdot_max if qdot_max is not None else _WIDE, dtype=np.float64),
        np.asarray(q_min if q_min is not None else -_WIDE, dtype=np.float64),
        np.asarray(q_max if q_max is not None else _WIDE, dtype=np.float64),
        float(guard), int(n_substeps),
    )
    return out


def sensor_read(state: SimState) -> Wrench:
    """Filtered wrench plus zero-mean Gaussian sensor noise, frame e.

    Draws advance the state's RNG; the inner control loop reads the
    noiseless filtered wrench instead, so physics stays deterministic at
    the substep level while observations are noisy at the decision rate.
    """
    vec = state.vec[I_FILT].copy()
    if state.noise_sigma > 0.0:
        noise = state.rng.normal(0.0, 1.0, size=6)
        vec[:3] += state.noise_sigma * noise[:3]
        vec[3:] += state.noise_sigma_torque * noise[3:]
    return Wrench.from_vector(vec, frame=FrameTag.EE)


def check_success(state: SimState, scene: SceneConfig) -> bool:
    """Pointwise insertion test: deep enough and laterally within clearance.

    The lateral offset is evaluated on the rigid projection: below the
    chamfer a rigid peg inside the bore cannot exceed the clearance, so any
    excess there is penalty-method interpenetration rather than position.
    """
    hole = scene.hole_pose.position
    depth = state.vec[2] - hole[2]
    lateral = math.hypot(state.vec[0] - hole[0], state.vec[1] - hole[1])
    in_bore = (depth > scene.chamfer_depth
               and lateral + scene.peg_radius > scene.hole_radius
               and lateral - scene.peg_radius < scene.hole_radius)
    if in_bore:
        lateral = min(lateral, scene.clearance)
    return depth >= scene.success_depth and lateral <= scene.clearance
