"""Hybrid-policy pieces: the discrete force action set, the region gate, and
the search reward."""

from __future__ import annotations

import numpy as np

from ..simenv.wrench import Wrench
from ..transforms import FrameTag, Pose, translation_distance

N_ACTIONS = 4

# lateral push quadrants; every action also presses along the insertion axis
_ACTION_SIGNS = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [-1.0, -1.0, 1.0],
    ]
)


def action_to_wrench(action: int, amplitude: float) -> Wrench:
    """Desired EE-frame force for a discrete action; torques stay zero."""
    if not 0 <= action < N_ACTIONS:
        raise IndexError(f"action index {action} outside 0..{N_ACTIONS - 1}")
    return Wrench(force=_ACTION_SIGNS[action] * amplitude, torque=(0.0, 0.0, 0.0), frame=FrameTag.EE)


def region_gate(current: Pose, target: Pose, radius: float) -> int:
    """1 inside the open ball around the (uncertain) target, else 0.

    The boundary itself gates to 0: the learned arm only runs strictly
    inside the region.
    """
    if not radius > 0:
        raise ValueError("region radius must be positive")
    return 1 if translation_distance(current, target) < radius else 0


def search_reward(success: bool, steps_used: int, k_max: int, current: Pose, target_true: Pose) -> float:
    """Time-discounted bonus on success, distance penalty (meters) otherwise."""
    if steps_used > k_max:
        raise ValueError("steps_used exceeds the episode cap")
    if success:
        return 1.0 - steps_used / k_max
    return -translation_distance(current, target_true)


# quarter-turn about the bore axis: (x, y) -> (-y, x); push quadrants permute
ROTATED_ACTION = (2, 0, 3, 1)


def rotate_state_quarter(state: np.ndarray) -> np.ndarray:
    """Rotate a 6-D wrench observation by 90 degrees about the insertion axis."""
    s = np.asarray(state, dtype=np.float64)
    return np.array([-s[1], s[0], s[2], -s[4], s[3], s[5]])


def symmetry_expand(state, action, next_state):
    """All four quarter-turn images of a transition's (s, a, s') triple.

    The search task is rotation-equivariant about the bore axis, so each
    real transition pins down the action-value function in four symmetric
    contexts at once.
    """
    out = [(np.asarray(state, dtype=np.float64), action, np.asarray(next_state, dtype=np.float64))]
    s, a, sn = out[0]
    for _ in range(3):
        s = rotate_state_quarter(s)
        sn = rotate_state_quarter(sn)
        a = ROTATED_ACTION[a]
        out.append((s, a, sn))
    return out
