"""Deterministic quasi-static contact simulation of a suction-held peg over a
chamfered hole, with filtered force-torque sensing."""

from .engine import (
    BACKEND,
    InitialPenetrationError,
    check_success,
    contact_wrench,
    drive,
    reset,
    sensor_read,
    step,
)
from .scene import FORCE_SATURATION, SceneConfig, SceneError
from .state import SimState
from .wrench import Wrench

__all__ = [
    "BACKEND",
    "FORCE_SATURATION",
    "InitialPenetrationError",
    "SceneConfig",
    "SceneError",
    "SimState",
    "Wrench",
    "check_success",
    "contact_wrench",
    "drive",
    "reset",
    "sensor_read",
    "step",
]
