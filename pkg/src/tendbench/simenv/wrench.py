"""Force-torque 6-vectors with an explicit frame tag.

Sensed wrenches use the exerted-force convention: positive components are
forces the held peg applies to the environment, so a positive F_z means
pressing along the insertion axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..transforms import FrameMismatchError, FrameTag


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray
    torque: np.ndarray
    frame: FrameTag = FrameTag.EE

    def __init__(self, force=(0.0, 0.0, 0.0), torque=(0.0, 0.0, 0.0), frame=FrameTag.EE):
        f = np.array(force, dtype=np.float64).reshape(3)
        t = np.array(torque, dtype=np.float64).reshape(3)
        if not (np.isfinite(f).all() and np.isfinite(t).all()):
            raise ValueError("wrench components must be finite")
        f.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "force", f)
        object.__setattr__(self, "torque", t)
        object.__setattr__(self, "frame", FrameTag(frame))

    @staticmethod
    def zero(frame: FrameTag = FrameTag.EE) -> "Wrench":
        return Wrench(frame=frame)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.torque])

    @staticmethod
    def from_vector(vec, frame: FrameTag = FrameTag.EE) -> "Wrench":
        vec = np.asarray(vec, dtype=np.float64).reshape(6)
        return Wrench(force=vec[:3], torque=vec[3:], frame=frame)

    def require_frame(self, frame: FrameTag) -> None:
        if self.frame is not FrameTag(frame):
            raise FrameMismatchError(f"expected wrench in frame {FrameTag(frame).value!r}, got {self.frame.value!r}")

    def __sub__(self, other: "Wrench") -> "Wrench":
        if self.frame is not other.frame:
            raise FrameMismatchError(f"cannot mix frames {self.frame.value!r} and {other.frame.value!r}")
        return Wrench(self.force - other.force, self.torque - other.torque, self.frame)
