"""Artifact files: demonstration scripts, recorded trajectories, trained
policies, and benchmark reports.

All numeric payloads serialize through Python's repr (shortest round-trip
decimal), so every file reloads bit-faithfully; writers sort keys and end
with a newline so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import os

from .rl import LearnerConfig, QNetwork
from .teaching import ScriptedDemonstrator, TeachResult
from .transforms import Pose

POLICY_FORMAT_VERSION = 1


class ArtifactError(RuntimeError):
    """An artifact file is missing, malformed, or incompatible."""


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# demonstration scripts: JSON lines {"t": s, "object_pose": [7]}
# ---------------------------------------------------------------------------

def read_demo_script(path) -> ScriptedDemonstrator:
    waypoints = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                    waypoints.append((float(row["t"]), Pose.from_list(row["object_pose"])))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise ArtifactError(f"{path}:{lineno}: bad script row: {exc}") from exc
    except FileNotFoundError as exc:
        raise ArtifactError(f"demo script not found: {path}") from exc
    try:
        return ScriptedDemonstrator(waypoints)
    except ValueError as exc:
        raise ArtifactError(f"{path}: {exc}") from exc


def write_demo_script(path, waypoints: list[tuple[float, Pose]]) -> None:
    with open(path, "w") as fh:
        for t, pose in waypoints:
            fh.write(_dump({"t": t, "object_pose": pose.to_list()}) + "\n")


# ---------------------------------------------------------------------------
# recorded trajectories: JSON lines {"t", "ee_pose"} plus a footer record
# ---------------------------------------------------------------------------

def write_trajectory(path, result: TeachResult) -> None:
    session = result.session
    with open(path, "w") as fh:
        for t, pose in session.trajectory:
            fh.write(_dump({"t": t, "ee_pose": pose.to_list()}) + "\n")
        footer = {
            "dgp": session.grasp_pose.to_list(),
            "dvsp": session.observe_pose.to_list(),
            "dfp": session.final_pose.to_list(),
            "duration": session.duration,
        }
        fh.write(_dump(footer) + "\n")


def read_trajectory(path) -> dict:
    """Returns {"trajectory": [(t, Pose)], "dgp","dvsp","dfp": Pose, "duration"}."""
    rows = []
    footer = None
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ArtifactError(f"{path}:{lineno}: bad trajectory row: {exc}") from exc
                if "ee_pose" in row:
                    rows.append((float(row["t"]), Pose.from_list(row["ee_pose"])))
                elif "dfp" in row:
                    footer = row
                else:
                    raise ArtifactError(f"{path}:{lineno}: unrecognized trajectory row")
    except FileNotFoundError as exc:
        raise ArtifactError(f"trajectory not found: {path}") from exc
    if footer is None:
        raise ArtifactError(f"{path}: missing trajectory footer record")
    try:
        return {
            "trajectory": rows,
            "dgp": Pose.from_list(footer["dgp"]),
            "dvsp": Pose.from_list(footer["dvsp"]),
            "dfp": Pose.from_list(footer["dfp"]),
            "duration": float(footer["duration"]),
        }
    except (KeyError, ValueError) as exc:
        raise ArtifactError(f"{path}: bad trajectory footer: {exc}") from exc


# ---------------------------------------------------------------------------
# trained policies
# ---------------------------------------------------------------------------

def save_policy(path, net: QNetwork, learner: LearnerConfig, seed: int) -> None:
    doc = {
        "version": POLICY_FORMAT_VERSION,
        **net.to_dict(),
        "config": learner.to_dict(),
        "seed": seed,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_policy(path) -> tuple[QNetwork, LearnerConfig, int]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ArtifactError(f"policy not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"policy file corrupt: {exc}") from exc
    version = doc.get("version")
    if version != POLICY_FORMAT_VERSION:
        raise ArtifactError(
            f"policy format version {version!r} unsupported (expected {POLICY_FORMAT_VERSION})"
        )
    try:
        net = QNetwork.from_dict(doc)
        learner = LearnerConfig.from_dict(doc["config"])
        seed = int(doc["seed"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ArtifactError(f"policy file incomplete: {exc}") from exc
    return net, learner, seed


# ---------------------------------------------------------------------------
# training logs and reports
# ---------------------------------------------------------------------------

def write_training_log(path, rows) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(_dump(row.to_dict()) + "\n")


def write_report(path, doc: dict) -> None:
    """report.json plus a report.md sibling with the same stem."""
    markdown = doc.get("markdown", "")
    payload = {k: v for k, v in doc.items() if k != "markdown"}
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
    stem, _ = os.path.splitext(path)
    with open(stem + ".md", "w") as fh:
        fh.write(markdown)


def read_report(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ArtifactError(f"report not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"report file corrupt: {exc}") from exc
