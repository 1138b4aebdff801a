"""Comparative benchmarks: the action-set study and the execution-phase
success/force table across methods (pure replay, spiral search, learned
region-gated policy).

Every benchmark is seed-reproducible: per-trial RNG streams derive from
(seed, trial index), so trial order cannot leak state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .control import AdmittanceGains, ConstraintBox, SpiralParams, spiral_offset
from .rl import InsertionTask, LearnerConfig, QNetwork, TaskState, execute, sample_planar_error
from .simenv import SceneConfig, SimState, drive, reset
from .transforms import Pose, translation_distance

METHODS = ("pure_replay", "spiral", "rrrl")
GROUPS = ("perfect", "uncertainty")


def canonical_target(scene: SceneConfig) -> Pose:
    """Fully-inserted placement pose used when no taught target is supplied:
    centered in the bore, 2 mm past the success depth."""
    p = scene.hole_pose.position
    return Pose(position=(p[0], p[1], p[2] + scene.success_depth + 0.002))


class MissingArtifactError(RuntimeError):
    """A benchmark needs a taught trajectory or trained policy that is absent."""


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95 % Wilson score interval for a binomial success rate."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return center - half, center + half


def intervals_separated(hi_side: tuple[float, float], lo_side: tuple[float, float]) -> bool:
    """True when the higher rate's interval clears the lower rate's."""
    return hi_side[0] > lo_side[1]


@dataclass
class BenchmarkSpec:
    method: str
    group: str
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.group not in GROUPS:
            raise ValueError(f"group must be one of {GROUPS}")
        if self.trials <= 0:
            raise ValueError("trials must be positive")


@dataclass
class TrialRecord:
    trial: int
    success: bool
    steps: int
    max_force: float
    final_error: float

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "success": bool(self.success),
            "steps": self.steps,
            "max_force": self.max_force,
            "final_error": self.final_error,
        }


@dataclass
class BenchmarkResult:
    spec: BenchmarkSpec
    successes: int
    trials: int
    max_force_overall: float
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)

    def to_dict(self) -> dict:
        lo, hi = self.wilson
        return {
            "method": self.spec.method,
            "group": self.spec.group,
            "seed": self.spec.seed,
            "successes": self.successes,
            "trials": self.trials,
            "rate": self.rate,
            "wilson_low": lo,
            "wilson_high": hi,
            "max_force_overall": self.max_force_overall,
            "per_trial": [r.to_dict() for r in self.records],
        }


@dataclass
class ExecutionArtifacts:
    """Everything the execution benchmark consumes.

    The recorded trajectory is the EE path at the servo observation height;
    with the object grasped, execution replays that path shifted by the
    grasp-minus-observe offset so the held peg retraces the demonstrated
    object motion (orientations stay nominal throughout the task).
    """

    scene: SceneConfig
    learner: LearnerConfig
    gains: AdmittanceGains
    box: ConstraintBox
    spiral: SpiralParams
    trajectory: list[tuple[float, Pose]]
    final_pose: Pose  # taught placement target (wire name "dfp")
    grasp_pose: Pose | None = None  # footer "dgp"
    observe_pose: Pose | None = None  # footer "dvsp"
    policy: QNetwork | None = None
    replay_force_stop: float = 15.0  # N, protective stop during the gross phase

    @property
    def replay_shift(self) -> np.ndarray:
        if self.grasp_pose is None or self.observe_pose is None:
            return np.zeros(3)
        return self.grasp_pose.position - self.observe_pose.position

    def require_policy(self) -> QNetwork:
        if self.policy is None:
            raise MissingArtifactError("method 'rrrl' needs a trained policy file")
        return self.policy

    def make_task(self) -> InsertionTask:
        return InsertionTask(scene=self.scene, learner=self.learner,
                             target_true=self.final_pose, gains=self.gains, box=self.box)


def _replay_gross_phase(art: ExecutionArtifacts, sim: SimState, offset: np.ndarray,
                        stop_in_region: InsertionTask | None, uncertain: Pose) -> SimState:
    """Track the taught trajectory (shifted by the base error) at its recorded
    timing, with the protective force stop; optionally hand over once the
    command enters the gating region."""
    scene = art.scene
    shift = art.replay_shift + offset
    prev_t = art.trajectory[0][0]
    for t, pose in art.trajectory[1:]:
        n = max(1, round((t - prev_t) / scene.physics_dt))
        prev_t = t
        sim = drive(
            sim, scene, n, waypoint=pose.position + shift,
            qdot_max=art.box.qdot_max[:3], q_min=art.box.q_min[:3],
            q_max=art.box.q_max[:3], guard=art.replay_force_stop,
        )
        if stop_in_region is not None:
            ts_probe = TaskState(sim=sim, uncertain_target=uncertain)
            if stop_in_region.in_region(ts_probe):
                break
    return sim


def run_trial(art: ExecutionArtifacts, method: str, offset: np.ndarray, seed: int,
              monitor=None) -> TrialRecord:
    scene = art.scene
    task = art.make_task()
    uncertain = Pose(position=art.final_pose.position + offset,
                     orientation=art.final_pose.orientation)
    # start holding the object just above the taught start point (post-pickup
    # hover): the first recorded sample may sit microns into the surface
    start_p = art.trajectory[0][1].position + art.replay_shift + offset
    surface_z = scene.hole_pose.position[2]
    start = Pose(position=(start_p[0], start_p[1], min(start_p[2], surface_z - 5e-4)),
                 orientation=art.trajectory[0][1].orientation)
    sim = reset(scene, start, seed)

    if method == "rrrl":
        net = art.require_policy()
        sim = _replay_gross_phase(art, sim, offset, task, uncertain)
        ts = TaskState(sim=sim, uncertain_target=uncertain)
        result = execute(task, net, ts, monitor=monitor)
        return TrialRecord(0, result.success, result.steps, result.max_force, result.final_error)

    sim = _replay_gross_phase(art, sim, offset, None, uncertain)
    k_max = art.learner.k_max
    substeps = task.substeps
    steps = 0
    if method == "pure_replay":
        hold = art.trajectory[-1][1].position + art.replay_shift + offset
        for _ in range(k_max):
            if sim.success_latched:
                break
            sim = drive(sim, scene, substeps, waypoint=hold,
                        qdot_max=art.box.qdot_max[:3], q_min=art.box.q_min[:3],
                        q_max=art.box.q_max[:3], guard=art.replay_force_stop)
            steps += 1
    elif method == "spiral":
        center = uncertain.position
        t_spiral = 0.0
        push = np.array([0.0, 0.0, art.spiral.push_force])
        for _ in range(k_max):
            if sim.success_latched:
                break
            t_spiral += art.learner.decision_period
            sx, sy = spiral_offset(art.spiral, t_spiral)
            wp = np.array([center[0] + sx, center[1] + sy, 0.0])
            sim = drive(sim, scene, substeps, waypoint=wp, f_desired=push,
                        axis_modes=np.array([0.0, 0.0, 1.0]), gains=art.gains.gain[:3],
                        qdot_max=art.box.qdot_max[:3], q_min=art.box.q_min[:3],
                        q_max=art.box.q_max[:3])
            steps += 1
    else:
        raise ValueError(f"unknown method {method!r}")

    return TrialRecord(
        0, sim.success_latched, steps, sim.max_abs_force_seen,
        translation_distance(Pose(position=sim.vec[0:3]), art.final_pose),
    )


def run_execution_benchmark(spec: BenchmarkSpec, art: ExecutionArtifacts,
                            monitor=None) -> BenchmarkResult:
    """Per-trial success and peak sensed force for one method/group cell."""
    if not art.trajectory:
        raise MissingArtifactError("execution benchmark needs a taught trajectory")
    records = []
    for trial in range(spec.trials):
        rng = np.random.default_rng(np.random.SeedSequence((spec.seed, trial)))
        if spec.group == "uncertainty":
            offset = sample_planar_error(rng, art.learner.delta_p_min, art.learner.delta_p_max)
        else:
            offset = np.zeros(3)
        rec = run_trial(art, spec.method, offset, seed=int(rng.integers(2**31 - 1)),
                        monitor=monitor)
        rec.trial = trial
        records.append(rec)
    successes = sum(r.success for r in records)
    max_force = max((r.max_force for r in records), default=0.0)
    return BenchmarkResult(spec=spec, successes=successes, trials=spec.trials,
                           max_force_overall=max_force, records=records)


# ---------------------------------------------------------------------------
# action-set study
# ---------------------------------------------------------------------------

def _diagonal_set(amplitude: float) -> list[np.ndarray | None]:
    return [np.array(s) * amplitude for s in ((1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1))]


def _single_axis_set(amplitude: float) -> list[np.ndarray | None]:
    # press plus force on one lateral axis only
    return [np.array(s) * amplitude for s in ((1, 0, 1), (-1, 0, 1))]


def _operational_set(amplitude: float) -> list[np.ndarray | None]:
    # 12 signed unit-axis wrench actions; the six torque actions command no
    # translation (rotational admittance gain is zero in position mode), so
    # they appear as holds
    forces = [np.array(s) * amplitude for s in
              ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))]
    return forces + [None] * 6


ACTION_SETS = {
    "set1_operational": _operational_set,
    "set2_single_axis": _single_axis_set,
    "set3_diagonal": _diagonal_set,
}


def random_policy_rate(task: InsertionTask, actions: list, trials: int, step_cap: int,
                       seed: int) -> BenchmarkResult:
    """Uniform-random action selection over one action set."""
    records = []
    scene = task.scene
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
        offset = sample_planar_error(rng, task.learner.delta_p_min, task.learner.delta_p_max)
        ts = task.reset(seed=int(rng.integers(2**31 - 1)), offset=offset)
        for _ in range(step_cap):
            if task.in_region(ts):
                f = actions[int(rng.integers(len(actions)))]
                if f is None:  # torque action: no translational response
                    ts.sim = drive(ts.sim, scene, task.substeps,
                                   waypoint=ts.sim.ee_command_pose.position,
                                   qdot_max=task.box.qdot_max[:3])
                else:
                    ts.sim = drive(ts.sim, scene, task.substeps, f_desired=f,
                                   gains=task.gains.gain[:3],
                                   qdot_max=task.box.qdot_max[:3],
                                   q_min=task.box.q_min[:3], q_max=task.box.q_max[:3])
                ts.steps_used += 1
            else:
                ts = task.step(ts, None)
            if task.success(ts):
                break
        records.append(TrialRecord(trial, task.success(ts), ts.steps_used,
                                   ts.sim.max_abs_force_seen, task.final_error(ts)))
    successes = sum(r.success for r in records)
    spec = BenchmarkSpec(method="rrrl", group="uncertainty", trials=trials, seed=seed)
    return BenchmarkResult(spec=spec, successes=successes, trials=trials,
                           max_force_overall=max(r.max_force for r in records),
                           records=records)


@dataclass
class ActionSetStudy:
    rates: dict[str, float]
    successes: dict[str, int]
    trials: int
    seed: int
    wilson: dict[str, tuple[float, float]]

    @property
    def ordering_strict(self) -> bool:
        return (self.rates["set3_diagonal"] > self.rates["set2_single_axis"]
                > self.rates["set1_operational"])

    @property
    def ordering_separated(self) -> bool:
        return (intervals_separated(self.wilson["set3_diagonal"], self.wilson["set2_single_axis"])
                and intervals_separated(self.wilson["set2_single_axis"],
                                        self.wilson["set1_operational"]))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials_per_set": self.trials,
            "successes": self.successes,
            "rates": self.rates,
            "wilson": {k: list(v) for k, v in self.wilson.items()},
            "ordering_strict": self.ordering_strict,
            "ordering_separated": self.ordering_separated,
        }


def compare_action_sets(scene: SceneConfig, learner: LearnerConfig, target_true: Pose,
                        gains: AdmittanceGains, box: ConstraintBox, seed: int,
                        trials: int = 200, step_cap: int = 20) -> ActionSetStudy:
    """Random-policy success rates of the three force action sets."""
    task = InsertionTask(scene=scene, learner=learner, target_true=target_true,
                         gains=gains, box=box)
    rates, successes, wilson = {}, {}, {}
    for name, maker in ACTION_SETS.items():
        result = random_policy_rate(task, maker(learner.force_amplitude),
                                    trials, step_cap, seed)
        rates[name] = result.rate
        successes[name] = result.successes
        wilson[name] = result.wilson
    return ActionSetStudy(rates=rates, successes=successes, trials=trials,
                          seed=seed, wilson=wilson)


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

def emit_report(results: list[BenchmarkResult], study: ActionSetStudy | None = None) -> dict:
    """JSON-ready report document plus a human-readable table."""
    doc: dict = {"execution": [r.to_dict() for r in results]}
    if study is not None:
        doc["action_sets"] = study.to_dict()

    lines = ["# Benchmark report", "", "| method | group | successes | rate | Wilson 95% | max force (N) |",
             "|---|---|---|---|---|---|"]
    for r in results:
        lo, hi = r.wilson
        lines.append(
            f"| {r.spec.method} | {r.spec.group} | {r.successes}/{r.trials} "
            f"| {r.rate:.2f} | [{lo:.2f}, {hi:.2f}] | {r.max_force_overall:.1f} |"
        )
    if study is not None:
        lines += ["", "| action set | successes | rate | Wilson 95% |", "|---|---|---|---|"]
        for name in ("set1_operational", "set2_single_axis", "set3_diagonal"):
            lo, hi = study.wilson[name]
            lines.append(f"| {name} | {study.successes[name]}/{study.trials} "
                         f"| {study.rates[name]:.2f} | [{lo:.2f}, {hi:.2f}] |")
    doc["markdown"] = "\n".join(lines) + "\n"
    return doc
