"""Service layer exposing the live workbench to UI clients.

The protocol core (`BridgeSession`) is transport-free: it consumes decoded
client messages and returns reply documents, so conformance tests can
compare byte-exact canonical JSON without sockets.  The aiohttp wrapper
serializes every client command through one queue, ticks the teaching world
at 30 Hz, runs training/execution in a worker thread, and drops clients
whose outbound backlog exceeds two seconds.

Client tags: hello, capture_dgp, capture_dvsp, start_follow,
drag_object{pose}, finish_teaching, start_training{seed, episodes?},
start_execution{method, group, trials}, abort.
Server tags: state, progress, teach_done, train_done, exec_done, error, ack.
"""

from __future__ import annotations

import asyncio
import json
import os
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import artifacts
from .config import WorkbenchConfig
from .evaluation import (
    BenchmarkSpec,
    ExecutionArtifacts,
    MissingArtifactError,
    emit_report,
)
from .rl import InsertionTask, TaskState, execute, train
from .servo import default_feature_square
from .teaching import (
    ObjectNotVisibleError,
    ScriptedDemonstrator,
    TeachPhase,
    TeachSession,
    TeachingRig,
    TeachResult,
)
from .transforms import Pose

BROADCAST_HZ = 30.0
CLIENT_BACKLOG_LIMIT = int(2.0 * BROADCAST_HZ)  # messages ~ two seconds

CLIENT_TAGS = {
    "hello", "capture_dgp", "capture_dvsp", "start_follow", "drag_object",
    "finish_teaching", "start_training", "start_execution", "abort",
}


def canonical(msg: dict) -> str:
    """Canonical wire encoding: sorted keys, no whitespace."""
    return json.dumps(msg, sort_keys=True, separators=(",", ":"))


def error_reply(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


@dataclass
class Job:
    """A long-running request the transport layer must execute."""

    kind: str  # "train" | "execute"
    params: dict = field(default_factory=dict)


class BridgeSession:
    """Protocol state machine plus the live teaching world."""

    def __init__(self, cfg: WorkbenchConfig, clock=time.monotonic):
        self.cfg = cfg
        self.clock = clock
        self.rig = TeachingRig(
            camera=cfg.camera,
            model_points=default_feature_square(cfg.teaching.feature_square_side,
                                                cfg.teaching.feature_top_offset),
            box=cfg.box,
            servo_gain=cfg.teaching.servo_gain,
            rng=np.random.default_rng(cfg.teaching.noise_seed),
        )
        self.seq = 0
        self.busy = None  # "Training" | "Executing" | None
        self.latest_live = None  # dict posted by workers for broadcasting
        self.reset_world()

    # -- world ---------------------------------------------------------------

    def reset_world(self):
        self.session = TeachSession()
        start = self.cfg.scene.hole_pose.position + np.array([-0.15, 0.05, 0.0])
        self.object_pose = Pose(position=start)
        self.ee_pose = Pose(position=start - np.array([0.0, 0.0, self.cfg.teaching.servo_height]))
        self.follow_t = 0.0
        self.follow_started_at = None
        self.taught: TeachResult | None = None
        self.policy_path: str | None = None
        self.busy = None
        self.latest_live = None

    @property
    def phase(self) -> str:
        if self.busy:
            return self.busy
        return self.session.phase.value

    # -- command handling ------------------------------------------------------

    def handle_command(self, msg) -> tuple[list[dict], Job | None]:
        """Returns (replies, job).  Valid commands are acked with a
        monotonically increasing sequence number; invalid ones get an error
        reply and consume no sequence number."""
        if not isinstance(msg, dict) or msg.get("type") not in CLIENT_TAGS:
            return [error_reply("bad_message", "unknown or missing message tag")], None
        tag = msg["type"]
        handler = getattr(self, f"_cmd_{tag}")
        try:
            replies, job = handler(msg)
        except WrongPhase as exc:
            return [error_reply("wrong_phase", str(exc))], None
        except BadMessage as exc:
            return [error_reply("bad_message", str(exc))], None
        except MissingArtifactError as exc:
            return [error_reply("missing_artifact", str(exc))], None
        self.seq += 1
        return [{"type": "ack", "seq": self.seq}, *replies], job

    def _require_phase(self, *phases: str):
        if self.phase not in phases:
            raise WrongPhase(f"command requires phase in {sorted(phases)}, session is {self.phase}")

    def _cmd_hello(self, msg):
        return [], None

    def _cmd_capture_dgp(self, msg):
        self._require_phase("Idle")
        # hand-guided grasp equivalence: the EE meets the object at its pose
        self.ee_pose = self.object_pose
        self.rig.capture_dgp(self.session, self.ee_pose)
        return [], None

    def _cmd_capture_dvsp(self, msg):
        self._require_phase("DgpCaptured")
        observe = Pose(position=self.session.grasp_pose.position
                       - np.array([0.0, 0.0, self.cfg.teaching.servo_height]),
                       orientation=self.session.grasp_pose.orientation)
        try:
            self.rig.capture_dvsp(self.session, observe, self.object_pose)
        except ObjectNotVisibleError as exc:
            raise BadMessage(f"object not visible from the observation pose: {exc}") from exc
        self.ee_pose = observe
        return [], None

    def _cmd_start_follow(self, msg):
        self._require_phase("DgpCaptured")
        if self.session.rf1 is None:
            raise WrongPhase("observation pose not captured yet")
        self.rig.start_follow(self.session)
        self.follow_t = 0.0
        self.follow_started_at = self.clock()
        return [], None

    def _cmd_drag_object(self, msg):
        self._require_phase("Idle", "Following")
        pose = msg.get("pose")
        if not isinstance(pose, (list, tuple)) or len(pose) != 7:
            raise BadMessage("drag_object needs pose: [px,py,pz,qw,qx,qy,qz]")
        try:
            target = Pose.from_list([float(v) for v in pose])
        except (TypeError, ValueError) as exc:
            raise BadMessage(f"bad pose: {exc}") from exc
        clamped = np.clip(target.position, self.cfg.box.q_min[:3], self.cfg.box.q_max[:3])
        self.object_pose = Pose(position=clamped, orientation=target.orientation)
        return [], None

    def _cmd_finish_teaching(self, msg):
        self._require_phase("Following")
        self.rig.finish(self.session, self.ee_pose, self.object_pose)
        if self.follow_started_at is not None:
            self.session.duration = self.clock() - self.follow_started_at
        self.taught = TeachResult(session=self.session, servo_dt=1.0 / BROADCAST_HZ)
        os.makedirs(self.cfg.artifacts_dir, exist_ok=True)
        artifacts.write_trajectory(self._artifact_path("traj"), self.taught)
        return [{
            "type": "teach_done",
            "dfp": self.session.final_pose.to_list(),
            "duration": self.session.duration,
        }], None

    def _cmd_start_training(self, msg):
        self._require_phase("Finished")
        if self.taught is None:
            raise MissingArtifactError("no finished teaching session to train from")
        seed = msg.get("seed", 0)
        if not isinstance(seed, int):
            raise BadMessage("start_training seed must be an integer")
        episodes = msg.get("episodes", None)
        if episodes is not None and (not isinstance(episodes, int) or episodes <= 0):
            raise BadMessage("start_training episodes must be a positive integer")
        self.busy = "Training"
        return [], Job("train", {"seed": seed, "episodes": episodes})

    def _cmd_start_execution(self, msg):
        self._require_phase("Finished")
        if self.taught is None:
            raise MissingArtifactError("no finished teaching session to execute")
        method = {"pure": "pure_replay"}.get(msg.get("method"), msg.get("method"))
        group = msg.get("group")
        trials = msg.get("trials", self.cfg.execution.trials)
        try:
            spec = BenchmarkSpec(method=method, group=group, trials=trials,
                                 seed=int(msg.get("seed", 0)))
        except (ValueError, TypeError) as exc:
            raise BadMessage(str(exc)) from exc
        if method == "rrrl" and self.policy_path is None:
            raise MissingArtifactError("train a policy before executing method 'rrrl'")
        self.busy = "Executing"
        return [], Job("execute", {"spec": spec})

    def _cmd_abort(self, msg):
        self.reset_world()
        return [], Job("abort", {})

    # -- periodic world update, state broadcasting -----------------------------

    def tick(self, dt: float) -> None:
        """Advance the teaching servo while following."""
        if self.busy is None and self.session.phase is TeachPhase.FOLLOWING:
            self.follow_t += dt
            _, self.ee_pose = self.rig.follow_step(
                self.session, self.ee_pose, self.object_pose, self.follow_t, dt
            )

    def state_message(self) -> dict:
        live = self.latest_live or {}
        wrench = live.get("wrench", [0.0] * 6)
        return {
            "type": "state",
            "t": self.follow_t,
            "ee_pose": live.get("ee_pose", self.ee_pose.to_list()),
            "peg_pose": live.get("peg_pose", self.object_pose.to_list()),
            "object_pose": self.object_pose.to_list(),
            "wrench": wrench,
            "phase": self.phase,
            "alpha": live.get("alpha", 0),
            "max_force": live.get("max_force", 0.0),
        }

    # -- long-running jobs (called by the transport's worker) -------------------

    def _artifact_path(self, kind: str) -> str:
        names = {"traj": "traj.jsonl", "policy": "policy.json", "report": "report.json"}
        return os.path.join(self.cfg.artifacts_dir, names[kind])

    def run_job(self, job: Job, progress=None, live=None) -> list[dict]:
        """Execute a train/execute job synchronously; returns completion
        messages.  ``progress(dict)`` streams progress rows; ``live(dict)``
        posts live plant state for broadcasting."""
        try:
            if job.kind == "train":
                return self._run_training(job.params, progress)
            if job.kind == "execute":
                return self._run_execution(job.params, live)
            if job.kind == "abort":
                return []
            raise ValueError(f"unknown job kind {job.kind!r}")
        finally:
            if job.kind in ("train", "execute"):
                self.busy = None

    def _run_training(self, params, progress) -> list[dict]:
        cfg = self.cfg
        learner = cfg.learner
        if params.get("episodes"):
            from dataclasses import replace

            learner = replace(learner, episodes=params["episodes"])
        task = InsertionTask(scene=cfg.scene, learner=learner,
                             target_true=self.taught.final_pose,
                             gains=cfg.gains, box=cfg.box)
        successes = 0
        rows = 0

        def on_episode(row):
            nonlocal successes, rows
            rows += 1
            successes += bool(row.success)
            if progress is not None:
                progress({
                    "type": "progress",
                    "episode": row.episode,
                    "return": row.return_,
                    "success_rate": successes / rows,
                })

        result = train(task, learner, seed=params["seed"], progress_cb=on_episode)
        os.makedirs(cfg.artifacts_dir, exist_ok=True)
        path = self._artifact_path("policy")
        artifacts.save_policy(path, result.network, learner, params["seed"])
        self.policy_path = path
        return [{"type": "train_done", "policy_path": path}]

    def _run_execution(self, params, live) -> list[dict]:
        cfg = self.cfg
        spec: BenchmarkSpec = params["spec"]
        policy = None
        if spec.method == "rrrl":
            policy, _cfg, _seed = artifacts.load_policy(self.policy_path)
        session = self.taught.session
        art = ExecutionArtifacts(
            scene=cfg.scene, learner=cfg.learner, gains=cfg.gains, box=cfg.box,
            spiral=cfg.spiral, trajectory=session.trajectory,
            final_pose=session.final_pose, grasp_pose=session.grasp_pose,
            observe_pose=session.observe_pose, policy=policy,
            replay_force_stop=cfg.execution.replay_force_stop,
        )
        from .evaluation import run_execution_benchmark

        monitor = None
        if live is not None:
            def monitor(ts: TaskState, gate: int):
                live({
                    "ee_pose": ts.sim.ee_command_pose.to_list(),
                    "peg_pose": ts.sim.peg_pose.to_list(),
                    "wrench": ts.sim.filtered_wrench.as_vector().tolist(),
                    "alpha": gate,
                    "max_force": ts.sim.max_abs_force_seen,
                })

        result = run_execution_benchmark(spec, art, monitor=monitor)
        doc = emit_report([result])
        os.makedirs(cfg.artifacts_dir, exist_ok=True)
        artifacts.write_report(self._artifact_path("report"), doc)
        return [{"type": "exec_done", "report": {
            "method": spec.method, "group": spec.group,
            "successes": result.successes, "trials": result.trials,
            "max_force_overall": result.max_force_overall,
        }}]


class WrongPhase(RuntimeError):
    pass


class BadMessage(ValueError):
    pass


# ---------------------------------------------------------------------------
# aiohttp transport
# ---------------------------------------------------------------------------

def build_app(cfg: WorkbenchConfig, static_dir: str | None = None):
    from aiohttp import WSMsgType, web

    session = BridgeSession(cfg)
    clients: dict[object, asyncio.Queue] = {}
    command_queue: asyncio.Queue = asyncio.Queue()
    outbox: "list[dict]" = []
    lock = threading.Lock()

    def post_threadsafe(msg: dict):
        with lock:
            outbox.append(msg)

    def post_live(state: dict):
        session.latest_live = state

    async def ws_handler(request):
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        queue: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_BACKLOG_LIMIT)
        clients[ws] = queue

        async def writer():
            try:
                while True:
                    await ws.send_str(await queue.get())
            except (asyncio.CancelledError, ConnectionError):
                pass

        writer_task = asyncio.create_task(writer())
        try:
            async for raw in ws:
                if raw.type != WSMsgType.TEXT:
                    continue
                try:
                    msg = json.loads(raw.data)
                except json.JSONDecodeError:
                    await queue.put(canonical(error_reply("bad_message", "frame is not valid JSON")))
                    continue
                await command_queue.put((ws, msg))
        finally:
            writer_task.cancel()
            clients.pop(ws, None)
        return ws

    async def broadcast(msg: dict):
        text = canonical(msg)
        for ws, queue in list(clients.items()):
            try:
                queue.put_nowait(text)
            except asyncio.QueueFull:
                # slow client: documented contract is to drop it
                clients.pop(ws, None)
                await ws.close()

    async def command_worker(app):
        while True:
            ws, msg = await command_queue.get()
            replies, job = session.handle_command(msg)
            queue = clients.get(ws)
            for reply in replies:
                if queue is not None:
                    try:
                        queue.put_nowait(canonical(reply))
                    except asyncio.QueueFull:
                        pass
            if job is not None and job.kind != "abort":
                threading.Thread(
                    target=lambda: [post_threadsafe(m) for m in session.run_job(
                        job, progress=post_threadsafe, live=post_live)],
                    daemon=True,
                ).start()

    async def ticker(app):
        period = 1.0 / BROADCAST_HZ
        while True:
            session.tick(period)
            with lock:
                pending, outbox[:] = outbox[:], []
            for msg in pending:
                await broadcast(msg)
            await broadcast(session.state_message())
            await asyncio.sleep(period)

    async def health(request):
        return web.json_response({"ok": True})

    async def get_config(request):
        return web.json_response(cfg.to_dict())

    async def get_artifact(request):
        kind = request.match_info["kind"]
        if kind not in ("traj", "policy", "report"):
            raise web.HTTPNotFound(text="unknown artifact")
        path = session._artifact_path(kind)
        if not os.path.exists(path):
            raise web.HTTPNotFound(text=f"artifact {kind} not produced yet")
        return web.FileResponse(path)

    async def start_background(app):
        app["ticker"] = asyncio.create_task(ticker(app))
        app["commands"] = asyncio.create_task(command_worker(app))

    async def stop_background(app):
        for key in ("ticker", "commands"):
            app[key].cancel()

    app = web.Application()
    app.router.add_get("/health", health)
    app.router.add_get("/config", get_config)
    app.router.add_get("/artifacts/{kind}", get_artifact)
    app.router.add_get("/ws", ws_handler)
    if static_dir and os.path.isdir(static_dir):
        app.router.add_get("/", lambda r: web.HTTPFound("/ui/index.html"))
        app.router.add_static("/ui/", static_dir)
    app.on_startup.append(start_background)
    app.on_cleanup.append(stop_background)
    app["bridge_session"] = session
    return app


def default_static_dir() -> str:
    here = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    return os.path.join(here, "frontend", "dist")


def serve(cfg: WorkbenchConfig, host: str = "127.0.0.1", port: int = 8732):
    from aiohttp import web

    app = build_app(cfg, static_dir=default_static_dir())
    print(f"bridge listening on http://{host}:{port} (ws endpoint /ws)")
    web.run_app(app, host=host, port=port, print=None)
