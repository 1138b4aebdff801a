"""Command-line surface for the workbench.

Subcommands: teach, train, execute, compare-actions, serve.
Exit codes: 0 success, 2 configuration error, 3 artifact error, 4 runtime
error.  Every command that takes --seed is byte-reproducible.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import artifacts
from .artifacts import ArtifactError
from .config import ConfigError, WorkbenchConfig, load_config
from .evaluation import (
    BenchmarkSpec,
    ExecutionArtifacts,
    MissingArtifactError,
    canonical_target,
    compare_action_sets,
    emit_report,
    run_execution_benchmark,
)
from .rl import InsertionTask, train
from .servo import default_feature_square
from .teaching import TeachingRig, run_scripted_teaching

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ARTIFACT = 3
EXIT_RUNTIME = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tendbench",
                                     description="Robot tending-skill workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    teach = sub.add_parser("teach", help="run a scripted headless demonstration")
    teach.add_argument("--config", required=True)
    teach.add_argument("--demo-script", required=True)
    teach.add_argument("--out", required=True, help="trajectory output (JSON lines)")

    tr = sub.add_parser("train", help="train the fine-motion force policy")
    tr.add_argument("--config", required=True)
    tr.add_argument("--traj", required=True, help="taught trajectory file")
    tr.add_argument("--out", required=True, help="policy output (JSON)")
    tr.add_argument("--seed", type=int, default=0)

    ex = sub.add_parser("execute", help="benchmark one method on the taught task")
    ex.add_argument("--config", required=True)
    ex.add_argument("--traj", required=True)
    ex.add_argument("--policy", default=None)
    ex.add_argument("--method", required=True, choices=["pure", "spiral", "rrrl"])
    ex.add_argument("--group", required=True, choices=["perfect", "uncertainty"])
    ex.add_argument("--trials", type=int, default=None)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--out", required=True, help="report output (JSON; .md written beside)")

    ca = sub.add_parser("compare-actions", help="random-policy action-set study")
    ca.add_argument("--config", required=True)
    ca.add_argument("--seed", type=int, default=0)
    ca.add_argument("--out", required=True)

    sv = sub.add_parser("serve", help="run the interactive bridge server")
    sv.add_argument("--config", required=True)
    sv.add_argument("--port", type=int, default=8732)
    sv.add_argument("--host", default="127.0.0.1")
    return parser


def _rig_from_config(cfg: WorkbenchConfig) -> TeachingRig:
    return TeachingRig(
        camera=cfg.camera,
        model_points=default_feature_square(cfg.teaching.feature_square_side,
                                            cfg.teaching.feature_top_offset),
        box=cfg.box,
        servo_gain=cfg.teaching.servo_gain,
        pixel_noise_sigma=cfg.teaching.pixel_noise_sigma,
        rng=np.random.default_rng(cfg.teaching.noise_seed),
    )


def cmd_teach(args) -> int:
    cfg = load_config(args.config)
    script = artifacts.read_demo_script(args.demo_script)
    rig = _rig_from_config(cfg)
    result = run_scripted_teaching(rig, script,
                                   servo_height=cfg.teaching.servo_height,
                                   servo_dt=cfg.teaching.servo_dt,
                                   settle_time=cfg.teaching.settle_time)
    artifacts.write_trajectory(args.out, result)
    dfp = result.final_pose
    print(f"teaching finished: {len(result.session.trajectory)} samples, "
          f"duration {result.session.duration:.2f} s, "
          f"final pose [{', '.join(f'{v:.4f}' for v in dfp.to_list())}]")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    taught = artifacts.read_trajectory(args.traj)
    task = InsertionTask(scene=cfg.scene, learner=cfg.learner,
                         target_true=taught["dfp"], gains=cfg.gains, box=cfg.box)

    def snapshot(net, episode):
        artifacts.save_policy(args.out, net, cfg.learner, args.seed)

    result = train(task, cfg.learner, seed=args.seed, snapshot_cb=snapshot)
    artifacts.save_policy(args.out, result.network, cfg.learner, args.seed)
    artifacts.write_training_log(args.out + ".log.jsonl", result.log)
    wins = sum(r.success for r in result.log)
    print(f"training done: {wins}/{len(result.log)} episodes succeeded; "
          f"policy written to {args.out}")
    return EXIT_OK


def _execution_artifacts(cfg: WorkbenchConfig, traj_path, policy_path) -> ExecutionArtifacts:
    taught = artifacts.read_trajectory(traj_path)
    policy = None
    if policy_path is not None:
        policy, _learner, _seed = artifacts.load_policy(policy_path)
    return ExecutionArtifacts(
        scene=cfg.scene, learner=cfg.learner, gains=cfg.gains, box=cfg.box,
        spiral=cfg.spiral, trajectory=taught["trajectory"], final_pose=taught["dfp"],
        grasp_pose=taught["dgp"], observe_pose=taught["dvsp"],
        policy=policy, replay_force_stop=cfg.execution.replay_force_stop,
    )


def cmd_execute(args) -> int:
    cfg = load_config(args.config)
    method = {"pure": "pure_replay"}.get(args.method, args.method)
    art = _execution_artifacts(cfg, args.traj, args.policy)
    spec = BenchmarkSpec(method=method, group=args.group,
                         trials=args.trials or cfg.execution.trials, seed=args.seed)
    result = run_execution_benchmark(spec, art)
    artifacts.write_report(args.out, emit_report([result]))
    print(f"{method}/{args.group}: {result.successes}/{result.trials} successes, "
          f"max |F| {result.max_force_overall:.1f} N -> {args.out}")
    return EXIT_OK


def cmd_compare_actions(args) -> int:
    cfg = load_config(args.config)
    study = compare_action_sets(cfg.scene, cfg.learner, canonical_target(cfg.scene),
                                cfg.gains, cfg.box, seed=args.seed,
                                trials=cfg.execution.action_trials,
                                step_cap=cfg.execution.action_step_cap)
    artifacts.write_report(args.out, emit_report([], study))
    r = study.rates
    print(f"action-set study (n={study.trials}/set): "
          f"diagonal {r['set3_diagonal']:.2f} > single-axis {r['set2_single_axis']:.2f} "
          f"> operational {r['set1_operational']:.2f} "
          f"(strict={study.ordering_strict}, separated={study.ordering_separated})")
    return EXIT_OK


def cmd_serve(args) -> int:
    cfg = load_config(args.config)
    from .bridge import serve

    serve(cfg, host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "teach": cmd_teach,
    "train": cmd_train,
    "execute": cmd_execute,
    "compare-actions": cmd_compare_actions,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArtifactError, MissingArtifactError) as exc:
        print(f"artifact error: {exc}", file=sys.stderr)
        return EXIT_ARTIFACT
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
