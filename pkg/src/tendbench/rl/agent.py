"""Training and execution of the region-gated learned force policy.

Double estimation for targets (online network picks the argmax, target
network values it), proportional prioritized replay, and a per-step learning
loop at the decision rate.  Training is fully determined by (config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import LearnerConfig
from .network import Adam, QNetwork
from .policy import N_ACTIONS, symmetry_expand
from .replay import ReplayMemory, Transition
from .task import InsertionTask, TaskState, sample_planar_error

PRIORITY_FLOOR = 1e-3
GRAD_CLIP_NORM = 5.0


@dataclass
class EpisodeLog:
    episode: int
    return_: float
    steps: int
    success: bool
    max_force: float

    def to_dict(self) -> dict:
        return {
            "episode": self.episode,
            "return": self.return_,
            "steps": self.steps,
            "success": bool(self.success),
            "max_force": self.max_force,
        }


@dataclass
class EpisodeResult:
    success: bool
    steps: int
    max_force: float
    final_error: float
    commanded_max: float
    gate_trace: list[int] = field(default_factory=list)


def td_update(net: QNetwork, target_net: QNetwork, batch: list[Transition],
              weights: np.ndarray, discount: float, adam: Adam):
    """One weighted double-estimation TD step; returns (loss, new priorities)."""
    states = np.stack([t.state for t in batch])
    next_states = np.stack([t.next_state for t in batch])
    actions = np.array([t.action for t in batch])
    rewards = np.array([t.reward for t in batch])
    terminal = np.array([t.terminal for t in batch], dtype=bool)

    q_next_online = net.forward(next_states)
    a_star = np.argmax(q_next_online, axis=1)
    q_next_target = target_net.forward(next_states)
    bootstrap = q_next_target[np.arange(len(batch)), a_star]
    targets = rewards + discount * np.where(terminal, 0.0, bootstrap)

    q, activations = net.forward_cached(states)
    picked = q[np.arange(len(batch)), actions]
    delta = picked - targets
    w = np.asarray(weights, dtype=np.float64)
    loss = float(np.mean(w * delta * delta))
    if not np.isfinite(loss):
        raise FloatingPointError(
            f"non-finite TD loss (delta range [{delta.min()}, {delta.max()}])"
        )

    grad_out = np.zeros_like(q)
    grad_out[np.arange(len(batch)), actions] = 2.0 * w * delta / len(batch)
    grads_w, grads_b = net.backward(activations, grad_out)
    grads = grads_w + grads_b
    # global norm clip keeps outlier TD errors from destabilizing the head
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if total > GRAD_CLIP_NORM:
        scale = GRAD_CLIP_NORM / total
        grads = [g * scale for g in grads]
    adam.step(net.params(), grads)
    return loss, np.abs(delta) + PRIORITY_FLOOR


def greedy_action(net: QNetwork, obs: np.ndarray) -> int:
    return int(np.argmax(net.forward(obs)))


@dataclass
class TrainResult:
    network: QNetwork
    log: list[EpisodeLog]
    seed: int


def validation_score(task: InsertionTask, net: QNetwork, rollouts: int, seed: int) -> int:
    """Greedy successes over a fixed validation error distribution."""
    rng = np.random.default_rng(seed)
    wins = 0
    for _ in range(rollouts):
        offset = sample_planar_error(rng, task.learner.delta_p_min, task.learner.delta_p_max)
        ts = task.reset(seed=int(rng.integers(2**31 - 1)), offset=offset)
        wins += execute(task, net, ts).success
    return wins


def train(task: InsertionTask, config: LearnerConfig, seed: int,
          snapshot_cb=None, progress_cb=None) -> TrainResult:
    """Run the full episodic training loop.

    The TD iteration keeps drifting even once competent, so the result is
    the best greedy-validated checkpoint rather than the final iterate.
    ``snapshot_cb(net, episode)`` fires at every validation point for abort
    safety; ``progress_cb(log_row)`` after each episode.
    """
    master = np.random.default_rng(seed)
    net = QNetwork.initialize(config.layer_sizes, master)
    target = net.copy()
    adam = Adam(net.params(), lr=config.learn_rate)
    memory = ReplayMemory(config.replay_capacity, alpha=config.per_alpha)
    validation_seed = int(master.integers(2**31 - 1))
    best_net = net.copy()
    best_score = -1

    logs: list[EpisodeLog] = []
    global_steps = 0
    for episode in range(config.episodes):
        offset = sample_planar_error(master, config.delta_p_min, config.delta_p_max)
        ts = task.reset(seed=int(master.integers(2**31 - 1)), offset=offset)
        eps = config.epsilon_at(episode)
        beta = config.beta_at(episode)
        ep_return = 0.0

        for _ in range(config.k_max):
            obs = task.observe(ts)
            if task.in_region(ts):
                if master.random() < eps:
                    action = int(master.integers(N_ACTIONS))
                else:
                    action = greedy_action(net, obs)
            else:
                action = None
            ts = task.step(ts, action)
            done = task.success(ts)
            reward = task.reward(ts)
            ep_return += reward

            if action is not None:
                next_obs = task.observe(ts)
                # the task is rotation-equivariant about the bore axis; store
                # all four quarter-turn images of each observed transition
                for s_rot, a_rot, sn_rot in symmetry_expand(obs, action, next_obs):
                    memory.insert(Transition(s_rot, a_rot, reward, sn_rot, done))
            global_steps += 1

            if len(memory) >= max(config.warmup_transitions, config.batch_size):
                for _ in range(config.updates_per_step):
                    batch, slots, weights = memory.sample(config.batch_size, beta, master)
                    _, priorities = td_update(net, target, batch, weights,
                                              config.discount, adam)
                    for slot, priority in zip(slots, priorities):
                        memory.update_priority(int(slot), float(priority))
            if global_steps % config.target_sync_every == 0:
                target = net.copy()
            if done:
                break

        row = EpisodeLog(episode, ep_return, ts.steps_used, task.success(ts),
                         ts.sim.max_abs_force_seen)
        logs.append(row)
        if progress_cb is not None:
            progress_cb(row)
        if (episode + 1) % config.validate_every == 0:
            score = validation_score(task, net, config.validation_rollouts, validation_seed)
            if score > best_score:
                best_score = score
                best_net = net.copy()
            if snapshot_cb is not None:
                snapshot_cb(best_net, episode)
    return TrainResult(network=best_net, log=logs, seed=seed)


def execute(task: InsertionTask, net: QNetwork, ts: TaskState,
            k_max: int | None = None, monitor=None) -> EpisodeResult:
    """Greedy hybrid rollout from an already-initialized task state.

    ``monitor(ts, gate)`` is called after each decision step (live viewers).
    """
    cap = k_max if k_max is not None else task.learner.k_max
    gates = []
    for _ in range(cap):
        gate = task.in_region(ts)
        gates.append(gate)
        action = greedy_action(net, task.observe(ts)) if gate else None
        ts = task.step(ts, action)
        if monitor is not None:
            monitor(ts, gate)
        if task.success(ts):
            break
    return EpisodeResult(
        success=task.success(ts),
        steps=ts.steps_used,
        max_force=ts.sim.max_abs_force_seen,
        final_error=task.final_error(ts),
        commanded_max=ts.commanded_max,
        gate_trace=gates,
    )
