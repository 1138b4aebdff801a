"""Hyperparameters for the region-gated learned insertion policy."""

from __future__ import annotations

from dataclasses import dataclass, field, fields


@dataclass
class LearnerConfig:
    region_radius: float = 0.015  # m, learned arm active inside this ball
    force_amplitude: float = 10.0  # N per commanded axis
    epsilon_start: float = 1.0
    epsilon_end: float = 0.3
    epsilon_anneal_episodes: int = 100
    replay_capacity: int = 20000
    episodes: int = 200
    k_max: int = 50  # decision steps per search episode
    batch_size: int = 64
    discount: float = 0.5
    updates_per_step: int = 4
    target_sync_every: int = 200  # decision steps between target refreshes
    learn_rate: float = 1e-3
    per_alpha: float = 0.6
    per_beta_start: float = 0.4
    per_beta_end: float = 1.0
    decision_period: float = 0.1  # s, 10 Hz state sampling
    delta_p_min: float = 0.002  # m, training start-pose error band
    delta_p_max: float = 0.004
    warmup_transitions: int = 500
    layer_sizes: tuple[int, ...] = (6, 64, 64, 4)
    # greedy validation for snapshot selection (early stopping): the TD
    # iteration keeps drifting, so the returned policy is the best checkpoint
    # rather than whatever the last episode left behind
    validate_every: int = 10  # episodes
    validation_rollouts: int = 20

    def __post_init__(self):
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must be in (0, 1]")
        if self.region_radius < 2.0 * self.delta_p_max:
            raise ValueError("region_radius must be at least twice the maximum start-pose error")
        if self.replay_capacity < self.batch_size:
            raise ValueError("replay capacity must hold at least one batch")
        if self.layer_sizes[0] != 6 or self.layer_sizes[-1] != 4:
            raise ValueError("network must map the 6-D wrench to the 4 force actions")

    def epsilon_at(self, episode: int) -> float:
        if self.epsilon_anneal_episodes <= 0:
            return self.epsilon_end
        frac = min(episode / self.epsilon_anneal_episodes, 1.0)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)

    def beta_at(self, episode: int) -> float:
        if self.episodes <= 1:
            return self.per_beta_end
        frac = min(episode / (self.episodes - 1), 1.0)
        return self.per_beta_start + frac * (self.per_beta_end - self.per_beta_start)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @staticmethod
    def from_dict(data: dict) -> "LearnerConfig":
        known = {f.name for f in fields(LearnerConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown learner keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "layer_sizes" in kwargs:
            kwargs["layer_sizes"] = tuple(kwargs["layer_sizes"])
        return LearnerConfig(**kwargs)
