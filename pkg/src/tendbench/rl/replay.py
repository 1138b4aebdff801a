"""Ring-buffer replay memory with proportional prioritized sampling.

Priorities live in a binary sum-tree so prefix-sum lookups and updates are
O(log n); stratified sampling draws one prefix per batch segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UnderfullMemoryError(RuntimeError):
    """Not enough stored transitions to fill a batch."""


@dataclass
class Transition:
    state: np.ndarray  # 6-vector wrench reading
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=np.float64).reshape(6)
        self.next_state = np.asarray(self.next_state, dtype=np.float64).reshape(6)
        if not (np.isfinite(self.state).all() and np.isfinite(self.next_state).all()):
            raise ValueError("transition states must be finite")
        if not 0 <= self.action < 4:
            raise ValueError("action index out of range")


class SumTree:
    def __init__(self, capacity: int):
        self.capacity = capacity
        self.nodes = np.zeros(2 * capacity)

    def update(self, leaf: int, value: float) -> None:
        idx = leaf + self.capacity
        delta = value - self.nodes[idx]
        while idx >= 1:
            self.nodes[idx] += delta
            idx //= 2

    def value(self, leaf: int) -> float:
        return float(self.nodes[leaf + self.capacity])

    def total(self) -> float:
        return float(self.nodes[1])

    def find_prefix(self, prefix: float) -> int:
        """Leaf index whose cumulative range contains the prefix sum."""
        idx = 1
        while idx < self.capacity:
            left = 2 * idx
            if prefix <= self.nodes[left]:
                idx = left
            else:
                prefix -= self.nodes[left]
                idx = left + 1
        return idx - self.capacity


class ReplayMemory:
    def __init__(self, capacity: int, alpha: float = 0.6):
        self.capacity = capacity
        self.alpha = alpha
        self.tree = SumTree(capacity)
        self.data: list[Transition | None] = [None] * capacity
        self.raw_priority = np.zeros(capacity)
        self.size = 0
        self.cursor = 0

    def __len__(self) -> int:
        return self.size

    @property
    def max_priority(self) -> float:
        return float(self.raw_priority[: self.size].max()) if self.size else 1.0

    def insert(self, transition: Transition) -> None:
        """New transitions enter at the current maximum priority (1 if empty),
        evicting the oldest entry once full."""
        priority = self.max_priority
        slot = self.cursor
        self.data[slot] = transition
        self.raw_priority[slot] = priority
        self.tree.update(slot, priority ** self.alpha)
        self.cursor = (self.cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def update_priority(self, slot: int, priority: float) -> None:
        self.raw_priority[slot] = priority
        self.tree.update(slot, priority ** self.alpha)

    def sample(self, batch: int, beta: float, rng: np.random.Generator):
        """Stratified proportional sampling; returns (transitions, slots,
        importance weights normalized by the batch maximum)."""
        if self.size < batch:
            raise UnderfullMemoryError(f"memory holds {self.size} < batch {batch}")
        total = self.tree.total()
        segment = total / batch
        slots = np.empty(batch, dtype=np.int64)
        probs = np.empty(batch)
        for i in range(batch):
            prefix = (i + rng.random()) * segment
            slot = self.tree.find_prefix(min(prefix, total * (1 - 1e-12)))
            if self.data[slot] is None:  # prefix fell on an empty leaf edge
                slot = (slot - 1) % self.size
            slots[i] = slot
            probs[i] = self.tree.value(slot) / total
        weights = (self.size * probs) ** (-beta)
        weights /= weights.max()
        return [self.data[s] for s in slots], slots, weights
