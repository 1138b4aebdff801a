import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tendbench.rl import ReplayMemory, SumTree, Transition, UnderfullMemoryError


def make_transition(rng, action=None):
    return Transition(
        rng.normal(size=6),
        int(rng.integers(4)) if action is None else action,
        float(rng.normal()),
        rng.normal(size=6),
        bool(rng.random() < 0.1),
    )


def test_sum_tree_root_tracks_sum():
    tree = SumTree(8)
    values = [0.5, 1.25, 0.0, 3.0]
    for i, v in enumerate(values):
        tree.update(i, v)
    assert tree.total() == pytest.approx(sum(values), abs=1e-12)
    tree.update(1, 0.25)
    assert tree.total() == pytest.approx(0.5 + 0.25 + 0.0 + 3.0, abs=1e-12)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_sum_tree_consistency_under_random_operations(seed):
    rng = np.random.default_rng(seed)
    capacity = int(rng.integers(2, 300))
    tree = SumTree(capacity)
    shadow = np.zeros(capacity)
    for _ in range(400):
        leaf = int(rng.integers(capacity))
        value = float(rng.uniform(0, 5))
        tree.update(leaf, value)
        shadow[leaf] = value
    assert tree.total() == pytest.approx(shadow.sum(), abs=1e-6)
    for leaf in range(capacity):
        assert tree.value(leaf) == pytest.approx(shadow[leaf], abs=1e-9)


def test_find_prefix_selects_correct_leaf():
    tree = SumTree(4)
    for i, v in enumerate([1.0, 2.0, 3.0, 4.0]):
        tree.update(i, v)
    assert tree.find_prefix(0.5) == 0
    assert tree.find_prefix(1.5) == 1
    assert tree.find_prefix(3.5) == 2
    assert tree.find_prefix(9.9) == 3


def test_insert_priority_conventions():
    rng = np.random.default_rng(0)
    mem = ReplayMemory(capacity=8, alpha=1.0)
    mem.insert(make_transition(rng))
    assert mem.raw_priority[0] == 1.0  # empty memory convention
    mem.update_priority(0, 0.2)
    mem.insert(make_transition(rng))
    assert mem.raw_priority[1] == pytest.approx(0.2)  # max of current priorities
    mem.update_priority(1, 3.0)
    mem.insert(make_transition(rng))
    assert mem.raw_priority[2] == pytest.approx(3.0)


def test_ring_eviction_keeps_size_bounded():
    rng = np.random.default_rng(1)
    mem = ReplayMemory(capacity=2, alpha=1.0)
    first = make_transition(rng, action=0)
    mem.insert(first)
    mem.insert(make_transition(rng, action=1))
    mem.insert(make_transition(rng, action=2))
    assert len(mem) == 2
    stored_actions = {t.action for t in mem.data if t is not None}
    assert stored_actions == {1, 2}  # oldest evicted


def test_sample_underfull_raises():
    rng = np.random.default_rng(2)
    mem = ReplayMemory(capacity=64, alpha=1.0)
    for _ in range(3):
        mem.insert(make_transition(rng))
    with pytest.raises(UnderfullMemoryError):
        mem.sample(4, beta=1.0, rng=rng)


def test_uniform_priorities_sample_uniformly():
    rng = np.random.default_rng(3)
    mem = ReplayMemory(capacity=4, alpha=1.0)
    for a in range(4):
        mem.insert(make_transition(rng, action=a))
    counts = np.zeros(4)
    draws = 100_000
    for _ in range(draws // 4):
        _, slots, weights = mem.sample(4, beta=1.0, rng=rng)
        assert np.allclose(weights, 1.0)  # beta=1 with uniform priorities
        for s in slots:
            counts[s] += 1
    freqs = counts / draws
    sigma = np.sqrt(0.25 * 0.75 / draws)
    assert np.all(np.abs(freqs - 0.25) < 3 * sigma + 0.01)


def test_proportional_sampling_three_to_one():
    # priorities 3:1 at alpha=1 -> sampling frequencies 0.75/0.25 within 2 %
    rng = np.random.default_rng(4)
    mem = ReplayMemory(capacity=2, alpha=1.0)
    mem.insert(make_transition(rng, action=0))
    mem.insert(make_transition(rng, action=1))
    mem.update_priority(0, 3.0)
    mem.update_priority(1, 1.0)
    counts = np.zeros(2)
    draws = 100_000
    for _ in range(draws // 2):
        _, slots, _ = mem.sample(2, beta=0.4, rng=rng)
        for s in slots:
            counts[s] += 1
    freqs = counts / draws
    assert abs(freqs[0] - 0.75) < 0.02
    assert abs(freqs[1] - 0.25) < 0.02


def test_importance_weights_formula():
    rng = np.random.default_rng(5)
    mem = ReplayMemory(capacity=2, alpha=1.0)
    mem.insert(make_transition(rng))
    mem.insert(make_transition(rng))
    mem.update_priority(0, 3.0)
    mem.update_priority(1, 1.0)
    beta = 0.7
    for _ in range(50):
        _, slots, weights = mem.sample(2, beta=beta, rng=rng)
        probs = np.array([3.0 / 4.0 if s == 0 else 1.0 / 4.0 for s in slots])
        expected = (len(mem) * probs) ** (-beta)
        expected /= expected.max()
        assert np.allclose(weights, expected)
