import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tendbench.transforms import (
    InvalidPoseError,
    Pose,
    compose,
    compute_dfp,
    inverse,
    quat_from_rotvec,
    quat_to_rotvec,
    relative_object_pose,
    translation_distance,
)

from .oracles import mat_apply, mat_from_pose, random_pose_parts


def random_pose(rng, span=1.0):
    p, q = random_pose_parts(rng, span)
    return Pose(position=p, orientation=q)


def test_identity_compose_is_neutral():
    rng = np.random.default_rng(1)
    t = random_pose(rng)
    assert compose(Pose.identity(), t).approx_equal(t)
    assert compose(t, Pose.identity()).approx_equal(t)


def test_compose_with_inverse_is_identity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        t = random_pose(rng)
        assert compose(t, inverse(t)).approx_equal(Pose.identity(), tol=1e-9)
        assert compose(inverse(t), t).approx_equal(Pose.identity(), tol=1e-9)


def test_compose_applies_right_operand_first():
    # translation(1,0,0) after rotZ(90 deg) maps (0,1,0) to the origin
    t = Pose.from_translation(1.0, 0.0, 0.0)
    r = Pose.from_rotvec([0.0, 0.0, math.pi / 2])
    moved = compose(t, r).apply(np.array([0.0, 1.0, 0.0]))
    assert np.allclose(moved, [0.0, 0.0, 0.0], atol=1e-12)


def test_compose_matches_matrix_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = random_pose(rng), random_pose(rng)
        point = rng.uniform(-1, 1, size=3)
        expected = mat_apply(
            mat_from_pose(a.position, a.orientation) @ mat_from_pose(b.position, b.orientation),
            point,
        )
        assert np.allclose(compose(a, b).apply(point), expected, atol=1e-9)


def test_compose_rejects_non_unit_quaternion():
    with pytest.raises(InvalidPoseError):
        Pose(orientation=(1.0, 0.1, 0.0, 0.0))


def test_inverse_of_pure_translation_negates():
    t = Pose.from_translation(0.3, -0.2, 0.9)
    assert inverse(t).approx_equal(Pose.from_translation(-0.3, 0.2, -0.9))
    assert inverse(Pose.identity()).approx_equal(Pose.identity())


def test_relative_object_pose_coincident_poses():
    rng = np.random.default_rng(4)
    shared = random_pose(rng)
    assert relative_object_pose(Pose.identity(), shared, shared).approx_equal(Pose.identity())


def test_relative_object_pose_matches_matrix_oracle():
    rng = np.random.default_rng(5)
    for _ in range(30):
        c_x_e, b_x_dvsp, b_x_dgp = (random_pose(rng) for _ in range(3))
        m = (
            mat_from_pose(c_x_e.position, c_x_e.orientation)
            @ np.linalg.inv(mat_from_pose(b_x_dvsp.position, b_x_dvsp.orientation))
            @ mat_from_pose(b_x_dgp.position, b_x_dgp.orientation)
        )
        got = relative_object_pose(c_x_e, b_x_dvsp, b_x_dgp)
        point = rng.uniform(-1, 1, size=3)
        assert np.allclose(got.apply(point), mat_apply(m, point), atol=1e-9)


def test_relative_object_pose_vertical_shift():
    rng = np.random.default_rng(6)
    c_x_e = random_pose(rng)
    b_x_dvsp = random_pose(rng)
    b_x_dgp = compose(b_x_dvsp, Pose.from_translation(0.0, 0.0, 0.1))
    got = relative_object_pose(c_x_e, b_x_dvsp, b_x_dgp)
    expected = compose(c_x_e, Pose.from_translation(0.0, 0.0, 0.1))
    assert got.approx_equal(expected, tol=1e-9)


def test_dfp_recovers_grasp_pose_when_object_unmoved():
    rng = np.random.default_rng(7)
    for _ in range(20):
        c_x_e, b_x_dvsp, b_x_dgp = (random_pose(rng) for _ in range(3))
        c_x_o = relative_object_pose(c_x_e, b_x_dvsp, b_x_dgp)
        dfp = compute_dfp(b_x_dvsp, inverse(c_x_e), c_x_o)
        assert dfp.approx_equal(b_x_dgp, tol=1e-9)


def test_dfp_shifts_with_object():
    rng = np.random.default_rng(8)
    c_x_e, b_x_dvsp, b_x_dgp = (random_pose(rng) for _ in range(3))
    c_x_o = relative_object_pose(c_x_e, b_x_dvsp, b_x_dgp)
    delta = Pose.from_translation(0.02, -0.01, 0.05)
    # EE keeps its relative view of the object, so both chain terms shift together
    dfp = compute_dfp(compose(delta, b_x_dvsp), inverse(c_x_e), c_x_o)
    assert dfp.approx_equal(compose(delta, b_x_dgp), tol=1e-9)


def test_dfp_of_identities_is_identity():
    e = Pose.identity()
    assert compute_dfp(e, e, e).approx_equal(e)


def test_translation_distance_values():
    assert translation_distance(Pose.identity(), Pose.identity()) == 0.0
    a = Pose.from_translation(0.0, 0.0, 0.0)
    b = Pose.from_translation(3e-3, 4e-3, 0.0)
    assert translation_distance(a, b) == pytest.approx(5e-3, abs=1e-15)


def test_translation_distance_matches_componentwise_oracle():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a, b = random_pose(rng), random_pose(rng)
        expected = math.sqrt(sum((a.position[i] - b.position[i]) ** 2 for i in range(3)))
        assert translation_distance(a, b) == pytest.approx(expected, rel=1e-12)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_pose(rng) for _ in range(3))
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert left.approx_equal(right, tol=1e-9)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_translation_distance_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_pose(rng) for _ in range(3))
    assert translation_distance(a, b) == pytest.approx(translation_distance(b, a), rel=1e-12)
    assert translation_distance(a, c) <= translation_distance(a, b) + translation_distance(b, c) + 1e-12
    assert translation_distance(a, a) == 0.0


def test_rotvec_round_trip():
    rng = np.random.default_rng(10)
    for _ in range(30):
        r = rng.uniform(-1.5, 1.5, size=3)
        assert np.allclose(quat_to_rotvec(quat_from_rotvec(r)), r, atol=1e-12)
    assert np.allclose(quat_to_rotvec(quat_from_rotvec(np.zeros(3))), np.zeros(3))


def test_pose_list_round_trip():
    rng = np.random.default_rng(11)
    p = random_pose(rng)
    assert Pose.from_list(p.to_list()).approx_equal(p, tol=1e-15)
    with pytest.raises(InvalidPoseError):
        Pose.from_list([0, 0, 0, 1])
