import math

import numpy as np
import pytest

from tendbench.simenv import (
    FORCE_SATURATION,
    InitialPenetrationError,
    SceneConfig,
    SceneError,
    check_success,
    contact_wrench,
    drive,
    reset,
    sensor_read,
    step,
)
from tendbench.transforms import FrameTag, Pose

from .oracles import sampled_contact_wrench


@pytest.fixture
def scene():
    return SceneConfig()


def above(z_up, x=0.0, y=0.0):
    # convenience: z axis points into the material, so "above" is negative z
    return Pose.from_translation(x, y, -z_up)


# ---------------------------------------------------------------------------
# scene invariants
# ---------------------------------------------------------------------------

def test_scene_rejects_nonpositive_clearance():
    with pytest.raises(SceneError, match="positive clearance"):
        SceneConfig(hole_radius=0.014, peg_radius=0.015)


def test_scene_rejects_success_deeper_than_hole():
    with pytest.raises(SceneError):
        SceneConfig(success_depth=0.03, hole_depth=0.02)


def test_scene_rejects_rotated_hole():
    with pytest.raises(SceneError, match="identity"):
        SceneConfig(hole_pose=Pose.from_rotvec([0.1, 0, 0]))


# ---------------------------------------------------------------------------
# contact wrench
# ---------------------------------------------------------------------------

def test_free_space_has_zero_wrench(scene):
    w = contact_wrench(scene, above(0.005))
    assert np.all(w.force == 0) and np.all(w.torque == 0)


def test_flat_press_matches_penalty_law(scene):
    # 1 mm penetration at 2e4 N/m with zero velocity -> 20 N vertical
    w = contact_wrench(scene, Pose.from_translation(0.05, 0.0, 0.001))
    assert w.force[2] == pytest.approx(-20.0, rel=1e-12)
    assert w.force[0] == w.force[1] == 0.0


def test_contact_normal_force_never_attractive(scene):
    # at zero velocity the wrench is pure normal force: it may only push the
    # peg out of the material (up and/or toward the bore axis), never pull in
    rng = np.random.default_rng(0)
    for _ in range(300):
        pos = Pose.from_translation(
            rng.uniform(-4e-3, 4e-3), rng.uniform(-4e-3, 4e-3), rng.uniform(-2e-3, 0.021)
        )
        w = contact_wrench(scene, pos)
        e = math.hypot(*pos.position[:2])
        assert w.force[2] <= 1e-12
        if e > 1e-9:
            assert np.dot(w.force[:2], pos.position[:2]) / e <= 1e-12


def test_contact_against_dense_sampling_oracle(scene):
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(200):
        pos = np.array(
            [rng.uniform(-3e-3, 3e-3), rng.uniform(-3e-3, 3e-3), rng.uniform(-1e-3, 0.0205)]
        )
        vel = rng.uniform(-0.05, 0.05, size=3)
        got = contact_wrench(scene, Pose(position=pos), vel)
        f_ref, t_ref = sampled_contact_wrench(scene, pos, vel)
        ref_mag = np.linalg.norm(f_ref)
        if ref_mag < 1e-9:
            assert np.linalg.norm(got.force) < 1e-9
            continue
        checked += 1
        assert np.linalg.norm(got.force - f_ref) <= 0.05 * ref_mag + 1e-9
        t_scale = max(np.linalg.norm(t_ref), 1e-3)
        assert np.linalg.norm(got.torque - t_ref) <= 0.05 * t_scale + 5e-4
    assert checked > 50  # the sampler must actually exercise contact


def test_force_saturates_at_limit(scene):
    w = contact_wrench(scene, Pose.from_translation(0.05, 0.0, 0.05))
    assert np.linalg.norm(w.force) == pytest.approx(FORCE_SATURATION, rel=1e-9)


# ---------------------------------------------------------------------------
# reset / determinism
# ---------------------------------------------------------------------------

def test_reset_free_space_state(scene):
    st = reset(scene, above(0.05), seed=3)
    assert np.all(st.raw_wrench.as_vector() == 0)
    assert np.all(st.peg_velocity == 0)
    assert st.step_count == 0


def test_reset_rejects_initial_penetration(scene):
    with pytest.raises(InitialPenetrationError):
        reset(scene, Pose.from_translation(0.003, 0.0, 0.005), seed=0)


def test_identical_seeds_give_bitwise_identical_streams(scene):
    def roll(seed):
        st = reset(scene, above(0.02), seed=seed)
        frames = []
        for k in range(100):
            target = Pose.from_translation(1e-4 * k, 0.0, -0.02 + 2e-4 * k)
            st = step(st, scene, target, scene.physics_dt)
            frames.append(st.vec.copy())
            sensor_read(st)
        return np.array(frames)

    a, b = roll(42), roll(42)
    assert np.array_equal(a, b)


def test_step_requires_physics_dt(scene):
    st = reset(scene, above(0.02), seed=0)
    with pytest.raises(ValueError):
        step(st, scene, above(0.02), dt=0.01)


# ---------------------------------------------------------------------------
# plant dynamics
# ---------------------------------------------------------------------------

def test_equilibrium_state_is_stationary(scene):
    st = reset(scene, above(0.03), seed=0)
    nxt = step(st, scene, above(0.03), scene.physics_dt)
    assert nxt.step_count == 1
    assert np.allclose(nxt.peg_pose.position, st.peg_pose.position)
    assert np.all(nxt.raw_wrench.as_vector() == 0)


def test_trailing_lateral_offset_reads_spring_force(scene):
    # command held 2 mm ahead of the peg laterally: sensed force settles at
    # cup_lateral_stiffness * offset = 10 N
    st = reset(scene, above(0.05), seed=0)
    for _ in range(400):
        p = st.peg_pose.position
        target = Pose.from_translation(p[0] + 0.002, p[1], p[2])
        st = step(st, scene, target, scene.physics_dt)
    assert st.raw_wrench.force[0] == pytest.approx(10.0, rel=1e-3)


def test_free_space_error_is_non_increasing(scene):
    st = reset(scene, above(0.05), seed=0)
    target = Pose.from_translation(0.01, -0.02, -0.08)
    prev = np.linalg.norm(st.peg_pose.position - target.position)
    for _ in range(1000):
        st = step(st, scene, target, scene.physics_dt)
        cur = np.linalg.norm(st.peg_pose.position - target.position)
        assert cur <= prev + 1e-15
        prev = cur


def test_max_force_is_monotone(scene):
    st = reset(scene, above(0.02), seed=0)
    seen = 0.0
    for k in range(300):
        st = step(st, scene, Pose.from_translation(0.05, 0.0, 0.002), scene.physics_dt)
        assert st.max_abs_force_seen >= seen - 1e-15
        seen = st.max_abs_force_seen
    assert seen > 0.0


# ---------------------------------------------------------------------------
# filter and sensor
# ---------------------------------------------------------------------------

def test_filter_step_response_time_constant(scene):
    # first-order lag: 63.2 % of a step after tau = 1/(2*pi*fc) ~ 17 ms
    tau = 1.0 / (2 * math.pi * scene.filter_cutoff_hz)
    alpha = scene.filter_alpha
    y = 0.0
    n = round(tau / scene.physics_dt)
    for _ in range(n):
        y += alpha * (1.0 - y)
    assert y == pytest.approx(1 - math.exp(-n * scene.physics_dt / tau), rel=1e-12)
    assert 0.62 < y < 0.65


def test_filter_dc_gain_is_unity(scene):
    # constant input converges to itself within 0.1 % after 10 time constants
    st = reset(scene, above(0.05), seed=0)
    for _ in range(400):  # 0.4 s >> 10 * tau = 0.17 s
        p = st.peg_pose.position
        st = step(st, scene, Pose.from_translation(p[0] + 0.002, p[1], p[2]), scene.physics_dt)
    filt = st.filtered_wrench.force[0]
    raw = st.raw_wrench.force[0]
    assert filt == pytest.approx(raw, rel=1e-3)


def test_sensor_noise_statistics(scene):
    st = reset(scene, above(0.05), seed=7)
    st.noise_sigma = 0.1
    n = 100_000
    samples = np.array([sensor_read(st).force[0] for _ in range(n)])
    assert abs(samples.mean()) < 3 * 0.1 / math.sqrt(n)
    assert samples.std() == pytest.approx(0.1, rel=0.02)


def test_sensor_read_noiseless_matches_filtered(scene):
    st = reset(scene, above(0.05), seed=0)
    st.noise_sigma = 0.0
    w = sensor_read(st)
    assert w.frame is FrameTag.EE
    assert np.array_equal(w.as_vector(), st.filtered_wrench.as_vector())


# ---------------------------------------------------------------------------
# success predicate
# ---------------------------------------------------------------------------

def test_check_success_geometry(scene):
    st = reset(scene, above(0.05), seed=0)
    st.vec[0:3] = (0.0, 0.0, 0.012)
    assert check_success(st, scene)
    st.vec[0:3] = (0.0, 0.0, 0.0)
    assert not check_success(st, scene)
    st.vec[0:3] = (0.0, 0.0, scene.success_depth)  # inclusive boundary
    assert check_success(st, scene)
    # wall-pressed at depth: rigid projection keeps this a success
    st.vec[0:3] = (0.001, 0.0, 0.012)
    assert check_success(st, scene)
    # buried in the plate beside the hole: never a success
    st.vec[0:3] = (0.04, 0.0, 0.012)
    assert not check_success(st, scene)
    # deep enough but hovering outside the bore entirely
    st.vec[0:3] = (0.0, 0.0, 0.009)
    assert not check_success(st, scene)


# ---------------------------------------------------------------------------
# suction-cup deformation law
# ---------------------------------------------------------------------------

def test_cup_deflection_matches_spring_law(scene):
    # press laterally against the bore wall: the steady sensed lateral force
    # must equal cup_lateral_stiffness times the command-vs-peg offset
    st = reset(scene, Pose.from_translation(0.0, 0.0, -0.002), seed=0)
    st = drive(st, scene, 3000, waypoint=np.array([0.0, 0.0, 0.005]), qdot_max=np.full(3, 0.05))
    st = drive(st, scene, 3000, waypoint=np.array([0.002, 0.0, 0.005]), qdot_max=np.full(3, 0.05))
    f = st.raw_wrench.force
    offset = st.ee_command_pose.position - st.peg_pose.position
    assert abs(f[0]) > 1.0
    assert offset[0] == pytest.approx(f[0] / scene.cup_lateral_stiffness, rel=0.02)


def test_zero_contact_force_means_zero_offset(scene):
    st = reset(scene, above(0.05), seed=0)
    st = drive(st, scene, 2000, waypoint=np.array([0.01, 0.0, -0.04]), qdot_max=np.full(3, 0.05))
    assert np.linalg.norm(st.raw_wrench.force) < 1e-6
    assert np.linalg.norm(st.ee_command_pose.position - st.peg_pose.position) < 1e-9
