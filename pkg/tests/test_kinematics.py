import math

import numpy as np
import pytest

from scenariomine.core import Track
from scenariomine.kinematics import estimate_states, smoothing_half_window, unwrap_yaws

NS = 1_000_000_000


def make_track(positions, yaws=None, rate=10.0, category="REGULAR_VEHICLE"):
    positions = np.asarray(positions, dtype=np.float64)
    n = len(positions)
    ts = (1_000_000 * NS + (np.arange(n) * (NS / rate)).astype(np.int64)).tolist()
    if yaws is None:
        yaws = np.zeros(n)
    xyz = np.column_stack([positions, np.zeros(n)])
    return Track("t", category, ts, xyz, yaws, np.tile([4.0, 2.0, 1.5], (n, 1)), np.ones(n))


class TestWindow:
    def test_five_samples_at_10hz(self):
        assert smoothing_half_window(0.1) == 2  # 2*2+1 = 5 samples

    def test_single_sample_at_2hz(self):
        assert smoothing_half_window(0.5) == 0  # one 0.5 s sample covers the span


class TestEstimateStates:
    def test_stationary(self):
        track = make_track(np.tile([3.0, 4.0], (20, 1)))
        k = estimate_states(track)
        assert np.allclose(k.speed, 0.0)
        assert np.allclose(k.accel_forward, 0.0)
        assert np.allclose(k.accel_lateral, 0.0)
        assert np.allclose(k.yaw_rate, 0.0)

    def test_uniform_motion_exact(self):
        t = np.arange(40) * 0.1
        track = make_track(np.column_stack([10.0 * t, np.zeros_like(t)]))
        k = estimate_states(track)
        assert np.allclose(k.speed, 10.0, atol=1e-6)
        assert np.allclose(k.accel_forward, 0.0, atol=1e-6)

    def test_quadratic_profile_interior_accel(self):
        t = np.arange(60) * 0.1
        x = 0.5 * 2.0 * t**2
        track = make_track(np.column_stack([x, np.zeros_like(t)]))
        k = estimate_states(track)
        interior = slice(4, -4)
        assert np.allclose(k.accel_forward[interior], 2.0, atol=0.05)
        # 2.5% relative tolerance as an independent finite-difference check
        assert np.abs(k.accel_forward[interior] - 2.0).max() <= 0.025 * 2.0

    def test_single_box_all_zero(self):
        track = make_track([[1.0, 2.0]])
        k = estimate_states(track)
        assert len(k) == 1
        assert k[0].speed == 0.0 and k[0].yaw_rate == 0.0

    def test_circular_motion_lateral_accel(self):
        # counterclockwise circle, v = 10 m/s, r = 20 m -> a_lat = +5 m/s^2
        r, v = 20.0, 10.0
        omega = v / r
        t = np.arange(80) * 0.1
        theta = omega * t
        pos = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        yaws = theta + math.pi / 2.0
        track = make_track(pos, yaws=yaws)
        k = estimate_states(track)
        interior = slice(6, -6)
        assert np.allclose(k.accel_lateral[interior], 5.0, atol=0.15)
        assert np.allclose(k.speed[interior], 10.0, atol=0.1)
        assert np.allclose(k.yaw_rate[interior], omega, atol=1e-3)

    def test_frame_invariance_under_rotation(self):
        rng = np.random.default_rng(2)
        t = np.arange(50) * 0.1
        pos = np.column_stack([5 * t + np.sin(t), 2 * t + np.cos(1.3 * t)])
        yaws = 0.3 * t
        base = estimate_states(make_track(pos, yaws=yaws))
        angle = 0.7
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        moved = estimate_states(make_track(pos @ rot.T + [123.4, -56.7], yaws=yaws + angle))
        assert np.allclose(base.speed, moved.speed, atol=1e-9)
        assert np.allclose(base.accel_forward, moved.accel_forward, atol=1e-9)
        assert np.allclose(base.accel_lateral, moved.accel_lateral, atol=1e-9)
        assert np.allclose(base.yaw_rate, moved.yaw_rate, atol=1e-9)

    def test_yaw_wrap_bounded_rate(self):
        # steady rotation crossing the +-pi seam
        t = np.arange(50) * 0.1
        yaws = ((3.0 + 0.5 * t + math.pi) % (2 * math.pi)) - math.pi
        track = make_track(np.zeros((50, 2)), yaws=yaws)
        k = estimate_states(track)
        assert np.abs(k.yaw_rate).max() < 2 * math.pi / 0.1
        assert np.allclose(k.yaw_rate[1:-1], 0.5, atol=1e-6)


class TestUnwrap:
    def test_no_jumps(self):
        yaws = np.array([3.0, 3.1, -3.1, -3.0])  # passes through pi
        u = unwrap_yaws(yaws)
        assert np.abs(np.diff(u)).max() < 1.0

    def test_plain_sequence_unchanged(self):
        yaws = np.array([0.0, 0.2, 0.4])
        assert np.allclose(unwrap_yaws(yaws), yaws)
