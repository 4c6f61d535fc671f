"""Per-track motion estimation from city-frame boxes.

Velocity comes from central finite differences on smoothed positions
(one-sided at the ends), acceleration from central differences on velocity,
and yaw rate from central differences on unwrapped yaw. Forward/lateral
acceleration project onto the box heading and its left normal, so the lateral
sign is left-positive and stays defined when nearly stopped.

The smoothing window is a centered moving average spanning ~0.5 s (5 samples
at 10 Hz); jittery tracks otherwise misclassify motion. The exact operation
order below is mirrored by the independent test oracle, so keep it stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from scenariomine.core import Track

SMOOTHING_SPAN_S = 0.5


class KinematicState(NamedTuple):
    timestamp: int
    velocity: tuple[float, float]
    speed: float
    accel_forward: float
    accel_lateral: float
    yaw_rate: float


@dataclass(frozen=True)
class TrackKinematics:
    timestamps: np.ndarray
    velocity: np.ndarray  # (T, 2) city frame
    speed: np.ndarray
    accel_forward: np.ndarray
    accel_lateral: np.ndarray
    yaw_rate: np.ndarray

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def __getitem__(self, i: int) -> KinematicState:
        return KinematicState(
            int(self.timestamps[i]),
            (float(self.velocity[i, 0]), float(self.velocity[i, 1])),
            float(self.speed[i]),
            float(self.accel_forward[i]),
            float(self.accel_lateral[i]),
            float(self.yaw_rate[i]),
        )


def unwrap_yaws(yaws: np.ndarray) -> np.ndarray:
    """Remove 2-pi jumps between consecutive yaw samples."""
    out = np.empty(len(yaws), dtype=np.float64)
    out[0] = yaws[0]
    for i in range(1, len(yaws)):
        d = yaws[i] - out[i - 1]
        while d > np.pi:
            d -= 2.0 * np.pi
        while d <= -np.pi:
            d += 2.0 * np.pi
        out[i] = out[i - 1] + d
    return out


def smoothing_half_window(dt_s: float) -> int:
    """Half-width of the centered moving average covering >= SMOOTHING_SPAN_S."""
    if dt_s <= 0:
        return 0
    n = int(np.ceil(SMOOTHING_SPAN_S / dt_s))
    if n % 2 == 0:
        n += 1
    return (n - 1) // 2


def smooth_positions(xy: np.ndarray, half: int) -> np.ndarray:
    """Centered moving average; the window shrinks symmetrically at the ends
    so linear motion stays exact everywhere."""
    if half == 0:
        return xy.astype(np.float64, copy=True)
    n = len(xy)
    out = np.empty_like(xy, dtype=np.float64)
    for i in range(n):
        h = min(half, i, n - 1 - i)
        acc = xy[i - h].astype(np.float64, copy=True)
        for k in range(i - h + 1, i + h + 1):
            acc = acc + xy[k]
        out[i] = acc / (2 * h + 1)
    return out


def _central_diff(values: np.ndarray, t_s: np.ndarray) -> np.ndarray:
    """Central differences with one-sided stencils at the ends."""
    n = len(values)
    out = np.zeros_like(values, dtype=np.float64)
    if n < 2:
        return out
    out[0] = (values[1] - values[0]) / (t_s[1] - t_s[0])
    out[-1] = (values[-1] - values[-2]) / (t_s[-1] - t_s[-2])
    if n > 2:
        denom = t_s[2:] - t_s[:-2]
        if values.ndim == 2:
            denom = denom[:, None]
        out[1:-1] = (values[2:] - values[:-2]) / denom
    return out


def estimate_states(track: Track) -> TrackKinematics:
    """Estimate kinematics for every observed timestamp of a track.

    Single-box tracks get all-zero states so they stay eligible for static
    predicates.
    """
    n = len(track)
    ts = track.timestamps
    if n == 1:
        z = np.zeros(1)
        return TrackKinematics(ts, np.zeros((1, 2)), z, z.copy(), z.copy(), z.copy())
    t_s = (ts - ts[0]).astype(np.float64) / 1e9
    dt = float(np.median(np.diff(ts))) / 1e9
    half = smoothing_half_window(dt)
    pos = smooth_positions(track.xy, half)
    vel = _central_diff(pos, t_s)
    acc = _central_diff(vel, t_s)
    speed = np.sqrt(vel[:, 0] * vel[:, 0] + vel[:, 1] * vel[:, 1])
    cos_y = np.cos(track.yaws)
    sin_y = np.sin(track.yaws)
    accel_forward = acc[:, 0] * cos_y + acc[:, 1] * sin_y
    accel_lateral = acc[:, 0] * (-sin_y) + acc[:, 1] * cos_y
    yaw_u = unwrap_yaws(track.yaws)
    yaw_rate = _central_diff(yaw_u, t_s)
    for arr in (vel, speed, accel_forward, accel_lateral, yaw_rate):
        arr.setflags(write=False)
    return TrackKinematics(ts, vel, speed, accel_forward, accel_lateral, yaw_rate)
