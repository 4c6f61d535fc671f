"""The atomic scenario predicates.

Each predicate takes a LogContext plus one or two ScenarioSets of candidates
and returns a fresh ScenarioSet whose (id, timestamp) pairs are a subset of
the candidate pairs (except get_objects_in_relative_direction, which returns
the related side). Outputs carry only the relationships the predicate itself
establishes; composition accumulates relationships through scenario_and/or.

All geometry is planar: positions are 2D city-frame centroids, distances are
2D, and the relative-direction tests run in the candidate's box frame
(heading = yaw, +x forward, +y left) with axial distances measured from the
facing box edge.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

import numpy as np

from scenariomine.context import (
    LAYER_CROSSINGS,
    LAYER_DRIVABLE,
    LAYER_INTERSECTIONS,
    LAYER_LANES,
    LogContext,
)
from scenariomine.core import (
    ScenarioEntry,
    ScenarioSet,
    expand_category,
)
from scenariomine.hdmap import lane_direction_at_point, same_or_successor
from scenariomine.kinematics import unwrap_yaws

RELATIVE_DIRECTIONS = ("forward", "backward", "left", "right")
TURN_DIRECTIONS = ("left", "right")
HEADING_RELATIONS = ("same", "opposite", "perpendicular")
CROSSING_DIRECTIONS = ("clockwise", "counterclockwise", "either")
ROAD_SIDES = ("same", "opposite")
SUPPORTED_COLORS = ("white", "silver", "black", "red", "yellow", "blue")


def _build(own: dict[str, Iterable[int]], related=None) -> ScenarioSet:
    related = related or {}
    return ScenarioSet(
        {
            tid: ScenarioEntry(
                tuple(sorted(set(stamps))),
                {rid: tuple(sorted(set(st))) for rid, st in related.get(tid, {}).items() if st},
            )
            for tid, stamps in own.items()
            if stamps
        }
    )


def _stamp_rows(ctx: LogContext, tid: str, stamps) -> np.ndarray:
    return ctx.tracks[tid].rows_of(np.fromiter(stamps, dtype=np.int64))


def _filter_rows(ctx: LogContext, candidates: ScenarioSet, keep_fn) -> ScenarioSet:
    """Generic per-(id, t) filter; keep_fn(tid, rows) -> bool mask."""
    own: dict[str, list[int]] = {}
    for tid in sorted(candidates.entries):
        stamps = candidates.entries[tid].timestamps
        rows = _stamp_rows(ctx, tid, stamps)
        mask = keep_fn(tid, rows)
        kept = [t for t, ok in zip(stamps, mask) if ok]
        if kept:
            own[tid] = kept
    return _build(own)


def _shared_stamps(a: tuple, b: tuple) -> list[int]:
    return sorted(set(a) & set(b))


def _pairs(candidates: ScenarioSet, related: ScenarioSet, include_self: bool = False):
    """Deterministic (candidate id, related id, shared stamps) iteration."""
    for tid in sorted(candidates.entries):
        for rid in sorted(related.entries):
            if tid == rid and not include_self:
                continue
            shared = _shared_stamps(
                candidates.entries[tid].timestamps, related.entries[rid].timestamps
            )
            if shared:
                yield tid, rid, shared


# ---------------------------------------------------------------------------
# category predicates

def get_objects_of_category(ctx: LogContext, category: str) -> ScenarioSet:
    """Every track of the (expanded) category with all observed timestamps."""
    names = expand_category(category)
    return _build(
        {
            t.track_id: t.timestamps.tolist()
            for t in ctx.bundle.tracks
            if t.category in names
        }
    )


def is_category(ctx: LogContext, candidates: ScenarioSet, category: str) -> ScenarioSet:
    names = expand_category(category)
    return _build(
        {
            tid: entry.timestamps
            for tid, entry in candidates.entries.items()
            if ctx.tracks[tid].category in names
        }
    )


# ---------------------------------------------------------------------------
# motion predicates

def has_velocity(
    ctx: LogContext,
    candidates: ScenarioSet,
    min_velocity: float = 0.5,
    max_velocity: float = math.inf,
) -> ScenarioSet:
    if min_velocity > max_velocity:
        raise ValueError("min_velocity exceeds max_velocity")
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: (ctx.kinematics(tid).speed[rows] >= min_velocity)
        & (ctx.kinematics(tid).speed[rows] <= max_velocity),
    )


def stationary(ctx: LogContext, candidates: ScenarioSet) -> ScenarioSet:
    """Whole tracks that moved less than 2 m across their entire observation."""
    own = {}
    for tid, entry in candidates.entries.items():
        xy = ctx.tracks[tid].xy
        diff = xy[:, None, :] - xy[None, :, :]
        max_disp = float(np.sqrt((diff * diff).sum(axis=2)).max()) if len(xy) > 1 else 0.0
        if max_disp < 2.0:
            own[tid] = entry.timestamps
    return _build(own)


def accelerating(
    ctx: LogContext,
    candidates: ScenarioSet,
    min_accel: float = 0.65,
    max_accel: float = math.inf,
) -> ScenarioSet:
    if min_accel > max_accel:
        raise ValueError("min_accel exceeds max_accel")
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: (ctx.kinematics(tid).accel_forward[rows] >= min_accel)
        & (ctx.kinematics(tid).accel_forward[rows] <= max_accel),
    )


def has_lateral_acceleration(
    ctx: LogContext,
    candidates: ScenarioSet,
    min_accel: float = -math.inf,
    max_accel: float = math.inf,
) -> ScenarioSet:
    if min_accel > max_accel:
        raise ValueError("min_accel exceeds max_accel")
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: (ctx.kinematics(tid).accel_lateral[rows] >= min_accel)
        & (ctx.kinematics(tid).accel_lateral[rows] <= max_accel),
    )


def turning(
    ctx: LogContext, candidates: ScenarioSet, direction: Optional[str] = None
) -> ScenarioSet:
    """Timestamps inside maximal spans where the cumulative signed yaw change
    over some window of at most turning_window_s exceeds the turn threshold."""
    if direction not in TURN_DIRECTIONS and direction is not None:
        raise ValueError(f"direction must be one of {TURN_DIRECTIONS} or None")
    window_ns = int(round(ctx.config.turning_window_s * 1e9))
    threshold = ctx.config.turning_threshold_rad

    def keep(tid, rows):
        track = ctx.tracks[tid]
        yaw_u = unwrap_yaws(track.yaws)
        ts = track.timestamps
        n = len(track)
        left = np.zeros(n, dtype=bool)
        right = np.zeros(n, dtype=bool)
        for i in range(n):
            for j in range(i + 1, n):
                if ts[j] - ts[i] > window_ns:
                    break
                change = yaw_u[j] - yaw_u[i]
                if change > threshold:
                    left[i : j + 1] = True
                elif change < -threshold:
                    right[i : j + 1] = True
        if direction == "left":
            mask = left
        elif direction == "right":
            mask = right
        else:
            mask = left | right
        return mask[rows]

    return _filter_rows(ctx, candidates, keep)


def changing_lanes(
    ctx: LogContext, candidates: ScenarioSet, direction: Optional[str] = None
) -> ScenarioSet:
    """Lane-change events: the assigned lane switches to the previous lane's
    left/right neighbor; events are dilated by +-lane_change_dilation_s."""
    if direction not in TURN_DIRECTIONS and direction is not None:
        raise ValueError(f"direction must be one of {TURN_DIRECTIONS} or None")
    dilation_ns = int(round(ctx.config.lane_change_dilation_s * 1e9))
    lanes = ctx.bundle.hd_map.lanes

    def keep(tid, rows):
        track = ctx.tracks[tid]
        lane_ids = ctx.lane_ids(tid)
        ts = track.timestamps
        mask = np.zeros(len(track), dtype=bool)
        for i in range(1, len(track)):
            prev_id, cur_id = lane_ids[i - 1], lane_ids[i]
            if prev_id is None or cur_id is None or prev_id == cur_id:
                continue
            prev = lanes[prev_id]
            if cur_id == prev.left_neighbor:
                side = "left"
            elif cur_id == prev.right_neighbor:
                side = "right"
            else:
                continue
            if direction is not None and side != direction:
                continue
            mask |= np.abs(ts - ts[i]) <= dilation_ns
        return mask[rows]

    return _filter_rows(ctx, candidates, keep)


# ---------------------------------------------------------------------------
# pairwise predicates

def facing_toward(
    ctx: LogContext,
    candidates: ScenarioSet,
    related: ScenarioSet,
    within_angle: float = 22.5,
    max_distance: float = 50.0,
) -> ScenarioSet:
    """Candidates whose heading ray passes within within_angle degrees of a
    related object's centroid at most max_distance away."""
    if not 0.0 < within_angle <= 180.0:
        raise ValueError("within_angle must be in (0, 180]")
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        c = ctx.tracks[tid]
        r = ctx.tracks[rid]
        rc = c.rows_of(np.asarray(shared, dtype=np.int64))
        rr = r.rows_of(np.asarray(shared, dtype=np.int64))
        delta = r.xy[rr] - c.xy[rc]
        dist = np.sqrt((delta * delta).sum(axis=1))
        bearing = np.degrees(np.abs(_angle_wrap(np.arctan2(delta[:, 1], delta[:, 0]) - c.yaws[rc])))
        ok = (bearing <= within_angle) & (dist <= max_distance)
        if ok.any():
            stamps = [t for t, o in zip(shared, ok) if o]
            own.setdefault(tid, set()).update(stamps)
            rel.setdefault(tid, {}).setdefault(rid, set()).update(stamps)
    return _build(own, rel)


def _angle_wrap(angles: np.ndarray) -> np.ndarray:
    return np.mod(angles + np.pi, 2.0 * np.pi) - np.pi


def heading_toward(
    ctx: LogContext,
    candidates: ScenarioSet,
    related: ScenarioSet,
    angle_threshold: float = 22.5,
    minimum_speed: float = 0.5,
    max_distance: float = math.inf,
) -> ScenarioSet:
    """Candidates whose velocity points at a related object: the angle between
    velocity and the relative position vector is within angle_threshold and the
    velocity component toward the object is at least minimum_speed."""
    if not 0.0 < angle_threshold <= 180.0:
        raise ValueError("angle_threshold must be in (0, 180]")
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        c = ctx.tracks[tid]
        r = ctx.tracks[rid]
        rc = c.rows_of(np.asarray(shared, dtype=np.int64))
        rr = r.rows_of(np.asarray(shared, dtype=np.int64))
        delta = r.xy[rr] - c.xy[rc]
        dist = np.sqrt((delta * delta).sum(axis=1))
        vel = ctx.kinematics(tid).velocity[rc]
        speed = ctx.kinematics(tid).speed[rc]
        denom = speed * dist
        safe = denom > 0.0
        cosang = np.where(
            safe,
            (vel[:, 0] * delta[:, 0] + vel[:, 1] * delta[:, 1]) / np.where(safe, denom, 1.0),
            -1.0,
        )
        angle = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        toward = np.where(
            dist > 0.0,
            (vel[:, 0] * delta[:, 0] + vel[:, 1] * delta[:, 1]) / np.where(dist > 0.0, dist, 1.0),
            0.0,
        )
        ok = safe & (angle <= angle_threshold) & (toward >= minimum_speed) & (dist <= max_distance)
        if ok.any():
            stamps = [t for t, o in zip(shared, ok) if o]
            own.setdefault(tid, set()).update(stamps)
            rel.setdefault(tid, {}).setdefault(rid, set()).update(stamps)
    return _build(own, rel)


def heading_in_relative_direction_to(
    ctx: LogContext, candidates: ScenarioSet, related: ScenarioSet, direction: str
) -> ScenarioSet:
    """Compare motion directions: same = [0, 45), perpendicular = [45, 135),
    opposite = [135, 180] degrees; both objects must be moving."""
    if direction not in HEADING_RELATIONS:
        raise ValueError(f"direction must be one of {HEADING_RELATIONS}")
    min_speed = ctx.config.min_moving_speed
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        kc = ctx.kinematics(tid)
        kr = ctx.kinematics(rid)
        rc = ctx.tracks[tid].rows_of(np.asarray(shared, dtype=np.int64))
        rr = ctx.tracks[rid].rows_of(np.asarray(shared, dtype=np.int64))
        vc = kc.velocity[rc]
        vr = kr.velocity[rr]
        sc = kc.speed[rc]
        sr = kr.speed[rr]
        moving = (sc >= min_speed) & (sr >= min_speed)
        denom = sc * sr
        cosang = np.where(
            moving,
            (vc[:, 0] * vr[:, 0] + vc[:, 1] * vr[:, 1]) / np.where(moving, denom, 1.0),
            1.0,
        )
        angle = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        if direction == "same":
            ok = moving & (angle < 45.0)
        elif direction == "perpendicular":
            ok = moving & (angle >= 45.0) & (angle < 135.0)
        else:
            ok = moving & (angle >= 135.0)
        if ok.any():
            stamps = [t for t, o in zip(shared, ok) if o]
            own.setdefault(tid, set()).update(stamps)
            rel.setdefault(tid, {}).setdefault(rid, set()).update(stamps)
    return _build(own, rel)


def _box_frame(ctx: LogContext, tid: str, rid: str, shared) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Related centroid in the candidate box frame: (forward, left, euclid)."""
    c = ctx.tracks[tid]
    r = ctx.tracks[rid]
    rc = c.rows_of(np.asarray(shared, dtype=np.int64))
    rr = r.rows_of(np.asarray(shared, dtype=np.int64))
    delta = r.xy[rr] - c.xy[rc]
    cos_y = np.cos(c.yaws[rc])
    sin_y = np.sin(c.yaws[rc])
    fx = delta[:, 0] * cos_y + delta[:, 1] * sin_y
    fy = -delta[:, 0] * sin_y + delta[:, 1] * cos_y
    dist = np.sqrt((delta * delta).sum(axis=1))
    return fx, fy, dist


def _directional_offsets(fx, fy, length, width, direction):
    """(axial from facing edge, lateral overhang beyond box sides)."""
    if direction == "forward":
        axial = fx - 0.5 * length
        lateral = np.abs(fy) - 0.5 * width
    elif direction == "backward":
        axial = -fx - 0.5 * length
        lateral = np.abs(fy) - 0.5 * width
    elif direction == "left":
        axial = fy - 0.5 * width
        lateral = np.abs(fx) - 0.5 * length
    else:  # right
        axial = -fy - 0.5 * width
        lateral = np.abs(fx) - 0.5 * length
    return axial, lateral


def has_objects_in_relative_direction(
    ctx: LogContext,
    candidates: ScenarioSet,
    related: ScenarioSet,
    direction: str,
    min_number: int = 1,
    max_number: float = math.inf,
    within_distance: float = 50.0,
    lateral_thresh: float = math.inf,
) -> ScenarioSet:
    """Candidates with at least min_number related objects in the direction;
    relationships go to the (at most max_number) nearest qualifying objects."""
    if direction not in RELATIVE_DIRECTIONS:
        raise ValueError(f"direction must be one of {RELATIVE_DIRECTIONS}")
    if min_number < 0:
        raise ValueError("min_number must be >= 0")
    # per candidate timestamp: [(euclid distance, related id)]
    found: dict[str, dict[int, list[tuple[float, str]]]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        c = ctx.tracks[tid]
        rc = c.rows_of(np.asarray(shared, dtype=np.int64))
        fx, fy, dist = _box_frame(ctx, tid, rid, shared)
        axial, lateral = _directional_offsets(
            fx, fy, c.sizes[rc, 0], c.sizes[rc, 1], direction
        )
        ok = (axial >= 0.0) & (axial <= within_distance) & (np.maximum(lateral, 0.0) <= lateral_thresh)
        bucket = found.setdefault(tid, {})
        for t, o, d in zip(shared, ok, dist):
            if o:
                bucket.setdefault(t, []).append((float(d), rid))
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid in sorted(candidates.entries):
        hits = found.get(tid, {})
        for t in candidates.entries[tid].timestamps:
            here = sorted(hits.get(t, []))
            if len(here) < min_number:
                continue
            own.setdefault(tid, set()).add(t)
            limit = len(here) if max_number == math.inf else min(len(here), int(max_number))
            for _, rid in here[:limit]:
                rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _build(own, rel)


def get_objects_in_relative_direction(
    ctx: LogContext,
    candidates: ScenarioSet,
    related: ScenarioSet,
    direction: str,
    min_number: int = 0,
    max_number: float = math.inf,
    within_distance: float = 50.0,
    lateral_thresh: float = math.inf,
) -> ScenarioSet:
    """The related objects found in the direction of the candidates (the
    transpose of has_objects_in_relative_direction)."""
    from scenariomine.core import reverse_relationship

    return reverse_relationship(
        has_objects_in_relative_direction(
            ctx,
            candidates,
            related,
            direction,
            min_number=min_number,
            max_number=max_number,
            within_distance=within_distance,
            lateral_thresh=lateral_thresh,
        )
    )


_CROSS_FRAMES = {
    # direction -> (axial, lateral) in terms of (fx, fy)
    "forward": lambda fx, fy: (fx, fy),
    "backward": lambda fx, fy: (-fx, -fy),
    "left": lambda fx, fy: (fy, -fx),
    "right": lambda fx, fy: (-fy, fx),
}


def being_crossed_by(
    ctx: LogContext,
    candidates: ScenarioSet,
    related: ScenarioSet,
    direction: str = "forward",
    in_direction: str = "either",
    forward_thresh: float = 10.0,
    lateral_thresh: float = 5.0,
) -> ScenarioSet:
    """Candidates whose half-midplane (anchored at the facing box edge,
    extending forward_thresh along the direction axis) is crossed by a related
    centroid. A crossing starts when the lateral coordinate changes sign with
    both samples inside the plane's extent and persists until the lateral
    offset exceeds lateral_thresh. Negative-to-positive lateral motion counts
    as counterclockwise."""
    if direction not in RELATIVE_DIRECTIONS:
        raise ValueError(f"direction must be one of {RELATIVE_DIRECTIONS}")
    if in_direction not in CROSSING_DIRECTIONS:
        raise ValueError(f"in_direction must be one of {CROSSING_DIRECTIONS}")
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        c = ctx.tracks[tid]
        rc = c.rows_of(np.asarray(shared, dtype=np.int64))
        fx, fy, _ = _box_frame(ctx, tid, rid, shared)
        axial_raw, lateral = _CROSS_FRAMES[direction](fx, fy)
        edge = 0.5 * (c.sizes[rc, 0] if direction in ("forward", "backward") else c.sizes[rc, 1])
        axial = axial_raw - edge
        in_extent = (axial >= 0.0) & (axial <= forward_thresh)
        stamps: set[int] = set()
        k = 1
        n = len(shared)
        while k < n:
            crossed = lateral[k - 1] * lateral[k] < 0.0 and in_extent[k - 1] and in_extent[k]
            if crossed:
                ccw = lateral[k] > 0.0
                if (
                    in_direction == "either"
                    or (in_direction == "counterclockwise" and ccw)
                    or (in_direction == "clockwise" and not ccw)
                ):
                    m = k
                    while m < n and abs(lateral[m]) <= lateral_thresh:
                        stamps.add(shared[m])
                        m += 1
                    k = m
                    continue
            k += 1
        if stamps:
            own.setdefault(tid, set()).update(stamps)
            rel.setdefault(tid, {}).setdefault(rid, set()).update(stamps)
    return _build(own, rel)


def near_objects(
    ctx: LogContext,
    candidates: ScenarioSet,
    related: ScenarioSet,
    distance_thresh: float = 10.0,
    min_objects: int = 1,
    include_self: bool = False,
) -> ScenarioSet:
    """Candidates with at least min_objects distinct related objects within
    distance_thresh meters (centroid distance)."""
    if distance_thresh <= 0:
        raise ValueError("distance_thresh must be positive")
    if min_objects < 1:
        raise ValueError("min_objects must be >= 1")
    found: dict[str, dict[int, list[str]]] = {}
    for tid, rid, shared in _pairs(candidates, related, include_self=include_self):
        c = ctx.tracks[tid]
        r = ctx.tracks[rid]
        rc = c.rows_of(np.asarray(shared, dtype=np.int64))
        rr = r.rows_of(np.asarray(shared, dtype=np.int64))
        delta = r.xy[rr] - c.xy[rc]
        dist = np.sqrt((delta * delta).sum(axis=1))
        ok = dist <= distance_thresh
        bucket = found.setdefault(tid, {})
        for t, o in zip(shared, ok):
            if o:
                bucket.setdefault(t, []).append(rid)
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, hits in found.items():
        for t, rids in hits.items():
            if len(rids) >= min_objects:
                own.setdefault(tid, set()).add(t)
                for rid in rids:
                    rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _build(own, rel)


def following(ctx: LogContext, candidates: ScenarioSet, related: ScenarioSet) -> ScenarioSet:
    """Candidates moving behind a moving lead in the same (or successor) lane
    with headings within following_heading_deg."""
    min_speed = ctx.config.min_moving_speed
    max_angle = ctx.config.following_heading_deg
    hd_map = ctx.bundle.hd_map
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        c = ctx.tracks[tid]
        r = ctx.tracks[rid]
        rc = c.rows_of(np.asarray(shared, dtype=np.int64))
        rr = r.rows_of(np.asarray(shared, dtype=np.int64))
        lanes_c = ctx.lane_ids(tid)
        lanes_r = ctx.lane_ids(rid)
        kc = ctx.kinematics(tid)
        kr = ctx.kinematics(rid)
        for t, ic, ir in zip(shared, rc, rr):
            lane_c = lanes_c[ic]
            if lane_c is None or not same_or_successor(hd_map, lane_c, lanes_r[ir]):
                continue
            if kc.speed[ic] < min_speed or kr.speed[ir] < min_speed:
                continue
            denom = kc.speed[ic] * kr.speed[ir]
            cosang = float(
                np.clip((kc.velocity[ic] * kr.velocity[ir]).sum() / denom, -1.0, 1.0)
            )
            if math.degrees(math.acos(cosang)) > max_angle:
                continue
            lane_dir = lane_direction_at_point(hd_map.lanes[lane_c], c.xy[ic])
            ahead = float((r.xy[ir] - c.xy[ic]) @ lane_dir)
            if ahead <= 0.0:
                continue
            own.setdefault(tid, set()).add(t)
            rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _build(own, rel)


def in_same_lane(ctx: LogContext, candidates: ScenarioSet, related: ScenarioSet) -> ScenarioSet:
    """Candidate and related object share an assigned lane (or lanes linked by
    the successor chain within one hop)."""
    hd_map = ctx.bundle.hd_map
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        rc = ctx.tracks[tid].rows_of(np.asarray(shared, dtype=np.int64))
        rr = ctx.tracks[rid].rows_of(np.asarray(shared, dtype=np.int64))
        lanes_c = ctx.lane_ids(tid)
        lanes_r = ctx.lane_ids(rid)
        for t, ic, ir in zip(shared, rc, rr):
            if same_or_successor(hd_map, lanes_c[ic], lanes_r[ir]):
                own.setdefault(tid, set()).add(t)
                rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _build(own, rel)


def on_relative_side_of_road(
    ctx: LogContext, candidates: ScenarioSet, related: ScenarioSet, side: str
) -> ScenarioSet:
    """Compare road directions at the two objects: same side means the local
    lane directions agree within 90 degrees. Off-lane objects use the nearest
    lane within roadside_lane_search_m; no lane context excludes the pair."""
    if side not in ROAD_SIDES:
        raise ValueError(f"side must be one of {ROAD_SIDES}")
    own: dict[str, set] = {}
    rel: dict[str, dict[str, set]] = {}
    for tid, rid, shared in _pairs(candidates, related):
        rc = ctx.tracks[tid].rows_of(np.asarray(shared, dtype=np.int64))
        rr = ctx.tracks[rid].rows_of(np.asarray(shared, dtype=np.int64))
        dir_c = ctx.road_directions(tid)[rc]
        dir_r = ctx.road_directions(rid)[rr]
        dot = (dir_c * dir_r).sum(axis=1)
        ok = ~np.isnan(dot) & ((dot > 0.0) if side == "same" else (dot <= 0.0))
        if ok.any():
            stamps = [t for t, o in zip(shared, ok) if o]
            own.setdefault(tid, set()).update(stamps)
            rel.setdefault(tid, {}).setdefault(rid, set()).update(stamps)
    return _build(own, rel)


# ---------------------------------------------------------------------------
# map predicates

def at_pedestrian_crossing(
    ctx: LogContext, candidates: ScenarioSet, within_distance: float = 1.0
) -> ScenarioSet:
    if within_distance < 0:
        raise ValueError("within_distance must be >= 0")
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: ctx.layer_distances(tid, LAYER_CROSSINGS)[rows] <= within_distance,
    )


def on_lane_type(ctx: LogContext, candidates: ScenarioSet, lane_type: str) -> ScenarioSet:
    if lane_type not in ("BUS", "VEHICLE", "BIKE"):
        raise ValueError("lane_type must be 'BUS', 'VEHICLE', or 'BIKE'")
    lanes = ctx.bundle.hd_map.lanes

    def keep(tid, rows):
        lane_ids = ctx.lane_ids(tid)
        return np.array(
            [lane_ids[i] is not None and lanes[lane_ids[i]].lane_type == lane_type for i in rows],
            dtype=bool,
        )

    return _filter_rows(ctx, candidates, keep)


def near_intersection(
    ctx: LogContext, candidates: ScenarioSet, threshold: float = 5.0
) -> ScenarioSet:
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: ctx.layer_distances(tid, LAYER_INTERSECTIONS)[rows] <= threshold,
    )


def on_intersection(ctx: LogContext, candidates: ScenarioSet) -> ScenarioSet:
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: ctx.layer_distances(tid, LAYER_INTERSECTIONS)[rows] == 0.0,
    )


def at_stop_sign(
    ctx: LogContext, candidates: ScenarioSet, forward_thresh: float = 10.0
) -> ScenarioSet:
    """Candidates occupying a stop-controlled lane within stop_sign_radius_m of
    the sign and within forward_thresh along the sign's facing direction."""
    if forward_thresh <= 0:
        raise ValueError("forward_thresh must be positive")
    signs = ctx.bundle.hd_map.stop_signs
    radius = ctx.config.stop_sign_radius_m

    def keep(tid, rows):
        track = ctx.tracks[tid]
        lane_ids = ctx.lane_ids(tid)
        mask = np.zeros(len(rows), dtype=bool)
        for k, i in enumerate(rows):
            lane_id = lane_ids[i]
            if lane_id is None:
                continue
            pos = track.xy[i]
            for sign in signs:
                if lane_id not in sign.controlled_lane_ids:
                    continue
                d = pos - sign.position
                if math.hypot(d[0], d[1]) > radius:
                    continue
                along = d[0] * math.cos(sign.facing_yaw) + d[1] * math.sin(sign.facing_yaw)
                if 0.0 <= along <= forward_thresh:
                    mask[k] = True
                    break
        return mask

    return _filter_rows(ctx, candidates, keep)


def in_drivable_area(ctx: LogContext, candidates: ScenarioSet) -> ScenarioSet:
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: ctx.layer_distances(tid, LAYER_DRIVABLE)[rows] == 0.0,
    )


def on_road(ctx: LogContext, candidates: ScenarioSet) -> ScenarioSet:
    """Centroid inside any lane polygon (vehicle, bus, or bike)."""
    return _filter_rows(
        ctx,
        candidates,
        lambda tid, rows: ctx.layer_distances(tid, LAYER_LANES)[rows] == 0.0,
    )


# ---------------------------------------------------------------------------
# attribute predicates

def is_color(ctx: LogContext, candidates: ScenarioSet, color: str) -> ScenarioSet:
    """Filter by the color attribute table. Unsupported color literals fall
    back to returning all candidates unchanged."""
    if color not in SUPPORTED_COLORS:
        return candidates
    table = ctx.bundle.colors
    return ScenarioSet(
        {tid: entry for tid, entry in candidates.entries.items() if table.get(tid) == color}
    )
