"""Independent brute-force predicate oracle.

This module re-implements every atomic function by exhaustively enumerating
(track, related, timestamp) triples with direct scalar geometry. It shares no
code with the predicate engine: map queries go through shapely, kinematics
are recomputed in plain Python (same formulas, mirrored operation order), and
no spatial indexes or early exits are used. Equivalence tests compare its
output against the engine on full scenario sets.
"""

from __future__ import annotations

import math
import statistics
from typing import Optional

from shapely.geometry import LineString, Point, Polygon

from scenariomine.config import DEFAULT_ENGINE_CONFIG
from scenariomine.core import ScenarioEntry, ScenarioSet, expand_category
from scenariomine.io import LogBundle

BOUNDARY_EPS = 1e-9


def _unwrap(yaws):
    out = [yaws[0]]
    for y in yaws[1:]:
        d = y - out[-1]
        while d > math.pi:
            d -= 2.0 * math.pi
        while d <= -math.pi:
            d += 2.0 * math.pi
        out.append(out[-1] + d)
    return out


class _OracleTrack:
    def __init__(self, track):
        self.track_id = track.track_id
        self.category = track.category
        self.ts = [int(t) for t in track.timestamps]
        self.index = {t: i for i, t in enumerate(self.ts)}
        self.x = [float(v) for v in track.translations[:, 0]]
        self.y = [float(v) for v in track.translations[:, 1]]
        self.yaw = [float(v) for v in track.yaws]
        self.length = [float(v) for v in track.sizes[:, 0]]
        self.width = [float(v) for v in track.sizes[:, 1]]
        self._derive()

    def _derive(self):
        n = len(self.ts)
        t_s = [float(t - self.ts[0]) / 1e9 for t in self.ts]
        if n == 1:
            self.vx = [0.0]
            self.vy = [0.0]
            self.speed = [0.0]
            self.accf = [0.0]
            self.accl = [0.0]
            self.yaw_rate = [0.0]
            return
        dt = float(statistics.median(self.ts[i + 1] - self.ts[i] for i in range(n - 1))) / 1e9
        half_n = math.ceil(0.5 / dt)
        if half_n % 2 == 0:
            half_n += 1
        half = (half_n - 1) // 2
        sx, sy = [], []
        for i in range(n):
            h = min(half, i, n - 1 - i)
            ax = self.x[i - h]
            ay = self.y[i - h]
            for k in range(i - h + 1, i + h + 1):
                ax = ax + self.x[k]
                ay = ay + self.y[k]
            sx.append(ax / (2 * h + 1))
            sy.append(ay / (2 * h + 1))

        def diff(vals):
            out = [0.0] * n
            out[0] = (vals[1] - vals[0]) / (t_s[1] - t_s[0])
            out[-1] = (vals[-1] - vals[-2]) / (t_s[-1] - t_s[-2])
            for i in range(1, n - 1):
                out[i] = (vals[i + 1] - vals[i - 1]) / (t_s[i + 1] - t_s[i - 1])
            return out

        self.vx = diff(sx)
        self.vy = diff(sy)
        self.speed = [math.sqrt(vx * vx + vy * vy) for vx, vy in zip(self.vx, self.vy)]
        ax = diff(self.vx)
        ay = diff(self.vy)
        self.accf = [
            a * math.cos(yaw) + b * math.sin(yaw) for a, b, yaw in zip(ax, ay, self.yaw)
        ]
        self.accl = [
            a * (-math.sin(yaw)) + b * math.cos(yaw) for a, b, yaw in zip(ax, ay, self.yaw)
        ]
        self.yaw_rate = diff(_unwrap(self.yaw))


class _OracleLane:
    def __init__(self, lane):
        self.lane_id = lane.lane_id
        self.lane_type = lane.lane_type
        self.left_neighbor = lane.left_neighbor
        self.right_neighbor = lane.right_neighbor
        self.successors = set(lane.successors)
        self.is_intersection = lane.is_intersection
        self.polygon = Polygon(lane.polygon.tolist())
        self.centerline = LineString(lane.centerline.tolist())
        self.centerline_pts = lane.centerline.tolist()


def _poly_distance(poly: Polygon, point: Point) -> float:
    d = poly.exterior.distance(point)
    if poly.covers(point) or d <= BOUNDARY_EPS:
        return 0.0
    return d


class OracleScene:
    """Per-scene precomputation for the oracle (its own, engine-independent)."""

    def __init__(self, bundle: LogBundle, config=DEFAULT_ENGINE_CONFIG):
        self.bundle = bundle
        self.config = config
        self.tracks = {t.track_id: _OracleTrack(t) for t in bundle.tracks}
        hd_map = bundle.hd_map
        self.lanes = {lid: _OracleLane(lane) for lid, lane in hd_map.lanes.items()}
        self.sorted_lanes = [self.lanes[lid] for lid in sorted(self.lanes)]
        self.crossings = [Polygon(c.polygon.tolist()) for c in hd_map.crossings]
        self.intersections = [
            lane.polygon for lane in self.sorted_lanes if lane.is_intersection
        ]
        self.lane_polys = [lane.polygon for lane in self.sorted_lanes]
        self.drivable = [Polygon(p.tolist()) for p in hd_map.drivable.polygons]
        self.stop_signs = hd_map.stop_signs
        self.colors = bundle.colors
        self._lane_cache: dict[tuple[str, int], Optional[str]] = {}
        self._road_dir_cache: dict[tuple[str, int], Optional[tuple[float, float]]] = {}

    # -- map helpers -------------------------------------------------------

    def lane_at(self, tid: str, i: int) -> Optional[str]:
        key = (tid, i)
        if key in self._lane_cache:
            return self._lane_cache[key]
        tr = self.tracks[tid]
        pt = Point(tr.x[i], tr.y[i])
        best = None
        for lane in self.sorted_lanes:
            if _poly_distance(lane.polygon, pt) == 0.0:
                d = lane.centerline.distance(pt)
                if best is None or d < best[0]:
                    best = (d, lane.lane_id)
        out = best[1] if best else None
        self._lane_cache[key] = out
        return out

    def layer_distance(self, tid: str, i: int, polys) -> float:
        tr = self.tracks[tid]
        pt = Point(tr.x[i], tr.y[i])
        best = math.inf
        for poly in polys:
            d = _poly_distance(poly, pt)
            if d < best:
                best = d
        return best

    def _tangent_at(self, lane: _OracleLane, px: float, py: float):
        pts = lane.centerline_pts
        best = None
        for i in range(len(pts) - 1):
            ax, ay = pts[i]
            bx, by = pts[i + 1]
            dx, dy = bx - ax, by - ay
            dd = dx * dx + dy * dy
            t = ((px - ax) * dx + (py - ay) * dy) / dd if dd > 0 else 0.0
            t = min(max(t, 0.0), 1.0)
            qx, qy = ax + t * dx, ay + t * dy
            sq = (px - qx) ** 2 + (py - qy) ** 2
            if best is None or sq < best[0]:
                best = (sq, i)
        i = best[1]
        ax, ay = pts[i]
        bx, by = pts[i + 1]
        norm = math.hypot(bx - ax, by - ay)
        if norm == 0.0:
            return (1.0, 0.0)
        return ((bx - ax) / norm, (by - ay) / norm)

    def road_direction(self, tid: str, i: int):
        key = (tid, i)
        if key in self._road_dir_cache:
            return self._road_dir_cache[key]
        tr = self.tracks[tid]
        lane_id = self.lane_at(tid, i)
        lane = self.lanes.get(lane_id) if lane_id else None
        if lane is None:
            pt = Point(tr.x[i], tr.y[i])
            best = None
            for cand in self.sorted_lanes:
                d = _poly_distance(cand.polygon, pt)
                if d <= self.config.roadside_lane_search_m and (best is None or d < best[0]):
                    best = (d, cand)
            lane = best[1] if best else None
        out = self._tangent_at(lane, tr.x[i], tr.y[i]) if lane else None
        self._road_dir_cache[key] = out
        return out

    def same_or_successor(self, a: Optional[str], b: Optional[str]) -> bool:
        if a is None or b is None:
            return False
        if a == b:
            return True
        return b in self.lanes[a].successors or a in self.lanes[b].successors


def _iter_own(scenario: ScenarioSet):
    for tid in sorted(scenario.entries):
        for t in scenario.entries[tid].timestamps:
            yield tid, t


def _result(own: dict, related: dict | None = None) -> ScenarioSet:
    related = related or {}
    return ScenarioSet(
        {
            tid: ScenarioEntry(
                tuple(sorted(stamps)),
                {rid: tuple(sorted(st)) for rid, st in related.get(tid, {}).items()},
            )
            for tid, stamps in own.items()
            if stamps
        }
    )


def _box_frame(ct: _OracleTrack, i: int, rt: _OracleTrack, j: int):
    dx = rt.x[j] - ct.x[i]
    dy = rt.y[j] - ct.y[i]
    c = math.cos(ct.yaw[i])
    s = math.sin(ct.yaw[i])
    fx = dx * c + dy * s
    fy = -dx * s + dy * c
    return fx, fy, math.sqrt(dx * dx + dy * dy)


def _dir_offsets(fx, fy, length, width, direction):
    if direction == "forward":
        return fx - 0.5 * length, abs(fy) - 0.5 * width
    if direction == "backward":
        return -fx - 0.5 * length, abs(fy) - 0.5 * width
    if direction == "left":
        return fy - 0.5 * width, abs(fx) - 0.5 * length
    return -fy - 0.5 * width, abs(fx) - 0.5 * length


def _cross_frame(fx, fy, direction):
    if direction == "forward":
        return fx, fy
    if direction == "backward":
        return -fx, -fy
    if direction == "left":
        return fy, -fx
    return -fy, fx


def oracle_evaluate(
    scene: OracleScene,
    name: str,
    candidates: ScenarioSet | None = None,
    related: ScenarioSet | None = None,
    **kwargs,
) -> ScenarioSet:
    """Evaluate one atomic function by brute force; mirrors the documented
    predicate semantics exactly."""
    fn = _ORACLE_FUNCTIONS[name]
    if related is not None:
        return fn(scene, candidates, related, **kwargs)
    if candidates is not None:
        return fn(scene, candidates, **kwargs)
    return fn(scene, **kwargs)


# -- category / motion ------------------------------------------------------

def _o_get_objects_of_category(scene, category):
    names = expand_category(category)
    own = {
        tid: list(tr.ts) for tid, tr in scene.tracks.items() if tr.category in names
    }
    return _result(own)


def _o_is_category(scene, candidates, category):
    names = expand_category(category)
    own = {
        tid: list(entry.timestamps)
        for tid, entry in candidates.entries.items()
        if scene.tracks[tid].category in names
    }
    return _result(own)


def _o_has_velocity(scene, candidates, min_velocity=0.5, max_velocity=math.inf):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        tr = scene.tracks[tid]
        v = tr.speed[tr.index[t]]
        if min_velocity <= v <= max_velocity:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_stationary(scene, candidates):
    own: dict = {}
    for tid, entry in candidates.entries.items():
        tr = scene.tracks[tid]
        n = len(tr.ts)
        max_sq = 0.0
        for i in range(n):
            for j in range(n):
                sq = (tr.x[i] - tr.x[j]) ** 2 + (tr.y[i] - tr.y[j]) ** 2
                if sq > max_sq:
                    max_sq = sq
        if math.sqrt(max_sq) < 2.0:
            own[tid] = list(entry.timestamps)
    return _result(own)


def _o_accelerating(scene, candidates, min_accel=0.65, max_accel=math.inf):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        tr = scene.tracks[tid]
        a = tr.accf[tr.index[t]]
        if min_accel <= a <= max_accel:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_has_lateral_acceleration(scene, candidates, min_accel=-math.inf, max_accel=math.inf):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        tr = scene.tracks[tid]
        a = tr.accl[tr.index[t]]
        if min_accel <= a <= max_accel:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_turning(scene, candidates, direction=None):
    window_ns = int(round(scene.config.turning_window_s * 1e9))
    threshold = scene.config.turning_threshold_rad
    own: dict = {}
    for tid, entry in candidates.entries.items():
        tr = scene.tracks[tid]
        yaw_u = _unwrap(tr.yaw)
        n = len(tr.ts)
        left = [False] * n
        right = [False] * n
        for i in range(n):
            for j in range(i + 1, n):
                if tr.ts[j] - tr.ts[i] > window_ns:
                    continue
                change = yaw_u[j] - yaw_u[i]
                if change > threshold:
                    for k in range(i, j + 1):
                        left[k] = True
                elif change < -threshold:
                    for k in range(i, j + 1):
                        right[k] = True
        for t in entry.timestamps:
            i = tr.index[t]
            hit = left[i] if direction == "left" else right[i] if direction == "right" else (left[i] or right[i])
            if hit:
                own.setdefault(tid, []).append(t)
    return _result(own)


def _o_changing_lanes(scene, candidates, direction=None):
    dilation_ns = int(round(scene.config.lane_change_dilation_s * 1e9))
    own: dict = {}
    for tid, entry in candidates.entries.items():
        tr = scene.tracks[tid]
        n = len(tr.ts)
        marked = [False] * n
        for i in range(1, n):
            prev_id = scene.lane_at(tid, i - 1)
            cur_id = scene.lane_at(tid, i)
            if prev_id is None or cur_id is None or prev_id == cur_id:
                continue
            prev = scene.lanes[prev_id]
            if cur_id == prev.left_neighbor:
                side = "left"
            elif cur_id == prev.right_neighbor:
                side = "right"
            else:
                continue
            if direction is not None and side != direction:
                continue
            for k in range(n):
                if abs(tr.ts[k] - tr.ts[i]) <= dilation_ns:
                    marked[k] = True
        for t in entry.timestamps:
            if marked[tr.index[t]]:
                own.setdefault(tid, []).append(t)
    return _result(own)


# -- pairwise ---------------------------------------------------------------

def _pair_iter(scene, candidates, related, include_self=False):
    for tid in sorted(candidates.entries):
        for rid in sorted(related.entries):
            if tid == rid and not include_self:
                continue
            rel_stamps = set(related.entries[rid].timestamps)
            for t in candidates.entries[tid].timestamps:
                if t in rel_stamps:
                    yield tid, rid, t


def _o_facing_toward(scene, candidates, related, within_angle=22.5, max_distance=50.0):
    own: dict = {}
    rel: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        i = ct.index[t]
        j = rt.index[t]
        dx = rt.x[j] - ct.x[i]
        dy = rt.y[j] - ct.y[i]
        dist = math.sqrt(dx * dx + dy * dy)
        off = math.atan2(dy, dx) - ct.yaw[i]
        off = (off + math.pi) % (2.0 * math.pi) - math.pi
        if abs(math.degrees(off)) <= within_angle and dist <= max_distance:
            own.setdefault(tid, set()).add(t)
            rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_heading_toward(
    scene, candidates, related, angle_threshold=22.5, minimum_speed=0.5, max_distance=math.inf
):
    own: dict = {}
    rel: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        i = ct.index[t]
        j = rt.index[t]
        dx = rt.x[j] - ct.x[i]
        dy = rt.y[j] - ct.y[i]
        dist = math.sqrt(dx * dx + dy * dy)
        speed = ct.speed[i]
        denom = speed * dist
        if denom <= 0.0:
            continue
        dot = ct.vx[i] * dx + ct.vy[i] * dy
        angle = math.degrees(math.acos(min(1.0, max(-1.0, dot / denom))))
        toward = dot / dist
        if angle <= angle_threshold and toward >= minimum_speed and dist <= max_distance:
            own.setdefault(tid, set()).add(t)
            rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_heading_in_relative_direction_to(scene, candidates, related, direction):
    min_speed = scene.config.min_moving_speed
    own: dict = {}
    rel: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        i = ct.index[t]
        j = rt.index[t]
        if ct.speed[i] < min_speed or rt.speed[j] < min_speed:
            continue
        dot = ct.vx[i] * rt.vx[j] + ct.vy[i] * rt.vy[j]
        denom = ct.speed[i] * rt.speed[j]
        angle = math.degrees(math.acos(min(1.0, max(-1.0, dot / denom))))
        if direction == "same":
            ok = angle < 45.0
        elif direction == "perpendicular":
            ok = 45.0 <= angle < 135.0
        else:
            ok = angle >= 135.0
        if ok:
            own.setdefault(tid, set()).add(t)
            rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_has_objects_in_relative_direction(
    scene,
    candidates,
    related,
    direction,
    min_number=1,
    max_number=math.inf,
    within_distance=50.0,
    lateral_thresh=math.inf,
):
    hits: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        i = ct.index[t]
        j = rt.index[t]
        fx, fy, dist = _box_frame(ct, i, rt, j)
        axial, lateral = _dir_offsets(fx, fy, ct.length[i], ct.width[i], direction)
        if 0.0 <= axial <= within_distance and max(lateral, 0.0) <= lateral_thresh:
            hits.setdefault(tid, {}).setdefault(t, []).append((dist, rid))
    own: dict = {}
    rel: dict = {}
    for tid in sorted(candidates.entries):
        for t in candidates.entries[tid].timestamps:
            here = sorted(hits.get(tid, {}).get(t, []))
            if len(here) < min_number:
                continue
            own.setdefault(tid, set()).add(t)
            limit = len(here) if max_number == math.inf else min(len(here), int(max_number))
            for _, rid in here[:limit]:
                rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_get_objects_in_relative_direction(scene, candidates, related, direction, **kwargs):
    kwargs.setdefault("min_number", 0)
    base = _o_has_objects_in_relative_direction(scene, candidates, related, direction, **kwargs)
    own: dict = {}
    rel: dict = {}
    for tid, entry in base.entries.items():
        for rid, stamps in entry.related.items():
            for t in stamps:
                own.setdefault(rid, set()).add(t)
                rel.setdefault(rid, {}).setdefault(tid, set()).add(t)
    return _result(own, rel)


def _o_being_crossed_by(
    scene,
    candidates,
    related,
    direction="forward",
    in_direction="either",
    forward_thresh=10.0,
    lateral_thresh=5.0,
):
    own: dict = {}
    rel: dict = {}
    for tid in sorted(candidates.entries):
        for rid in sorted(related.entries):
            if tid == rid:
                continue
            ct = scene.tracks[tid]
            rt = scene.tracks[rid]
            shared = sorted(
                set(candidates.entries[tid].timestamps)
                & set(related.entries[rid].timestamps)
            )
            if not shared:
                continue
            lat = []
            ext = []
            for t in shared:
                i = ct.index[t]
                j = rt.index[t]
                fx, fy, _ = _box_frame(ct, i, rt, j)
                axial_raw, lateral = _cross_frame(fx, fy, direction)
                edge = 0.5 * (
                    ct.length[i] if direction in ("forward", "backward") else ct.width[i]
                )
                axial = axial_raw - edge
                lat.append(lateral)
                ext.append(0.0 <= axial <= forward_thresh)
            stamps = set()
            k = 1
            n = len(shared)
            while k < n:
                crossed = lat[k - 1] * lat[k] < 0.0 and ext[k - 1] and ext[k]
                if crossed:
                    ccw = lat[k] > 0.0
                    if (
                        in_direction == "either"
                        or (in_direction == "counterclockwise" and ccw)
                        or (in_direction == "clockwise" and not ccw)
                    ):
                        m = k
                        while m < n and abs(lat[m]) <= lateral_thresh:
                            stamps.add(shared[m])
                            m += 1
                        k = m
                        continue
                k += 1
            if stamps:
                own.setdefault(tid, set()).update(stamps)
                rel.setdefault(tid, {}).setdefault(rid, set()).update(stamps)
    return _result(own, rel)


def _o_near_objects(
    scene, candidates, related, distance_thresh=10.0, min_objects=1, include_self=False
):
    counts: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related, include_self=include_self):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        i = ct.index[t]
        j = rt.index[t]
        dx = rt.x[j] - ct.x[i]
        dy = rt.y[j] - ct.y[i]
        dist = math.sqrt(dx * dx + dy * dy)
        if dist <= distance_thresh:
            counts.setdefault(tid, {}).setdefault(t, []).append(rid)
    own: dict = {}
    rel: dict = {}
    for tid, per_t in counts.items():
        for t, rids in per_t.items():
            if len(rids) >= min_objects:
                own.setdefault(tid, set()).add(t)
                for rid in rids:
                    rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_following(scene, candidates, related):
    min_speed = scene.config.min_moving_speed
    max_angle = scene.config.following_heading_deg
    own: dict = {}
    rel: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        i = ct.index[t]
        j = rt.index[t]
        lane_c = scene.lane_at(tid, i)
        if lane_c is None or not scene.same_or_successor(lane_c, scene.lane_at(rid, j)):
            continue
        if ct.speed[i] < min_speed or rt.speed[j] < min_speed:
            continue
        dot = ct.vx[i] * rt.vx[j] + ct.vy[i] * rt.vy[j]
        denom = ct.speed[i] * rt.speed[j]
        if math.degrees(math.acos(min(1.0, max(-1.0, dot / denom)))) > max_angle:
            continue
        ux, uy = scene._tangent_at(scene.lanes[lane_c], ct.x[i], ct.y[i])
        ahead = (rt.x[j] - ct.x[i]) * ux + (rt.y[j] - ct.y[i]) * uy
        if ahead <= 0.0:
            continue
        own.setdefault(tid, set()).add(t)
        rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_in_same_lane(scene, candidates, related):
    own: dict = {}
    rel: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        if scene.same_or_successor(
            scene.lane_at(tid, ct.index[t]), scene.lane_at(rid, rt.index[t])
        ):
            own.setdefault(tid, set()).add(t)
            rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


def _o_on_relative_side_of_road(scene, candidates, related, side):
    own: dict = {}
    rel: dict = {}
    for tid, rid, t in _pair_iter(scene, candidates, related):
        ct = scene.tracks[tid]
        rt = scene.tracks[rid]
        dir_c = scene.road_direction(tid, ct.index[t])
        dir_r = scene.road_direction(rid, rt.index[t])
        if dir_c is None or dir_r is None:
            continue
        dot = dir_c[0] * dir_r[0] + dir_c[1] * dir_r[1]
        ok = dot > 0.0 if side == "same" else dot <= 0.0
        if ok:
            own.setdefault(tid, set()).add(t)
            rel.setdefault(tid, {}).setdefault(rid, set()).add(t)
    return _result(own, rel)


# -- map --------------------------------------------------------------------

def _o_at_pedestrian_crossing(scene, candidates, within_distance=1.0):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        i = scene.tracks[tid].index[t]
        if scene.layer_distance(tid, i, scene.crossings) <= within_distance:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_on_lane_type(scene, candidates, lane_type):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        lane_id = scene.lane_at(tid, scene.tracks[tid].index[t])
        if lane_id is not None and scene.lanes[lane_id].lane_type == lane_type:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_near_intersection(scene, candidates, threshold=5.0):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        i = scene.tracks[tid].index[t]
        if scene.layer_distance(tid, i, scene.intersections) <= threshold:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_on_intersection(scene, candidates):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        i = scene.tracks[tid].index[t]
        if scene.layer_distance(tid, i, scene.intersections) == 0.0:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_at_stop_sign(scene, candidates, forward_thresh=10.0):
    radius = scene.config.stop_sign_radius_m
    own: dict = {}
    for tid, t in _iter_own(candidates):
        tr = scene.tracks[tid]
        i = tr.index[t]
        lane_id = scene.lane_at(tid, i)
        if lane_id is None:
            continue
        for sign in scene.stop_signs:
            if lane_id not in sign.controlled_lane_ids:
                continue
            dx = tr.x[i] - float(sign.position[0])
            dy = tr.y[i] - float(sign.position[1])
            if math.hypot(dx, dy) > radius:
                continue
            along = dx * math.cos(sign.facing_yaw) + dy * math.sin(sign.facing_yaw)
            if 0.0 <= along <= forward_thresh:
                own.setdefault(tid, []).append(t)
                break
    return _result(own)


def _o_in_drivable_area(scene, candidates):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        i = scene.tracks[tid].index[t]
        if scene.layer_distance(tid, i, scene.drivable) == 0.0:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_on_road(scene, candidates):
    own: dict = {}
    for tid, t in _iter_own(candidates):
        i = scene.tracks[tid].index[t]
        if scene.layer_distance(tid, i, scene.lane_polys) == 0.0:
            own.setdefault(tid, []).append(t)
    return _result(own)


def _o_is_color(scene, candidates, color):
    if color not in ("white", "silver", "black", "red", "yellow", "blue"):
        return candidates
    entries = {
        tid: entry
        for tid, entry in candidates.entries.items()
        if scene.colors.get(tid) == color
    }
    return ScenarioSet(entries)


def _o_scenario_and(scene, scenarios):
    keys = set(scenarios[0].entries)
    for s in scenarios[1:]:
        keys &= set(s.entries)
    own: dict = {}
    rel: dict = {}
    for tid in keys:
        stamps = set(scenarios[0].entries[tid].timestamps)
        for s in scenarios[1:]:
            stamps &= set(s.entries[tid].timestamps)
        if not stamps:
            continue
        own[tid] = stamps
        for s in scenarios:
            for rid, st in s.entries[tid].related.items():
                rel.setdefault(tid, {}).setdefault(rid, set()).update(st)
    return _result(own, rel)


def _o_scenario_or(scene, scenarios):
    own: dict = {}
    rel: dict = {}
    for s in scenarios:
        for tid, entry in s.entries.items():
            own.setdefault(tid, set()).update(entry.timestamps)
            for rid, st in entry.related.items():
                rel.setdefault(tid, {}).setdefault(rid, set()).update(st)
    return _result(own, rel)


_ORACLE_FUNCTIONS = {
    "get_objects_of_category": _o_get_objects_of_category,
    "is_category": _o_is_category,
    "has_velocity": _o_has_velocity,
    "stationary": _o_stationary,
    "accelerating": _o_accelerating,
    "has_lateral_acceleration": _o_has_lateral_acceleration,
    "turning": _o_turning,
    "changing_lanes": _o_changing_lanes,
    "facing_toward": _o_facing_toward,
    "heading_toward": _o_heading_toward,
    "heading_in_relative_direction_to": _o_heading_in_relative_direction_to,
    "has_objects_in_relative_direction": _o_has_objects_in_relative_direction,
    "get_objects_in_relative_direction": _o_get_objects_in_relative_direction,
    "being_crossed_by": _o_being_crossed_by,
    "near_objects": _o_near_objects,
    "following": _o_following,
    "in_same_lane": _o_in_same_lane,
    "on_relative_side_of_road": _o_on_relative_side_of_road,
    "at_pedestrian_crossing": _o_at_pedestrian_crossing,
    "on_lane_type": _o_on_lane_type,
    "near_intersection": _o_near_intersection,
    "on_intersection": _o_on_intersection,
    "at_stop_sign": _o_at_stop_sign,
    "in_drivable_area": _o_in_drivable_area,
    "on_road": _o_on_road,
    "is_color": _o_is_color,
    "scenario_and": _o_scenario_and,
    "scenario_or": _o_scenario_or,
}
