"""HD-map model and geometric queries.

All queries are planar (city-frame x/y); heights are ignored. The map is
immutable after load and queries are pure, so one HDMap may be shared
read-only across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from scenariomine import geom
from scenariomine.core import normalize_yaw

LANE_TYPES = ("VEHICLE", "BUS", "BIKE")

CENTERLINE_STEP_M = 0.5


def _as_poly(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    arr.setflags(write=False)
    return arr


def polyline_length(line: np.ndarray) -> float:
    return float(np.sqrt(((line[1:] - line[:-1]) ** 2).sum(axis=1)).sum())


def resample_polyline(line: np.ndarray, n: int) -> np.ndarray:
    """Resample to n points uniform in arclength."""
    seg = np.sqrt(((line[1:] - line[:-1]) ** 2).sum(axis=1))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total == 0.0:
        return np.repeat(line[:1], n, axis=0)
    targets = np.linspace(0.0, total, n)
    x = np.interp(targets, s, line[:, 0])
    y = np.interp(targets, s, line[:, 1])
    return np.column_stack([x, y])


@dataclass(frozen=True)
class LaneSegment:
    lane_id: str
    lane_type: str
    left_boundary: np.ndarray
    right_boundary: np.ndarray
    left_neighbor: Optional[str] = None
    right_neighbor: Optional[str] = None
    successors: tuple[str, ...] = ()
    is_intersection: bool = False
    # derived, filled in __post_init__
    polygon: np.ndarray = field(init=False)
    centerline: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.lane_type not in LANE_TYPES:
            raise ValueError(f"lane {self.lane_id!r}: bad lane_type {self.lane_type!r}")
        left = _as_poly(self.left_boundary)
        right = _as_poly(self.right_boundary)
        if len(left) < 2 or len(right) < 2:
            raise ValueError(f"lane {self.lane_id!r}: boundaries need >= 2 points")
        object.__setattr__(self, "left_boundary", left)
        object.__setattr__(self, "right_boundary", right)
        poly = np.vstack([left, right[::-1]])
        poly.setflags(write=False)
        object.__setattr__(self, "polygon", poly)
        # centerline = average of corresponding boundary samples after
        # arclength-uniform resampling at CENTERLINE_STEP_M
        n = max(
            2,
            int(round(max(polyline_length(left), polyline_length(right)) / CENTERLINE_STEP_M))
            + 1,
        )
        center = 0.5 * (resample_polyline(left, n) + resample_polyline(right, n))
        center.setflags(write=False)
        object.__setattr__(self, "centerline", center)

    @property
    def arclengths(self) -> np.ndarray:
        seg = np.sqrt(((self.centerline[1:] - self.centerline[:-1]) ** 2).sum(axis=1))
        return np.concatenate([[0.0], np.cumsum(seg)])


@dataclass(frozen=True)
class PedestrianCrossing:
    crossing_id: str
    polygon: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "polygon", _as_poly(self.polygon))


@dataclass(frozen=True)
class StopSign:
    sign_id: str
    position: np.ndarray
    facing_yaw: float
    controlled_lane_ids: tuple[str, ...] = ()

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64).reshape(2)
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "facing_yaw", float(normalize_yaw(self.facing_yaw)))


@dataclass(frozen=True)
class DrivableArea:
    polygons: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(_as_poly(p) for p in self.polygons))


class HDMap:
    """Lane segments, crosswalks, stop signs, and the drivable area."""

    def __init__(self, lanes, crossings=(), stop_signs=(), drivable=None):
        self.lanes: dict[str, LaneSegment] = {lane.lane_id: lane for lane in lanes}
        if len(self.lanes) != len(list(lanes)):
            raise ValueError("duplicate lane ids")
        for lane in self.lanes.values():
            for ref in (lane.left_neighbor, lane.right_neighbor, *lane.successors):
                if ref is not None and ref not in self.lanes:
                    raise ValueError(f"lane {lane.lane_id!r} references unknown lane {ref!r}")
        self.crossings: tuple[PedestrianCrossing, ...] = tuple(crossings)
        self.stop_signs: tuple[StopSign, ...] = tuple(stop_signs)
        self.drivable: DrivableArea = drivable or DrivableArea()
        self._sorted_lanes = sorted(self.lanes.values(), key=lambda l: l.lane_id)
        # AABB per lane for cheap prefiltering
        self._lane_bounds = np.array(
            [
                [
                    lane.polygon[:, 0].min(),
                    lane.polygon[:, 1].min(),
                    lane.polygon[:, 0].max(),
                    lane.polygon[:, 1].max(),
                ]
                for lane in self._sorted_lanes
            ]
        ) if self._sorted_lanes else np.zeros((0, 4))

    def intersection_polygons(self) -> list[np.ndarray]:
        return [lane.polygon for lane in self._sorted_lanes if lane.is_intersection]

    def lane_polygons(self) -> list[np.ndarray]:
        return [lane.polygon for lane in self._sorted_lanes]

    def crossing_polygons(self) -> list[np.ndarray]:
        return [c.polygon for c in self.crossings]


def assign_lane(point, hd_map: HDMap) -> Optional[str]:
    """Lane whose boundary polygon contains the point (closed containment).

    Multiple containing lanes are disambiguated by centerline distance, then
    lexicographic lane id, so assignment is deterministic including ties.
    """
    labels = assign_lanes(np.asarray(point, dtype=np.float64).reshape(1, 2), hd_map)
    return labels[0]


def assign_lanes(points, hd_map: HDMap) -> list[Optional[str]]:
    """Vectorized assign_lane over an (N, 2) array of points."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(pts)
    out: list[Optional[str]] = [None] * n
    if not hd_map._sorted_lanes or n == 0:
        return out
    b = hd_map._lane_bounds
    best_dist = np.full(n, np.inf)
    for lane, bounds in zip(hd_map._sorted_lanes, b):
        near = (
            (pts[:, 0] >= bounds[0] - 1e-9)
            & (pts[:, 1] >= bounds[1] - 1e-9)
            & (pts[:, 0] <= bounds[2] + 1e-9)
            & (pts[:, 1] <= bounds[3] + 1e-9)
        )
        if not near.any():
            continue
        idx = np.nonzero(near)[0]
        contained = geom.points_to_polygon_distance(pts[idx], lane.polygon) == 0.0
        hit = idx[contained]
        if hit.size == 0:
            continue
        d = geom.points_to_polyline_distance(pts[hit], lane.centerline)
        for k, dist in zip(hit, d):
            # strict < keeps the lexicographically smallest id on exact ties
            # because lanes are visited in sorted id order
            if dist < best_dist[k]:
                best_dist[k] = dist
                out[k] = lane.lane_id
    return out


def distance_to_layer(point, polygons: Sequence[np.ndarray]) -> float:
    """0 inside any polygon, else distance to the nearest polygon boundary;
    +inf for an empty layer."""
    return float(distances_to_layer(np.asarray(point, dtype=np.float64).reshape(1, 2), polygons)[0])


def distances_to_layer(points, polygons: Sequence[np.ndarray]) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    best = np.full(len(pts), np.inf)
    for poly in polygons:
        np.minimum(best, geom.points_to_polygon_distance(pts, poly), out=best)
    return best


def lane_direction(hd_map: HDMap, lane_id: str, arclength: float) -> np.ndarray:
    """Unit tangent of the lane centerline at the given arclength."""
    lane = hd_map.lanes.get(lane_id)
    if lane is None:
        raise KeyError(f"unknown lane id {lane_id!r}")
    s = lane.arclengths
    pos = min(max(float(arclength), 0.0), float(s[-1]))
    seg = int(np.clip(np.searchsorted(s, pos, side="right") - 1, 0, len(s) - 2))
    return _segment_tangent(lane.centerline, seg)


def lane_direction_at_point(lane: LaneSegment, point) -> np.ndarray:
    """Unit tangent at the centerline point nearest to ``point``."""
    pt = np.asarray(point, dtype=np.float64).reshape(2)
    line = lane.centerline
    a = line[:-1]
    d = line[1:] - a
    dd = (d * d).sum(axis=1)
    t = np.where(dd > 0, ((pt - a) * d).sum(axis=1) / np.where(dd > 0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    q = a + t[:, None] * d
    seg = int(np.argmin(((pt - q) ** 2).sum(axis=1)))
    return _segment_tangent(line, seg)


def _segment_tangent(line: np.ndarray, seg: int) -> np.ndarray:
    v = line[seg + 1] - line[seg]
    norm = float(np.sqrt((v * v).sum()))
    if norm == 0.0:
        return np.array([1.0, 0.0])
    return v / norm


def same_or_successor(hd_map: HDMap, lane_a: Optional[str], lane_b: Optional[str]) -> bool:
    """Same lane, or lanes linked by the successor chain within 1 hop."""
    if lane_a is None or lane_b is None:
        return False
    if lane_a == lane_b:
        return True
    a = hd_map.lanes[lane_a]
    b = hd_map.lanes[lane_b]
    return lane_b in a.successors or lane_a in b.successors


def nearest_lane_within(point, hd_map: HDMap, max_distance: float) -> Optional[LaneSegment]:
    """Nearest lane by polygon distance, if within max_distance (ties by id)."""
    pt = np.asarray(point, dtype=np.float64).reshape(1, 2)
    best: tuple[float, str] | None = None
    for lane in hd_map._sorted_lanes:
        d = float(geom.points_to_polygon_distance(pt, lane.polygon)[0])
        if d <= max_distance and (best is None or d < best[0]):
            best = (d, lane.lane_id)
    return hd_map.lanes[best[1]] if best else None


# ---------------------------------------------------------------------------
# map.json serialization

def map_to_dict(hd_map: HDMap) -> dict:
    return {
        "lanes": [
            {
                "id": lane.lane_id,
                "lane_type": lane.lane_type,
                "left_boundary": lane.left_boundary.tolist(),
                "right_boundary": lane.right_boundary.tolist(),
                "left_neighbor": lane.left_neighbor,
                "right_neighbor": lane.right_neighbor,
                "successors": list(lane.successors),
                "is_intersection": lane.is_intersection,
            }
            for lane in hd_map._sorted_lanes
        ],
        "crossings": [
            {"id": c.crossing_id, "polygon": c.polygon.tolist()} for c in hd_map.crossings
        ],
        "stop_signs": [
            {
                "id": s.sign_id,
                "position": s.position.tolist(),
                "facing_yaw": s.facing_yaw,
                "controlled_lane_ids": list(s.controlled_lane_ids),
            }
            for s in hd_map.stop_signs
        ],
        "drivable": [p.tolist() for p in hd_map.drivable.polygons],
    }


def map_from_dict(data: dict) -> HDMap:
    lanes = [
        LaneSegment(
            lane_id=str(item["id"]),
            lane_type=item["lane_type"],
            left_boundary=item["left_boundary"],
            right_boundary=item["right_boundary"],
            left_neighbor=item.get("left_neighbor"),
            right_neighbor=item.get("right_neighbor"),
            successors=tuple(item.get("successors", ())),
            is_intersection=bool(item.get("is_intersection", False)),
        )
        for item in data.get("lanes", [])
    ]
    crossings = [
        PedestrianCrossing(str(item["id"]), item["polygon"]) for item in data.get("crossings", [])
    ]
    signs = [
        StopSign(
            str(item["id"]),
            item["position"],
            float(item["facing_yaw"]),
            tuple(item.get("controlled_lane_ids", ())),
        )
        for item in data.get("stop_signs", [])
    ]
    drivable = DrivableArea(tuple(np.asarray(p) for p in data.get("drivable", [])))
    return HDMap(lanes, crossings, signs, drivable)


def load_map(path) -> HDMap:
    with open(path, "r", encoding="utf-8") as fh:
        return map_from_dict(json.load(fh))


def save_map(hd_map: HDMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(map_to_dict(hd_map), fh, indent=1, sort_keys=True)
        fh.write("\n")
