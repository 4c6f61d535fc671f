"""Per-log derived caches shared by the predicates.

A LogContext wraps an immutable LogBundle and lazily computes kinematics,
lane assignments, layer distances, and road directions per track. Everything
is computed once and shared read-only, so evaluating many programs against
the same log is cheap.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from scenariomine.config import DEFAULT_ENGINE_CONFIG, EngineConfig
from scenariomine.hdmap import assign_lanes, distances_to_layer, lane_direction_at_point, nearest_lane_within
from scenariomine.io import LogBundle
from scenariomine.kinematics import TrackKinematics, estimate_states

LAYER_CROSSINGS = "crossings"
LAYER_INTERSECTIONS = "intersections"
LAYER_LANES = "lanes"
LAYER_DRIVABLE = "drivable"


class LogContext:
    def __init__(self, bundle: LogBundle, config: EngineConfig = DEFAULT_ENGINE_CONFIG):
        self.bundle = bundle
        self.config = config
        self.tracks = bundle.track_map()
        self._kin: dict[str, TrackKinematics] = {}
        self._lane_ids: dict[str, list[Optional[str]]] = {}
        self._layer_dists: dict[tuple[str, str], np.ndarray] = {}
        self._road_dirs: dict[str, np.ndarray] = {}

    def kinematics(self, track_id: str) -> TrackKinematics:
        out = self._kin.get(track_id)
        if out is None:
            out = self._kin[track_id] = estimate_states(self.tracks[track_id])
        return out

    def lane_ids(self, track_id: str) -> list[Optional[str]]:
        """Assigned lane id per observation row (None when off-lane)."""
        out = self._lane_ids.get(track_id)
        if out is None:
            track = self.tracks[track_id]
            out = self._lane_ids[track_id] = assign_lanes(track.xy, self.bundle.hd_map)
        return out

    def _layer_polygons(self, layer: str):
        hd_map = self.bundle.hd_map
        if layer == LAYER_CROSSINGS:
            return hd_map.crossing_polygons()
        if layer == LAYER_INTERSECTIONS:
            return hd_map.intersection_polygons()
        if layer == LAYER_LANES:
            return hd_map.lane_polygons()
        if layer == LAYER_DRIVABLE:
            return list(hd_map.drivable.polygons)
        raise KeyError(layer)

    def layer_distances(self, track_id: str, layer: str) -> np.ndarray:
        """Distance from each observation centroid to a map layer."""
        key = (track_id, layer)
        out = self._layer_dists.get(key)
        if out is None:
            track = self.tracks[track_id]
            out = distances_to_layer(track.xy, self._layer_polygons(layer))
            out.setflags(write=False)
            self._layer_dists[key] = out
        return out

    def road_directions(self, track_id: str) -> np.ndarray:
        """(T, 2) unit road direction per row: the tangent of the assigned
        lane at the track position, falling back to the nearest lane within
        roadside_lane_search_m; NaN rows mean no lane context."""
        out = self._road_dirs.get(track_id)
        if out is None:
            track = self.tracks[track_id]
            hd_map = self.bundle.hd_map
            lanes = self.lane_ids(track_id)
            out = np.full((len(track), 2), np.nan)
            for i, lane_id in enumerate(lanes):
                lane = hd_map.lanes.get(lane_id) if lane_id is not None else None
                if lane is None:
                    lane = nearest_lane_within(
                        track.xy[i], hd_map, self.config.roadside_lane_search_m
                    )
                if lane is not None:
                    out[i] = lane_direction_at_point(lane, track.xy[i])
            out.setflags(write=False)
            self._road_dirs[track_id] = out
        return out
