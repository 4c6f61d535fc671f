"""Core data model: object categories, tracks, and the scenario-set algebra.

A ScenarioSet (the "scenario dictionary") maps track ids to the timestamps at
which the track is referred, plus per-related-object relationship timestamps.
All types are immutable after construction and the algebra operations are
pure, so everything here is safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

# Timestamps are integer nanoseconds since epoch; within a log every track is
# aligned to the log's shared observation clock, so equality is exact.
Timestamp = int

ANNOTATED_CATEGORIES = (
    "ANIMAL",
    "ARTICULATED_BUS",
    "BICYCLE",
    "BICYCLIST",
    "BOLLARD",
    "BOX_TRUCK",
    "BUS",
    "CONSTRUCTION_BARREL",
    "CONSTRUCTION_CONE",
    "DOG",
    "LARGE_VEHICLE",
    "MESSAGE_BOARD_TRAILER",
    "MOBILE_PEDESTRIAN_CROSSING_SIGN",
    "MOTORCYCLE",
    "MOTORCYCLIST",
    "OFFICIAL_SIGNALER",
    "PEDESTRIAN",
    "RAILED_VEHICLE",
    "REGULAR_VEHICLE",
    "SCHOOL_BUS",
    "SIGN",
    "STOP_SIGN",
    "STROLLER",
    "TRAFFIC_LIGHT_TRAILER",
    "TRUCK",
    "TRUCK_CAB",
    "VEHICULAR_TRAILER",
    "WHEELCHAIR",
    "WHEELED_DEVICE",
    "WHEELED_RIDER",
)

EGO_CATEGORY = "EGO_VEHICLE"

CONCRETE_CATEGORIES = ANNOTATED_CATEGORIES + (EGO_CATEGORY,)

VEHICLE_CATEGORIES = frozenset(
    {
        "ARTICULATED_BUS",
        "BOX_TRUCK",
        "BUS",
        "EGO_VEHICLE",
        "LARGE_VEHICLE",
        "MOTORCYCLE",
        "RAILED_VEHICLE",
        "REGULAR_VEHICLE",
        "SCHOOL_BUS",
        "TRUCK",
        "TRUCK_CAB",
    }
)

SUPER_CATEGORIES = ("ANY", "VEHICLE")

VALID_CATEGORIES = frozenset(CONCRETE_CATEGORIES) | frozenset(SUPER_CATEGORIES)


def expand_category(name: str) -> frozenset[str]:
    """Expand a category name (possibly a super-category) to concrete names."""
    if name == "ANY":
        return frozenset(CONCRETE_CATEGORIES)
    if name == "VEHICLE":
        return VEHICLE_CATEGORIES
    if name in VALID_CATEGORIES:
        return frozenset({name})
    raise ValueError(
        f"unknown category {name!r}; valid names: {', '.join(sorted(VALID_CATEGORIES))}"
    )


def normalize_yaw(yaw):
    """Wrap angles to (-pi, pi]."""
    wrapped = np.mod(np.asarray(yaw, dtype=np.float64) + np.pi, 2.0 * np.pi)
    out = np.where(wrapped == 0.0, np.pi, wrapped - np.pi)
    if np.ndim(yaw) == 0:
        return float(out)
    return out


class TrackBox(NamedTuple):
    """One oriented 3D box observation (city frame)."""

    timestamp: Timestamp
    translation: tuple[float, float, float]
    yaw: float
    size: tuple[float, float, float]  # length, width, height
    confidence: float


class Track:
    """One object's category plus its time-ordered oriented boxes.

    Columns are stored as arrays for vectorized math; ``box_at`` gives a
    per-row view when a scalar box is more convenient.
    """

    __slots__ = (
        "track_id",
        "category",
        "timestamps",
        "translations",
        "yaws",
        "sizes",
        "confidences",
        "_ts_index",
    )

    def __init__(self, track_id, category, timestamps, translations, yaws, sizes, confidences):
        if category not in CONCRETE_CATEGORIES:
            raise ValueError(f"unknown category {category!r} for track {track_id!r}")
        ts = np.asarray(timestamps, dtype=np.int64)
        if ts.size == 0:
            raise ValueError(f"track {track_id!r} has no boxes")
        if np.any(np.diff(ts) <= 0):
            raise ValueError(f"track {track_id!r} timestamps not strictly increasing")
        if np.any(ts <= 0):
            raise ValueError(f"track {track_id!r} has non-positive timestamps")
        sizes_arr = np.asarray(sizes, dtype=np.float64).reshape(ts.size, 3)
        if np.any(sizes_arr <= 0):
            raise ValueError(f"track {track_id!r} has non-positive box size")
        self.track_id = str(track_id)
        self.category = category
        self.timestamps = ts
        self.translations = np.asarray(translations, dtype=np.float64).reshape(ts.size, 3)
        self.yaws = normalize_yaw(np.asarray(yaws, dtype=np.float64).reshape(ts.size))
        self.sizes = sizes_arr
        self.confidences = np.asarray(confidences, dtype=np.float64).reshape(ts.size)
        self._ts_index = None
        for arr in (self.timestamps, self.translations, self.yaws, self.sizes, self.confidences):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def __repr__(self) -> str:
        return f"Track({self.track_id!r}, {self.category}, {len(self)} boxes)"

    @property
    def xy(self) -> np.ndarray:
        return self.translations[:, :2]

    def row_of(self, timestamp: Timestamp) -> int:
        """Row index of an observation timestamp; KeyError if absent."""
        if self._ts_index is None:
            self._ts_index = {int(t): i for i, t in enumerate(self.timestamps)}
        try:
            return self._ts_index[int(timestamp)]
        except KeyError:
            raise KeyError(f"track {self.track_id!r} not observed at {timestamp}") from None

    def rows_of(self, timestamps) -> np.ndarray:
        ts = np.asarray(timestamps, dtype=np.int64)
        rows = np.searchsorted(self.timestamps, ts)
        ok = (rows < len(self)) & (self.timestamps[np.minimum(rows, len(self) - 1)] == ts)
        if not np.all(ok):
            missing = ts[~ok]
            raise KeyError(f"track {self.track_id!r} not observed at {missing[0]}")
        return rows

    def box_at(self, timestamp: Timestamp) -> TrackBox:
        i = self.row_of(timestamp)
        return TrackBox(
            timestamp=int(self.timestamps[i]),
            translation=tuple(self.translations[i]),
            yaw=float(self.yaws[i]),
            size=tuple(self.sizes[i]),
            confidence=float(self.confidences[i]),
        )

    def summed_confidence(self) -> float:
        return float(self.confidences.sum())


def _frozen_stamps(stamps: Iterable[Timestamp]) -> tuple[Timestamp, ...]:
    return tuple(sorted({int(t) for t in stamps}))


@dataclass(frozen=True)
class ScenarioEntry:
    """Referred timestamps of one track plus its relationship timestamps."""

    timestamps: tuple[Timestamp, ...]
    related: Mapping[str, tuple[Timestamp, ...]] = field(default_factory=dict)

    def pairs(self, track_id: str):
        return ((track_id, t) for t in self.timestamps)


class ScenarioSet:
    """Immutable scenario dictionary.

    Construction normalizes entries: timestamps are sorted unique, entries
    with no timestamps are dropped, and relationship timestamps are clipped
    to the entry's own timestamps (empty relations dropped). These are the
    type invariants every algebra operation relies on.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[str, ScenarioEntry] | None = None):
        normalized: dict[str, ScenarioEntry] = {}
        for track_id, entry in (entries or {}).items():
            own = _frozen_stamps(entry.timestamps)
            if not own:
                continue
            own_set = set(own)
            related: dict[str, tuple[Timestamp, ...]] = {}
            for rid, rstamps in entry.related.items():
                clipped = tuple(t for t in _frozen_stamps(rstamps) if t in own_set)
                if clipped:
                    related[str(rid)] = clipped
            normalized[str(track_id)] = ScenarioEntry(own, related)
        self.entries: Mapping[str, ScenarioEntry] = normalized

    @classmethod
    def from_dict(cls, data: Mapping[str, Iterable[Timestamp]]) -> "ScenarioSet":
        return cls({tid: ScenarioEntry(_frozen_stamps(ts)) for tid, ts in data.items()})

    @classmethod
    def build(
        cls,
        own: Mapping[str, Iterable[Timestamp]],
        related: Mapping[str, Mapping[str, Iterable[Timestamp]]] | None = None,
    ) -> "ScenarioSet":
        related = related or {}
        return cls(
            {
                tid: ScenarioEntry(
                    _frozen_stamps(ts),
                    {rid: _frozen_stamps(rts) for rid, rts in related.get(tid, {}).items()},
                )
                for tid, ts in own.items()
            }
        )

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __contains__(self, track_id: str) -> bool:
        return track_id in self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioSet):
            return NotImplemented
        return self.to_plain() == other.to_plain()

    def __hash__(self):
        raise TypeError("ScenarioSet is not hashable")

    def __repr__(self) -> str:
        return f"ScenarioSet({len(self.entries)} tracks, {len(self.pairs())} pairs)"

    def ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.entries))

    def pairs(self) -> set[tuple[str, Timestamp]]:
        """All (track id, timestamp) pairs."""
        out: set[tuple[str, Timestamp]] = set()
        for tid, entry in self.entries.items():
            for t in entry.timestamps:
                out.add((tid, t))
        return out

    def triples(self) -> set[tuple[str, str, Timestamp]]:
        """All (track id, related id, timestamp) relationship triples."""
        out: set[tuple[str, str, Timestamp]] = set()
        for tid, entry in self.entries.items():
            for rid, stamps in entry.related.items():
                for t in stamps:
                    out.add((tid, rid, t))
        return out

    def to_plain(self) -> dict:
        """Plain-dict form (sorted, JSON-friendly) used for equality/serialization."""
        return {
            tid: {
                "timestamps": list(entry.timestamps),
                "related": {rid: list(st) for rid, st in sorted(entry.related.items())},
            }
            for tid, entry in sorted(self.entries.items())
        }

    @classmethod
    def from_plain(cls, data: Mapping) -> "ScenarioSet":
        return cls(
            {
                tid: ScenarioEntry(
                    tuple(int(t) for t in payload["timestamps"]),
                    {
                        rid: tuple(int(t) for t in stamps)
                        for rid, stamps in payload.get("related", {}).items()
                    },
                )
                for tid, payload in data.items()
            }
        )


EMPTY_SCENARIO = ScenarioSet()


def _merge_related(
    target: dict[str, set[Timestamp]], source: Mapping[str, Sequence[Timestamp]]
) -> None:
    for rid, stamps in source.items():
        target.setdefault(rid, set()).update(stamps)


def scenario_and(inputs: Sequence[ScenarioSet]) -> ScenarioSet:
    """Intersect scenario sets: shared keys, shared timestamps, relationships
    merged by union then clipped to the surviving pairs."""
    if not inputs:
        raise ValueError("scenario_and requires at least one input")
    keys = set(inputs[0].entries)
    for s in inputs[1:]:
        keys &= set(s.entries)
    out: dict[str, ScenarioEntry] = {}
    for tid in keys:
        stamps = set(inputs[0].entries[tid].timestamps)
        for s in inputs[1:]:
            stamps &= set(s.entries[tid].timestamps)
        if not stamps:
            continue
        related: dict[str, set[Timestamp]] = {}
        for s in inputs:
            _merge_related(related, s.entries[tid].related)
        out[tid] = ScenarioEntry(
            tuple(sorted(stamps)), {rid: tuple(sorted(st)) for rid, st in related.items()}
        )
    return ScenarioSet(out)


def scenario_or(inputs: Sequence[ScenarioSet]) -> ScenarioSet:
    """Union scenario sets: all keys, all timestamps, all relationships."""
    if not inputs:
        raise ValueError("scenario_or requires at least one input")
    own: dict[str, set[Timestamp]] = {}
    related: dict[str, dict[str, set[Timestamp]]] = {}
    for s in inputs:
        for tid, entry in s.entries.items():
            own.setdefault(tid, set()).update(entry.timestamps)
            _merge_related(related.setdefault(tid, {}), entry.related)
    return ScenarioSet(
        {
            tid: ScenarioEntry(
                tuple(sorted(stamps)),
                {rid: tuple(sorted(st)) for rid, st in related.get(tid, {}).items()},
            )
            for tid, stamps in own.items()
        }
    )


def scenario_not(candidates: ScenarioSet, filtered: ScenarioSet) -> ScenarioSet:
    """Per-key timestamp difference candidates \\ filtered; relationships are
    not carried over. Filtered pairs outside the candidates are ignored."""
    out: dict[str, ScenarioEntry] = {}
    for tid, entry in candidates.entries.items():
        removed = set(filtered.entries[tid].timestamps) if tid in filtered.entries else set()
        remaining = tuple(t for t in entry.timestamps if t not in removed)
        if remaining:
            out[tid] = ScenarioEntry(remaining)
    return ScenarioSet(out)


def reverse_relationship(scenario: ScenarioSet) -> ScenarioSet:
    """Transpose (track, related, timestamp) triples to (related, track,
    timestamp). Keys without relationships contribute nothing."""
    own: dict[str, set[Timestamp]] = {}
    related: dict[str, dict[str, set[Timestamp]]] = {}
    for tid, entry in scenario.entries.items():
        for rid, stamps in entry.related.items():
            own.setdefault(rid, set()).update(stamps)
            related.setdefault(rid, {}).setdefault(tid, set()).update(stamps)
    return ScenarioSet(
        {
            rid: ScenarioEntry(
                tuple(sorted(stamps)),
                {tid: tuple(sorted(st)) for tid, st in related[rid].items()},
            )
            for rid, stamps in own.items()
        }
    )
