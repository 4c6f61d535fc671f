"""Loading track predictions, ego poses, and maps; writing mining results.

File contracts (all coordinates in meters):
  tracks.csv  timestamp_ns,track_id,confidence,class_name,tx_m,ty_m,tz_m,
              length_m,width_m,height_m,yaw_rad           (ego frame)
  poses.csv   timestamp_ns,tx_m,ty_m,tz_m,qw,qx,qy,qz     (ego -> city)
  map.json    see scenariomine.hdmap
  colors.csv  track_id,color                              (optional sidecar)
  outputs     scenario_<hash>.csv / .json per prompt
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from scenariomine.core import (
    CONCRETE_CATEGORIES,
    EGO_CATEGORY,
    ScenarioEntry,
    ScenarioSet,
    Track,
)
from scenariomine.hdmap import HDMap, load_map

log = logging.getLogger(__name__)

TRACKS_HEADER = [
    "timestamp_ns",
    "track_id",
    "confidence",
    "class_name",
    "tx_m",
    "ty_m",
    "tz_m",
    "length_m",
    "width_m",
    "height_m",
    "yaw_rad",
]

POSES_HEADER = ["timestamp_ns", "tx_m", "ty_m", "tz_m", "qw", "qx", "qy", "qz"]

SCENARIO_HEADER = ["track_uuid", "timestamp_ns", "role", "related_to"]

# Ego box constants: size (length, width, height) and the offset from the
# ego reference point (near the rear axle) to the box centroid, ego frame.
EGO_SIZE = (4.877, 2.0, 1.473)
EGO_OFFSET = (1.422, 0.0, 0.25)
EGO_TRACK_ID = "ego"


@dataclass(frozen=True)
class EgoPose:
    timestamp: int
    translation: np.ndarray  # (3,)
    rotation: np.ndarray  # unit quaternion (qw, qx, qy, qz), ego -> city

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        q = np.asarray(self.rotation, dtype=np.float64).reshape(4)
        norm = float(np.sqrt((q * q).sum()))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"pose at {self.timestamp}: quaternion norm {norm} != 1")
        t.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "rotation", q)


@dataclass
class LogBundle:
    """One driving log: city-frame tracks, ego poses, and the HD map."""

    log_id: str
    tracks: list[Track]
    ego: list[EgoPose]
    hd_map: HDMap
    colors: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        pose_ts = {p.timestamp for p in self.ego}
        for track in self.tracks:
            missing = set(int(t) for t in track.timestamps) - pose_ts
            if missing:
                raise ValueError(
                    f"track {track.track_id!r} observed at {min(missing)} without an ego pose"
                )

    def track_map(self) -> dict[str, Track]:
        return {t.track_id: t for t in self.tracks}


@dataclass
class LoadStats:
    rows: int = 0
    rejected_rows: int = 0
    sorted_tracks: int = 0
    deduped_rows: int = 0


def load_tracks(path, stats: Optional[LoadStats] = None) -> list[Track]:
    """Load ego-frame tracks from tracks.csv, grouping rows by track_id.

    Rows with an unknown class_name are rejected (logged, counted in stats);
    duplicate (track_id, timestamp) rows keep the higher confidence; a track
    with out-of-order rows is sorted with a warning.
    """
    stats = stats if stats is not None else LoadStats()
    rows_by_track: dict[str, dict[int, tuple]] = {}
    category: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        order: dict[str, list[int]] = {}
        for row in reader:
            stats.rows += 1
            cls = row["class_name"]
            if cls not in CONCRETE_CATEGORIES:
                stats.rejected_rows += 1
                log.warning("%s: rejected row with unknown class_name %r", path, cls)
                continue
            tid = row["track_id"]
            ts = int(row["timestamp_ns"])
            payload = (
                float(row["confidence"]),
                float(row["tx_m"]),
                float(row["ty_m"]),
                float(row["tz_m"]),
                float(row["length_m"]),
                float(row["width_m"]),
                float(row["height_m"]),
                float(row["yaw_rad"]),
            )
            category.setdefault(tid, cls)
            bucket = rows_by_track.setdefault(tid, {})
            if ts in bucket:
                stats.deduped_rows += 1
                if payload[0] <= bucket[ts][0]:
                    continue
            bucket[ts] = payload
            order.setdefault(tid, []).append(ts)
    tracks = []
    for tid in sorted(rows_by_track):
        bucket = rows_by_track[tid]
        seen = order[tid]
        if any(b < a for a, b in zip(seen, seen[1:])):
            stats.sorted_tracks += 1
            log.warning("track %r rows were not time-ordered; sorted", tid)
        ts = sorted(bucket)
        vals = [bucket[t] for t in ts]
        tracks.append(
            Track(
                track_id=tid,
                category=category[tid],
                timestamps=ts,
                translations=[v[1:4] for v in vals],
                yaws=[v[7] for v in vals],
                sizes=[v[4:7] for v in vals],
                confidences=[v[0] for v in vals],
            )
        )
    return tracks


def save_tracks(tracks: Iterable[Track], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACKS_HEADER)
        for track in sorted(tracks, key=lambda t: t.track_id):
            for i, ts in enumerate(track.timestamps):
                writer.writerow(
                    [
                        int(ts),
                        track.track_id,
                        repr(float(track.confidences[i])),
                        track.category,
                        *(repr(float(v)) for v in track.translations[i]),
                        *(repr(float(v)) for v in track.sizes[i]),
                        repr(float(track.yaws[i])),
                    ]
                )


def load_poses(path) -> list[EgoPose]:
    poses = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            poses.append(
                EgoPose(
                    timestamp=int(row["timestamp_ns"]),
                    translation=[float(row["tx_m"]), float(row["ty_m"]), float(row["tz_m"])],
                    rotation=[
                        float(row["qw"]),
                        float(row["qx"]),
                        float(row["qy"]),
                        float(row["qz"]),
                    ],
                )
            )
    ts = [p.timestamp for p in poses]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError(f"{path}: pose timestamps not strictly increasing")
    return poses


def save_poses(poses: Iterable[EgoPose], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(POSES_HEADER)
        for p in poses:
            writer.writerow(
                [
                    p.timestamp,
                    *(repr(float(v)) for v in p.translation),
                    *(repr(float(v)) for v in p.rotation),
                ]
            )


def load_colors(path) -> dict[str, str]:
    colors = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            colors[row["track_id"]] = row["color"]
    return colors


def save_colors(colors: dict[str, str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["track_id", "color"])
        for tid in sorted(colors):
            writer.writerow([tid, colors[tid]])


# ---------------------------------------------------------------------------
# frame transforms

def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_heading(q: np.ndarray) -> float:
    """Yaw of the pose rotation about +z."""
    w, x, y, z = q
    return float(np.arctan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z)))


def to_city_frame(tracks: list[Track], ego: list[EgoPose]) -> list[Track]:
    """Rotate+translate ego-frame boxes into the city frame using the pose at
    each box timestamp. Missing poses are an error naming the timestamp."""
    poses = {p.timestamp: p for p in ego}
    out = []
    for track in tracks:
        translations = np.empty_like(track.translations)
        yaws = np.empty_like(track.yaws)
        for i, ts in enumerate(track.timestamps):
            pose = poses.get(int(ts))
            if pose is None:
                raise ValueError(f"no ego pose at timestamp {int(ts)} for track {track.track_id!r}")
            translations[i] = quat_to_matrix(pose.rotation) @ track.translations[i] + pose.translation
            yaws[i] = track.yaws[i] + quat_heading(pose.rotation)
        out.append(
            Track(
                track.track_id,
                track.category,
                track.timestamps,
                translations,
                yaws,
                track.sizes,
                track.confidences,
            )
        )
    return out


def to_ego_frame(tracks: list[Track], ego: list[EgoPose]) -> list[Track]:
    """Inverse of to_city_frame."""
    poses = {p.timestamp: p for p in ego}
    out = []
    for track in tracks:
        translations = np.empty_like(track.translations)
        yaws = np.empty_like(track.yaws)
        for i, ts in enumerate(track.timestamps):
            pose = poses.get(int(ts))
            if pose is None:
                raise ValueError(f"no ego pose at timestamp {int(ts)} for track {track.track_id!r}")
            rot = quat_to_matrix(pose.rotation)
            translations[i] = rot.T @ (track.translations[i] - pose.translation)
            yaws[i] = track.yaws[i] - quat_heading(pose.rotation)
        out.append(
            Track(
                track.track_id,
                track.category,
                track.timestamps,
                translations,
                yaws,
                track.sizes,
                track.confidences,
            )
        )
    return out


def inject_ego_track(tracks: list[Track], ego: list[EgoPose]) -> list[Track]:
    """Append the ego-vehicle track (ego-frame boxes, one per pose timestamp).

    Refuses to run twice: an existing EGO_VEHICLE track is an error.
    """
    if not ego:
        raise ValueError("cannot inject ego track without ego poses")
    if any(t.category == EGO_CATEGORY for t in tracks):
        raise ValueError("ego track already present")
    n = len(ego)
    ego_track = Track(
        track_id=EGO_TRACK_ID,
        category=EGO_CATEGORY,
        timestamps=[p.timestamp for p in ego],
        translations=np.tile(np.array(EGO_OFFSET), (n, 1)),
        yaws=np.zeros(n),
        sizes=np.tile(np.array(EGO_SIZE), (n, 1)),
        confidences=np.ones(n),
    )
    return list(tracks) + [ego_track]


def load_log_bundle(log_dir, inject_ego: bool = True) -> LogBundle:
    """Load one log directory (tracks.csv, poses.csv, map.json, colors.csv)."""
    log_dir = Path(log_dir)
    poses = load_poses(log_dir / "poses.csv")
    tracks = load_tracks(log_dir / "tracks.csv")
    if inject_ego:
        tracks = inject_ego_track(tracks, poses)
    tracks = to_city_frame(tracks, poses)
    colors_path = log_dir / "colors.csv"
    colors = load_colors(colors_path) if colors_path.exists() else {}
    return LogBundle(
        log_id=log_dir.name,
        tracks=tracks,
        ego=poses,
        hd_map=load_map(log_dir / "map.json"),
        colors=colors,
    )


# ---------------------------------------------------------------------------
# scenario outputs

def prompt_hash(description: str) -> str:
    return hashlib.sha1(description.encode("utf-8")).hexdigest()[:10]


def scenario_rows(result: ScenarioSet) -> list[list]:
    rows = []
    for tid in sorted(result.entries):
        entry = result.entries[tid]
        for ts in entry.timestamps:
            rows.append([tid, int(ts), "REFERRED", ""])
        for rid in sorted(entry.related):
            for ts in entry.related[rid]:
                rows.append([rid, int(ts), "RELATED", tid])
    return rows


def write_scenario_output(result: ScenarioSet, description: str, log_id: str, out_dir) -> Path:
    """Write the evaluation-ready CSV plus a JSON mirror; returns the CSV path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"scenario_{prompt_hash(description)}"
    csv_path = out_dir / f"{stem}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCENARIO_HEADER)
        writer.writerows(scenario_rows(result))
    payload = {
        "description": description,
        "log_id": log_id,
        "scenario": result.to_plain(),
    }
    with open(out_dir / f"{stem}.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return csv_path


def read_scenario_output(json_path) -> tuple[ScenarioSet, str, str]:
    """Read a scenario JSON mirror back to (ScenarioSet, description, log_id)."""
    with open(json_path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return (
        ScenarioSet.from_plain(payload["scenario"]),
        payload["description"],
        payload["log_id"],
    )


def read_scenario_csv(csv_path) -> ScenarioSet:
    """Rebuild a ScenarioSet from the CSV form."""
    own: dict[str, set[int]] = {}
    related: dict[str, dict[str, set[int]]] = {}
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            ts = int(row["timestamp_ns"])
            if row["role"] == "REFERRED":
                own.setdefault(row["track_uuid"], set()).add(ts)
            else:
                related.setdefault(row["related_to"], {}).setdefault(
                    row["track_uuid"], set()
                ).add(ts)
    return ScenarioSet(
        {
            tid: ScenarioEntry(
                tuple(sorted(stamps)),
                {
                    rid: tuple(sorted(rstamps))
                    for rid, rstamps in related.get(tid, {}).items()
                },
            )
            for tid, stamps in own.items()
        }
    )
