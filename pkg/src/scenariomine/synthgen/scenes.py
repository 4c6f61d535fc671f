"""Deterministic synthetic scene generation.

A SceneScript (seed, duration, rate, map template, agents with motion
primitives) expands into a LogBundle: city-frame tracks sampled on the shared
clock, ego poses, and the template map. Identical scripts produce identical
bundles byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from scenariomine.core import CONCRETE_CATEGORIES, Track, normalize_yaw
from scenariomine.hdmap import HDMap, save_map
from scenariomine.io import (
    EgoPose,
    LogBundle,
    inject_ego_track,
    save_colors,
    save_poses,
    save_tracks,
    to_city_frame,
    to_ego_frame,
)
from scenariomine.synthgen.templates import build_template

BASE_TIMESTAMP_NS = 1_000_000_000_000

RATES = (2, 10)
DURATION_RANGE = (5.0, 20.0)

PRIMITIVES = ("hold", "line", "arc", "lane_follow", "lane_change", "crossing")

# length, width, height per category (defaults for anything missing)
AGENT_SIZES = {
    "REGULAR_VEHICLE": (4.5, 2.0, 1.6),
    "LARGE_VEHICLE": (7.0, 2.5, 2.6),
    "TRUCK": (8.0, 2.6, 3.0),
    "TRUCK_CAB": (6.0, 2.5, 3.2),
    "BOX_TRUCK": (7.5, 2.5, 3.0),
    "BUS": (12.0, 2.8, 3.2),
    "SCHOOL_BUS": (11.0, 2.8, 3.1),
    "ARTICULATED_BUS": (17.0, 2.8, 3.2),
    "MOTORCYCLE": (2.2, 0.9, 1.4),
    "MOTORCYCLIST": (2.2, 0.9, 1.7),
    "BICYCLE": (1.8, 0.6, 1.2),
    "BICYCLIST": (1.8, 0.7, 1.7),
    "PEDESTRIAN": (0.7, 0.7, 1.8),
    "DOG": (0.8, 0.4, 0.6),
    "BOLLARD": (0.3, 0.3, 1.0),
    "CONSTRUCTION_CONE": (0.4, 0.4, 0.8),
    "CONSTRUCTION_BARREL": (0.6, 0.6, 1.0),
    "STOP_SIGN": (0.3, 0.3, 2.2),
    "STROLLER": (1.0, 0.6, 1.1),
    "WHEELCHAIR": (1.1, 0.7, 1.3),
    "WHEELED_DEVICE": (1.2, 0.6, 1.2),
    "WHEELED_RIDER": (1.2, 0.6, 1.7),
}
DEFAULT_SIZE = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class AgentSpec:
    agent_id: str
    category: str
    primitive: str
    params: dict = field(default_factory=dict)
    is_ego: bool = False
    start_s: float = 0.0
    end_s: Optional[float] = None
    confidence: float = 1.0

    def __post_init__(self):
        if self.primitive not in PRIMITIVES:
            raise ValueError(f"unknown motion primitive {self.primitive!r}")
        if not self.is_ego and self.category not in CONCRETE_CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")


@dataclass(frozen=True)
class SceneScript:
    seed: int
    duration_s: float
    rate_hz: int
    map_template: str
    agents: tuple
    colors: dict = field(default_factory=dict)
    queries: tuple = ()  # labeled gt queries, see synthgen.labels
    log_id: str = ""

    def __post_init__(self):
        if self.rate_hz not in RATES:
            raise ValueError(f"rate_hz must be one of {RATES}")
        if not DURATION_RANGE[0] <= self.duration_s <= DURATION_RANGE[1]:
            raise ValueError(f"duration_s must be within {DURATION_RANGE}")

    @property
    def name(self) -> str:
        return self.log_id or f"scene_{self.seed:06d}"


def script_to_dict(script: SceneScript) -> dict:
    return {
        "seed": script.seed,
        "duration_s": script.duration_s,
        "rate_hz": script.rate_hz,
        "map_template": script.map_template,
        "log_id": script.log_id,
        "queries": [dict(q) for q in script.queries],
        "colors": dict(sorted(script.colors.items())),
        "agents": [
            {
                "id": a.agent_id,
                "category": a.category,
                "primitive": a.primitive,
                "params": a.params,
                "is_ego": a.is_ego,
                "start_s": a.start_s,
                "end_s": a.end_s,
                "confidence": a.confidence,
            }
            for a in script.agents
        ],
    }


def script_from_dict(data: dict) -> SceneScript:
    agents = tuple(
        AgentSpec(
            agent_id=str(item["id"]),
            category=item["category"],
            primitive=item["primitive"],
            params=dict(item.get("params", {})),
            is_ego=bool(item.get("is_ego", False)),
            start_s=float(item.get("start_s", 0.0)),
            end_s=item.get("end_s"),
            confidence=float(item.get("confidence", 1.0)),
        )
        for item in data["agents"]
    )
    return SceneScript(
        seed=int(data["seed"]),
        duration_s=float(data["duration_s"]),
        rate_hz=int(data["rate_hz"]),
        map_template=data["map_template"],
        agents=agents,
        colors=dict(data.get("colors", {})),
        queries=tuple(data.get("queries", ())),
        log_id=data.get("log_id", ""),
    )


def load_script(path) -> SceneScript:
    with open(path, "r", encoding="utf-8") as fh:
        return script_from_dict(json.load(fh))


def save_script(script: SceneScript, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(script_to_dict(script), fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# motion primitives

def _chain_centerline(hd_map: HDMap, lane_ids) -> np.ndarray:
    points = []
    for lane_id in lane_ids:
        line = hd_map.lanes[lane_id].centerline
        if points and np.allclose(points[-1], line[0]):
            points.extend(line[1:].tolist())
        else:
            points.extend(line.tolist())
    return np.asarray(points)


def _along_polyline(line: np.ndarray, s: float) -> tuple[float, float, float]:
    """(x, y, yaw) at arclength s, clamped to the polyline span."""
    seg = np.sqrt(((line[1:] - line[:-1]) ** 2).sum(axis=1))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = min(max(s, 0.0), float(cum[-1]))
    i = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1))
    frac = (s - cum[i]) / seg[i] if seg[i] > 0 else 0.0
    p = line[i] + frac * (line[i + 1] - line[i])
    d = line[i + 1] - line[i]
    return float(p[0]), float(p[1]), math.atan2(d[1], d[0])


def _sample_agent(agent: AgentSpec, hd_map: HDMap, times_s: np.ndarray):
    """(positions (N,2), yaws (N,)) for the agent at the given times."""
    p = agent.params
    n = len(times_s)
    if agent.primitive == "hold":
        xy = np.tile([p["x"], p["y"]], (n, 1)).astype(np.float64)
        yaw = np.full(n, float(p.get("yaw", 0.0)))
        return xy, yaw
    if agent.primitive in ("line", "crossing"):
        heading = float(p["yaw"])
        speed = float(p.get("speed", 1.5 if agent.primitive == "crossing" else 10.0))
        accel = float(p.get("accel", 0.0))
        dist = speed * times_s + 0.5 * accel * times_s**2
        xy = np.column_stack(
            [p["x"] + dist * math.cos(heading), p["y"] + dist * math.sin(heading)]
        )
        return xy, np.full(n, heading)
    if agent.primitive == "arc":
        radius = float(p["radius"])
        rate = float(p["angular_rate"])  # rad/s, positive = counterclockwise
        theta = float(p["start_angle"]) + rate * times_s
        xy = np.column_stack(
            [p["cx"] + radius * np.cos(theta), p["cy"] + radius * np.sin(theta)]
        )
        yaw = theta + (math.pi / 2.0 if rate >= 0 else -math.pi / 2.0)
        return xy, normalize_yaw(yaw)
    if agent.primitive == "lane_follow":
        line = _chain_centerline(hd_map, p["lane_ids"])
        speed = float(p.get("speed", 8.0))
        s0 = float(p.get("s0", 0.0))
        offset = float(p.get("offset", 0.0))
        out = np.empty((n, 2))
        yaw = np.empty(n)
        for i, t in enumerate(times_s):
            x, y, psi = _along_polyline(line, s0 + speed * t)
            out[i] = (x - offset * math.sin(psi), y + offset * math.cos(psi))
            yaw[i] = psi
        return out, yaw
    if agent.primitive == "lane_change":
        from_line = hd_map.lanes[p["from_lane"]].centerline
        to_line = hd_map.lanes[p["to_lane"]].centerline
        speed = float(p.get("speed", 8.0))
        s0 = float(p.get("s0", 0.0))
        t0 = float(p["change_start_s"])
        dur = float(p["change_duration_s"])
        out = np.empty((n, 2))
        for i, t in enumerate(times_s):
            s = s0 + speed * t
            xa, ya, _ = _along_polyline(from_line, s)
            xb, yb, _ = _along_polyline(to_line, s)
            u = min(max((t - t0) / dur, 0.0), 1.0)
            f = 0.5 * (1.0 - math.cos(math.pi * u))
            out[i] = ((1 - f) * xa + f * xb, (1 - f) * ya + f * yb)
        # yaw from the sampled path tangent
        yaw = np.empty(n)
        for i in range(n):
            j = min(i + 1, n - 1)
            k = max(j - 1, 0)
            d = out[j] - out[k]
            yaw[i] = math.atan2(d[1], d[0]) if (d != 0).any() else 0.0
        return out, yaw
    raise AssertionError(agent.primitive)


def generate_scene(script: SceneScript) -> LogBundle:
    """Expand a script into a city-frame LogBundle (ego track included)."""
    hd_map = build_template(script.map_template)
    dt_ns = int(round(1e9 / script.rate_hz))
    total = int(round(script.duration_s * script.rate_hz)) + 1
    all_ts = BASE_TIMESTAMP_NS + dt_ns * np.arange(total, dtype=np.int64)
    times_s = (all_ts - all_ts[0]).astype(np.float64) / 1e9

    ego_agents = [a for a in script.agents if a.is_ego]
    if len(ego_agents) > 1:
        raise ValueError("at most one agent may be the ego vehicle")

    if ego_agents:
        exy, eyaw = _sample_agent(ego_agents[0], hd_map, times_s)
    else:
        exy = np.zeros((total, 2))
        eyaw = np.zeros(total)
    poses = [
        EgoPose(
            timestamp=int(all_ts[i]),
            translation=[exy[i, 0], exy[i, 1], 0.0],
            rotation=[math.cos(eyaw[i] / 2.0), 0.0, 0.0, math.sin(eyaw[i] / 2.0)],
        )
        for i in range(total)
    ]

    tracks = []
    for agent in script.agents:
        if agent.is_ego:
            continue
        end_s = script.duration_s if agent.end_s is None else float(agent.end_s)
        mask = (times_s >= agent.start_s - 1e-9) & (times_s <= end_s + 1e-9)
        ts = all_ts[mask]
        local = times_s[mask] - times_s[mask][0]
        xy, yaw = _sample_agent(agent, hd_map, local)
        size = AGENT_SIZES.get(agent.category, DEFAULT_SIZE)
        z = size[2] / 2.0
        tracks.append(
            Track(
                track_id=agent.agent_id,
                category=agent.category,
                timestamps=ts,
                translations=np.column_stack([xy, np.full(len(ts), z)]),
                yaws=yaw,
                sizes=np.tile(size, (len(ts), 1)),
                confidences=np.full(len(ts), agent.confidence),
            )
        )

    ego_track = to_city_frame(inject_ego_track([], poses), poses)[0]
    tracks.append(ego_track)
    return LogBundle(
        log_id=script.name,
        tracks=tracks,
        ego=poses,
        hd_map=hd_map,
        colors=dict(script.colors),
    )


def save_scene(script: SceneScript, out_dir) -> Path:
    """Write the bundle files (tracks.csv in ego frame, poses.csv, map.json,
    colors.csv, script.json) for one scene; returns the scene directory."""
    bundle = generate_scene(script)
    scene_dir = Path(out_dir) / script.name
    scene_dir.mkdir(parents=True, exist_ok=True)
    non_ego = [t for t in bundle.tracks if t.track_id != "ego"]
    save_tracks(to_ego_frame(non_ego, bundle.ego), scene_dir / "tracks.csv")
    save_poses(bundle.ego, scene_dir / "poses.csv")
    save_map(bundle.hd_map, scene_dir / "map.json")
    save_colors(bundle.colors, scene_dir / "colors.csv")
    save_script(script, scene_dir / "script.json")
    return scene_dir


# ---------------------------------------------------------------------------
# randomized scenes

_RANDOM_CATEGORIES = (
    "REGULAR_VEHICLE",
    "REGULAR_VEHICLE",
    "PEDESTRIAN",
    "PEDESTRIAN",
    "BICYCLIST",
    "BUS",
    "TRUCK",
    "MOTORCYCLE",
    "DOG",
    "CONSTRUCTION_CONE",
)

_COLOR_POOL = ("white", "silver", "black", "red", "yellow", "blue", "unknown")


def random_script(seed: int, max_agents: int = 9, rate_hz: int = 2) -> SceneScript:
    """A seeded random scene: 2..max_agents agents with continuous-random
    parameters (positions jittered so nothing ever sits exactly on a lane
    boundary or threshold)."""
    rng = np.random.default_rng(np.random.PCG64(seed))
    template = "straight" if rng.random() < 0.5 else "intersection"
    duration = float(rng.uniform(5.0, 20.0 if rate_hz == 2 else 5.0))
    n_agents = int(rng.integers(2, max_agents + 1))
    agents = []
    colors = {}

    def jitter():
        return float(rng.uniform(-0.31, 0.31))

    if template == "straight":
        lane_ys = {"st.f1": 1.85, "st.f2": 5.55, "st.o1": -1.85, "st.b1": 8.3}
        lane_dirs = {"st.f1": 0.0, "st.f2": 0.0, "st.o1": math.pi, "st.b1": 0.0}
        neighbor_pairs = [("st.f1", "st.f2"), ("st.f2", "st.f1")]
    else:
        lane_ys = None
        approaches = {
            "ix.e.app": ((-80.0, -1.85), 0.0),
            "ix.w.app": ((80.0, 1.85), math.pi),
            "ix.n.app": ((1.85, -80.0), math.pi / 2.0),
            "ix.s.app": ((-1.85, 80.0), -math.pi / 2.0),
        }
        neighbor_pairs = []

    for i in range(n_agents):
        aid = f"a{i:02d}"
        category = str(rng.choice(_RANDOM_CATEGORIES))
        kind = float(rng.random())
        if template == "straight":
            lane = str(rng.choice(list(lane_ys)))
            base_x = float(rng.uniform(0.0, 160.0))
            base_y = lane_ys[lane] + jitter()
            heading = lane_dirs[lane]
        else:
            lane, ((bx, by), heading) = list(approaches.items())[int(rng.integers(0, 4))]
            if heading in (0.0, math.pi):
                base_x, base_y = float(rng.uniform(-70, 70)), by + jitter()
            else:
                base_x, base_y = bx + jitter(), float(rng.uniform(-70, 70))
        if kind < 0.2:
            agents.append(AgentSpec(aid, category, "hold", {"x": base_x, "y": base_y, "yaw": heading + jitter()}))
        elif kind < 0.45:
            speed = float(rng.uniform(0.7, 13.0))
            accel = float(rng.uniform(-2.5, 2.5)) if rng.random() < 0.5 else 0.0
            agents.append(
                AgentSpec(
                    aid,
                    category,
                    "line",
                    {"x": base_x, "y": base_y, "yaw": heading + jitter(), "speed": speed, "accel": accel},
                )
            )
        elif kind < 0.6:
            radius = float(rng.uniform(8.0, 40.0))
            rate = float(rng.uniform(0.08, 0.45)) * (1.0 if rng.random() < 0.5 else -1.0)
            agents.append(
                AgentSpec(
                    aid,
                    category,
                    "arc",
                    {
                        "cx": base_x,
                        "cy": base_y + radius,
                        "radius": radius,
                        "start_angle": float(rng.uniform(-math.pi, math.pi)),
                        "angular_rate": rate,
                    },
                )
            )
        elif kind < 0.75 and neighbor_pairs:
            frm, to = neighbor_pairs[int(rng.integers(0, len(neighbor_pairs)))]
            agents.append(
                AgentSpec(
                    aid,
                    category,
                    "lane_change",
                    {
                        "from_lane": frm,
                        "to_lane": to,
                        "s0": float(rng.uniform(10.0, 60.0)),
                        "speed": float(rng.uniform(5.0, 12.0)),
                        "change_start_s": float(rng.uniform(0.5, max(0.6, duration / 2))),
                        "change_duration_s": float(rng.uniform(1.3, 3.1)),
                    },
                )
            )
        elif kind < 0.9:
            walk_yaw = float(rng.uniform(-math.pi, math.pi))
            agents.append(
                AgentSpec(
                    aid,
                    "PEDESTRIAN" if rng.random() < 0.6 else category,
                    "crossing",
                    {"x": base_x, "y": base_y, "yaw": walk_yaw, "speed": float(rng.uniform(0.8, 2.3))},
                )
            )
        else:
            lane_ids = (
                [lane]
                if template == "straight"
                else [lane, lane.replace(".app", ".mid"), lane.replace(".app", ".out")]
            )
            agents.append(
                AgentSpec(
                    aid,
                    category,
                    "lane_follow",
                    {
                        "lane_ids": lane_ids,
                        "s0": float(rng.uniform(0.0, 40.0)),
                        "speed": float(rng.uniform(2.0, 12.0)),
                        "offset": jitter() * 0.5,
                    },
                )
            )
        if rng.random() < 0.6:
            colors[aid] = str(rng.choice(_COLOR_POOL))

    # ego: parked off to the side or following a lane
    if rng.random() < 0.5:
        agents.append(
            AgentSpec(
                "ego_agent",
                "EGO_VEHICLE",
                "hold",
                {"x": float(rng.uniform(-10, 60)), "y": float(rng.uniform(-40.0, -20.0)), "yaw": jitter()},
                is_ego=True,
            )
        )
    else:
        lane_ids = ["st.f1"] if template == "straight" else ["ix.e.app", "ix.e.mid", "ix.e.out"]
        agents.append(
            AgentSpec(
                "ego_agent",
                "EGO_VEHICLE",
                "lane_follow",
                {"lane_ids": lane_ids, "s0": float(rng.uniform(0.0, 30.0)), "speed": float(rng.uniform(3.0, 11.0)), "offset": jitter() * 0.4},
                is_ego=True,
            )
        )
    return SceneScript(
        seed=seed,
        duration_s=duration,
        rate_hz=rate_hz,
        map_template=template,
        agents=tuple(agents),
        colors=colors,
        log_id=f"scene_{seed:06d}",
    )
