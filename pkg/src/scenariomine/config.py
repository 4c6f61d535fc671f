"""Engine constants and the key-value config file format.

Config files are plain text, one ``key = value`` pair per line, ``#`` starts
a comment. Values parse as int, float, or bare string. Unknown keys are an
error so typos fail loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path


def parse_kv_file(path) -> dict[str, object]:
    out: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = _coerce(value)
    return out


def _coerce(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _from_kv(cls, path):
    values = parse_kv_file(path)
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    return replace(cls(), **values)


@dataclass(frozen=True)
class EngineConfig:
    """Tunable predicate constants (thresholds the function docs leave open)."""

    turning_threshold_rad: float = math.pi / 6.0
    turning_window_s: float = 3.0
    lane_change_dilation_s: float = 0.5
    min_moving_speed: float = 0.5  # m/s; below this an object counts as not moving
    following_heading_deg: float = 45.0
    roadside_lane_search_m: float = 10.0
    stop_sign_radius_m: float = 15.0

    @classmethod
    def from_file(cls, path) -> "EngineConfig":
        return _from_kv(cls, path)


DEFAULT_ENGINE_CONFIG = EngineConfig()


@dataclass(frozen=True)
class PostprocessConfig:
    """Pre/post-execution filter constants."""

    top_k_large: int = 200
    top_k_other: int = 100
    relationship_max_dist: float = 50.0
    min_segment_s: float = 1.5
    output_rate_hz: float = 2.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")

    @classmethod
    def from_file(cls, path) -> "PostprocessConfig":
        return _from_kv(cls, path)


# classes whose per-class track cap is top_k_large rather than top_k_other
LARGE_TOP_K_CLASSES = frozenset(
    {"REGULAR_VEHICLE", "PEDESTRIAN", "BOLLARD", "CONSTRUCTION_CONE", "CONSTRUCTION_BARREL"}
)

DEFAULT_POSTPROCESS_CONFIG = PostprocessConfig()
