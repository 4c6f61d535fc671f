"""Callable registry: the DSL surface of the atomic functions.

Each entry declares the parameter order the programs use (including the
log_dir placeholder), defaults, enum choices, and literal range checks, plus
the engine implementation to dispatch to. The same table drives validation,
execution, and the API listing embedded in synthesis prompts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from scenariomine import predicates as P
from scenariomine.core import VALID_CATEGORIES

REQUIRED = object()

# param kinds
SCENARIO = "scenario"
SCENARIO_LIST = "scenario_list"
LOG_DIR = "log_dir"
OUTPUT_DIR = "output_dir"
NUMBER = "number"
INT = "int"
BOOL = "bool"
STRING = "string"
ENUM = "enum"


@dataclass(frozen=True)
class Param:
    name: str
    kind: str
    default: object = REQUIRED
    choices: Optional[tuple] = None

    @property
    def required(self) -> bool:
        return self.default is REQUIRED


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    params: tuple
    impl: Optional[Callable] = None
    summary: str = ""
    range_checks: tuple = field(default=())  # ((low_param, high_param), ...)

    def param(self, name: str) -> Optional[Param]:
        for p in self.params:
            if p.name == name:
                return p
        return None


def _spec(name, params, impl=None, summary="", range_checks=()):
    return FunctionSpec(name, tuple(params), impl, summary, tuple(range_checks))


_DIRECTIONS = ("forward", "backward", "left", "right")
_TURNS = ("left", "right", None)
_RELATIONS = ("same", "opposite", "perpendicular")
_CROSS = ("clockwise", "counterclockwise", "either")
_SIDES = ("same", "opposite")
_LANE_TYPES = ("BUS", "VEHICLE", "BIKE")
_CATEGORIES = tuple(sorted(VALID_CATEGORIES))

INF = math.inf

ATOMIC_FUNCTIONS: dict[str, FunctionSpec] = {
    spec.name: spec
    for spec in [
        _spec(
            "get_objects_of_category",
            [Param("log_dir", LOG_DIR), Param("category", ENUM, choices=_CATEGORIES)],
            impl=P.get_objects_of_category,
            summary="All objects of a category (accepts super-categories ANY and VEHICLE).",
        ),
        _spec(
            "is_category",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("category", ENUM, choices=_CATEGORIES),
            ],
            impl=P.is_category,
            summary="Subset of the candidates belonging to a category.",
        ),
        _spec(
            "has_velocity",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("min_velocity", NUMBER, 0.5),
                Param("max_velocity", NUMBER, INF),
            ],
            impl=P.has_velocity,
            summary="Objects with speed between the bounds in m/s (stationary "
            "objects may show up to 0.5 m/s of jitter).",
            range_checks=[("min_velocity", "max_velocity")],
        ),
        _spec(
            "stationary",
            [Param("track_candidates", SCENARIO), Param("log_dir", LOG_DIR)],
            impl=P.stationary,
            summary="Objects that moved less than 2 m over their whole observation; "
            "separates parked from active vehicles.",
        ),
        _spec(
            "accelerating",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("min_accel", NUMBER, 0.65),
                Param("max_accel", NUMBER, INF),
            ],
            impl=P.accelerating,
            summary="Objects with forward acceleration between the bounds in m/s^2; "
            "values under -1 reliably indicate braking.",
            range_checks=[("min_accel", "max_accel")],
        ),
        _spec(
            "has_lateral_acceleration",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("min_accel", NUMBER, -INF),
                Param("max_accel", NUMBER, INF),
            ],
            impl=P.has_lateral_acceleration,
            summary="Objects with lateral acceleration between the bounds; positive "
            "is to the left.",
            range_checks=[("min_accel", "max_accel")],
        ),
        _spec(
            "turning",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("direction", ENUM, None, choices=_TURNS),
            ],
            impl=P.turning,
            summary="Objects turning in the given direction (None accepts either).",
        ),
        _spec(
            "changing_lanes",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("direction", ENUM, None, choices=_TURNS),
            ],
            impl=P.changing_lanes,
            summary="Lane-change events toward the given neighbor side.",
        ),
        _spec(
            "facing_toward",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("within_angle", NUMBER, 22.5),
                Param("max_distance", NUMBER, 50.0),
            ],
            impl=P.facing_toward,
            summary="Candidates whose heading points within within_angle degrees of "
            "a related object no farther than max_distance.",
        ),
        _spec(
            "heading_toward",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("angle_threshold", NUMBER, 22.5),
                Param("minimum_speed", NUMBER, 0.5),
                Param("max_distance", NUMBER, INF),
            ],
            impl=P.heading_toward,
            summary="Candidates whose velocity vector points at a related object "
            "with enough closing speed.",
        ),
        _spec(
            "heading_in_relative_direction_to",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("direction", ENUM, choices=_RELATIONS),
            ],
            impl=P.heading_in_relative_direction_to,
            summary="Candidates traveling same (0-45 deg), perpendicular (45-135) or "
            "opposite (135-180) to the related objects' motion.",
        ),
        _spec(
            "has_objects_in_relative_direction",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("direction", ENUM, choices=_DIRECTIONS),
                Param("min_number", INT, 1),
                Param("max_number", NUMBER, INF),
                Param("within_distance", NUMBER, 50.0),
                Param("lateral_thresh", NUMBER, INF),
            ],
            impl=P.has_objects_in_relative_direction,
            summary="Candidates with at least min_number related objects in the "
            "direction; relates the max_number closest.",
        ),
        _spec(
            "get_objects_in_relative_direction",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("direction", ENUM, choices=_DIRECTIONS),
                Param("min_number", INT, 0),
                Param("max_number", NUMBER, INF),
                Param("within_distance", NUMBER, 50.0),
                Param("lateral_thresh", NUMBER, INF),
            ],
            impl=P.get_objects_in_relative_direction,
            summary="The related objects found in the direction of the candidates.",
        ),
        _spec(
            "being_crossed_by",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("direction", ENUM, "forward", choices=_DIRECTIONS),
                Param("in_direction", ENUM, "either", choices=_CROSS),
                Param("forward_thresh", NUMBER, 10.0),
                Param("lateral_thresh", NUMBER, 5.0),
            ],
            impl=P.being_crossed_by,
            summary="Candidates whose half-midplane on the given side is crossed by "
            "a related object's centroid.",
        ),
        _spec(
            "near_objects",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("distance_thresh", NUMBER, 10.0),
                Param("min_objects", INT, 1),
                Param("include_self", BOOL, False),
            ],
            impl=P.near_objects,
            summary="Candidates with at least min_objects related objects within "
            "distance_thresh meters.",
        ),
        _spec(
            "following",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
            ],
            impl=P.following,
            summary="Candidates moving behind a moving lead in the same lane and "
            "direction.",
        ),
        _spec(
            "at_pedestrian_crossing",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("within_distance", NUMBER, 1.0),
            ],
            impl=P.at_pedestrian_crossing,
            summary="Objects within within_distance meters of a pedestrian crossing "
            "(zero means inside its boundaries).",
        ),
        _spec(
            "on_lane_type",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("lane_type", ENUM, choices=_LANE_TYPES),
            ],
            impl=P.on_lane_type,
            summary="Objects on a lane of the given type.",
        ),
        _spec(
            "near_intersection",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("threshold", NUMBER, 5.0),
            ],
            impl=P.near_intersection,
            summary="Objects within threshold meters of a road intersection.",
        ),
        _spec(
            "on_intersection",
            [Param("track_candidates", SCENARIO), Param("log_dir", LOG_DIR)],
            impl=P.on_intersection,
            summary="Objects located on top of a road intersection.",
        ),
        _spec(
            "at_stop_sign",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("forward_thresh", NUMBER, 10.0),
            ],
            impl=P.at_stop_sign,
            summary="Objects in a stop-controlled lane within 15 m of the sign and "
            "within forward_thresh along its facing direction.",
        ),
        _spec(
            "in_drivable_area",
            [Param("track_candidates", SCENARIO), Param("log_dir", LOG_DIR)],
            impl=P.in_drivable_area,
            summary="Objects inside the drivable area.",
        ),
        _spec(
            "on_road",
            [Param("track_candidates", SCENARIO), Param("log_dir", LOG_DIR)],
            impl=P.on_road,
            summary="Objects on a road or bike lane (excludes parking lots and "
            "other drivable connectors).",
        ),
        _spec(
            "in_same_lane",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
            ],
            impl=P.in_same_lane,
            summary="Candidates sharing a road lane with a related object.",
        ),
        _spec(
            "on_relative_side_of_road",
            [
                Param("track_candidates", SCENARIO),
                Param("related_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("side", ENUM, choices=_SIDES),
            ],
            impl=P.on_relative_side_of_road,
            summary="Candidates on the same or opposite side of the road as the "
            "related objects.",
        ),
        _spec(
            "is_color",
            [
                Param("track_candidates", SCENARIO),
                Param("log_dir", LOG_DIR),
                Param("color", STRING),
            ],
            impl=P.is_color,
            summary="Objects matching a color attribute (white, silver, black, red, "
            "yellow, blue); other literals return all candidates.",
        ),
        _spec(
            "scenario_and",
            [Param("scenario_dicts", SCENARIO_LIST)],
            summary="Intersection: objects and timestamps present in every input "
            "scenario; relationships are merged.",
        ),
        _spec(
            "scenario_or",
            [Param("scenario_dicts", SCENARIO_LIST)],
            summary="Union: every object, timestamp, and relationship from the "
            "input scenarios.",
        ),
    ]
}

OUTPUT_FUNCTION = _spec(
    "output_scenario",
    [
        Param("scenario", SCENARIO),
        Param("description", STRING),
        Param("log_dir", LOG_DIR),
        Param("output_dir", OUTPUT_DIR),
    ],
    summary="Marks the scenario to emit in an evaluation-ready format.",
)

WRAPPERS = ("scenario_not", "reverse_relationship")

# functions a wrapper may wrap: anything whose first param is a scenario
WRAPPABLE = tuple(
    name
    for name, spec in ATOMIC_FUNCTIONS.items()
    if spec.params and spec.params[0].kind == SCENARIO
)

ALL_FUNCTIONS = dict(ATOMIC_FUNCTIONS)
ALL_FUNCTIONS[OUTPUT_FUNCTION.name] = OUTPUT_FUNCTION

PREBOUND_NAMES = ("log_dir", "output_dir", "description")


def _format_default(value) -> str:
    if value is REQUIRED:
        return ""
    if value == INF:
        return "=inf"
    if value == -INF:
        return "=-inf"
    return f"={value!r}"


def api_listing() -> str:
    """Human-readable listing of every callable, for synthesis prompts."""
    blocks = []
    for spec in list(ATOMIC_FUNCTIONS.values()) + [OUTPUT_FUNCTION]:
        args = ", ".join(f"{p.name}{_format_default(p.default)}" for p in spec.params)
        block = f"def {spec.name}({args}):\n    {spec.summary}"
        blocks.append(block)
    for wrapper in WRAPPERS:
        if wrapper == "scenario_not":
            doc = (
                "Wraps a composable function; returns the input track dict minus "
                "the wrapped function's output. Example: "
                "scenario_not(stationary)(vehicles, log_dir)."
            )
        else:
            doc = (
                "Wraps a relational function; swaps the top-level tracked objects "
                "with the related objects. Example: "
                "reverse_relationship(near_objects)(vehicles, peds, log_dir)."
            )
        blocks.append(f"def {wrapper}(func):\n    {doc}")
    return "\n\n".join(blocks)
