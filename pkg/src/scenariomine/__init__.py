"""Scenario mining engine: compositional spatio-temporal predicates over 3D
object tracks, ego poses, and an HD map, plus referential-tracking metrics."""

from scenariomine.core import (
    ScenarioEntry,
    ScenarioSet,
    Track,
    TrackBox,
    reverse_relationship,
    scenario_and,
    scenario_not,
    scenario_or,
)
from scenariomine.context import LogContext
from scenariomine.hdmap import HDMap, assign_lane, distance_to_layer, lane_direction
from scenariomine.io import LogBundle, load_log_bundle
from scenariomine.kinematics import estimate_states

__version__ = "0.1.0"

__all__ = [
    "HDMap",
    "LogBundle",
    "LogContext",
    "ScenarioEntry",
    "ScenarioSet",
    "Track",
    "TrackBox",
    "assign_lane",
    "distance_to_layer",
    "estimate_states",
    "lane_direction",
    "load_log_bundle",
    "reverse_relationship",
    "scenario_and",
    "scenario_not",
    "scenario_or",
    "__version__",
]
