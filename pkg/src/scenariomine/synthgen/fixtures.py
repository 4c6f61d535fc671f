"""Frozen fixture scenes used across the test suite.

S1: straight two-lane road; a same-lane convoy (T_A behind T_B) at 10 m/s,
an oncoming vehicle T_D, and a stationary off-road pedestrian T_C.

S2: intersection; a vehicle V stopped just before the west crosswalk (3 m
from its edge, in a stop-controlled lane) and a pedestrian P walking north
across V's forward midplane while initially heading almost straight at V.

These scripts are frozen: the expected values asserted elsewhere in the test
suite were computed against exactly this geometry.
"""

from __future__ import annotations

import math

from scenariomine.synthgen.scenes import AgentSpec, SceneScript


def s1_script() -> SceneScript:
    agents = (
        AgentSpec("T_A", "REGULAR_VEHICLE", "line", {"x": 10.0, "y": 1.85, "yaw": 0.0, "speed": 10.0}),
        AgentSpec("T_B", "REGULAR_VEHICLE", "line", {"x": 25.0, "y": 1.85, "yaw": 0.0, "speed": 10.0}),
        AgentSpec("T_C", "PEDESTRIAN", "hold", {"x": 60.0, "y": 15.0, "yaw": 1.2}),
        AgentSpec("T_D", "REGULAR_VEHICLE", "line", {"x": 180.0, "y": -1.85, "yaw": math.pi, "speed": 10.0}),
        AgentSpec("EGO", "EGO_VEHICLE", "hold", {"x": 100.0, "y": -12.0, "yaw": 0.0}, is_ego=True),
    )
    return SceneScript(
        seed=1,
        duration_s=5.0,
        rate_hz=10,
        map_template="straight",
        agents=agents,
        colors={"T_A": "red", "T_B": "white", "T_D": "blue"},
        log_id="s1",
    )


def s2_script() -> SceneScript:
    agents = (
        AgentSpec("V", "REGULAR_VEHICLE", "hold", {"x": -9.7, "y": -1.85, "yaw": 0.0}),
        AgentSpec(
            "P",
            "PEDESTRIAN",
            "crossing",
            {"x": -7.0, "y": -8.53, "yaw": math.pi / 2.0, "speed": 1.5},
        ),
        AgentSpec("EGO", "EGO_VEHICLE", "hold", {"x": 20.0, "y": -15.0, "yaw": 0.0}, is_ego=True),
    )
    return SceneScript(
        seed=2,
        duration_s=5.0,
        rate_hz=10,
        map_template="intersection",
        agents=agents,
        colors={"V": "silver"},
        log_id="s2",
    )


FIXTURE_SCRIPTS = {"s1": s1_script, "s2": s2_script}
