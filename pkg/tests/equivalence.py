"""Engine-vs-oracle equivalence harness.

For a seeded scene, every atomic function is evaluated twice, once by the
vectorized engine and once by the brute-force oracle, with randomized
arguments drawn from the same seed; results must match as full scenario sets
(ids, timestamps, and relationship triples).
"""

import math

import numpy as np

from scenariomine import predicates as P
from scenariomine.context import LogContext
from scenariomine.core import scenario_and, scenario_or
from scenariomine.dsl.registry import ATOMIC_FUNCTIONS
from scenariomine.synthgen import OracleScene, generate_scene, oracle_evaluate, random_script

CATEGORY_POOL = ("ANY", "VEHICLE", "REGULAR_VEHICLE", "PEDESTRIAN", "BUS", "BICYCLIST")
DIRECTIONS = ("forward", "backward", "left", "right")


def _arg_plans(rng):
    """function name -> kwargs (randomized where the signature allows)."""
    u = rng.uniform
    maybe_inf = lambda v: math.inf if rng.random() < 0.3 else float(v)
    return {
        "get_objects_of_category": {"category": str(rng.choice(CATEGORY_POOL))},
        "is_category": {"category": str(rng.choice(CATEGORY_POOL))},
        "has_velocity": {
            "min_velocity": float(u(0.0, 3.0)),
            "max_velocity": maybe_inf(u(3.0, 18.0)),
        },
        "stationary": {},
        "accelerating": {"min_accel": float(u(-2.0, 1.0)), "max_accel": maybe_inf(u(1.0, 4.0))},
        "has_lateral_acceleration": {
            "min_accel": -math.inf if rng.random() < 0.3 else float(u(-4.0, 0.5)),
            "max_accel": maybe_inf(u(0.5, 4.0)),
        },
        "turning": {"direction": [None, "left", "right"][int(rng.integers(0, 3))]},
        "changing_lanes": {"direction": [None, "left", "right"][int(rng.integers(0, 3))]},
        "facing_toward": {
            "within_angle": float(u(10.0, 179.0)),
            "max_distance": float(u(10.0, 80.0)),
        },
        "heading_toward": {
            "angle_threshold": float(u(10.0, 90.0)),
            "minimum_speed": float(u(0.2, 2.0)),
            "max_distance": maybe_inf(u(10.0, 100.0)),
        },
        "heading_in_relative_direction_to": {
            "direction": str(rng.choice(("same", "opposite", "perpendicular")))
        },
        "has_objects_in_relative_direction": {
            "direction": str(rng.choice(DIRECTIONS)),
            "min_number": int(rng.integers(0, 3)),
            "max_number": math.inf if rng.random() < 0.5 else int(rng.integers(1, 4)),
            "within_distance": float(u(5.0, 60.0)),
            "lateral_thresh": math.inf if rng.random() < 0.5 else float(u(1.0, 10.0)),
        },
        "get_objects_in_relative_direction": {
            "direction": str(rng.choice(DIRECTIONS)),
            "min_number": int(rng.integers(0, 3)),
            "max_number": math.inf if rng.random() < 0.5 else int(rng.integers(1, 4)),
            "within_distance": float(u(5.0, 60.0)),
            "lateral_thresh": math.inf if rng.random() < 0.5 else float(u(1.0, 10.0)),
        },
        "being_crossed_by": {
            "direction": str(rng.choice(DIRECTIONS)),
            "in_direction": str(rng.choice(("clockwise", "counterclockwise", "either"))),
            "forward_thresh": float(u(4.0, 20.0)),
            "lateral_thresh": float(u(2.0, 10.0)),
        },
        "near_objects": {
            "distance_thresh": float(u(3.0, 30.0)),
            "min_objects": int(rng.integers(1, 4)),
            "include_self": bool(rng.random() < 0.3),
        },
        "following": {},
        "in_same_lane": {},
        "on_relative_side_of_road": {"side": str(rng.choice(("same", "opposite")))},
        "at_pedestrian_crossing": {"within_distance": float(u(0.0, 5.0))},
        "on_lane_type": {"lane_type": str(rng.choice(("BUS", "VEHICLE", "BIKE")))},
        "near_intersection": {"threshold": float(u(0.0, 15.0))},
        "on_intersection": {},
        "at_stop_sign": {"forward_thresh": float(u(3.0, 15.0))},
        "in_drivable_area": {},
        "on_road": {},
        "is_color": {
            "color": str(rng.choice(("white", "red", "blue", "yellow", "chartreuse")))
        },
    }


RELATIONAL = {
    "facing_toward",
    "heading_toward",
    "heading_in_relative_direction_to",
    "has_objects_in_relative_direction",
    "get_objects_in_relative_direction",
    "being_crossed_by",
    "near_objects",
    "following",
    "in_same_lane",
    "on_relative_side_of_road",
}


def engine_evaluate(ctx, name, candidates=None, related=None, **kwargs):
    fn = getattr(P, name)
    if related is not None:
        return fn(ctx, candidates, related, **kwargs)
    if candidates is not None:
        return fn(ctx, candidates, **kwargs)
    return fn(ctx, **kwargs)


def compare_scene(seed: int):
    """Build the seeded scene and assert engine == oracle for every atomic
    function; returns the number of functions checked."""
    script = random_script(seed)
    bundle = generate_scene(script)
    ctx = LogContext(bundle)
    scene = OracleScene(bundle)
    rng = np.random.default_rng(np.random.PCG64(seed ^ 0x5EED))
    plans = _arg_plans(rng)

    cand_cat = str(rng.choice(CATEGORY_POOL))
    rel_cat = str(rng.choice(CATEGORY_POOL))
    engine_any = P.get_objects_of_category(ctx, "ANY")
    oracle_any = oracle_evaluate(scene, "get_objects_of_category", category="ANY")
    assert engine_any == oracle_any, f"seed {seed}: ANY mismatch"
    engine_cand = P.get_objects_of_category(ctx, cand_cat)
    oracle_cand = oracle_evaluate(scene, "get_objects_of_category", category=cand_cat)
    engine_rel = P.get_objects_of_category(ctx, rel_cat)
    oracle_rel = oracle_evaluate(scene, "get_objects_of_category", category=rel_cat)

    checked = 0
    for name, kwargs in plans.items():
        if name == "get_objects_of_category":
            got = engine_evaluate(ctx, name, **kwargs)
            want = oracle_evaluate(scene, name, **kwargs)
        elif name in RELATIONAL:
            got = engine_evaluate(ctx, name, engine_any, engine_rel, **kwargs)
            want = oracle_evaluate(scene, name, candidates=oracle_any, related=oracle_rel, **kwargs)
        else:
            got = engine_evaluate(ctx, name, engine_cand, **kwargs)
            want = oracle_evaluate(scene, name, candidates=oracle_cand, **kwargs)
        assert got == want, f"seed {seed}: {name}({kwargs}) engine != oracle"
        checked += 1

    # the two set combinators, against independently-built inputs
    e_veh = P.get_objects_of_category(ctx, "VEHICLE")
    o_veh = oracle_evaluate(scene, "get_objects_of_category", category="VEHICLE")
    e_near = P.near_objects(ctx, engine_any, engine_any)
    o_near = oracle_evaluate(scene, "near_objects", candidates=oracle_any, related=oracle_any)
    got = scenario_and([e_veh, e_near])
    want = oracle_evaluate(scene, "scenario_and", candidates=None, scenarios=[o_veh, o_near])
    assert got == want, f"seed {seed}: scenario_and mismatch"
    got = scenario_or([e_veh, e_near])
    want = oracle_evaluate(scene, "scenario_or", candidates=None, scenarios=[o_veh, o_near])
    assert got == want, f"seed {seed}: scenario_or mismatch"
    checked += 2
    assert checked == len(ATOMIC_FUNCTIONS) == 28
    return checked
