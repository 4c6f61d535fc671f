"""Oracle-labeled ground truth for scene scripts.

A query is a plain dict: {"name": <description>, "function": <atomic fn>,
"candidates": <category>, "related": <category or null>, "kwargs": {...}}.
Ground truth comes from the brute-force oracle, never from the engine, so
labeled bundles double as an independent target for end-to-end evaluation.
"""

from __future__ import annotations

from scenariomine.core import ScenarioSet
from scenariomine.io import LogBundle
from scenariomine.synthgen.oracle import OracleScene, oracle_evaluate


def label_scene(bundle: LogBundle, queries) -> dict[str, ScenarioSet]:
    """description -> ground-truth ScenarioSet for each labeled query."""
    scene = OracleScene(bundle)
    out: dict[str, ScenarioSet] = {}
    for query in queries:
        candidates = oracle_evaluate(
            scene, "get_objects_of_category", category=query.get("candidates", "ANY")
        )
        related = None
        if query.get("related"):
            related = oracle_evaluate(
                scene, "get_objects_of_category", category=query["related"]
            )
        result = oracle_evaluate(
            scene,
            query["function"],
            candidates=candidates,
            related=related,
            **query.get("kwargs", {}),
        )
        out[query["name"]] = result
    return out
