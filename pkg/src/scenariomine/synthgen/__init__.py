from scenariomine.synthgen.fixtures import FIXTURE_SCRIPTS, s1_script, s2_script
from scenariomine.synthgen.labels import label_scene
from scenariomine.synthgen.oracle import OracleScene, oracle_evaluate
from scenariomine.synthgen.scenes import (
    AgentSpec,
    SceneScript,
    generate_scene,
    load_script,
    random_script,
    save_scene,
    save_script,
)
from scenariomine.synthgen.templates import build_template

__all__ = [
    "AgentSpec",
    "FIXTURE_SCRIPTS",
    "OracleScene",
    "SceneScript",
    "build_template",
    "generate_scene",
    "label_scene",
    "load_script",
    "oracle_evaluate",
    "random_script",
    "s1_script",
    "s2_script",
    "save_scene",
    "save_script",
]
