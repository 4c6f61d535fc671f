import pytest

from scenariomine.context import LogContext
from scenariomine.synthgen import OracleScene, generate_scene, s1_script, s2_script


@pytest.fixture(scope="session")
def s1_bundle():
    return generate_scene(s1_script())


@pytest.fixture(scope="session")
def s2_bundle():
    return generate_scene(s2_script())


@pytest.fixture(scope="session")
def s1_ctx(s1_bundle):
    return LogContext(s1_bundle)


@pytest.fixture(scope="session")
def s2_ctx(s2_bundle):
    return LogContext(s2_bundle)


@pytest.fixture(scope="session")
def s1_oracle(s1_bundle):
    return OracleScene(s1_bundle)


@pytest.fixture(scope="session")
def s2_oracle(s2_bundle):
    return OracleScene(s2_bundle)
