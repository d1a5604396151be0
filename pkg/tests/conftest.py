"""Shared scenarios and simulation logs (built once per session)."""

import json

import numpy as np
import pytest

from app.models.scenario import (
    DynamicsSection,
    ParametersSection,
    ScenarioFile,
    UpdateMode,
    ZeroPhiSpec,
)
from app.services.fixtures import (
    paper_s5_damped_scenario,
    paper_s5_scenario,
    two_agent_scenario,
)
from app.services.scenario_builder import build_scenario
from app.services.simulation import simulate


def with_controller(spec: ScenarioFile, **changes) -> ScenarioFile:
    return spec.model_copy(update={"controller": spec.controller.model_copy(update=changes)})


def write_scenario(directory, spec: ScenarioFile, name: str = "scenario.json"):
    path = directory / name
    path.write_text(spec.to_json(), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def s5_spec():
    return paper_s5_scenario()


@pytest.fixture(scope="session")
def s5(s5_spec):
    return build_scenario(s5_spec)


@pytest.fixture(scope="session")
def s5_log(s5):
    return simulate(s5)


@pytest.fixture(scope="session")
def damped():
    return build_scenario(paper_s5_damped_scenario())


@pytest.fixture(scope="session")
def damped_log(damped):
    return simulate(damped)


@pytest.fixture(scope="session")
def damped_baseline_log():
    spec = with_controller(paper_s5_damped_scenario(), update_mode=UpdateMode.BASELINE)
    return simulate(build_scenario(spec))


@pytest.fixture(scope="session")
def damped_linear_log():
    """Damped dynamics with no uncertainty at all: pure linear consensus."""
    spec = paper_s5_damped_scenario()
    zeros = [[0.0]] * 5
    spec = spec.model_copy(
        update={
            "dynamics": DynamicsSection(A=spec.dynamics.A, B=spec.dynamics.B, regressor=ZeroPhiSpec(kind="zero")),
            "parameters": ParametersSection(
                theta_true=zeros, theta_hat_init=zeros, x_init=spec.parameters.x_init, alpha=spec.parameters.alpha
            ),
        }
    )
    return simulate(build_scenario(with_controller(spec, update_mode=UpdateMode.BASELINE)))


@pytest.fixture(scope="session")
def two_agent():
    return build_scenario(two_agent_scenario())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def s5_file(tmp_path, s5_spec):
    return write_scenario(tmp_path, s5_spec)


@pytest.fixture
def two_agent_file(tmp_path):
    return write_scenario(tmp_path, two_agent_scenario())


def read_report(captured: str) -> dict:
    return json.loads(captured)
