"""Built-in scenarios."""

from typing import Callable, Dict, List

from app.models.scenario import (
    ControllerSection,
    DynamicsSection,
    GraphSection,
    IntegratorConfig,
    PaperPhiSpec,
    ParametersSection,
    ScenarioFile,
    UpdateMode,
    ZeroPhiSpec,
)

S5_A = [
    [-0.8, 0.3, 0.2, 1.1],
    [0.4, -0.5, 1.2, 0.6],
    [0.7, 0.9, 0.2, 0.5],
    [1.3, 1.1, 0.4, -0.1],
]
S5_B = [[1.2, 0.7], [0.6, 1.3], [1.1, 1.4], [0.9, 1.2]]
S5_LAPLACIAN = [
    [2.168, -1.037, 0.0, -0.865, -0.266],
    [-1.037, 1.037, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.651, -1.651, 0.0],
    [-0.865, 0.0, -1.651, 2.863, -0.347],
    [-0.266, 0.0, 0.0, -0.347, 0.613],
]
S5_GAMMA = [0.4157, 0.4017, 0.0302, 0.1996, 0.2634]
S5_BETA = [0.3437, 0.5474, 0.5233, 0.2433, 0.3597]
S5_THETA = [[3.0], [6.0], [1.5], [5.5], [0.5]]
S5_THETA_HAT0 = [[1.0], [1.0], [3.0], [2.0], [5.0]]
S5_X0 = [
    [-6.125, 4.375, 9.875, -8.125],
    [1.0, -8.5, -2.5, 10.0],
    [-5.0, 7.5, -3.5, 1.0],
    [10.125, -3.875, -2.875, -3.375],
    [1.125, 0.125, -0.875, -0.375],
]
S5_ALPHA = 0.8019

# Published Riccati matrix for the five-agent benchmark. It does not satisfy
# the ARE for S5_A, S5_B (residual ~10.5); kept for comparison only.
S5_PRINTED_P = [
    [2.8917, -0.3741, -1.8010, 1.2765],
    [-0.3741, 0.5278, 0.3487, -0.0738],
    [-1.8010, 0.3487, 2.1217, -1.0746],
    [1.27656, -0.0738, -1.0746, 1.1882],
]


def paper_s5_scenario() -> ScenarioFile:
    """Five agents, p = 4, q_in = 2, m = 1, concurrent learning with oracle targets.

    The open-loop A is unstable (spectral abscissa ~1.9), so the horizon is
    kept to 4 s where h = 1e-3 stays accurate.
    """
    return ScenarioFile(
        name="paper-s5",
        graph=GraphSection(n=5, laplacian=S5_LAPLACIAN),
        dynamics=DynamicsSection(
            A=S5_A, B=S5_B, regressor=PaperPhiSpec(kind="paper_phi", gamma=S5_GAMMA, beta=S5_BETA)
        ),
        parameters=ParametersSection(
            theta_true=S5_THETA, theta_hat_init=S5_THETA_HAT0, x_init=S5_X0, alpha=S5_ALPHA
        ),
        controller=ControllerSection(),
        integrator=IntegratorConfig(step_h=1e-3, t_final=4.0, sample_every=10),
    )


def paper_s5_damped_scenario() -> ScenarioFile:
    """Same data with A - 2I, which is Hurwitz; runs the full 20 s horizon."""
    spec = paper_s5_scenario()
    damped = [[a - 2.0 if r == c else a for c, a in enumerate(row)] for r, row in enumerate(S5_A)]
    return spec.model_copy(
        update={
            "name": "paper-s5-damped",
            "dynamics": spec.dynamics.model_copy(update={"A": damped}),
            "integrator": IntegratorConfig(step_h=1e-3, t_final=20.0, sample_every=10),
        }
    )


def two_agent_scenario() -> ScenarioFile:
    """Two scalar integrators approaching each other symmetrically, no uncertainty."""
    return ScenarioFile(
        name="two-agent",
        graph=GraphSection(weights=[[0.0, 1.0], [1.0, 0.0]]),
        dynamics=DynamicsSection(A=[[0.0]], B=[[1.0]], regressor=ZeroPhiSpec(kind="zero", m=1)),
        parameters=ParametersSection(
            theta_true=[[0.0], [0.0]], theta_hat_init=[[0.0], [0.0]], x_init=[[-100.0], [100.0]], alpha=1.0
        ),
        controller=ControllerSection(update_mode=UpdateMode.BASELINE),
        integrator=IntegratorConfig(step_h=1e-3, t_final=10.0, sample_every=10),
    )


FIXTURES: Dict[str, Callable[[], ScenarioFile]] = {
    "paper-s5": paper_s5_scenario,
    "paper-s5-damped": paper_s5_damped_scenario,
    "two-agent": two_agent_scenario,
}


def fixture_names() -> List[str]:
    return sorted(FIXTURES)


def get_fixture(name: str) -> ScenarioFile:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValueError(f"Unknown fixture: {name} (choose from {', '.join(fixture_names())})") from None
