"""Turn a parsed scenario file into runtime numerics."""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from loguru import logger

from app.errors import DimensionMismatchError
from app.models.scenario import IntegratorConfig, ScenarioFile
from app.numerics.graph import (
    AlphaCertificate,
    UndirectedGraph,
    algebraic_connectivity,
    alpha_certificate,
    laplacian,
)
from app.numerics.linalg import as_matrix, frobenius_norm, riccati_residual, solve_care
from app.numerics.quantize import QuantizerConfig
from app.regressors import get_regressor
from app.services.control import ControllerConfig, SwarmModel, SwarmState

ARE_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class Scenario:
    """Everything a simulation needs, validated and with P solved."""

    name: str
    graph: UndirectedGraph
    laplacian: np.ndarray
    model: SwarmModel
    controller: ControllerConfig
    integrator: IntegratorConfig
    x0: np.ndarray
    theta_hat0: np.ndarray
    Q: np.ndarray
    capacity: int
    t_record: float
    eps_add: float
    rank_tol: float
    lambda2: float
    are_residual: float
    alpha_check: AlphaCertificate
    seed: int = 0

    def initial_state(self) -> SwarmState:
        return SwarmState(x=self.x0.copy(), theta_hat=self.theta_hat0.copy(), t=0.0)

    def with_sigma(self, sigma: float) -> "Scenario":
        controller = replace(self.controller, quantizer=QuantizerConfig(sigma=sigma))
        return replace(self, controller=controller, name=f"{self.name}[sigma={sigma:g}]")

    def with_integrator(self, **changes) -> "Scenario":
        integrator = IntegratorConfig(**{**self.integrator.model_dump(), **changes})
        return replace(self, integrator=integrator)


def build_graph(spec: ScenarioFile) -> UndirectedGraph:
    section = spec.graph
    if section.weights is not None:
        g = UndirectedGraph(np.array(section.weights, dtype=float))
    elif section.edges is not None:
        pairs = [(e.i - 1, e.j - 1) for e in section.edges]
        g = UndirectedGraph.from_edges(section.n, pairs, [e.weight for e in section.edges])
    else:
        g = UndirectedGraph.from_laplacian(np.array(section.laplacian, dtype=float))
    if section.n is not None and section.n != g.n:
        raise DimensionMismatchError(f"graph declares n = {section.n} but has {g.n} vertices")
    return g


def _shaped(values, shape, name: str) -> np.ndarray:
    arr = as_matrix(values, name)
    if arr.shape != shape:
        raise DimensionMismatchError(f"{name} is {arr.shape}, expected {shape}")
    return arr


def build_scenario(spec: ScenarioFile, P: Optional[np.ndarray] = None) -> Scenario:
    """Validate dimensions, check connectivity, solve the ARE and resolve alpha.

    A precomputed P may be passed to skip the Riccati solve.
    """
    graph = build_graph(spec)
    lap = laplacian(graph)
    n = graph.n

    lambda2 = algebraic_connectivity(lap)
    logger.info(f"✓ Graph connected: n = {n}, lambda2 = {lambda2:.6g}")

    A = as_matrix(spec.dynamics.A, "A")
    B = as_matrix(spec.dynamics.B, "B")
    p, q_in = B.shape
    if A.shape != (p, p):
        raise DimensionMismatchError(f"A is {A.shape}, B is {B.shape}")
    Q = np.eye(p) if spec.parameters.Q is None else _shaped(spec.parameters.Q, (p, p), "Q")

    theta_true = as_matrix(spec.parameters.theta_true, "theta_true")
    if theta_true.shape[0] != n:
        raise DimensionMismatchError(f"theta_true has {theta_true.shape[0]} rows for {n} agents")
    m = theta_true.shape[1]
    theta_hat0 = _shaped(spec.parameters.theta_hat_init, (n, m), "theta_hat_init")
    x0 = _shaped(spec.parameters.x_init, (n, p), "x_init")

    reg = spec.dynamics.regressor
    if reg.kind == "paper_phi" and (len(reg.gamma) != n or len(reg.beta) != n):
        raise DimensionMismatchError(f"paper_phi needs {n} gamma and beta values")
    regressors = tuple(get_regressor(reg, i, p, q_in) for i in range(n))
    model = SwarmModel(A=A, B=B, regressors=regressors, theta_true=theta_true)

    if P is None:
        P = solve_care(A, B, Q)
    residual = frobenius_norm(riccati_residual(A, B, Q, P))
    logger.info(f"✓ Riccati solution found (residual {residual:.3e})")

    alpha = spec.parameters.alpha
    if alpha == "auto":
        alpha = 1.0 / (2.0 * lambda2)
        logger.info(f"alpha resolved to 1/(2 lambda2) = {alpha:.6g}")
    check = alpha_certificate(lap, float(alpha))
    if check.passed:
        logger.info(f"✓ alpha = {alpha:g} meets bound {check.alpha_bound:.6g}")
    else:
        logger.warning(
            f"✗ alpha = {alpha:g} below bound {check.alpha_bound:.6g} "
            f"(min eigenvalue of 2 alpha L^2 - L = {check.min_eigenvalue:.3e}); running anyway"
        )

    ctl = spec.controller
    controller = ControllerConfig.from_riccati(
        alpha,
        P,
        B,
        update_mode=ctl.update_mode,
        cl_source=ctl.cl_source,
        quantizer=QuantizerConfig(sigma=ctl.sigma),
        theorem_grade=ctl.theorem_grade,
    )

    return Scenario(
        name=spec.name,
        graph=graph,
        laplacian=lap,
        model=model,
        controller=controller,
        integrator=spec.integrator,
        x0=x0,
        theta_hat0=theta_hat0,
        Q=Q,
        capacity=ctl.r,
        t_record=ctl.t_record,
        eps_add=ctl.eps_add,
        rank_tol=ctl.rank_tol,
        lambda2=lambda2,
        are_residual=residual,
        alpha_check=check,
        seed=spec.seed,
    )

