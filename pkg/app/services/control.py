"""Consensus control law, adaptive updates and Lyapunov diagnostics."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from app.errors import DimensionMismatchError, UncertifiedStackError
from app.models.results import RateCertificate
from app.models.scenario import CLSource, UpdateMode
from app.numerics.graph import UndirectedGraph, algebraic_connectivity, laplacian
from app.numerics.linalg import as_matrix, eig_symmetric, kron, require_square, spectral_norm_psd
from app.numerics.quantize import QuantizerConfig, transmitted
from app.regressors.base import RegressorInterface
from app.services.history import HistoryStack, condition1_certificate

GraphLike = Union[UndirectedGraph, np.ndarray]


@dataclass(frozen=True)
class AgentModel:
    """x_i' = A x_i + B (u_i + Phi_i(t, x_i) theta_i)."""

    A: np.ndarray
    B: np.ndarray
    phi: RegressorInterface
    theta: np.ndarray


@dataclass(frozen=True)
class SwarmModel:
    """Identical (A, B) for every agent, with per-agent regressors and true parameters."""

    A: np.ndarray
    B: np.ndarray
    regressors: Tuple[RegressorInterface, ...]
    theta_true: np.ndarray

    def __post_init__(self):
        a = require_square(self.A, "A")
        b = as_matrix(self.B, "B")
        if b.shape[0] != a.shape[0]:
            raise DimensionMismatchError(f"B has {b.shape[0]} rows, A is {a.shape[0]}x{a.shape[0]}")
        theta = as_matrix(self.theta_true, "theta_true")
        regressors = tuple(self.regressors)
        if len(regressors) != theta.shape[0]:
            raise DimensionMismatchError(
                f"{len(regressors)} regressors for {theta.shape[0]} agents"
            )
        for i, reg in enumerate(regressors):
            if reg.shape != (b.shape[1], theta.shape[1]):
                raise DimensionMismatchError(
                    f"agent {i + 1} regressor is {reg.shape}, expected ({b.shape[1]}, {theta.shape[1]})"
                )
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "theta_true", theta)
        object.__setattr__(self, "regressors", regressors)

    @property
    def n(self) -> int:
        return self.theta_true.shape[0]

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def q_in(self) -> int:
        return self.B.shape[1]

    @property
    def m(self) -> int:
        return self.theta_true.shape[1]

    def agent(self, i: int) -> AgentModel:
        return AgentModel(A=self.A, B=self.B, phi=self.regressors[i], theta=self.theta_true[i])

    def regressor_values(self, t: float, x: np.ndarray) -> np.ndarray:
        """Stacked Phi_i(t, x_i), shape (n, q_in, m)."""
        return np.stack([reg(t, x[i]) for i, reg in enumerate(self.regressors)])


@dataclass(frozen=True)
class ControllerConfig:
    alpha: float
    P: np.ndarray
    K: np.ndarray
    update_mode: UpdateMode = UpdateMode.CONCURRENT_LEARNING
    cl_source: CLSource = CLSource.ORACLE
    quantizer: QuantizerConfig = field(default_factory=QuantizerConfig)
    theorem_grade: bool = False

    @classmethod
    def from_riccati(cls, alpha: float, P: np.ndarray, B: np.ndarray, **kwargs) -> "ControllerConfig":
        """Feedback gain K = -B^T P."""
        P = np.asarray(P, dtype=float)
        return cls(alpha=float(alpha), P=P, K=-np.asarray(B, dtype=float).T @ P, **kwargs)


@dataclass(frozen=True)
class SwarmState:
    """Agent states x (n, p) and estimates theta_hat (n, m) at time t."""

    x: np.ndarray
    theta_hat: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        th = np.atleast_2d(np.asarray(self.theta_hat, dtype=float))
        if x.shape[0] != th.shape[0]:
            raise DimensionMismatchError(f"{x.shape[0]} agent states but {th.shape[0]} estimates")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "theta_hat", th)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def flat(self) -> np.ndarray:
        return np.concatenate([self.x.ravel(), self.theta_hat.ravel()])

    @classmethod
    def from_flat(cls, y: np.ndarray, n: int, p: int, m: int, t: float = 0.0) -> "SwarmState":
        y = np.asarray(y, dtype=float)
        if y.shape != (n * p + n * m,):
            raise DimensionMismatchError(f"flat state has shape {y.shape}, expected ({n * (p + m)},)")
        return cls(x=y[: n * p].reshape(n, p), theta_hat=y[n * p :].reshape(n, m), t=t)


@dataclass(frozen=True)
class LyapunovRate:
    """Analytic V' split into its structural parts."""

    dissipation: float
    estimator: float
    coupling_residual: float

    @property
    def total(self) -> float:
        return self.dissipation + self.estimator + self.coupling_residual


def as_laplacian(graph: GraphLike) -> np.ndarray:
    if isinstance(graph, UndirectedGraph):
        return laplacian(graph)
    return require_square(graph, "laplacian")


def disagreement(state: SwarmState, graph: GraphLike, quantizer: Optional[QuantizerConfig] = None) -> np.ndarray:
    """Row i is sum_j a_ij (x~_i - x~_j) over the transmitted states."""
    lap = as_laplacian(graph)
    if lap.shape[0] != state.n:
        raise DimensionMismatchError(f"graph has {lap.shape[0]} vertices, state has {state.n} agents")
    x_tx = transmitted(state.x, quantizer or QuantizerConfig())
    return lap @ x_tx


def control_input(
    i: int, state: SwarmState, graph: GraphLike, cfg: ControllerConfig, model: SwarmModel
) -> np.ndarray:
    """u_i = alpha K sum_j a_ij (x~_i - x~_j) - Phi_i(t, x_i) theta_hat_i."""
    e = disagreement(state, graph, cfg.quantizer)[i]
    phi = model.regressors[i](state.t, state.x[i])
    return cfg.alpha * cfg.K @ e - phi @ state.theta_hat[i]


def _inputs(e: np.ndarray, phi: np.ndarray, state: SwarmState, cfg: ControllerConfig) -> np.ndarray:
    return cfg.alpha * e @ cfg.K.T - np.einsum("iqm,im->iq", phi, state.theta_hat)


def control_inputs(
    state: SwarmState, graph: GraphLike, cfg: ControllerConfig, model: SwarmModel
) -> np.ndarray:
    """All agents' inputs at once, shape (n, q_in)."""
    e = disagreement(state, graph, cfg.quantizer)
    return _inputs(e, model.regressor_values(state.t, state.x), state, cfg)


def update_baseline(
    i: int, state: SwarmState, graph: GraphLike, cfg: ControllerConfig, model: SwarmModel
) -> np.ndarray:
    """theta_hat_i' = Phi_i^T B^T P sum_j a_ij (x~_i - x~_j)."""
    e = disagreement(state, graph, cfg.quantizer)[i]
    phi = model.regressors[i](state.t, state.x[i])
    return phi.T @ (model.B.T @ cfg.P @ e)


def _cl_correction(
    theta_hat_i: np.ndarray, theta_i: np.ndarray, stack: Optional[HistoryStack], source: CLSource
) -> np.ndarray:
    """-(G theta_hat - G theta), with G theta replaced by the stored sum in reconstructed mode."""
    if stack is None or not stack.records:
        return np.zeros_like(theta_hat_i)
    target = stack.gram @ theta_i if source == CLSource.ORACLE else stack.phi_theta_sum
    return -(stack.gram @ theta_hat_i - target)


def update_concurrent_learning(
    i: int,
    state: SwarmState,
    graph: GraphLike,
    cfg: ControllerConfig,
    model: SwarmModel,
    stack: Optional[HistoryStack],
) -> np.ndarray:
    if cfg.theorem_grade and (stack is None or not stack.records):
        raise UncertifiedStackError(f"agent {i + 1} has an empty history stack", [0.0])
    base = update_baseline(i, state, graph, cfg, model)
    return base + _cl_correction(state.theta_hat[i], model.theta_true[i], stack, cfg.cl_source)


def closed_loop_rhs(
    state: SwarmState,
    model: SwarmModel,
    graph: GraphLike,
    cfg: ControllerConfig,
    stacks: Optional[Sequence[HistoryStack]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """(x', theta_hat') for all agents; vectorized composition of the per-agent laws."""
    e = disagreement(state, graph, cfg.quantizer)
    phi = model.regressor_values(state.t, state.x)

    u = _inputs(e, phi, state, cfg)
    matched = np.einsum("iqm,im->iq", phi, model.theta_true)
    x_dot = state.x @ model.A.T + (u + matched) @ model.B.T

    theta_dot = np.einsum("iqm,iq->im", phi, e @ cfg.P @ model.B)
    if cfg.update_mode == UpdateMode.CONCURRENT_LEARNING:
        for i in range(state.n):
            stack = stacks[i] if stacks is not None else None
            if cfg.theorem_grade and (stack is None or not stack.records):
                raise UncertifiedStackError(f"agent {i + 1} has an empty history stack", [0.0])
            theta_dot[i] += _cl_correction(
                state.theta_hat[i], model.theta_true[i], stack, cfg.cl_source
            )
    return x_dot, theta_dot


def error_form_rhs(
    state: SwarmState,
    model: SwarmModel,
    graph: GraphLike,
    cfg: ControllerConfig,
    stacks: Optional[Sequence[HistoryStack]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Stacked form x' = (I kron A) x + alpha (L kron BK) x - (I kron B) Phi theta_tilde.

    Unquantized, oracle estimator error only; used as an identity check on
    closed_loop_rhs.
    """
    lap = as_laplacian(graph)
    n, p, q_in = model.n, model.p, model.q_in
    x = state.x.ravel()
    theta_tilde = state.theta_hat - model.theta_true
    phi = model.regressor_values(state.t, state.x)

    w = np.einsum("iqm,im->iq", phi, theta_tilde).ravel()
    x_dot = (
        kron(np.eye(n), model.A) @ x
        + cfg.alpha * kron(lap, model.B @ cfg.K) @ x
        - kron(np.eye(n), model.B) @ w
    )

    v = (kron(lap, model.B.T @ cfg.P) @ x).reshape(n, q_in)
    theta_dot = np.einsum("iqm,iq->im", phi, v)
    if cfg.update_mode == UpdateMode.CONCURRENT_LEARNING and stacks is not None:
        for i, stack in enumerate(stacks):
            if stack.records:
                theta_dot[i] -= stack.gram @ theta_tilde[i]
    return x_dot.reshape(n, p), theta_dot


def lyapunov_value(state: SwarmState, graph: GraphLike, P: np.ndarray, theta_true: np.ndarray) -> float:
    """V = x^T (L kron P) x + 1/2 sum_i |theta_hat_i - theta_i|^2."""
    lap = as_laplacian(graph)
    x = state.x.ravel()
    theta_tilde = state.theta_hat - np.asarray(theta_true, dtype=float).reshape(state.theta_hat.shape)
    return float(x @ kron(lap, P) @ x + 0.5 * np.sum(theta_tilde**2))


def lyapunov_rate(
    state: SwarmState,
    model: SwarmModel,
    graph: GraphLike,
    cfg: ControllerConfig,
    stacks: Optional[Sequence[HistoryStack]] = None,
    Q: Optional[np.ndarray] = None,
) -> LyapunovRate:
    """Analytic V' along the unquantized closed loop.

    dissipation       = -x^T (L kron Q) x - x^T ((2 alpha L^2 - L) kron P B B^T P) x
    estimator         = sum_i theta_tilde_i^T (concurrent-learning correction)_i
    coupling_residual = -sum_i e_i^T P B Phi_i theta_tilde_i, e = L x
    """
    lap = as_laplacian(graph)
    p = model.p
    Q = np.eye(p) if Q is None else np.asarray(Q, dtype=float)
    x = state.x.ravel()
    pbbp = cfg.P @ model.B @ model.B.T @ cfg.P
    dissipation = -(
        x @ kron(lap, Q) @ x + x @ kron(2.0 * cfg.alpha * lap @ lap - lap, pbbp) @ x
    )

    theta_tilde = state.theta_hat - model.theta_true
    phi = model.regressor_values(state.t, state.x)
    e = lap @ state.x
    w = np.einsum("iqm,im->iq", phi, theta_tilde)
    coupling = -float(np.sum((e @ cfg.P @ model.B) * w))

    estimator = 0.0
    if cfg.update_mode == UpdateMode.CONCURRENT_LEARNING and stacks is not None:
        for i, stack in enumerate(stacks):
            corr = _cl_correction(state.theta_hat[i], model.theta_true[i], stack, cfg.cl_source)
            estimator += float(theta_tilde[i] @ corr)

    return LyapunovRate(
        dissipation=float(dissipation), estimator=estimator, coupling_residual=coupling
    )


def consensus_error(state: Union[SwarmState, np.ndarray]) -> float:
    """Sum over ordered pairs (i, j) of |x_i - x_j|^2."""
    x = state.x if isinstance(state, SwarmState) else np.atleast_2d(np.asarray(state, dtype=float))
    diff = x[:, None, :] - x[None, :, :]
    return float(np.sum(diff**2))


def consensus_projection(state: Union[SwarmState, np.ndarray]) -> np.ndarray:
    """x - x_bar, the component orthogonal to agreement."""
    x = state.x if isinstance(state, SwarmState) else np.atleast_2d(np.asarray(state, dtype=float))
    return x - x.mean(axis=0, keepdims=True)


def rate_certificate(
    graph: GraphLike,
    P: np.ndarray,
    B: np.ndarray,
    alpha: float,
    sigma: float,
    stacks: Sequence[HistoryStack],
    warn: bool = True,
) -> RateCertificate:
    """Decay rates and quantization offset for the current stacks."""
    lap = as_laplacian(graph)
    P = np.asarray(P, dtype=float)
    B = np.asarray(B, dtype=float)

    lambda2 = algebraic_connectivity(lap)
    lambda_max_l = eig_symmetric(lap).max
    lambda_max_p = eig_symmetric(P).max
    c = lambda_max_l * lambda_max_p
    gamma = lambda2 / c

    certs = [condition1_certificate(stack) for stack in stacks]
    q_values = [q for _, q in certs]
    satisfied = bool(certs) and all(ok for ok, _ in certs)
    q = min(q_values) if q_values else 0.0
    if not satisfied and warn:
        logger.warning(f"Rank condition not certified for every agent; q = {q:.3e}")

    decay_u = min(gamma, q)
    decay_q = min(gamma / 2.0, q)
    d = spectral_norm_psd(kron(lap @ lap, P @ B @ B.T @ P))
    j = alpha**2 * d**2 / lambda2
    if sigma == 0.0:
        offset = 0.0
    elif decay_q > 0.0:
        offset = j * sigma**2 / decay_q
    else:
        offset = float("inf")

    return RateCertificate(
        lambda2=lambda2,
        lambda_max_L=lambda_max_l,
        lambda_max_P=lambda_max_p,
        C=c,
        gamma=gamma,
        q=q,
        q_per_agent=q_values,
        condition1_satisfied=satisfied,
        decay_unquantized=decay_u,
        decay_quantized=decay_q,
        D=d,
        J=j,
        sigma=float(sigma),
        offset=offset,
    )


def require_certified(certificate: RateCertificate):
    if not certificate.condition1_satisfied:
        raise UncertifiedStackError(
            f"rank condition fails (min q = {certificate.q:.3e})", certificate.q_per_agent
        )


__all__: List[str] = [
    "AgentModel",
    "SwarmModel",
    "ControllerConfig",
    "SwarmState",
    "LyapunovRate",
    "disagreement",
    "control_input",
    "control_inputs",
    "update_baseline",
    "update_concurrent_learning",
    "closed_loop_rhs",
    "error_form_rhs",
    "lyapunov_value",
    "lyapunov_rate",
    "consensus_error",
    "consensus_projection",
    "rate_certificate",
    "require_certified",
]
