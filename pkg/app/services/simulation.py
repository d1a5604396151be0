"""Fixed-step RK4 integration of the closed loop with trajectory logging."""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from app.config import settings
from app.errors import NonFiniteStateError, SimulationAbortedError
from app.models.results import RateCertificate
from app.models.scenario import UpdateMode
from app.services.control import (
    SwarmState,
    closed_loop_rhs,
    consensus_error,
    control_inputs,
    lyapunov_value,
    rate_certificate,
    require_certified,
)
from app.services.history import HistoryStack
from app.services.scenario_builder import Scenario

VectorField = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: VectorField, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Classical four-stage Runge-Kutta step."""
    if not h > 0.0:
        raise ValueError(f"step size must be positive, got {h}")
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    for k in (k1, k2, k3, k4):
        if not np.all(np.isfinite(k)):
            raise NonFiniteStateError("non-finite Runge-Kutta stage", t)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    x: np.ndarray
    theta_hat: np.ndarray
    V: float
    consensus_error: float
    bound: float = math.nan


@dataclass
class TrajectoryLog:
    samples: List[TrajectorySample]
    certificate: RateCertificate
    stacks: List[HistoryStack] = field(default_factory=list)
    final_state: Optional[SwarmState] = None

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def V(self) -> np.ndarray:
        return np.array([s.V for s in self.samples])

    @property
    def consensus(self) -> np.ndarray:
        return np.array([s.consensus_error for s in self.samples])

    @property
    def bounds(self) -> np.ndarray:
        return np.array([s.bound for s in self.samples])

    @property
    def theta_hat(self) -> np.ndarray:
        """Estimates per sample, shape (samples, n, m)."""
        return np.stack([s.theta_hat for s in self.samples])

    @property
    def x(self) -> np.ndarray:
        """States per sample, shape (samples, n, p)."""
        return np.stack([s.x for s in self.samples])

    def to_dataframe(self) -> pd.DataFrame:
        """Columns t, consensus_error, V, bound, theta_hat_1.., x_1.. (agent-major)."""
        theta = self.theta_hat.reshape(len(self.samples), -1)
        x = self.x.reshape(len(self.samples), -1)
        data = {
            "t": self.times,
            "consensus_error": self.consensus,
            "V": self.V,
            "bound": self.bounds,
        }
        for k in range(theta.shape[1]):
            data[f"theta_hat_{k + 1}"] = theta[:, k]
        for k in range(x.shape[1]):
            data[f"x_{k + 1}"] = x[:, k]
        return pd.DataFrame(data)

    def steady_state(self, fraction: float = 0.1) -> Tuple[float, float]:
        """Mean consensus error and V over the final fraction of samples."""
        count = max(1, int(math.floor(fraction * len(self.samples))))
        return float(self.consensus[-count:].mean()), float(self.V[-count:].mean())


class SwarmSimulator:
    """
    Integrates (x, theta_hat) jointly for one scenario.

    History stacks are filled at every step with t <= t_record and frozen
    afterwards, so the certificate computed when the window closes holds
    for the rest of the run.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        model = scenario.model
        self.n, self.p, self.m = model.n, model.p, model.m
        self.stacks = [
            HistoryStack(
                m=self.m,
                capacity=scenario.capacity,
                eps_add=scenario.eps_add,
                rank_tol=scenario.rank_tol,
            )
            for _ in range(self.n)
        ]
        self._learning = scenario.controller.update_mode == UpdateMode.CONCURRENT_LEARNING

    def _state(self, t: float, y: np.ndarray) -> SwarmState:
        return SwarmState.from_flat(y, self.n, self.p, self.m, t)

    def field(self, t: float, y: np.ndarray) -> np.ndarray:
        sc = self.scenario
        x_dot, theta_dot = closed_loop_rhs(
            self._state(t, y), sc.model, sc.laplacian, sc.controller, self.stacks
        )
        return np.concatenate([x_dot.ravel(), theta_dot.ravel()])

    def _record(self, t: float, y: np.ndarray):
        sc = self.scenario
        state = self._state(t, y)
        model = sc.model
        u = control_inputs(state, sc.laplacian, sc.controller, model)
        matched = np.einsum("iqm,im->iq", model.regressor_values(t, state.x), model.theta_true)
        x_dot = state.x @ model.A.T + (u + matched) @ model.B.T
        for i, stack in enumerate(self.stacks):
            stack.offer(t, state.x[i], u[i], x_dot[i], sc.model.agent(i), sc.controller.cl_source)

    def certificate(self) -> RateCertificate:
        sc = self.scenario
        return rate_certificate(
            sc.laplacian,
            sc.controller.P,
            sc.model.B,
            sc.controller.alpha,
            sc.controller.quantizer.sigma,
            self.stacks,
            warn=self._learning,
        )

    def _close_window(self) -> RateCertificate:
        cert = self.certificate()
        if self._learning:
            sizes = ", ".join(str(len(s)) for s in self.stacks)
            logger.info(f"Recording window closed: stack sizes [{sizes}], q = {cert.q:.4g}")
            if self.scenario.controller.theorem_grade:
                require_certified(cert)
        return cert

    def record_window(self) -> RateCertificate:
        """Integrate only over [0, t_record] to fill the stacks; no log kept."""
        sc = self.scenario
        h = sc.integrator.step_h
        y = sc.initial_state().flat()
        k = 0
        while self._learning and k * h <= sc.t_record + 1e-12:
            self._record(k * h, y)
            y = rk4_step(self.field, k * h, y, h)
            k += 1
        return self._close_window()

    def _sample(self, t: float, y: np.ndarray) -> TrajectorySample:
        sc = self.scenario
        state = self._state(t, y)
        return TrajectorySample(
            t=t,
            x=state.x.copy(),
            theta_hat=state.theta_hat.copy(),
            V=lyapunov_value(state, sc.laplacian, sc.controller.P, sc.model.theta_true),
            consensus_error=consensus_error(state),
        )

    def run(self) -> TrajectoryLog:
        sc = self.scenario
        cfg = sc.integrator
        h = cfg.step_h
        n_steps = cfg.n_steps
        blowup = settings.blowup_norm

        logger.info(
            f"Simulating {sc.name}: {n_steps} steps of h = {h:g} "
            f"({sc.controller.update_mode.value}, sigma = {sc.controller.quantizer.sigma:g})"
        )
        y = sc.initial_state().flat()
        samples = [self._sample(0.0, y)]
        cert: Optional[RateCertificate] = None

        for k in range(n_steps):
            t = k * h
            if t <= sc.t_record + 1e-12:
                if self._learning:
                    self._record(t, y)
            elif cert is None:
                cert = self._close_window()

            y = rk4_step(self.field, t, y, h)
            t_next = (k + 1) * h
            x_norm = float(np.linalg.norm(y[: self.n * self.p]))
            if x_norm > blowup:
                raise SimulationAbortedError(f"state norm {x_norm:.3e} exceeded {blowup:g}", t_next)
            if (k + 1) % cfg.sample_every == 0:
                samples.append(self._sample(t_next, y))

        if cert is None:
            cert = self._close_window()

        v0 = samples[0].V
        samples = [
            TrajectorySample(
                t=s.t,
                x=s.x,
                theta_hat=s.theta_hat,
                V=s.V,
                consensus_error=s.consensus_error,
                bound=cert.bound(s.t, v0),
            )
            for s in samples
        ]
        final = self._state(n_steps * h, y)
        logger.info(
            f"✓ Finished {sc.name}: V {v0:.6g} -> {samples[-1].V:.6g}, "
            f"consensus error {samples[0].consensus_error:.6g} -> {samples[-1].consensus_error:.6g}"
        )
        return TrajectoryLog(samples=samples, certificate=cert, stacks=self.stacks, final_state=final)


def simulate(scenario: Scenario) -> TrajectoryLog:
    return SwarmSimulator(scenario).run()


def record_window(scenario: Scenario) -> Tuple[RateCertificate, List[HistoryStack]]:
    """Dry run of the recording schedule used by verification."""
    sim = SwarmSimulator(scenario)
    cert = sim.record_window()
    return cert, sim.stacks
