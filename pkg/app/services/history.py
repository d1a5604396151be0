"""Per-agent history stacks for the concurrent-learning update."""

from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.errors import DimensionMismatchError, RankDeficientInputError
from app.models.scenario import CLSource
from app.numerics.linalg import eig_symmetric, frobenius_norm

if TYPE_CHECKING:
    from app.services.control import AgentModel


@dataclass(frozen=True)
class HistoryRecord:
    """One stored point: state, regressor value and measured Phi*theta."""

    t: float
    x: np.ndarray
    phi: np.ndarray
    phi_theta: np.ndarray


def left_pseudo_inverse(b: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """(B^T B)^{-1} B^T, refusing B without full column rank."""
    tol = settings.rank_tol if tol is None else tol
    b = np.asarray(b, dtype=float)
    rank = np.linalg.matrix_rank(b, tol=tol * max(1.0, np.linalg.norm(b)))
    if rank < b.shape[1]:
        raise RankDeficientInputError(
            f"B has rank {rank} < {b.shape[1]} columns; cannot reconstruct Phi*theta"
        )
    return np.linalg.solve(b.T @ b, b.T)


class HistoryStack:
    """
    Bounded record store with lambda_min-greedy admission.

    The gram matrix sum_k Phi_k^T Phi_k is always recomputed from the
    records, so it equals the explicit sum exactly.
    """

    def __init__(
        self,
        m: int,
        capacity: Optional[int] = None,
        eps_add: Optional[float] = None,
        rank_tol: Optional[float] = None,
    ):
        self.m = int(m)
        self.capacity = settings.stack_capacity if capacity is None else int(capacity)
        self.eps_add = settings.eps_add if eps_add is None else float(eps_add)
        self.rank_tol = settings.rank_tol if rank_tol is None else float(rank_tol)
        if self.capacity < 1:
            raise ValueError("history stack capacity must be at least 1")

        self.records: List[HistoryRecord] = []
        self.gram = np.zeros((self.m, self.m))
        self.phi_theta_sum = np.zeros(self.m)
        self.q = 0.0

    def __len__(self) -> int:
        return len(self.records)

    @property
    def full(self) -> bool:
        return len(self.records) >= self.capacity

    @staticmethod
    def _gram_of(records: Sequence[HistoryRecord], m: int) -> np.ndarray:
        gram = np.zeros((m, m))
        for rec in records:
            gram += rec.phi.T @ rec.phi
        return gram

    @staticmethod
    def _lambda_min(gram: np.ndarray) -> float:
        return max(0.0, eig_symmetric(gram).min)

    def _refresh(self):
        self.gram = self._gram_of(self.records, self.m)
        self.phi_theta_sum = np.zeros(self.m)
        for rec in self.records:
            self.phi_theta_sum += rec.phi.T @ rec.phi_theta
        self.q = self._lambda_min(self.gram) if self.records else 0.0

    def admit(self, record: HistoryRecord) -> bool:
        """Apply the admission policy; returns True when the stack changed."""
        if record.phi.ndim != 2 or record.phi.shape[1] != self.m:
            raise DimensionMismatchError(
                f"record regressor has shape {record.phi.shape}, expected (*, {self.m})"
            )

        if not self.records:
            self.records.append(record)
            self._refresh()
            return True

        if not self.full:
            last = self.records[-1].phi
            gap = frobenius_norm(record.phi - last)
            if gap < self.eps_add * max(1.0, frobenius_norm(record.phi)):
                return False
            self.records.append(record)
            self._refresh()
            return True

        best_k, best_q = None, self.q
        for k in range(len(self.records)):
            trial = self.records[:k] + self.records[k + 1 :] + [record]
            q = self._lambda_min(self._gram_of(trial, self.m))
            if q > best_q:
                best_k, best_q = k, q
        if best_k is None:
            return False

        del self.records[best_k]
        self.records.append(record)
        self._refresh()
        return True

    def offer(
        self,
        t: float,
        x: np.ndarray,
        u: np.ndarray,
        xdot: np.ndarray,
        model: "AgentModel",
        source: CLSource = CLSource.ORACLE,
    ) -> bool:
        """Build a candidate record from the current sample and try to admit it."""
        x = np.asarray(x, dtype=float)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u)) and np.all(np.isfinite(xdot))):
            raise DimensionMismatchError("history candidates must be finite")
        phi = np.asarray(model.phi(t, x), dtype=float)

        if source == CLSource.ORACLE:
            phi_theta = phi @ model.theta
        else:
            b_pinv = left_pseudo_inverse(model.B, self.rank_tol)
            phi_theta = b_pinv @ (np.asarray(xdot, dtype=float) - model.A @ x) - np.asarray(u)

        record = HistoryRecord(t=float(t), x=x.copy(), phi=phi, phi_theta=phi_theta)
        return self.admit(record)


def record_history_point(
    stacks: List[HistoryStack],
    i: int,
    t: float,
    x_i: np.ndarray,
    u_i: np.ndarray,
    xdot_i: np.ndarray,
    model: "AgentModel",
    source: CLSource = CLSource.ORACLE,
) -> List[HistoryStack]:
    """Offer one sample to agent i's stack; returns the (mutated) stack list."""
    stacks[i].offer(t, x_i, u_i, xdot_i, model, source)
    return stacks


def condition1_certificate(
    stack: HistoryStack, rank_tol: Optional[float] = None
) -> Tuple[bool, float]:
    """(q_i > rank_tol, q_i) with q_i the smallest eigenvalue of the stack gram."""
    rank_tol = stack.rank_tol if rank_tol is None else rank_tol
    if not stack.records:
        return False, 0.0
    q = stack.q
    return q > rank_tol, q

