"""Undirected communication graphs and their Laplacian spectra."""
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from app.config import settings
from app.errors import DimensionMismatchError, DisconnectedGraphError
from app.numerics.linalg import as_matrix, eig_symmetric, require_square


@dataclass(frozen=True)
class UndirectedGraph:
    """Weighted undirected graph given by its symmetric adjacency matrix."""

    weights: np.ndarray

    def __post_init__(self):
        w = require_square(self.weights, "weights")
        if not np.array_equal(w, w.T):
            raise DimensionMismatchError("adjacency weights must be exactly symmetric")
        if np.any(np.diag(w) != 0.0):
            raise DimensionMismatchError("adjacency weights must have a zero diagonal")
        if np.any(w < 0.0):
            raise DimensionMismatchError("adjacency weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Tuple[int, int]], weights: Optional[Sequence[float]] = None
    ) -> "UndirectedGraph":
        """Build from 0-based vertex pairs (unit weight unless given)."""
        edges = list(edges)
        if weights is None:
            weights = [1.0] * len(edges)
        if len(weights) != len(edges):
            raise DimensionMismatchError("one weight per edge is required")
        w = np.zeros((n, n))
        for (i, j), a in zip(edges, weights):
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise DimensionMismatchError(f"invalid edge ({i}, {j}) for n={n}")
            w[i, j] = w[j, i] = float(a)
        return cls(w)

    @classmethod
    def from_laplacian(cls, laplacian, tol: float = 1e-9) -> "UndirectedGraph":
        """Recover the adjacency weights from a Laplacian (rows must sum to zero)."""
        lap = require_square(laplacian, "laplacian")
        scale = max(1.0, float(np.abs(lap).max()))
        if np.abs(lap.sum(axis=1)).max() > tol * scale:
            raise DimensionMismatchError("Laplacian rows must sum to zero")
        w = -lap.copy()
        np.fill_diagonal(w, 0.0)
        w = 0.5 * (w + w.T)
        w[np.abs(w) < tol * scale] = 0.0
        return cls(w)


@dataclass(frozen=True)
class LaplacianFacts:
    laplacian: np.ndarray
    lambda2: float
    alpha_min: float

    @property
    def connected(self) -> bool:
        return self.lambda2 > settings.disconnect_tol


class AlphaCertificate(BaseModel):
    """Outcome of the coupling-gain check on 2*alpha*L^2 - L."""

    alpha: float
    alpha_bound: float
    min_eigenvalue: float
    tolerance: float
    passed: bool


def laplacian(g: UndirectedGraph) -> np.ndarray:
    """Degree matrix minus adjacency."""
    return np.diag(g.weights.sum(axis=1)) - g.weights


def is_connected(g: UndirectedGraph) -> bool:
    """Breadth-first reachability from the first vertex over positive-weight edges."""
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(g.weights[i] > 0.0):
            j = int(j)
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == g.n


def laplacian_facts(g: UndirectedGraph) -> LaplacianFacts:
    lap = laplacian(g)
    if g.n < 2:
        return LaplacianFacts(laplacian=lap, lambda2=0.0, alpha_min=float("inf"))
    lambda2 = float(eig_symmetric(lap).eigenvalues[1])
    alpha_min = 1.0 / (2.0 * lambda2) if lambda2 > settings.disconnect_tol else float("inf")
    return LaplacianFacts(laplacian=lap, lambda2=lambda2, alpha_min=alpha_min)


def algebraic_connectivity(lap, tol: Optional[float] = None) -> float:
    """Second-smallest Laplacian eigenvalue (Fiedler value)."""
    tol = settings.disconnect_tol if tol is None else tol
    lap = as_matrix(lap, "laplacian")
    if lap.shape[0] < 2:
        raise DisconnectedGraphError("algebraic connectivity needs at least two vertices")
    lambda2 = float(eig_symmetric(lap).eigenvalues[1])
    if lambda2 <= tol:
        raise DisconnectedGraphError(f"graph is disconnected (lambda2 = {lambda2:.3e})", lambda2)
    return lambda2


def alpha_lower_bound(lap) -> float:
    """Smallest coupling gain making 2*alpha*L^2 - L positive semidefinite."""
    return 1.0 / (2.0 * algebraic_connectivity(lap))


def alpha_certificate(lap, alpha: float, rtol: Optional[float] = None) -> AlphaCertificate:
    """Check 2*alpha*L^2 - L >= 0 numerically.

    Eigenvalues down to -(psd_tol + rtol * lambda2) are accepted, which is
    exactly the slack produced by an alpha that is rtol below the bound.
    """
    rtol = settings.alpha_rtol if rtol is None else rtol
    lap = as_matrix(lap, "laplacian")
    lambda2 = algebraic_connectivity(lap)
    bound = 1.0 / (2.0 * lambda2)
    m = 2.0 * alpha * lap @ lap - lap
    min_eig = eig_symmetric(m).min
    tolerance = settings.psd_tol + rtol * lambda2
    return AlphaCertificate(
        alpha=alpha,
        alpha_bound=bound,
        min_eigenvalue=min_eig,
        tolerance=tolerance,
        passed=min_eig >= -tolerance,
    )


def benchmark_graph() -> UndirectedGraph:
    """Five-agent unit-weight topology with edges 1-2, 1-5, 4-5, 3-4, 1-4."""
    edges = [(1, 2), (1, 5), (4, 5), (3, 4), (1, 4)]
    return UndirectedGraph.from_edges(5, [(i - 1, j - 1) for i, j in edges])
