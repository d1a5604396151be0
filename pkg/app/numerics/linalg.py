"""Dense real-matrix kernels for small systems.

Sizes here are tiny (p <= ~32), so clarity wins over speed: symmetric
eigenproblems go through cyclic Jacobi, Lyapunov equations through the
Kronecker-vectorized linear system, and the CARE through forward
integration of the differential Riccati equation followed by one
Newton-Kleinman step.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from app.config import settings
from app.errors import (
    AsymmetricMatrixError,
    DimensionMismatchError,
    EigenConvergenceError,
    NonSquareMatrixError,
    NotHurwitzError,
    NotStabilizableError,
    RiccatiConvergenceError,
)


@dataclass(frozen=True)
class SpectralResult:
    """Eigen-decomposition of a symmetric matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return q @ np.diag(self.eigenvalues) @ q.T


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array."""
    arr = np.array(m, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatchError(f"{name} has non-finite entries")
    return arr


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, "fro"))


def _scale(m: np.ndarray) -> float:
    return max(1.0, frobenius_norm(m))


def require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise NonSquareMatrixError(f"{name} must be square, got {m.shape}")
    return m


def symmetrize(m, tol: Optional[float] = None, name: str = "matrix") -> np.ndarray:
    """Return (M + M^T)/2, refusing inputs asymmetric beyond ``tol`` (relative)."""
    tol = settings.asymmetry_tol if tol is None else tol
    m = require_square(m, name)
    asym = frobenius_norm(m - m.T)
    if asym > tol * _scale(m):
        raise AsymmetricMatrixError(
            f"{name} is not symmetric: ||M - M^T||_F = {asym:.3e} exceeds {tol:g} relative"
        )
    return 0.5 * (m + m.T)


def eig_symmetric(
    m, tol: Optional[float] = None, max_sweeps: Optional[int] = None
) -> SpectralResult:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix."""
    tol = settings.jacobi_tol if tol is None else tol
    max_sweeps = settings.jacobi_max_sweeps if max_sweeps is None else max_sweeps

    a = symmetrize(m).copy()
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * frobenius_norm(a)

    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        off = np.abs(a - np.diag(np.diag(a))).max(initial=0.0)
        if off > threshold:
            raise EigenConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})"
            )

    order = np.argsort(np.diag(a), kind="stable")
    return SpectralResult(eigenvalues=np.diag(a)[order].copy(), eigenvectors=v[:, order])


def spectral_norm_psd(m) -> float:
    """Largest eigenvalue of a symmetric PSD matrix (its spectral norm)."""
    return eig_symmetric(m).max


def kron(left, right) -> np.ndarray:
    return np.kron(as_matrix(left, "left"), as_matrix(right, "right"))


def spectral_abscissa(a) -> float:
    a = require_square(a, "A")
    return float(np.max(np.linalg.eigvals(a).real))


def is_hurwitz(a) -> bool:
    return spectral_abscissa(a) < 0.0


def is_stabilizable(a, b, tol: float = 1e-9) -> bool:
    """PBH test: rank [A - lambda I, B] = p for every eigenvalue with Re >= 0."""
    a = require_square(a, "A")
    b = as_matrix(b, "B")
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatchError(f"B has {b.shape[0]} rows, A is {a.shape[0]}x{a.shape[0]}")
    p = a.shape[0]
    for lam in np.linalg.eigvals(a):
        if lam.real < -tol:
            continue
        pencil = np.hstack([a - lam * np.eye(p), b.astype(complex)])
        if np.linalg.matrix_rank(pencil, tol=tol * max(1.0, np.linalg.norm(pencil))) < p:
            return False
    return True


def solve_lyapunov(a, q) -> np.ndarray:
    """Solve A^T P + P A + Q = 0 for symmetric P (A Hurwitz)."""
    a = require_square(a, "A")
    q = symmetrize(q, name="Q")
    if a.shape != q.shape:
        raise DimensionMismatchError(f"A is {a.shape}, Q is {q.shape}")
    if not is_hurwitz(a):
        raise NotHurwitzError(f"A is not Hurwitz (spectral abscissa {spectral_abscissa(a):.3e})")

    p = a.shape[0]
    eye = np.eye(p)
    # column-major vec: vec(A^T P) = (I kron A^T) vec P, vec(P A) = (A^T kron I) vec P
    system = np.kron(eye, a.T) + np.kron(a.T, eye)
    if np.linalg.cond(system) > 1e12:
        raise NotHurwitzError("vectorized Lyapunov system is ill-conditioned")
    vec_p = np.linalg.solve(system, -q.reshape(-1, order="F"))
    sol = vec_p.reshape((p, p), order="F")
    sol = 0.5 * (sol + sol.T)

    residual = frobenius_norm(a.T @ sol + sol @ a + q)
    if residual > 1e-10 * _scale(q) * max(1.0, frobenius_norm(sol)):
        raise NotHurwitzError(f"Lyapunov residual {residual:.3e} too large")
    return sol


def riccati_residual(a, b, q, p) -> np.ndarray:
    """A^T P + P A - P B B^T P + Q."""
    bbt = b @ b.T
    return a.T @ p + p @ a - p @ bbt @ p + q


def solve_care(
    a,
    b,
    q=None,
    h: Optional[float] = None,
    max_iters: Optional[int] = None,
    p0=None,
    refine: bool = True,
) -> np.ndarray:
    """Stabilizing solution of A^T P + P A - P B B^T P + Q = 0.

    Integrates dP/dt = A^T P + P A - P B B^T P + Q with RK4 from P0
    (identity by default) until the algebraic residual is below
    1e-10 * max(1, ||Q||_F), then applies one Newton-Kleinman step.
    """
    a = require_square(a, "A")
    b = as_matrix(b, "B")
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatchError(f"B has {b.shape[0]} rows, A is {n}x{n}")
    q = np.eye(n) if q is None else symmetrize(q, name="Q")
    if q.shape != a.shape:
        raise DimensionMismatchError(f"Q is {q.shape}, A is {a.shape}")
    h = settings.riccati_step if h is None else h
    max_iters = settings.riccati_max_iters if max_iters is None else max_iters

    if not is_stabilizable(a, b):
        raise NotStabilizableError("(A, B) is not stabilizable")

    bbt = b @ b.T
    at = a.T

    def field(p):
        return at @ p + p @ a - p @ bbt @ p + q

    p = np.eye(n) if p0 is None else symmetrize(p0, name="P0").copy()
    tol = 1e-10 * _scale(q)
    blowup = settings.blowup_norm

    for it in range(max_iters):
        k1 = field(p)
        res = frobenius_norm(k1)
        if res <= tol:
            logger.debug(f"Riccati flow converged after {it} steps (residual {res:.3e})")
            break
        if not np.isfinite(res) or frobenius_norm(p) > blowup:
            raise RiccatiConvergenceError(f"Riccati flow diverged at step {it}")
        k2 = field(p + 0.5 * h * k1)
        k3 = field(p + 0.5 * h * k2)
        k4 = field(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p = 0.5 * (p + p.T)
    else:
        raise RiccatiConvergenceError(
            f"Riccati flow did not converge in {max_iters} steps "
            f"(residual {frobenius_norm(field(p)):.3e}); pair may be non-stabilizable or h too large"
        )

    closed_loop = a - bbt @ p
    if refine:
        try:
            p = solve_lyapunov(closed_loop, q + p @ bbt @ p)
        except NotHurwitzError as e:
            raise RiccatiConvergenceError(f"converged P is not stabilizing: {e}") from e
    else:
        try:
            solve_lyapunov(closed_loop, np.eye(n))
        except NotHurwitzError as e:
            raise RiccatiConvergenceError(f"converged P is not stabilizing: {e}") from e

    if eig_symmetric(p).min <= 0.0:
        raise RiccatiConvergenceError("Riccati solution is not positive definite")
    return p
