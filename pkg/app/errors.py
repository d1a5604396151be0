"""Exception hierarchy shared by the numerics, services and CLI layers."""
from typing import Optional, Sequence


class AclError(Exception):
    """Base class for all adaptive-consensus errors."""


class DimensionMismatchError(AclError, ValueError):
    """Operands do not conform."""


class NonSquareMatrixError(AclError, ValueError):
    """A square matrix was required."""


class AsymmetricMatrixError(AclError, ValueError):
    """Asymmetry exceeds the accepted tolerance."""


class EigenConvergenceError(AclError, ArithmeticError):
    """Jacobi sweeps exhausted before the off-diagonal mass vanished."""


class NotHurwitzError(AclError, ArithmeticError):
    """Matrix has an eigenvalue with nonnegative real part."""


class NotStabilizableError(AclError, ArithmeticError):
    """The pair (A, B) fails the PBH stabilizability test."""


class RiccatiConvergenceError(AclError, ArithmeticError):
    """Differential Riccati integration did not reach the algebraic solution."""


class DisconnectedGraphError(AclError, ValueError):
    """The communication graph is not connected."""

    def __init__(self, message: str, lambda2: Optional[float] = None):
        super().__init__(message)
        self.lambda2 = lambda2


class QuantizationError(AclError, ValueError):
    """Invalid quantizer input."""


class RankDeficientInputError(AclError, ValueError):
    """B is not full column rank, so B^T B cannot be inverted."""


class UncertifiedStackError(AclError, RuntimeError):
    """Condition 1 does not hold for at least one agent."""

    def __init__(self, message: str, q_values: Sequence[float] = ()):
        super().__init__(message)
        self.q_values = list(q_values)


class NonFiniteStateError(AclError, RuntimeError):
    """Integration produced NaN or infinity."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.6g})")
        self.t = t


class SimulationAbortedError(AclError, RuntimeError):
    """State norm crossed the blow-up threshold."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.6g})")
        self.t = t


class ScenarioParseError(AclError, ValueError):
    """Scenario file could not be parsed or validated."""

    def __init__(self, message: str, problems: Sequence[str] = ()):
        super().__init__(message)
        self.problems = list(problems)

    def __str__(self) -> str:
        base = super().__str__()
        if not self.problems:
            return base
        return base + "\n" + "\n".join(f"  - {p}" for p in self.problems)
