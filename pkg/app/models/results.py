"""Certificates and run reports."""

import math
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.numerics.graph import AlphaCertificate


class RateCertificate(BaseModel):
    """Decay rates and steady-state offset implied by the Lyapunov analysis."""

    lambda2: float
    lambda_max_L: float
    lambda_max_P: float
    C: float
    gamma: float
    q: float
    q_per_agent: List[float]
    condition1_satisfied: bool
    decay_unquantized: float
    decay_quantized: float
    D: float
    J: float
    sigma: float
    offset: float

    @property
    def decay(self) -> float:
        """Rate that applies to this run's bound curve."""
        return self.decay_quantized if self.sigma > 0 else self.decay_unquantized

    def bound(self, t: float, v0: float) -> float:
        return math.exp(-self.decay * t) * v0 + self.offset

    def summary_lines(self) -> List[str]:
        return [
            f"lambda2 = {self.lambda2:.6g}, C = lambda_max(L) * lambda_max(P) = {self.C:.6g}",
            f"gamma = {self.gamma:.6g}, q = {self.q:.6g} (per agent: "
            + ", ".join(f"{v:.4g}" for v in self.q_per_agent)
            + ")",
            f"decay min(gamma, q) = {self.decay_unquantized:.6g}, "
            f"min(gamma/2, q) = {self.decay_quantized:.6g}",
            f"D = {self.D:.6g}, J = {self.J:.6g}, sigma = {self.sigma:g}, offset = {self.offset:.6g}",
        ]


class SweepRow(BaseModel):
    sigma: float
    steady_state_consensus_error: float
    steady_state_V: float
    theorem2_offset: float


class RunReport(BaseModel):
    scenario: str
    command: str
    checks: Dict[str, bool] = Field(default_factory=dict)
    are_residual: Optional[float] = None
    lambda2: Optional[float] = None
    alpha: Optional[float] = None
    alpha_certificate: Optional[AlphaCertificate] = None
    certificate: Optional[RateCertificate] = None
    sweep: List[SweepRow] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    messages: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())
