"""Exponentially weighted affine regressor used by the five-agent benchmark."""

import math

import numpy as np

from app.errors import DimensionMismatchError
from app.regressors.base import RegressorInterface


class ExponentialAffineRegressor(RegressorInterface):
    """Phi_d(x) = [gamma_d + beta_d * exp(-d) * x_k]_{k=1..q_in}, one parameter (m = 1).

    ``d`` is the 1-based agent label, so later agents see a weaker state
    dependence.
    """

    def __init__(self, p: int, q_in: int, gamma: float, beta: float, d: int):
        if q_in > p:
            raise DimensionMismatchError(
                f"regressor reads the first {q_in} state coordinates but p = {p}"
            )
        super().__init__(p=p, q_in=q_in, m=1)
        self.gamma = float(gamma)
        self.beta = float(beta)
        self.d = int(d)
        self._slope = self.beta * math.exp(-self.d)

    def evaluate(self, t: float, x: np.ndarray) -> np.ndarray:
        return (self.gamma + self._slope * np.asarray(x[: self.q_in], dtype=float)).reshape(
            self.q_in, 1
        )
