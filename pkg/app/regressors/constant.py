"""State-independent regressors."""

import numpy as np

from app.regressors.base import RegressorInterface


class ConstantRegressor(RegressorInterface):
    """Phi(t, x) = fixed matrix."""

    def __init__(self, p: int, value):
        value = np.array(value, dtype=float)
        if value.ndim == 1:
            value = value.reshape(-1, 1)
        super().__init__(p=p, q_in=value.shape[0], m=value.shape[1])
        value.setflags(write=False)
        self._value = value

    def evaluate(self, t: float, x: np.ndarray) -> np.ndarray:
        return self._value.copy()


class ZeroRegressor(ConstantRegressor):
    """No matched uncertainty: Phi = 0."""

    def __init__(self, p: int, q_in: int, m: int = 1):
        super().__init__(p=p, value=np.zeros((q_in, m)))
