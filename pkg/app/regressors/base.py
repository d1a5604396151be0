"""Abstract regressor interface."""

from abc import ABC, abstractmethod

import numpy as np


class RegressorInterface(ABC):
    """Known basis Phi_i(t, x_i) multiplying the unknown parameter theta_i.

    Implementations must be pure: the same (t, x) always yields the same
    q_in x m matrix.
    """

    def __init__(self, p: int, q_in: int, m: int):
        self.p = p
        self.q_in = q_in
        self.m = m

    @property
    def shape(self) -> tuple:
        return (self.q_in, self.m)

    @abstractmethod
    def evaluate(self, t: float, x: np.ndarray) -> np.ndarray:
        """
        Evaluate the regressor.

        Args:
            t: Time in seconds
            x: Agent state, shape (p,)

        Returns:
            Matrix of shape (q_in, m)
        """
        pass

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.evaluate(t, x)
