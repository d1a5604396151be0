"""Uniform quantizer q(x) = floor(x / sigma + 1/2) * sigma."""
import math

import numpy as np
from pydantic import BaseModel, Field

from app.errors import QuantizationError


class QuantizerConfig(BaseModel):
    """Quantization level; sigma = 0 disables quantization."""

    sigma: float = Field(0.0, ge=0.0)

    @property
    def enabled(self) -> bool:
        return self.sigma > 0.0


def _check_sigma(sigma: float):
    if not sigma > 0.0 or not math.isfinite(sigma):
        raise QuantizationError(f"quantization step must be positive and finite, got {sigma}")


def quantize_scalar(x: float, sigma: float) -> float:
    _check_sigma(sigma)
    if not math.isfinite(x):
        raise QuantizationError(f"cannot quantize non-finite value {x}")
    return math.floor(x / sigma + 0.5) * sigma


def quantize_vector(x, sigma: float) -> np.ndarray:
    """Componentwise quantization; works on any array shape."""
    _check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise QuantizationError("cannot quantize non-finite values")
    return np.floor(x / sigma + 0.5) * sigma


def quantization_error(x, sigma: float) -> np.ndarray:
    """Delta(x) = q(x) - x, bounded by sigma/2 per component."""
    x = np.asarray(x, dtype=float)
    return quantize_vector(x, sigma) - x


def transmitted(x, quantizer: QuantizerConfig) -> np.ndarray:
    """What neighbors receive: the quantized state, or the raw one when disabled."""
    if quantizer.enabled:
        return quantize_vector(x, quantizer.sigma)
    return np.asarray(x, dtype=float)
