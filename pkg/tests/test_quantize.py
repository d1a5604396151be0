import numpy as np
import pytest

from app.errors import QuantizationError
from app.numerics.quantize import (
    QuantizerConfig,
    quantization_error,
    quantize_scalar,
    quantize_vector,
    transmitted,
)


@pytest.mark.parametrize(
    "x, sigma, expected",
    [
        (1.4, 1.0, 1.0),
        (1.5, 1.0, 2.0),
        (-1.5, 1.0, -1.0),
        (2.5, 1.0, 3.0),
        (0.0, 5.0, 0.0),
        (7.4, 5.0, 5.0),
        (0.4, 1.0, 0.0),
        (7.3, 5.0, 5.0),
        (-2.5, 5.0, 0.0),
    ],
)
def test_scalar_examples(x, sigma, expected):
    assert quantize_scalar(x, sigma) == expected


def test_vector_example():
    np.testing.assert_array_equal(quantize_vector([0.4, 7.3, -2.5], 5.0), [0.0, 5.0, 0.0])
    np.testing.assert_array_equal(quantize_vector(np.zeros(6), 0.3), np.zeros(6))


@pytest.mark.parametrize("sigma", [0.01, 0.1, 1.0, 5.0])
def test_half_step_rounds_up(sigma):
    x = np.full(7, sigma / 2)
    np.testing.assert_array_equal(quantization_error(x, sigma), np.full(7, sigma / 2))
    lattice = np.arange(-3, 4) * sigma
    np.testing.assert_array_equal(quantization_error(lattice, sigma), 0.0)


@pytest.mark.parametrize("sigma", [0.01, 1.0, 5.0])
def test_randomized_properties(rng, sigma):
    x = rng.uniform(-1e3, 1e3, size=100_000)
    q = quantize_vector(x, sigma)
    slack = 1e-9 * np.maximum(1.0, np.abs(x))

    assert np.all(np.abs(q - x) <= sigma / 2 + slack)
    lattice = q / sigma
    assert np.all(np.abs(lattice - np.round(lattice)) <= 1e-12 * np.maximum(1.0, np.abs(lattice)))
    np.testing.assert_array_equal(quantize_vector(q, sigma), q)

    delta = quantization_error(x[:20], sigma)
    assert np.max(np.abs(delta)) <= sigma / 2 + 1e-9
    assert np.linalg.norm(delta) <= np.sqrt(20) * sigma / 2 + 1e-9


def test_error_shrinks_with_sigma(rng):
    x = rng.uniform(-100.0, 100.0, size=1_000)
    errors = np.array([np.abs(quantization_error(x, 2.0**-k)) for k in range(21)])
    assert np.all(np.diff(errors, axis=0) <= 0.0)
    assert errors[-1].max() <= 2.0**-21


def test_monotone_in_x():
    x = np.sort(np.random.default_rng(3).uniform(-50, 50, size=10_000))
    assert np.all(np.diff(quantize_vector(x, 0.5)) >= 0.0)


def test_preserves_shape():
    x = np.arange(12.0).reshape(3, 4) / 3.0
    assert quantize_vector(x, 1.0).shape == (3, 4)


@pytest.mark.parametrize("sigma", [0.0, -1.0, float("inf"), float("nan")])
def test_invalid_sigma(sigma):
    with pytest.raises(QuantizationError):
        quantize_scalar(1.0, sigma)


def test_non_finite_input():
    with pytest.raises(QuantizationError):
        quantize_vector([1.0, float("nan")], 1.0)


def test_transmitted_respects_enabled_flag():
    x = np.array([[1.4, -0.6]])
    assert not QuantizerConfig().enabled
    np.testing.assert_array_equal(transmitted(x, QuantizerConfig()), x)
    np.testing.assert_array_equal(transmitted(x, QuantizerConfig(sigma=1.0)), [[1.0, -1.0]])
