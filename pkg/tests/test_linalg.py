import numpy as np
import pytest

from app.errors import (
    AsymmetricMatrixError,
    NonSquareMatrixError,
    NotHurwitzError,
    NotStabilizableError,
)
from app.numerics.linalg import (
    eig_symmetric,
    frobenius_norm,
    is_hurwitz,
    is_stabilizable,
    kron,
    riccati_residual,
    solve_care,
    solve_lyapunov,
    spectral_abscissa,
    spectral_norm_psd,
    symmetrize,
)
from app.services.fixtures import S5_A, S5_B, S5_LAPLACIAN, S5_PRINTED_P

COMPUTED_S5_P = np.array(
    [
        [0.65019, 0.01604, -0.51525, 0.57492],
        [0.01604, 0.46345, 0.06110, 0.09721],
        [-0.51525, 0.06110, 1.59653, -0.91962],
        [0.57492, 0.09721, -0.91962, 1.22695],
    ]
)


def faddeev_leverrier(m: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients, highest degree first."""
    n = m.shape[0]
    coeffs = [1.0]
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(m @ mk) / k)
    return np.array(coeffs)


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return 0.5 * (a + a.T)


class TestEigSymmetric:
    def test_known_2x2(self):
        res = eig_symmetric([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(res.eigenvalues, [1.0, 3.0], atol=1e-14)

    def test_diagonal_is_sorted(self):
        res = eig_symmetric(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_array_equal(res.eigenvalues, [-1.0, 2.0, 3.0])

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_characteristic_polynomial(self, rng, n):
        for _ in range(50):
            m = random_symmetric(rng, n)
            roots = np.sort(np.roots(faddeev_leverrier(m)).real)
            np.testing.assert_allclose(eig_symmetric(m).eigenvalues, roots, atol=1e-9)

    def test_reconstruction_and_orthogonality(self, rng):
        m = random_symmetric(rng, 6)
        res = eig_symmetric(m)
        np.testing.assert_allclose(res.reconstruct(), m, atol=1e-12)
        np.testing.assert_allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(6), atol=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(AsymmetricMatrixError):
            eig_symmetric([[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_non_square(self):
        with pytest.raises(NonSquareMatrixError):
            eig_symmetric(np.ones((2, 3)))

    def test_symmetrize_tolerates_roundoff(self):
        m = np.array([[1.0, 2.0 + 1e-14], [2.0, 1.0]])
        np.testing.assert_allclose(symmetrize(m), [[1.0, 2.0], [2.0, 1.0]], atol=1e-13)


class TestLyapunov:
    def test_random_hurwitz_against_row_major_kronecker(self, rng):
        for _ in range(100):
            a = rng.normal(size=(4, 4))
            a -= (spectral_abscissa(a) + 0.5) * np.eye(4)
            q = random_symmetric(rng, 4) + 4.0 * np.eye(4)
            p = solve_lyapunov(a, q)

            assert frobenius_norm(a.T @ p + p @ a + q) <= 1e-10 * max(1.0, frobenius_norm(q)) * max(
                1.0, frobenius_norm(p)
            )
            # row-major vectorization: vec(A^T P) = (A^T kron I) vec P, vec(P A) = (I kron A^T) vec P
            system = np.kron(a.T, np.eye(4)) + np.kron(np.eye(4), a.T)
            direct = np.linalg.solve(system, -q.ravel()).reshape(4, 4)
            np.testing.assert_allclose(p, direct, atol=1e-9)

    def test_scalar(self):
        np.testing.assert_allclose(solve_lyapunov([[-1.0]], [[2.0]]), [[1.0]])

    def test_rejects_unstable(self):
        with pytest.raises(NotHurwitzError):
            solve_lyapunov([[1.0, 0.0], [0.0, -1.0]], np.eye(2))


class TestRiccati:
    def test_scalar_integrator(self):
        np.testing.assert_allclose(solve_care([[0.0]], [[1.0]]), [[1.0]], atol=1e-10)

    def test_benchmark_pair(self):
        a, b = np.array(S5_A), np.array(S5_B)
        p = solve_care(a, b)
        q = np.eye(4)

        assert frobenius_norm(riccati_residual(a, b, q, p)) <= 1e-8
        assert eig_symmetric(p).min > 0.0
        assert is_hurwitz(a - b @ b.T @ p)
        np.testing.assert_allclose(p, COMPUTED_S5_P, atol=1e-4)
        np.testing.assert_allclose(eig_symmetric(p).eigenvalues, [0.274, 0.407, 0.613, 2.643], atol=2e-3)

        # same stabilizing solution from a different starting point
        np.testing.assert_allclose(solve_care(a, b, p0=2.0 * np.eye(4)), p, atol=1e-8)

    def test_printed_benchmark_matrix_is_not_a_solution(self):
        a, b = np.array(S5_A), np.array(S5_B)
        printed = symmetrize(S5_PRINTED_P, tol=1e-3)
        assert frobenius_norm(riccati_residual(a, b, np.eye(4), printed)) > 1.0

    def test_unrefined_solution_also_converges(self):
        a, b = np.array(S5_A), np.array(S5_B)
        p = solve_care(a, b, refine=False)
        assert frobenius_norm(riccati_residual(a, b, np.eye(4), p)) <= 1e-9

    def test_zero_pair_is_not_stabilizable(self):
        assert not is_stabilizable([[0.0]], [[0.0]])
        with pytest.raises(NotStabilizableError):
            solve_care([[0.0]], [[0.0]])

    def test_uncontrollable_stable_mode_is_fine(self):
        a = np.diag([1.0, -2.0])
        b = np.array([[1.0], [0.0]])
        assert is_stabilizable(a, b)
        assert not is_stabilizable(np.diag([1.0, 2.0]), b)



def test_spectral_norm_psd(rng):
    assert spectral_norm_psd(np.diag([1.0, 4.0, 2.0])) == pytest.approx(4.0, abs=1e-12)
    g = rng.standard_normal((5, 3))
    gram = g @ g.T
    assert spectral_norm_psd(gram) == pytest.approx(np.linalg.norm(gram, 2), rel=1e-9)
    with pytest.raises(AsymmetricMatrixError):
        spectral_norm_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestExamples:
    def test_scalar_care(self):
        np.testing.assert_allclose(solve_care([[1.0]], [[1.0]], [[1.0]]), [[1.0 + np.sqrt(2.0)]], atol=1e-10)

    @pytest.mark.parametrize(
        "a, expected",
        [(-np.eye(2), 0.5 * np.eye(2)), (np.diag([-1.0, -2.0]), np.diag([0.5, 0.25]))],
    )
    def test_diagonal_lyapunov(self, a, expected):
        np.testing.assert_allclose(solve_lyapunov(a, np.eye(2)), expected, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_trace_and_determinant(self, rng, n):
        for _ in range(25):
            m = random_symmetric(rng, n)
            eigs = eig_symmetric(m).eigenvalues
            assert eigs.sum() == pytest.approx(np.trace(m), abs=1e-12)
            assert np.prod(eigs) == pytest.approx(np.linalg.det(m), rel=1e-9, abs=1e-12)

    def test_coupling_norm_factorizes(self):
        lap = np.array(S5_LAPLACIAN)
        pbbp = COMPUTED_S5_P @ np.array(S5_B) @ np.array(S5_B).T @ COMPUTED_S5_P
        pbbp = 0.5 * (pbbp + pbbp.T)
        expected = eig_symmetric(lap).max ** 2 * eig_symmetric(pbbp).max
        assert spectral_norm_psd(kron(lap @ lap, pbbp)) == pytest.approx(expected, rel=1e-9)


def test_kron_block_example():
    expected = np.zeros((4, 4))
    expected[:2, 2:] = np.eye(2)
    np.testing.assert_array_equal(kron([[0.0, 1.0], [0.0, 0.0]], np.eye(2)), expected)


def test_kron_mixed_product(rng):
    for _ in range(100):
        m, n, p, q, r, s = rng.integers(1, 5, size=6)
        a, c = rng.normal(size=(m, n)), rng.normal(size=(n, r))
        b, d = rng.normal(size=(p, q)), rng.normal(size=(q, s))
        np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-11)
