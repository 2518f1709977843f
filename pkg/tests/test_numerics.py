import numpy as np
import numpy.testing as npt
import pytest

from mimosec.errors import DimensionError, SingularMatrixError
from mimosec.numerics import mmse_inverse, qr_split, svd_split


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


class TestSvdSplit:
    def test_identity(self):
        split = svd_split(np.eye(2), rank_tol=1e-9)
        npt.assert_allclose(split.S, [1.0, 1.0])
        assert split.V0.shape == (2, 0)

    def test_rank_one(self):
        split = svd_split(np.array([[1.0, 0.0], [0.0, 0.0]]))
        npt.assert_allclose(split.S, [1.0, 0.0], atol=1e-15)
        npt.assert_allclose(np.abs(split.V1[:, 0]), [1.0, 0.0], atol=1e-12)
        npt.assert_allclose(np.abs(split.V0[:, 0]), [0.0, 1.0], atol=1e-12)

    def test_wide_matrix_reconstruction_and_null_space(self):
        rng = np.random.default_rng(0)
        A = crandn(rng, 2, 4)
        split = svd_split(A)
        sigma = np.zeros((2, 4))
        sigma[:2, :2] = np.diag(split.S)
        recon = split.U @ sigma @ split.V.conj().T
        assert np.linalg.norm(A - recon) / np.linalg.norm(A) < 1e-10
        assert split.V0.shape[1] == 2
        assert np.linalg.norm(A @ split.V0) < 1e-10

    def test_reconstruction_property_random(self):
        rng = np.random.default_rng(1)
        for shape in [(3, 3), (4, 2), (2, 5), (6, 6)]:
            A = crandn(rng, *shape)
            split = svd_split(A)
            m, n = shape
            sigma = np.zeros((m, n))
            k = min(m, n)
            sigma[:k, :k] = np.diag(split.S)
            recon = split.U @ sigma @ split.V.conj().T
            assert np.linalg.norm(A - recon) / np.linalg.norm(A) < 1e-10
            gram = split.V.conj().T @ split.V
            npt.assert_allclose(gram, np.eye(n), atol=1e-10)
            assert np.linalg.norm(A @ split.V0) < 1e-9

    def test_descending_order(self):
        rng = np.random.default_rng(2)
        split = svd_split(crandn(rng, 5, 5))
        assert np.all(np.diff(split.S) <= 0)

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(3)
        A = crandn(rng, 3, 4)
        s1, s2 = svd_split(A), svd_split(A.copy())
        npt.assert_array_equal(s1.V1, s2.V1)
        for j in range(s1.V1.shape[1]):
            col = s1.V1[:, j]
            pivot = col[np.argmax(np.abs(col))]
            assert pivot.real > 0 and abs(pivot.imag) < 1e-12

    def test_empty_raises(self):
        with pytest.raises(DimensionError):
            svd_split(np.zeros((0, 3)))

    def test_bad_tol_raises(self):
        with pytest.raises(DimensionError):
            svd_split(np.eye(2), rank_tol=-1.0)


class TestQrSplit:
    def test_identity(self):
        split = qr_split(np.eye(3), n_lead=2)
        npt.assert_allclose(split.Q0, np.eye(3)[:, :2], atol=1e-12)
        npt.assert_allclose(split.R, np.eye(3), atol=1e-12)

    def test_pythagorean_column(self):
        split = qr_split(np.array([[3.0], [4.0]]), n_lead=1)
        npt.assert_allclose(split.R[0, 0], 5.0)
        npt.assert_allclose(split.Q0[:, 0], [0.6, 0.8])

    def test_orthonormal_input_unit_diagonal(self):
        rng = np.random.default_rng(4)
        A = np.linalg.qr(crandn(rng, 4, 3))[0]
        split = qr_split(A, n_lead=3)
        diag = np.diagonal(split.R)
        npt.assert_allclose(np.abs(diag), 1.0, atol=1e-10)
        # Q^H A upper triangular
        prod = split.Q.conj().T @ A
        assert np.max(np.abs(np.tril(prod[:3, :3], -1))) < 1e-10

    def test_factorization_property(self):
        rng = np.random.default_rng(5)
        for shape in [(4, 2), (5, 5), (3, 2)]:
            A = crandn(rng, *shape)
            split = qr_split(A, n_lead=shape[1])
            Q = split.Q
            npt.assert_allclose(Q.conj().T @ Q, np.eye(shape[0]), atol=1e-10)
            assert np.linalg.norm(A - Q @ split.R) / np.linalg.norm(A) < 1e-10
            k = min(shape)
            lower = split.R[:k, :k][np.tril_indices(k, -1)]
            assert np.all(np.abs(lower) < 1e-12)
            assert np.all(np.diagonal(split.R)[:k].real >= -1e-12)

    def test_n_lead_out_of_range(self):
        with pytest.raises(DimensionError):
            qr_split(np.eye(3), n_lead=4)


class TestMmseInverse:
    def test_identity(self):
        npt.assert_allclose(mmse_inverse(np.eye(4), 0.0), np.eye(4), atol=1e-12)

    def test_diagonal_scaling(self):
        npt.assert_allclose(mmse_inverse(2.0 * np.eye(2), 0.0), 0.5 * np.eye(2),
                            atol=1e-12)

    def test_regularized_identity(self):
        npt.assert_allclose(mmse_inverse(np.eye(2), 1.0), 0.5 * np.eye(2),
                            atol=1e-12)

    def test_exact_inverse_property(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            H = crandn(rng, 4, 4)
            npt.assert_allclose(mmse_inverse(H, 0.0) @ H, np.eye(4), atol=1e-8)

    def test_singular_zero_alpha_raises(self):
        with pytest.raises(SingularMatrixError):
            mmse_inverse(np.ones((2, 2)), 0.0)

    def test_wide_zero_alpha_raises(self):
        rng = np.random.default_rng(7)
        with pytest.raises(SingularMatrixError):
            mmse_inverse(crandn(rng, 2, 4), 0.0)
