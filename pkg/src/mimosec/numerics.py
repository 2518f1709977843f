"""Decomposition primitives used by every precoder.

All routines operate on small complex matrices (at most ~16x16) and follow
deterministic phase conventions so that repeated runs produce identical
filters.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularMatrixError

__all__ = ["SvdSplit", "QrSplit", "svd_split", "qr_split", "mmse_inverse",
           "default_rank_tol"]


@dataclass(frozen=True)
class SvdSplit:
    """SVD of a matrix with the right singular basis split at the numerical rank.

    Attributes
    ----------
    U : np.ndarray
        Left singular vectors (full, m x m).
    S : np.ndarray
        Singular values, non-negative and sorted in descending order.
    V1 : np.ndarray
        Right singular vectors spanning the row space (n x rank).
    V0 : np.ndarray
        Right singular vectors spanning the null space (n x (n - rank)).
    """

    U: np.ndarray
    S: np.ndarray
    V1: np.ndarray
    V0: np.ndarray

    @property
    def rank(self) -> int:
        return self.V1.shape[1]

    @property
    def V(self) -> np.ndarray:
        """Full right singular basis ``[V1 V0]``."""
        return np.hstack([self.V1, self.V0])


@dataclass(frozen=True)
class QrSplit:
    """Complete QR factorization with the orthonormal factor split in two.

    ``Q0`` holds the leading columns (the economy factor when ``n_lead`` equals
    the column count of the input), ``Q1`` the remaining orthonormal columns,
    and ``R`` is upper triangular with a real non-negative diagonal.
    """

    Q0: np.ndarray
    Q1: np.ndarray
    R: np.ndarray

    @property
    def Q(self) -> np.ndarray:
        return np.hstack([self.Q0, self.Q1])


def default_rank_tol(A: np.ndarray, s_max: float) -> float:
    """Standard numerical-rank tolerance: max(m, n) * eps * largest singular value."""
    return max(A.shape) * np.finfo(float).eps * s_max


def _phase_normalize_columns(V: np.ndarray) -> np.ndarray:
    """Unit-modulus factors that make the largest-magnitude entry of each column
    of ``V`` real positive."""
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return np.conj(phases)


def svd_split(A: np.ndarray, rank_tol: float | None = None) -> SvdSplit:
    """Singular value decomposition with a signal/null split of the right basis.

    Parameters
    ----------
    A : np.ndarray
        Non-empty complex matrix (m x n).
    rank_tol : float, optional
        Threshold separating signal from null singular values. Defaults to
        ``max(m, n) * eps * S_max``.

    Returns
    -------
    SvdSplit
        Satisfies ``A = U @ diag(S) @ [V1 V0]^H`` (with a rectangular diagonal)
        to within 1e-10 relative Frobenius error, and ``norm(A @ V0) < 1e-9``.

    Raises
    ------
    DimensionError
        If ``A`` is empty.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"svd_split requires a non-empty 2-D matrix, got shape {A.shape}")
    U, S, Vh = np.linalg.svd(A, full_matrices=True)
    V = Vh.conj().T

    # Deterministic sign convention: largest-magnitude entry of each right
    # singular vector is real positive; paired left vectors absorb the phase.
    phases = _phase_normalize_columns(V)
    V = V * phases
    k = min(A.shape)
    U[:, :k] = U[:, :k] * phases[:k]

    if rank_tol is None:
        rank_tol = default_rank_tol(A, S[0] if S.size else 0.0)
    elif rank_tol <= 0:
        raise DimensionError("rank_tol must be positive")
    rank = int(np.sum(S > rank_tol))
    return SvdSplit(U=U, S=S, V1=V[:, :rank], V0=V[:, rank:])


def qr_split(A: np.ndarray, n_lead: int) -> QrSplit:
    """Complete QR factorization; ``Q0`` holds the first ``n_lead`` columns.

    The diagonal of ``R`` is forced real non-negative by column phase rotation
    so the factorization is deterministic.

    Raises
    ------
    DimensionError
        If ``n_lead`` exceeds the column count of the orthonormal factor.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"qr_split requires a non-empty 2-D matrix, got shape {A.shape}")
    m = A.shape[0]
    if not 0 <= n_lead <= m:
        raise DimensionError(f"n_lead={n_lead} out of range for an {m}-column orthonormal factor")
    Q, R = np.linalg.qr(A, mode="complete")
    k = min(A.shape)
    diag = R[np.arange(k), np.arange(k)]
    mags = np.abs(diag)
    phases = np.where(mags > 0, diag / np.where(mags > 0, mags, 1.0), 1.0)
    R[:k, :] = R[:k, :] * np.conj(phases)[:, None]
    Q[:, :k] = Q[:, :k] * phases
    return QrSplit(Q0=Q[:, :n_lead], Q1=Q[:, n_lead:], R=R)


def mmse_inverse(H: np.ndarray, alpha: float) -> np.ndarray:
    """Regularized (MMSE) channel inversion ``(H^H H + alpha I)^{-1} H^H``.

    For ``alpha = 0`` and square nonsingular ``H`` this equals ``H^{-1}``.

    Raises
    ------
    SingularMatrixError
        If ``alpha = 0`` and ``H^H H`` is singular.
    """
    H = np.asarray(H, dtype=complex)
    if alpha < 0:
        raise DimensionError("alpha must be non-negative")
    n = H.shape[1]
    gram = H.conj().T @ H + alpha * np.eye(n)
    if alpha == 0.0:
        s = np.linalg.svd(gram, compute_uv=False)
        if s[-1] <= default_rank_tol(gram, s[0]):
            raise SingularMatrixError("H^H H is singular and alpha = 0")
    return np.linalg.solve(gram, H.conj().T)
