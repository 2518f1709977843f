"""Complex LLL (CLLL) basis reduction over the Gaussian integers.

Used by the lattice-reduction-aided precoder: the per-user blocks of the MMSE
channel inversion are reduced to a better-conditioned basis through a
unimodular transform.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError
from .flopmodel import FlopLedger

__all__ = ["LatticeReduction", "clll_reduce", "orthogonality_defect",
           "round_gaussian", "is_gaussian_integer_matrix", "is_unimodular"]


@dataclass(frozen=True)
class LatticeReduction:
    """Result of reducing a channel-style matrix ``B`` (rows = receive dims).

    ``H_red`` is the reduced matrix in the transposed channel orientation,
    ``H_red^H = B^H @ L``, and ``L`` is the Gaussian-integer unimodular
    transform. ``delta`` is the Lovasz parameter the reduction satisfied.
    """

    H_red: np.ndarray
    L: np.ndarray
    delta: float


def round_gaussian(z: np.ndarray | complex) -> np.ndarray:
    """Nearest Gaussian integer, ties (half-integer parts) rounded toward zero."""
    z = np.asarray(z, dtype=complex)

    def round_half_to_zero(x):
        # round-half-away-from-zero is floor(x + 0.5) for x>=0; pull exact
        # halves back toward zero instead for determinism
        r = np.floor(np.abs(x) + 0.5)
        halves = np.isclose(np.abs(x) + 0.5 - r, 0.0) & (r > 0)
        r = np.where(halves, r - 1, r)
        return np.sign(x) * r

    return round_half_to_zero(z.real) + 1j * round_half_to_zero(z.imag)


def is_gaussian_integer_matrix(L: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.all(np.abs(L - round_gaussian(L)) < tol))


def is_unimodular(L: np.ndarray, tol: float = 1e-9) -> bool:
    return is_gaussian_integer_matrix(L, tol) and abs(abs(np.linalg.det(L)) - 1.0) < tol


def orthogonality_defect(basis: np.ndarray) -> float:
    """Product of column norms over the lattice volume (1 for orthogonal bases)."""
    norms = np.linalg.norm(basis, axis=0)
    vol = np.prod(np.linalg.svd(basis, compute_uv=False))
    if vol <= 0:
        raise SingularMatrixError("rank-deficient basis has no orthogonality defect")
    return float(np.prod(norms) / vol)


def _gso(basis: np.ndarray):
    """Complex Gram-Schmidt: coefficients mu and squared norms of b*_j."""
    n = basis.shape[1]
    bstar = basis.astype(complex).copy()
    mu = np.eye(n, dtype=complex)
    norms2 = np.zeros(n)
    for i in range(n):
        for j in range(i):
            mu[i, j] = (bstar[:, j].conj() @ basis[:, i]) / norms2[j]
            bstar[:, i] = bstar[:, i] - mu[i, j] * bstar[:, j]
        norms2[i] = float(np.real(bstar[:, i].conj() @ bstar[:, i]))
    return mu, norms2


def clll_reduce(B: np.ndarray, delta: float = 0.75,
                flops: FlopLedger | None = None) -> LatticeReduction:
    """Reduce the column lattice of ``B^H`` with the complex LLL algorithm.

    Parameters
    ----------
    B : np.ndarray
        Channel-orientation matrix (rows x N_t style, full row rank). The
        reduced basis satisfies ``H_red^H = B^H @ L``.
    delta : float
        Lovasz parameter in (0.5, 1].
    flops : FlopLedger, optional
        Recorder charged with the work actually performed.

    Returns
    -------
    LatticeReduction
        ``L`` is Gaussian-integer with ``|det L| = 1``; the reduced basis is
        size-reduced (|Re mu|, |Im mu| <= 1/2) and satisfies the Lovasz
        condition with ``delta``.

    Raises
    ------
    SingularMatrixError
        If the basis is rank deficient.
    """
    if not 0.5 < delta <= 1.0:
        raise SingularMatrixError(f"delta must lie in (0.5, 1], got {delta}")
    B = np.asarray(B, dtype=complex)
    basis = B.conj().T.copy()          # columns are the lattice basis vectors
    m, n = basis.shape
    sv = np.linalg.svd(basis, compute_uv=False)
    if n == 0 or sv[-1] <= max(m, n) * np.finfo(float).eps * sv[0]:
        raise SingularMatrixError("clll_reduce requires a full column rank basis")

    L = np.eye(n, dtype=complex)
    mu, norms2 = _gso(basis)
    work = 16 * m * n * n  # initial Gram-Schmidt pass

    def size_reduce(k, j):
        nonlocal work
        c = round_gaussian(mu[k, j])
        if c != 0:
            basis[:, k] -= c * basis[:, j]
            L[:, k] -= c * L[:, j]
            mu[k, :j + 1] -= c * mu[j, :j + 1]
            work += 16 * (m + n)

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if norms2[k] < (delta - abs(mu[k, k - 1]) ** 2) * norms2[k - 1]:
            basis[:, [k - 1, k]] = basis[:, [k, k - 1]]
            L[:, [k - 1, k]] = L[:, [k, k - 1]]
            mu, norms2 = _gso(basis)       # tiny bases: recompute for robustness
            work += 16 * m * n
            k = max(k - 1, 1)
        else:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1

    if flops is not None:
        flops.add("lattice_reduction", work)
    return LatticeReduction(H_red=basis.conj().T, L=L, delta=delta)
