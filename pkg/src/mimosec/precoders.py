"""Transmit/receive filter construction for the MU-MIMO downlink.

Linear precoders (ZF, regularized inversion, block diagonalization), the
QR-based channel-inversion factorizations with and without lattice reduction,
the Tomlinson-Harashima feedback structure, and the successively optimized
composites that order users by their capacity-loss gap.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .errors import (ConfigurationError, DegenerateOrderingError,
                     SingularMatrixError, ValidationError)
from .flopmodel import (FlopLedger, cost_combine, cost_feedback_assembly,
                        cost_mmse_inverse, cost_qr, cost_svd, cost_svd_full_basis,
                        cost_svd_thin)
from .lattice import clll_reduce
from .modem import modulo_reduce, power_normalizer
from .numerics import mmse_inverse, qr_split, svd_split

__all__ = ["PrecodingSolution", "zf_precoder", "mmse_precoder", "bd_precoder",
           "gmi_filters", "sgmi_filters", "thp_assemble", "thp_transmit",
           "thp_receive", "so_thp_solve", "apply_an",
           "INNER_KINDS", "ALGORITHM_INNERS"]

INNER_KINDS = ("BD", "GMI", "SGMI", "LR_SGMI")

# Sweep-facing algorithm names mapped to the inner factorization they use.
ALGORITHM_INNERS = {
    "SO-THP": "BD",
    "SO-THP+GMI": "GMI",
    "SO-THP+S-GMI": "SGMI",
    "LR-SO-THP+S-GMI": "LR_SGMI",
}


def _charge(flops: FlopLedger | None, label: str, count: int) -> None:
    if flops is not None:
        flops.add(label, count)


@dataclass
class PrecodingSolution:
    """All filters for one precoded downlink transmission.

    ``F`` is the feedforward filter (columns grouped per precoding position),
    ``B`` the unit-diagonal lower-triangular feedback filter, ``D`` the
    block-diagonal receive filter with unitary per-user blocks, and ``G`` the
    diagonal scaling applied at the receivers. ``order[i]`` is the original
    index of the user assigned to precoding position ``i``.

    For the lattice-reduced variant, ``lattice_transforms`` records the per-
    position unimodular transforms the filters were built from (identities for
    the other inners). ``H_design`` is the reordered design channel the
    feedback filter was assembled against.
    """

    F: np.ndarray
    B: np.ndarray
    D: np.ndarray
    G: np.ndarray
    order: np.ndarray
    beta: float
    P_an: np.ndarray | None = None
    inner: str = ""
    alpha: float = 0.0
    lattice_transforms: list = field(default_factory=list)
    H_design: np.ndarray | None = None
    selection_trace: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def n_users(self) -> int:
        return len(self.order)

    @property
    def n_rx(self) -> int:
        return self.B.shape[0] // len(self.order)

    def position_of(self, user: int) -> int:
        return int(np.nonzero(self.order == user)[0][0])


def zf_precoder(H: np.ndarray) -> np.ndarray:
    """Zero-forcing precoder ``H^H (H H^H)^{-1}`` for a full row rank channel."""
    H = np.asarray(H, dtype=complex)
    gram = H @ H.conj().T
    s = np.linalg.svd(gram, compute_uv=False)
    if s[-1] <= max(gram.shape) * np.finfo(float).eps * s[0]:
        raise SingularMatrixError("channel is rank deficient; ZF inverse undefined")
    return np.linalg.solve(gram, H).conj().T


def mmse_precoder(H: np.ndarray, alpha: float) -> np.ndarray:
    """Regularized channel-inversion precoder; approaches ZF as alpha -> 0."""
    return mmse_inverse(H, alpha)


def _null_basis(H_others: np.ndarray | None, n_tx: int,
                flops: FlopLedger | None) -> np.ndarray:
    if H_others is None or H_others.shape[0] == 0:
        return np.eye(n_tx, dtype=complex)
    split = svd_split(H_others)
    _charge(flops, "null_space_svd", cost_svd_full_basis(H_others.shape[0], n_tx))
    if split.V0.shape[1] == 0:
        raise ConfigurationError("stacked interference channel leaves no null space")
    return split.V0


def _bd_factor(H_r: np.ndarray, H_others: np.ndarray | None,
               flops: FlopLedger | None):
    """Null-space projection plus effective-channel SVD for one user."""
    n_rx, n_tx = H_r.shape
    V0 = _null_basis(H_others, n_tx, flops)
    H_eff = H_r @ V0
    split = svd_split(H_eff)
    _charge(flops, "effective_svd", cost_svd(n_rx, V0.shape[1]))
    if split.rank < n_rx:
        raise SingularMatrixError("effective channel lost rank during block diagonalization")
    P = V0 @ split.V1[:, :n_rx]
    D = split.U[:, :n_rx].conj().T
    return P, D


def bd_precoder(H_all: ChannelSet, r: int):
    """Block-diagonalization filters for user ``r`` against all other users.

    Returns
    -------
    (P_r, D_r)
        Precoder placing user ``r`` in the null space of every other user's
        channel (``norm(H_j @ P_r) < 1e-9`` for j != r) and the unitary
        receive filter that diagonalizes the effective channel.
    """
    others = [H for j, H in enumerate(H_all.H_users) if j != r]
    H_others = np.vstack(others) if others else None
    return _bd_factor(H_all.H_users[r], H_others, None)


@dataclass
class _Candidate:
    user: int
    P: np.ndarray
    D: np.ndarray
    L: np.ndarray
    M_eff: np.ndarray


def _bd_candidates(blocks, alpha, flops):
    del alpha  # the BD factorization is unregularized
    cands = []
    for i, (user, H_u) in enumerate(blocks):
        others = [H for j, (_, H) in enumerate(blocks) if j != i]
        H_others = np.vstack(others) if others else None
        P, D = _bd_factor(H_u, H_others, flops)
        cands.append(_Candidate(user=user, P=P, D=D,
                                L=np.eye(H_u.shape[0], dtype=complex), M_eff=H_u))
    return cands


def _ql_factor(A: np.ndarray):
    """Unitary Q and lower-triangular L with real positive diagonal, A = Q L."""
    J = np.eye(A.shape[0])[::-1]
    Qr, Rr = np.linalg.qr(J @ A @ J)
    Q, Lo = J @ Qr @ J, J @ Rr @ J
    d = np.diagonal(Lo).copy()
    mags = np.abs(d)
    phases = np.where(mags > 0, d / np.where(mags > 0, mags, 1.0), 1.0)
    return Q * phases[None, :], Lo * np.conj(phases)[:, None]


def _gmi_candidates(blocks, alpha, flops, combine=False, reduce_lattice=False,
                    delta=0.75):
    M_stack = np.vstack([H for _, H in blocks])
    n_rows, n_tx = M_stack.shape
    G = mmse_inverse(M_stack, alpha)
    _charge(flops, "mmse_inversion", cost_mmse_inverse(n_rows, n_tx))
    cands = []
    col = 0
    for user, H_u in blocks:
        n_rx = H_u.shape[0]
        G_n = G[:, col:col + n_rx]
        col += n_rx
        L = np.eye(n_rx, dtype=complex)
        basis = G_n
        svd_in = H_u
        if reduce_lattice:
            red = clll_reduce(G_n.conj().T, delta=delta, flops=flops)
            L = red.L
            basis = red.H_red.conj().T   # the reduced inverse block G_n @ L
            svd_in = red.H_red
        qr = qr_split(basis, n_rx)
        _charge(flops, "qr_factorization", cost_qr(n_tx, n_rx))
        H_in = svd_in @ qr.Q0
        if combine:
            # Combining matrix from the cited construction is underdetermined;
            # identity fallback, with the combining product still performed.
            H_in = H_in @ np.eye(n_rx, dtype=complex)
            _charge(flops, "combining_product", cost_combine(n_rows, n_tx))
        split = svd_split(H_in)
        _charge(flops, "effective_svd", cost_svd(*H_in.shape))
        if split.rank < n_rx:
            raise SingularMatrixError("inverted channel block lost rank")
        P = qr.Q0 @ split.V1[:, :n_rx]
        if reduce_lattice:
            # The reduced basis leaves the user's physical block non-diagonal;
            # a triangularizing receive block lets the feedback filter absorb
            # it while keeping the balanced reduced-basis stream gains.
            Q_rx, _ = _ql_factor(H_u @ P)
            D = Q_rx.conj().T
        else:
            D = split.U[:, :n_rx].conj().T
        cands.append(_Candidate(user=user, P=P, D=D, L=L, M_eff=H_u))
    return cands


_INNER_FNS = {
    "BD": _bd_candidates,
    "GMI": lambda blocks, alpha, flops: _gmi_candidates(blocks, alpha, flops, combine=True),
    "SGMI": _gmi_candidates,
    "LR_SGMI": lambda blocks, alpha, flops: _gmi_candidates(blocks, alpha, flops,
                                                            reduce_lattice=True),
}


def _filters_for_all(H_all: ChannelSet, alpha: float, combine: bool):
    blocks = list(enumerate(H_all.H_users))
    cands = _gmi_candidates(blocks, alpha, None, combine=combine)
    P = np.hstack([c.P for c in cands])
    M = _block_diag([c.D for c in cands])
    return P, M


def gmi_filters(H_all: ChannelSet, alpha: float):
    """QR-based channel-inversion filters with the combining step, all users.

    Returns the stacked precoder ``P`` (column blocks per user) and the
    block-diagonal receive filter ``M``.
    """
    return _filters_for_all(H_all, alpha, combine=True)


def sgmi_filters(H_all: ChannelSet, alpha: float):
    """Simplified variant of :func:`gmi_filters`: the combining step is
    omitted, leaving small residual inter-user leakage."""
    return _filters_for_all(H_all, alpha, combine=False)


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = np.zeros((n, m), dtype=complex)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def thp_assemble(D: np.ndarray, H: np.ndarray, F: np.ndarray):
    """Feedback filter and receiver scaling from the effective channel D H F.

    Returns ``(B, G)`` with ``B`` the unit-diagonal lower-triangular part of
    the row-normalized effective channel and ``G`` the diagonal normalizer,
    so that ``G @ (D @ H @ F)`` equals ``B`` on and below the diagonal.

    Raises
    ------
    DegenerateOrderingError
        If any diagonal entry of ``D H F`` is (numerically) zero.
    """
    E = np.asarray(D) @ np.asarray(H) @ np.asarray(F)
    diag = np.diagonal(E).copy()
    tol = 1e-12 * max(1.0, float(np.abs(E).max()))
    if np.any(np.abs(diag) <= tol):
        raise DegenerateOrderingError("zero diagonal in the effective channel; "
                                      "ordering/filter combination degenerate")
    G = np.diag(1.0 / diag)
    B = np.tril(G @ E)
    np.fill_diagonal(B, 1.0)
    return B, G


def thp_transmit(s: np.ndarray, B: np.ndarray, tau: float) -> np.ndarray:
    """Successive interference pre-cancellation with modulo reduction.

    ``x_i = mod(s_i - sum_{j<i} B_ij x_j)``; accepts a vector or a matrix of
    frame columns. Each output component is bounded by ``tau/2 * sqrt(2)``.
    """
    B = np.asarray(B)
    if np.max(np.abs(np.triu(B, 1))) > 1e-9 or np.max(np.abs(np.diagonal(B) - 1.0)) > 1e-9:
        raise ValidationError("feedback filter must be lower triangular with unit diagonal")
    s = np.asarray(s, dtype=complex)
    squeeze = s.ndim == 1
    S = s[:, None] if squeeze else s
    X = np.zeros_like(S)
    for i in range(S.shape[0]):
        feedback = B[i, :i] @ X[:i] if i else 0.0
        X[i] = modulo_reduce(S[i] - feedback, tau)
    return X[:, 0] if squeeze else X


def thp_receive(solution: PrecodingSolution, Y: np.ndarray, tau: float) -> np.ndarray:
    """Receive processing for all users: block filters, scaling, and modulo.

    ``Y`` holds the position-ordered, beta-compensated received blocks; the
    output is ready for constellation slicing.
    """
    return modulo_reduce(solution.G @ (solution.D @ np.asarray(Y, dtype=complex)), tau)


def so_thp_solve(H_all: ChannelSet, inner: str, alpha: float,
                 noise_cov: np.ndarray, E_r: float = 1.0,
                 flops: FlopLedger | None = None) -> PrecodingSolution:
    """Successively optimized THP: order users by their capacity-loss gap.

    At each stage the chosen inner factorization produces candidate filters
    for every remaining user; the user minimizing (interference-free capacity
    minus achieved capacity) is fixed at the current position, its channel
    rows are removed, and the procedure repeats. The feedback and scaling
    filters are then assembled in the selected order.

    Parameters
    ----------
    H_all : ChannelSet
        Design-side channel knowledge (user channels are consumed).
    inner : str
        One of ``BD``, ``GMI``, ``SGMI``, ``LR_SGMI``.
    alpha : float
        Regularization for the inversion-based inners (must be positive there).
    noise_cov : np.ndarray
        Per-user receive noise covariance (N_r x N_r, positive definite).
    """
    kind = str(inner).upper().replace("-", "_")
    if kind not in INNER_KINDS:
        raise ConfigurationError(f"unknown inner factorization {inner!r}")
    if kind != "BD" and alpha <= 0:
        raise ConfigurationError("inversion-based inners require alpha > 0")
    noise_cov = np.asarray(noise_cov, dtype=complex)
    eigs = np.linalg.eigvalsh((noise_cov + noise_cov.conj().T) / 2.0)
    if eigs[0] <= 0:
        raise ConfigurationError("noise covariance must be positive definite")

    T = H_all.n_users
    n_tx, n_rx = H_all.n_tx, H_all.n_rx

    c_max = {}
    for r, H_r in enumerate(H_all.H_users):
        split = svd_split(H_r)
        _charge(flops, "ordering_svd", cost_svd_thin(n_rx, n_tx))
        c_max[r] = _capacity(H_r, split.V1, noise_cov)

    inner_fn = _INNER_FNS[kind]
    remaining = list(range(T))
    slots: dict[int, _Candidate] = {}
    trace = []
    for stage in range(T, 0, -1):
        blocks = [(u, H_all.H_users[u]) for u in remaining]
        cands = inner_fn(blocks, alpha, flops)
        gaps = []
        for cand in cands:
            c_j = _capacity(cand.M_eff, cand.P, noise_cov)
            gaps.append((c_max[cand.user] - c_j, cand.user, cand))
        gaps.sort(key=lambda t: (t[0], t[1]))  # ties: smallest user index
        _, chosen, best = gaps[0]
        slots[stage] = best
        trace.append({"stage": stage, "selected": chosen,
                      "gaps": {u: g for g, u, _ in gaps}})
        remaining.remove(chosen)

    order = np.array([slots[pos].user for pos in range(1, T + 1)])
    F = np.hstack([slots[pos].P for pos in range(1, T + 1)])
    D = _block_diag([slots[pos].D for pos in range(1, T + 1)])
    transforms = [slots[pos].L for pos in range(1, T + 1)]
    H_design = np.vstack([H_all.H_users[u] for u in order])
    B, G = thp_assemble(D, H_design, F)
    _charge(flops, "feedback_assembly", cost_feedback_assembly(T * n_rx, n_tx))
    beta = power_normalizer(F, None, E_r)
    return PrecodingSolution(
        F=F, B=B, D=D, G=G, order=order, beta=beta, inner=kind, alpha=alpha,
        lattice_transforms=transforms, H_design=H_design,
        selection_trace=trace,
        metadata={"gmi_combiner": "identity"} if kind == "GMI" else {})


def _capacity(H_eff: np.ndarray, P: np.ndarray, noise_cov: np.ndarray) -> float:
    Q = H_eff @ P
    A = np.eye(Q.shape[0]) + np.linalg.solve(noise_cov, Q @ Q.conj().T)
    _, logdet = np.linalg.slogdet(A)
    return float(logdet / np.log(2.0))


def apply_an(P: np.ndarray, P_an: np.ndarray | None, s: np.ndarray,
             s_an: np.ndarray | None, rho: float, E_r: float) -> np.ndarray:
    """Superimpose the data signal and the artificial-noise jamming signal.

    The data part is scaled to carry ``rho * E_r`` and the jamming part
    ``(1 - rho) * E_r`` (for orthonormal precoders and unit-power inputs).

    Raises
    ------
    ConfigurationError
        If ``rho`` lies outside (0, 1].
    """
    if not 0.0 < rho <= 1.0:
        raise ConfigurationError(f"power fraction rho must lie in (0, 1], got {rho}")
    s = np.asarray(s, dtype=complex)
    x = (P @ s) * np.sqrt(rho * E_r / s.shape[0])
    if rho < 1.0:
        if P_an is None or s_an is None:
            raise ConfigurationError("rho < 1 requires an AN precoder and jamming signal")
        s_an = np.asarray(s_an, dtype=complex)
        x = x + (P_an @ s_an) * np.sqrt((1.0 - rho) * E_r / s_an.shape[0])
    return x
