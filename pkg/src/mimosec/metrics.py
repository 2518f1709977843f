"""Capacities, secrecy rates, the high-SNR secrecy limit, BER counting, and
instrumented FLOP measurement."""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, generate_channels
from .errors import ConfigurationError, SingularMatrixError, ValidationError
from .flopmodel import FlopLedger, cost_mmse_inverse
from .numerics import svd_split
from . import precoders

__all__ = ["SecrecyReport", "BerCounter", "capacity_user", "capacity_max",
           "secrecy_rate", "secrecy_rate_an", "secrecy_limit", "ber_accumulate",
           "flops_measured"]

_LN2 = np.log(2.0)


@dataclass
class SecrecyReport:
    """Secrecy-rate breakdown for one channel pair (bits/s/Hz)."""

    snr_db: float
    c_bob: float
    c_eve: float
    c_secrecy: float
    limit: float | None = None


@dataclass
class BerCounter:
    errors: int = 0
    total: int = 0

    @property
    def ber(self) -> float:
        return self.errors / self.total if self.total else 0.0


def _log2det_posdef(A: np.ndarray) -> float:
    _, logdet = np.linalg.slogdet(A)
    return float(logdet / _LN2)


def _check_noise_cov(noise_cov: np.ndarray) -> np.ndarray:
    noise_cov = np.asarray(noise_cov, dtype=complex)
    herm = (noise_cov + noise_cov.conj().T) / 2.0
    if np.linalg.eigvalsh(herm)[0] <= 0:
        raise ConfigurationError("noise covariance must be positive definite")
    return noise_cov


def capacity_user(H_r: np.ndarray, P_r: np.ndarray, noise_cov: np.ndarray) -> float:
    """Achievable rate ``log2 det(I + noise_cov^{-1} H P P^H H^H)`` in bits/s/Hz."""
    noise_cov = _check_noise_cov(noise_cov)
    Q = np.asarray(H_r, dtype=complex) @ np.asarray(P_r, dtype=complex)
    A = np.eye(Q.shape[0]) + np.linalg.solve(noise_cov, Q @ Q.conj().T)
    return max(0.0, _log2det_posdef(A))


def capacity_max(H_r: np.ndarray, noise_cov: np.ndarray) -> float:
    """Interference-free capacity ceiling: rate through the channel's own
    right singular beams."""
    return capacity_user(H_r, svd_split(np.asarray(H_r, dtype=complex)).V1, noise_cov)


def _validate_covariance(Q: np.ndarray, name: str) -> np.ndarray:
    Q = np.asarray(Q, dtype=complex)
    scale = max(1.0, float(np.abs(Q).max()) if Q.size else 1.0)
    if np.abs(Q - Q.conj().T).max() > 1e-9 * scale:
        raise ValidationError(f"{name} must be Hermitian")
    if np.linalg.eigvalsh(Q).min() < -1e-9 * scale:
        raise ValidationError(f"{name} must be positive semidefinite")
    return Q


def secrecy_rate(H_ba: np.ndarray, H_ea: np.ndarray, Q_s: np.ndarray,
                 snr_db: float = float("nan")) -> SecrecyReport:
    """Secrecy rate without artificial noise, clamped at zero.

    ``c_bob = log2 det(I + H_ba Q_s H_ba^H)`` and likewise for the
    eavesdropper; the secrecy rate is their difference clamped at zero.
    """
    Q_s = _validate_covariance(Q_s, "signal covariance")
    H_ba = np.asarray(H_ba, dtype=complex)
    H_ea = np.asarray(H_ea, dtype=complex)
    c_bob = _log2det_posdef(np.eye(H_ba.shape[0]) + H_ba @ Q_s @ H_ba.conj().T)
    c_eve = _log2det_posdef(np.eye(H_ea.shape[0]) + H_ea @ Q_s @ H_ea.conj().T)
    return SecrecyReport(snr_db=snr_db, c_bob=c_bob, c_eve=c_eve,
                         c_secrecy=max(0.0, c_bob - c_eve))


def secrecy_rate_an(H_ba: np.ndarray, H_ea: np.ndarray, Q_s: np.ndarray,
                    Q_s_an: np.ndarray, snr_db: float = float("nan")) -> SecrecyReport:
    """Secrecy rate with artificial noise jamming the eavesdropper.

    The eavesdropper's rate is computed with the jamming covariance folded in
    as extra noise; the legitimate term assumes the AN lies in the user's null
    space and is therefore unchanged.
    """
    Q_s = _validate_covariance(Q_s, "signal covariance")
    Q_s_an = _validate_covariance(Q_s_an, "AN covariance")
    H_ba = np.asarray(H_ba, dtype=complex)
    H_ea = np.asarray(H_ea, dtype=complex)
    c_bob = _log2det_posdef(np.eye(H_ba.shape[0]) + H_ba @ Q_s @ H_ba.conj().T)
    jam = np.eye(H_ea.shape[0]) + H_ea @ Q_s_an @ H_ea.conj().T
    sig = H_ea @ Q_s @ H_ea.conj().T
    c_eve = _log2det_posdef(np.eye(H_ea.shape[0]) + np.linalg.solve(jam, sig))
    return SecrecyReport(snr_db=snr_db, c_bob=c_bob, c_eve=c_eve,
                         c_secrecy=max(0.0, c_bob - c_eve))


def secrecy_limit(H_ba: np.ndarray, H_ea: np.ndarray) -> float:
    """High-SNR secrecy asymptote ``log2 det((H_ea H_ea^H)^{-1} H_ba H_ba^H)``.

    This is the constant the secrecy rate converges to as the transmit power
    grows without bound under an isotropic (unitary-precoder) covariance,
    provided the legitimate Gram matrix dominates the eavesdropper's.

    Raises
    ------
    SingularMatrixError
        If the eavesdropper Gram matrix is singular.
    """
    H_ba = np.asarray(H_ba, dtype=complex)
    H_ea = np.asarray(H_ea, dtype=complex)
    gram_e = H_ea @ H_ea.conj().T
    s = np.linalg.svd(gram_e, compute_uv=False)
    if s[-1] <= max(gram_e.shape) * np.finfo(float).eps * s[0]:
        raise SingularMatrixError("eavesdropper Gram matrix is singular")
    _, logdet = np.linalg.slogdet(np.linalg.solve(gram_e, H_ba @ H_ba.conj().T))
    return float(logdet / _LN2)


def ber_accumulate(tx_bits: np.ndarray, rx_bits: np.ndarray,
                   counter: BerCounter) -> BerCounter:
    """Fold one frame's bit errors into a running counter."""
    tx_bits = np.asarray(tx_bits).ravel()
    rx_bits = np.asarray(rx_bits).ravel()
    if tx_bits.size != rx_bits.size:
        raise ValidationError(
            f"bit stream lengths differ: {tx_bits.size} vs {rx_bits.size}")
    counter.errors += int(np.sum(tx_bits != rx_bits))
    counter.total += tx_bits.size
    return counter


_LINEAR_FLOPS = {"ZF": "zf_inversion", "MMSE": "mmse_inversion"}


def flops_measured(algorithm: str, dims, seed: int = 0) -> FlopLedger:
    """Instrumented decomposition-level FLOP count of one solver run.

    Every SVD/QR/inversion the named algorithm actually invokes is charged by
    the shared per-operation cost formulas, so totals are comparable across
    algorithms. The run uses a channel draw derived deterministically from
    ``dims`` and ``seed``.

    Parameters
    ----------
    algorithm : str
        Sweep-facing algorithm name ("ZF", "MMSE", "BD", "SO-THP",
        "SO-THP+GMI", "SO-THP+S-GMI", "LR-SO-THP+S-GMI").
    dims : tuple
        ``(T, N_t, N_r)`` users / transmit / receive antenna counts.
    """
    T, N_t, N_r = dims
    channels = generate_channels(T=T, K=1, N_t=N_t, N_r=N_r, N_k=N_r,
                                 m=1.0, seed=seed)
    ledger = FlopLedger()
    name = algorithm.upper().replace(" ", "")
    if name in _LINEAR_FLOPS:
        ledger.add(_LINEAR_FLOPS[name], cost_mmse_inverse(T * N_r, N_t))
        return ledger
    if name == "BD":
        blocks = [(u, channels.H_users[u]) for u in range(T)]
        precoders._bd_candidates(blocks, 0.0, ledger)
        return ledger
    inner = precoders.ALGORITHM_INNERS.get(name)
    if inner is None:
        raise ConfigurationError(f"unknown algorithm {algorithm!r}")
    noise_cov = 0.1 * np.eye(N_r)
    precoders.so_thp_solve(channels, inner, alpha=T * N_r * 0.1,
                           noise_cov=noise_cov, flops=ledger)
    return ledger
