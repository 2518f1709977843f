"""Flat-fading MU-MIMO channel generation, imperfect CSI, and AN null-space precoders."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .numerics import svd_split

__all__ = ["ChannelSet", "generate_channels", "perturb_csi", "an_null_precoder",
           "complex_gaussian"]


def _rng(seed, *tags: int) -> np.random.Generator:
    """Derived RNG stream: hash of (master seed, entity/trial tags)."""
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(t) for t in tags)))


def complex_gaussian(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """i.i.d. circular complex Gaussian entries with the given variance."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass
class ChannelSet:
    """Per-user and per-eavesdropper channel matrices for one network draw.

    ``H_users[r]`` is N_r x N_t, ``H_eves[k]`` is N_k x N_t. ``m`` is the
    eavesdropper/user gain ratio and ``sigma_e2`` the CSI error variance the
    set was (or will be) perturbed with.
    """

    H_users: list = field(default_factory=list)
    H_eves: list = field(default_factory=list)
    m: float = 1.0
    sigma_e2: float = 0.0

    @property
    def n_users(self) -> int:
        return len(self.H_users)

    @property
    def n_eves(self) -> int:
        return len(self.H_eves)

    @property
    def n_tx(self) -> int:
        return self.H_users[0].shape[1]

    @property
    def n_rx(self) -> int:
        return self.H_users[0].shape[0]

    def stacked(self) -> np.ndarray:
        """Total channel: all user matrices stacked row-wise ((T*N_r) x N_t)."""
        return np.vstack(self.H_users)


def generate_channels(T: int, K: int, N_t: int, N_r: int, N_k: int,
                      m: float, seed: int) -> ChannelSet:
    """Draw a flat-fading network realization.

    User entries are i.i.d. CN(0, 1); eavesdropper entries are i.i.d. CN(0, m),
    i.e. the legitimate gain is fixed and the wire-tap gain scaled by the ratio
    ``m``. Each entity owns a seed-derived stream, so the same seed reproduces
    the same ChannelSet and entities can be drawn concurrently.

    Raises
    ------
    ConfigurationError
        If the antenna budget ``N_t >= T * N_r`` is violated or ``m <= 0``.
    """
    if N_t < T * N_r:
        raise ConfigurationError(f"antenna budget violated: N_t={N_t} < T*N_r={T * N_r}")
    if m <= 0:
        raise ConfigurationError(f"gain ratio m must be positive, got {m}")
    users = [complex_gaussian(_rng(seed, 0, r), (N_r, N_t)) for r in range(T)]
    eves = [complex_gaussian(_rng(seed, 1, k), (N_k, N_t), var=m) for k in range(K)]
    return ChannelSet(H_users=users, H_eves=eves, m=m, sigma_e2=0.0)


def perturb_csi(H: np.ndarray, sigma_e2: float, seed: int) -> np.ndarray:
    """Additive imperfect-CSI model: returns ``H + E`` with E ~ CN(0, sigma_e2).

    ``sigma_e2 = 0`` returns ``H`` unchanged; the same seed reproduces the
    same error matrix.
    """
    if sigma_e2 < 0:
        raise ConfigurationError(f"CSI error variance must be non-negative, got {sigma_e2}")
    H = np.asarray(H, dtype=complex)
    if sigma_e2 == 0:
        return H.copy()
    return H + complex_gaussian(_rng(seed, 2), H.shape, var=sigma_e2)


def an_null_precoder(H_r: np.ndarray, m_dims: int) -> np.ndarray:
    """Artificial-noise precoder: orthonormal basis of the null space of ``H_r``.

    The jamming signal sent through the returned N_t x m_dims matrix does not
    interfere with the receiver behind ``H_r``: ``norm(H_r @ P) < 1e-9``.

    Raises
    ------
    ConfigurationError
        If ``m_dims`` exceeds the null-space dimension of ``H_r``.
    """
    split = svd_split(np.asarray(H_r, dtype=complex))
    null_dim = split.V0.shape[1]
    if m_dims > null_dim:
        raise ConfigurationError(
            f"m_dims={m_dims} exceeds null-space dimension {null_dim} of the channel")
    if m_dims < 1:
        raise ConfigurationError("m_dims must be at least 1")
    return split.V0[:, :m_dims]
