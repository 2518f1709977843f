"""Gray-mapped square QAM, the THP modulo operator, and power normalization."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, ValidationError

__all__ = ["SymbolFrame", "map_symbols", "demap_symbols", "modulo_reduce",
           "power_normalizer", "qam_scale", "qam_tau", "SUPPORTED_ORDERS"]

SUPPORTED_ORDERS = (4, 16, 64)


def qam_scale(M: int) -> float:
    """Scaling that gives the odd-integer grid {+-1, +-3, ...} unit average energy."""
    return float(np.sqrt(3.0 / (2.0 * (M - 1))))


def qam_tau(M: int) -> float:
    """THP modulo base for unit-energy M-QAM.

    On the unnormalized odd-integer grid the base is 2*sqrt(M) (twice the
    per-axis span); it scales with the unit-energy normalization factor.
    """
    return 2.0 * np.sqrt(M) * qam_scale(M)


def _check_order(M: int) -> int:
    if M not in SUPPORTED_ORDERS:
        raise ConfigurationError(f"constellation order must be one of {SUPPORTED_ORDERS}, got {M}")
    return int(np.log2(M))


def _gray_encode(n: np.ndarray) -> np.ndarray:
    return n ^ (n >> 1)


def _gray_decode(g: np.ndarray) -> np.ndarray:
    n = g.copy()
    shift = 1
    while (g >> shift).any():
        n ^= g >> shift
        shift += 1
    return n


@dataclass
class SymbolFrame:
    """One frame of constellation symbols with its bit payload and modulo base."""

    bits: np.ndarray
    symbols: np.ndarray
    constellation_order: int
    tau: float


def map_symbols(bits: np.ndarray, M: int) -> SymbolFrame:
    """Map a bit array onto Gray-coded square M-QAM with unit average energy.

    The first half of each symbol's bits selects the in-phase level, the second
    half the quadrature level, each through a binary-reflected Gray code on the
    odd-integer grid.

    Raises
    ------
    ConfigurationError
        If ``M`` is unsupported or the bit count is not divisible by log2(M).
    """
    bits_per_symbol = _check_order(M)
    bits = np.asarray(bits, dtype=int).ravel()
    if bits.size % bits_per_symbol != 0:
        raise ConfigurationError(
            f"bit count {bits.size} not divisible by log2(M)={bits_per_symbol}")
    half = bits_per_symbol // 2
    L = int(np.sqrt(M))
    groups = bits.reshape(-1, bits_per_symbol)
    weights = 1 << np.arange(half - 1, -1, -1)
    gi = groups[:, :half] @ weights
    gq = groups[:, half:] @ weights
    li = _gray_decode(gi)
    lq = _gray_decode(gq)
    scale = qam_scale(M)
    symbols = scale * ((2 * li - (L - 1)) + 1j * (2 * lq - (L - 1)))
    return SymbolFrame(bits=bits, symbols=symbols, constellation_order=M, tau=qam_tau(M))


def demap_symbols(symbols: np.ndarray, M: int) -> np.ndarray:
    """Slice symbols to the nearest M-QAM point and recover the Gray-coded bits."""
    bits_per_symbol = _check_order(M)
    half = bits_per_symbol // 2
    L = int(np.sqrt(M))
    scale = qam_scale(M)
    symbols = np.asarray(symbols, dtype=complex).ravel()

    def levels(coord):
        lv = np.round((coord / scale + (L - 1)) / 2.0).astype(int)
        return np.clip(lv, 0, L - 1)

    gi = _gray_encode(levels(symbols.real))
    gq = _gray_encode(levels(symbols.imag))
    out = np.empty((symbols.size, bits_per_symbol), dtype=int)
    for b in range(half):
        out[:, b] = (gi >> (half - 1 - b)) & 1
        out[:, half + b] = (gq >> (half - 1 - b)) & 1
    return out.ravel()


def modulo_reduce(x: np.ndarray, tau: float) -> np.ndarray:
    """Componentwise THP modulo: real and imaginary parts wrapped into [-tau/2, tau/2).

    The output differs from the input by ``tau`` times a Gaussian-integer
    vector, so the map is idempotent and invariant under tau-lattice shifts.
    """
    if tau <= 0:
        raise ConfigurationError(f"modulo base must be positive, got {tau}")
    x = np.asarray(x, dtype=complex)
    re = x.real - tau * np.floor((x.real + tau / 2.0) / tau)
    im = x.imag - tau * np.floor((x.imag + tau / 2.0) / tau)
    return re + 1j * im


def power_normalizer(P: np.ndarray | None, P_an: np.ndarray | None, E_r: float) -> float:
    """Transmit power normalizer ``beta = sqrt(E_r / (||P||_F^2 + ||P_an||_F^2))``.

    The transmitter scales by ``beta`` and the receiver by ``beta^{-1}`` so the
    radiated power of unit-power symbols equals ``E_r``.

    Raises
    ------
    DegenerateInputError
        If both precoders have zero norm.
    """
    if E_r <= 0:
        raise ConfigurationError(f"transmit power must be positive, got {E_r}")
    total = 0.0
    for mat in (P, P_an):
        if mat is not None:
            total += float(np.linalg.norm(mat) ** 2)
    if total <= 0.0:
        raise DegenerateInputError("zero-norm precoders: power normalizer undefined")
    return float(np.sqrt(E_r / total))


def bits_for_frame(n_symbols: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random payload sized for ``n_symbols`` M-QAM symbols."""
    return rng.integers(0, 2, size=n_symbols * _check_order(M))
