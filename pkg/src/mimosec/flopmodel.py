"""Symbolic FLOP accounting for the precoding pipelines.

Two views are provided: :func:`gmi_pipeline_flops` evaluates the closed-form
six-step cost model of the GMI-based SO-THP pipeline, and :class:`FlopLedger`
accumulates instrumented per-decomposition charges while a solver actually
runs. Both charge decompositions with the same per-operation formulas, so
ledger totals are comparable across algorithms.
"""

from dataclasses import dataclass, field
from fractions import Fraction

__all__ = ["FlopLedger", "gmi_pipeline_flops", "cost_svd_thin", "cost_svd",
           "cost_svd_full_basis", "cost_qr", "cost_mmse_inverse",
           "cost_combine", "cost_feedback_assembly"]


@dataclass
class FlopLedger:
    """Ordered list of (label, flop count) steps with their running total."""

    steps: list = field(default_factory=list)

    def add(self, label: str, count) -> None:
        self.steps.append((label, int(round(count))))

    @property
    def total(self) -> int:
        return sum(count for _, count in self.steps)

    def merged(self) -> dict:
        """Per-label sums, preserving first-seen order."""
        out: dict = {}
        for label, count in self.steps:
            out[label] = out.get(label, 0) + count
        return out


# Per-operation charges. p is the small dimension of the operand, q the large
# one. "thin" SVDs produce singular values plus the thin factors; the full
# variant additionally produces the complete basis on the large side (needed
# for null-space extraction), which makes the large dimension dominant.

def cost_svd_thin(p: int, q: int) -> int:
    return 32 * (q * p ** 2 + p ** 3)


def cost_svd(p: int, q: int) -> int:
    return int(64 * (Fraction(9, 8) * p ** 3 + q * p ** 2 + Fraction(1, 2) * q ** 2 * p))


def cost_svd_full_basis(p: int, q: int) -> int:
    return int(64 * (Fraction(9, 8) * q ** 3 + p * q ** 2 + Fraction(1, 2) * p ** 2 * q))


def cost_qr(p: int, q: int) -> int:
    """Economy QR of a tall p x q operand."""
    return int(16 * (p ** 2 * q + p * q ** 2 + Fraction(1, 3) * q ** 3))


def cost_mmse_inverse(p: int, q: int) -> int:
    """Regularized inversion of a p x q channel (Gram build, solve, product)."""
    return 2 * q ** 3 - 2 * q ** 2 + q + 16 * p * q ** 2


def cost_combine(p: int, q: int) -> int:
    """Combining-matrix application forming a p-row effective channel."""
    return 16 * p * q ** 2


def cost_feedback_assembly(n_rx_total: int, n_tx: int) -> int:
    return 16 * n_rx_total * n_tx ** 2


def gmi_pipeline_flops(R: int, N_t: int, N_r: int, N_R: int) -> FlopLedger:
    """Closed-form cost of the GMI-based SO-THP pipeline for R users.

    The six steps are: the per-user ordering SVDs, the regularized channel
    inversion, the per-user QR factorizations, the combining products, the
    effective-channel SVDs (each summed over the shrinking user set), and the
    final feedback-filter assembly.
    """
    if min(R, N_t, N_r, N_R) < 0:
        raise ValueError("dimensions must be non-negative")
    stages = range(1, R + 1)
    ledger = FlopLedger()
    ledger.add("ordering_svd", 32 * R * (N_t * N_r ** 2 + N_r ** 3))
    ledger.add("mmse_inversion",
               2 * N_t ** 3 - 2 * N_t ** 2 + N_t + 16 * N_R * N_t ** 2)
    ledger.add("qr_factorization",
               sum(16 * r * (Fraction(N_t ** 2 * N_r)
                             + N_t * N_r ** 2 + Fraction(N_r ** 3, 3)) for r in stages))
    ledger.add("combining_product", sum(16 * r * N_R * N_t ** 2 for r in stages))
    ledger.add("effective_svd",
               sum(64 * r * (Fraction(9, 8) * N_r ** 3 + N_t * N_r ** 2
                             + Fraction(1, 2) * N_t ** 2 * N_r) for r in stages))
    ledger.add("feedback_assembly", cost_feedback_assembly(N_R, N_t))
    return ledger
