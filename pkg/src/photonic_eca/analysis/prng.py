"""Middle-column bit streams and a small statistical battery."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import stats

from ..core import WORD_BITS, Boundary, Generation, RuleTable, iterate_words

MIN_BITS = 1024


def middle_column_bits(r: RuleTable, init: Generation, n_bits: int) -> np.ndarray:
    """States of cell ``width // 2`` at steps 1..n_bits (the seed row excluded).

    Under a dead boundary the lattice must be wide enough that nothing from
    the edges can reach the center column in ``n_bits`` steps.
    """
    if n_bits < 0:
        raise ValueError("n_bits must be >= 0")
    if init.boundary is Boundary.FIXED_DEAD and n_bits > init.width // 2:
        raise ValueError(f"width {init.width} too small for {n_bits} bits; need >= {2 * n_bits + 1}")
    center = init.width // 2
    word, shift = center // WORD_BITS, np.uint64(center % WORD_BITS)
    out = np.empty(n_bits, dtype=np.uint8)
    for t, words in enumerate(iterate_words(init, r, n_bits)):
        out[t] = int(words[word] >> shift) & 1
    return out


@dataclass(frozen=True)
class RandomnessReport:
    n_bits: int
    monobit_z: float
    lag1_autocorrelation: float
    runs_z: float
    block_chi2_pvalue: float
    period_found: Optional[int]

    def as_dict(self) -> dict:
        return asdict(self)


def monobit_z(bits: np.ndarray) -> float:
    n = bits.size
    return float((2 * int(bits.sum()) - n) / math.sqrt(n))


def lag1_autocorrelation(bits: np.ndarray) -> float:
    s = 2.0 * bits.astype(float) - 1.0
    return float(np.dot(s[:-1], s[1:]) / (s.size - 1))


def runs_z(bits: np.ndarray) -> float:
    """Wald-Wolfowitz runs statistic; nan when only one symbol occurs."""
    n = bits.size
    n1 = int(bits.sum())
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        return math.nan
    runs = 1 + int(np.count_nonzero(np.diff(bits.astype(np.int8))))
    mu = 2.0 * n1 * n0 / n + 1.0
    var = 2.0 * n1 * n0 * (2.0 * n1 * n0 - n) / (n * n * (n - 1.0))
    return float((runs - mu) / math.sqrt(var))


def block_chi2_pvalue(bits: np.ndarray, block: int = 8) -> float:
    m = bits.size // block
    if m == 0:
        return math.nan
    blocks = bits[: m * block].reshape(m, block).astype(np.int64)
    values = blocks @ (1 << np.arange(block - 1, -1, -1))
    observed = np.bincount(values, minlength=1 << block)
    expected = m / (1 << block)
    chi2 = float(((observed - expected) ** 2).sum() / expected)
    return float(stats.chi2.sf(chi2, (1 << block) - 1))


def find_period(bits: np.ndarray) -> Optional[int]:
    """Smallest p such that the second half of the stream repeats with period p.

    At least two full repetitions must fit in the second half, so p runs up
    to n/4. Returns None when no such p exists.
    """
    n = bits.size
    half = bits[n // 2:]
    h = half.size
    for p in range(1, h // 2 + 1):
        if np.array_equal(half[:-p], half[p:]):
            return p
    return None


def randomness_battery(bits) -> RandomnessReport:
    b = np.asarray(bits, dtype=np.uint8)
    if b.ndim != 1 or b.size < MIN_BITS:
        raise ValueError(f"need at least {MIN_BITS} bits, got {b.size}")
    if not np.isin(b, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    return RandomnessReport(int(b.size), monobit_z(b), lag1_autocorrelation(b), runs_z(b),
                            block_chi2_pvalue(b), find_period(b))
