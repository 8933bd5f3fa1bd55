"""Box-counting dimension of the live-cell set of a space-time diagram."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from ..core import SpaceTimeDiagram


@dataclass(frozen=True)
class FractalReport:
    box_sizes: list
    counts: list
    dimension: float
    fit_r2: float

    def as_dict(self) -> dict:
        return asdict(self)


def default_sizes(d: SpaceTimeDiagram) -> list[int]:
    """Powers of two up to half the diagram's longer side."""
    top = max(1, max(d.states.shape) // 2)
    return [1 << k for k in range(top.bit_length())]


def box_counts(states: np.ndarray, size: int) -> int:
    """Number of size x size boxes, anchored at (0, 0), holding a live cell."""
    rows, cols = states.shape
    pr, pc = -rows % size, -cols % size
    padded = np.pad(states.astype(bool), ((0, pr), (0, pc)))
    blocks = padded.reshape(padded.shape[0] // size, size, padded.shape[1] // size, size)
    return int(blocks.any(axis=(1, 3)).sum())


def box_counting_dimension(d: SpaceTimeDiagram, sizes: Optional[Sequence[int]] = None) -> FractalReport:
    if not d.states.any():
        raise ValueError("diagram has no live cells")
    sizes = list(default_sizes(d) if sizes is None else sizes)
    if not sizes or any(s < 1 for s in sizes) or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing positive integers")
    counts = [box_counts(d.states, s) for s in sizes]
    if len(sizes) == 1:
        return FractalReport(sizes, counts, 0.0, 1.0)
    x = np.log(1.0 / np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return FractalReport(sizes, counts, float(slope), r2)
