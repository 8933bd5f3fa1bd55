"""Damage spreading: twin runs differing in one initial cell."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Generation, RuleTable, SpaceTimeDiagram, evolve


class BoundaryReached(RuntimeError):
    """The difference region touched the lattice edge; use a wider lattice."""


@dataclass
class DamageReport:
    difference: SpaceTimeDiagram
    flip_index: int
    left_frontier: list   # min differing index per row, None where no difference
    right_frontier: list  # max differing index per row, None where no difference
    lambda_left: float
    lambda_right: float

    def as_dict(self) -> dict:
        return {"flip_index": self.flip_index, "lambda_left": self.lambda_left,
                "lambda_right": self.lambda_right, "left_frontier": self.left_frontier,
                "right_frontier": self.right_frontier}


def _slope(t: np.ndarray, x: np.ndarray) -> float:
    if t.size < 2:
        return 0.0
    return float(np.polyfit(t, x, 1)[0])


def frontiers(diff: np.ndarray) -> tuple[list, list]:
    left, right = [], []
    for row in diff:
        idx = np.flatnonzero(row)
        left.append(int(idx[0]) if idx.size else None)
        right.append(int(idx[-1]) if idx.size else None)
    return left, right


def damage_spreading(r: RuleTable, init: Generation, flip_index: int, steps: int,
                     tail_fraction: float = 0.5) -> DamageReport:
    """Fit how fast the difference region grows on each side.

    The right-hand speed is fitted over every row; the left-hand speed over
    the last ``tail_fraction`` of rows only, where growth has settled.
    """
    if not 0 <= flip_index < init.width:
        raise IndexError(f"flip_index {flip_index} outside 0..{init.width - 1}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    a = evolve(init, r, steps)
    b = evolve(init.flipped(flip_index), r, steps)
    diff = a.states ^ b.states
    if diff[:, 0].any() or diff[:, -1].any():
        raise BoundaryReached(f"differences reached the lattice edge within {steps} steps "
                              f"(width {init.width}); widen the lattice")
    left, right = frontiers(diff)
    t = np.arange(steps + 1)
    has = np.array([l is not None for l in left])
    spread_r = np.array([x - flip_index if x is not None else 0 for x in right], dtype=float)
    spread_l = np.array([flip_index - x if x is not None else 0 for x in left], dtype=float)
    tail = t >= int(np.floor((1.0 - tail_fraction) * steps))
    lam_r = _slope(t[has], spread_r[has])
    lam_l = _slope(t[has & tail], spread_l[has & tail])
    report_diag = SpaceTimeDiagram(diff, init.boundary, rule_number=r.rule_number)
    return DamageReport(report_diag, flip_index, left, right, lam_l, lam_r)
