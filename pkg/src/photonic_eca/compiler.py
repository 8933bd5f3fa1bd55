"""Search for weight/threshold realizations of elementary rules.

Weights are restricted to the lattice ``k / scale`` with integer ``k`` in
``[-scale, scale]``, so every neighborhood intensity is an exact integer
multiple of ``1 / scale**2`` and feasibility never depends on float rounding.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .core import RuleTable, rule_from_number
from .photonic import PhotonicConfig

DEFAULT_GRID_STEPS = 41
REFINE_FACTOR = 8
CENSUS_FIELDS = ("rule_number", "feasible", "a_left", "a_center", "a_right", "b", "margin")

# neighborhood n -> (left, center, right)
NEIGHBORHOODS = np.array([[(n >> 2) & 1, (n >> 1) & 1, n & 1] for n in range(8)], dtype=np.int64)


@dataclass(frozen=True)
class CompilationResult:
    rule_number: int
    config: Optional[PhotonicConfig]
    margin: float
    feasible: bool

    def __post_init__(self):
        if self.feasible != (self.config is not None) or self.feasible != (self.margin > 0):
            raise ValueError("feasible, config and margin > 0 must agree")

    def csv_row(self) -> dict:
        if self.config is None:
            return {"rule_number": self.rule_number, "feasible": 0, "a_left": "",
                    "a_center": "", "a_right": "", "b": "", "margin": _fmt(0.0)}
        a_l, a_c, a_r = self.config.weights
        return {"rule_number": self.rule_number, "feasible": 1, "a_left": _fmt(a_l),
                "a_center": _fmt(a_c), "a_right": _fmt(a_r),
                "b": _fmt(self.config.threshold), "margin": _fmt(self.margin)}


def _fmt(x: float) -> str:
    return format(x, ".12g")


def neighborhood_intensities(weights) -> np.ndarray:
    """I[n] = (a_left*l + a_center*c + a_right*r)**2 for n = 0..7."""
    w = np.asarray(weights, dtype=float)
    return (NEIGHBORHOODS @ w) ** 2


def verify_config(cfg: PhotonicConfig, r: RuleTable) -> bool:
    """Exhaustive noiseless check of all 8 neighborhoods."""
    live = neighborhood_intensities(cfg.weights) > cfg.threshold
    return bool(np.array_equal(live.astype(np.uint8), r.lut))


@lru_cache(maxsize=64)
def _lattice(scale: int, lo: Optional[tuple] = None, hi: Optional[tuple] = None):
    """Integer weight triples in the box [lo, hi] (default +-scale) and their intensities."""
    lo = lo or (-scale,) * 3
    hi = hi or (scale,) * 3
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    return grid, (grid @ NEIGHBORHOODS.T) ** 2


def _margins(intens: np.ndarray, live_mask: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lo_live = intens[:, live_mask].min(axis=1)
    hi_dead = intens[:, ~live_mask].max(axis=1)
    return lo_live - hi_dead, lo_live, hi_dead


def _canonical_sign(k: np.ndarray) -> np.ndarray:
    nz = k[k != 0]
    return -k if nz.size and nz[0] < 0 else k


def _best(grid: np.ndarray, intens: np.ndarray, live_mask: np.ndarray):
    margin, lo_live, hi_dead = _margins(intens, live_mask)
    i = int(np.argmax(margin))  # first maximum in lattice order
    ties = np.flatnonzero(margin == margin[i])
    return grid[i], int(margin[i]), int(lo_live[i]), int(hi_dead[i]), grid[ties]


def _coarse_lattice(grid_steps: int):
    """The grid {-1 + 2k/(grid_steps-1)} as integers over a common scale."""
    scale = grid_steps - 1
    if scale % 2 == 0:
        grid, intens = _lattice(scale // 2)
        return grid, intens, scale // 2, 1
    grid, intens = _lattice(scale)
    odd = np.all(grid % 2 != 0, axis=1)
    return grid[odd], intens[odd], scale, 2


def compile_rule(n: int, grid_steps: int = DEFAULT_GRID_STEPS, refine: bool = True) -> CompilationResult:
    """Pick the weight triple maximizing the live/dead intensity gap.

    The coarse grid has ``grid_steps`` points per axis over [-1, 1]. With
    ``refine``, the cell around every coarse optimum is searched again at
    ``REFINE_FACTOR`` times the resolution. The threshold sits at the middle
    of the gap.
    """
    r = rule_from_number(n)
    if grid_steps < 3:
        raise ValueError("grid_steps must be >= 3")
    live_mask = r.lut.astype(bool)
    if live_mask[0]:
        # neighborhood 000 always has intensity 0, which can never exceed b >= 0
        return CompilationResult(r.rule_number, None, 0.0, False)
    if not live_mask.any():
        # every intensity is at most 9; park b above that
        cfg = PhotonicConfig((1.0, 1.0, 1.0), 10.0)
        return CompilationResult(r.rule_number, cfg, 1.0, True)

    grid, intens, scale, spacing = _coarse_lattice(grid_steps)
    k, m, lo_live, hi_dead, ties = _best(grid, intens, live_mask)
    if m <= 0:
        return CompilationResult(r.rule_number, None, 0.0, False)
    if refine:
        fine = scale * REFINE_FACTOR
        reach = spacing * REFINE_FACTOR
        best = (m * REFINE_FACTOR ** 2, k * REFINE_FACTOR, lo_live * REFINE_FACTOR ** 2,
                hi_dead * REFINE_FACTOR ** 2)
        for center in ties * REFINE_FACTOR:
            lo = tuple(int(max(-fine, c - reach)) for c in center)
            hi = tuple(int(min(fine, c + reach)) for c in center)
            fk, fm, flo, fhi, _ = _best(*_lattice(fine, lo, hi), live_mask)
            if fm > best[0]:
                best = (fm, fk, flo, fhi)
        m, k, lo_live, hi_dead = best
        scale = fine
    return _result(r, _canonical_sign(k), scale, m, lo_live, hi_dead)


def _result(r: RuleTable, k: np.ndarray, scale: int, m: int, lo_live: int, hi_dead: int) -> CompilationResult:
    s2 = scale * scale
    weights = tuple(float(x) / scale for x in k)
    b = (lo_live + hi_dead) / (2 * s2)
    cfg = PhotonicConfig(weights, b)
    margin = m / s2
    assert verify_config(cfg, r), (r.rule_number, weights, b)
    return CompilationResult(r.rule_number, cfg, margin, True)


def feasibility_census(grid_steps: int = DEFAULT_GRID_STEPS, refine: bool = True) -> list[CompilationResult]:
    if grid_steps < 3:
        raise ValueError("grid_steps must be >= 3")
    return [compile_rule(n, grid_steps, refine) for n in range(256)]


def census_summary(results: Iterable[CompilationResult]) -> dict:
    results = list(results)
    feasible = [c.rule_number for c in results if c.feasible]
    return {"rules": len(results), "feasible": len(feasible),
            "infeasible": len(results) - len(feasible), "feasible_rules": feasible}


def census_to_csv(results: Iterable[CompilationResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CENSUS_FIELDS, lineterminator="\n")
    w.writeheader()
    for res in results:
        w.writerow(res.csv_row())
    return buf.getvalue()


def census_from_csv(text: str) -> list[CompilationResult]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        n = int(row["rule_number"])
        if int(row["feasible"]):
            cfg = PhotonicConfig((float(row["a_left"]), float(row["a_center"]),
                                  float(row["a_right"])), float(row["b"]))
            out.append(CompilationResult(n, cfg, float(row["margin"]), True))
        else:
            out.append(CompilationResult(n, None, 0.0, False))
    return out


def config_margin(cfg: PhotonicConfig, r: RuleTable) -> float:
    """Live/dead intensity gap of a given config for rule r (negative if it fails)."""
    intens = neighborhood_intensities(cfg.weights)
    live = r.lut.astype(bool)
    if live[0]:
        return -math.inf
    if not live.any():
        return cfg.threshold - float(intens.max())
    return float(intens[live].min() - intens[~live].max())


def realized_rule(cfg: PhotonicConfig) -> int:
    """Wolfram number of the rule a noiseless config actually computes."""
    live = neighborhood_intensities(cfg.weights) > cfg.threshold
    return int(sum(1 << n for n in range(8) if live[n]))
