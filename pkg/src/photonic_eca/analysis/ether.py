"""Periodic background ("ether") detection and removal."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from ..core import SpaceTimeDiagram

COVERAGE_THRESHOLD = 0.9


class NotEtherDominated(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EtherTiling:
    """A p_t x p_x tile; cell (t, x) of the background is tile[t % p_t, x % p_x]."""

    spatial_period: int
    temporal_period: int
    tile: np.ndarray
    coverage: float = 1.0

    def __post_init__(self):
        tile = np.asarray(self.tile, dtype=np.uint8).reshape(self.temporal_period, self.spatial_period)
        tile.setflags(write=False)
        object.__setattr__(self, "tile", tile)

    def extension(self, shape: tuple[int, int], dt: int = 0, dx: int = 0) -> np.ndarray:
        """The background over ``shape`` with the tile shifted by (dt, dx)."""
        t = (np.arange(shape[0]) + dt) % self.temporal_period
        x = (np.arange(shape[1]) + dx) % self.spatial_period
        return self.tile[np.ix_(t, x)]

    def phases(self) -> list[tuple[int, int]]:
        """Distinct (dt, dx) shifts; shifts producing an identical pattern are merged."""
        seen, out = set(), []
        for dt in range(self.temporal_period):
            for dx in range(self.spatial_period):
                key = self.extension((self.temporal_period, self.spatial_period), dt, dx).tobytes()
                if key not in seen:
                    seen.add(key)
                    out.append((dt, dx))
        return out

    def as_dict(self) -> dict:
        return {"spatial_period": self.spatial_period, "temporal_period": self.temporal_period,
                "tile": ["".join(map(str, row)) for row in self.tile.tolist()],
                "coverage": self.coverage}

    @classmethod
    def from_dict(cls, d: dict) -> "EtherTiling":
        tile = np.array([[int(c) for c in row] for row in d["tile"]], dtype=np.uint8)
        return cls(int(d["spatial_period"]), int(d["temporal_period"]), tile,
                   float(d.get("coverage", 1.0)))


def central_region(d: SpaceTimeDiagram) -> tuple[slice, slice]:
    """Middle half of the columns, all rows."""
    w = d.width
    lo, hi = w // 4, w - w // 4
    if hi <= lo:
        lo, hi = 0, w
    return slice(0, d.steps + 1), slice(lo, hi)


def _score(block: np.ndarray, t0: int, x0: int, p_t: int, p_x: int) -> tuple[float, np.ndarray]:
    """Majority-vote tile of the block and the fraction of cells it explains."""
    rows, cols = block.shape
    t_idx = (np.arange(rows) + t0) % p_t
    x_idx = (np.arange(cols) + x0) % p_x
    ones = np.zeros((p_t, p_x))
    total = np.zeros((p_t, p_x))
    np.add.at(ones, (t_idx[:, None], x_idx[None, :]), block)
    np.add.at(total, (t_idx[:, None], x_idx[None, :]), 1)
    tile = (2 * ones > total).astype(np.uint8)
    matched = np.where(tile == 1, ones, total - ones).sum()
    return float(matched / block.size), tile


def detect_ether(d: SpaceTimeDiagram, max_period: int = 8,
                 region: Optional[tuple[slice, slice]] = None,
                 threshold: float = COVERAGE_THRESHOLD) -> EtherTiling:
    """Smallest-area (p_x, p_t) tiling explaining more than ``threshold`` of the region.

    The tile is anchored at the diagram origin. Ties in area go to the
    smaller temporal period.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    rs, cs = region or central_region(d)
    block = d.states[rs, cs].astype(np.int64)
    t0, x0 = rs.start or 0, cs.start or 0
    candidates = sorted(((px * pt, pt, px) for px in range(1, max_period + 1)
                         for pt in range(1, max_period + 1)))
    best = None
    for _, pt, px in candidates:
        cov, tile = _score(block, t0, x0, pt, px)
        if cov > threshold:
            return EtherTiling(px, pt, tile, cov)
        if best is None or cov > best[0]:
            best = (cov, px, pt)
    raise NotEtherDominated(f"no tiling up to period {max_period} covers more than "
                            f"{threshold:.0%} (best {best[0]:.1%} at p_x={best[1]}, p_t={best[2]})")


def filter_ether(d: SpaceTimeDiagram, ether: EtherTiling,
                 window: Optional[tuple[int, int]] = None) -> SpaceTimeDiagram:
    """Mark cells that differ from the locally best-aligned background.

    Gliders shift the ether's phase, so the alignment is chosen per cell as
    the tile shift with the fewest mismatches in a surrounding window
    (default ``p_t + 1`` rows by ``2 * p_x + 1`` columns).
    """
    shape = d.states.shape
    if window is None:
        window = (ether.temporal_period + 1, 2 * ether.spatial_period + 1)
    phases = ether.phases()
    mism = np.stack([d.states != ether.extension(shape, dt, dx) for dt, dx in phases])
    local = np.stack([ndimage.uniform_filter(m.astype(float), size=window, mode="nearest")
                      for m in mism])
    # quantize before argmin so float noise in the filter cannot break ties
    choice = np.argmin(np.round(local * window[0] * window[1]).astype(np.int64), axis=0)
    out = np.take_along_axis(mism, choice[None], axis=0)[0].astype(np.uint8)
    return SpaceTimeDiagram(out, d.boundary, rule_number=d.rule_number,
                            meta={"filtered": True})
