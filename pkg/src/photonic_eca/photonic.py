"""Analog execution of a rule: signed 3-tap interference, square-law
detection and a threshold decision.

Amplitudes are real. Phases in the delay lines are restricted to 0 or pi,
so a weight's sign carries the phase and its magnitude the attenuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Boundary, Generation, SpaceTimeDiagram, neighbor_cells


@dataclass(frozen=True)
class NoiseSpec:
    amplitude_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.amplitude_sigma >= 0:
            raise ValueError("amplitude_sigma must be >= 0")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class PhotonicConfig:
    """Weights (left, center, right) in [-1, 1] and an intensity threshold."""

    weights: tuple[float, float, float]
    threshold: float
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        w = tuple(float(a) for a in self.weights)
        if len(w) != 3:
            raise ValueError("need exactly three weights")
        if any(not abs(a) <= 1.0 for a in w):
            raise ValueError(f"weights must lie in [-1, 1], got {w}")
        if not self.threshold >= 0:
            raise ValueError("threshold must be >= 0")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def max_amplitude(self) -> float:
        """Largest |y| any neighborhood can produce."""
        return max_abs_amplitude(self.weights)

    def with_noise(self, sigma: float, seed: int = 0) -> "PhotonicConfig":
        return PhotonicConfig(self.weights, self.threshold, NoiseSpec(sigma, seed))


def max_abs_amplitude(weights) -> float:
    a_l, a_c, a_r = weights
    return max(abs(a_l * l + a_c * c + a_r * r)
               for l in (0, 1) for c in (0, 1) for r in (0, 1))


def interfere(g: Generation, weights) -> np.ndarray:
    """y_i = a_left*x_{i-1} + a_center*x_i + a_right*x_{i+1}."""
    x = g.cells.astype(float)
    left, right = neighbor_cells(x, g.boundary)
    a_l, a_c, a_r = (float(a) for a in weights)
    return a_l * left + a_c * x + a_r * right


def detect_threshold(y, b: float, noise: Optional[NoiseSpec] = None, *,
                     rng: Optional[np.random.Generator] = None,
                     boundary: Boundary | str = Boundary.FIXED_DEAD) -> Generation:
    """Cell i is live iff (|y_i| + eps_i)^2 > b, strictly.

    ``eps`` is Gaussian with the noise spec's sigma. Pass ``rng`` to draw from a
    generator owned by a longer run; otherwise one is seeded from ``noise``.
    """
    if not b >= 0:
        raise ValueError("threshold must be >= 0")
    mag = np.abs(np.asarray(y, dtype=float))
    mag = _perturb(mag, noise, rng)
    return Generation.from_cells((mag * mag > b).astype(np.uint8), boundary)


def _perturb(mag: np.ndarray, noise: Optional[NoiseSpec], rng) -> np.ndarray:
    if noise is None or noise.amplitude_sigma == 0:
        return mag
    if rng is None:
        rng = noise.generator()
    return mag + rng.normal(0.0, noise.amplitude_sigma, size=mag.shape)


def photonic_step(g: Generation, cfg: PhotonicConfig, *,
                  rng: Optional[np.random.Generator] = None) -> tuple[Generation, np.ndarray]:
    """One loop iteration; returns the new row and the detected intensities.

    The intensities are the (possibly noisy) values the threshold acted on,
    so ``intensity > threshold`` reproduces the returned row exactly.
    """
    y = interfere(g, cfg.weights)
    detected = _perturb(np.abs(y), cfg.noise, rng) ** 2
    nxt = Generation.from_cells((detected > cfg.threshold).astype(np.uint8), g.boundary)
    return nxt, detected


def photonic_evolve(init: Generation, cfg: PhotonicConfig, steps: int) -> SpaceTimeDiagram:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rng = cfg.noise.generator()
    states = np.empty((steps + 1, init.width), dtype=np.uint8)
    intensities = np.empty((steps, init.width), dtype=float)
    states[0] = init.cells
    g = init
    for t in range(steps):
        g, intensities[t] = photonic_step(g, cfg, rng=rng)
        states[t + 1] = g.cells
    return SpaceTimeDiagram(states, init.boundary, intensities=intensities,
                            threshold=cfg.threshold,
                            meta={"weights": list(cfg.weights),
                                  "noise_sigma": cfg.noise.amplitude_sigma,
                                  "noise_seed": cfg.noise.seed})


def extinction_ratio(d: SpaceTimeDiagram) -> float:
    """Weakest live-cell intensity over strongest dead-cell intensity."""
    if d.intensities is None:
        raise ValueError("diagram has no intensity field")
    live = d.states[1:] == 1
    if not live.any() or live.all():
        raise ValueError("extinction ratio needs both live and dead cells")
    lo_live = float(d.intensities[live].min())
    hi_dead = float(d.intensities[~live].max())
    if hi_dead == 0.0:
        return math.inf
    return lo_live / hi_dead
