"""Discrete-event model of the time-multiplexed feedback loop.

Each iteration the encoded pulse train is split into three delay lines
(-T_R, 0, +T_R), every pulse picks up its line's weight, and pulses that
arrive in the same time slot add coherently. The detector squares the slot
amplitude, the comparator thresholds it, and the resulting bits drive the
modulator on the next pass.

Time is kept symbolically as ``Fraction`` nanoseconds.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .core import Boundary, Generation
from .photonic import PhotonicConfig

DEFAULT_PERIOD_NS = Fraction(4)


@dataclass(frozen=True)
class PulseTrainConfig:
    photonic: PhotonicConfig
    num_pulses: int
    repetition_period_ns: Fraction = DEFAULT_PERIOD_NS

    def __post_init__(self):
        period = Fraction(self.repetition_period_ns)
        if period <= 0:
            raise ValueError("repetition period must be positive")
        if self.num_pulses < 1:
            raise ValueError("num_pulses must be >= 1")
        object.__setattr__(self, "repetition_period_ns", period)

    @property
    def iteration_latency_ns(self) -> Fraction:
        return self.num_pulses * self.repetition_period_ns

    def delay_lines(self) -> tuple[tuple[int, float], ...]:
        """(slot delay, weight) per line.

        The line delayed by one slot brings pulse i-1 into slot i, so it
        carries the left-neighbor weight.
        """
        a_l, a_c, a_r = self.photonic.weights
        return ((+1, a_l), (0, a_c), (-1, a_r))


@dataclass
class LoopIteration:
    index: int
    start_ns: Fraction
    encoded: np.ndarray
    recombined: np.ndarray
    intensities: np.ndarray
    bits: np.ndarray

    def record(self) -> dict:
        return {"iteration": self.index,
                "start_ns": str(self.start_ns),
                "encoded": self.encoded.tolist(),
                "recombined": [float(f"{v:.9g}") for v in self.recombined],
                "intensities": [float(f"{v:.9g}") for v in self.intensities],
                "bits": "".join(map(str, self.bits.tolist()))}


@dataclass
class LoopTrace:
    """Per-iteration record of the loop.

    ``initial`` is the encoded initial condition; ``iterations[t].bits`` is
    what the FPGA stores and re-encodes as pass t + 1.
    """

    config: PulseTrainConfig
    boundary: Boundary
    initial: np.ndarray
    iterations: list = field(default_factory=list)
    wall_seconds: float = 0.0

    @property
    def iteration_latency_ns(self) -> Fraction:
        return self.config.iteration_latency_ns

    @property
    def modeled_duration_ns(self) -> Fraction:
        return len(self.iterations) * self.iteration_latency_ns

    def rows(self) -> np.ndarray:
        """Thresholded rows, starting with the initial condition."""
        return np.array([self.initial] + [it.bits for it in self.iterations], dtype=np.uint8)

    def feedback_consistent(self) -> bool:
        return all(np.array_equal(a.bits, b.encoded.astype(np.uint8))
                   for a, b in zip(self.iterations, self.iterations[1:]))

    def to_jsonl(self) -> str:
        return "".join(json.dumps(it.record(), sort_keys=True) + "\n" for it in self.iterations)

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())


def recombine(encoded: np.ndarray, lines, boundary: Boundary) -> np.ndarray:
    """Sum the weighted, delayed copies of the train per arrival slot."""
    n = encoded.size
    out = np.zeros(n, dtype=float)
    emit = np.arange(n)
    for delay, weight in lines:
        arrive = emit + delay
        if boundary is Boundary.PERIODIC:
            arrive %= n
            np.add.at(out, arrive, weight * encoded)
        else:
            # pulses pushed outside the train window meet no partner
            ok = (arrive >= 0) & (arrive < n)
            np.add.at(out, arrive[ok], weight * encoded[ok])
    return out


def _iterate(init: Generation, cfg: PulseTrainConfig, iterations: int) -> Iterator[LoopIteration]:
    noise = cfg.photonic.noise
    rng = noise.generator()
    lines = cfg.delay_lines()
    bits = init.cells
    for t in range(iterations):
        encoded = bits.astype(float)
        y = recombine(encoded, lines, init.boundary)
        mag = np.abs(y)
        if noise.amplitude_sigma > 0:
            mag = mag + rng.normal(0.0, noise.amplitude_sigma, size=mag.shape)
        intens = mag * mag
        bits = (intens > cfg.photonic.threshold).astype(np.uint8)
        yield LoopIteration(t, t * cfg.iteration_latency_ns, encoded, y, intens, bits)


def run_loop(init: Generation, cfg: PulseTrainConfig, iterations: int) -> LoopTrace:
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if init.width != cfg.num_pulses:
        raise ValueError(f"initial condition has {init.width} cells, train has {cfg.num_pulses} pulses")
    trace = LoopTrace(cfg, init.boundary, init.cells.astype(np.uint8))
    t0 = time.perf_counter()
    trace.iterations.extend(_iterate(init, cfg, iterations))
    trace.wall_seconds = time.perf_counter() - t0
    return trace


def loop_step(g: Generation, cfg: PhotonicConfig) -> Generation:
    """A single noiseless pass of the loop, as a Generation-to-Generation map."""
    pt = PulseTrainConfig(cfg, g.width)
    it = next(_iterate(g, pt, 1))
    return Generation.from_cells(it.bits, g.boundary)


@dataclass(frozen=True)
class ThroughputReport:
    cell_updates: int
    modeled_seconds: float
    modeled_rate: float
    emulator_seconds: float
    emulator_rate: Optional[float]

    def as_dict(self) -> dict:
        return {"cell_updates": self.cell_updates, "modeled_seconds": self.modeled_seconds,
                "modeled_rate": self.modeled_rate, "emulator_seconds": self.emulator_seconds,
                "emulator_rate": self.emulator_rate}


def throughput_report(trace: LoopTrace) -> ThroughputReport:
    """Cell updates per second on the modeled hardware and in this emulator.

    The modeled rate is one update per time slot, 1 / T_R, independent of
    the train length.
    """
    if not trace.iterations:
        raise ValueError("trace has no iterations")
    updates = len(trace.iterations) * trace.config.num_pulses
    modeled_s = trace.modeled_duration_ns / Fraction(10 ** 9)
    rate = Fraction(updates) / modeled_s
    wall = trace.wall_seconds
    return ThroughputReport(updates, float(modeled_s), float(rate), wall,
                            updates / wall if wall > 0 else None)
