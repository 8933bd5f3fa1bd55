"""Exact elementary cellular automaton semantics.

Neighborhoods are indexed Wolfram-style, ``n = 4*left + 2*center + right``,
and the output for neighborhood ``n`` is bit ``n`` of the rule number.

Generations are stored bit-packed in little-endian ``uint64`` words: cell
``i`` lives in bit ``i % 64`` of word ``i // 64``. Padding bits past
``width`` in the last word are always zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

WORD_BITS = 64
_WORD = np.dtype("<u8")
_ONE = np.uint64(1)
_TOP = np.uint64(WORD_BITS - 1)


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    FIXED_DEAD = "dead"

    @classmethod
    def parse(cls, value: "Boundary | str") -> "Boundary":
        if isinstance(value, Boundary):
            return value
        v = str(value).strip().lower()
        aliases = {"periodic": cls.PERIODIC, "dead": cls.FIXED_DEAD,
                   "fixeddead": cls.FIXED_DEAD, "fixed_dead": cls.FIXED_DEAD,
                   "fixed": cls.FIXED_DEAD}
        if v not in aliases:
            raise ValueError(f"unknown boundary {value!r}")
        return aliases[v]


@dataclass(frozen=True)
class RuleTable:
    """Truth table of one of the 256 elementary rules."""

    rule_number: int
    outputs: tuple  # outputs[n] for neighborhood value n = 0..7

    def __post_init__(self):
        if len(self.outputs) != 8 or any(o not in (0, 1) for o in self.outputs):
            raise ValueError("outputs must be 8 binary values")
        if encode_rule(self.outputs) != self.rule_number:
            raise ValueError("outputs do not match rule_number")

    @property
    def lut(self) -> np.ndarray:
        return np.array(self.outputs, dtype=np.uint8)

    def mirrored(self) -> "RuleTable":
        """Left-right reflection: output for (l, c, r) becomes output for (r, c, l)."""
        out = [0] * 8
        for n in range(8):
            l, c, r = (n >> 2) & 1, (n >> 1) & 1, n & 1
            out[4 * r + 2 * c + l] = self.outputs[n]
        return rule_from_number(encode_rule(out))

    def __str__(self) -> str:
        pats = " ".join(f"{n:03b}" for n in range(7, -1, -1))
        outs = "   ".join(str(self.outputs[n]) for n in range(7, -1, -1))
        return f"Rule {self.rule_number}\n{pats}\n {outs}"


def encode_rule(outputs: Sequence[int]) -> int:
    return sum(int(o) << n for n, o in enumerate(outputs))


def rule_from_number(n: int) -> RuleTable:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"rule number must be an integer, got {type(n).__name__}")
    n = int(n)
    if not 0 <= n <= 255:
        raise ValueError(f"rule number must be in 0..255, got {n}")
    return RuleTable(n, tuple((n >> k) & 1 for k in range(8)))


def _n_words(width: int) -> int:
    return (width + WORD_BITS - 1) // WORD_BITS


def _pack(cells: np.ndarray) -> np.ndarray:
    width = cells.shape[-1]
    nw = _n_words(width)
    padded = np.zeros(cells.shape[:-1] + (nw * WORD_BITS,), dtype=np.uint8)
    padded[..., :width] = cells
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view(_WORD)


def _unpack(words: np.ndarray, width: int) -> np.ndarray:
    raw = np.ascontiguousarray(words, dtype=_WORD).view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :width]


@dataclass(frozen=True, eq=False)
class Generation:
    """One row of cell states. Immutable; ``words`` is a read-only array."""

    width: int
    words: np.ndarray
    boundary: Boundary = Boundary.FIXED_DEAD

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        w = np.array(self.words, dtype=_WORD)
        if w.shape != (_n_words(self.width),):
            raise ValueError("word count does not match width")
        tail = self.width % WORD_BITS
        if tail and int(w[-1]) >> tail:
            raise ValueError("padding bits beyond width must be zero")
        w.setflags(write=False)
        object.__setattr__(self, "words", w)
        object.__setattr__(self, "boundary", Boundary.parse(self.boundary))

    @classmethod
    def from_cells(cls, cells, boundary: Boundary | str = Boundary.FIXED_DEAD) -> "Generation":
        arr = np.asarray(cells)
        if arr.ndim != 1:
            raise ValueError("cells must be one-dimensional")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("cells must be 0 or 1")
        arr = arr.astype(np.uint8)
        return cls(arr.size, _pack(arr), Boundary.parse(boundary))

    @classmethod
    def from_bits(cls, bits: str, boundary: Boundary | str = Boundary.FIXED_DEAD) -> "Generation":
        bits = bits.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return cls.from_cells(np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0"), boundary)

    @classmethod
    def dead(cls, width: int, boundary: Boundary | str = Boundary.FIXED_DEAD) -> "Generation":
        return cls(width, np.zeros(_n_words(width), dtype=_WORD), Boundary.parse(boundary))

    @classmethod
    def random(cls, width: int, seed: int, density: float = 0.5,
               boundary: Boundary | str = Boundary.FIXED_DEAD) -> "Generation":
        rng = np.random.default_rng(seed)
        return cls.from_cells((rng.random(width) < density).astype(np.uint8), boundary)

    @property
    def cells(self) -> np.ndarray:
        return _unpack(self.words, self.width)

    def to_bits(self) -> str:
        return "".join("1" if c else "0" for c in self.cells)

    def with_boundary(self, boundary: Boundary | str) -> "Generation":
        return Generation(self.width, self.words, Boundary.parse(boundary))

    def flipped(self, index: int) -> "Generation":
        if not 0 <= index < self.width:
            raise IndexError(index)
        w = self.words.copy()
        w[index // WORD_BITS] ^= _ONE << np.uint64(index % WORD_BITS)
        return Generation(self.width, w, self.boundary)

    def popcount(self) -> int:
        return int(self.cells.sum())

    def __len__(self) -> int:
        return self.width

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.width
        if not 0 <= i < self.width:
            raise IndexError(i)
        return int(self.words[i // WORD_BITS] >> np.uint64(i % WORD_BITS)) & 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Generation):
            return NotImplemented
        return (self.width == other.width and self.boundary == other.boundary
                and bool(np.array_equal(self.words, other.words)))

    def __hash__(self) -> int:
        return hash((self.width, self.boundary, self.words.tobytes()))

    def __repr__(self) -> str:
        bits = self.to_bits() if self.width <= 80 else self.to_bits()[:77] + "..."
        return f"Generation({bits!r}, width={self.width}, boundary={self.boundary.value})"


def single_seed(width: int, boundary: Boundary | str = Boundary.FIXED_DEAD) -> Generation:
    """All dead except the center cell ``width // 2``."""
    if width < 1:
        raise ValueError("width must be >= 1")
    cells = np.zeros(width, dtype=np.uint8)
    cells[width // 2] = 1
    return Generation.from_cells(cells, boundary)


def neighbor_cells(cells: np.ndarray, boundary: Boundary) -> tuple[np.ndarray, np.ndarray]:
    """Left and right neighbor vectors of an unpacked row (or stack of rows)."""
    if boundary is Boundary.PERIODIC:
        return np.roll(cells, 1, axis=-1), np.roll(cells, -1, axis=-1)
    left = np.zeros_like(cells)
    right = np.zeros_like(cells)
    left[..., 1:] = cells[..., :-1]
    right[..., :-1] = cells[..., 1:]
    return left, right


def step(g: Generation, r: RuleTable) -> Generation:
    """Table-lookup update of every cell."""
    c = g.cells
    left, right = neighbor_cells(c, g.boundary)
    idx = (left << 2) | (c << 1) | right
    return Generation.from_cells(r.lut[idx], g.boundary)


# --- word-parallel path -------------------------------------------------------

def anf_monomials(r: RuleTable) -> tuple[int, ...]:
    """Algebraic normal form of the rule as XOR of AND-monomials.

    Each monomial is a 3-bit mask over (left, center, right) using the same
    bit weights as the neighborhood index; mask 0 is the constant 1.
    """
    coef = list(r.outputs)
    for bit in range(3):
        for n in range(8):
            if n >> bit & 1:
                coef[n] ^= coef[n ^ (1 << bit)]
    return tuple(m for m in range(8) if coef[m])


def anf_expression(r: RuleTable) -> str:
    names = {4: "L", 2: "C", 1: "R"}
    terms = []
    for m in sorted(anf_monomials(r), key=lambda m: (bin(m).count("1"), -m)):
        if m == 0:
            terms.append("1")
        else:
            terms.append("&".join(names[b] for b in (4, 2, 1) if m & b))
    return " ^ ".join(terms) if terms else "0"


@lru_cache(maxsize=256)
def synthesize(rule_number: int) -> Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]:
    """Compile the rule into a function of (left, center, right) word arrays.

    The truth table is rewritten in algebraic normal form, i.e. a GF(2)
    sum of products of the shifted cell words.
    """
    monos = anf_monomials(rule_from_number(rule_number))
    ones = np.uint64(0xFFFFFFFFFFFFFFFF)

    def apply(left: np.ndarray, center: np.ndarray, right: np.ndarray) -> np.ndarray:
        operands = {4: left, 2: center, 1: right}
        acc = np.zeros_like(center)
        for m in monos:
            if m == 0:
                term = np.full_like(center, ones)
            else:
                term = None
                for b in (4, 2, 1):
                    if m & b:
                        term = operands[b] if term is None else term & operands[b]
            acc ^= term
        return acc

    apply.expression = anf_expression(rule_from_number(rule_number))
    return apply


def _tail_mask(width: int) -> np.uint64:
    tail = width % WORD_BITS
    return np.uint64((1 << tail) - 1) if tail else np.uint64(0xFFFFFFFFFFFFFFFF)


def shifted_words(words: np.ndarray, width: int, boundary: Boundary) -> tuple[np.ndarray, np.ndarray]:
    """Packed left-neighbor and right-neighbor rows.

    Bit i of the left row holds cell i-1; bit i of the right row holds cell i+1.
    """
    left = words << _ONE
    if words.size > 1:
        left[1:] |= words[:-1] >> _TOP
    right = words >> _ONE
    if words.size > 1:
        right[:-1] |= words[1:] << _TOP
    last = width - 1
    # the shift-in at the top may have pushed a cell into padding
    left[-1] &= _tail_mask(width)
    if boundary is Boundary.PERIODIC:
        last_bit = (words[last // WORD_BITS] >> np.uint64(last % WORD_BITS)) & _ONE
        first_bit = words[0] & _ONE
        left[0] |= last_bit
        right[last // WORD_BITS] |= first_bit << np.uint64(last % WORD_BITS)
    return left, right


def _step_words(words: np.ndarray, width: int, boundary: Boundary, fn) -> np.ndarray:
    left, right = shifted_words(words, width, boundary)
    out = fn(left, words, right)
    out[-1] &= _tail_mask(width)
    return out


def step_packed(g: Generation, r: RuleTable) -> Generation:
    """Bit-identical to :func:`step`, evaluated 64 cells per machine word."""
    out = _step_words(g.words, g.width, g.boundary, synthesize(r.rule_number))
    return Generation(g.width, out, g.boundary)


def iterate_words(g: Generation, r: RuleTable, steps: int):
    """Yield the packed words of rows 1..steps (arrays are fresh per row)."""
    fn = synthesize(r.rule_number)
    words = g.words
    for _ in range(steps):
        words = _step_words(words, g.width, g.boundary, fn)
        yield words


@dataclass(eq=False)
class SpaceTimeDiagram:
    """Stacked generations, row 0 being the initial condition.

    ``intensities[t]`` holds the pre-threshold intensities that produced row
    ``t + 1``; it is present only for photonic runs, together with the
    threshold used.
    """

    states: np.ndarray
    boundary: Boundary = Boundary.FIXED_DEAD
    intensities: Optional[np.ndarray] = None
    threshold: Optional[float] = None
    rule_number: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.states)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError("states must be a non-empty 2D array")
        if not np.isin(s, (0, 1)).all():
            raise ValueError("states must be binary")
        self.states = s.astype(np.uint8)
        self.boundary = Boundary.parse(self.boundary)
        if self.intensities is not None:
            inten = np.asarray(self.intensities, dtype=float).reshape(-1, s.shape[1])
            if inten.shape != (s.shape[0] - 1, s.shape[1]):
                raise ValueError("intensities must have shape (steps, width)")
            if (inten < 0).any():
                raise ValueError("intensities must be non-negative")
            self.intensities = inten

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def width(self) -> int:
        return self.states.shape[1]

    def row(self, t: int) -> Generation:
        return Generation.from_cells(self.states[t], self.boundary)

    def threshold_consistent(self) -> bool:
        """True when every stored intensity agrees with the next row's state."""
        if self.intensities is None or self.threshold is None:
            return True
        return bool(np.array_equal(self.intensities > self.threshold, self.states[1:] == 1))

    def replays(self, step_fn: Callable[[Generation], Generation]) -> bool:
        return all(step_fn(self.row(t)) == self.row(t + 1) for t in range(self.steps))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpaceTimeDiagram):
            return NotImplemented
        if self.boundary != other.boundary or not np.array_equal(self.states, other.states):
            return False
        if (self.intensities is None) != (other.intensities is None):
            return False
        return self.intensities is None or bool(np.array_equal(self.intensities, other.intensities))


def evolve(init: Generation, r: RuleTable, steps: int) -> SpaceTimeDiagram:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    words = np.empty((steps + 1, init.words.size), dtype=_WORD)
    words[0] = init.words
    for t, w in enumerate(iterate_words(init, r, steps), start=1):
        words[t] = w
    return SpaceTimeDiagram(_unpack(words, init.width), init.boundary, rule_number=r.rule_number)
