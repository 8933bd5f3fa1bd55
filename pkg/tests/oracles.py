"""Independent reference implementations used as test oracles.

Nothing here imports the word-parallel or photonic code paths.
"""

from math import comb

import numpy as np


def scalar_step(cells, rule_number, periodic):
    """Per-cell loop with the neighborhood read directly off the rule number."""
    n = len(cells)
    out = []
    for i in range(n):
        if periodic:
            l, c, r = cells[(i - 1) % n], cells[i], cells[(i + 1) % n]
        else:
            l = cells[i - 1] if i > 0 else 0
            c = cells[i]
            r = cells[i + 1] if i < n - 1 else 0
        out.append((rule_number >> (4 * l + 2 * c + r)) & 1)
    return out


def scalar_evolve(cells, rule_number, steps, periodic):
    rows = [list(cells)]
    for _ in range(steps):
        rows.append(scalar_step(rows[-1], rule_number, periodic))
    return np.array(rows, dtype=np.uint8)


def rule90_parity(width, steps):
    """Rule 90 from a centered single seed: cell (t, c+k) is C(t, (t+k)/2) mod 2.

    Valid while the light cone stays inside the lattice (t <= width // 2).
    """
    c = width // 2
    out = np.zeros((steps + 1, width), dtype=np.uint8)
    for t in range(steps + 1):
        for k in range(-t, t + 1, 2):
            out[t, c + k] = comb(t, (t + k) // 2) & 1
    return out


def sierpinski_box_counts(levels):
    """Box counts of the 2**levels-row Pascal-mod-2 triangle at sizes 1, 2, 4, ...

    Rule 90 places the triangle on a checkerboard, so a 2x2 box holds the
    same live cells as one cell of the packed triangle at level - 1. Boxes of
    size 2**k each cover at most one 2**(k-1)-row sub-triangle.
    """
    return [3 ** levels] + [2 * 3 ** (levels - k) for k in range(1, levels + 1)]


def thresholds_for(weights, b):
    """Rule number realized by weights/threshold, evaluated by hand per neighborhood."""
    a_l, a_c, a_r = weights
    n_rule = 0
    for n in range(8):
        l, c, r = (n >> 2) & 1, (n >> 1) & 1, n & 1
        y = a_l * l + a_c * c + a_r * r
        if y * y > b:
            n_rule |= 1 << n
    return n_rule
