"""Glider tracking on an ether-filtered diagram.

Live cells of each row are grouped into blobs (cells separated by at most
``gap`` dead cells). Blobs in consecutive rows are linked when some pair of
their cells is at most one column apart; a blob with no successor may also
be linked across up to ``bridge`` empty rows, which keeps structures that
blink in the filtered picture (stationary gliders, gun bodies) connected.

Maximal unbranched runs of linked blobs are chains. A chain whose blob shape
recurs with a fixed period and displacement is a track. Everything else is
interaction material; each connected piece of it, together with the tracks
entering and leaving it, becomes one event.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import SpaceTimeDiagram

MAX_TRACK_PERIOD = 16
MIN_TRACK_ROWS = 6


class EventKind(str, enum.Enum):
    TRACK = "Track"
    COLLISION = "Collision"
    GUN = "Gun"
    BLACK_HOLE = "BlackHole"


@dataclass
class Blob:
    t: int
    cells: np.ndarray  # sorted column indices
    succ: list = field(default_factory=list)
    pred: list = field(default_factory=list)

    @property
    def left(self) -> int:
        return int(self.cells[0])

    @property
    def shape(self) -> tuple:
        return tuple(int(c) - self.left for c in self.cells)


@dataclass
class Track:
    rows: list          # rows where the track has a blob
    positions: list     # leftmost live column of each blob
    velocity: float     # cells per step, positive to the right
    period: int
    anchor: tuple       # (t, x) on the periodic part, for extrapolation

    @property
    def t_start(self) -> int:
        return self.rows[0]

    @property
    def t_end(self) -> int:
        return self.rows[-1]

    def position_at(self, t: float) -> float:
        t0, x0 = self.anchor
        return x0 + self.velocity * (t - t0)

    def as_dict(self) -> dict:
        return {"rows": [self.rows[0], self.rows[-1]], "velocity": self.velocity,
                "period": self.period, "positions": self.positions}


@dataclass
class GliderEvent:
    kind: EventKind
    time_span: tuple
    tracks: list
    incoming: list = field(default_factory=list)
    outgoing: list = field(default_factory=list)
    phase_shift: Optional[int] = None
    emission_period: Optional[int] = None

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "time_span": list(self.time_span),
                "tracks": [tr.as_dict() for tr in self.tracks],
                "incoming": [tr.velocity for tr in self.incoming],
                "outgoing": [tr.velocity for tr in self.outgoing],
                "phase_shift": self.phase_shift, "emission_period": self.emission_period}


def _row_blobs(t: int, row: np.ndarray, gap: int) -> list[Blob]:
    idx = np.flatnonzero(row)
    if idx.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(idx) > gap + 1) + 1
    return [Blob(t, part) for part in np.split(idx, cuts)]


def _touch(a: Blob, b: Blob) -> bool:
    if a.cells[0] > b.cells[-1] + 1 or b.cells[0] > a.cells[-1] + 1:
        return False
    # some cell of b within one column of a cell of a
    pos = np.searchsorted(a.cells, b.cells)
    lo = np.abs(b.cells - a.cells[np.clip(pos - 1, 0, a.cells.size - 1)])
    hi = np.abs(b.cells - a.cells[np.clip(pos, 0, a.cells.size - 1)])
    return bool((np.minimum(lo, hi) <= 1).any())


def build_blob_graph(states: np.ndarray, gap: int = 2, bridge: int = 4) -> list[list[Blob]]:
    rows = [_row_blobs(t, states[t], gap) for t in range(states.shape[0])]
    for t in range(len(rows) - 1):
        for a in rows[t]:
            for b in rows[t + 1]:
                if _touch(a, b):
                    a.succ.append(b)
                    b.pred.append(a)
    for t in range(len(rows)):
        for a in rows[t]:
            if a.succ:
                continue
            for dt in range(2, bridge + 1):
                if t + dt >= len(rows):
                    break
                hits = [b for b in rows[t + dt] if not b.pred and _touch(a, b)]
                if hits:
                    for b in hits:
                        a.succ.append(b)
                        b.pred.append(a)
                    break
    return rows


def _chains(blobs: list[Blob]) -> list[list[Blob]]:
    chains = []
    for b in blobs:
        starts_chain = len(b.pred) != 1 or len(b.pred[0].succ) != 1
        if not starts_chain:
            continue
        chain = [b]
        while len(chain[-1].succ) == 1 and len(chain[-1].succ[0].pred) == 1:
            chain.append(chain[-1].succ[0])
        chains.append(chain)
    return chains


def _periodicity(chain: list[Blob], max_period: int, min_rows: int):
    """Smallest (period, displacement) with a long enough recurring run."""
    t0 = chain[0].t
    span = chain[-1].t - t0 + 1
    if span < min_rows:
        return None
    by_row: list = [None] * span
    for b in chain:
        by_row[b.t - t0] = b
    for p in range(1, min(max_period, span - 1) + 1):
        best_run, run, run_d, best = 0, 0, None, None
        for i in range(span - p):
            a, c = by_row[i], by_row[i + p]
            if a is None and c is None:
                ok, d = True, None
            elif a is None or c is None or a.shape != c.shape:
                ok, d = False, None
            else:
                ok, d = True, c.left - a.left
            if ok and d is not None and run_d is not None and d != run_d:
                run, run_d = 0, None
                ok = True
            if ok:
                if run == 0:
                    start = i
                run += 1
                if d is not None:
                    run_d = d
                if run > best_run and run_d is not None:
                    best_run, best = run, (start, run_d)
            else:
                run, run_d = 0, None
        if best is not None and best_run >= max(2 * p, min_rows - p):
            start, d = best
            # anchor on the first occupied row of the periodic run
            while by_row[start] is None:
                start += 1
            return p, d, (t0 + start, by_row[start].left)
    return None


def _as_track(chain: list[Blob], max_period: int, min_rows: int) -> Optional[Track]:
    per = _periodicity(chain, max_period, min_rows)
    if per is None:
        return None
    p, d, anchor = per
    return Track([b.t for b in chain], [b.left for b in chain], d / p, p, anchor)


def _components(blobs: list[Blob]) -> list[list[Blob]]:
    seen, comps = set(), []
    for b in blobs:
        if id(b) in seen:
            continue
        stack, comp = [b], []
        seen.add(id(b))
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in x.succ + x.pred:
                if id(y) not in seen:
                    seen.add(id(y))
                    stack.append(y)
        comps.append(sorted(comp, key=lambda z: (z.t, z.left)))
    return comps


def _regular(values: list, tol: float = 1.0) -> bool:
    diffs = np.diff(sorted(values))
    return diffs.size >= 1 and bool((np.abs(diffs - diffs.mean()) <= tol).all()) and diffs.min() > 0


def _gun_emission(outgoing: list[Track]):
    """Largest group of same-velocity tracks emitted at regular intervals."""
    best = None
    for v in sorted({tr.velocity for tr in outgoing}):
        group = sorted((tr for tr in outgoing if tr.velocity == v), key=lambda tr: tr.t_start)
        if len(group) < 2:
            continue
        starts = [tr.t_start for tr in group]
        lateral = [tr.anchor[1] - v * tr.anchor[0] for tr in group]
        if _regular(starts) and (v == 0 or _regular(lateral)):
            if best is None or len(group) > len(best):
                best = group
    return best


def _phase_shift(incoming: list[Track], outgoing: list[Track]) -> Optional[int]:
    """Offset of an outgoing track from the extrapolated incoming one of equal velocity."""
    shifts = []
    for out in outgoing:
        same = [tr for tr in incoming if tr.velocity == out.velocity]
        if not same:
            continue
        t_ref = out.anchor[0]
        x_out = out.anchor[1]
        cand = min(same, key=lambda tr: abs(tr.position_at(t_ref) - x_out))
        shifts.append(int(round(x_out - cand.position_at(t_ref))))
    if not shifts:
        return None
    return max(shifts, key=abs)


def extract_glider_events(filtered: SpaceTimeDiagram, *, gap: int = 2, bridge: int = 4,
                          max_period: int = MAX_TRACK_PERIOD,
                          min_rows: int = MIN_TRACK_ROWS) -> list[GliderEvent]:
    rows = build_blob_graph(filtered.states, gap, bridge)
    blobs = [b for row in rows for b in row]
    events: list[GliderEvent] = []
    for comp in _components(blobs):
        chains = _chains(comp)
        tracks: dict[int, Track] = {}
        for i, ch in enumerate(chains):
            tr = _as_track(ch, max_period, min_rows)
            if tr is not None:
                tracks[i] = tr
        # every track is reported, including ones born from or dying in debris
        for tr in tracks.values():
            events.append(GliderEvent(EventKind.TRACK, (tr.t_start, tr.t_end), [tr]))
        if len(chains) == 1:
            continue
        events.extend(_interaction_events(chains, tracks))
    events.sort(key=lambda e: (e.time_span[0], e.kind.value))
    return events


def _interaction_events(chains: list[list[Blob]], tracks: dict) -> list[GliderEvent]:
    owner = {}
    for i, ch in enumerate(chains):
        for b in ch:
            owner[id(b)] = i
    # union-find over interaction units: junk chains and track junctions
    parent = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(u, v):
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)

    for i in range(len(chains)):
        if i not in tracks:
            parent.setdefault(("c", i), ("c", i))
    entering: dict = {}  # unit -> track indices flowing in
    leaving: dict = {}
    for i, ch in enumerate(chains):
        tail = ch[-1]
        for nxt in tail.succ:
            j = owner[id(nxt)]
            # a junction unit sits between chain i's tail and chain j's head
            junction = ("j", id(tail)) if len(tail.succ) > 1 else ("j", id(nxt))
            parent.setdefault(junction, junction)
            if i not in tracks:
                union(("c", i), junction)
            if j not in tracks:
                union(("c", j), junction)
    for i, ch in enumerate(chains):
        tail, head = ch[-1], ch[0]
        if i in tracks:
            for nxt in tail.succ:
                key = ("j", id(tail)) if len(tail.succ) > 1 else ("j", id(nxt))
                entering.setdefault(find(key), set()).add(i)
            for prv in head.pred:
                key = ("j", id(prv)) if len(prv.succ) > 1 else ("j", id(head))
                leaving.setdefault(find(key), set()).add(i)
    units = {find(u) for u in parent}
    events = []
    for u in units:
        members = [k for k in parent if find(k) == u]
        ins = [tracks[i] for i in sorted(entering.get(u, ()))]
        outs = [tracks[i] for i in sorted(leaving.get(u, ()))]
        span_rows = []
        for k in members:
            if k[0] == "c":
                span_rows += [chains[k[1]][0].t, chains[k[1]][-1].t]
        for tr in ins:
            span_rows.append(tr.t_end)
        for tr in outs:
            span_rows.append(tr.t_start)
        span = (min(span_rows), max(span_rows))
        emitted = _gun_emission(outs)
        if emitted is not None and len(emitted) >= 2:
            starts = [tr.t_start for tr in emitted]
            per = int(round(float(np.mean(np.diff(starts)))))
            events.append(GliderEvent(EventKind.GUN, span, ins + outs, ins, outs,
                                      emission_period=per))
        elif ins and outs:
            # includes a lone glider scattered by debris that is not itself a track
            events.append(GliderEvent(EventKind.COLLISION, span, ins + outs, ins, outs,
                                      phase_shift=_phase_shift(ins, outs)))
        elif ins and not outs:
            events.append(GliderEvent(EventKind.BLACK_HOLE, span, ins, ins, outs))
    return events
