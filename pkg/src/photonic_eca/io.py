"""Diagram serialization: plain PGM, CSV and JSON.

PGM pixels carry the pre-threshold intensity scaled by the run's maximum
(row 0, the initial condition, is drawn from the states). Because rounding to
255 gray levels can blur cells sitting close to the threshold, the exporter
records the threshold in a header comment and adds an explicit state row for
any row the threshold alone would not reproduce. Import therefore recovers
the states exactly.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import os
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import Boundary, SpaceTimeDiagram

JSON_DIGITS = 9
PGM_MAXVAL = 255
FORMAT_TAG = "photonic-eca-diagram"

PathLike = Union[str, os.PathLike]


class DiagramFormat(str, enum.Enum):
    PGM = "pgm"
    CSV = "csv"
    JSON = "json"

    @classmethod
    def parse(cls, value) -> "DiagramFormat":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().lstrip("."))
        except ValueError:
            raise ValueError(f"unknown format {value!r}; expected pgm, csv or json") from None

    @classmethod
    def from_path(cls, path: PathLike) -> "DiagramFormat":
        return cls.parse(Path(path).suffix)


class DiagramParseError(ValueError):
    def __init__(self, message: str, line: int, offset: int = 0):
        super().__init__(f"line {line}, offset {offset}: {message}")
        self.line = line
        self.offset = offset


def _round_sig(x: float) -> float:
    return float(f"{x:.{JSON_DIGITS}g}")


# -- PGM ------------------------------------------------------------------

def pgm_pixels(d: SpaceTimeDiagram) -> np.ndarray:
    pix = d.states.astype(np.int64) * PGM_MAXVAL
    if d.intensities is not None and d.intensities.size:
        top = float(d.intensities.max())
        if top > 0:
            pix[1:] = np.rint(PGM_MAXVAL * d.intensities / top).astype(np.int64)
        else:
            pix[1:] = 0
    return pix


def _pgm_threshold(d: SpaceTimeDiagram) -> Optional[float]:
    if d.intensities is None or d.threshold is None or not d.intensities.size:
        return None
    top = float(d.intensities.max())
    return PGM_MAXVAL * d.threshold / top if top > 0 else float(PGM_MAXVAL)


def _decode_pixels(pix: np.ndarray, thr: Optional[float]) -> np.ndarray:
    states = (pix > 0).astype(np.uint8)
    if thr is not None:
        states[1:] = (pix[1:] > thr).astype(np.uint8)
    return states


def dumps_pgm(d: SpaceTimeDiagram) -> str:
    pix = pgm_pixels(d)
    thr = _pgm_threshold(d)
    lines = ["P2", f"# {FORMAT_TAG} boundary={d.boundary.value}"]
    if d.rule_number is not None:
        lines.append(f"# rule={d.rule_number}")
    if thr is not None:
        lines.append(f"# threshold={thr!r}")
        decoded = _decode_pixels(pix, thr)
        for t in np.flatnonzero((decoded != d.states).any(axis=1)):
            lines.append(f"# state-row {t} " + "".join(map(str, d.states[t].tolist())))
    lines.append(f"{d.width} {d.states.shape[0]}")
    lines.append(str(PGM_MAXVAL))
    lines.extend(" ".join(map(str, row.tolist())) for row in pix)
    return "\n".join(lines) + "\n"


def loads_pgm(text: str) -> SpaceTimeDiagram:
    tokens: list[tuple[str, int, int]] = []
    thr, boundary, rule, overrides = None, Boundary.FIXED_DEAD, None, {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body, _, comment = line.partition("#")
        comment = comment.strip()
        if comment.startswith(FORMAT_TAG):
            m = re.search(r"boundary=(\w+)", comment)
            if m:
                boundary = Boundary.parse(m.group(1))
        elif comment.startswith("rule="):
            rule = int(comment[5:])
        elif comment.startswith("threshold="):
            thr = float(comment[len("threshold="):])
        elif comment.startswith("state-row "):
            parts = comment.split()
            overrides[int(parts[1])] = np.array([int(c) for c in parts[2]], dtype=np.uint8)
        for m in re.finditer(r"\S+", body):
            tokens.append((m.group(), lineno, m.start()))
    if not tokens:
        raise DiagramParseError("empty file", 1)
    if tokens[0][0] != "P2":
        raise DiagramParseError(f"expected magic 'P2', got {tokens[0][0]!r}", tokens[0][1], tokens[0][2])
    header = []
    for name, idx in (("width", 1), ("height", 2), ("maxval", 3)):
        if idx >= len(tokens):
            last = tokens[-1]
            raise DiagramParseError(f"truncated header: missing {name}", last[1], last[2] + len(last[0]))
        header.append(_int_token(tokens[idx], name))
    width, height, maxval = header
    if width < 1 or height < 1 or maxval != PGM_MAXVAL:
        raise DiagramParseError(f"unsupported header {width} {height} {maxval}", tokens[3][1])
    body = tokens[4:]
    if len(body) != width * height:
        last = body[-1] if body else tokens[3]
        raise DiagramParseError(f"expected {width * height} pixels, found {len(body)}",
                                last[1], last[2] + len(last[0]))
    vals = np.array([_int_token(tok, "pixel") for tok in body], dtype=np.int64)
    bad = np.flatnonzero((vals < 0) | (vals > maxval))
    if bad.size:
        tok = body[bad[0]]
        raise DiagramParseError(f"pixel {tok[0]} out of range", tok[1], tok[2])
    pix = vals.reshape(height, width)
    states = _decode_pixels(pix, thr)
    for t, row in overrides.items():
        states[t] = row
    return SpaceTimeDiagram(states, boundary, rule_number=rule)


def _int_token(tok: tuple[str, int, int], what: str) -> int:
    try:
        return int(tok[0])
    except ValueError:
        raise DiagramParseError(f"bad {what} {tok[0]!r}", tok[1], tok[2]) from None


# -- CSV ------------------------------------------------------------------

def dumps_csv(d: SpaceTimeDiagram) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(d.states.tolist())
    return buf.getvalue()


def loads_csv(text: str, boundary: Boundary | str = Boundary.FIXED_DEAD) -> SpaceTimeDiagram:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        offset = 0
        for field in line.split(","):
            f = field.strip()
            if f not in ("0", "1"):
                raise DiagramParseError(f"expected 0 or 1, got {f!r}", lineno, offset)
            row.append(int(f))
            offset += len(field) + 1
        if rows and len(row) != len(rows[0]):
            raise DiagramParseError(f"row has {len(row)} cells, expected {len(rows[0])}", lineno)
        rows.append(row)
    if not rows:
        raise DiagramParseError("no rows", 1)
    return SpaceTimeDiagram(np.array(rows, dtype=np.uint8), boundary)


# -- JSON -----------------------------------------------------------------

def diagram_to_dict(d: SpaceTimeDiagram) -> dict:
    out = {"format": FORMAT_TAG, "version": 1, "boundary": d.boundary.value,
           "rule_number": d.rule_number, "width": d.width, "steps": d.steps,
           "states": ["".join(map(str, row.tolist())) for row in d.states]}
    if d.intensities is not None:
        out["threshold"] = d.threshold
        out["intensities"] = [[_round_sig(v) for v in row] for row in d.intensities.tolist()]
    if d.meta:
        out["meta"] = d.meta
    return out


def dumps_json(d: SpaceTimeDiagram) -> str:
    return json.dumps(diagram_to_dict(d), sort_keys=True, indent=1) + "\n"


def diagram_from_dict(obj: dict) -> SpaceTimeDiagram:
    states = np.array([[int(c) for c in row] for row in obj["states"]], dtype=np.uint8)
    inten = obj.get("intensities")
    return SpaceTimeDiagram(states, obj.get("boundary", "dead"),
                            intensities=None if inten is None else np.array(inten, dtype=float),
                            threshold=obj.get("threshold"), rule_number=obj.get("rule_number"),
                            meta=obj.get("meta", {}))


def loads_json(text: str) -> SpaceTimeDiagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagramParseError(e.msg, e.lineno, e.colno - 1) from None
    if not isinstance(obj, dict) or obj.get("format") != FORMAT_TAG:
        raise DiagramParseError(f"not a {FORMAT_TAG} document", 1)
    try:
        return diagram_from_dict(obj)
    except (KeyError, ValueError, TypeError) as e:
        raise DiagramParseError(f"invalid diagram: {e}", 1) from None


# -- files ----------------------------------------------------------------

_DUMP = {DiagramFormat.PGM: dumps_pgm, DiagramFormat.CSV: dumps_csv, DiagramFormat.JSON: dumps_json}
_LOAD = {DiagramFormat.PGM: loads_pgm, DiagramFormat.CSV: loads_csv, DiagramFormat.JSON: loads_json}


def dumps_diagram(d: SpaceTimeDiagram, fmt: DiagramFormat | str) -> str:
    return _DUMP[DiagramFormat.parse(fmt)](d)


def loads_diagram(text: str, fmt: DiagramFormat | str) -> SpaceTimeDiagram:
    return _LOAD[DiagramFormat.parse(fmt)](text)


def export_diagram(d: SpaceTimeDiagram, path: PathLike, fmt: DiagramFormat | str | None = None) -> Path:
    fmt = DiagramFormat.from_path(path) if fmt is None else DiagramFormat.parse(fmt)
    path = Path(path)
    path.write_text(dumps_diagram(d, fmt), encoding="utf-8")
    return path


def import_diagram(path: PathLike, fmt: DiagramFormat | str | None = None) -> SpaceTimeDiagram:
    fmt = DiagramFormat.from_path(path) if fmt is None else DiagramFormat.parse(fmt)
    return loads_diagram(Path(path).read_text(encoding="utf-8"), fmt)
