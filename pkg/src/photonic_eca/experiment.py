"""Experiment specs and the runner behind ``photonic-eca run``.

A spec file is line-oriented ``key = value`` text; ``#`` starts a comment.
Keys (all optional except ``rule`` or ``weights``/``threshold``):

    mode        table | photonic | emulator          (default table)
    rule        Wolfram number 0..255
    weights     a_left, a_center, a_right            (explicit photonic config)
    threshold   intensity threshold b                 (with weights)
    width       lattice width                          (default 101)
    steps       number of updates            (default 100, or the fixture's own)
    boundary    periodic | dead                        (default dead)
    initial     single | random:SEED | bits:0101... | fixture:NAME
    density     live fraction for random initial rows  (default 0.5)
    noise_sigma amplitude noise for photonic/emulator (default 0)
    noise_seed  noise generator seed                   (default 0)
    analyses    comma list of fractal, damage, prng, ether, gliders,
                extinction, throughput
    formats     comma list of pgm, csv, json           (default json)
    out         output directory                       (default out)
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analysis import (box_counting_dimension, damage_spreading, detect_ether,
                       extract_glider_events, filter_ether, middle_column_bits,
                       randomness_battery)
from .analysis.ether import EtherTiling
from .compiler import compile_rule, realized_rule
from .core import Boundary, Generation, SpaceTimeDiagram, evolve, rule_from_number, single_seed
from .emulator import PulseTrainConfig, run_loop, throughput_report
from .fixtures import load_fixture
from .io import DiagramFormat, dumps_diagram
from .photonic import NoiseSpec, PhotonicConfig, extinction_ratio, photonic_evolve


ANALYSES = ("fractal", "damage", "prng", "ether", "gliders", "extinction", "throughput")


class Mode(str, enum.Enum):
    TABLE = "table"
    PHOTONIC = "photonic"
    EMULATOR = "emulator"


class SpecError(ValueError):
    pass


class InfeasibleRule(SpecError):
    pass


@dataclass
class ExperimentSpec:
    rule: Optional[int] = None
    mode: Mode = Mode.TABLE
    weights: Optional[tuple] = None
    threshold: Optional[float] = None
    width: Optional[int] = None
    steps: Optional[int] = None
    boundary: Optional[Boundary] = None
    initial: str = "single"
    density: float = 0.5
    noise_sigma: float = 0.0
    noise_seed: int = 0
    analyses: tuple = ()
    formats: tuple = (DiagramFormat.JSON,)
    out: Path = Path("out")

    @classmethod
    def parse_text(cls, text: str, check: bool = True) -> "ExperimentSpec":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise SpecError(f"line {lineno}: expected key = value")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values, check=check)

    @classmethod
    def from_mapping(cls, values: dict, base: Optional["ExperimentSpec"] = None,
                     check: bool = True) -> "ExperimentSpec":
        spec = dataclasses.replace(base) if base else cls()
        names = {f.name for f in dataclasses.fields(cls)}
        for key, value in values.items():
            if value is None:
                continue
            if key not in names:
                raise SpecError(f"unknown key {key!r}")
            try:
                setattr(spec, key, _convert(key, value))
            except ValueError as e:
                raise SpecError(f"bad value for {key}: {e}") from None
        if check:
            spec.validate()
        return spec

    def validate(self) -> None:
        explicit = self.weights is not None or self.threshold is not None
        if explicit and (self.weights is None or self.threshold is None):
            raise SpecError("weights and threshold must be given together")
        if self.rule is None and not explicit:
            raise SpecError("need a rule or an explicit weights/threshold config")
        if explicit and self.mode is Mode.TABLE:
            raise SpecError("an explicit photonic config needs mode photonic or emulator")
        if self.rule is not None and not 0 <= self.rule <= 255:
            raise SpecError("rule must be in 0..255")
        if (self.steps is not None and self.steps < 0) or (self.width is not None and self.width < 1):
            raise SpecError("width must be >= 1 and steps >= 0")
        kind = self.initial.split(":", 1)[0]
        if kind not in ("single", "random", "bits", "fixture"):
            raise SpecError(f"unknown initial condition {self.initial!r}")
        for a in self.analyses:
            if a not in ANALYSES:
                raise SpecError(f"unknown analysis {a!r}; choose from {', '.join(ANALYSES)}")

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["mode"] = self.mode.value
        d["boundary"] = self.boundary.value if self.boundary else None
        d["formats"] = [f.value for f in self.formats]
        d["out"] = str(self.out)
        d["analyses"] = list(self.analyses)
        d["weights"] = list(self.weights) if self.weights else None
        return d


def _convert(key: str, value):
    if not isinstance(value, str):
        return value
    if key in ("rule", "width", "steps", "noise_seed"):
        return int(value)
    if key in ("threshold", "density", "noise_sigma"):
        return float(value)
    if key == "mode":
        return Mode(value.lower())
    if key == "boundary":
        return Boundary.parse(value)
    if key == "weights":
        w = tuple(float(x) for x in value.split(","))
        if len(w) != 3:
            raise ValueError("need three comma-separated weights")
        return w
    if key == "analyses":
        return tuple(a.strip().lower() for a in value.split(",") if a.strip())
    if key == "formats":
        return tuple(DiagramFormat.parse(f.strip()) for f in value.split(",") if f.strip())
    if key == "out":
        return Path(value)
    return value


@dataclass
class ExperimentBundle:
    spec: ExperimentSpec
    diagram: SpaceTimeDiagram
    reports: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    log_lines: list = field(default_factory=list)


def initial_condition(spec: ExperimentSpec) -> Generation:
    kind, _, arg = spec.initial.partition(":")
    boundary = spec.boundary or Boundary.FIXED_DEAD
    if kind == "fixture":
        try:
            fx = load_fixture(arg)
        except FileNotFoundError as e:
            raise SpecError(str(e)) from None
        g = fx.initial if spec.boundary is None else fx.initial.with_boundary(spec.boundary)
        if spec.width is not None and spec.width != g.width:
            raise SpecError(f"fixture {arg!r} has width {g.width}, spec asks for {spec.width}")
        return g
    if kind == "bits":
        g = Generation.from_bits(arg, boundary)
        if spec.width is not None and spec.width != g.width:
            raise SpecError(f"explicit bits have width {g.width}, spec asks for {spec.width}")
        return g
    width = spec.width or 101
    if kind == "random":
        return Generation.random(width, int(arg or 0), spec.density, boundary)
    return single_seed(width, boundary)


def photonic_config(spec: ExperimentSpec) -> PhotonicConfig:
    noise = NoiseSpec(spec.noise_sigma, spec.noise_seed)
    if spec.weights is not None:
        return PhotonicConfig(spec.weights, spec.threshold, noise)
    res = compile_rule(spec.rule)
    if not res.feasible:
        raise InfeasibleRule(f"rule {spec.rule} has no photonic realization: the feasibility census "
                             f"(photonic-eca census) lists it as infeasible")
    return PhotonicConfig(res.config.weights, res.config.threshold, noise)


def _rule_number(spec: ExperimentSpec) -> int:
    if spec.rule is not None:
        return spec.rule
    return realized_rule(PhotonicConfig(spec.weights, spec.threshold))


def _resolve_steps(spec: ExperimentSpec) -> int:
    if spec.steps is not None:
        return spec.steps
    kind, _, arg = spec.initial.partition(":")
    return load_fixture(arg).steps if kind == "fixture" else 100


def run_experiment(spec: ExperimentSpec, write: bool = True) -> ExperimentBundle:
    spec.validate()
    init = initial_condition(spec)
    spec = dataclasses.replace(spec, steps=_resolve_steps(spec))
    rule_n = _rule_number(spec)
    lines = [f"mode={spec.mode.value} rule={rule_n} width={init.width} steps={spec.steps} "
             f"boundary={init.boundary.value} initial={spec.initial}"]
    t0 = time.perf_counter()
    trace = None
    if spec.mode is Mode.TABLE:
        d = evolve(init, rule_from_number(rule_n), spec.steps)
    elif spec.mode is Mode.PHOTONIC:
        cfg = photonic_config(spec)
        d = photonic_evolve(init, cfg, spec.steps)
        d.rule_number = rule_n
    else:
        cfg = photonic_config(spec)
        trace = run_loop(init, PulseTrainConfig(cfg, init.width), spec.steps)
        inten = [it.intensities for it in trace.iterations]
        d = SpaceTimeDiagram(trace.rows(), init.boundary,
                             intensities=inten if inten else None,
                             threshold=cfg.threshold if inten else None, rule_number=rule_n)
    lines.append(f"evolved in {time.perf_counter() - t0:.3f} s")
    bundle = ExperimentBundle(spec, d, log_lines=lines)
    for name in spec.analyses:
        bundle.reports[name] = _analyze(name, spec, d, init, rule_n, trace, lines)
    if write:
        _write(bundle, trace)
    return bundle


def _ether_for(d: SpaceTimeDiagram, spec: ExperimentSpec) -> EtherTiling:
    kind, _, arg = spec.initial.partition(":")
    if kind == "fixture":
        fx = load_fixture(arg)
        if fx.ether:
            return EtherTiling.from_dict(fx.ether)
    return detect_ether(d)


def _analyze(name, spec, d, init, rule_n, trace, lines) -> dict:
    r = rule_from_number(rule_n)
    if name == "fractal":
        return box_counting_dimension(d).as_dict()
    if name == "damage":
        return damage_spreading(r, init, init.width // 2, spec.steps).as_dict()
    if name == "prng":
        bits = middle_column_bits(r, init, spec.steps)
        return randomness_battery(bits).as_dict()
    if name == "ether":
        return detect_ether(d).as_dict()
    if name == "gliders":
        ether = _ether_for(d, spec)
        events = extract_glider_events(filter_ether(d, ether))
        return {"ether": ether.as_dict(), "events": [e.as_dict() for e in events]}
    if name == "extinction":
        if d.intensities is None:
            raise SpecError("extinction needs mode photonic or emulator")
        ratio = extinction_ratio(d)
        # strict JSON has no infinity; a dark dead level is reported as "inf"
        return {"extinction_ratio": ratio if math.isfinite(ratio) else "inf"}
    if name == "throughput":
        if trace is None:
            raise SpecError("throughput needs mode emulator")
        rep = throughput_report(trace)
        # wall-clock numbers go to the log so reports stay reproducible
        lines.append(f"emulator wall time {rep.emulator_seconds:.4f} s")
        return {"cell_updates": rep.cell_updates, "modeled_seconds": rep.modeled_seconds,
                "modeled_rate": rep.modeled_rate}
    raise SpecError(f"unknown analysis {name!r}")


def _write(bundle: ExperimentBundle, trace) -> None:
    out = Path(bundle.spec.out)
    out.mkdir(parents=True, exist_ok=True)
    for fmt in bundle.spec.formats:
        path = out / f"diagram.{fmt.value}"
        path.write_text(dumps_diagram(bundle.diagram, fmt), encoding="utf-8")
        bundle.files.append(path)
    if trace is not None:
        path = out / "trace.jsonl"
        trace.write_jsonl(path)
        bundle.files.append(path)
    report = {"spec": bundle.spec.as_dict(), "reports": bundle.reports}
    path = out / "report.json"
    path.write_text(json.dumps(report, indent=1, sort_keys=True, default=_json_default) + "\n",
                    encoding="utf-8")
    bundle.files.append(path)
    path = out / "run.log"
    path.write_text("\n".join(bundle.log_lines) + "\n", encoding="utf-8")
    bundle.files.append(path)


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, float):
        return repr(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
