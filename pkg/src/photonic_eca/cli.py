"""Command-line front end: ``photonic-eca {run,compile,census,analyze,convert}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import fixtures
from .analysis import (box_counting_dimension, detect_ether, extract_glider_events,
                       filter_ether)
from .compiler import DEFAULT_GRID_STEPS, census_summary, census_to_csv, compile_rule, feasibility_census
from .experiment import ExperimentSpec, SpecError, run_experiment
from .io import DiagramFormat, DiagramParseError, export_diagram, import_diagram
from .photonic import extinction_ratio


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output path (directory for run)")
    p.add_argument("--format", dest="format", choices=[f.value for f in DiagramFormat],
                   help="diagram format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="photonic-eca", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="evolve a rule and write a diagram bundle")
    run.add_argument("spec", nargs="?", help="key = value spec file; flags override it")
    run.add_argument("--rule", type=int)
    run.add_argument("--mode", choices=["table", "photonic", "emulator"])
    run.add_argument("--width", type=int)
    run.add_argument("--steps", type=int)
    run.add_argument("--boundary", choices=["periodic", "dead"])
    run.add_argument("--seed", type=int, help="random initial row with this seed")
    run.add_argument("--initial", help="single | random:SEED | bits:0101 | fixture:NAME")
    run.add_argument("--analyses", help="comma list, e.g. fractal,damage")
    run.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    run.add_argument("--noise-seed", type=int, dest="noise_seed")
    _common(run)

    comp = sub.add_parser("compile", help="find a weight/threshold config for one rule")
    comp.add_argument("rule", type=int)
    comp.add_argument("--grid-steps", type=int, default=DEFAULT_GRID_STEPS)
    comp.add_argument("--no-refine", action="store_true")

    cen = sub.add_parser("census", help="compile all 256 rules and write a CSV")
    cen.add_argument("--grid-steps", type=int, default=DEFAULT_GRID_STEPS)
    cen.add_argument("--no-refine", action="store_true")
    cen.add_argument("--check", action="store_true", help="compare against the frozen census")
    cen.add_argument("--out", help="CSV path (default stdout)")

    ana = sub.add_parser("analyze", help="run an analysis on a saved diagram")
    ana.add_argument("input")
    ana.add_argument("--analysis", required=True,
                     choices=["fractal", "ether", "gliders", "extinction"])
    ana.add_argument("--format", dest="format", choices=[f.value for f in DiagramFormat],
                     help="input format (default from extension)")
    ana.add_argument("--out", help="JSON report path (default stdout)")

    conv = sub.add_parser("convert", help="convert a diagram between formats")
    conv.add_argument("input")
    _common(conv)
    return ap


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    base = ExperimentSpec.parse_text(Path(args.spec).read_text(encoding="utf-8"), check=False) if args.spec else None
    overrides = {k: getattr(args, k) for k in
                 ("rule", "mode", "width", "steps", "boundary", "initial", "analyses",
                  "noise_sigma", "noise_seed", "out")}
    if args.seed is not None and args.initial is None:
        overrides["initial"] = f"random:{args.seed}"
    if args.format:
        overrides["formats"] = args.format
    spec = ExperimentSpec.from_mapping(overrides, base)
    bundle = run_experiment(spec)
    for path in bundle.files:
        print(path)
    return 0


def cmd_compile(args) -> int:
    res = compile_rule(args.rule, args.grid_steps, not args.no_refine)
    out = res.csv_row()
    out["feasible"] = bool(out["feasible"])
    print(json.dumps(out, indent=1))
    return 0 if res.feasible else 1


def cmd_census(args) -> int:
    results = feasibility_census(args.grid_steps, not args.no_refine)
    text = census_to_csv(results)
    _emit(text, args.out)
    summary = census_summary(results)
    print(f"{summary['feasible']} of {summary['rules']} rules feasible", file=sys.stderr)
    if args.check and text != fixtures.census_text():
        print("error: census differs from the frozen golden census", file=sys.stderr)
        return 1
    return 0


def cmd_analyze(args) -> int:
    d = import_diagram(args.input, args.format)
    if args.analysis == "fractal":
        rep = box_counting_dimension(d).as_dict()
    elif args.analysis == "ether":
        rep = detect_ether(d).as_dict()
    elif args.analysis == "gliders":
        ether = detect_ether(d)
        rep = {"ether": ether.as_dict(),
               "events": [e.as_dict() for e in extract_glider_events(filter_ether(d, ether))]}
    else:
        if d.intensities is None:
            raise SpecError("extinction needs a JSON diagram with intensities")
        ratio = extinction_ratio(d)
        rep = {"extinction_ratio": ratio if math.isfinite(ratio) else "inf"}
    _emit(json.dumps(rep, indent=1, sort_keys=True) + "\n", args.out)
    return 0


def cmd_convert(args) -> int:
    if not args.out:
        raise SpecError("convert needs --out")
    d = import_diagram(args.input)
    export_diagram(d, args.out, args.format)
    return 0


COMMANDS = {"run": cmd_run, "compile": cmd_compile, "census": cmd_census,
            "analyze": cmd_analyze, "convert": cmd_convert}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except (SpecError, DiagramParseError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
