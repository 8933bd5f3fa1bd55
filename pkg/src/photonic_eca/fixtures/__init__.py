"""Frozen initial conditions and golden outputs.

Each ``<name>.json`` holds a rule number, boundary, initial row, step count
and, for Rule 54 runs, the ether tile the run is filtered with. The lookup
directory can be redirected with the ``PHOTONIC_ECA_FIXTURES`` environment
variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..core import Generation, RuleTable, SpaceTimeDiagram, evolve, rule_from_number

ENV_VAR = "PHOTONIC_ECA_FIXTURES"
CENSUS_FILE = "census.csv"


def fixture_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else Path(__file__).resolve().parent


@dataclass(frozen=True)
class Fixture:
    name: str
    rule_number: int
    initial: Generation
    steps: int
    ether: Optional[dict] = None
    expect: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def rule(self) -> RuleTable:
        return rule_from_number(self.rule_number)

    def diagram(self) -> SpaceTimeDiagram:
        return evolve(self.initial, self.rule, self.steps)


def available() -> list[str]:
    return sorted(p.stem for p in fixture_dir().glob("*.json"))


def load_fixture(name: str) -> Fixture:
    path = fixture_dir() / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no fixture {name!r} in {fixture_dir()} (have: {', '.join(available())})")
    obj = json.loads(path.read_text(encoding="utf-8"))
    init = Generation.from_bits(obj["initial"], obj.get("boundary", "periodic"))
    return Fixture(name, int(obj["rule_number"]), init, int(obj["steps"]),
                   obj.get("ether"), obj.get("expect", {}), obj.get("notes", ""))


def write_fixture(path, name: str, rule_number: int, initial: Generation, steps: int, *,
                  ether: Optional[dict] = None, expect: Optional[dict] = None, notes: str = "") -> None:
    obj = {"name": name, "rule_number": rule_number, "boundary": initial.boundary.value,
           "width": initial.width, "initial": initial.to_bits(), "steps": steps}
    if ether is not None:
        obj["ether"] = ether
    if expect:
        obj["expect"] = expect
    if notes:
        obj["notes"] = notes
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def census_text() -> str:
    return (fixture_dir() / CENSUS_FILE).read_text(encoding="utf-8")
