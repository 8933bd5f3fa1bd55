import json
import shutil

import numpy as np
import pytest

from photonic_eca.cli import main
from photonic_eca.core import Boundary, evolve, rule_from_number, single_seed
from photonic_eca.experiment import (ExperimentSpec, InfeasibleRule, Mode, SpecError,
                                     run_experiment)
from photonic_eca.fixtures import ENV_VAR, fixture_dir, load_fixture
from photonic_eca.io import import_diagram, loads_csv


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(out_dir):
    return json.loads((out_dir / "report.json").read_text())


def test_run_rule90_photonic_fractal(tmp_path, capsys):
    out = tmp_path / "r90"
    code, stdout, _ = run_cli(capsys, "run", "--rule", 90, "--mode", "photonic", "--width", 513,
                              "--steps", 256, "--analyses", "fractal", "--format", "pgm",
                              "--out", out)
    assert code == 0
    assert str(out / "diagram.pgm") in stdout
    d = import_diagram(out / "diagram.pgm")
    assert np.array_equal(d.states, evolve(single_seed(513), rule_from_number(90), 256).states)
    dim = report(out)["reports"]["fractal"]["dimension"]
    assert 1.4 < dim < 1.6


def test_run_rule0_is_dead_after_step_one(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "run", "--rule", 0, "--seed", 3, "--width", 40, "--steps", 10,
                         "--format", "csv", "--out", tmp_path)
    assert code == 0
    d = loads_csv((tmp_path / "diagram.csv").read_text())
    assert d.states[0].any() and not d.states[1:].any()


def test_run_rule30_damage(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "run", "--rule", 30, "--seed", 7, "--width", 1001, "--steps", 400,
                         "--analyses", "damage", "--out", tmp_path)
    assert code == 0
    rep = report(tmp_path)["reports"]["damage"]
    assert rep["lambda_right"] == pytest.approx(1.0, abs=0.02)


def test_run_is_deterministic(tmp_path, capsys):
    args = ["--rule", 54, "--mode", "photonic", "--seed", 5, "--width", 80, "--steps", 40,
            "--noise-sigma", 0.05, "--noise-seed", 2, "--format", "json", "--analyses", "extinction"]
    run_cli(capsys, "run", *args, "--out", tmp_path / "a")
    run_cli(capsys, "run", *args, "--out", tmp_path / "b")
    a = (tmp_path / "a" / "diagram.json").read_bytes()
    assert a == (tmp_path / "b" / "diagram.json").read_bytes()
    ra, rb = report(tmp_path / "a"), report(tmp_path / "b")
    assert ra["reports"] == rb["reports"]


def test_run_emulator_writes_trace(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "run", "--rule", 90, "--mode", "emulator", "--width", 33,
                         "--steps", 5, "--analyses", "throughput,extinction", "--out", tmp_path)
    assert code == 0
    assert len((tmp_path / "trace.jsonl").read_text().splitlines()) == 5
    rep = report(tmp_path)["reports"]
    assert rep["throughput"]["modeled_rate"] == pytest.approx(2.5e8)
    assert rep["extinction"]["extinction_ratio"] == "inf"
    assert "wall time" in (tmp_path / "run.log").read_text()


def test_spec_file_with_flag_override(tmp_path, capsys):
    spec = tmp_path / "exp.txt"
    spec.write_text("# rule 90 triangle\nrule = 90\nmode = photonic\nwidth = 65\nsteps = 20\n"
                    "boundary = periodic\nformats = csv, json\n")
    code, _, _ = run_cli(capsys, "run", spec, "--steps", 8, "--out", tmp_path / "o")
    assert code == 0
    d = import_diagram(tmp_path / "o" / "diagram.json")
    assert d.steps == 8 and d.boundary is Boundary.PERIODIC
    assert (tmp_path / "o" / "diagram.csv").exists()


def test_explicit_photonic_config():
    spec = ExperimentSpec.parse_text("weights = 1, 0, -1\nthreshold = 0.5\nmode = photonic\n"
                                     "width = 31\nsteps = 10\n")
    bundle = run_experiment(spec, write=False)
    assert bundle.diagram.rule_number == 90
    assert np.array_equal(bundle.diagram.states,
                          evolve(single_seed(31), rule_from_number(90), 10).states)


def test_infeasible_rule_in_photonic_mode(tmp_path, capsys):
    code, _, err = run_cli(capsys, "run", "--rule", 110, "--mode", "photonic", "--out", tmp_path)
    assert code == 0
    code, _, err = run_cli(capsys, "run", "--rule", 45, "--mode", "photonic", "--out", tmp_path)
    assert code == 2 and "census" in err
    with pytest.raises(InfeasibleRule):
        run_experiment(ExperimentSpec(rule=184, mode=Mode.PHOTONIC), write=False)


@pytest.mark.parametrize("text", [
    "rule = 300\n",
    "rule = 30\ncolour = red\n",
    "rule = 30\ninitial = banana\n",
    "weights = 1, 0, -1\n",
    "rule = 30\nanalyses = tarot\n",
    "just some words\n",
    "mode = photonic\n",
])
def test_invalid_specs(text):
    with pytest.raises(SpecError):
        ExperimentSpec.parse_text(text)


def test_invalid_spec_exit_status(tmp_path, capsys):
    spec = tmp_path / "bad.txt"
    spec.write_text("rule = 30\nwidth = -3\n")
    code, _, err = run_cli(capsys, "run", spec, "--out", tmp_path)
    assert code == 2 and err.startswith("error:")
    code, _, err = run_cli(capsys, "run", "--rule", 30, "--initial", "fixture:nope", "--out", tmp_path)
    assert code == 2 and "nope" in err


def test_run_from_fixture_with_gliders(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "run", "--rule", 54, "--initial", "fixture:blackhole",
                         "--analyses", "gliders", "--out", tmp_path)
    assert code == 0
    events = report(tmp_path)["reports"]["gliders"]["events"]
    assert [e["kind"] for e in events if e["kind"] != "Track"] == ["BlackHole"]
    d = import_diagram(tmp_path / "diagram.json")
    assert d.steps == load_fixture("blackhole").steps


def test_fixture_dir_env_override(tmp_path, monkeypatch, capsys):
    shutil.copy(fixture_dir() / "glider.json", tmp_path / "mine.json")
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert fixture_dir() == tmp_path
    assert load_fixture("mine").rule_number == 54
    with pytest.raises(FileNotFoundError):
        load_fixture("glider")
    code, _, _ = run_cli(capsys, "run", "--rule", 54, "--initial", "fixture:mine", "--steps", 10,
                         "--out", tmp_path / "o")
    assert code == 0


def test_compile_verb(capsys):
    code, out, _ = run_cli(capsys, "compile", 90)
    assert code == 0
    obj = json.loads(out)
    assert obj["feasible"] is True and obj["rule_number"] == 90
    code, out, _ = run_cli(capsys, "compile", 255)
    assert code == 1 and json.loads(out)["feasible"] is False


def test_census_verb(tmp_path, capsys):
    path = tmp_path / "census.csv"
    code, _, err = run_cli(capsys, "census", "--check", "--out", path)
    assert code == 0 and "95 of 256" in err
    assert path.read_text() == (fixture_dir() / "census.csv").read_text()


def test_analyze_and_convert(tmp_path, capsys):
    run_cli(capsys, "run", "--rule", 90, "--mode", "photonic", "--width", 129, "--steps", 64,
            "--format", "json", "--out", tmp_path)
    src = tmp_path / "diagram.json"
    code, out, _ = run_cli(capsys, "analyze", src, "--analysis", "fractal")
    assert code == 0 and "dimension" in json.loads(out)
    code, out, _ = run_cli(capsys, "analyze", src, "--analysis", "extinction")
    assert json.loads(out)["extinction_ratio"] == "inf"
    for fmt in ("pgm", "csv"):
        dst = tmp_path / f"c.{fmt}"
        assert run_cli(capsys, "convert", src, "--out", dst)[0] == 0
        assert np.array_equal(import_diagram(dst).states, import_diagram(src).states)
    code, _, err = run_cli(capsys, "analyze", tmp_path / "c.csv", "--analysis", "extinction")
    assert code == 2


def test_analyze_ether_on_fixture(tmp_path, capsys):
    from photonic_eca.io import export_diagram
    export_diagram(load_fixture("ether_bootstrap").diagram(), tmp_path / "e.csv")
    code, out, _ = run_cli(capsys, "analyze", tmp_path / "e.csv", "--analysis", "ether")
    obj = json.loads(out)
    assert code == 0 and (obj["spatial_period"], obj["temporal_period"]) == (4, 4)


def test_bad_input_file(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_text("P2\n3 3\n255\n0 0\n")
    code, _, err = run_cli(capsys, "convert", bad, "--out", tmp_path / "x.csv")
    assert code == 2 and "line" in err
