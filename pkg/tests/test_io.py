import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonic_eca.compiler import compile_rule
from photonic_eca.core import Generation, SpaceTimeDiagram, evolve, rule_from_number, single_seed
from photonic_eca.io import (DiagramFormat, DiagramParseError, dumps_csv, dumps_diagram, dumps_json,
                             dumps_pgm, export_diagram, import_diagram, loads_csv, loads_diagram,
                             loads_json, loads_pgm, pgm_pixels)
from photonic_eca.photonic import PhotonicConfig, photonic_evolve

XOR = PhotonicConfig((1, 0, -1), 0.5)


def pgm_body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_pgm_all_live_2x2():
    d = SpaceTimeDiagram(np.ones((2, 2), dtype=np.uint8))
    body = pgm_body(dumps_pgm(d))
    assert body[0] == "P2" and body[1] == "2 2" and body[2] == "255"
    assert " ".join(body[3:]).split() == ["255"] * 4


def test_pgm_rule90_dead_pixels_are_zero():
    d = photonic_evolve(single_seed(129), XOR, 64)
    pix = pgm_pixels(d)
    assert (pix[d.states == 0] == 0).all()
    assert (pix[1:][d.states[1:] == 1] == 255).all()


def test_pgm_all_dead_run_maps_to_zero():
    d = photonic_evolve(Generation.dead(16), XOR, 5)
    assert not pgm_pixels(d).any()


@pytest.mark.parametrize("n", [30, 54, 110])
def test_pgm_round_trip_recovers_states(n):
    cfg = compile_rule(n).config.with_noise(0.05, seed=n)
    d = photonic_evolve(Generation.random(70, seed=n, boundary="periodic"), cfg, 40)
    back = loads_pgm(dumps_pgm(d))
    assert np.array_equal(back.states, d.states)
    assert back.boundary is d.boundary


def test_pgm_state_rows_only_when_needed():
    d = photonic_evolve(single_seed(65), XOR, 30)
    assert "state-row" not in dumps_pgm(d)
    # a threshold near the live level puts cells within one gray step of it
    cfg = PhotonicConfig((1, -0.6, -0.6), 0.359999)
    d = photonic_evolve(Generation.random(200, seed=3), cfg, 20)
    text = dumps_pgm(d)
    assert np.array_equal(loads_pgm(text).states, d.states)


def test_pgm_table_run_is_plain_states():
    d = evolve(Generation.random(30, seed=2), rule_from_number(30), 10)
    assert np.array_equal(pgm_pixels(d), d.states * 255)
    back = loads_pgm(dumps_pgm(d))
    assert back == d and back.rule_number == 30


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("P5\n2 2\n255\n0 0 0 0\n", 1),
    ("P2\n2 2\n", 2),
    ("P2\n2 2\n255\n0 0 255\n", 4),
    ("P2\n2 2\n255\n0 0 255 x\n", 4),
    ("P2\n2 2\n255\n0 0 255 256\n", 4),
    ("P2\n2 2\n100\n0 0 0 0\n", 3),
])
def test_pgm_parse_errors(text, line):
    with pytest.raises(DiagramParseError) as err:
        loads_pgm(text)
    assert err.value.line == line


def test_truncated_pgm_reports_offset():
    text = dumps_pgm(evolve(single_seed(9), rule_from_number(90), 4))
    with pytest.raises(DiagramParseError) as err:
        loads_pgm(text[: len(text) // 2])
    assert err.value.line > 1 and "pixels" in str(err.value)


def test_csv_round_trip():
    d = evolve(Generation.random(50, seed=4), rule_from_number(110), 30)
    text = dumps_csv(d)
    assert text.splitlines()[0] == ",".join(map(str, d.states[0]))
    assert np.array_equal(loads_csv(text).states, d.states)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 40), st.integers(0, 2**31))
def test_csv_and_json_round_trip_any_states(rows, cols, seed):
    s = np.random.default_rng(seed).integers(0, 2, (rows, cols)).astype(np.uint8)
    d = SpaceTimeDiagram(s, "periodic")
    assert np.array_equal(loads_csv(dumps_csv(d)).states, s)
    assert loads_json(dumps_json(d)) == d


def test_csv_parse_errors():
    with pytest.raises(DiagramParseError) as err:
        loads_csv("0,1\n1,2\n")
    assert (err.value.line, err.value.offset) == (2, 2)
    with pytest.raises(DiagramParseError) as err:
        loads_csv("0,1\n1\n")
    assert err.value.line == 2
    with pytest.raises(DiagramParseError):
        loads_csv("\n")


def test_json_without_intensities():
    d = evolve(single_seed(17), rule_from_number(90), 8)
    obj = json.loads(dumps_json(d))
    assert "intensities" not in obj and "threshold" not in obj
    assert loads_json(dumps_json(d)) == d


def test_json_keeps_nine_significant_digits():
    cfg = compile_rule(30).config
    d = photonic_evolve(Generation.random(64, seed=1), cfg, 30)
    back = loads_json(dumps_json(d))
    assert np.array_equal(back.states, d.states)
    assert back.threshold == d.threshold
    assert np.allclose(back.intensities, d.intensities, rtol=5e-9, atol=0)
    again = dumps_json(back)
    assert again == dumps_json(d)


def test_json_parse_errors():
    with pytest.raises(DiagramParseError) as err:
        loads_json('{"format": "photonic-eca-diagram",\n "states": [}')
    assert err.value.line == 2
    with pytest.raises(DiagramParseError):
        loads_json('{"states": ["01"]}')
    with pytest.raises(DiagramParseError):
        loads_json('{"format": "photonic-eca-diagram", "states": ["012"]}')


def test_all_formats_agree_on_states(tmp_path):
    d = photonic_evolve(Generation.random(40, seed=6), compile_rule(54).config, 25)
    for fmt in DiagramFormat:
        path = export_diagram(d, tmp_path / f"d.{fmt.value}")
        assert np.array_equal(import_diagram(path).states, d.states)
        assert np.array_equal(loads_diagram(dumps_diagram(d, fmt), fmt).states, d.states)


def test_format_parsing(tmp_path):
    assert DiagramFormat.parse(".PGM") is DiagramFormat.PGM
    assert DiagramFormat.from_path(tmp_path / "x.csv") is DiagramFormat.CSV
    with pytest.raises(ValueError):
        DiagramFormat.parse("png")


def test_unwritable_path(tmp_path):
    d = evolve(single_seed(5), rule_from_number(90), 2)
    with pytest.raises(OSError):
        export_diagram(d, tmp_path / "missing" / "d.csv")
