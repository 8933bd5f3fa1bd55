import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonic_eca.core import Boundary, Generation, evolve, rule_from_number, single_seed, step
from photonic_eca.photonic import (NoiseSpec, PhotonicConfig, detect_threshold, extinction_ratio,
                                   interfere, max_abs_amplitude, photonic_evolve, photonic_step)
from oracles import thresholds_for

XOR = PhotonicConfig((1, 0, -1), 0.5)
R30 = PhotonicConfig((1, -0.6, -0.6), 0.25)
R54 = PhotonicConfig((0.5, -0.8, 0.5), 0.16)


def test_config_validation():
    with pytest.raises(ValueError):
        PhotonicConfig((1.5, 0, 0), 0.5)
    with pytest.raises(ValueError):
        PhotonicConfig((1, 0, 0), -0.1)
    with pytest.raises(ValueError):
        PhotonicConfig((1, 0), 0.5)
    with pytest.raises(ValueError):
        NoiseSpec(-1.0)


def test_interfere_hand_example():
    g = Generation.from_bits("011")
    assert interfere(g, (1, 0, -1)).tolist() == [-1.0, -1.0, 1.0]


def test_interfere_trivial_cases():
    assert not interfere(Generation.dead(9), (0.3, -0.7, 1)).any()
    g = Generation.random(40, seed=4)
    assert np.array_equal(interfere(g, (0, 1, 0)), g.cells.astype(float))


def test_interfere_periodic_wraps():
    g = Generation.from_bits("100", "periodic")
    # cell 2's right neighbor is cell 0
    assert interfere(g, (0, 0, 1)).tolist() == [0.0, 0.0, 1.0]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3),
       st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 1000))
def test_interfere_is_linear(weights, alpha, beta, seed):
    # real-valued relaxation: the same 3-tap convolution applied to arbitrary amplitudes
    rng = np.random.default_rng(seed)
    x1, x2 = rng.random(20), rng.random(20)

    def conv(x):
        left = np.concatenate([[0.0], x[:-1]])
        right = np.concatenate([x[1:], [0.0]])
        return weights[0] * left + weights[1] * x + weights[2] * right

    lhs = conv(alpha * x1 + beta * x2)
    assert np.allclose(lhs, alpha * conv(x1) + beta * conv(x2), atol=1e-12)
    g = Generation.from_cells((x1 > 0.5).astype(np.uint8))
    assert np.allclose(interfere(g, weights), conv(g.cells.astype(float)))


def test_detect_threshold_examples():
    assert detect_threshold([-1, 0, 0.4], 0.25).to_bits() == "100"
    assert detect_threshold([0.0], 0.0).to_bits() == "0"
    out = detect_threshold([1, 1], 0.25, NoiseSpec(0.01, seed=5))
    assert out.to_bits() == "11"


def test_detect_threshold_is_strict():
    assert detect_threshold([0.5], 0.25).to_bits() == "0"
    assert detect_threshold([math.nextafter(0.5, 1)], 0.25).to_bits() == "1"


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 2), min_size=1, max_size=30), st.floats(0, 4), st.floats(0, 1))
def test_detect_threshold_monotone(y, b, bump):
    a = detect_threshold(y, b).cells
    c = detect_threshold(np.asarray(y) + bump, b).cells
    assert (c >= a).all()


@pytest.mark.parametrize("cfg, n", [(XOR, 90), (R30, 30), (R54, 54)])
def test_reference_configs_realize_rules(cfg, n):
    assert thresholds_for(cfg.weights, cfg.threshold) == n
    r = rule_from_number(n)
    for seed in range(20):
        for boundary in Boundary:
            g = Generation.random(64, seed, boundary=boundary)
            nxt, inten = photonic_step(g, cfg)
            assert nxt == step(g, r)
            assert np.array_equal(inten > cfg.threshold, nxt.cells == 1)


def test_photonic_evolve_rule90_matches_table():
    d = photonic_evolve(single_seed(513), XOR, 256)
    assert np.array_equal(d.states, evolve(single_seed(513), rule_from_number(90), 256).states)
    assert d.intensities.shape == (256, 513)
    assert d.threshold_consistent()


def test_photonic_evolve_zero_steps():
    d = photonic_evolve(single_seed(11), XOR, 0)
    assert d.steps == 0 and d.intensities.shape == (0, 11)


def test_rule30_noise_below_margin_is_harmless():
    # margin of R30 over intensity is 0.36 - 0.16 = 0.2
    margin = 0.2
    sigma = margin / 10
    init = Generation.random(201, seed=1)
    clean = photonic_evolve(init, R30, 200)
    noisy = photonic_evolve(init, R30.with_noise(sigma, seed=3), 200)
    # every |y| sits at least 0.1 = 5 sigma away from sqrt(b) = 0.5
    slack = np.abs(np.sqrt(clean.intensities) - math.sqrt(R30.threshold))
    assert slack.min() >= 5 * sigma - 1e-12
    assert np.array_equal(noisy.states, clean.states)
    assert noisy.threshold_consistent()


def test_noisy_runs_are_deterministic():
    init = Generation.random(101, seed=2)
    cfg = R30.with_noise(0.2, seed=11)
    a, b = photonic_evolve(init, cfg, 50), photonic_evolve(init, cfg, 50)
    assert a == b
    c = photonic_evolve(init, R30.with_noise(0.2, seed=12), 50)
    assert not np.array_equal(a.intensities, c.intensities)


def test_extinction_ratio_xor_is_infinite():
    d = photonic_evolve(single_seed(101), XOR, 50)
    assert extinction_ratio(d) == math.inf


def test_extinction_ratio_rule30():
    # live intensities {1, 1.44, 0.36}, dead {0, 0.04, 0.16}
    d = photonic_evolve(Generation.random(400, seed=0), R30, 100)
    assert extinction_ratio(d) == pytest.approx(0.36 / 0.16)


def test_extinction_ratio_preconditions():
    with pytest.raises(ValueError):
        extinction_ratio(evolve(single_seed(11), rule_from_number(90), 3))
    all_live = PhotonicConfig((1, 1, 1), 0.0)
    d = photonic_evolve(Generation.from_bits("111", "periodic"), all_live, 2)
    with pytest.raises(ValueError):
        extinction_ratio(d)


def test_max_abs_amplitude():
    assert max_abs_amplitude((1, 0, -1)) == 1
    assert max_abs_amplitude((1, -0.6, -0.6)) == pytest.approx(1.2)
    assert max_abs_amplitude((1, 1, 1)) == 3
