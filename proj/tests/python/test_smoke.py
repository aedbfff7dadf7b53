import math

import numpy as np
import pytest

import collrf


def centers(lines):
    return sorted(line.center for line in lines)


def test_two_emitter_lines():
    p = collrf.make_params(2, 50, 20)
    lines = collrf.general_lines(p)
    assert centers(lines) == pytest.approx([-110, -90, 0, 90, 110])
    assert collrf.integrated_weight(lines) == pytest.approx(4 / 3)
    assert sorted((l.center, l.half_width, l.weight) for l in lines) == pytest.approx(
        sorted((l.center, l.half_width, l.weight) for l in collrf.two_atom_lines(p))
    )


def test_invalid_input_is_a_value_error():
    with pytest.raises(ValueError):
        collrf.make_params(0, 1, 1)
    with pytest.raises(collrf.InvalidInput):
        collrf.three_atom_lines(collrf.make_params(2, 50, 20))


def test_sum_rule_on_a_wide_grid():
    p = collrf.make_params(3, 50, 20)
    grid = collrf.linear_grid(-2200, 2200, 440001)
    values = collrf.evaluate_spectrum(collrf.general_lines(p), grid)
    assert np.trapezoid(values, grid) == pytest.approx(math.pi * 15 / 6, rel=0.01)


def test_secular_steady_state_is_mixed():
    rho = collrf.secular_steady_state(collrf.make_params(4, 30, 20))
    assert np.allclose(rho, np.eye(5) / 5, atol=1e-10)


def test_oracle_matches_mollow_at_zero_coupling():
    p = collrf.make_params(2, 25, 0)
    grid = collrf.default_grid(p)
    oracle = np.asarray(collrf.dressed_spectrum_oracle(p, grid))
    exact = collrf.evaluate_spectrum(collrf.mollow_limit_lines(p), grid)
    assert np.max(np.abs(oracle - exact)) < 1e-6


def test_figure_three_round_trip():
    grid, values = collrf.figure_data(3)
    peaks = collrf.detect_peaks(grid, values, 0.001, 0.1)
    assert len(peaks) == 11
    r = collrf.infer(grid, values)
    assert r.n_hat == 5
    assert r.delta_hat == pytest.approx(60, rel=1e-6)
    assert r.omega_hat == pytest.approx(100, rel=1e-6)


def test_noisy_inference():
    p = collrf.make_params(4, 100, 60)
    grid = collrf.default_grid(p)
    clean = collrf.evaluate_spectrum(collrf.general_lines(p), grid)
    noisy = collrf.add_noise(grid, clean, 0.01, 3)
    r = collrf.infer(grid, noisy, smoothing=0.25)
    assert r.n_hat == 4
    assert r.delta_hat == pytest.approx(60, rel=0.03)


def test_merged_regime_is_reported():
    p = collrf.make_params(4, 100, 3)
    grid = collrf.default_grid(p)
    values = collrf.evaluate_spectrum(collrf.general_lines(p), grid)
    with pytest.raises(collrf.MergedRegimeError):
        collrf.infer(grid, values)


def test_acceptance_check_from_python():
    name, passed, detail = collrf.run_criterion(1)
    assert passed, detail
