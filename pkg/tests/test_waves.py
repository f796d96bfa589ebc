import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kplab.symbols import Monotonicity, MultiplierSymbol, builtin_symbol
from kplab.waves import (
    DegenerateSymbolError, Provenance, WaveParams, newton_refine, profile_constant,
    square_coefficients, stokes_coefficients, stokes_wave, wave_residual,
)

MODELS = [("fkdv", 2.0), ("bo", None), ("ilw", None), ("whitham", None)]


def physical_residual(sym, wave, B, points=256):
    """Profile equation M_k w - c w - w^2/2 - B evaluated on a grid via FFT."""
    z = 2 * np.pi * np.arange(points) / points
    w = wave.evaluate(z)
    n = np.fft.fftfreq(points, 1.0 / points)
    Mw = np.real(np.fft.ifft(sym(wave.params.k * n) * np.fft.fft(w)))
    return np.max(np.abs(Mw - wave.c * w - w * w / 2 - B))


def test_kdv_coefficients_by_hand():
    # m = 1 + k^2 at k = 1: m(1)=2, m(2)=5, m(3)=10
    co = stokes_coefficients(builtin_symbol("fkdv", 2), 1.0)
    assert_allclose([co.A0, co.A2, co.A3, co.c2], [-1 / 4, 1 / 12, 1 / 192, 1 / 4 - 1 / 24],
                    rtol=1e-15)


def test_whitham_a2_value():
    # 30-digit evaluation of 1 / (4 (sqrt(tanh 2 / 2) - sqrt(tanh 1)))
    co = stokes_coefficients(builtin_symbol("whitham"), 1.0)
    assert_allclose(co.A2, -1.40117649662603814, rtol=1e-14)
    assert_allclose(co.A2 - 2 * co.A0, -5.32870945708140343, rtol=1e-14)


def test_expansion_profile():
    sym = builtin_symbol("fkdv", 2)
    wave = stokes_wave(sym, 1, WaveParams(1.0, 0.1, 0.0))
    z = np.linspace(0, 2 * np.pi, 7)
    expected = (0.01 * -0.25 + 0.1 * np.cos(z) + 0.01 / 12 * np.cos(2 * z)
                + 0.001 / 192 * np.cos(3 * z))
    assert_allclose(wave.evaluate(z), expected, atol=1e-15)
    assert_allclose(wave.c, 2 + 0.01 * (1 / 4 - 1 / 24), rtol=1e-15)
    assert wave.exp_coefficient(-1) == 0.05
    assert wave.exp_coefficient(10) == 0.0
    assert wave.provenance is Provenance.EXPANSION


def test_square_coefficients_against_fft():
    rng = np.random.default_rng(3)
    what = rng.normal(size=6)
    sq = square_coefficients(np.concatenate([what, np.zeros(6)]))
    z = 2 * np.pi * np.arange(64) / 64
    w = what[0] + 2 * np.cos(np.outer(z, np.arange(1, 6))) @ what[1:]
    coeffs = np.real(np.fft.fft(w * w)) / 64
    assert_allclose(sq[:11], coeffs[:11], atol=1e-13)


@pytest.mark.parametrize("model", MODELS)
def test_expansion_residual_is_fourth_order(model):
    sym = builtin_symbol(*model)
    res = [stokes_wave(sym, 1, WaveParams(1.0, a)).residual for a in (0.08, 0.04)]
    assert 8 <= res[0] / res[1] <= 32


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("b", [0.0, 0.02])
def test_newton_converges(model, b):
    sym = builtin_symbol(*model)
    params = WaveParams(1.0, 0.05, b)
    wave = newton_refine(sym, params)
    assert wave.residual <= 1e-12
    assert wave.provenance is Provenance.NEWTON_REFINED
    assert wave.what[1] == 0.025
    B = profile_constant(sym, 1.0, b)
    assert physical_residual(sym, wave, B) < 1e-11
    # the expansion agrees with the refined wave to the order it claims
    stokes = stokes_wave(sym, 1, params)
    assert abs(stokes.c - wave.c) < 50 * 0.05 ** 4 + 1e-3 * b
    assert_allclose(stokes.what[:4], wave.what[:4], atol=50 * 0.05 ** 4 + 1e-3 * b)


def test_newton_zero_amplitude():
    sym = builtin_symbol("ilw")
    wave = newton_refine(sym, WaveParams(1.0, 0.0))
    assert wave.residual == 0.0
    assert wave.c == sym(1.0)
    assert np.all(wave.what == 0)


def test_wave_residual_flags_wrong_constant():
    sym = builtin_symbol("bo")
    wave = newton_refine(sym, WaveParams(1.0, 0.05))
    assert wave_residual(sym, wave, 0.0) < 1e-12
    assert wave_residual(sym, wave, 1e-3) >= 1e-3 - 1e-12


def test_degenerate_symbol():
    flat = MultiplierSymbol("flat", lambda k: np.ones_like(k), 0.0, Monotonicity.INCREASING)
    with pytest.raises(DegenerateSymbolError):
        stokes_coefficients(flat, 1.0)


@pytest.mark.parametrize("k,a", [(0.0, 0.1), (-1.0, 0.1), (1.0, float("nan"))])
def test_wave_params_validation(k, a):
    with pytest.raises(ValueError):
        WaveParams(k, a)


def test_large_amplitude_warns(caplog):
    with caplog.at_level(logging.WARNING):
        WaveParams(1.0, 0.3)
    assert "small-amplitude" in caplog.text


def test_newton_argument_checks():
    sym = builtin_symbol("bo")
    with pytest.raises(ValueError):
        newton_refine(sym, WaveParams(1.0, 0.05), M=8)
    with pytest.raises(ValueError):
        newton_refine(sym, WaveParams(1.0, 0.05), tol=1e-16)
