import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.optimize import bisect

from kplab.collisions import (
    ModeIndex, collision_locus_bloch, collision_locus_periodic, crossing_ell_sq,
    enumerate_collisions, enumerate_dangerous, krein, omega,
)
from kplab.symbols import builtin_symbol

MODELS = [("fkdv", 2.0), ("bo", None), ("ilw", None), ("whitham", None)]


def omega_gap(sym, sigma, k, xi, p, q):
    """omega(p) - omega(-q) as a function of ell^2, from the dispersion relation."""
    def w(n, ell_sq):
        s = n + xi
        return s * (sym(k) - sym(k * s)) - sigma * ell_sq / s
    return lambda ell_sq: w(p, ell_sq) - w(-q, ell_sq)


def bisection_root(f, hi=1e3):
    lo = 0.0
    while f(lo) * f(hi) > 0:
        hi *= 10
        if hi > 1e9:
            return None
    return bisect(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("sigma", [1, -1])
def test_periodic_loci_against_bisection(model, sigma):
    sym = builtin_symbol(*model)
    for p in range(1, 5):
        for q in range(1, 5):
            if (p, q) == (1, 1):
                continue
            closed = collision_locus_periodic(sym, sigma, 1.0, p, q)
            f = omega_gap(sym, sigma, 1.0, 0.0, p, q)
            if f(0.0) * f(1e9) > 0:
                assert closed is None
                continue
            root = bisection_root(f)
            assert closed is not None
            assert abs(closed - root) <= 1e-12 * max(1.0, root)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("xi", [0.1, 0.25, 0.5])
def test_bloch_loci_against_bisection(model, xi):
    sym = builtin_symbol(*model)
    sigma = -1 if model[0] == "whitham" else 1
    for p in range(0, 4):
        for q in range(1, 5):
            closed = collision_locus_bloch(sym, sigma, 1.0, xi, p, q)
            f = omega_gap(sym, sigma, 1.0, xi, p, q)
            if f(0.0) * f(1e9) > 0:
                assert closed is None
                continue
            root = bisection_root(f)
            assert abs(closed - root) <= 1e-12 * max(1.0, root)


def test_known_loci():
    whitham = builtin_symbol("whitham")
    # (4/3) (m(1) - m(2)) for modes {1, -2}
    assert_allclose(collision_locus_periodic(whitham, 1, 1.0, 1, 2),
                    4 / 3 * (whitham(1.0) - whitham(2.0)), rtol=1e-15)
    assert_allclose(collision_locus_periodic(whitham, 1, 1.0, 1, 2), 0.237896, atol=1e-6)
    kdv = builtin_symbol("fkdv", 2)
    assert collision_locus_periodic(kdv, -1, 1.0, 1, 2) == 4.0
    assert collision_locus_periodic(kdv, 1, 1.0, 1, 2) is None
    ilw = builtin_symbol("ilw")
    assert_allclose(collision_locus_bloch(ilw, 1, 1.0, 0.25, 0, 1), 0.032293, atol=5e-7)


def test_locus_errors():
    sym = builtin_symbol("bo")
    with pytest.raises(ValueError):
        collision_locus_periodic(sym, 1, 1.0, 1, 1)
    with pytest.raises(ValueError):
        collision_locus_periodic(sym, 1, 1.0, 0, 2)
    with pytest.raises(ValueError):
        collision_locus_bloch(sym, 1, 1.0, 0.0, 0, 1)
    with pytest.raises(ValueError):
        ModeIndex(0, 0.0)
    with pytest.raises(ValueError):
        crossing_ell_sq(sym, 1, 1.0, ModeIndex(1, 0.1), ModeIndex(2, 0.2))


@given(st.sampled_from(MODELS), st.sampled_from([1, -1]),
       st.floats(0.05, 0.5), st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=100, deadline=None)
def test_crossing_equalizes_omega(model, sigma, xi, p, q):
    if p == q or p + xi == 0 or q + xi == 0:
        return
    sym = builtin_symbol(*model)
    P, Q = ModeIndex(p, xi), ModeIndex(q, xi)
    ell_sq = crossing_ell_sq(sym, sigma, 1.0, P, Q)
    if ell_sq <= 0:
        return
    ell = np.sqrt(ell_sq)
    wp, wq = omega(sym, sigma, 1.0, ell, P), omega(sym, sigma, 1.0, ell, Q)
    assert abs(wp - wq) <= 1e-10 * max(1.0, abs(wp))


def test_krein_signs():
    kdv = builtin_symbol("fkdv", 2)
    # sigma = 1, m increasing: m(1) - m(n) - l^2/n^2 < 0 for |n| >= 2
    assert krein(kdv, 1, 1.0, 0.5, ModeIndex(2)) == -1
    assert krein(kdv, 1, 1.0, 0.5, ModeIndex(-3)) == -1
    assert krein(kdv, -1, 1.0, 2.0, ModeIndex(1)) == 1
    assert krein(kdv, 1, 1.0, 0.0, ModeIndex(1)) == 0


def test_enumerate_periodic_regimes():
    kdv = builtin_symbol("fkdv", 2)
    assert enumerate_dangerous(kdv, 1, 1.0, 0.0, 3, 3.0) == []
    ev = enumerate_dangerous(kdv, -1, 1.0, 0.0, 3, 3.0)
    assert {(e.pair[0].n, e.pair[1].n) for e in ev} == {(-2, 1), (-1, 2)}
    assert all(e.ell_sq == 4.0 for e in ev)
    whitham = builtin_symbol("whitham")
    ev = enumerate_dangerous(whitham, 1, 1.0, 0.0, 3, 3.0)
    assert_allclose(ev[0].ell_sq, 0.2378953216357703, rtol=1e-14)


@pytest.mark.parametrize("model,sigma", [(("fkdv", 2.0), 1), (("bo", None), 1),
                                         (("ilw", None), 1), (("whitham", None), -1)])
def test_enumerate_bloch_lowest(model, sigma):
    sym = builtin_symbol(*model)
    ev = enumerate_dangerous(sym, sigma, 1.0, 0.25, 3, 1.0)
    assert [(e.pair[0].n, e.pair[1].n) for e in ev] == [(-1, 0)]
    assert_allclose(ev[0].ell_sq, collision_locus_bloch(sym, sigma, 1.0, 0.25, 0, 1), rtol=1e-13)


def test_enumerate_sorted_and_capped():
    sym = builtin_symbol("whitham")
    events = enumerate_collisions(sym, 1, 1.0, 0.0, 4, 2.0)
    assert [e.ell_sq for e in events] == sorted(e.ell_sq for e in events)
    assert all(0 < e.ell_sq <= 4.0 for e in events)
    with pytest.raises(ValueError):
        enumerate_collisions(sym, 1, 1.0, 0.0, 2, 2.0)
