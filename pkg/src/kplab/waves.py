"""Small-amplitude 2*pi-periodic traveling waves of the profile equation

    M_k w = c w + w**2 / 2 + b,

stored as cosine coefficients ``w(z) = what[0] + sum_{n>=1} 2 what[n] cos(n z)``
(so ``what[n]`` is the complex-exponential coefficient of ``e^{+-inz}``).
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .symbols import MultiplierSymbol

__all__ = [
    "Provenance",
    "WaveParams",
    "StokesCoefficients",
    "StokesWave",
    "DegenerateSymbolError",
    "ConvergenceError",
    "stokes_coefficients",
    "stokes_wave",
    "newton_refine",
    "wave_residual",
    "profile_constant",
    "square_coefficients",
]

log = logging.getLogger(__name__)

DENOM_TOL = 1e-14
LARGE_AMPLITUDE = 0.2


class DegenerateSymbolError(ArithmeticError):
    """A Stokes denominator m(k) - 1, m(2k) - m(k) or m(3k) - m(k) vanishes."""


class ConvergenceError(RuntimeError):
    pass


class Provenance(enum.Enum):
    EXPANSION = "expansion"
    NEWTON_REFINED = "newton-refined"


@dataclass(frozen=True)
class WaveParams:
    k: float
    a: float
    b: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"wavenumber must be positive, got {self.k}")
        if not math.isfinite(self.a) or not math.isfinite(self.b):
            raise ValueError("a and b must be finite")
        if abs(self.a) > LARGE_AMPLITUDE:
            log.warning("amplitude a=%g is outside the small-amplitude regime", self.a)


@dataclass(frozen=True)
class StokesCoefficients:
    A0: float
    A2: float
    A3: float
    c2: float


@dataclass(frozen=True)
class StokesWave:
    symbol: str
    params: WaveParams
    c: float
    what: np.ndarray
    provenance: Provenance
    residual: float

    @property
    def harmonics(self) -> int:
        return len(self.what) - 1

    def exp_coefficient(self, j: int) -> float:
        """Coefficient of ``e^{ijz}``; zero beyond the stored harmonics."""
        j = abs(j)
        return float(self.what[j]) if j < len(self.what) else 0.0

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        n = np.arange(1, len(self.what))
        return self.what[0] + 2.0 * np.cos(np.multiply.outer(z, n)) @ self.what[1:]

    def to_record(self) -> dict:
        return {
            "symbol": self.symbol,
            "k": self.params.k,
            "a": self.params.a,
            "b": self.params.b,
            "c": self.c,
            "coefficients": [float(x) for x in self.what],
            "provenance": self.provenance.value,
            "residual": self.residual,
        }


def _checked(den: float, what: str) -> float:
    if abs(den) < DENOM_TOL:
        raise DegenerateSymbolError(f"{what} vanishes ({den:.3e}); symbol is degenerate here")
    return den


def stokes_coefficients(sym: MultiplierSymbol, k: float) -> StokesCoefficients:
    mk, m2k, m3k = (sym(k * j) for j in (1, 2, 3))
    A0 = 1.0 / (4.0 * _checked(1.0 - mk, "1 - m(k)"))
    A2 = 1.0 / (4.0 * _checked(m2k - mk, "m(2k) - m(k)"))
    A3 = A2 / (2.0 * _checked(m3k - mk, "m(3k) - m(k)"))
    return StokesCoefficients(A0, A2, A3, -A0 - A2 / 2.0)


def stokes_wave(sym: MultiplierSymbol, sigma: int | None, params: WaveParams,
                harmonics: int = 3) -> StokesWave:
    """Third-order Stokes expansion of the wave and its speed.

    ``sigma`` does not enter the one-dimensional profile; it is accepted so
    that call sites can pass a full model description.
    """
    k, a, b = params.k, params.a, params.b
    co = stokes_coefficients(sym, k)
    mk = sym(k)
    what = np.zeros(max(harmonics, 3) + 1)
    what[0] = (1.0 - mk) * b + a * a * co.A0
    what[1] = a / 2.0
    what[2] = a * a * co.A2 / 2.0
    what[3] = a ** 3 * co.A3 / 2.0
    c = mk - (1.0 - mk) * b + a * a * co.c2
    wave = StokesWave(sym.name, params, c, what, Provenance.EXPANSION, 0.0)
    res = wave_residual(sym, wave, profile_constant(sym, k, b))
    return StokesWave(sym.name, params, c, what, Provenance.EXPANSION, res)


def profile_constant(sym: MultiplierSymbol, k: float, b: float) -> float:
    """Constant of integration in the profile equation for expansion offset ``b``.

    The expansion puts the mean at ``(1 - m(k)) b``; the constant that the
    profile equation needs for that mean is ``(1 - m(k))**2 b`` to leading order.
    """
    one_m = 1.0 - sym(k)
    mean = one_m * b
    return one_m * mean + mean * mean / 2.0


def _full(what: np.ndarray) -> np.ndarray:
    return np.concatenate([what[:0:-1], what])


def square_coefficients(what: np.ndarray) -> np.ndarray:
    """Cosine coefficients 0..M of ``w**2`` by exact convolution (truncated at M)."""
    M = len(what) - 1
    sq = np.convolve(_full(what), _full(what))
    return sq[2 * M:3 * M + 1]


def _residual_vector(sym, k, what, c, b) -> np.ndarray:
    n = np.arange(len(what))
    F = (sym(k * n) - c) * what - square_coefficients(what) / 2.0
    F[0] -= b
    return F


def wave_residual(sym: MultiplierSymbol, wave: StokesWave, b: float) -> float:
    """Max-norm of the profile residual over the stored harmonics.

    ``b`` is the constant of the profile equation itself; see
    :func:`profile_constant` for converting the expansion offset.
    """
    if wave.harmonics < 3:
        raise ValueError("wave needs at least 3 harmonics")
    M = wave.harmonics
    # pad so products up to the stored truncation are not cut short
    what = np.concatenate([wave.what, np.zeros(M)])
    F = _residual_vector(sym, wave.params.k, what, wave.c, b)
    return float(np.max(np.abs(F)))


def _jacobian(sym, k, what, c) -> np.ndarray:
    """d F_n / d(what_0, what_2..what_M, c) with what_1 held fixed."""
    M = len(what) - 1
    W = _full(what)  # W[M + j] = coefficient of e^{ijz}
    n = np.arange(M + 1)
    idx = np.arange(M + 1)
    # d (w^2/2)_n / d what_j = W_{n-j} + W_{n+j} for j >= 1, W_n for j = 0
    minus = n[:, None] - idx[None, :]
    plus = n[:, None] + idx[None, :]

    def take(i):
        inside = np.abs(i) <= M
        return np.where(inside, W[np.clip(i, -M, M) + M], 0.0)

    dsq = take(minus) + take(plus)
    dsq[:, 0] = take(n)
    J = np.diag(sym(k * n) - c) - dsq
    J = np.delete(J, 1, axis=1)
    return np.column_stack([J, -what])


def newton_refine(sym: MultiplierSymbol, params: WaveParams, M: int = 32,
                  tol: float = 1e-12, max_iter: int = 50) -> StokesWave:
    """Solve the truncated profile equation by Newton's method.

    Unknowns are the cosine coefficients 0..M and the speed ``c``; the
    amplitude condition ``what[1] = a / 2`` closes the system.  The Stokes
    expansion is the initial guess.
    """
    if M < 16:
        raise ValueError("Newton truncation M must be >= 16")
    if tol < 1e-14:
        raise ValueError("tol must be >= 1e-14")
    k, a = params.k, params.a
    bprof = profile_constant(sym, k, params.b)
    guess = stokes_wave(sym, None, params)
    what = np.zeros(M + 1)
    what[:4] = guess.what[:4]
    c = guess.c

    if a == 0.0:
        # constant state; c is pinned to the bifurcation point of the branch
        one_m = 1.0 - sym(k)
        disc = one_m * one_m + 2.0 * bprof
        if disc < 0:
            raise ConvergenceError("no real constant state for this offset")
        root = math.sqrt(disc)
        mean = 2.0 * bprof / (one_m + math.copysign(root, one_m)) if bprof else 0.0
        what = np.zeros(M + 1)
        what[0] = mean
        c = sym(k) - mean
        wave = StokesWave(sym.name, params, c, what, Provenance.NEWTON_REFINED, 0.0)
        return StokesWave(sym.name, params, c, what, Provenance.NEWTON_REFINED,
                          wave_residual(sym, wave, bprof))

    res = math.inf
    for it in range(max_iter):
        F = _residual_vector(sym, k, what, c, bprof)
        res = float(np.max(np.abs(F)))
        log.debug("newton iteration %d residual %.3e", it, res)
        if res <= tol:
            break
        J = _jacobian(sym, k, what, c)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Newton Jacobian: {exc}") from None
        what[0] += step[0]
        what[2:] += step[1:M]
        c += step[M]
    else:
        raise ConvergenceError(f"Newton did not converge in {max_iter} iterations "
                               f"(residual {res:.3e})")
    wave = StokesWave(sym.name, params, c, what.copy(), Provenance.NEWTON_REFINED, res)
    return StokesWave(sym.name, params, c, wave.what, Provenance.NEWTON_REFINED,
                      wave_residual(sym, wave, bprof))
