"""Leading-order band predictions and the reduced 2x2 perturbation matrices.

Four collision scenarios are covered:

* ``DELTA3_PERIODIC``: xi = 0, modes {1, -2} / {2, -1}, regimes (1, down), (-1, up);
* ``LONGWAVE_PERIODIC``: xi = 0, the double eigenvalue at the origin, regimes
  (1, up), (-1, down);
* ``BLOCH01``: xi != 0, modes {0, -1}, regimes (1, up), (-1, down);
* ``BLOCH_DELTA2``: xi != 0, modes {n, n+2} with n in {-1, -2}, regimes
  (1, down), (-1, up).

All band widths are in ``ell**2`` and only the leading order in ``a`` is kept.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .collisions import ModeIndex, collision_locus_bloch, collision_locus_periodic, omega
from .symbols import MultiplierSymbol, check_sigma, signature_definite
from .waves import stokes_coefficients

__all__ = [
    "Context",
    "InapplicableRegime",
    "BandPrediction",
    "ReducedMatrix",
    "predict_delta3_periodic",
    "predict_longwave_periodic",
    "predict_bloch01",
    "predict_bloch_delta2",
    "predict",
    "delta2_center",
    "reduced_matrix",
    "longwave_basis",
]


class Context(enum.Enum):
    DELTA3_PERIODIC = "delta3"
    LONGWAVE_PERIODIC = "longwave"
    BLOCH01 = "bloch01"
    BLOCH_DELTA2 = "delta2"


class InapplicableRegime(ValueError):
    """The requested scenario does not apply to this (sigma, monotonicity) pair."""


@dataclass(frozen=True)
class BandPrediction:
    context: Context
    center_ell_sq: float
    half_width_ell_sq: float
    params: dict
    validity: str = "leading order in a"

    def __post_init__(self):
        if self.half_width_ell_sq < 0:
            raise ValueError("half width must be nonnegative")

    @property
    def lower(self) -> float:
        if self.context is Context.LONGWAVE_PERIODIC:
            return 0.0
        return self.center_ell_sq - self.half_width_ell_sq

    @property
    def upper(self) -> float:
        return self.center_ell_sq + self.half_width_ell_sq

    def to_record(self) -> dict:
        return {"context": self.context.value, "center_ell_sq": self.center_ell_sq,
                "half_width_ell_sq": self.half_width_ell_sq, "params": dict(self.params),
                "validity": self.validity}


@dataclass(frozen=True)
class ReducedMatrix:
    entries: np.ndarray
    context: Context
    center: tuple[float, float]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues by the quadratic formula."""
        B = self.entries
        half_tr = 0.5 * (B[0, 0] + B[1, 1])
        root = np.sqrt(complex(0.25 * (B[0, 0] - B[1, 1]) ** 2 + B[0, 1] * B[1, 0]))
        return np.array([half_tr + root, half_tr - root])

    def discriminant(self) -> float:
        """Discriminant of the characteristic quadratic in ``mu`` where ``lambda = i mu``.

        Negative exactly when the two eigenvalues leave the imaginary axis.
        """
        C = self.entries / 1j
        disc = (C[0, 0] - C[1, 1]) ** 2 + 4.0 * C[0, 1] * C[1, 0]
        return float(disc.real)


def _require(sigma, sym, definite: bool, what: str):
    if signature_definite(sigma, sym.monotonicity) != definite:
        raise InapplicableRegime(
            f"{what} needs (sigma, m) in {'{(1,up), (-1,down)}' if definite else '{(1,down), (-1,up)}'}; "
            f"got ({sigma}, {sym.monotonicity.arrow})")


def _check_xi(xi):
    if not 0 < xi <= 0.5:
        raise ValueError(f"xi must lie in (0, 1/2], got {xi}")


def predict_delta3_periodic(sym: MultiplierSymbol, sigma: int, k: float, a: float) -> BandPrediction:
    sigma = check_sigma(sigma)
    _require(sigma, sym, False, "the index-distance-3 periodic band")
    center = 4.0 * sigma / 3.0 * (sym(k) - sym(2 * k))
    if center <= 0:
        raise InapplicableRegime(f"collision at nonpositive ell^2 = {center:g}")
    co = stokes_coefficients(sym, k)
    hw = -sigma * a * a * co.A2 + 2.0 * math.sqrt(2.0) / 3.0 * abs(a) ** 3 * co.A3
    return BandPrediction(Context.DELTA3_PERIODIC, center, max(hw, 0.0),
                          {"symbol": sym.name, "sigma": sigma, "k": k, "a": a, "xi": 0.0})


def predict_longwave_periodic(sym: MultiplierSymbol, sigma: int, k: float, a: float) -> BandPrediction:
    """Band ``0 <= ell**2 < ell_a**2``; zero width in the regimes where it is absent."""
    sigma = check_sigma(sigma)
    params = {"symbol": sym.name, "sigma": sigma, "k": k, "a": a, "xi": 0.0}
    if not signature_definite(sigma, sym.monotonicity):
        return BandPrediction(Context.LONGWAVE_PERIODIC, 0.0, 0.0, params,
                              "no band: spectrum stays imaginary")
    co = stokes_coefficients(sym, k)
    ell_a_sq = sigma * (co.A2 - 2.0 * co.A0) * a * a
    return BandPrediction(Context.LONGWAVE_PERIODIC, 0.0, max(ell_a_sq, 0.0), params)


def predict_bloch01(sym: MultiplierSymbol, sigma: int, k: float, a: float, xi: float) -> BandPrediction:
    sigma = check_sigma(sigma)
    _require(sigma, sym, True, "the {0,-1} Bloch band")
    _check_xi(xi)
    center = collision_locus_bloch(sym, sigma, k, xi, 0, 1)
    if center is None:
        raise InapplicableRegime("modes 0 and -1 do not collide at positive ell^2")
    hw = (xi * (1.0 - xi)) ** 1.5 * abs(a)
    return BandPrediction(Context.BLOCH01, center, hw,
                          {"symbol": sym.name, "sigma": sigma, "k": k, "a": a, "xi": xi})


def delta2_center(sym: MultiplierSymbol, sigma: int, k: float, xi: float, n: int) -> float:
    """``ell**2`` where modes ``n`` and ``n + 2`` collide."""
    sigma = check_sigma(sigma)
    u, v = n + xi, n + 2 + xi
    mk = sym(k)
    return sigma * u * v / 2.0 * (u * (mk - sym(k * u)) - v * (mk - sym(k * v)))


def predict_bloch_delta2(sym: MultiplierSymbol, sigma: int, k: float, a: float, xi: float,
                         n: int) -> BandPrediction:
    sigma = check_sigma(sigma)
    _require(sigma, sym, False, "the index-distance-2 Bloch band")
    _check_xi(xi)
    if n not in (-1, -2):
        raise ValueError(f"n must be -1 or -2, got {n}")
    center = delta2_center(sym, sigma, k, xi, n)
    if center <= 0:
        raise InapplicableRegime(f"collision at nonpositive ell^2 = {center:g}")
    co = stokes_coefficients(sym, k)
    hw = sigma * a * a * co.A2 * (n + xi) * (n + 2 + xi)
    return BandPrediction(Context.BLOCH_DELTA2, center, max(hw, 0.0),
                          {"symbol": sym.name, "sigma": sigma, "k": k, "a": a, "xi": xi, "n": n})


def predict(context: Context, sym: MultiplierSymbol, sigma: int, k: float, a: float,
            xi: float = 0.0, n: int = -1) -> BandPrediction:
    if context is Context.DELTA3_PERIODIC:
        return predict_delta3_periodic(sym, sigma, k, a)
    if context is Context.LONGWAVE_PERIODIC:
        return predict_longwave_periodic(sym, sigma, k, a)
    if context is Context.BLOCH01:
        return predict_bloch01(sym, sigma, k, a, xi)
    return predict_bloch_delta2(sym, sigma, k, a, xi, n)


def reduced_matrix(context: Context, sym: MultiplierSymbol, sigma: int, k: float, a: float,
                   ell: float, xi: float = 0.0, n: int = -1) -> ReducedMatrix:
    """The 2x2 matrix of the perturbation argument for ``context``.

    ``eps = ell**2 - ell_c**2`` is measured from the scenario's collision.  For
    ``DELTA3_PERIODIC`` the pair is ``{n, n+3}`` and for ``BLOCH_DELTA2`` it is
    ``{n, n+2}``, with ``n`` in {-1, -2}; ``BLOCH01`` uses ``{-1, 0}``.
    """
    sigma = check_sigma(sigma)
    co = stokes_coefficients(sym, k)
    A0, A2, A3 = co.A0, co.A2, co.A3
    ell_sq = ell * ell

    if context is Context.LONGWAVE_PERIODIC:
        norm = 1.0 + 4.0 * a * a * A2 * A2
        B = np.array([[0.0, (sigma * ell_sq + (A0 - A2) * a * a) / norm],
                      [(-sigma * ell_sq - A0 * a * a) / norm, 0.0]], dtype=complex)
        return ReducedMatrix(B, context, (0.0, 0.0))

    if context is Context.DELTA3_PERIODIC:
        if n not in (-1, -2):
            raise ValueError("n must be -1 or -2")
        ell_c_sq = collision_locus_periodic(sym, sigma, k, -n, n + 3)
        if ell_c_sq is None:
            raise InapplicableRegime("no index-distance-3 collision at positive ell^2")
        eps = ell_sq - ell_c_sq
        w = omega(sym, sigma, k, math.sqrt(ell_c_sq), ModeIndex(n))
        p, q = n, n + 3
        B = 1j * np.array([
            [w - a * a * A2 / 2 * p - sigma * eps / p, a ** 3 * A3 / 2 * q],
            [a ** 3 * A3 / 2 * p, w - a * a * A2 / 2 * q - sigma * eps / q],
        ])
        return ReducedMatrix(B, context, (ell_c_sq, w))

    _check_xi(xi)
    if context is Context.BLOCH01:
        ell_c_sq = collision_locus_bloch(sym, sigma, k, xi, 0, 1)
        if ell_c_sq is None:
            raise InapplicableRegime("modes 0 and -1 do not collide at positive ell^2")
        eps = ell_sq - ell_c_sq
        w = omega(sym, sigma, k, math.sqrt(ell_c_sq), ModeIndex(0, xi))
        B = 1j * np.array([
            [w - sigma * eps / (xi - 1.0), 0.5 * a * xi],
            [0.5 * (xi - 1.0) * a, w - sigma * eps / xi],
        ])
        return ReducedMatrix(B, context, (ell_c_sq, w))

    if context is Context.BLOCH_DELTA2:
        if n not in (-1, -2):
            raise ValueError("n must be -1 or -2")
        ell_c_sq = delta2_center(sym, sigma, k, xi, n)
        if ell_c_sq <= 0:
            raise InapplicableRegime("no index-distance-2 collision at positive ell^2")
        eps = ell_sq - ell_c_sq
        w = omega(sym, sigma, k, math.sqrt(ell_c_sq), ModeIndex(n, xi))
        u, v = n + xi, n + 2 + xi
        B = 1j * np.array([
            [w - a * a * A2 / 2 * u - sigma * eps / u, a * a * A2 / 2 * v],
            [a * a * A2 / 2 * u, w - a * a * A2 / 2 * v - sigma * eps / v],
        ])
        return ReducedMatrix(B, context, (ell_c_sq, w))

    raise ValueError(f"unknown context {context!r}")


def longwave_basis(sym: MultiplierSymbol, k: float, a: float) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes of ``cos nz`` in phi_1 and ``sin nz`` in phi_2, n = 0..3.

    phi_2 is ``-(1/a) d_z w`` for the expansion wave at b = 0, so ``a`` must be
    nonzero.  Both reduce to ``cos z`` and ``sin z`` as ``a -> 0``.
    """
    if a == 0:
        raise ValueError("the translation mode -(1/a) w' needs a != 0")
    co = stokes_coefficients(sym, k)
    amp = np.array([0.0, 1.0, 2.0 * a * co.A2, 3.0 * a * a * co.A3])
    return amp.copy(), amp.copy()
