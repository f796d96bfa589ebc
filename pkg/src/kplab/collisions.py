"""Unperturbed Bloch eigenvalues, Krein signatures and collision loci.

At zero amplitude the Fourier mode ``e^{i(n+xi)z}`` is an eigenfunction with
eigenvalue ``i * omega(n)``, where

    omega(n) = (n+xi) (m(k) - m(k(n+xi))) - sigma ell^2 / (n+xi).

Since ``omega`` is affine in ``ell**2``, any two modes cross at a single value
of ``ell**2``; those crossings with opposite Krein signature are the seeds of
instability bands at small amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbols import MultiplierSymbol, check_sigma

__all__ = [
    "KREIN_TOL",
    "ModeIndex",
    "CollisionEvent",
    "omega",
    "krein",
    "crossing_ell_sq",
    "collision_locus_periodic",
    "collision_locus_bloch",
    "enumerate_collisions",
    "enumerate_dangerous",
]

KREIN_TOL = 1e-14


@dataclass(frozen=True, order=True)
class ModeIndex:
    n: int
    xi: float = 0.0

    def __post_init__(self):
        if not -0.5 < self.xi <= 0.5:
            raise ValueError(f"Floquet exponent must lie in (-1/2, 1/2], got {self.xi}")
        if self.n + self.xi == 0:
            raise ValueError("mode n + xi = 0 is excluded")

    @property
    def q(self) -> float:
        return self.n + self.xi


@dataclass(frozen=True)
class CollisionEvent:
    pair: tuple[ModeIndex, ModeIndex]
    ell_sq: float
    omega: float
    kappa_pair: tuple[int, int]
    dangerous: bool

    def row(self) -> dict:
        p, q = self.pair
        return {"p": p.n, "q": q.n, "xi": p.xi, "ell_sq": self.ell_sq,
                "omega": self.omega, "kappa_p": self.kappa_pair[0],
                "kappa_q": self.kappa_pair[1], "dangerous": self.dangerous}


def _detuning(sym, k, q):
    return sym(k) - sym(k * q)


def omega(sym: MultiplierSymbol, sigma: int, k: float, ell: float, idx: ModeIndex) -> float:
    sigma = check_sigma(sigma)
    q = idx.q
    return q * _detuning(sym, k, q) - sigma * ell * ell / q


def krein(sym: MultiplierSymbol, sigma: int, k: float, ell: float, idx: ModeIndex) -> int:
    """Sign of ``<L e_n, e_n>`` with ``L`` the self-adjoint factor; 0 if degenerate."""
    sigma = check_sigma(sigma)
    q = idx.q
    value = _detuning(sym, k, q) - sigma * ell * ell / (q * q)
    if abs(value) < KREIN_TOL:
        return 0
    return 1 if value > 0 else -1


def crossing_ell_sq(sym: MultiplierSymbol, sigma: int, k: float,
                    p: ModeIndex, q: ModeIndex) -> float:
    """The (possibly nonpositive) ``ell**2`` at which ``omega(p) == omega(q)``."""
    sigma = check_sigma(sigma)
    if p.xi != q.xi:
        raise ValueError("modes must share the Floquet exponent")
    if p.n == q.n:
        raise ValueError("a mode does not collide with itself")
    a, b = p.q, q.q
    num = a * _detuning(sym, k, a) - b * _detuning(sym, k, b)
    return num * a * b / (sigma * (b - a))


def collision_locus_periodic(sym: MultiplierSymbol, sigma: int, k: float,
                             p: int, q: int) -> float | None:
    """``ell**2`` where modes ``p`` and ``-q`` meet (``p, q >= 1``); None if not positive."""
    sigma = check_sigma(sigma)
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive integers")
    if (p, q) == (1, 1):
        raise ValueError("modes 1 and -1 only meet at the origin (ell = 0)")
    mk = sym(k)
    val = sigma * p * q / (p + q) * (p * (mk - sym(k * p)) + q * (mk - sym(k * q)))
    return val if val > 0 else None


def collision_locus_bloch(sym: MultiplierSymbol, sigma: int, k: float, xi: float,
                          p: int, q: int) -> float | None:
    """``ell**2`` where modes ``p`` and ``-q`` meet at Floquet exponent ``xi``.

    ``p >= 0``, ``q >= 1``.  The pair ``(0, 1)``, i.e. modes ``{0, -1}``, gives
    the lowest collision curve; the formula covers it without special casing.
    Returns None when the crossing is not at positive ``ell**2``.
    """
    sigma = check_sigma(sigma)
    if not 0 < xi <= 0.5:
        raise ValueError(f"xi must lie in (0, 1/2], got {xi}")
    if p < 0 or q < 1:
        raise ValueError(f"invalid pair p={p}, q={q}")
    mk = sym(k)
    u, v = p + xi, q - xi
    val = sigma * u * v / (p + q) * (u * (mk - sym(k * u)) + v * (mk - sym(k * v)))
    return val if val > 0 else None


def _modes(xi: float, max_index: int) -> list[ModeIndex]:
    return [ModeIndex(n, xi) for n in range(-max_index, max_index + 1) if n + xi != 0]


def enumerate_collisions(sym: MultiplierSymbol, sigma: int, k: float, xi: float,
                         max_index: int, ell_max: float) -> list[CollisionEvent]:
    """Every pairwise crossing with ``0 < ell**2 <= ell_max**2`` among modes ``|n| <= max_index``.

    Sorted by ``ell**2``, then by the mode indices.
    """
    sigma = check_sigma(sigma)
    if max_index < 3:
        raise ValueError("max_index must be >= 3")
    modes = _modes(xi, max_index)
    events = []
    for i, p in enumerate(modes):
        for q in modes[i + 1:]:
            ell_sq = crossing_ell_sq(sym, sigma, k, p, q)
            if not 0 < ell_sq <= ell_max * ell_max:
                continue
            ell = float(np.sqrt(ell_sq))
            kp, kq = krein(sym, sigma, k, ell, p), krein(sym, sigma, k, ell, q)
            w = 0.5 * (omega(sym, sigma, k, ell, p) + omega(sym, sigma, k, ell, q))
            events.append(CollisionEvent((p, q), ell_sq, w, (kp, kq), kp * kq < 0))
    events.sort(key=lambda e: (e.ell_sq, e.pair[0].n, e.pair[1].n))
    return events


def enumerate_dangerous(sym: MultiplierSymbol, sigma: int, k: float, xi: float,
                        max_index: int, ell_max: float) -> list[CollisionEvent]:
    """Crossings of opposite Krein signature; see :func:`enumerate_collisions`."""
    return [e for e in enumerate_collisions(sym, sigma, k, xi, max_index, ell_max)
            if e.dangerous]
