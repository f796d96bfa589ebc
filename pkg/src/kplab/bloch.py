"""Hill's method for the Bloch operators

    A(ell, xi) = (d_z + i xi)(c - M_k + w) + sigma ell**2 (d_z + i xi)**-1

in the Fourier basis ``e^{i(n + xi) z}``, ``n = -N..N`` (``n = 0`` dropped when
``xi = 0``, where the operator acts on mean-zero functions).
"""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .symbols import MultiplierSymbol, check_sigma
from .waves import StokesWave

__all__ = [
    "DEAD_BAND",
    "BlochSpec",
    "SpectrumResult",
    "EigensolverError",
    "mode_indices",
    "factorize",
    "assemble",
    "spectrum",
    "max_real",
    "growth_scan",
    "thread_count",
]

log = logging.getLogger(__name__)

DEAD_BAND = 1e-9
SMALL_XI = 1e-3


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class BlochSpec:
    sym: MultiplierSymbol
    sigma: int
    wave: StokesWave
    ell: float
    xi: float = 0.0
    N: int = 32

    def __post_init__(self):
        check_sigma(self.sigma)
        if self.N < 8:
            raise ValueError(f"truncation N must be >= 8, got {self.N}")
        if not -0.5 < self.xi <= 0.5:
            raise ValueError(f"Floquet exponent must lie in (-1/2, 1/2], got {self.xi}")
        if self.wave.harmonics < 3:
            raise ValueError("wave needs at least 3 harmonics")

    @property
    def k(self) -> float:
        return self.wave.params.k

    def with_ell(self, ell: float) -> "BlochSpec":
        return replace(self, ell=ell)

    def with_ell_sq(self, ell_sq: float) -> "BlochSpec":
        return replace(self, ell=float(np.sqrt(max(ell_sq, 0.0))))

    def describe(self) -> dict:
        p = self.wave.params
        return {"symbol": self.sym.name, "sigma": self.sigma, "k": p.k, "a": p.a,
                "b": p.b, "ell": self.ell, "xi": self.xi, "N": self.N}


@dataclass(frozen=True)
class SpectrumResult:
    spec: BlochSpec
    eigenvalues: np.ndarray
    max_real: float
    solver_tol: float = DEAD_BAND

    def sorted_eigenvalues(self) -> np.ndarray:
        ev = self.eigenvalues
        return ev[np.lexsort((ev.real, ev.imag))]

    def to_record(self) -> dict:
        ev = self.sorted_eigenvalues()
        return {
            "params": self.spec.describe(),
            "max_real": self.max_real,
            "solver_tol": self.solver_tol,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
        }


def mode_indices(N: int, xi: float) -> np.ndarray:
    n = np.arange(-N, N + 1)
    return n[n != 0] if xi == 0 else n


def factorize(spec: BlochSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(d, H)`` with ``assemble(spec) == diag(d) @ H``.

    ``d = i(n + xi)`` is the skew-adjoint part and ``H`` (Hermitian, here real
    symmetric) is the self-adjoint part ``c - M_k + w + sigma ell^2 (d_z+i xi)^-2``.
    """
    xi = spec.xi
    if 0 < abs(xi) < SMALL_XI:
        warnings.warn(f"|xi| = {abs(xi):g} is tiny; the inverse derivative is ill-conditioned",
                      RuntimeWarning, stacklevel=3)
    n = mode_indices(spec.N, xi)
    q = n + xi
    wave = spec.wave
    # Toeplitz part: entry (m, n) is the e^{i(m-n)z} coefficient of w
    coeff = np.zeros(2 * spec.N + 1)
    top = min(wave.harmonics, 2 * spec.N)
    coeff[:top + 1] = wave.what[:top + 1]
    H = coeff[np.abs(n[:, None] - n[None, :])]
    diag = wave.c - spec.sym(spec.k * q) - spec.sigma * spec.ell ** 2 / q ** 2
    H[np.diag_indices_from(H)] += diag
    return 1j * q, H


def assemble(spec: BlochSpec) -> np.ndarray:
    d, H = factorize(spec)
    return d[:, None] * H


def spectrum(spec: BlochSpec) -> SpectrumResult:
    """All eigenvalues of the truncated operator (LAPACK Hessenberg-QR)."""
    A = assemble(spec)
    if not np.all(np.isfinite(A)):
        raise EigensolverError("non-finite entries in Hill matrix")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from None
    return SpectrumResult(spec, ev, max_real(ev))


def max_real(eigenvalues) -> float:
    top = float(np.max(np.real(eigenvalues)))
    return top if top > DEAD_BAND else 0.0


def thread_count() -> int:
    """Worker cap from ``KPLAB_THREADS`` (0 or unset means automatic)."""
    raw = os.environ.get("KPLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer KPLAB_THREADS=%r", raw)
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n


def growth_scan(template: BlochSpec, ell_grid, xi_grid) -> list[tuple[float, float, float]]:
    """``(ell, xi, max_real)`` rows, xi outer and ell inner.

    Grid points are evaluated concurrently; rows come back in grid order.
    """
    ells = [float(x) for x in ell_grid]
    xis = [float(x) for x in xi_grid]
    if not ells or not xis:
        raise ValueError("scan grids must be nonempty")
    points = [(ell, xi) for xi in xis for ell in ells]

    def run(point):
        ell, xi = point
        return spectrum(replace(template, ell=ell, xi=xi)).max_real

    workers = thread_count()
    if workers == 1 or len(points) == 1:
        growth = [run(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            growth = list(pool.map(run, points))
    return [(ell, xi, g) for (ell, xi), g in zip(points, growth)]
