"""Numerical instability bands measured from Hill spectra."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import BandPrediction, Context
from .bloch import DEAD_BAND, BlochSpec, growth_scan, spectrum

__all__ = [
    "BandNotFound",
    "TrackingError",
    "BandReport",
    "StabilityReport",
    "measure_band",
    "eigenvalue_trace",
    "verify_stability_region",
    "growth_at",
]

log = logging.getLogger(__name__)

SCAN_POINTS = 33
WINDOW = 4.0


class BandNotFound(RuntimeError):
    """No unstable point anywhere in the scan window."""


class TrackingError(RuntimeError):
    pass


@dataclass
class BandReport:
    context: Context
    measured_center: float
    measured_edges: tuple[float, float]
    predicted: BandPrediction
    max_growth: float
    agreement_ratio: float
    params: dict
    scan: list[tuple[float, float]] = field(default_factory=list, repr=False)
    clipped: bool = False

    @property
    def half_width(self) -> float:
        lo, hi = self.measured_edges
        if self.context is Context.LONGWAVE_PERIODIC:
            return hi
        return 0.5 * (hi - lo)

    def to_record(self) -> dict:
        return {
            "context": self.context.value,
            "measured_center": self.measured_center,
            "measured_edges": list(self.measured_edges),
            "measured_half_width": self.half_width,
            "predicted": self.predicted.to_record(),
            "max_growth": self.max_growth,
            "agreement_ratio": self.agreement_ratio,
            "clipped": self.clipped,
            "params": dict(self.params),
        }


def growth_at(template: BlochSpec, ell_sq: float) -> float:
    return spectrum(template.with_ell_sq(ell_sq)).max_real


def _bisect_edge(template, stable, unstable, tol):
    """Shrink ``[stable, unstable]`` (in ell^2, either order) onto the threshold."""
    while abs(unstable - stable) > tol:
        mid = 0.5 * (stable + unstable)
        if growth_at(template, mid) > DEAD_BAND:
            unstable = mid
        else:
            stable = mid
    return 0.5 * (stable + unstable)


def measure_band(template: BlochSpec, prediction: BandPrediction, refine_tol: float = 1e-10,
                 points: int = SCAN_POINTS, refinements: int = 3) -> BandReport:
    """Locate the unstable ``ell**2`` interval near a predicted band.

    The window is ``center +- 4 * half_width`` (``[0, 4 * ell_a**2]`` for the
    long-wave band, whose lower edge is pinned at 0).  Of the unstable runs
    on the coarse grid, the one nearest the predicted center is refined by
    bisection on both sides.  If the coarse grid sees no growth at all, its
    spacing is halved up to ``refinements`` times before giving up.
    """
    hw = prediction.half_width_ell_sq
    if not hw > 0:
        raise ValueError("prediction has zero width; nothing to measure")
    longwave = prediction.context is Context.LONGWAVE_PERIODIC
    if longwave:
        lo, hi = 0.0, WINDOW * hw
        # ell = 0 itself carries a Jordan block at the origin; start just above it
        grid = np.linspace(lo, hi, points)[1:]
    else:
        lo = prediction.center_ell_sq - WINDOW * hw
        hi = prediction.center_ell_sq + WINDOW * hw
        grid = np.linspace(lo, hi, points)
        grid = grid[grid > 0]
    for attempt in range(refinements + 1):
        rows = growth_scan(template, np.sqrt(grid), [template.xi])
        growth = np.array([g for _, _, g in rows])
        unstable = growth > DEAD_BAND
        if unstable.any() or attempt == refinements:
            break
        # bands much narrower than predicted can fall between coarse grid points
        log.info("no unstable point on %d-point grid; halving the spacing", len(grid))
        mids = 0.5 * (grid[1:] + grid[:-1])
        grid = np.sort(np.concatenate([grid, mids]))
    scan = list(zip(grid.tolist(), growth.tolist()))
    if not unstable.any():
        raise BandNotFound(
            f"no growth above {DEAD_BAND:g} for ell^2 in [{grid[0]:.6g}, {grid[-1]:.6g}] "
            f"({prediction.context.value}, {template.describe()})")

    # contiguous unstable runs on the grid
    runs, start = [], None
    for i, flag in enumerate(unstable):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(grid) - 1))
    center = prediction.center_ell_sq

    def distance(run):
        a, b = grid[run[0]], grid[run[1]]
        return 0.0 if a <= center <= b else min(abs(a - center), abs(b - center))

    i0, i1 = min(runs, key=distance)
    clipped = False
    if longwave and i0 == 0:
        lower = 0.0
    elif i0 == 0:
        lower, clipped = float(grid[0]), True
    else:
        lower = _bisect_edge(template, grid[i0 - 1], grid[i0], refine_tol)
    if i1 == len(grid) - 1:
        upper, clipped = float(grid[-1]), True
    else:
        upper = _bisect_edge(template, grid[i1 + 1], grid[i1], refine_tol)
    if clipped:
        log.warning("measured band touches the scan window; edges are clipped")

    report = BandReport(
        context=prediction.context,
        measured_center=0.5 * (lower + upper),
        measured_edges=(lower, upper),
        predicted=prediction,
        max_growth=float(growth[i0:i1 + 1].max()),
        agreement_ratio=0.0,
        params=template.describe(),
        scan=scan,
        clipped=clipped,
    )
    report.agreement_ratio = report.half_width / hw
    return report


def _nearest_two(ev, target):
    order = np.argsort(np.abs(ev - target))
    return ev[order[:2]]


def eigenvalue_trace(template: BlochSpec, ell_grid, target: complex) -> list[tuple[float, complex, complex]]:
    """Follow the two eigenvalues that start nearest ``target`` across ``ell_grid``.

    Pairing between grid steps uses the linear extrapolation of each branch
    and nearest-neighbour matching, so transversal crossings keep their
    branch identity.  Returns ``(ell, lambda_1, lambda_2)`` rows.
    """
    ells = [float(x) for x in ell_grid]
    if not ells:
        raise ValueError("empty grid")
    rows = []
    history: list[np.ndarray] = []
    for ell in ells:
        ev = spectrum(template.with_ell(ell)).eigenvalues
        if not history:
            pair = _nearest_two(ev, target)
            pair = pair[np.lexsort((pair.real, pair.imag))]
        else:
            guess = history[-1] if len(history) < 2 else 2 * history[-1] - history[-2]
            cand = ev[np.argsort(np.abs(ev - guess.mean()))[:6]]
            dist = np.abs(cand[:, None] - guess[None, :])
            options = sorted((dist[i, 0] + dist[j, 1], i, j)
                             for i in range(len(cand)) for j in range(len(cand)) if i != j)
            cost, i, j = options[0]
            pair = np.array([cand[i], cand[j]])
            for other, i2, j2 in options[1:]:
                if other - cost >= 1e-12:
                    break
                if {i2, j2} == {i, j}:
                    # the guessed branches coincide (a collision point): labels are arbitrary
                    pair = pair[np.lexsort((pair.real, pair.imag))]
                    continue
                raise TrackingError(f"ambiguous eigenvalue pairing at ell={ell:.6g}; "
                                    "refine the grid locally")
        history.append(pair)
        rows.append((ell, complex(pair[0]), complex(pair[1])))
    return rows


@dataclass
class StabilityReport:
    points: int
    violations: list[tuple[float, float, float]]

    @property
    def stable(self) -> bool:
        return not self.violations

    @property
    def worst(self) -> float:
        return max((g for _, _, g in self.violations), default=0.0)


def verify_stability_region(template: BlochSpec, ell_grid, xi_grid) -> StabilityReport:
    """Check ``max Re(lambda) <= 1e-9`` on every grid point; violations are returned, not raised."""
    xis = [float(x) for x in xi_grid]
    for xi in xis:
        if xi != 0 and abs(xi) < 0.01:
            raise ValueError(f"xi={xi} is inside the excluded band 0 < |xi| < 0.01")
    rows = growth_scan(template, ell_grid, xis)
    bad = [(ell, xi, g) for ell, xi, g in rows if g > DEAD_BAND]
    return StabilityReport(len(rows), bad)
