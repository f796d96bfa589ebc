"""Multiplier symbols m(k), hypothesis audits and the stability verdict table.

A symbol defines the dispersion operator M of the gKP equation on the Fourier
side, ``(M f)^(k) = m(k) f^(k)``.  Builtin models are fKdV, BO, ILW and
Whitham; arbitrary symbols can be written as small arithmetic expressions in
``k``.
"""

from __future__ import annotations

import ast
import enum
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Monotonicity",
    "XClass",
    "YClass",
    "Verdict",
    "MultiplierSymbol",
    "AuditReport",
    "VerdictQuery",
    "SymbolError",
    "builtin_symbol",
    "expression_symbol",
    "parse_symbol",
    "audit_hypotheses",
    "check_sigma",
    "phase_velocity",
    "signature_definite",
    "table1_verdict",
    "verdicts_for",
    "BUILTIN_NAMES",
]

BUILTIN_NAMES = ("fkdv", "bo", "ilw", "whitham")

# below this |k| the ilw/whitham closed forms lose digits to cancellation
SERIES_CUTOFF = 1e-4
H1_TOL = 1e-12


class SymbolError(ValueError):
    """Unknown symbol name, bad parameters or malformed expression."""


class Monotonicity(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"

    @property
    def arrow(self) -> str:
        return "up" if self is Monotonicity.INCREASING else "down"


class XClass(enum.Enum):
    PERIODIC = "periodic"
    NON_PERIODIC = "non-periodic"


class YClass(enum.Enum):
    FINITE_SHORT = "finite/short"
    LONG = "long"


class Verdict(enum.Enum):
    PREDICT_UNSTABLE = "predict-unstable"
    PREDICT_STABLE_CONDITIONAL = "predict-stable-conditional"
    NO_INSTABILITY_FOUND = "no-instability-found"


@dataclass(frozen=True)
class MultiplierSymbol:
    """An even real symbol ``m(k)`` normalised so that ``m(0) = 1``.

    ``func`` must accept numpy arrays.  ``alpha`` is the growth exponent with
    ``m(k) ~ k**alpha`` for large ``k``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    alpha: float
    monotonicity: Monotonicity
    selector: str = ""

    def __call__(self, k):
        arr = np.asarray(k, dtype=float)
        out = self.func(arr)
        if np.ndim(k) == 0:
            return float(out)
        return out

    def eval(self, k):
        return self(k)


def _fkdv(beta: float):
    def m(k):
        return 1.0 + np.abs(k) ** beta
    return m


def _bo(k):
    return 1.0 + np.abs(k)


def _ilw(k):
    k = np.asarray(k, dtype=float)
    small = np.abs(k) < SERIES_CUTOFF
    safe = np.where(small, 1.0, k)
    k2 = k * k
    return np.where(small, 1.0 + k2 / 3.0 - k2 * k2 / 45.0, safe / np.tanh(safe))


def _whitham(k):
    k = np.asarray(k, dtype=float)
    small = np.abs(k) < SERIES_CUTOFF
    safe = np.where(small, 1.0, k)
    k2 = k * k
    series = 1.0 - k2 / 6.0 + 19.0 * k2 * k2 / 360.0
    return np.where(small, series, np.sqrt(np.tanh(safe) / safe))


def builtin_symbol(name: str, beta: float | None = None) -> MultiplierSymbol:
    """Return one of the builtin model symbols.

    ``beta`` is required for (and only accepted by) ``fkdv``, where
    ``m(k) = 1 + |k|**beta`` with ``beta > 1/2``.
    """
    name = name.lower()
    if name not in BUILTIN_NAMES:
        raise SymbolError(f"unknown symbol {name!r}; expected one of {BUILTIN_NAMES}")
    if name == "fkdv":
        if beta is None:
            raise SymbolError("fkdv requires beta")
        beta = float(beta)
        if not beta > 0.5:
            raise SymbolError(f"fkdv requires beta > 1/2, got {beta}")
        return MultiplierSymbol(f"fkdv(beta={beta:g})", _fkdv(beta), beta,
                                Monotonicity.INCREASING, f"fkdv:beta={beta!r}")
    if beta is not None:
        raise SymbolError(f"beta is only meaningful for fkdv, not {name}")
    if name == "bo":
        return MultiplierSymbol("bo", _bo, 1.0, Monotonicity.INCREASING, "bo")
    if name == "ilw":
        # k coth k grows linearly, so the tail exponent is 1
        return MultiplierSymbol("ilw", _ilw, 1.0, Monotonicity.INCREASING, "ilw")
    return MultiplierSymbol("whitham", _whitham, -0.5, Monotonicity.DECREASING, "whitham")


# --------------------------------------------------------------------------
# expression symbols

_FUNCS = {
    "abs": np.abs,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
    "coth": lambda x: 1.0 / np.tanh(x),
    "exp": np.exp,
}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _compile(node):
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        value = float(node.value)
        return lambda k: np.full_like(k, value)
    if isinstance(node, ast.Name):
        if node.id == "k":
            return lambda k: k
        if node.id == "pi":
            return lambda k: np.full_like(k, math.pi)
        raise SymbolError(f"unknown name {node.id!r} in expression")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand)
        if isinstance(node.op, ast.USub):
            return lambda k: -inner(k)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left), _compile(node.right)
        return lambda k: op(left(k), right(k))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        fn = _FUNCS[node.func.id]
        arg = _compile(node.args[0])
        return lambda k: fn(arg(k))
    raise SymbolError(f"unsupported syntax in expression: {ast.dump(node)}")


def _tail_slope(func, lo=10.0, hi=1e3, num=64) -> float:
    ks = np.geomspace(lo, hi, num)
    vals = func(ks)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        return math.nan
    return float(np.polyfit(np.log(ks), np.log(vals), 1)[0])


def expression_symbol(text: str, name: str | None = None) -> MultiplierSymbol:
    """Build a symbol from an arithmetic expression in ``k``.

    Supported: numbers, ``k``, ``|...|``, ``+ - * / **`` (``^`` is accepted
    as a power), and ``abs sqrt tanh coth exp``.  Values at removable
    singularities (``k = 0`` in ``tanh(k)/k``) are taken as the limit from a
    tiny offset.  The monotonicity tag and growth exponent are inferred from a
    grid; use :func:`audit_hypotheses` to check them.
    """
    src = re.sub(r"\|([^|]+)\|", r"abs(\1)", text.strip()).replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise SymbolError(f"cannot parse expression {text!r}: {exc.msg}") from None
    raw = _compile(tree)

    def func(k):
        k = np.asarray(k, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(raw(k), dtype=float)
            bad = ~np.isfinite(out)
            if np.any(bad):
                nudge = np.where(k[bad] >= 0, 1e-8, -1e-8)
                out = out.copy()
                out[bad] = raw(k[bad] + nudge)
        return out

    grid = np.linspace(1e-3, 100.0, 2001)
    with np.errstate(all="ignore"):
        diffs = np.diff(func(grid))
    mono = Monotonicity.DECREASING if np.all(diffs < 0) else Monotonicity.INCREASING
    alpha = _tail_slope(func)
    return MultiplierSymbol(name or f"expr:{text}", func, alpha, mono, f"expr:{text}")


def parse_symbol(selector: str, beta: float | None = None) -> MultiplierSymbol:
    """Resolve a CLI/config selector.

    Accepted forms: ``fkdv:beta=2``, ``fkdv`` with ``beta`` given separately,
    ``bo``, ``ilw``, ``whitham`` and ``expr:<expression in k>``.
    """
    selector = selector.strip()
    if selector.startswith("expr:"):
        return expression_symbol(selector[len("expr:"):])
    name, _, opts = selector.partition(":")
    for item in filter(None, opts.split(",")):
        key, eq, value = item.partition("=")
        if key.strip() != "beta" or not eq:
            raise SymbolError(f"bad symbol option {item!r}")
        try:
            beta = float(value)
        except ValueError:
            raise SymbolError(f"bad beta value {value!r}") from None
    return builtin_symbol(name, beta)


# --------------------------------------------------------------------------
# hypothesis audit

@dataclass
class AuditReport:
    symbol: str
    h1: bool
    h2: bool
    h3: bool
    monotonicity: Monotonicity | None
    alpha_declared: float
    alpha_estimate: float
    c1: float
    c2: float
    tail_start: float
    failures: dict[str, list[float]]

    @property
    def passed(self) -> bool:
        return self.h1 and self.h2 and self.h3

    def lines(self) -> list[str]:
        ok = {True: "pass", False: "FAIL"}
        mono = self.monotonicity.value if self.monotonicity else "none"
        out = [
            f"symbol: {self.symbol}",
            f"H1 (real, even, m(0)=1): {ok[self.h1]}",
            f"H2 (C1 k^alpha <= m(k) <= C2 k^alpha, k >= {self.tail_start:g}): {ok[self.h2]}"
            f"  alpha_est={self.alpha_estimate:.6g} alpha_declared={self.alpha_declared:.6g}"
            f" C1={self.c1:.6g} C2={self.c2:.6g}",
            f"H3 (strictly monotonic, k>0): {ok[self.h3]}  monotonicity={mono}",
        ]
        for key, ks in self.failures.items():
            if ks:
                shown = ", ".join(f"{k:.6g}" for k in ks[:8])
                more = f" (+{len(ks) - 8} more)" if len(ks) > 8 else ""
                out.append(f"  {key} witnesses: {shown}{more}")
        return out


def audit_hypotheses(sym: MultiplierSymbol, grid, tail_start: float = 10.0,
                     slope_tol: float = 0.25) -> AuditReport:
    """Check the three standing hypotheses on a grid of positive wavenumbers.

    H2 is judged with the exponent estimated from a log-log fit over the
    tail ``k >= tail_start`` (the upper quarter of the grid if the grid does
    not reach that far).  The fit must have ``alpha >= -1`` and the ratio
    ``m(k) / k**alpha`` must stay positive and finite there.
    """
    ks = np.asarray(grid, dtype=float)
    if ks.ndim != 1 or ks.size == 0:
        raise ValueError("audit grid must be a nonempty 1-d sequence")
    if np.any(ks <= 0) or np.any(np.diff(ks) <= 0):
        raise ValueError("audit grid must be positive and strictly increasing")

    failures: dict[str, list[float]] = {"H1": [], "H2": [], "H3": []}
    with np.errstate(all="ignore"):
        pos, neg = sym(ks), sym(-ks)
        m0 = sym(np.zeros(1))[0]
    odd = ~(np.abs(pos - neg) <= H1_TOL * np.maximum(1.0, np.abs(pos)))
    failures["H1"].extend(ks[odd].tolist())
    if not abs(m0 - 1.0) <= H1_TOL:
        failures["H1"].append(0.0)
    h1 = not failures["H1"]

    tail = ks[ks >= tail_start]
    if tail.size < 2:
        tail = ks[int(0.75 * ks.size):]
    vals = sym(tail)
    if tail.size >= 2 and np.all(np.isfinite(vals)) and np.all(vals > 0):
        alpha_est = float(np.polyfit(np.log(tail), np.log(vals), 1)[0])
        ratio = vals / tail ** alpha_est
        c1, c2 = float(ratio.min()), float(ratio.max())
        # local slopes flag drift of m / k^alpha toward 0 or infinity
        local = np.diff(np.log(vals)) / np.diff(np.log(tail))
        drift = np.abs(local - alpha_est) > slope_tol
        failures["H2"].extend(tail[1:][drift].tolist())
        h2 = alpha_est >= -1.0 and c1 > 0 and not drift.any()
    else:
        alpha_est, c1, c2 = math.nan, math.nan, math.nan
        bad = ~(np.isfinite(vals) & (vals > 0))
        failures["H2"].extend(tail[bad].tolist() or tail.tolist())
        h2 = False

    steps = np.diff(pos)
    if np.all(steps > 0):
        mono = Monotonicity.INCREASING
    elif np.all(steps < 0):
        mono = Monotonicity.DECREASING
    else:
        mono = None
        sign = np.sign(steps[np.nonzero(steps)[0][0]]) if np.any(steps) else 1.0
        failures["H3"].extend(ks[1:][~(np.sign(steps) == sign)].tolist())
    h3 = mono is not None and mono is sym.monotonicity
    if mono is not None and not h3:
        failures["H3"].append(float(ks[0]))

    return AuditReport(sym.name, h1, h2, h3, mono, sym.alpha, alpha_est, c1, c2,
                       float(tail[0]) if tail.size else math.nan, failures)


# --------------------------------------------------------------------------
# dispersion relation and the verdict table

def check_sigma(sigma) -> int:
    if sigma not in (1, -1) or isinstance(sigma, bool):
        raise ValueError(f"sigma must be +1 or -1, got {sigma!r}")
    return int(sigma)


def phase_velocity(sym: MultiplierSymbol, sigma: int, k: float, ell: float) -> float:
    """Linear phase speed ``m(k) + sigma * ell**2 / k**2``."""
    sigma = check_sigma(sigma)
    if k == 0:
        raise ValueError("phase velocity undefined at k = 0")
    return sym(k) + sigma * ell * ell / (k * k)


def signature_definite(sigma: int, mono: Monotonicity) -> bool:
    """True for (1, up) and (-1, down).

    In these regimes every periodic mode except the pair at the origin has
    the same Krein signature, so only long transverse waves can destabilise.
    """
    sigma = check_sigma(sigma)
    return (sigma == 1) == (mono is Monotonicity.INCREASING)


@dataclass(frozen=True)
class VerdictQuery:
    sigma: int
    monotonicity: Monotonicity
    x_class: XClass
    y_class: YClass

    def __post_init__(self):
        check_sigma(self.sigma)


def table1_verdict(q: VerdictQuery) -> Verdict:
    if q.x_class is XClass.NON_PERIODIC:
        if q.y_class is YClass.FINITE_SHORT:
            return Verdict.PREDICT_UNSTABLE
        return Verdict.NO_INSTABILITY_FOUND
    definite = signature_definite(q.sigma, q.monotonicity)
    unstable = definite if q.y_class is YClass.LONG else not definite
    return Verdict.PREDICT_UNSTABLE if unstable else Verdict.PREDICT_STABLE_CONDITIONAL


def verdicts_for(sigma: int, mono: Monotonicity) -> dict[tuple[XClass, YClass], Verdict]:
    return {
        (x, y): table1_verdict(VerdictQuery(sigma, mono, x, y))
        for x in XClass for y in YClass
    }
