"""Serialisation: CSV with a config header, JSON records and static SVG plots."""

from __future__ import annotations

import enum
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

__all__ = ["fmt", "to_jsonable", "dump_json", "dump_csv", "read_header_config",
           "svg_panels"]

CONFIG_PREFIX = "# config: "


def fmt(x) -> str:
    """17 significant digits for floats (exact round trip); plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x) + 0.0:.17g}"
    return str(x)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dump_json(record: dict, config: dict | None = None) -> str:
    body = {"config": to_jsonable(config)} if config is not None else {}
    body.update(to_jsonable(record))
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def dump_csv(header: Sequence[str], rows: Iterable[Sequence], config: dict | None = None,
             notes: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    if config is not None:
        buf.write(CONFIG_PREFIX + json.dumps(to_jsonable(config), sort_keys=True) + "\n")
    for note in notes:
        buf.write(f"# {note}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_header_config(text: str) -> dict | None:
    """Recover the embedded run config from a CSV/SVG/JSON output, if any."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        return data.get("config", data)
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("<!--") and CONFIG_PREFIX.strip("# ") in line:
            inner = line[4:-3].strip()
            return json.loads(inner.split(":", 1)[1])
        if line.startswith(CONFIG_PREFIX):
            return json.loads(line[len(CONFIG_PREFIX):])
    return None


# --------------------------------------------------------------------------
# SVG

WIDTH, HEIGHT = 800, 600
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _range(values):
    vals = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-300:
        pad = max(abs(lo), 1.0) * 1e-3
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def svg_panels(x, panels: Sequence[tuple[str, Sequence[Sequence[float]]]], xlabel: str,
               title: str = "", config: dict | None = None) -> str:
    """Stacked line-plot panels sharing one x axis, as a standalone 800x600 SVG.

    ``panels`` is a list of ``(ylabel, [series, ...])``.
    """
    x = np.asarray(x, dtype=float)
    left, right, top, bottom = 90, 30, 40, 60
    gap = 50
    n = len(panels)
    ph = (HEIGHT - top - bottom - gap * (n - 1)) / n
    pw = WIDTH - left - right
    xlo, xhi = _range(x)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">']
    if config is not None:
        out.append("<!-- config: " + json.dumps(to_jsonable(config), sort_keys=True) + " -->")
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="16" '
                   f'font-family="sans-serif">{_esc(title)}</text>')
    for p, (ylabel, series) in enumerate(panels):
        y0 = top + p * (ph + gap)
        ylo, yhi = _range(np.concatenate([np.asarray(s, float) for s in series]))

        def px(v):
            return left + (v - xlo) / (xhi - xlo) * pw

        def py(v):
            return y0 + ph - (v - ylo) / (yhi - ylo) * ph

        out.append(f'<rect x="{left}" y="{y0:.2f}" width="{pw}" height="{ph:.2f}" '
                   'fill="none" stroke="black"/>')
        for t in _ticks(ylo, yhi):
            out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="11" '
                       f'font-family="sans-serif">{t:.4g}</text>')
        out.append(f'<text x="20" y="{y0 + ph / 2:.2f}" font-size="14" font-family="sans-serif" '
                   f'transform="rotate(-90 20 {y0 + ph / 2:.2f})" text-anchor="middle">{_esc(ylabel)}</text>')
        for i, s in enumerate(series):
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, s) if math.isfinite(b))
            out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" '
                       f'stroke-width="1.5" points="{pts}"/>')
    yb = HEIGHT - bottom
    for t in _ticks(xlo, xhi):
        out.append(f'<line x1="{left + (t - xlo) / (xhi - xlo) * pw:.2f}" y1="{yb}" '
                   f'x2="{left + (t - xlo) / (xhi - xlo) * pw:.2f}" y2="{yb + 5}" stroke="black"/>')
        out.append(f'<text x="{left + (t - xlo) / (xhi - xlo) * pw:.2f}" y="{yb + 18}" '
                   f'text-anchor="middle" font-size="11" font-family="sans-serif">{t:.4g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="14" '
               f'font-family="sans-serif">{_esc(xlabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
