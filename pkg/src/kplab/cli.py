"""Command-line front end.

Exit codes: 0 success, 1 audit failure, 2 bad configuration, 3 inapplicable
regime, 4 verification failure (no band found), 5 eigensolver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from .bands import BandNotFound, TrackingError, eigenvalue_trace, measure_band
from .bloch import BlochSpec, EigensolverError, growth_scan, spectrum
from .collisions import enumerate_dangerous
from .output import dump_csv, dump_json, read_header_config, svg_panels
from .symbols import (
    SymbolError, XClass, YClass, audit_hypotheses, check_sigma, parse_symbol, verdicts_for,
)
from .waves import ConvergenceError, DegenerateSymbolError, WaveParams, newton_refine, stokes_wave

log = logging.getLogger("kplab")

EXIT_OK, EXIT_AUDIT, EXIT_CONFIG, EXIT_REGIME, EXIT_VERIFY, EXIT_SOLVER = range(6)

DEFAULTS = {
    "audit": {"model": None, "beta": None, "grid_min": 1e-3, "grid_max": 1e3,
              "grid_points": 241, "tail_start": 10.0},
    "wave": {"model": None, "beta": None, "k": 1.0, "a": 0.05, "b": 0.0, "newton": False,
             "M": 32, "format": "json"},
    "collide": {"model": None, "beta": None, "sigma": None, "k": 1.0, "xi": 0.0,
                "max_index": 3, "ell_max": 3.0, "format": "csv"},
    "band": {"model": None, "beta": None, "sigma": None, "k": 1.0, "a": 0.05, "xi": 0.0,
             "context": None, "n": -1, "N": 32, "refine_tol": 1e-10, "plot": None,
             "trace_points": 201, "format": "json"},
    "spectrum": {"model": None, "beta": None, "sigma": None, "k": 1.0, "a": 0.05, "b": 0.0,
                 "ell": 0.0, "xi": 0.0, "N": 32, "newton": True, "format": "json"},
    "scan": {"model": None, "beta": None, "sigma": None, "k": 1.0, "a": 0.05, "b": 0.0,
             "ell_grid": "0:3:31", "xi_grid": "0", "N": 32, "newton": True, "format": "csv"},
}


class ConfigError(ValueError):
    pass


def _grid(spec) -> list[float]:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    text = str(spec).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:num")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 1:
            raise ConfigError("grid needs at least one point")
        return np.linspace(start, stop, num).tolist()
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=S, help="JSON config, or a previous output file")
    common.add_argument("-o", "--output", default=S, help="output path (default stdout)")
    common.add_argument("--model", default=S, help="fkdv, bo, ilw, whitham, fkdv:beta=2 or expr:<m(k)>")
    common.add_argument("--beta", type=float, default=S)
    common.add_argument("-v", "--verbose", action="count", default=0)

    def physics(p, *, amplitude=True, floquet=True, sigma=True):
        if sigma:
            p.add_argument("--sigma", type=int, default=S, choices=(1, -1))
        p.add_argument("-k", type=float, default=S, dest="k")
        if amplitude:
            p.add_argument("-a", type=float, default=S, dest="a")
        if floquet:
            p.add_argument("--xi", type=float, default=S)

    parser = argparse.ArgumentParser(prog="kplab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", parents=[common], help="check hypotheses H1-H3 for a symbol")
    p.add_argument("--grid-min", type=float, default=S)
    p.add_argument("--grid-max", type=float, default=S)
    p.add_argument("--grid-points", type=int, default=S)
    p.add_argument("--tail-start", type=float, default=S)

    p = sub.add_parser("wave", parents=[common], help="Stokes or Newton-refined wave")
    physics(p, floquet=False, sigma=False)
    p.add_argument("-b", type=float, default=S, dest="b")
    p.add_argument("--newton", action="store_true", default=S)
    p.add_argument("-M", type=int, default=S, dest="M")
    p.add_argument("--format", choices=("json", "csv"), default=S)

    p = sub.add_parser("collide", parents=[common], help="dangerous eigenvalue collisions")
    physics(p, amplitude=False)
    p.add_argument("--max-index", type=int, default=S)
    p.add_argument("--ell-max", type=float, default=S)
    p.add_argument("--format", choices=("csv", "json"), default=S)

    p = sub.add_parser("band", parents=[common], help="measure an instability band")
    physics(p)
    p.add_argument("--context", choices=[c.value for c in asy.Context], default=S)
    p.add_argument("-n", type=int, default=S, dest="n", help="mode index for delta2 (-1 or -2)")
    p.add_argument("-N", type=int, default=S, dest="N")
    p.add_argument("--refine-tol", type=float, default=S)
    p.add_argument("--plot", nargs="?", const="band.svg", default=S,
                   help="also write an SVG eigenvalue trace (default band.svg)")
    p.add_argument("--trace-points", type=int, default=S)
    p.add_argument("--format", choices=("json", "csv", "svg"), default=S)

    p = sub.add_parser("spectrum", parents=[common], help="dump a Hill spectrum")
    physics(p)
    p.add_argument("-b", type=float, default=S, dest="b")
    p.add_argument("--ell", type=float, default=S)
    p.add_argument("-N", type=int, default=S, dest="N")
    p.add_argument("--no-newton", action="store_false", dest="newton", default=S)
    p.add_argument("--format", choices=("json", "csv"), default=S)

    p = sub.add_parser("scan", parents=[common], help="max growth rate over (ell, xi) grids")
    physics(p, floquet=False)
    p.add_argument("-b", type=float, default=S, dest="b")
    p.add_argument("--ell-grid", default=S, help="start:stop:num or comma list")
    p.add_argument("--xi-grid", default=S, help="start:stop:num or comma list")
    p.add_argument("-N", type=int, default=S, dest="N")
    p.add_argument("--no-newton", action="store_false", dest="newton", default=S)
    p.add_argument("--format", choices=("csv", "json"), default=S)
    return parser


def _effective(command: str, flags: dict) -> dict:
    cfg = dict(DEFAULTS[command])
    path = flags.pop("config", None)
    if path is not None:
        try:
            loaded = read_header_config(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"no config found in {path}")
        loaded.pop("command", None)
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(loaded)
    cfg.update(flags)
    return cfg


def _symbol(cfg, audit=True):
    if not cfg.get("model"):
        raise ConfigError("--model is required")
    try:
        sym = parse_symbol(cfg["model"], cfg.get("beta"))
    except SymbolError as exc:
        raise ConfigError(str(exc)) from None
    if audit:
        report = audit_hypotheses(sym, np.geomspace(1e-3, 1e3, 241))
        if not report.passed:
            raise ConfigError("symbol fails the hypothesis audit:\n  " + "\n  ".join(report.lines()))
    return sym


def _sigma(cfg):
    if cfg.get("sigma") is None:
        raise ConfigError("--sigma is required")
    try:
        return check_sigma(int(cfg["sigma"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _wave(sym, cfg):
    params = WaveParams(float(cfg["k"]), float(cfg["a"]), float(cfg.get("b", 0.0)))
    if cfg.get("newton"):
        return newton_refine(sym, params, M=int(cfg.get("M", 32)))
    return stokes_wave(sym, None, params)


def _template(sym, sigma, cfg, ell=0.0):
    wave = _wave(sym, cfg)
    xi = float(cfg.get("xi", 0.0))
    return BlochSpec(sym, sigma, wave, ell, xi, int(cfg.get("N", 32)))


# --------------------------------------------------------------------------
# commands; each returns (exit code, text, suffix-independent payload)

def cmd_audit(cfg):
    sym = _symbol(cfg, audit=False)
    grid = np.geomspace(float(cfg["grid_min"]), float(cfg["grid_max"]), int(cfg["grid_points"]))
    report = audit_hypotheses(sym, grid, tail_start=float(cfg["tail_start"]))
    text = "\n".join(report.lines() + [f"overall: {'pass' if report.passed else 'FAIL'}"]) + "\n"
    return (EXIT_OK if report.passed else EXIT_AUDIT), text


def cmd_wave(cfg):
    sym = _symbol(cfg)
    wave = _wave(sym, {**cfg, "newton": cfg.get("newton"), "M": cfg.get("M")})
    record = wave.to_record()
    if cfg["format"] == "csv":
        rows = [(n, x) for n, x in enumerate(wave.what)]
        notes = [f"c: {wave.c:.17g}", f"provenance: {wave.provenance.value}",
                 f"residual: {wave.residual:.17g}"]
        return EXIT_OK, dump_csv(["n", "what"], rows, _embed("wave", cfg), notes)
    return EXIT_OK, dump_json(record, _embed("wave", cfg))


def cmd_collide(cfg):
    sym = _symbol(cfg)
    sigma = _sigma(cfg)
    xi = float(cfg["xi"])
    events = enumerate_dangerous(sym, sigma, float(cfg["k"]), xi, int(cfg["max_index"]),
                                 float(cfg["ell_max"]))
    verdicts = verdicts_for(sigma, sym.monotonicity)
    notes = [f"regime: sigma={sigma}, m {sym.monotonicity.value}",
             f"enumeration cap: |n| <= {int(cfg['max_index'])}, ell <= {float(cfg['ell_max']):g}"]
    for (x, y), v in verdicts.items():
        notes.append(f"verdict {x.value} x, {y.value} y: {v.value}")
    header = ["p", "q", "xi", "ell_sq", "omega", "kappa_p", "kappa_q", "dangerous"]
    if cfg["format"] == "json":
        record = {"events": [e.row() for e in events],
                  "verdicts": {f"{x.value} x / {y.value} y": v.value for (x, y), v in verdicts.items()},
                  "max_index": int(cfg["max_index"])}
        return EXIT_OK, dump_json(record, _embed("collide", cfg))
    rows = [[e.row()[h] for h in header] for e in events]
    return EXIT_OK, dump_csv(header, rows, _embed("collide", cfg), notes)


def _trace_svg(template, prediction, reduced_center, points, cfg):
    hw = prediction.half_width_ell_sq
    lo = max(prediction.lower - 3 * hw, 0.0)
    hi = prediction.upper + 3 * hw
    ell_sq = np.linspace(lo, hi, points)
    if prediction.context is asy.Context.LONGWAVE_PERIODIC:
        ell_sq = ell_sq[1:]
    ells = np.sqrt(ell_sq)
    # start at the collision, where the two nearest eigenvalues are the colliding pair
    mid = int(np.argmin(np.abs(ell_sq - prediction.center_ell_sq)))
    up = eigenvalue_trace(template, ells[mid:], 1j * reduced_center)
    down = eigenvalue_trace(template, ells[mid::-1], 1j * reduced_center)
    rows = down[::-1] + up[1:]
    re1 = [r[1].real for r in rows]
    re2 = [r[2].real for r in rows]
    im1 = [r[1].imag for r in rows]
    im2 = [r[2].imag for r in rows]
    title = (f"{template.sym.name}, sigma={template.sigma}, k={template.k:g}, "
             f"a={template.wave.params.a:g}, xi={template.xi:g}")
    svg = svg_panels(ells, [("Re lambda", [re1, re2]), ("Im lambda", [im1, im2])], "ell", title,
                     _embed("band", cfg))
    csv = dump_csv(["ell", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"],
                   [(r[0], r[1].real, r[1].imag, r[2].real, r[2].imag) for r in rows],
                   _embed("band", cfg))
    return svg, csv


def cmd_band(cfg):
    sym = _symbol(cfg)
    sigma = _sigma(cfg)
    if not cfg.get("context"):
        raise ConfigError("--context is required")
    try:
        context = asy.Context(cfg["context"])
    except ValueError:
        raise ConfigError(f"unknown context {cfg['context']!r}") from None
    k, a, xi, n = float(cfg["k"]), float(cfg["a"]), float(cfg["xi"]), int(cfg["n"])
    if context in (asy.Context.BLOCH01, asy.Context.BLOCH_DELTA2) and not 0 < xi <= 0.5:
        raise ConfigError(f"context {context.value} needs 0 < xi <= 1/2")
    if context in (asy.Context.DELTA3_PERIODIC, asy.Context.LONGWAVE_PERIODIC) and xi != 0:
        raise ConfigError(f"context {context.value} is periodic; use --xi 0")
    try:
        prediction = asy.predict(context, sym, sigma, k, a, xi, n)
    except asy.InapplicableRegime as exc:
        return EXIT_REGIME, f"inapplicable: {exc}\n"
    if prediction.half_width_ell_sq <= 0:
        return EXIT_REGIME, (f"inapplicable: {prediction.validity} for sigma={sigma}, "
                             f"m {sym.monotonicity.value} ({context.value})\n")
    template = _template(sym, sigma, {**cfg, "newton": True, "b": 0.0})
    try:
        report = measure_band(template, prediction, float(cfg["refine_tol"]))
    except BandNotFound as exc:
        return EXIT_VERIFY, f"verification failed: {exc}\n"

    if context is asy.Context.LONGWAVE_PERIODIC:
        target = 0.0
    else:
        ell_c = math.sqrt(prediction.center_ell_sq)
        target = asy.reduced_matrix(context, sym, sigma, k, a, ell_c, xi, n).center[1]
    svg = csv_trace = None
    if cfg.get("plot") or cfg["format"] == "svg":
        try:
            svg, csv_trace = _trace_svg(template, prediction, target, int(cfg["trace_points"]), cfg)
        except TrackingError as exc:
            log.warning("eigenvalue trace failed: %s", exc)
    if cfg.get("plot") and svg is not None:
        Path(cfg["plot"]).write_text(svg)
        Path(cfg["plot"]).with_suffix(".csv").write_text(csv_trace)
    if cfg["format"] == "svg":
        if svg is None:
            return EXIT_VERIFY, "verification failed: could not trace eigenvalues\n"
        return EXIT_OK, svg
    if cfg["format"] == "csv":
        return EXIT_OK, dump_csv(["ell_sq", "max_real_part"], report.scan, _embed("band", cfg),
                                 [f"measured_edges: {report.measured_edges[0]:.17g} "
                                  f"{report.measured_edges[1]:.17g}",
                                  f"agreement_ratio: {report.agreement_ratio:.17g}"])
    return EXIT_OK, dump_json(report.to_record(), _embed("band", cfg))


def cmd_spectrum(cfg):
    sym = _symbol(cfg)
    sigma = _sigma(cfg)
    template = _template(sym, sigma, cfg, float(cfg["ell"]))
    result = spectrum(template)
    record = result.to_record()
    record["wave"] = template.wave.to_record()
    if cfg["format"] == "csv":
        ev = result.sorted_eigenvalues()
        notes = [f"max_real: {result.max_real:.17g}", f"dimension: {len(ev)}"]
        return EXIT_OK, dump_csv(["re_lambda", "im_lambda"], [(z.real, z.imag) for z in ev],
                                 _embed("spectrum", cfg), notes)
    return EXIT_OK, dump_json(record, _embed("spectrum", cfg))


def cmd_scan(cfg):
    sym = _symbol(cfg)
    sigma = _sigma(cfg)
    ells, xis = _grid(cfg["ell_grid"]), _grid(cfg["xi_grid"])
    for xi in xis:
        if not -0.5 < xi <= 0.5:
            raise ConfigError(f"xi={xi} outside (-1/2, 1/2]")
    template = _template(sym, sigma, {**cfg, "xi": 0.0})
    rows = growth_scan(template, ells, xis)
    if cfg["format"] == "json":
        return EXIT_OK, dump_json({"rows": [list(r) for r in rows]}, _embed("scan", cfg))
    return EXIT_OK, dump_csv(["ell", "xi", "max_real_part"], rows, _embed("scan", cfg))


COMMANDS = {"audit": cmd_audit, "wave": cmd_wave, "collide": cmd_collide, "band": cmd_band,
            "spectrum": cmd_spectrum, "scan": cmd_scan}


def _embed(command, cfg):
    out = {"command": command}
    out.update({k: v for k, v in cfg.items() if k not in ("output", "config", "verbose")})
    return out


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    flags = vars(args)
    command = flags.pop("command")
    verbose = flags.pop("verbose", 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    output = flags.pop("output", None)
    try:
        cfg = _effective(command, flags)
        code, text = COMMANDS[command](cfg)
    except (ConfigError, SymbolError, DegenerateSymbolError) as exc:
        print(f"kplab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"kplab: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigensolverError, ConvergenceError) as exc:
        print(f"kplab: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if code in (EXIT_REGIME, EXIT_VERIFY):
        sys.stderr.write(text)
        return code
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
