"""Command-line front end.

Usage::

    copula-forge <sample|madogram|montecarlo|validate> --config run.json
                 [--seed N] [--output path] [--plot]

Exit codes: 0 success, 1 failed validation suite, 2 invalid configuration
or parameters, 3 sampler failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import api
from .checks import run_checks
from .core import (
    CopulaError,
    DomainError,
    RngStream,
    SamplerFailure,
    ValidationError,
    apply_margins,
    quantile,
    validate_params,
)
from .madogram import (
    MonteCarloConfig,
    estimate_madogram,
    gen_missing_mask,
    monte_carlo_run,
    normality_diagnostics,
    pickands_from_madogram,
    true_madogram,
)

COMMANDS = ("sample", "madogram", "montecarlo", "validate")
EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_SAMPLER = 0, 1, 2, 3


class ConfigError(ValidationError):
    """A configuration field is missing or malformed."""

    def __init__(self, field, message):
        super().__init__(f"config field {field!r}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("--config", "top level must be a JSON object")
    return cfg


def _int(cfg, key, default=None, minimum=None):
    value = cfg.get(key, default)
    if value is None:
        raise ConfigError(key, "is required")
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(key, f"must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return value


def _float(cfg, key, default=None):
    value = cfg.get(key, default)
    if value is None:
        raise ConfigError(key, "is required")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    return value


def spec_from(cfg, prefix=""):
    """Build a validated spec from ``family``, ``params`` and ``d``."""
    family = cfg.get("family")
    if not isinstance(family, str):
        raise ConfigError(prefix + "family", "is required and must be a string")
    d = _int(cfg, "d", 2, minimum=1)
    return validate_params(family, cfg.get("params"), d)


def margins_from(cfg, d):
    margins = cfg.get("margins", "uniform")
    if isinstance(margins, str):
        margins = [margins] * d
    if not isinstance(margins, list) or len(margins) != d:
        raise ConfigError("margins", f"must be a name or a list of {d} names")
    for m in margins:
        if not isinstance(m, str):
            raise ConfigError("margins", f"unknown margin {m!r}")
        quantile(m)
    return margins


def miss_from(cfg):
    miss = cfg.get("miss")
    if miss is None:
        return None
    if not isinstance(miss, dict):
        raise ConfigError("miss", "must be an object with family and params")
    spec = spec_from(dict(miss, d=2), prefix="miss.")
    return spec


def _probabilities(cfg):
    p0, p1 = _float(cfg, "p0", 1.0), _float(cfg, "p1", 1.0)
    for key, v in (("p0", p0), ("p1", p1)):
        if not 0.0 < v <= 1.0:
            raise ConfigError(key, f"must lie in (0, 1], got {v}")
    return p0, p1


def _lambdas(cfg):
    lam = cfg.get("lambda", 0.5)
    values = lam if isinstance(lam, list) else [lam]
    out = []
    for v in values:
        v = _float({"lambda": v}, "lambda")
        if not 0.0 < v < 1.0:
            raise ConfigError("lambda", f"must lie in (0, 1), got {v}")
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def format_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def read_csv(path):
    """Header and float matrix of a CSV written by this tool."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [[float(x) for x in line.rstrip("\n").split(",")] for line in fh if line.strip()]
    return header, np.array(rows, dtype=float).reshape(-1, len(header))


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sibling(path, suffix):
    return str(Path(path).with_suffix(suffix))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_W, _H, _PAD = 480, 480, 48


def _scale(values, lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return a + (np.asarray(values, dtype=float) - lo) / span * (b - a)


def _frame(xlab, ylab, xlo, xhi, ylo, yhi):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{_W / 2}" y="{_H - 12}" text-anchor="middle" font-size="13">{xlab}</text>',
        f'<text x="14" y="{_H / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {_H / 2})">{ylab}</text>',
        f'<text x="{_PAD}" y="{_H - _PAD + 16}" font-size="10">{xlo:.3g}</text>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 16}" text-anchor="end" font-size="10">{xhi:.3g}</text>',
        f'<text x="{_PAD - 4}" y="{_H - _PAD}" text-anchor="end" font-size="10">{ylo:.3g}</text>',
        f'<text x="{_PAD - 4}" y="{_PAD + 8}" text-anchor="end" font-size="10">{yhi:.3g}</text>',
    ]
    return parts


def svg_scatter(x, y, xlab="x0", ylab="x1") -> str:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    xlo, xhi = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    ylo, yhi = (float(y.min()), float(y.max())) if y.size else (0.0, 1.0)
    parts = _frame(xlab, ylab, xlo, xhi, ylo, yhi)
    px = _scale(x, xlo, xhi, _PAD, _W - _PAD)
    py = _scale(y, ylo, yhi, _H - _PAD, _PAD)
    parts.append('<g fill="seagreen" fill-opacity="0.5">')
    parts.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1.2"/>' for a, b in zip(px, py))
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


def svg_histogram(edges, counts, sigma=None, xlab="scaled") -> str:
    """Density histogram, optionally with a centered normal density overlay."""
    edges = np.asarray(edges, dtype=float)
    counts = np.asarray(counts, dtype=float)
    widths = np.diff(edges)
    dens = counts / (counts.sum() * widths)
    grid = np.linspace(edges[0], edges[-1], 200)
    curve = None
    if sigma and sigma > 0:
        curve = np.exp(-0.5 * (grid / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    ymax = float(max(dens.max(), curve.max() if curve is not None else 0.0))
    parts = _frame(xlab, "density", edges[0], edges[-1], 0.0, ymax)
    x0 = _scale(edges[:-1], edges[0], edges[-1], _PAD, _W - _PAD)
    x1 = _scale(edges[1:], edges[0], edges[-1], _PAD, _W - _PAD)
    top = _scale(dens, 0.0, ymax, _H - _PAD, _PAD)
    parts.append('<g fill="seagreen" fill-opacity="0.5" stroke="seagreen">')
    parts.extend(f'<rect x="{a:.2f}" y="{t:.2f}" width="{b - a:.2f}" height="{_H - _PAD - t:.2f}"/>'
                 for a, b, t in zip(x0, x1, top))
    parts.append("</g>")
    if curve is not None:
        gx = _scale(grid, edges[0], edges[-1], _PAD, _W - _PAD)
        gy = _scale(curve, 0.0, ymax, _H - _PAD, _PAD)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(gx, gy))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="darkblue" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_sample(cfg, out):
    spec = spec_from(cfg)
    n = _int(cfg, "n", 1024, minimum=0)
    margins = margins_from(cfg, spec.d)
    U = api.sample(spec, n, RngStream(cfg["seed"]), cfg.get("method"))
    X = apply_margins(U, margins) if any(m != "uniform" for m in margins) else U
    files = {cfg["output"]: format_csv([f"x{j}" for j in range(spec.d)], X.data)}
    if cfg.get("plot"):
        files[_sibling(cfg["output"], ".svg")] = svg_scatter(X.data[:, 0], X.data[:, 1])
    for path, text in files.items():
        write_atomic(path, text)
    out.write(f"wrote {n} x {spec.d} sample of {spec.family} to {cfg['output']}\n")
    return EXIT_OK


def cmd_madogram(cfg, out):
    spec = spec_from(cfg)
    if spec.d != 2:
        raise ConfigError("d", "the madogram is bivariate")
    n = _int(cfg, "n", 1024, minimum=2)
    lams = _lambdas(cfg)
    miss = miss_from(cfg)
    p0, p1 = _probabilities(cfg)
    if miss is None and (p0 < 1.0 or p1 < 1.0):
        raise ConfigError("miss", "is required when p0 or p1 < 1")
    corrected = bool(cfg.get("corrected", False))
    margins = margins_from(cfg, 2)
    rng = RngStream(cfg["seed"])
    X = apply_margins(api.sample(spec, n, rng, cfg.get("method")), margins)
    mask = gen_missing_mask(rng, miss, p0, p1, n) if miss is not None else None
    rows = []
    has_truth = spec.model.kind == "extreme" and spec.model.has_A(spec.params, 2)
    for lam in lams:
        est = estimate_madogram(X, mask, lam, corrected)
        row = [lam, est, pickands_from_madogram(est, lam)]
        if has_truth:
            nu = true_madogram(spec, lam)
            row += [nu, pickands_from_madogram(nu, lam)]
        rows.append(row)
    header = ["lambda", "estimate", "A_hat"] + (["nu_true", "A_true"] if has_truth else [])
    write_atomic(cfg["output"], format_csv(header, rows))
    for row in rows:
        out.write(" ".join(f"{h}={_fmt(v)}" for h, v in zip(header, row)) + "\n")
    return EXIT_OK


def cmd_montecarlo(cfg, out):
    spec = spec_from(cfg)
    miss = miss_from(cfg)
    p0, p1 = _probabilities(cfg)
    lams = _lambdas(cfg)
    if len(lams) != 1:
        raise ConfigError("lambda", "montecarlo takes a single lambda")
    try:
        mc = MonteCarloConfig(
            target=spec, miss=miss, p0=p0, p1=p1, w=lams[0],
            n_sample=_int(cfg, "n", 1024, minimum=2),
            n_iter=_int(cfg, "n_iter", 1024, minimum=1),
            corrected=bool(cfg.get("corrected", True)),
            seed=cfg["seed"],
            margins=margins_from(cfg, 2),
        )
    except DomainError as exc:
        raise ConfigError("montecarlo", str(exc)) from None
    workers = cfg.get("workers")
    result = monte_carlo_run(mc, workers=_int(cfg, "workers") if workers is not None else None)
    scaled = result.scaled
    summary = {
        "family": spec.family,
        "n": mc.n_sample,
        "n_iter": mc.n_iter,
        "lambda": mc.w,
        "p0": p0,
        "p1": p1,
        "p": result.p,
        "nu_true": result.nu_true,
        "corrected": mc.corrected,
        "mean_scaled": float(np.mean(scaled)),
        "variance_scaled": float(np.var(scaled, ddof=1)) if scaled.size > 1 else 0.0,
    }
    if scaled.size >= 100:
        summary["diagnostics"] = normality_diagnostics(scaled)
    files = {
        cfg["output"]: result.to_csv(),
        cfg.get("diagnostics") or _sibling(cfg["output"], ".json"):
            json.dumps(summary, indent=2, sort_keys=True) + "\n",
    }
    if cfg.get("plot") and "diagnostics" in summary:
        h = summary["diagnostics"]["histogram"]
        files[_sibling(cfg["output"], ".svg")] = svg_histogram(
            h["edges"], h["counts"], math.sqrt(summary["variance_scaled"]))
    for path, text in files.items():
        write_atomic(path, text)
    out.write(f"nu_true={_fmt(result.nu_true)} p={_fmt(result.p)}\n")
    out.write(f"mean(scaled)={_fmt(summary['mean_scaled'])} var(scaled)={_fmt(summary['variance_scaled'])}\n")
    return EXIT_OK


def cmd_validate(cfg, out):
    spec = spec_from(cfg)
    results = run_checks(spec)
    out.write(f"{spec!r}\n")
    for r in results:
        out.write(r.line() + "\n")
    failed = [r.name for r in results if not r.passed]
    if failed:
        out.write("FAILED: " + ", ".join(failed) + "\n")
        return EXIT_CHECK_FAILED
    out.write(f"all {len(results)} properties passed\n")
    return EXIT_OK


HANDLERS = {
    "sample": cmd_sample,
    "madogram": cmd_madogram,
    "montecarlo": cmd_montecarlo,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="copula-forge", description="Copula sampling and madogram experiments.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--output", default=None, help="overrides the config output path")
    p.add_argument("--plot", action="store_true", help="also write an SVG figure")
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        cfg["seed"] = _int(cfg, "seed", 0, minimum=0)
        if args.output is not None:
            cfg["output"] = args.output
        cfg.setdefault("output", f"{args.command}.csv")
        if not isinstance(cfg["output"], str):
            raise ConfigError("output", "must be a path string")
        if args.plot:
            cfg["plot"] = True
        return HANDLERS[args.command](cfg, out)
    except (ValidationError, DomainError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except SamplerFailure as exc:
        err.write(f"sampler failure: {exc}\n")
        return EXIT_SAMPLER
    except CopulaError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SAMPLER


if __name__ == "__main__":
    sys.exit(main())
