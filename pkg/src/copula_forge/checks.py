"""Analytic invariant suites for cataloged families.

Each check returns a :class:`CheckResult` holding the worst deviation
observed on a fixed grid and the tolerance it is held to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import archimedean, elliptical, extreme
from .core import CopulaSpec, RngStream, as_simplex

FD_STEP = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst) and self.worst <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} worst={self.worst:.3e}  tol={self.tol:.1e}"


def _worst(x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return 0.0
    if np.any(np.isnan(x)):
        return float("inf")
    return float(np.max(x))


# ---------------------------------------------------------------------------
# Archimedean generators
# ---------------------------------------------------------------------------


def generator_checks(spec: CopulaSpec) -> list[CheckResult]:
    fam, theta = spec.model, spec.params["theta"]
    t = np.linspace(0.01, 0.99, 99)
    with np.errstate(all="ignore"):
        phi = fam.phi(t, theta)
        phi1 = fam.phi(np.array([1.0]), theta)
        back = fam.phi_inv(phi, theta)
        dphi = fam.phi_prime(t, theta)
        fd = (fam.phi(t + FD_STEP, theta) - fam.phi(t - FD_STEP, theta)) / (2 * FD_STEP)
        h = 1e-3
        second = fam.phi(t + h, theta) - 2 * phi + fam.phi(t - h, theta)
    scale = np.maximum(1.0, np.abs(phi))
    out = [
        CheckResult("generator phi(1) = 0", _worst(np.abs(phi1)), 1e-12),
        CheckResult("generator monotonicity", _worst(np.diff(phi) / scale[1:]), 0.0),
        CheckResult("generator convexity", _worst(-second / scale), 1e-9),
        CheckResult("generator round trip", _worst(np.abs(back - t)), 1e-10),
        CheckResult("generator derivative", _worst(np.abs(dphi - fd) / np.maximum(np.abs(fd), 1e-8)), 1e-6),
    ]
    if spec.d == 2:
        out.extend(_copula_bound_checks(lambda u: archimedean.arch_cdf(spec, u), 2))
    return out


def _copula_bound_checks(cdf, d) -> list[CheckResult]:
    g = np.linspace(0.05, 0.95, 19)
    U0, U1 = np.meshgrid(g, g)
    pts = np.column_stack([U0.ravel(), U1.ravel()])
    if d > 2:
        pts = np.column_stack([pts, np.ones((pts.shape[0], d - 2))])
    C = cdf(pts)
    lower = np.maximum(pts[:, 0] + pts[:, 1] - 1.0, 0.0)
    upper = np.minimum(pts[:, 0], pts[:, 1])
    edge = np.ones((g.size, d))
    edge[:, 1] = g
    return [
        CheckResult("Frechet bounds", _worst(np.maximum(lower - C, C - upper)), 1e-10),
        CheckResult("uniform margins C(1, u) = u", _worst(np.abs(cdf(edge) - g)), 1e-10),
    ]


# ---------------------------------------------------------------------------
# Pickands functions
# ---------------------------------------------------------------------------


def _simplex_grid(d, m=10):
    if d == 2:
        t = np.linspace(0.0, 1.0, 101)
        return np.column_stack([1.0 - t, t])
    pts = [p for p in np.ndindex(*(m + 1,) * (d - 1)) if sum(p) <= m]
    grid = np.array([list(p) + [m - sum(p)] for p in pts], dtype=float) / m
    return grid


def pickands_checks(spec: CopulaSpec, A=None, A_prime=None) -> list[CheckResult]:
    """Vertex values, bounds, convexity and (bivariate) derivative of A.

    ``A`` and ``A_prime`` default to the family's own functions and may be
    overridden to audit a candidate implementation.
    """
    d = spec.d
    fam = spec.model
    if A is None:
        def A(w):
            return fam.A(as_simplex(w, d), spec.params)
    if A_prime is None and d == 2:
        def A_prime(t):
            return fam.A_prime(t, spec.params)
    out = []
    vert = np.eye(d)
    out.append(CheckResult("Pickands vertices A(e_j) = 1", _worst(np.abs(A(vert) - 1.0)), 1e-12))
    W = _simplex_grid(d)
    a = A(W)
    out.append(CheckResult("Pickands lower bound max(w)", _worst(W.max(axis=1) - a), 1e-12))
    out.append(CheckResult("Pickands upper bound 1", _worst(a - 1.0), 1e-12))
    if d == 2:
        out.append(CheckResult("Pickands convexity", _worst(-np.diff(a, 2)), 1e-9))
        t = np.linspace(0.05, 0.95, 91)
        da = A_prime(t) if A_prime is not None else None
        if da is not None:
            da = np.asarray(da, dtype=float)
            fd = (A(t + FD_STEP) - A(t - FD_STEP)) / (2 * FD_STEP)
            rel = np.abs(da - fd) / np.maximum(np.abs(fd), 1e-3)
            out.append(CheckResult("Pickands derivative", _worst(rel), 1e-6))
    else:
        # convexity along random chords of the simplex
        rng = RngStream(2024)
        P = rng.gen.dirichlet(np.ones(d), 200)
        Q = rng.gen.dirichlet(np.ones(d), 200)
        s = np.linspace(0.0, 1.0, 21)[:, None, None]
        vals = A((1 - s) * P + s * Q)
        out.append(CheckResult("Pickands convexity", _worst(-np.diff(vals, 2, axis=0)), 1e-9))
    return out


def extreme_checks(spec: CopulaSpec) -> list[CheckResult]:
    fam = spec.model
    d = spec.d
    if not fam.has_A(spec.params, d):
        return extremal_function_checks(spec)
    out = pickands_checks(spec)
    rng = RngStream(7)
    u = rng.uniform((100, d))
    c = extreme.ev_cdf(spec, u)
    worst = 0.0
    for m in (2, 5, 10):
        worst = max(worst, _worst(np.abs(extreme.ev_cdf(spec, u ** (1.0 / m)) ** m - c)))
    out.append(CheckResult("max-stability", worst, 1e-10))
    x = rng.exponential((100, d))
    l1 = extreme.stdf(spec, x)
    worst = max(_worst(np.abs(extreme.stdf(spec, k * x) - k * l1) / np.maximum(k * l1, 1.0))
                for k in (0.5, 2.0, 10.0))
    out.append(CheckResult("stdf homogeneity", worst, 1e-12))
    if d == 2:
        out.extend(_copula_bound_checks(lambda v: extreme.ev_cdf(spec, v), 2))
        if fam.A_prime(0.5, spec.params) is not None:
            g = np.linspace(0.1, 0.9, 9)
            U0, U1 = np.meshgrid(g, g)
            u0, u1 = U0.ravel(), U1.ravel()
            h = 1e-6
            fd = (extreme.ev_cdf(spec, np.column_stack([u0 + h, u1]))
                  - extreme.ev_cdf(spec, np.column_stack([u0 - h, u1]))) / (2 * h)
            cc = extreme.ev_cond_cdf(spec, u0, u1)
            out.append(CheckResult("conditional CDF vs dC/du0", _worst(np.abs(cc - fd)), 1e-5))
    return out


def extremal_function_checks(spec: CopulaSpec) -> list[CheckResult]:
    """For families without a Pickands formula: extremal-function draws are
    positive and normalized at the anchor."""
    rng = RngStream(11)
    pos, anchor = [], []
    for j in range(spec.d):
        Y = extreme.rext_func(spec, j, rng, 2000)
        pos.append(-np.min(Y))
        anchor.append(np.max(np.abs(Y[:, j] - 1.0)))
    return [
        CheckResult("extremal function positivity", _worst(pos), 0.0),
        CheckResult("extremal function anchor", _worst(anchor), 1e-12),
    ]


# ---------------------------------------------------------------------------
# Elliptical
# ---------------------------------------------------------------------------


def elliptical_checks(spec: CopulaSpec) -> list[CheckResult]:
    d = spec.d
    # bivariate CDFs are exact to ~1e-12, higher dimensions use numerical integration
    tol = 1e-9 if d == 2 else 1e-5
    m = 20 if d == 2 else 5
    rng = RngStream(5)
    u = rng.uniform((m, d))
    S = spec.params["sigma"]
    perm = np.arange(d)[::-1]
    pspec = CopulaSpec(spec.family, dict(spec.params, sigma=S[np.ix_(perm, perm)]), d)
    c = elliptical.elliptical_cdf(spec, u)
    cp = elliptical.elliptical_cdf(pspec, u[:, perm])
    out = [CheckResult("elliptical permutation symmetry", _worst(np.abs(c - cp)), tol)]
    if d == 2:
        # radial symmetry: C(u, v) = u + v - 1 + C(1 - u, 1 - v)
        rad = u[:, 0] + u[:, 1] - 1.0 + elliptical.elliptical_cdf(spec, 1.0 - u)
        out.append(CheckResult("elliptical radial symmetry", _worst(np.abs(c - rad)), tol))
    g = np.linspace(0.05, 0.95, 19 if d == 2 else 5)
    edge = np.ones((g.size, d))
    edge[:, 0] = g
    out.append(CheckResult("uniform margins C(u, 1) = u",
                           _worst(np.abs(elliptical.elliptical_cdf(spec, edge) - g)), tol))
    x = np.linspace(-8, 8, 161)
    out.append(CheckResult("normal CDF symmetry",
                           _worst(np.abs(elliptical.norm_cdf(x) + elliptical.norm_cdf(-x) - 1.0)), 1e-12))
    if spec.family == "student":
        out.append(CheckResult("Student CDF -> normal CDF",
                               _worst(np.abs(elliptical.t_cdf(x, 1e6) - elliptical.norm_cdf(x))), 1e-4))
    return out


def run_checks(spec: CopulaSpec) -> list[CheckResult]:
    """The invariant suite matching the family's kind."""
    kind = spec.model.kind
    if kind == "archimedean":
        return generator_checks(spec)
    if kind == "extreme":
        return extreme_checks(spec)
    return elliptical_checks(spec)
