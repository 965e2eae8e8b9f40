"""Family-independent entry points: build a spec, sample it, evaluate its CDF."""

from __future__ import annotations

import numpy as np

from . import archimedean, elliptical, extreme
from .core import CopulaSpec, SampleMatrix, validate_params


def make_spec(family: str, params=None, d: int = 2) -> CopulaSpec:
    """Alias of :func:`~copula_forge.core.validate_params`."""
    return validate_params(family, params, d)


def sample(spec: CopulaSpec, n: int, rng=None, method: str | None = None) -> SampleMatrix:
    """Draw ``n`` rows from ``spec`` with the family's default algorithm.

    ``method`` selects an alternative where one exists: ``"frailty"`` or
    ``"conditional"`` for Archimedean families, ``"conditional"``,
    ``"stephenson"`` or ``"extremal"`` for extreme-value families.
    """
    kind = spec.model.kind
    if kind == "archimedean":
        return archimedean.sample(spec, n, rng, method)
    if kind == "extreme":
        if method == "frailty":
            return archimedean.sample(spec, n, rng, method)
        return extreme.sample(spec, n, rng, method)
    return elliptical.sample(spec, n, rng, method)


def cdf(spec: CopulaSpec, u):
    """Copula distribution function at ``u`` (one point or rows of points)."""
    kind = spec.model.kind
    u = np.asarray(u, dtype=float)
    if kind == "archimedean":
        return archimedean.arch_cdf(spec, u)
    if kind == "extreme":
        return extreme.ev_cdf(spec, u)
    return elliptical.elliptical_cdf(spec, u)


def cond_cdf(spec: CopulaSpec, u0, u1):
    """``P(U1 <= u1 | U0 = u0)`` for bivariate Archimedean and extreme families."""
    kind = spec.model.kind
    if kind == "archimedean":
        return archimedean.arch_cond_cdf(spec, u0, u1)
    if kind == "extreme":
        return extreme.ev_cond_cdf(spec, u0, u1)
    raise NotImplementedError(f"no conditional CDF for {spec.family}")
