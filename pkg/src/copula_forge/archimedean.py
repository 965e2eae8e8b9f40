"""Archimedean copulae: generators, CDF, conditional sampling and frailty
sampling.

Every family is defined by its generator ``phi``, the inverse ``phi_inv``
and the derivative ``phi_prime``.  The bivariate CDF is
``phi_inv(phi(u0) + phi(u1))`` and its first partial derivative is
``phi'(u0) / phi'(C(u0, u1))``.  Families whose generator is the inverse
Laplace-Stieltjes transform of a known positive law also carry a frailty
sampler.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dists
from .core import (
    ArityMismatch,
    CopulaSpec,
    DomainError,
    Family,
    FrailtyUnavailable,
    MarginTag,
    RngStream,
    SampleMatrix,
    ValidationError,
    as_stream,
    conditional_inverse,
    real,
    register,
)


class GeneratorModel:
    """Generator triple of an Archimedean family.

    ``phi`` maps (0, 1] to [0, inf], ``phi_inv`` is its generalized inverse
    and ``phi_prime`` its derivative.  All three are vectorized.
    """

    def phi(self, t, theta):
        raise NotImplementedError

    def phi_inv(self, s, theta):
        raise NotImplementedError

    def phi_prime(self, t, theta):
        raise NotImplementedError

    def has_frailty(self, theta, d) -> bool:
        return False

    def frailty(self, rng: RngStream, theta, size):
        raise FrailtyUnavailable(f"{self.name} has no frailty sampler")


class Archimedean(GeneratorModel, Family):
    kind = "archimedean"
    param_names = ("theta",)

    def check(self, raw, d):
        theta = real(self, raw, "theta")
        self.check_theta(theta, d)
        return {"theta": theta}

    def check_theta(self, theta, d):
        raise NotImplementedError


@register
class Independence(Archimedean):
    name = "independence"
    param_names = ()
    bivariate_only = False

    def check(self, raw, d):
        return {"theta": 1.0}

    def phi(self, t, theta):
        return -np.log(t)

    def phi_inv(self, s, theta):
        return np.exp(-s)

    def phi_prime(self, t, theta):
        return -1.0 / t

    def has_frailty(self, theta, d):
        return True

    def frailty(self, rng, theta, size):
        return np.ones(size)


@register
class Clayton(Archimedean):
    name = "clayton"
    bivariate_only = False

    def check_theta(self, theta, d):
        if d == 2:
            self.require(theta >= -1.0 and theta != 0.0, "theta in [-1, inf) \\ {0}", f"theta = {theta}")
        else:
            self.require(theta > 0.0, "theta in (0, inf) for d >= 3", f"theta = {theta}, d = {d}")

    def phi(self, t, theta):
        return np.expm1(-theta * np.log(t)) / theta

    def phi_inv(self, s, theta):
        base = np.maximum(1.0 + theta * s, 0.0)
        return base ** (-1.0 / theta)

    def phi_prime(self, t, theta):
        return -(t ** (-theta - 1.0))

    def has_frailty(self, theta, d):
        return theta > 0

    def frailty(self, rng, theta, size):
        # phi_inv(s) = (1 + theta s)^(-1/theta) is the transform of Gamma(1/theta, scale theta)
        return theta * dists.sample_gamma(rng, 1.0 / theta, size)


@register
class AMH(Archimedean):
    name = "amh"
    aliases = ("ali_mikhail_haq",)
    bivariate_only = False

    def check_theta(self, theta, d):
        if d == 2:
            self.require(-1.0 <= theta < 1.0, "theta in [-1, 1)", f"theta = {theta}")
        else:
            self.require(0.0 <= theta < 1.0, "theta in [0, 1) for d >= 3", f"theta = {theta}, d = {d}")

    def phi(self, t, theta):
        return np.log1p(-theta * (1.0 - t)) - np.log(t)

    def phi_inv(self, s, theta):
        with np.errstate(over="ignore"):
            return (1.0 - theta) / (np.exp(s) - theta)

    def phi_prime(self, t, theta):
        return theta / (1.0 - theta * (1.0 - t)) - 1.0 / t

    def has_frailty(self, theta, d):
        return 0.0 <= theta < 1.0

    def frailty(self, rng, theta, size):
        return dists.sample_geometric(rng, 1.0 - theta, size).astype(float)


@register
class Frank(Archimedean):
    name = "frank"
    bivariate_only = False

    def check_theta(self, theta, d):
        if d == 2:
            self.require(theta != 0.0, "theta in R \\ {0}", f"theta = {theta}")
        else:
            self.require(theta > 0.0, "theta in (0, inf) for d >= 3", f"theta = {theta}, d = {d}")

    def phi(self, t, theta):
        return -np.log(np.expm1(-theta * t) / np.expm1(-theta))

    def phi_inv(self, s, theta):
        return -np.log1p(np.expm1(-theta) * np.exp(-s)) / theta

    def phi_prime(self, t, theta):
        with np.errstate(over="ignore"):
            return -theta / np.expm1(theta * t)

    def has_frailty(self, theta, d):
        return theta > 0

    def frailty(self, rng, theta, size):
        # logarithmic series with p = 1 - exp(-theta)
        return dists.sample_logseries(rng, size=size, log1mp=-theta)


@register
class Joe(Archimedean):
    name = "joe"
    bivariate_only = False

    def check_theta(self, theta, d):
        self.require(theta >= 1.0, "theta in [1, inf)", f"theta = {theta}")

    def phi(self, t, theta):
        return -np.log1p(-((1.0 - t) ** theta))

    def phi_inv(self, s, theta):
        return 1.0 - (-np.expm1(-s)) ** (1.0 / theta)

    def phi_prime(self, t, theta):
        a = (1.0 - t) ** theta
        return -theta * (1.0 - t) ** (theta - 1.0) / (1.0 - a)

    def has_frailty(self, theta, d):
        return True

    def frailty(self, rng, theta, size):
        return dists.sample_sibuya(rng, 1.0 / theta, size)


@register
class Nelsen9(Archimedean):
    name = "nelsen9"
    aliases = ("nelsen_9",)

    def check_theta(self, theta, d):
        self.require(0.0 < theta <= 1.0, "theta in (0, 1]", f"theta = {theta}")

    def phi(self, t, theta):
        return np.log1p(-theta * np.log(t))

    def phi_inv(self, s, theta):
        with np.errstate(over="ignore"):
            return np.exp(-np.expm1(s) / theta)

    def phi_prime(self, t, theta):
        return -theta / (t * (1.0 - theta * np.log(t)))


@register
class Nelsen10(Archimedean):
    name = "nelsen10"
    aliases = ("nelsen_10",)

    def check_theta(self, theta, d):
        self.require(0.0 < theta <= 1.0, "theta in (0, 1]", f"theta = {theta}")

    def phi(self, t, theta):
        return np.log(2.0 * t ** (-theta) - 1.0)

    def phi_inv(self, s, theta):
        with np.errstate(over="ignore"):
            return ((np.exp(s) + 1.0) / 2.0) ** (-1.0 / theta)

    def phi_prime(self, t, theta):
        a = t ** (-theta)
        return -2.0 * theta * a / (t * (2.0 * a - 1.0))


@register
class Nelsen11(Archimedean):
    name = "nelsen11"
    aliases = ("nelsen_11",)

    def check_theta(self, theta, d):
        self.require(0.0 < theta <= 0.5, "theta in (0, 0.5]", f"theta = {theta}")

    def phi(self, t, theta):
        return np.log(2.0 - t**theta)

    def phi_inv(self, s, theta):
        with np.errstate(over="ignore"):
            return np.maximum(2.0 - np.exp(s), 0.0) ** (1.0 / theta)

    def phi_prime(self, t, theta):
        a = t**theta
        return -theta * a / (t * (2.0 - a))


@register
class Nelsen12(Archimedean):
    name = "nelsen12"
    aliases = ("nelsen_12",)

    def check_theta(self, theta, d):
        # the generator is convex only for theta >= 1
        self.require(theta >= 1.0, "theta in [1, inf)", f"theta = {theta}")

    def phi(self, t, theta):
        return (1.0 / t - 1.0) ** theta

    def phi_inv(self, s, theta):
        return 1.0 / (1.0 + s ** (1.0 / theta))

    def phi_prime(self, t, theta):
        return -theta * (1.0 / t - 1.0) ** (theta - 1.0) / t**2


@register
class Nelsen13(Archimedean):
    name = "nelsen13"
    aliases = ("nelsen_13",)

    def check_theta(self, theta, d):
        self.require(theta > 0.0, "theta in (0, inf)", f"theta = {theta}")

    def phi(self, t, theta):
        return (1.0 - np.log(t)) ** theta - 1.0

    def phi_inv(self, s, theta):
        return np.exp(1.0 - (1.0 + s) ** (1.0 / theta))

    def phi_prime(self, t, theta):
        return -theta * (1.0 - np.log(t)) ** (theta - 1.0) / t


@register
class Nelsen14(Archimedean):
    name = "nelsen14"
    aliases = ("nelsen_14",)

    def check_theta(self, theta, d):
        self.require(theta > 1.0, "theta in (1, inf)", f"theta = {theta}")

    def phi(self, t, theta):
        return (t ** (-1.0 / theta) - 1.0) ** theta

    def phi_inv(self, s, theta):
        return (1.0 + s ** (1.0 / theta)) ** (-theta)

    def phi_prime(self, t, theta):
        a = t ** (-1.0 / theta)
        return -((a - 1.0) ** (theta - 1.0)) * a / t


@register
class Nelsen15(Archimedean):
    name = "nelsen15"
    aliases = ("nelsen_15",)

    def check_theta(self, theta, d):
        self.require(theta >= 1.0, "theta in [1, inf)", f"theta = {theta}")

    def phi(self, t, theta):
        return (1.0 - t ** (1.0 / theta)) ** theta

    def phi_inv(self, s, theta):
        return np.maximum(1.0 - s ** (1.0 / theta), 0.0) ** theta

    def phi_prime(self, t, theta):
        a = t ** (1.0 / theta)
        return -((1.0 - a) ** (theta - 1.0)) * a / t


@register
class Nelsen22(Archimedean):
    name = "nelsen22"
    aliases = ("nelsen_22",)

    def check_theta(self, theta, d):
        # theta = 0 makes the generator constant
        self.require(0.0 < theta <= 1.0, "theta in (0, 1]", f"theta = {theta}")

    def phi(self, t, theta):
        return np.arcsin(1.0 - t**theta)

    def phi_inv(self, s, theta):
        s = np.minimum(s, np.pi / 2)
        return np.maximum(1.0 - np.sin(s), 0.0) ** (1.0 / theta)

    def phi_prime(self, t, theta):
        a = t**theta
        return -theta * a / (t * np.sqrt(1.0 - (1.0 - a) ** 2))


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorTriple:
    family: str
    theta: float
    phi: Callable
    phi_inv: Callable
    phi_prime: Callable
    frailty: Callable | None


def _model(spec: CopulaSpec) -> GeneratorModel:
    fam = spec.model
    if not isinstance(fam, GeneratorModel):
        raise ValidationError(f"{spec.family} is not an Archimedean family")
    return fam


def generator(spec: CopulaSpec) -> GeneratorTriple:
    fam = _model(spec)
    theta = spec.params["theta"]
    frailty = None
    if fam.has_frailty(theta, spec.d):
        def frailty(rng, size):
            return fam.frailty(rng, theta, size)
    return GeneratorTriple(
        spec.family, theta,
        lambda t: fam.phi(t, theta),
        lambda s: fam.phi_inv(s, theta),
        lambda t: fam.phi_prime(t, theta),
        frailty,
    )


def _unit_open_closed(t, what="t"):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0) or np.any(t > 1.0):
        raise DomainError(f"{what} must lie in (0, 1]")
    return t


def phi(spec: CopulaSpec, t):
    t = _unit_open_closed(t)
    with np.errstate(divide="ignore", over="ignore"):
        return _model(spec).phi(t, spec.params["theta"])


def phi_inv(spec: CopulaSpec, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0) or np.any(np.isnan(s)):
        raise DomainError("generator inverse needs a nonnegative argument")
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return _model(spec).phi_inv(s, spec.params["theta"])


def phi_prime(spec: CopulaSpec, t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0) or np.any(t >= 1.0):
        raise DomainError("generator derivative is evaluated on (0, 1)")
    with np.errstate(divide="ignore", over="ignore"):
        return _model(spec).phi_prime(t, spec.params["theta"])


def arch_cdf(spec: CopulaSpec, u):
    """``phi_inv(sum_j phi(u_j))`` for one point (length d) or rows of points."""
    u = _unit_open_closed(u, "u")
    if u.shape[-1] != spec.d:
        raise ArityMismatch(f"expected points of dimension {spec.d}")
    fam, theta = _model(spec), spec.params["theta"]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = fam.phi(u, theta).sum(axis=-1)
        c = fam.phi_inv(s, theta)
    return np.clip(c, 0.0, 1.0)


def _cond_cdf(fam, theta, u0, u1):
    with np.errstate(all="ignore"):
        s = fam.phi(u0, theta) + fam.phi(u1, theta)
        c = np.clip(fam.phi_inv(s, theta), 0.0, 1.0)
        ratio = fam.phi_prime(u0, theta) / fam.phi_prime(c, theta)
    ratio = np.where(c > 0.0, ratio, 0.0)
    ratio = np.where(np.isnan(ratio), 0.0, ratio)
    return np.clip(ratio, 0.0, 1.0)


def arch_cond_cdf(spec: CopulaSpec, u0, u1):
    """P(U1 <= u1 | U0 = u0) for a bivariate Archimedean copula."""
    if spec.d != 2:
        raise ValidationError("conditional CDF is defined for d = 2")
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if np.any((u0 <= 0) | (u0 >= 1) | (u1 <= 0) | (u1 >= 1)):
        raise DomainError("(u0, u1) must lie in the open unit square")
    return _cond_cdf(_model(spec), spec.params["theta"], u0, u1)


def sample_cond_bivariate(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """Conditional distribution method: draw (u0, t1) uniform, then solve
    ``c_{u0}(u1) = t1`` for u1."""
    if spec.d != 2:
        raise ValidationError("conditional sampling is bivariate")
    rng = as_stream(rng)
    fam, theta = _model(spec), spec.params["theta"]
    n = int(n)
    if n == 0:
        return SampleMatrix(np.empty((0, 2)))
    u0 = rng.uniform(n)
    t1 = rng.uniform(n)
    u1 = conditional_inverse(lambda a, b: _cond_cdf(fam, theta, a, b), u0, t1)
    return SampleMatrix(np.column_stack([u0, u1]))


def frailty_sample(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """Marshall-Olkin construction ``U_j = phi_inv(E_j / V)``."""
    rng = as_stream(rng)
    fam, theta = _model(spec), spec.params["theta"]
    if not fam.has_frailty(theta, spec.d):
        raise FrailtyUnavailable(f"{spec.family} with theta = {theta} has no frailty distribution")
    n = int(n)
    if n == 0:
        return SampleMatrix(np.empty((0, spec.d)))
    V = np.asarray(fam.frailty(rng, theta, n), dtype=float)
    E = rng.exponential((n, spec.d))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        U = fam.phi_inv(E / V[:, None], theta)
    return SampleMatrix(U, MarginTag.UNIFORM01)


def sample(spec: CopulaSpec, n: int, rng=None, method: str | None = None) -> SampleMatrix:
    """Frailty sampling where a frailty law exists, conditional sampling
    otherwise (bivariate only).  ``method`` forces ``"frailty"`` or
    ``"conditional"``."""
    fam, theta = _model(spec), spec.params["theta"]
    if method is None:
        method = "frailty" if fam.has_frailty(theta, spec.d) else "conditional"
    if method == "frailty":
        return frailty_sample(spec, n, rng)
    if method == "conditional":
        return sample_cond_bivariate(spec, n, rng)
    raise ValidationError(f"unknown sampling method {method!r} for {spec.family}")
