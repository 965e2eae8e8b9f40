"""Gaussian and Student copulae."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate, special, stats

from . import dists
from .core import (
    ArityMismatch,
    CopulaSpec,
    DomainError,
    Family,
    SampleMatrix,
    ValidationError,
    as_stream,
    need,
    real,
    register,
)


def norm_cdf(x):
    return special.ndtr(x)


def norm_ppf(u):
    return special.ndtri(u)


def t_cdf(x, df):
    return special.stdtr(df, x)


def t_ppf(u, df):
    return special.stdtrit(df, u)


def _correlation(fam, raw, d):
    """Correlation matrix from ``sigma`` (matrix or scalar) or ``rho``."""
    if "sigma" in raw and "rho" in raw:
        raise ArityMismatch(f"{fam.name}: give either sigma or rho, not both")
    key = "sigma" if "sigma" in raw else "rho"
    value = need(fam, raw, key) if key == "sigma" else raw.get("rho")
    if value is None:
        raise ArityMismatch(f"{fam.name}: missing parameter 'sigma'")
    try:
        S = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ArityMismatch(f"{fam.name}: sigma must be numeric") from None
    if S.ndim == 0:
        rho = float(S)
        fam.require(np.isfinite(rho), "Sigma positive definite", f"rho = {rho}")
        S = np.full((d, d), rho)
        np.fill_diagonal(S, 1.0)
    if S.shape != (d, d):
        raise ArityMismatch(f"{fam.name}: sigma must be a {d} x {d} matrix")
    diag = np.diag(S)
    fam.require(np.all(np.isfinite(S)) and np.all(diag > 0.0), "Sigma positive definite",
                "diagonal entries must be positive")
    if not np.allclose(diag, 1.0, rtol=0.0, atol=1e-12):
        warnings.warn(f"{fam.name}: sigma rescaled to unit diagonal", RuntimeWarning, stacklevel=4)
        s = np.sqrt(diag)
        S = S / np.outer(s, s)
    try:
        factor = dists.cholesky(S)
    except ValidationError:
        raise fam.violation("Sigma positive definite", "Cholesky pivot <= 1e-12 or factorization failed") from None
    return S, factor


class Elliptical(Family):
    kind = "elliptical"
    bivariate_only = False
    optional_names = ("rho",)


@register
class Gaussian(Elliptical):
    name = "gaussian"
    aliases = ("normal",)
    param_names = ("sigma",)

    def check(self, raw, d):
        S, factor = _correlation(self, raw, d)
        return {"sigma": S, "chol": factor}


@register
class Student(Elliptical):
    name = "student"
    aliases = ("t", "student_t")
    param_names = ("sigma", "theta")

    def check(self, raw, d):
        S, factor = _correlation(self, raw, d)
        theta = real(self, raw, "theta")
        self.require(theta > 0.0, "theta > 0", f"theta = {theta}")
        return {"sigma": S, "chol": factor, "theta": theta}


def _model(spec: CopulaSpec) -> Elliptical:
    fam = spec.model
    if not isinstance(fam, Elliptical):
        raise ValidationError(f"{spec.family} is not an elliptical family")
    return fam


def sample_gaussian(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """``U = Phi(L z)`` rowwise."""
    if spec.family != "gaussian":
        raise ValidationError("sample_gaussian needs the gaussian family")
    rng = as_stream(rng)
    X = dists.sample_mvn(rng, spec.params["chol"], int(n))
    return SampleMatrix(norm_cdf(X))


def sample_student(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """``U_j = T_theta(sqrt(theta / W) (L z)_j)`` with ``W`` chi-square(theta)."""
    if spec.family != "student":
        raise ValidationError("sample_student needs the student family")
    rng = as_stream(rng)
    n = int(n)
    df = spec.params["theta"]
    X = dists.sample_mvn(rng, spec.params["chol"], n)
    W = dists.sample_chisq(rng, df, n)
    return SampleMatrix(t_cdf(X * np.sqrt(df / W)[:, None], df))


def sample(spec: CopulaSpec, n: int, rng=None, method: str | None = None) -> SampleMatrix:
    _model(spec)
    if method not in (None, "elliptical"):
        raise ValidationError(f"sampling method {method!r} is not available for {spec.family}")
    if spec.family == "gaussian":
        return sample_gaussian(spec, n, rng)
    return sample_student(spec, n, rng)


def bvn_cdf(h, k, rho):
    """Bivariate standard normal CDF from Owen's T function."""
    h, k = np.broadcast_arrays(np.asarray(h, dtype=float), np.asarray(k, dtype=float))
    r = np.sqrt(1.0 - rho * rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        ah = (k - rho * h) / (h * r)
        ak = (h - rho * k) / (k * r)
    Th = np.where(h == 0.0, np.where(k - rho * h >= 0, 0.25, -0.25) * (k != rho * h),
                  special.owens_t(h, np.nan_to_num(ah)))
    Tk = np.where(k == 0.0, np.where(h - rho * k >= 0, 0.25, -0.25) * (h != rho * k),
                  special.owens_t(k, np.nan_to_num(ak)))
    beta = ((h * k < 0) | ((h * k == 0) & (h + k < 0))).astype(float)
    out = 0.5 * norm_cdf(h) + 0.5 * norm_cdf(k) - Th - Tk - 0.5 * beta
    out = np.where((h == 0.0) & (k == 0.0), 0.25 + np.arcsin(rho) / (2.0 * np.pi), out)
    # infinite arguments reduce to a margin
    out = np.where(np.isposinf(h), norm_cdf(k), out)
    out = np.where(np.isposinf(k), norm_cdf(h), out)
    return np.clip(out, 0.0, 1.0)


def bvt_cdf(x, y, rho, df):
    """Bivariate Student CDF as a scale mixture of bivariate normals."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # s = sqrt(W / df), W chi-square(df): density of s
    logc = np.log(2.0) + (df / 2.0) * np.log(df / 2.0) - special.gammaln(df / 2.0)

    def integrand(s):
        dens = np.exp(logc + (df - 1.0) * np.log(s) - df * s * s / 2.0) if s > 0 else 0.0
        return bvn_cdf(x * s, y * s, rho) * dens

    val, _ = integrate.quad_vec(integrand, 0.0, np.inf, epsabs=1e-12, epsrel=1e-12)
    fin = np.isfinite(x) & np.isfinite(y)
    val = np.where(fin, val, np.where(np.isposinf(x), t_cdf(y, df), t_cdf(x, df)))
    return np.clip(val, 0.0, 1.0)


def elliptical_cdf(spec: CopulaSpec, u):
    """Copula CDF through the multivariate normal / t distribution function.

    Bivariate values are accurate to about 1e-12; for ``d >= 3`` scipy's
    numerical integration is used (accuracy about 1e-6).
    """
    _model(spec)
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != spec.d:
        raise ArityMismatch(f"expected points of dimension {spec.d}")
    if np.any(~(u > 0.0)) or np.any(u > 1.0):
        raise DomainError("u must lie in (0, 1]^d")
    S = spec.params["sigma"]
    gaussian = spec.family == "gaussian"
    x = norm_ppf(u) if gaussian else t_ppf(u, spec.params["theta"])
    if spec.d == 2:
        if gaussian:
            return bvn_cdf(x[..., 0], x[..., 1], S[0, 1])
        return bvt_cdf(x[..., 0], x[..., 1], S[0, 1], spec.params["theta"])
    if gaussian:
        return stats.multivariate_normal.cdf(x, mean=np.zeros(spec.d), cov=S, abseps=1e-7, releps=1e-7)
    # quasi Monte Carlo integration with a fixed seed keeps the result deterministic
    return stats.multivariate_t.cdf(x, loc=np.zeros(spec.d), shape=S, df=spec.params["theta"],
                                    maxpts=50_000, random_state=0)
