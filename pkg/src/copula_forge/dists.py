"""Samplers for the univariate and multivariate laws the copula algorithms
consume: positive stable, logarithmic series, Sibuya, gamma, chi-square,
geometric, multivariate normal and Dirichlet.

Every sampler takes an :class:`~copula_forge.core.RngStream` first and an
optional ``size``; with ``size=None`` a scalar is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import NotPositiveDefinite, RngStream

PIVOT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    L: np.ndarray

    @property
    def d(self) -> int:
        return self.L.shape[0]


def cholesky(sigma) -> CholeskyFactor:
    """Lower Cholesky factor of a symmetric positive definite matrix.

    A pivot (squared diagonal entry) at or below ``1e-12`` is treated as
    singular and raises :class:`NotPositiveDefinite`.
    """
    S = np.atleast_2d(np.asarray(sigma, dtype=float))
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NotPositiveDefinite(detail="matrix must be square")
    if not np.all(np.isfinite(S)):
        raise NotPositiveDefinite(detail="matrix has non-finite entries")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-12):
        raise NotPositiveDefinite(detail="matrix is not symmetric")
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(detail="Cholesky factorization failed") from None
    if np.any(np.diag(L) ** 2 <= PIVOT_TOL):
        raise NotPositiveDefinite(detail="pivot below 1e-12, matrix is singular")
    return CholeskyFactor(L)


def sample_positive_stable(rng: RngStream, alpha: float, size=None):
    """Positive stable law with Laplace transform ``exp(-s**alpha)``.

    Kanter's form of the Chambers-Mallows-Stuck construction from one
    uniform angle and one standard exponential, evaluated in log space.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if alpha == 1.0:
        return 1.0 if size is None else np.ones(size)
    U = np.pi * rng.uniform(size)
    W = rng.exponential(size)
    log_s = (np.log(np.sin(alpha * U)) - np.log(np.sin(U)) / alpha
             + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * U)) - np.log(W)))
    return np.exp(log_s)


def sample_logseries(rng: RngStream, p: float | None = None, size=None, *, log1mp: float | None = None):
    """Logarithmic series law ``P(V = k) = -p**k / (k log(1 - p))``, k >= 1.

    Kemp's LK algorithm.  ``log1mp = log(1 - p)`` may be passed instead of
    ``p`` when ``p`` is too close to one to be represented.
    """
    if log1mp is None:
        p = float(p)
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        h = np.log1p(-p)
    else:
        h = float(log1mp)
        if not h < 0.0:
            raise ValueError("log(1 - p) must be negative")
        p = -np.expm1(h)
    scalar = size is None
    m = 1 if scalar else int(np.prod(size))
    u2 = rng.uniform(m)
    u1 = rng.uniform(m)
    out = np.ones(m)
    big = u2 < p
    e = np.exp(u1[big] * h)
    q = 1.0 - e
    with np.errstate(divide="ignore"):
        # log(q) via log1p keeps precision when q is near one
        k = np.where(u2[big] < q * q,
                     np.floor(1.0 + np.log(u2[big]) / np.log1p(-e)),
                     np.where(u2[big] > q, 1.0, 2.0))
    out[big] = k
    return float(out[0]) if scalar else out.reshape(size)


def sample_sibuya(rng: RngStream, alpha: float, size=None):
    """Sibuya law with probability generating function ``1 - (1 - z)**alpha``.

    Inversion of the survival function ``1 / (k B(k, 1 - alpha))`` with a
    single correction step (Hofert's recipe); O(1) per draw.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    scalar = size is None
    m = 1 if scalar else int(np.prod(size))
    out = np.ones(m)
    if alpha < 1.0:
        u = rng.uniform(m)
        tail = u > alpha
        ut = u[tail]
        ginv = np.exp(-(np.log1p(-ut) + special.gammaln(1.0 - alpha)) / alpha)
        fg = np.floor(ginv)
        # survival at fg: Gamma(fg + 1 - alpha) / (Gamma(fg + 1) Gamma(1 - alpha))
        with np.errstate(over="ignore", invalid="ignore"):
            surv = np.exp(special.gammaln(fg + 1.0 - alpha) - special.gammaln(fg + 1.0)
                          - special.gammaln(1.0 - alpha))
        k = np.where((ginv <= 1.0 / np.finfo(float).eps) & (1.0 - ut < surv), np.ceil(ginv), fg)
        out[tail] = k
    return float(out[0]) if scalar else out.reshape(size)


def sample_gamma(rng: RngStream, shape: float, size=None):
    # numpy's standard_gamma is the Marsaglia-Tsang squeeze with the k < 1 boost.
    if not shape > 0:
        raise ValueError("gamma shape must be positive")
    return rng.gen.standard_gamma(shape, size)


def sample_chisq(rng: RngStream, nu: float, size=None):
    return 2.0 * sample_gamma(rng, nu / 2.0, size)


def sample_geometric(rng: RngStream, p: float, size=None):
    """Number of Bernoulli(p) trials up to and including the first success."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    if p == 1.0:
        return 1 if size is None else np.ones(size, dtype=np.int64)
    return rng.gen.geometric(p, size)


def sample_mvn(rng: RngStream, factor: CholeskyFactor, size=None):
    """Centered normal vector(s) ``L z``; rows when ``size`` is given."""
    L = factor.L
    if size is None:
        return L @ rng.normal(L.shape[0])
    z = rng.normal((int(size), L.shape[0]))
    return z @ L.T


def sample_dirichlet(rng: RngStream, sigma, size=None):
    """Dirichlet draws as normalized independent gammas.

    ``sigma`` may be a single parameter vector or, with ``size`` rows,
    an array of per-row parameter vectors.
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("Dirichlet parameters must be positive")
    if size is None:
        g = rng.gen.standard_gamma(sigma)
        return g / g.sum()
    shape = (int(size), sigma.shape[-1])
    g = rng.gen.standard_gamma(np.broadcast_to(sigma, shape))
    return g / g.sum(axis=1, keepdims=True)
