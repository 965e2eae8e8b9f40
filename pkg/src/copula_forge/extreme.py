"""Extreme-value copulae.

A d-variate extreme-value copula is ``C(u) = exp(-l(-log u))`` where the
stable tail dependence function ``l`` is homogeneous of order one and is
determined by its restriction ``A`` to the unit simplex (the Pickands
dependence function).

Bivariate convention: the scalar argument ``t`` of the bivariate formulas
is the simplex weight of coordinate 1, i.e. ``A(t)`` means ``A((1-t, t))``
and ``C(u0, u1) = exp(log(u0 u1) A(log u1 / log(u0 u1)))``.  With it the
first partial derivative is ``C / u0 * (A(t) - t A'(t))``.

Samplers
--------
* logistic and asymmetric logistic: positive-stable constructions of
  Stephenson (2003);
* Hüsler-Reiss, t-EV, bilogistic, Dirichlet mixture: exact simulation from
  extremal functions (Dombry, Engelke and Oesting, 2016);
* remaining bivariate families: the conditional distribution method.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import special

from . import dists
from .archimedean import GeneratorModel
from .core import (
    ArityMismatch,
    CopulaSpec,
    DomainError,
    Family,
    IterationCap,
    MarginTag,
    SampleMatrix,
    ValidationError,
    WeightRowSumViolation,
    as_simplex,
    as_stream,
    bracketed_roots,
    conditional_inverse,
    need,
    real,
    register,
)

MAX_PROPOSALS = 10**6


class ExtremeModel(Family):
    kind = "extreme"
    # one of "conditional", "logistic", "asym_logistic", "extremal"
    sampler = "conditional"

    def A(self, w, p):
        """Pickands function at simplex points ``w`` (shape ``(..., d)``)."""
        raise NotImplementedError(f"the Pickands function of {self.name} is not implemented")

    def A_prime(self, t, p):
        """Derivative of the bivariate scalar form; ``None`` when unavailable."""
        return None

    def has_A(self, p, d) -> bool:
        return True

    def rext(self, p, j, rng, size):
        raise NotImplementedError(f"{self.name} has no extremal-function sampler")


class BivariateExtreme(ExtremeModel):
    """Family given by a scalar Pickands formula ``A1(t)``."""

    def A1(self, t, p):
        raise NotImplementedError

    def dA1(self, t, p):
        raise NotImplementedError

    def A(self, w, p):
        t = np.asarray(w, dtype=float)[..., 1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self.A1(t, p)
        out = np.where((t <= 0.0) | (t >= 1.0), 1.0, out)
        return out

    def A_prime(self, t, p):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.dA1(t, p)


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


@register
class Logistic(BivariateExtreme, GeneratorModel):
    """Logistic (Gumbel) model, ``A(w) = (sum_j w_j^(1/theta))^theta``.

    Also Archimedean with generator ``(-log t)^(1/theta)``."""

    name = "logistic"
    aliases = ("gumbel",)
    param_names = ("theta",)
    bivariate_only = False
    sampler = "logistic"

    def check(self, raw, d):
        theta = real(self, raw, "theta")
        self.require(0.0 < theta <= 1.0, "theta in (0, 1]", f"theta = {theta}")
        return {"theta": theta}

    def A(self, w, p):
        th = p["theta"]
        w = np.asarray(w, dtype=float)
        return np.sum(w ** (1.0 / th), axis=-1) ** th

    def A1(self, t, p):
        th = p["theta"]
        return (t ** (1.0 / th) + (1.0 - t) ** (1.0 / th)) ** th

    def dA1(self, t, p):
        th = p["theta"]
        s = t ** (1.0 / th) + (1.0 - t) ** (1.0 / th)
        return s ** (th - 1.0) * (t ** (1.0 / th - 1.0) - (1.0 - t) ** (1.0 / th - 1.0))

    def subset_form(self, p, d):
        members = [tuple(range(d))]
        return members, np.array([p["theta"]]), [np.ones(d)]

    # Archimedean view
    def phi(self, t, theta):
        return (-np.log(t)) ** (1.0 / theta)

    def phi_inv(self, s, theta):
        return np.exp(-(s**theta))

    def phi_prime(self, t, theta):
        return -((-np.log(t)) ** (1.0 / theta - 1.0)) / (theta * t)

    def has_frailty(self, theta, d):
        return True

    def frailty(self, rng, theta, size):
        return dists.sample_positive_stable(rng, theta, size)


@register
class Galambos(BivariateExtreme):
    name = "galambos"
    param_names = ("theta",)

    def check(self, raw, d):
        theta = real(self, raw, "theta")
        self.require(theta >= 0.0, "theta in [0, inf)", f"theta = {theta}")
        return {"theta": theta}

    def A1(self, t, p):
        th = p["theta"]
        if th == 0.0:
            return np.ones_like(t)
        lg = np.logaddexp(-th * _log(t), -th * _log(1.0 - t))
        return 1.0 - np.exp(-lg / th)

    def dA1(self, t, p):
        th = p["theta"]
        if th == 0.0:
            return np.zeros_like(t)
        lg = np.logaddexp(-th * _log(t), -th * _log(1.0 - t))
        k = -(1.0 / th + 1.0) * lg
        return np.exp(k - (th + 1.0) * _log(1.0 - t)) - np.exp(k - (th + 1.0) * _log(t))


@register
class AsymLogistic(BivariateExtreme):
    """Bivariate asymmetric logistic with ``theta >= 1`` (exponent
    ``theta`` inside, ``1/theta`` outside)."""

    name = "asym_logistic"
    aliases = ("asy_log", "asymmetric_logistic")
    param_names = ("theta", "psi1", "psi2")
    sampler = "asym_logistic"

    def check(self, raw, d):
        theta, psi1, psi2 = (real(self, raw, k) for k in self.param_names)
        self.require(theta >= 1.0, "theta in [1, inf)", f"theta = {theta}")
        self.require(0.0 < psi1 <= 1.0, "psi1 in (0, 1]", f"psi1 = {psi1}")
        self.require(0.0 < psi2 <= 1.0, "psi2 in (0, 1]", f"psi2 = {psi2}")
        return {"theta": theta, "psi1": psi1, "psi2": psi2}

    def A1(self, t, p):
        th, a, b = p["theta"], p["psi1"], p["psi2"]
        h = (a * t) ** th + (b * (1.0 - t)) ** th
        return (1.0 - a) * t + (1.0 - b) * (1.0 - t) + h ** (1.0 / th)

    def dA1(self, t, p):
        th, a, b = p["theta"], p["psi1"], p["psi2"]
        h = (a * t) ** th + (b * (1.0 - t)) ** th
        return (b - a) + h ** (1.0 / th - 1.0) * (a**th * t ** (th - 1.0) - b**th * (1.0 - t) ** (th - 1.0))

    def subset_form(self, p, d):
        # coordinate 1 carries psi1, coordinate 0 carries psi2
        a, b = p["psi1"], p["psi2"]
        members = [(0,), (1,), (0, 1)]
        alphas = np.array([1.0, 1.0, 1.0 / p["theta"]])
        weights = [np.array([1.0 - b]), np.array([1.0 - a]), np.array([b, a])]
        return members, alphas, weights


@register
class AsymNegLogistic(BivariateExtreme):
    name = "asym_neg_logistic"
    aliases = ("asy_neg_log", "asymmetric_negative_logistic")
    param_names = ("theta", "psi1", "psi2")

    def check(self, raw, d):
        theta, psi1, psi2 = (real(self, raw, k) for k in self.param_names)
        self.require(theta >= 0.0, "theta in [0, inf)", f"theta = {theta}")
        self.require(0.0 < psi1 <= 1.0, "psi1 in (0, 1]", f"psi1 = {psi1}")
        self.require(0.0 < psi2 <= 1.0, "psi2 in (0, 1]", f"psi2 = {psi2}")
        return {"theta": theta, "psi1": psi1, "psi2": psi2}

    def _lg(self, t, p):
        th, a, b = p["theta"], p["psi1"], p["psi2"]
        return np.logaddexp(-th * _log(a * t), -th * _log(b * (1.0 - t)))

    def A1(self, t, p):
        th = p["theta"]
        if th == 0.0:
            return np.ones_like(t)
        return 1.0 - np.exp(-self._lg(t, p) / th)

    def dA1(self, t, p):
        th, a, b = p["theta"], p["psi1"], p["psi2"]
        if th == 0.0:
            return np.zeros_like(t)
        k = -(1.0 / th + 1.0) * self._lg(t, p)
        right = np.exp(k - th * np.log(b) - (th + 1.0) * _log(1.0 - t))
        left = np.exp(k - th * np.log(a) - (th + 1.0) * _log(t))
        return right - left


@register
class AsymMixed(BivariateExtreme):
    name = "asym_mixed"
    aliases = ("asy_mixed", "asymmetric_mixed")
    param_names = ("theta", "psi1")

    def check(self, raw, d):
        theta, psi1 = real(self, raw, "theta"), real(self, raw, "psi1")
        tol = 1e-12
        self.require(theta >= 0.0, "theta >= 0", f"theta = {theta}")
        self.require(theta + 3 * psi1 >= -tol, "theta + 3 psi1 >= 0", f"theta + 3 psi1 = {theta + 3 * psi1}")
        self.require(theta + psi1 <= 1 + tol, "theta + psi1 <= 1", f"theta + psi1 = {theta + psi1}")
        self.require(theta + 2 * psi1 <= 1 + tol, "theta + 2 psi1 <= 1",
                     f"theta + 2 psi1 = {theta + 2 * psi1}")
        return {"theta": theta, "psi1": psi1}

    def A1(self, t, p):
        th, ps = p["theta"], p["psi1"]
        return 1.0 - (th + ps) * t + th * t**2 + ps * t**3

    def dA1(self, t, p):
        th, ps = p["theta"], p["psi1"]
        return -(th + ps) + 2 * th * t + 3 * ps * t**2


def _hr_terms(t, th):
    lr = _log(t) - _log(1.0 - t)
    a = th - lr / (2.0 * th)
    b = th + lr / (2.0 * th)
    return a, b


@register
class HuslerReiss(BivariateExtreme):
    """Bivariate Hüsler-Reiss; equivalent to a variogram ``Gamma = 4 theta^2``."""

    name = "husler_reiss"
    aliases = ("hr", "husler-reiss")
    param_names = ("theta",)
    sampler = "extremal"

    def check(self, raw, d):
        theta = real(self, raw, "theta")
        self.require(theta > 0.0, "theta in (0, inf)", f"theta = {theta}")
        return {"theta": theta}

    def A1(self, t, p):
        a, b = _hr_terms(t, p["theta"])
        return (1.0 - t) * special.ndtr(a) + t * special.ndtr(b)

    def dA1(self, t, p):
        a, b = _hr_terms(t, p["theta"])
        return special.ndtr(b) - special.ndtr(a)

    def rext(self, p, j, rng, size):
        g = 4.0 * p["theta"] ** 2
        Y = np.ones((size, 2))
        Y[:, 1 - j] = np.exp(np.sqrt(g) * rng.normal(size) - g / 2.0)
        return Y


@register
class TEV(BivariateExtreme):
    """Extremal-t (t-EV) model with correlation ``theta`` and ``psi1``
    degrees of freedom."""

    name = "t_ev"
    aliases = ("tev", "t-ev", "extremal_t")
    param_names = ("theta", "psi1")
    sampler = "extremal"

    def check(self, raw, d):
        theta, psi1 = real(self, raw, "theta"), real(self, raw, "psi1")
        self.require(-1.0 < theta < 1.0, "theta in (-1, 1)", f"theta = {theta}")
        self.require(psi1 > 0.0, "psi1 in (0, inf)", f"psi1 = {psi1}")
        return {"theta": theta, "psi1": psi1}

    def _z(self, t, p):
        rho, nu = p["theta"], p["psi1"]
        with np.errstate(over="ignore"):
            r = np.exp((_log(t) - _log(1.0 - t)) / nu)
        return np.sqrt(1.0 + nu) / np.sqrt(1.0 - rho**2) * (r - rho)

    def A1(self, t, p):
        nu = p["psi1"]
        return (t * special.stdtr(nu + 1.0, self._z(t, p))
                + (1.0 - t) * special.stdtr(nu + 1.0, self._z(1.0 - t, p)))

    def dA1(self, t, p):
        nu = p["psi1"]
        return special.stdtr(nu + 1.0, self._z(t, p)) - special.stdtr(nu + 1.0, self._z(1.0 - t, p))

    def rext(self, p, j, rng, size):
        rho, nu = p["theta"], p["psi1"]
        scale = np.sqrt((1.0 - rho**2) / (nu + 1.0))
        w = dists.sample_chisq(rng, nu + 1.0, size)
        T = rho + scale * rng.normal(size) * np.sqrt((nu + 1.0) / w)
        Y = np.ones((size, 2))
        Y[:, 1 - j] = np.maximum(T, 0.0) ** nu
        return Y


@register
class Bilogistic(BivariateExtreme):
    """Bilogistic model, ``A(t) = t q^(1-alpha) + (1-t) (1-q)^(1-beta)``
    where ``(1-alpha) t (1-q)^beta = (1-beta) (1-t) q^alpha``."""

    name = "bilogistic"
    param_names = ("alpha", "beta")
    sampler = "extremal"

    def check(self, raw, d):
        a, b = real(self, raw, "alpha"), real(self, raw, "beta")
        self.require(0.0 < a < 1.0, "alpha in (0, 1)", f"alpha = {a}")
        self.require(0.0 < b < 1.0, "beta in (0, 1)", f"beta = {b}")
        return {"alpha": a, "beta": b}

    def _q(self, t, p):
        a, b = p["alpha"], p["beta"]
        t = np.atleast_1d(np.asarray(t, dtype=float))
        flat = t.ravel()
        q = np.full(flat.shape, np.nan)
        inner = np.flatnonzero((flat > 0.0) & (flat < 1.0))
        if inner.size:
            ti = flat[inner]

            def f(x, idx):
                return (1.0 - a) * ti[idx] * (1.0 - x) ** b - (1.0 - b) * (1.0 - ti[idx]) * x**a

            q[inner] = bracketed_roots(f, np.zeros(inner.size), np.ones(inner.size))
        return q.reshape(t.shape)

    def A1(self, t, p):
        a, b = p["alpha"], p["beta"]
        shape = np.shape(t)
        q = self._q(t, p)
        t = np.atleast_1d(t)
        out = t * q ** (1.0 - a) + (1.0 - t) * (1.0 - q) ** (1.0 - b)
        return out.reshape(shape)

    def dA1(self, t, p):
        a, b = p["alpha"], p["beta"]
        shape = np.shape(t)
        q = self._q(t, p)
        return (q ** (1.0 - a) - (1.0 - q) ** (1.0 - b)).reshape(shape)

    def rext(self, p, j, rng, size):
        # exponents per coordinate: beta on coordinate 0, alpha on coordinate 1
        expo = np.array([p["beta"], p["alpha"]])
        return _bilogistic_rext(expo, j, rng, size)


def _bilogistic_rext(expo, j, rng, size):
    d = expo.size
    shape = np.ones(d)
    shape[j] = 1.0 - expo[j]
    W = dists.sample_dirichlet(rng, shape, size)
    logc = special.gammaln(d - expo) - special.gammaln(1.0 - expo)
    with np.errstate(divide="ignore", over="ignore"):
        logZ = logc - expo * np.log(W)
    return np.exp(logZ - logZ[:, [j]])


@register
class AsymLogisticMV(ExtremeModel):
    """Multivariate asymmetric logistic model.

    Parameters: ``subsets`` (list of index tuples), ``theta`` (one
    dependence parameter in (0, 1] per subset) and ``psi`` (per subset, one
    weight for each member).  For every coordinate the weights of the
    subsets containing it sum to one.
    """

    name = "asym_logistic_mv"
    aliases = ("asymmetric_logistic_mv",)
    param_names = ("subsets", "theta", "psi")
    bivariate_only = False
    sampler = "asym_logistic"

    def check(self, raw, d):
        subsets = need(self, raw, "subsets")
        theta = need(self, raw, "theta")
        psi = need(self, raw, "psi")
        try:
            members = [tuple(int(i) for i in b) for b in subsets]
            theta = np.asarray(theta, dtype=float).ravel()
            weights = [np.asarray(row, dtype=float).ravel() for row in psi]
        except (TypeError, ValueError):
            raise ArityMismatch(f"{self.name}: subsets, theta and psi must be numeric lists") from None
        if not (len(members) == theta.size == len(weights)):
            raise ArityMismatch(f"{self.name}: subsets, theta and psi must have equal lengths")
        seen = set()
        for b, wts in zip(members, weights):
            ok = (len(b) > 0 and len(set(b)) == len(b) and all(0 <= i < d for i in b)
                  and frozenset(b) not in seen)
            self.require(ok, "subsets are distinct nonempty subsets of {0, ..., d-1}", f"subset {list(b)}")
            seen.add(frozenset(b))
            if wts.size != len(b):
                raise ArityMismatch(f"{self.name}: psi for subset {list(b)} needs {len(b)} entries")
        for b, th, wts in zip(members, theta, weights):
            self.require(np.all((wts >= 0.0) & (wts <= 1.0)), "psi_{j,b} in [0, 1]", f"subset {list(b)}")
            if len(b) > 1:
                self.require(0.0 < th <= 1.0, "theta_b in (0, 1] for |b| >= 2", f"subset {list(b)}: {th}")
                self.require(th < 1.0 or np.all(wts == 0.0), "theta_b = 1 implies psi_{j,b} = 0",
                             f"subset {list(b)}")
        sums = np.zeros(d)
        for b, wts in zip(members, weights):
            sums[list(b)] += wts
        bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-12)
        if bad.size:
            raise WeightRowSumViolation(self.name, "sum_{b containing j} psi_{j,b} = 1",
                                        f"coordinate {bad[0]} sums to {sums[bad[0]]}")
        theta = np.where([len(b) == 1 for b in members], 1.0, theta)
        return {"subsets": members, "theta": theta, "psi": weights}

    def subset_form(self, p, d):
        return p["subsets"], np.asarray(p["theta"]), p["psi"]

    def A(self, w, p):
        w = np.asarray(w, dtype=float)
        total = np.zeros(w.shape[:-1])
        for b, th, wts in zip(p["subsets"], p["theta"], p["psi"]):
            part = (wts * w[..., list(b)]) ** (1.0 / th)
            total = total + np.sum(part, axis=-1) ** th
        return total


def _hr_sigma(gamma, j):
    keep = [i for i in range(gamma.shape[0]) if i != j]
    gj = gamma[keep, j]
    return 0.5 * (gj[:, None] + gj[None, :] - gamma[np.ix_(keep, keep)]), keep


@register
class HuslerReissMV(ExtremeModel):
    """Multivariate Hüsler-Reiss model parameterized by a variogram matrix
    ``gamma`` (symmetric, zero diagonal, conditionally negative definite)."""

    name = "husler_reiss_mv"
    param_names = ("gamma",)
    bivariate_only = False
    sampler = "extremal"

    def check(self, raw, d):
        try:
            G = np.asarray(need(self, raw, "gamma"), dtype=float)
        except (TypeError, ValueError):
            raise ArityMismatch(f"{self.name}: gamma must be a numeric matrix") from None
        if G.shape != (d, d):
            raise ArityMismatch(f"{self.name}: gamma must be a {d} x {d} matrix")
        cnd = "Gamma in D_d (symmetric, zero diagonal, conditionally negative definite)"
        self.require(np.all(np.isfinite(G)) and np.allclose(G, G.T, atol=1e-12, rtol=0), cnd, "not symmetric")
        self.require(np.all(np.diag(G) == 0.0) and np.all(G >= 0.0), cnd, "diagonal must be 0, entries >= 0")
        sigma, _ = _hr_sigma(G, 0)
        try:
            chol = dists.cholesky(sigma).L
        except ValidationError:
            raise self.violation(cnd, "not strictly conditionally negative definite") from None
        return {"gamma": G, "chol0": chol}

    def has_A(self, p, d):
        return d == 2

    def A(self, w, p):
        G = p["gamma"]
        if G.shape[0] != 2:
            raise NotImplementedError("the Hüsler-Reiss Pickands function is implemented for d = 2 only")
        return HuslerReiss.A(_REGISTRY_HR, w, {"theta": np.sqrt(G[0, 1]) / 2.0})

    def A_prime(self, t, p):
        G = p["gamma"]
        if G.shape[0] != 2:
            return None
        return HuslerReiss.A_prime(_REGISTRY_HR, t, {"theta": np.sqrt(G[0, 1]) / 2.0})

    def rext(self, p, j, rng, size):
        G = p["gamma"]
        d = G.shape[0]
        sigma, keep = _hr_sigma(G, j)
        factor = dists.cholesky(sigma)
        X = dists.sample_mvn(rng, factor, size)
        Y = np.ones((size, d))
        Y[:, keep] = np.exp(X - G[keep, j] / 2.0)
        return Y


_REGISTRY_HR = HuslerReiss()


@register
class DirichletMixture(ExtremeModel):
    """Mixture of Dirichlet spectral densities (Boldi and Davison).

    ``theta`` holds the m mixture weights and ``sigma`` the m x d matrix of
    positive Dirichlet parameters.  Unit Fréchet margins require the
    balance condition ``sum_k theta_k sigma_kj / sum_l sigma_kl = 1/d``.
    """

    name = "dirichlet"
    aliases = ("dirichlet_mixture",)
    param_names = ("theta", "sigma")
    bivariate_only = False
    sampler = "extremal"

    def check(self, raw, d):
        try:
            theta = np.asarray(need(self, raw, "theta"), dtype=float).ravel()
            sigma = np.atleast_2d(np.asarray(need(self, raw, "sigma"), dtype=float))
        except (TypeError, ValueError):
            raise ArityMismatch(f"{self.name}: theta and sigma must be numeric") from None
        if sigma.shape != (theta.size, d):
            raise ArityMismatch(f"{self.name}: sigma must be {theta.size} x {d}")
        self.require(np.all(theta >= 0.0) and abs(theta.sum() - 1.0) <= 1e-12,
                     "sum_k theta_k = 1 with theta_k >= 0", f"sum = {theta.sum()}")
        self.require(np.all(sigma > 0.0), "sigma_kj > 0")
        means = theta @ (sigma / sigma.sum(axis=1, keepdims=True))
        self.require(np.allclose(means, 1.0 / d, atol=1e-9, rtol=0),
                     "sum_k theta_k sigma_kj / sum_l sigma_kl = 1/d", f"got {means.tolist()}")
        return {"theta": theta, "sigma": sigma}

    def has_A(self, p, d):
        return False

    def rext(self, p, j, rng, size):
        theta, sigma = p["theta"], p["sigma"]
        prob = theta * sigma[:, j] / sigma.sum(axis=1)
        prob = prob / prob.sum()
        comp = rng.gen.choice(prob.size, size=size, p=prob)
        params = sigma[comp].copy()
        params[:, j] += 1.0
        W = dists.sample_dirichlet(rng, params, size)
        return W / W[:, [j]]


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------


def _model(spec: CopulaSpec) -> ExtremeModel:
    fam = spec.model
    if not isinstance(fam, ExtremeModel):
        raise ValidationError(f"{spec.family} is not an extreme-value family")
    return fam


def pickands(spec: CopulaSpec, w):
    """Pickands dependence function at simplex point(s) ``w``.

    For ``d = 2`` a scalar ``t`` denotes the point ``(1 - t, t)``.
    """
    fam = _model(spec)
    if not fam.has_A(spec.params, spec.d):
        raise NotImplementedError(f"the Pickands function of {spec.family} is not implemented")
    w = as_simplex(w, spec.d)
    return fam.A(w, spec.params)


def pickands_prime(spec: CopulaSpec, t):
    """Derivative of ``t -> A((1 - t, t))`` for bivariate families."""
    fam = _model(spec)
    if spec.d != 2:
        raise NotImplementedError("A' is defined for bivariate families")
    out = fam.A_prime(t, spec.params)
    if out is None:
        raise NotImplementedError(f"A' of {spec.family} is not available")
    return out


def stdf(spec: CopulaSpec, x):
    """Stable tail dependence function ``l(x) = sum(x) A(x / sum(x))``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.d:
        raise ArityMismatch(f"expected vectors of dimension {spec.d}")
    if np.any(x < 0.0) or np.any(~np.isfinite(x)):
        raise DomainError("stdf arguments must be finite and nonnegative")
    s = x.sum(axis=-1)
    if np.any(s <= 0.0):
        raise DomainError("stdf is undefined at the origin")
    fam = _model(spec)
    if not fam.has_A(spec.params, spec.d):
        raise NotImplementedError(f"the Pickands function of {spec.family} is not implemented")
    return s * fam.A(x / s[..., None], spec.params)


def ev_cdf(spec: CopulaSpec, u):
    """``C(u) = exp(-l(-log u))`` for ``u`` in (0, 1]^d."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != spec.d:
        raise ArityMismatch(f"expected points of dimension {spec.d}")
    if np.any(~(u > 0.0)) or np.any(u > 1.0):
        raise DomainError("u must lie in (0, 1]^d")
    x = -np.log(u)
    s = x.sum(axis=-1)
    fam = _model(spec)
    if not fam.has_A(spec.params, spec.d):
        raise NotImplementedError(f"the Pickands function of {spec.family} is not implemented")
    safe = np.where(s[..., None] > 0.0, x / np.where(s > 0.0, s, 1.0)[..., None], 1.0 / spec.d)
    return np.exp(-s * fam.A(safe, spec.params))


def _cond(fam, p, u0, u1):
    l0, l1 = np.log(u0), np.log(u1)
    L = l0 + l1
    t = l1 / L
    A = fam.A(np.stack([1.0 - t, t], axis=-1), p)
    mu = A - t * fam.A_prime(t, p)
    c = np.exp(L * A)
    return np.clip(c / u0 * mu, 0.0, 1.0)


def ev_cond_cdf(spec: CopulaSpec, u0, u1):
    """P(U1 <= u1 | U0 = u0) = C(u0, u1) / u0 * (A(t) - t A'(t))."""
    if spec.d != 2:
        raise ValidationError("conditional CDF is defined for d = 2")
    fam = _model(spec)
    if fam.A_prime(0.5, spec.params) is None:
        raise NotImplementedError(f"A' of {spec.family} is not available")
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if np.any((u0 <= 0) | (u0 >= 1) | (u1 <= 0) | (u1 >= 1)):
        raise DomainError("(u0, u1) must lie in the open unit square")
    return _cond(fam, spec.params, u0, u1)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def sample_cond_bivariate(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """Conditional distribution method with ``ev_cond_cdf``."""
    if spec.d != 2:
        raise ValidationError("conditional sampling is bivariate")
    fam, p = _model(spec), spec.params
    if fam.A_prime(0.5, p) is None:
        raise NotImplementedError(f"A' of {spec.family} is not available")
    rng = as_stream(rng)
    n = int(n)
    if n == 0:
        return SampleMatrix(np.empty((0, 2)))
    u0 = rng.uniform(n)
    t1 = rng.uniform(n)

    def cond(a, b):
        with np.errstate(all="ignore"):
            return _cond(fam, p, a, b)

    u1 = conditional_inverse(cond, u0, t1)
    return SampleMatrix(np.column_stack([u0, u1]))


def sample_logistic(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """``U_j = exp(-(E_j / S)^theta)`` with ``S`` positive stable(theta)."""
    if spec.family != "logistic":
        raise ValidationError("sample_logistic needs the logistic family")
    rng = as_stream(rng)
    n = int(n)
    theta = spec.params["theta"]
    S = np.asarray(dists.sample_positive_stable(rng, theta, n), dtype=float) if n else np.empty(0)
    E = rng.exponential((n, spec.d))
    with np.errstate(divide="ignore", over="ignore"):
        U = np.exp(-((E / S[:, None]) ** theta))
    return SampleMatrix(U.reshape(n, spec.d))


def sample_asym_logistic(spec: CopulaSpec, n: int, rng=None) -> SampleMatrix:
    """Asymmetric logistic sampling: one logistic cluster per subset on the
    Fréchet scale, combined through weighted componentwise maxima."""
    fam = _model(spec)
    if not hasattr(fam, "subset_form"):
        raise ValidationError(f"{spec.family} has no subset representation")
    rng = as_stream(rng)
    n, d = int(n), spec.d
    members, alphas, weights = fam.subset_form(spec.params, d)
    X = np.zeros((n, d))
    for b, alpha, wts in zip(members, alphas, weights):
        idx = list(b)
        if np.all(wts == 0.0):
            continue
        E = rng.exponential((n, len(idx)))
        if len(idx) == 1 or alpha == 1.0:
            Z = 1.0 / E
        else:
            S = np.asarray(dists.sample_positive_stable(rng, alpha, n), dtype=float)
            with np.errstate(divide="ignore", over="ignore"):
                Z = (S[:, None] / E) ** alpha
        X[:, idx] = np.maximum(X[:, idx], wts * Z)
    with np.errstate(divide="ignore"):
        U = np.exp(-1.0 / X)
    return SampleMatrix(U)


def rext_func(spec: CopulaSpec, j: int, rng=None, size: int | None = None):
    """Draw(s) of the extremal function anchored at coordinate ``j``.

    The result is on the Fréchet scale with coordinate ``j`` equal to one.
    """
    fam = _model(spec)
    if not 0 <= int(j) < spec.d:
        raise DomainError(f"anchor index {j} out of range")
    rng = as_stream(rng)
    Y = fam.rext(spec.params, int(j), rng, 1 if size is None else int(size))
    return Y[0] if size is None else Y


def sample_extremal_functions(spec: CopulaSpec, n: int, rng=None,
                              max_proposals: int = MAX_PROPOSALS) -> SampleMatrix:
    """Exact simulation of the max-stable vector by the extremal-function
    sweep, returned with uniform margins ``u = exp(-1/z)``.

    All rows are advanced together; ``max_proposals`` caps the number of
    proposal rounds per coordinate.
    """
    fam = _model(spec)
    rng = as_stream(rng)
    n, d = int(n), spec.d
    Z = np.zeros((n, d))
    for j in range(d):
        E = rng.exponential(n)
        active = 1.0 / E > Z[:, j]
        rounds = 0
        while active.any():
            rounds += 1
            if rounds > max_proposals:
                raise IterationCap(f"coordinate {j}: more than {max_proposals} proposal rounds")
            idx = np.flatnonzero(active)
            Y = fam.rext(spec.params, j, rng, idx.size)
            cand = Y / E[idx, None]
            if j == 0:
                ok = np.ones(idx.size, dtype=bool)
            else:
                ok = np.all(cand[:, :j] < Z[idx, :j], axis=1)
            rows = idx[ok]
            Z[rows] = np.maximum(Z[rows], cand[ok])
            E[idx] += rng.exponential(idx.size)
            active[idx] = 1.0 / E[idx] > Z[idx, j]
    with np.errstate(divide="ignore"):
        U = np.exp(-1.0 / Z)
    return SampleMatrix(U)


def sample(spec: CopulaSpec, n: int, rng=None, method: str | None = None) -> SampleMatrix:
    """Sample with the family's preferred algorithm, or ``method`` in
    {"conditional", "logistic", "asym_logistic", "extremal"}."""
    fam = _model(spec)
    method = method or fam.sampler
    if method in ("stephenson", "logistic") and spec.family == "logistic":
        return sample_logistic(spec, n, rng)
    if method in ("stephenson", "asym_logistic"):
        return sample_asym_logistic(spec, n, rng)
    if method == "extremal":
        return sample_extremal_functions(spec, n, rng)
    if method == "conditional":
        return sample_cond_bivariate(spec, n, rng)
    if method == "frailty" and spec.family == "logistic":
        from .archimedean import frailty_sample
        return frailty_sample(spec, n, rng)
    raise ValidationError(f"sampling method {method!r} is not available for {spec.family}")


def subsets_of(d: int):
    """All nonempty subsets of {0, ..., d-1} in order of size."""
    items = range(d)
    return [c for k in range(1, d + 1) for c in itertools.combinations(items, k)]
