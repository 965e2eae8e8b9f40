"""Shared plumbing: random streams, errors, sample containers, root finding,
margin transforms and the family registry used by ``validate_params``."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy import optimize, special, stats

# Largest double strictly below one; uniform samples never reach 0 or 1.
ONE_MINUS = float(np.nextafter(1.0, 0.0))
TINY = float(np.finfo(float).tiny)

ROOT_TOL = 1e-12
ROOT_MAXITER = 200
COND_EPS = 1e-12


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class CopulaError(Exception):
    """Base class of every error raised by the package."""


class ValidationError(CopulaError, ValueError):
    """Invalid copula specification or configuration."""


class UnknownFamily(ValidationError):
    pass


class ConstraintViolation(ValidationError):
    """A parameter violates its family's constraint set.

    ``constraint`` holds a human readable statement of the violated rule.
    """

    def __init__(self, family: str, constraint: str, detail: str = ""):
        self.family = family
        self.constraint = constraint
        msg = f"{family}: constraint violated: {constraint}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotPositiveDefinite(ConstraintViolation):
    def __init__(self, family: str = "matrix", constraint: str = "Sigma positive definite",
                 detail: str = ""):
        super().__init__(family, constraint, detail)


class WeightRowSumViolation(ConstraintViolation):
    pass


class DimensionUnsupported(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class FrailtyUnavailable(ValidationError):
    pass


class DomainError(CopulaError, ValueError):
    pass


class NoBracket(CopulaError):
    pass


class MaxIterExceeded(CopulaError):
    pass


class SamplerFailure(CopulaError):
    pass


class IterationCap(SamplerFailure):
    pass


class InsufficientData(CopulaError, ValueError):
    pass


class DegenerateDenominator(CopulaError, ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------


class RngStream:
    """Seeded PCG64 stream with reproducible child streams.

    Child ``i`` of a stream seeded with ``s`` is the stream of
    ``SeedSequence(s, spawn_key=(i,))`` and therefore depends only on
    ``(s, i)``.  A stream must not be shared between threads.
    """

    def __init__(self, seed: int = 0, _seq: np.random.SeedSequence | None = None):
        if _seq is None:
            seed = int(seed)
            if not 0 <= seed < 2**64:
                raise ValueError("seed must be a 64-bit unsigned integer")
            _seq = np.random.SeedSequence(seed)
        self.seed = int(_seq.entropy)
        self._seq = _seq
        self.gen = np.random.Generator(np.random.PCG64(_seq))

    def child(self, index: int) -> "RngStream":
        key = tuple(self._seq.spawn_key) + (int(index),)
        seq = np.random.SeedSequence(self._seq.entropy, spawn_key=key)
        return RngStream(_seq=seq)

    def uniform(self, size=None):
        """Uniform draws on the open interval (0, 1)."""
        u = self.gen.random(size)
        if size is None:
            while u == 0.0:
                u = self.gen.random()
            return u
        zero = u == 0.0
        while zero.any():
            u[zero] = self.gen.random(int(zero.sum()))
            zero = u == 0.0
        return u

    def exponential(self, size=None):
        return self.gen.standard_exponential(size)

    def normal(self, size=None):
        return self.gen.standard_normal(size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={tuple(self._seq.spawn_key)})"


def as_stream(rng: RngStream | int | None) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    return RngStream(0 if rng is None else rng)


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------


class MarginTag(enum.Enum):
    UNIFORM01 = "Uniform01"
    TRANSFORMED = "Transformed"


@dataclass(eq=False)
class SampleMatrix:
    """An n x d matrix of realizations plus a tag describing its margins."""

    data: np.ndarray
    margin_tag: MarginTag = MarginTag.UNIFORM01

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError("sample data must be a 2-d array")
        if self.margin_tag is MarginTag.UNIFORM01 and data.size:
            data = np.clip(data, TINY, ONE_MINUS)
        self.data = data

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __len__(self):
        return self.n


@dataclass(eq=False)
class CopulaSpec:
    """Validated handle (family, parameters, dimension) consumed by every
    sampler and evaluator.  Build it with :func:`validate_params`."""

    family: str
    params: dict[str, Any] = field(default_factory=dict)
    d: int = 2

    @property
    def model(self) -> "Family":
        return get_family(self.family)

    def __getitem__(self, key):
        return self.params[key]

    def __repr__(self):
        shown = {}
        for k, v in self.params.items():
            shown[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return f"CopulaSpec({self.family!r}, {shown}, d={self.d})"


# ---------------------------------------------------------------------------
# Family registry
# ---------------------------------------------------------------------------


class Family:
    """Base class for a registered parametric copula family.

    Subclasses declare ``name``, ``kind`` and ``param_names`` and implement
    :meth:`check`, which receives raw parameters keyed by name and returns
    the normalized parameter dict or raises a :class:`ValidationError`.
    """

    name: str = ""
    kind: str = ""
    param_names: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()
    bivariate_only: bool = True
    # Short-hand keys accepted in addition to ``param_names``.
    optional_names: tuple[str, ...] = ()

    def check(self, params: dict[str, Any], d: int) -> dict[str, Any]:
        raise NotImplementedError

    # helpers shared by subclasses
    def violation(self, constraint, detail=""):
        return ConstraintViolation(self.name, constraint, detail)

    def require(self, ok, constraint, detail=""):
        if not ok:
            raise self.violation(constraint, detail)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


_REGISTRY: dict[str, Family] = {}
_ALIASES: dict[str, str] = {}


def register(family_cls):
    """Class decorator adding one instance of ``family_cls`` to the registry."""
    fam = family_cls()
    _REGISTRY[fam.name] = fam
    for alias in fam.aliases:
        _ALIASES[alias] = fam.name
    return family_cls


def _load_catalog():
    # The family modules register themselves on import.
    from . import archimedean, elliptical, extreme  # noqa: F401


def available_families() -> list[str]:
    _load_catalog()
    return sorted(_REGISTRY)


def get_family(name: str) -> Family:
    _load_catalog()
    key = str(name).strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise UnknownFamily(
            f"unknown family {name!r}; available families: {', '.join(available_families())}"
        ) from None


def validate_params(family: str, params: Any = None, d: int = 2) -> CopulaSpec:
    """Check ``params`` against the constraints of ``family`` in dimension ``d``.

    ``params`` is either a mapping keyed by parameter name or a sequence
    given in the family's declared order (a bare number is accepted for
    one-parameter families).

    Raises
    ------
    UnknownFamily, ArityMismatch, DimensionUnsupported, ConstraintViolation
    """
    fam = get_family(family)
    d = int(d)
    if d < 2:
        raise DimensionUnsupported(f"{fam.name}: dimension must be at least 2, got {d}")
    if fam.bivariate_only and d != 2:
        raise DimensionUnsupported(f"{fam.name} is implemented for d = 2 only, got d = {d}")

    if params is None:
        params = {}
    if np.isscalar(params):
        params = [params]
    if isinstance(params, Mapping):
        raw = dict(params)
        unknown = set(raw) - set(fam.param_names) - set(fam.optional_names)
        if unknown:
            raise ArityMismatch(
                f"{fam.name}: unexpected parameter(s) {sorted(unknown)}; "
                f"expected {list(fam.param_names)}"
            )
    else:
        seq = list(params)
        if len(seq) != len(fam.param_names):
            raise ArityMismatch(
                f"{fam.name}: expected {len(fam.param_names)} parameter(s) "
                f"{list(fam.param_names)}, got {len(seq)}"
            )
        raw = dict(zip(fam.param_names, seq))
    checked = fam.check(raw, d)
    return CopulaSpec(fam.name, checked, d)


def need(fam: Family, raw: dict, key: str) -> Any:
    if key not in raw:
        raise ArityMismatch(f"{fam.name}: missing parameter {key!r}; expected {list(fam.param_names)}")
    return raw[key]


def real(fam: Family, raw: dict, key: str) -> float:
    value = need(fam, raw, key)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ArityMismatch(f"{fam.name}: parameter {key!r} must be a real number") from None
    if not np.isfinite(value):
        raise fam.violation(f"{key} finite", f"{key} = {value}")
    return value


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def brent_root(f: Callable[[float], float], lo: float, hi: float, tol: float = ROOT_TOL,
               maxiter: int = ROOT_MAXITER) -> float:
    """Root of ``f`` in ``[lo, hi]`` by Brent's method.

    Raises :class:`NoBracket` when ``f(lo)`` and ``f(hi)`` share a sign and
    :class:`MaxIterExceeded` when ``maxiter`` iterations do not suffice.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or np.sign(flo) == np.sign(fhi):
        raise NoBracket(f"f({lo}) = {flo} and f({hi}) = {fhi} do not bracket a root")
    try:
        x, info = optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                                  maxiter=maxiter, full_output=True, disp=False)
    except RuntimeError as exc:  # pragma: no cover - disp=False reports via info
        raise MaxIterExceeded(str(exc)) from exc
    if not info.converged:
        raise MaxIterExceeded(f"no convergence after {info.iterations} iterations")
    return float(x)


def bracketed_roots(f: Callable[[np.ndarray, np.ndarray], np.ndarray], lo, hi,
                    tol: float = ROOT_TOL, maxiter: int = ROOT_MAXITER) -> np.ndarray:
    """Elementwise roots of a vectorized ``f`` on 1-d brackets ``[lo, hi]``.

    Chandrupatla's method: inverse quadratic interpolation with a bisection
    safeguard, so it converges on any continuous sign-changing bracket.
    ``f(x, idx)`` receives abscissae for the problems listed in ``idx``
    (positions in ``lo``/``hi``) and returns the function values there.
    Brackets without a sign change raise :class:`NoBracket`.
    """
    a = np.atleast_1d(np.asarray(lo, dtype=float)).copy()
    b = np.atleast_1d(np.asarray(hi, dtype=float)).copy()
    a, b = (arr.copy() for arr in np.broadcast_arrays(a, b))
    every = np.arange(a.size)
    fa = np.asarray(f(a, every), dtype=float).copy()
    fb = np.asarray(f(b, every), dtype=float).copy()
    bad = ~(np.isfinite(fa) & np.isfinite(fb)) | (np.sign(fa) * np.sign(fb) > 0)
    if bad.any():
        idx = np.flatnonzero(bad)
        raise NoBracket(f"no sign change on {idx.size} bracket(s), first index {idx[0]}")

    out = np.where(fa == 0.0, a, b)
    active = (fa != 0.0) & (fb != 0.0)
    c, fc = a.copy(), fa.copy()
    t = np.full(a.shape, 0.5)
    eps = np.finfo(float).eps
    for _ in range(maxiter):
        if not active.any():
            return out
        ia = np.flatnonzero(active)
        xt = a[ia] + t[ia] * (b[ia] - a[ia])
        ft = np.asarray(f(xt, ia), dtype=float)
        if not np.all(np.isfinite(ft)):
            raise SamplerFailure("non-finite function value during root search")
        same = np.sign(ft) == np.sign(fa[ia])
        # same sign as a: c <- a, a <- xt ; otherwise c <- b, b <- a, a <- xt
        c[ia] = np.where(same, a[ia], b[ia])
        fc[ia] = np.where(same, fa[ia], fb[ia])
        b[ia] = np.where(same, b[ia], a[ia])
        fb[ia] = np.where(same, fb[ia], fa[ia])
        a[ia], fa[ia] = xt, ft

        use_a = np.abs(fa[ia]) < np.abs(fb[ia])
        xm = np.where(use_a, a[ia], b[ia])
        fm = np.where(use_a, fa[ia], fb[ia])
        tol_ = 2 * eps * np.abs(xm) + tol
        with np.errstate(divide="ignore", invalid="ignore"):
            tlim = tol_ / np.abs(b[ia] - c[ia])
        done = (tlim > 0.5) | (fm == 0.0)
        out[ia] = xm
        active[ia[done]] = False
        still = ~done
        if not still.any():
            continue
        ib = ia[still]
        A, B, C = a[ib], b[ib], c[ib]
        FA, FB, FC = fa[ib], fb[ib], fc[ib]
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = (A - B) / (C - B)
            ph = (FA - FB) / (FC - FB)
            iqi = (ph**2 < xi) & ((1 - ph) ** 2 < 1 - xi)
            tt = FA / (FB - FA) * FC / (FB - FC) + (C - A) / (B - A) * FA / (FC - FA) * FB / (FC - FB)
        tt = np.where(iqi & np.isfinite(tt), tt, 0.5)
        tl = tlim[still]
        t[ib] = np.clip(tt, tl, 1 - tl)
    if active.any():
        raise MaxIterExceeded(f"{int(active.sum())} root(s) unresolved after {maxiter} iterations")
    return out


# ---------------------------------------------------------------------------
# Margins and simple statistics
# ---------------------------------------------------------------------------


QUANTILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "uniform": lambda u: np.asarray(u, dtype=float),
    "std_normal": special.ndtri,
    "std_exponential": lambda u: -np.log1p(-np.asarray(u, dtype=float)),
}


def quantile(name_or_fn) -> Callable[[np.ndarray], np.ndarray]:
    if callable(name_or_fn):
        return name_or_fn
    try:
        return QUANTILES[name_or_fn]
    except KeyError:
        raise ValidationError(
            f"unknown margin {name_or_fn!r}; available: {', '.join(QUANTILES)}"
        ) from None


def apply_margins(U: SampleMatrix, q: Sequence) -> SampleMatrix:
    """Push uniform margins through one quantile function per column."""
    if len(q) != U.d:
        raise ArityMismatch(f"{len(q)} quantile functions given for {U.d} columns")
    cols = [np.asarray(quantile(fn)(U.data[:, j]), dtype=float) for j, fn in enumerate(q)]
    data = np.column_stack(cols) if cols else U.data.copy()
    return SampleMatrix(data.reshape(U.data.shape), MarginTag.TRANSFORMED)


def empirical_kendall_tau(S, j: int = 0, k: int = 1) -> float:
    """Concordance statistic tau_a: (concordant - discordant) / (n choose 2).

    Tied pairs count as neither concordant nor discordant.  Computed in
    O(n log n) from scipy's tau_b and the tie counts.
    """
    X = np.asarray(S, dtype=float)
    x, y = X[:, j], X[:, k]
    n = x.size
    if n < 2:
        raise InsufficientData("Kendall's tau needs at least two observations")
    n0 = n * (n - 1) / 2.0

    def tie_pairs(v):
        _, counts = np.unique(v, return_counts=True)
        return float(np.sum(counts * (counts - 1) / 2.0))

    t1, t2 = tie_pairs(x), tie_pairs(y)
    if t1 == n0 or t2 == n0:
        return 0.0
    tau_b = stats.kendalltau(x, y, variant="b").statistic
    return float(tau_b * np.sqrt((n0 - t1) * (n0 - t2)) / n0)


def ks_uniform(x) -> float:
    """Kolmogorov-Smirnov distance between a sample and U(0, 1)."""
    return float(stats.kstest(np.asarray(x, dtype=float), "uniform").statistic)


def empirical_copula(U, grid) -> np.ndarray:
    """Bivariate empirical CDF of ``U`` evaluated on ``grid`` x ``grid``."""
    U = np.asarray(U, dtype=float)
    grid = np.asarray(grid, dtype=float)
    below0 = U[:, 0][:, None] <= grid[None, :]
    below1 = U[:, 1][:, None] <= grid[None, :]
    return below0.T.astype(float) @ below1.astype(float) / U.shape[0]


def as_simplex(w, d: int) -> np.ndarray:
    """Return ``w`` as points of the unit simplex (shape ``(..., d)``).

    For ``d = 2`` a scalar ``t`` stands for the point ``(1 - t, t)``.
    Points whose coordinates sum to one within 1e-9 are renormalized;
    anything else raises :class:`DomainError`.
    """
    w = np.asarray(w, dtype=float)
    if d == 2 and (w.ndim == 0 or w.shape[-1] != 2):
        w = np.stack([1.0 - w, w], axis=-1)
    if w.shape[-1] != d:
        raise DomainError(f"simplex point must have {d} coordinates")
    if np.any(w < -1e-12) or not np.all(np.isfinite(w)):
        raise DomainError("simplex coordinates must be nonnegative")
    total = w.sum(axis=-1)
    if np.any(np.abs(total - 1.0) > 1e-9):
        raise DomainError("simplex point coordinates must sum to 1")
    return np.clip(w, 0.0, None) / total[..., None]


def conditional_inverse(cond_cdf, u0: np.ndarray, t1: np.ndarray, eps: float = COND_EPS) -> np.ndarray:
    """Solve ``cond_cdf(u0, u1) = t1`` for ``u1`` row by row on ``[eps, 1 - eps]``.

    ``cond_cdf`` is vectorized and nondecreasing in ``u1``.  Rows whose root
    lies outside the bracket are pinned to the nearer endpoint.
    """
    u0 = np.asarray(u0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    n = u0.size
    lo = np.full(n, eps)
    hi = np.full(n, 1.0 - eps)
    with np.errstate(all="ignore"):
        f_lo = cond_cdf(u0, lo) - t1
        f_hi = cond_cdf(u0, hi) - t1
    if not (np.all(np.isfinite(f_lo)) and np.all(np.isfinite(f_hi))):
        bad = np.flatnonzero(~(np.isfinite(f_lo) & np.isfinite(f_hi)))
        raise SamplerFailure(f"conditional CDF is not finite at row {bad[0]}")
    out = np.empty(n)
    pin_lo = f_lo >= 0.0
    pin_hi = ~pin_lo & (f_hi <= 0.0)
    out[pin_lo] = lo[pin_lo]
    out[pin_hi] = hi[pin_hi]
    todo = np.flatnonzero(~(pin_lo | pin_hi))
    if todo.size:
        u0_t, t1_t = u0[todo], t1[todo]

        def f(x, idx):
            with np.errstate(all="ignore"):
                return cond_cdf(u0_t[idx], x) - t1_t[idx]

        try:
            out[todo] = bracketed_roots(f, lo[todo], hi[todo])
        except (NoBracket, MaxIterExceeded) as exc:
            raise SamplerFailure(f"conditional inversion failed: {exc}") from exc
    return out
