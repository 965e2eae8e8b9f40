"""Random generation of Archimedean, extreme-value and elliptical copulae,
with lambda-madogram estimation under missing data."""

from .core import (
    ArityMismatch,
    ConstraintViolation,
    CopulaError,
    CopulaSpec,
    DegenerateDenominator,
    DimensionUnsupported,
    DomainError,
    FrailtyUnavailable,
    InsufficientData,
    IterationCap,
    MarginTag,
    MaxIterExceeded,
    NoBracket,
    NotPositiveDefinite,
    RngStream,
    SampleMatrix,
    SamplerFailure,
    UnknownFamily,
    ValidationError,
    WeightRowSumViolation,
    apply_margins,
    available_families,
    brent_root,
    empirical_kendall_tau,
    validate_params,
)
from .api import cdf, cond_cdf, make_spec, sample
from .extreme import ev_cdf, pickands, stdf
from .madogram import (
    MonteCarloConfig,
    estimate_madogram,
    gen_missing_mask,
    monte_carlo_run,
    normality_diagnostics,
    pickands_from_madogram,
    true_madogram,
)

__version__ = "0.1.0"
