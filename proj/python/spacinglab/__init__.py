"""Bulk eigenvalue spacing statistics for beta = 1, 2, 4 ensembles."""

from ._core import (
    NumericError,
    UniversalSpacingCDF,
    __version__,
    config_hash,
    correlation,
    correlation_expansion,
    fredholm_g2,
    gap,
    identity_check,
    ks_bound,
    pfaffian,
    run_verify,
    sample,
    sample_mcmc,
    series_gap,
    universal_cdf,
)

__all__ = [
    "NumericError",
    "UniversalSpacingCDF",
    "__version__",
    "config_hash",
    "correlation",
    "correlation_expansion",
    "fredholm_g2",
    "gap",
    "identity_check",
    "ks_bound",
    "pfaffian",
    "run_verify",
    "sample",
    "sample_mcmc",
    "series_gap",
    "universal_cdf",
]
