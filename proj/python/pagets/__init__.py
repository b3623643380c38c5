"""Incremental multivariate Page-matrix time series models."""

from ._pagets import (
    HyperParams,
    Model,
    PagetsError,
    create_model,
    default_rows,
    forecast_coefficients,
    impute_mean,
    impute_variance,
    load_model,
    nrmse,
    r_squared,
    synthetic_I,
    synthetic_II,
    synthetic_III,
    wbc,
)

__all__ = [
    "HyperParams",
    "Model",
    "PagetsError",
    "create_model",
    "default_rows",
    "forecast_coefficients",
    "impute_mean",
    "impute_variance",
    "load_model",
    "nrmse",
    "r_squared",
    "synthetic_I",
    "synthetic_II",
    "synthetic_III",
    "wbc",
]
