"""Input validation shared by the estimators."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .config import FuzzyConfig, builtin, load
from .sets import OutOfUniverseError


def check_error_pairs(X, error_var, derror_var):
    """Validate an ``(n, 2)`` array of (error, change of error) in degrees."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns (error, derror), got {X.shape[1]}")
    e, de = X[:, 0], X[:, 1]
    error_var.check(e)
    derror_var.check(de)
    return e, de


def check_nonnegative(value, name, allow_inf=False):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    if np.isnan(value) or value < 0 or (np.isinf(value) and not allow_inf):
        raise ValueError(f"{name} must be >= 0{'' if allow_inf else ' and finite'}, got {value!r}")
    return float(value)


def resolve_config(config) -> FuzzyConfig:
    """Accept ``None``, a ``FuzzyConfig``, a bundled name or a file path."""
    if config is None:
        return FuzzyConfig()
    if isinstance(config, FuzzyConfig):
        return config
    if isinstance(config, str) and config in ("default", "printed_table"):
        return builtin(config)
    return load(config)


__all__ = ["check_error_pairs", "check_nonnegative", "resolve_config", "OutOfUniverseError"]
