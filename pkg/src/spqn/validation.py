"""Argument checks shared by the estimator and the command line."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import InvalidParameterError
from .scenario import PATTERNS, VARIANTS


def check_scenario_name(name: str) -> str:
    if name not in PATTERNS:
        raise InvalidParameterError(f"unknown scenario {name!r}; choose from {', '.join(PATTERNS)}")
    return name


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise InvalidParameterError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
    return variant


def check_efficiency(value, name: str, allow_zero: bool = False) -> float:
    """Return ``value`` as a float in ``(0, 1]`` (or ``[0, 1]`` with ``allow_zero``)."""
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a number, got {value!r}") from None
    lo_ok = v >= 0.0 if allow_zero else v > 0.0
    if math.isnan(v) or not lo_ok or v > 1.0:
        interval = "[0, 1]" if allow_zero else "(0, 1]"
        raise InvalidParameterError(f"{name} must lie in {interval}, got {value!r}")
    return v


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise InvalidParameterError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_efficiency_pairs(X) -> np.ndarray:
    """``X`` as an ``(n, 2)`` float array of ``(eta, p)`` rows."""
    from sklearn.utils.validation import check_array

    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise InvalidParameterError(f"expected (eta, p) columns, got {X.shape[1]} columns")
    if np.any(X[:, 0] <= 0) or np.any(X[:, 0] > 1):
        raise InvalidParameterError("eta must lie in (0, 1]")
    if np.any(X[:, 1] < 0) or np.any(X[:, 1] > 1):
        raise InvalidParameterError("p must lie in [0, 1]")
    return X
