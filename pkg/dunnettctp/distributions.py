"""Scalar distribution kernels: normal, Student t, F and chi.

The t and F functions are regularized incomplete beta evaluations
(``scipy.special.stdtr``/``fdtr``); upper tails are computed directly so
small p-values keep their relative accuracy.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "normal_cdf",
    "normal_ppf",
    "t_cdf",
    "t_sf",
    "t_ppf",
    "f_cdf",
    "f_sf",
    "chi_scale_ppf",
]


def _check_df(df: float, name: str = "df") -> None:
    if not df > 0:
        raise DomainError(f"{name} must be positive, got {df!r}")


def _is_normal(df: float) -> bool:
    return math.isinf(df)


def normal_cdf(x: float) -> float:
    """Standard normal distribution function."""
    return float(special.ndtr(x))


def normal_ppf(p: float) -> float:
    """Standard normal quantile function."""
    return float(special.ndtri(p))


def t_cdf(x: float, df: float) -> float:
    """Student t distribution function.

    Parameters
    ----------
    x : `float`
        Evaluation point.
    df : `float`
        Degrees of freedom, positive; ``math.inf`` gives the normal limit.

    Raises
    ------
    dunnettctp.errors.DomainError
        Raised if ``df <= 0``.
    """
    _check_df(df)
    if _is_normal(df):
        return normal_cdf(x)
    return float(special.stdtr(df, x))


def t_sf(x: float, df: float) -> float:
    """Upper tail ``P(T > x)`` of the Student t distribution."""
    return t_cdf(-x, df)


def t_ppf(p: float, df: float) -> float:
    """Student t quantile function."""
    _check_df(df)
    if _is_normal(df):
        return normal_ppf(p)
    return float(special.stdtrit(df, p))


def f_cdf(x: float, df1: float, df2: float) -> float:
    """F distribution function with ``(df1, df2)`` degrees of freedom."""
    _check_df(df1, "df1")
    _check_df(df2, "df2")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return float(special.fdtr(df1, df2, x))


def f_sf(x: float, df1: float, df2: float) -> float:
    """Upper tail ``P(F > x)`` of the F distribution."""
    _check_df(df1, "df1")
    _check_df(df2, "df2")
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return float(special.fdtrc(df1, df2, x))


def chi_scale_ppf(u: np.ndarray, df: float) -> np.ndarray:
    """Quantiles of ``sqrt(W / df)`` with ``W`` chi-square on ``df``
    degrees of freedom, evaluated at uniform points ``u``.

    This is the scale variable that turns a multivariate normal vector
    into a multivariate t vector.
    """
    _check_df(df)
    w = special.chdtri(df, 1.0 - np.asarray(u, dtype=float))
    return np.sqrt(w / df)
