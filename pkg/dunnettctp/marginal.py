"""Local tests for single hypothesis nodes: single-step multiple contrast
max-tests, the subset ANOVA F-test and the two-sample t-test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
import scipy.linalg

from . import config
from .contrasts import (
    ContrastKind,
    ContrastMatrix,
    CorrelationMatrix,
    correlation,
    dunnett_contrasts,
    pairwise_row,
)
from .design import ModelFit
from .distributions import f_sf, t_cdf, t_sf
from .errors import DegenerateContrastError
from .mvt import MvtProblem, mvt_cdf_box

__all__ = [
    "Sidedness",
    "TestMethod",
    "ElementaryMode",
    "DenominatorScope",
    "DfMode",
    "RowResult",
    "TestResult",
    "contrast_t",
    "mct_maxtest",
    "anova_f",
    "two_sample_t",
]


class Sidedness(enum.Enum):
    """Direction of the alternative hypotheses."""

    GREATER = "greater"
    LESS = "less"
    TWO_SIDED = "two-sided"

    @classmethod
    def parse(cls, value: str) -> Sidedness:
        """Parse a sidedness name; ``two`` and ``one`` are accepted as
        aliases of ``two-sided`` and ``greater``.
        """
        aliases = {"two": "two-sided", "one": "greater"}
        return cls(aliases.get(value, value))


class TestMethod(enum.Enum):
    __test__ = False

    MCT_DUNNETT = "mct-dunnett"
    MCT_GRAND_MEAN = "mct-grand-mean"
    MCT_CUSTOM = "mct-custom"
    ANOVA_F = "anova-f"
    PAIRWISE_T = "pairwise-t"
    TWO_SAMPLE_T = "two-sample-t"


class ElementaryMode(enum.Enum):
    """Test used by the F-test closure for single-treatment nodes."""

    PAIRWISE_FULL_DF = "pairwise-full-df"
    SUBSET_F = "subset-f"


class DenominatorScope(enum.Enum):
    """Residual variance used in subset F-tests."""

    SUBSET_REFIT = "subset"
    FULL_RESIDUAL = "full"


class DfMode(enum.Enum):
    """Variance estimate of the two-sample t-test."""

    POOLED_FULL = "pooled-full"
    PAIR_ONLY = "pair-only"


@dataclass(frozen=True)
class RowResult:
    """Statistic and p-values of one contrast row."""

    label: str
    t: float
    p_raw: float
    p_adjusted: float


@dataclass(frozen=True)
class TestResult:
    """Outcome of a local test of one hypothesis.

    Attributes
    ----------
    p : `float`
        Local p-value.
    statistic : `float`
        Maximum (or minimum, or maximum absolute) contrast t, or F.
    df_used : `int`
        Residual degrees of freedom of the variance estimate.
    method : `TestMethod`
        Which test produced the result.
    per_row : `tuple` of `RowResult`
        Per-contrast statistics; empty when not computed.
    zero_variance : `bool`
        `True` if the residual variance was zero and the statistic took
        the infinite-value convention.
    abs_error : `float`
        Integration error bound of ``p`` (zero for exact p-values).
    label : `str`
        Human-readable name of the tested hypothesis.
    """

    __test__ = False

    p: float
    statistic: float
    df_used: int
    method: TestMethod
    per_row: Tuple[RowResult, ...] = ()
    zero_variance: bool = False
    abs_error: float = 0.0
    label: str = ""

    def to_dict(self) -> Dict[str, object]:
        data: Dict[str, object] = {
            "method": self.method.value,
            "statistic": self.statistic,
            "df": self.df_used,
            "p": self.p,
        }
        if self.per_row:
            data["rows"] = [
                {
                    "label": row.label,
                    "t": row.t,
                    "p_raw": row.p_raw,
                    "p_adjusted": row.p_adjusted,
                }
                for row in self.per_row
            ]
        if self.zero_variance:
            data["zero_variance"] = True
        return data


_METHOD_BY_KIND = {
    ContrastKind.DUNNETT: TestMethod.MCT_DUNNETT,
    ContrastKind.GRAND_MEAN: TestMethod.MCT_GRAND_MEAN,
    ContrastKind.PAIRWISE_ROW: TestMethod.PAIRWISE_T,
    ContrastKind.CUSTOM: TestMethod.MCT_CUSTOM,
}


def _t_statistics(
    contrasts: ContrastMatrix, fit: ModelFit
) -> Tuple[np.ndarray, bool]:
    estimates = contrasts.rows @ fit.means
    variances = np.einsum(
        "ij,jk,ik->i",
        contrasts.rows,
        fit.covariance_scale,
        contrasts.rows,
    )
    if np.any(variances <= 0.0):
        bad = int(np.argmin(variances))
        raise DegenerateContrastError(
            f"contrast {contrasts.labels[bad]!r} has zero variance"
        )
    if fit.s2 > 0.0:
        return estimates / np.sqrt(fit.s2 * variances), False
    signs = np.sign(estimates)
    return np.where(signs == 0.0, 0.0, signs * np.inf), True


def contrast_t(contrasts: ContrastMatrix, fit: ModelFit) -> np.ndarray:
    """Contrast t-statistics ``c'mu / (S sqrt(c'Vc))``, one per row.

    With zero residual variance the statistics are ``+inf``, ``-inf`` or
    ``0`` according to the sign of the estimate.
    """
    return _t_statistics(contrasts, fit)[0]


def _univariate_p(t: float, df: float, side: Sidedness) -> float:
    if side is Sidedness.GREATER:
        return t_sf(t, df)
    if side is Sidedness.LESS:
        return t_cdf(t, df)
    return min(1.0, 2.0 * t_sf(abs(t), df))


def _adjusted_p(
    x: float,
    corr: CorrelationMatrix,
    df: int,
    side: Sidedness,
    seed: int,
    accuracy: float,
    decide_at: Optional[float] = None,
) -> Tuple[float, float]:
    """Single-step adjusted p-value of the observed statistic ``x``."""
    q = corr.q
    if side is Sidedness.LESS:
        x = -x
    elif side is Sidedness.TWO_SIDED:
        x = abs(x)
    if math.isinf(x):
        return (0.0 if x > 0 else 1.0), 0.0
    if side is Sidedness.TWO_SIDED:
        if x == 0.0:
            return 1.0, 0.0
        lower = np.full(q, -x)
    else:
        lower = np.full(q, -np.inf)
    problem = MvtProblem(lower, np.full(q, x), corr, float(df))
    threshold = None if decide_at is None else 1.0 - decide_at
    estimate = mvt_cdf_box(problem, accuracy, seed, threshold=threshold)
    return min(1.0, max(0.0, 1.0 - estimate.value)), estimate.abs_error


def _extreme(t: np.ndarray, side: Sidedness) -> float:
    if side is Sidedness.GREATER:
        return float(np.max(t))
    if side is Sidedness.LESS:
        return float(np.min(t))
    return float(np.max(np.abs(t)))


def mct_maxtest(
    contrasts: ContrastMatrix,
    fit: ModelFit,
    side: Sidedness = Sidedness.TWO_SIDED,
    seed: Optional[int] = None,
    *,
    accuracy: Optional[float] = None,
    per_row: bool = True,
    decide_at: Optional[float] = None,
    label: str = "",
) -> TestResult:
    """Single-step multiple contrast max-test.

    Parameters
    ----------
    contrasts : `ContrastMatrix`
        The contrasts of the tested hypothesis.
    fit : `ModelFit`
        Fitted model supplying means, variance and degrees of freedom.
    side : `Sidedness`
        Direction of the alternatives.
    seed : `int`, optional
        Seed of the multivariate t integration. Defaults to
        `dunnettctp.config.seed`.
    accuracy : `float`, optional
        Integration accuracy. Defaults to `dunnettctp.config.accuracy`.
    per_row : `bool`
        If `False`, only the hypothesis-level p-value is computed, with a
        single integration at the extreme statistic.
    decide_at : `float`, optional
        If given, integration stops as soon as each adjusted p-value is
        known to lie above or below this level, so only the comparison
        with it is reliable.
    label : `str`
        Name of the tested hypothesis.

    Returns
    -------
    result : `TestResult`
        The hypothesis-level p-value is the smallest per-row adjusted
        p-value.
    """
    seed = config.seed if seed is None else seed
    accuracy = config.accuracy if accuracy is None else accuracy
    method = _METHOD_BY_KIND[contrasts.kind]
    t, zero_variance = _t_statistics(contrasts, fit)
    statistic = _extreme(t, side)

    if contrasts.q == 1:
        p = _univariate_p(float(t[0]), fit.df, side)
        row = RowResult(contrasts.labels[0], float(t[0]), p, p)
        return TestResult(
            p=p,
            statistic=statistic,
            df_used=fit.df,
            method=method,
            per_row=(row,),
            zero_variance=zero_variance,
            label=label,
        )

    corr = correlation(contrasts, fit)
    if not per_row:
        p, error = _adjusted_p(
            statistic, corr, fit.df, side, seed, accuracy, decide_at
        )
        return TestResult(
            p=p,
            statistic=statistic,
            df_used=fit.df,
            method=method,
            zero_variance=zero_variance,
            abs_error=error,
            label=label,
        )

    rows = []
    errors = []
    for name, value in zip(contrasts.labels, t):
        adjusted, error = _adjusted_p(
            float(value), corr, fit.df, side, seed, accuracy, decide_at
        )
        raw = _univariate_p(float(value), fit.df, side)
        rows.append(RowResult(name, float(value), raw, max(adjusted, raw)))
        errors.append(error)
    return TestResult(
        p=min(row.p_adjusted for row in rows),
        statistic=statistic,
        df_used=fit.df,
        method=method,
        per_row=tuple(rows),
        zero_variance=zero_variance,
        abs_error=max(errors),
        label=label,
    )


def two_sample_t(
    i: int,
    fit: ModelFit,
    side: Sidedness = Sidedness.TWO_SIDED,
    df_mode: DfMode = DfMode.POOLED_FULL,
) -> TestResult:
    """Treatment ``i`` against the control with a pairwise contrast t-test.

    ``POOLED_FULL`` uses the variance of the full fit on ``N - g`` degrees
    of freedom; ``PAIR_ONLY`` refits on the two groups.
    """
    row = pairwise_row(fit.n_groups, i, fit.labels)
    if df_mode is DfMode.PAIR_ONLY:
        pair = fit.refit([0, i])
        row = pairwise_row(2, 1, pair.labels)
        fit = pair
    t, zero_variance = _t_statistics(row, fit)
    value = float(t[0])
    p = _univariate_p(value, fit.df, side)
    return TestResult(
        p=p,
        statistic=value,
        df_used=fit.df,
        method=TestMethod.TWO_SAMPLE_T,
        per_row=(RowResult(row.labels[0], value, p, p),),
        zero_variance=zero_variance,
        label=row.labels[0],
    )


def anova_f(
    active: Iterable[int],
    fit: ModelFit,
    elementary_mode: ElementaryMode = ElementaryMode.PAIRWISE_FULL_DF,
    denominator: DenominatorScope = DenominatorScope.SUBSET_REFIT,
) -> TestResult:
    """F-test of equal means across the control and the groups ``active``.

    The numerator is the between-group sum of squares of the compared
    groups on ``m - 1`` degrees of freedom, written as a quadratic form in
    the many-to-one contrasts so additive fits are covered too. With
    ``SUBSET_REFIT`` the residual variance comes from a refit on the
    compared groups; with ``FULL_RESIDUAL`` it is the full fit's.

    A single-treatment node under ``PAIRWISE_FULL_DF`` is tested with the
    two-sided pooled t-test instead.
    """
    contrasts = dunnett_contrasts(fit.n_groups, active, fit.labels)
    subset = contrasts.active_set
    if len(subset) == 1 and elementary_mode is ElementaryMode.PAIRWISE_FULL_DF:
        result = two_sample_t(subset[0], fit, Sidedness.TWO_SIDED)
        return TestResult(
            p=result.p,
            statistic=result.statistic,
            df_used=result.df_used,
            method=TestMethod.PAIRWISE_T,
            per_row=result.per_row,
            zero_variance=result.zero_variance,
            label=result.label,
        )

    compared = (0,) + subset
    label = ",".join(fit.labels[j] for j in compared)
    if denominator is DenominatorScope.SUBSET_REFIT:
        fit = fit.refit(compared)
        contrasts = dunnett_contrasts(
            fit.n_groups, range(1, fit.n_groups), fit.labels
        )
    rows = contrasts.rows
    estimates = rows @ fit.means
    cov = rows @ fit.covariance_scale @ rows.T
    quadratic = float(
        estimates @ scipy.linalg.solve(cov, estimates, assume_a="pos")
    )
    m = len(compared)
    zero_variance = fit.s2 <= 0.0
    if zero_variance:
        statistic = math.inf if quadratic > 0.0 else 0.0
    else:
        statistic = quadratic / ((m - 1) * fit.s2)
    return TestResult(
        p=f_sf(statistic, m - 1, fit.df),
        statistic=statistic,
        df_used=fit.df,
        method=TestMethod.ANOVA_F,
        zero_variance=zero_variance,
        label=f"F({label})",
    )
