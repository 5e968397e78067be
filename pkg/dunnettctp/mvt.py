"""Central multivariate normal and t rectangle probabilities.

Probabilities are computed with the separation-of-variables transform of
the box to the unit cube, after a pivoted Cholesky factorization that
orders variables by expected truncation. The transformed integrand is
averaged over scrambled Sobol' points with several independent
randomizations; their spread gives the error estimate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special
from scipy.stats import qmc

from .contrasts import CorrelationMatrix
from .distributions import chi_scale_ppf, normal_cdf, t_cdf, t_ppf
from .errors import AccuracyNotReachedError, DomainError, NotPSDError

__all__ = [
    "MvtProblem",
    "ProbEstimate",
    "mvt_cdf_box",
    "equicoordinate_quantile",
]

logger = logging.getLogger(__name__)

RANDOMIZATIONS = 12
"""Independent scramblings of the Sobol' sequence."""

INITIAL_POINTS_LOG2 = 8
"""Points per randomization in the first pass (2**8)."""

MAX_POINTS_LOG2 = 17
"""Cap on points per randomization (2**17)."""

ERROR_FACTOR = 3.0
"""Multiplier applied to the randomization standard error."""

PIVOT_TOLERANCE = 1e-10
"""Conditional variances below this are treated as zero pivots."""

_UNIFORM_EPS = 1e-15


@dataclass(frozen=True, eq=False)
class MvtProblem:
    """A central multivariate t (or normal) box probability.

    Attributes
    ----------
    lower : `numpy.ndarray`
        Lower bounds, possibly ``-inf``.
    upper : `numpy.ndarray`
        Upper bounds, possibly ``+inf``.
    corr : `CorrelationMatrix`
        Correlation matrix of the distribution.
    df : `float`
        Degrees of freedom; ``0`` (or ``inf``) encodes the multivariate
        normal limit.
    """

    lower: np.ndarray
    upper: np.ndarray
    corr: CorrelationMatrix
    df: float = 0.0

    def __post_init__(self) -> None:
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        q = self.corr.q
        if lower.shape != (q,) or upper.shape != (q,):
            raise ValueError(
                f"bounds of shape {lower.shape}/{upper.shape} for a "
                f"{q}-dimensional correlation matrix"
            )
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("bounds must not be NaN")
        if np.any(lower >= upper):
            raise ValueError("lower bounds must lie below upper bounds")
        if math.isnan(self.df) or self.df < 0:
            raise DomainError(f"df must be nonnegative, got {self.df!r}")

    @property
    def q(self) -> int:
        return self.corr.q

    @property
    def is_normal(self) -> bool:
        return self.df == 0 or math.isinf(self.df)


@dataclass(frozen=True)
class ProbEstimate:
    """A probability estimate with its error bound.

    ``abs_error`` is three times the standard error across randomizations;
    ``converged`` is False when the sample cap was hit first.
    """

    value: float
    abs_error: float
    n_samples: int
    converged: bool = True


@dataclass(frozen=True)
class _Factor:
    """Reordered bounds and lower-triangular factor of a problem."""

    lower: np.ndarray
    upper: np.ndarray
    chol: np.ndarray
    singular: np.ndarray
    order: np.ndarray


def _factorize(
    lower: np.ndarray, upper: np.ndarray, values: np.ndarray
) -> _Factor:
    """Pivoted Cholesky factorization with variables ordered by expected
    truncation; zero pivots are kept as deterministic rows.
    """
    q = values.shape[0]
    cov = values.copy()
    a = lower.copy()
    b = upper.copy()
    order = np.arange(q)
    chol = np.zeros((q, q))
    singular = np.zeros(q, dtype=bool)
    expected = np.zeros(q)

    for i in range(q):
        best, best_prob = i, math.inf
        for j in range(i, q):
            var = cov[j, j] - chol[j, :i] @ chol[j, :i]
            if var <= PIVOT_TOLERANCE:
                continue
            sd = math.sqrt(var)
            shift = chol[j, :i] @ expected[:i]
            prob = normal_cdf((b[j] - shift) / sd) - normal_cdf(
                (a[j] - shift) / sd
            )
            if prob < best_prob:
                best, best_prob = j, prob
        if best != i:
            for arr in (a, b, order):
                arr[[i, best]] = arr[[best, i]]
            cov[[i, best], :] = cov[[best, i], :]
            cov[:, [i, best]] = cov[:, [best, i]]
            chol[[i, best], :] = chol[[best, i], :]

        var = cov[i, i] - chol[i, :i] @ chol[i, :i]
        if var <= PIVOT_TOLERANCE:
            singular[i] = True
            continue
        pivot = math.sqrt(var)
        chol[i, i] = pivot
        for j in range(i + 1, q):
            chol[j, i] = (cov[j, i] - chol[j, :i] @ chol[i, :i]) / pivot
        shift = chol[i, :i] @ expected[:i]
        alpha = (a[i] - shift) / pivot
        beta = (b[i] - shift) / pivot
        mass = normal_cdf(beta) - normal_cdf(alpha)
        if mass > 0:
            expected[i] = (_pdf(alpha) - _pdf(beta)) / mass
        else:
            expected[i] = alpha if math.isfinite(alpha) else beta

    return _Factor(lower=a, upper=b, chol=chol, singular=singular, order=order)


def _pdf(x: float) -> float:
    if math.isinf(x):
        return 0.0
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _integrand(points: np.ndarray, factor: _Factor, df: float) -> np.ndarray:
    """Separation-of-variables integrand on the unit cube."""
    points = np.clip(points, _UNIFORM_EPS, 1.0 - _UNIFORM_EPS)
    n = points.shape[0]
    q = factor.chol.shape[0]
    if df > 0 and math.isfinite(df):
        scale = chi_scale_ppf(points[:, -1], df)
        uniforms = points[:, :-1]
    else:
        scale = np.ones(n)
        uniforms = points

    # scale is strictly positive, so infinite bounds stay infinite
    lower = factor.lower[None, :] * scale[:, None]
    upper = factor.upper[None, :] * scale[:, None]

    y = np.zeros((n, q))
    value = np.ones(n)
    for i in range(q):
        shift = y[:, :i] @ factor.chol[i, :i]
        if factor.singular[i]:
            inside = (lower[:, i] <= shift) & (shift <= upper[:, i])
            value *= inside
            continue
        pivot = factor.chol[i, i]
        lo = special.ndtr((lower[:, i] - shift) / pivot)
        hi = special.ndtr((upper[:, i] - shift) / pivot)
        value *= hi - lo
        if i < q - 1:
            u = lo + uniforms[:, i] * (hi - lo)
            y[:, i] = special.ndtri(np.clip(u, _UNIFORM_EPS, 1 - _UNIFORM_EPS))
    return value


def _exact_univariate(problem: MvtProblem) -> float:
    df = math.inf if problem.is_normal else problem.df
    lower, upper = float(problem.lower[0]), float(problem.upper[0])
    hi = 1.0 if math.isinf(upper) else t_cdf(upper, df)
    lo = 0.0 if math.isinf(lower) else t_cdf(lower, df)
    return min(1.0, max(0.0, hi - lo))


def _engines(d: int, seed: Optional[int]) -> Tuple[qmc.Sobol, ...]:
    children = np.random.SeedSequence(seed).spawn(RANDOMIZATIONS)
    return tuple(
        qmc.Sobol(d=d, scramble=True, seed=np.random.default_rng(child))
        for child in children
    )


def mvt_cdf_box(
    problem: MvtProblem,
    accuracy: float = 1e-4,
    seed: Optional[int] = None,
    *,
    strict: bool = False,
    threshold: Optional[float] = None,
) -> ProbEstimate:
    """Estimate ``P(lower <= T <= upper)`` for a central multivariate t or
    normal vector ``T``.

    Parameters
    ----------
    problem : `MvtProblem`
        Bounds, correlation and degrees of freedom.
    accuracy : `float`
        Target absolute error (three randomization standard errors).
    seed : `int`, optional
        Seed of the randomizations; a fixed seed gives a bit-identical
        result.
    strict : `bool`
        If `True`, raise instead of flagging when the sample cap is hit.
    threshold : `float`, optional
        If given, sampling also stops once the error interval lies
        entirely above or below ``threshold``. The estimate is then only
        good enough to compare against it.

    Returns
    -------
    estimate : `ProbEstimate`
        The probability with its error bound.

    Raises
    ------
    dunnettctp.errors.NotPSDError
        Raised if the correlation matrix cannot be repaired.
    dunnettctp.errors.AccuracyNotReachedError
        Raised in strict mode if the sample cap is hit first.
    """
    if problem.q == 1:
        return ProbEstimate(_exact_univariate(problem), 0.0, 0)

    corr = problem.corr.repaired()
    factor = _factorize(problem.lower, problem.upper, corr.values)
    if factor.singular.all():
        raise NotPSDError("correlation matrix has no positive pivot")
    df = 0.0 if problem.is_normal else problem.df
    d = problem.q - 1 + (1 if df > 0 else 0)

    engines = _engines(d, seed)
    sums = np.zeros(RANDOMIZATIONS)
    count = 0
    batch = 2**INITIAL_POINTS_LOG2
    while True:
        for r, engine in enumerate(engines):
            sums[r] += _integrand(engine.random(batch), factor, df).sum()
        count += batch
        estimates = sums / count
        value = float(estimates.mean())
        error = ERROR_FACTOR * float(
            estimates.std(ddof=1) / math.sqrt(RANDOMIZATIONS)
        )
        if error <= accuracy:
            converged = True
            break
        if threshold is not None and abs(value - threshold) > error:
            converged = True
            break
        if count >= 2**MAX_POINTS_LOG2:
            converged = False
            break
        batch = count

    value = min(1.0, max(0.0, value))
    n_samples = count * RANDOMIZATIONS
    if not converged:
        message = (
            f"accuracy {accuracy:.2g} not reached after {n_samples} points "
            f"(error {error:.2g})"
        )
        if strict:
            raise AccuracyNotReachedError(message)
        logger.warning("Multivariate t integration: %s", message)
    return ProbEstimate(value, error, n_samples, converged)


def equicoordinate_quantile(
    corr: CorrelationMatrix,
    df: float,
    level: float,
    two_sided: bool = False,
    *,
    seed: Optional[int] = None,
    accuracy: float = 1e-5,
    tolerance: float = 1e-4,
) -> float:
    """Find ``c`` with ``P(T <= c, all coordinates) = level`` or, two-sided,
    ``P(|T| <= c, all coordinates) = level``.

    The root is bracketed between the univariate and the Bonferroni
    quantiles and found by alternating secant and bisection steps. The
    integration accuracy is tightened as the bracket shrinks, down to
    ``accuracy``; all evaluations share one seed so the estimated
    probability is a smooth function of ``c``.

    Raises
    ------
    dunnettctp.errors.DomainError
        Raised if ``level`` is not in ``(0, 1)``.
    """
    if not 0 < level < 1:
        raise DomainError(f"level must be in (0, 1), got {level!r}")
    q = corr.q
    tdf = math.inf if df == 0 or math.isinf(df) else df
    if two_sided:
        lo = t_ppf(0.5 + 0.5 * level, tdf)
        hi = t_ppf(1.0 - 0.5 * (1.0 - level) / q, tdf)
    else:
        lo = t_ppf(level, tdf)
        hi = t_ppf(1.0 - (1.0 - level) / q, tdf)
    if q == 1:
        return lo
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1)[0])

    def excess(c: float, target: float) -> float:
        upper = np.full(q, c)
        lower = -upper if two_sided else np.full(q, -np.inf)
        problem = MvtProblem(lower, upper, corr, df)
        return mvt_cdf_box(problem, target, seed).value - level

    step = 0.5
    f_lo = excess(lo, 1e-3)
    while f_lo > 0:
        lo -= step
        f_lo = excess(lo, 1e-3)
    f_hi = excess(hi, 1e-3)
    while f_hi < 0:
        hi += step
        f_hi = excess(hi, 1e-3)

    for iteration in range(200):
        width = hi - lo
        if width <= tolerance:
            break
        target = max(accuracy, min(1e-3, 1e-2 * width))
        candidate = 0.5 * (lo + hi)
        if iteration % 2 == 0 and f_hi != f_lo:
            secant = hi - f_hi * width / (f_hi - f_lo)
            if lo + 0.05 * width < secant < hi - 0.05 * width:
                candidate = secant
        f_mid = excess(candidate, target)
        if f_mid < 0:
            lo, f_lo = candidate, f_mid
        else:
            hi, f_hi = candidate, f_mid
    return 0.5 * (lo + hi)
