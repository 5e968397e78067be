"""Contrast matrices for many-to-one and grand-mean comparisons, and the
correlation matrix they induce on the contrast t-statistics.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .design import ModelFit
from .errors import (
    ContrastError,
    DatasetError,
    DegenerateContrastError,
    EmptySubsetError,
    IndexOutOfRangeError,
    NotPSDError,
)

__all__ = [
    "ContrastKind",
    "ContrastMatrix",
    "CorrelationMatrix",
    "dunnett_contrasts",
    "grand_mean_contrasts",
    "pairwise_row",
    "custom_contrasts",
    "load_contrasts",
    "correlation",
]

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-12

PSD_TOLERANCE = 1e-10
"""Eigenvalues above ``-PSD_TOLERANCE`` count as nonnegative."""

REPAIR_LIMIT = 1e-6
"""Matrices with an eigenvalue below ``-REPAIR_LIMIT`` are not repaired."""


class ContrastKind(enum.Enum):
    DUNNETT = "dunnett"
    GRAND_MEAN = "grand-mean"
    PAIRWISE_ROW = "pairwise-row"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class ContrastMatrix:
    """Contrast coefficients with their metadata.

    Attributes
    ----------
    rows : `numpy.ndarray`
        ``(q, g)`` coefficients, one contrast per row.
    kind : `ContrastKind`
        How the matrix was built.
    active_set : `tuple` of `int`
        The treatments ``S`` the matrix targets.
    labels : `tuple` of `str`
        One comparison name per row.
    """

    rows: np.ndarray
    kind: ContrastKind
    active_set: Tuple[int, ...]
    labels: Tuple[str, ...]

    def __post_init__(self) -> None:
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if len(self.labels) != rows.shape[0]:
            raise ContrastError(
                f"{len(self.labels)} labels for {rows.shape[0]} rows"
            )
        sums = np.abs(rows.sum(axis=1))
        scale = np.maximum(1.0, np.abs(rows).sum(axis=1))
        if np.any(sums > ROW_SUM_TOLERANCE * scale):
            bad = int(np.argmax(sums))
            raise ContrastError(
                f"contrast row {self.labels[bad]!r} does not sum to zero"
            )
        if self.kind is ContrastKind.CUSTOM:
            return
        if np.any(np.all(rows == 0.0, axis=1)):
            raise ContrastError("a contrast row is identically zero")
        outside = np.ones(rows.shape[1], dtype=bool)
        outside[0] = False
        outside[list(self.active_set)] = False
        if np.any(rows[:, outside] != 0.0):
            raise ContrastError(
                "nonzero coefficient outside the active groups"
            )
        if len({tuple(r) for r in rows}) != rows.shape[0]:
            raise ContrastError("duplicate contrast rows")

    @property
    def q(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_groups(self) -> int:
        return int(self.rows.shape[1])

    def scaled(self, factors: Sequence[float]) -> ContrastMatrix:
        """Return a copy with each row multiplied by a positive factor."""
        return ContrastMatrix(
            rows=self.rows * np.asarray(factors, dtype=float)[:, None],
            kind=self.kind,
            active_set=self.active_set,
            labels=self.labels,
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "active_set": list(self.active_set),
            "rows": [
                {"label": label, "coefficients": [float(c) for c in row]}
                for label, row in zip(self.labels, self.rows)
            ],
        }


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Correlation matrix of a vector of contrast t-statistics."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.shape[0] != values.shape[1]:
            raise NotPSDError(f"correlation matrix shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NotPSDError("correlation matrix has non-finite entries")
        if not np.allclose(values, values.T, atol=1e-12):
            raise NotPSDError("correlation matrix is not symmetric")
        values = 0.5 * (values + values.T)
        np.fill_diagonal(values, 1.0)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def identity(cls, q: int) -> CorrelationMatrix:
        return cls(np.eye(q))

    @classmethod
    def equicorrelated(cls, q: int, rho: float) -> CorrelationMatrix:
        values = np.full((q, q), rho)
        np.fill_diagonal(values, 1.0)
        return cls(values)

    @property
    def q(self) -> int:
        return int(self.values.shape[0])

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.values)[0])

    def permuted(self, order: Sequence[int]) -> CorrelationMatrix:
        idx = np.asarray(order)
        return CorrelationMatrix(self.values[np.ix_(idx, idx)])

    def repaired(self) -> CorrelationMatrix:
        """Clip eigenvalues below the PSD tolerance to zero and rescale to
        unit diagonal.

        Raises
        ------
        dunnettctp.errors.NotPSDError
            Raised if an eigenvalue lies below ``-REPAIR_LIMIT``.
        """
        eigenvalues, vectors = np.linalg.eigh(self.values)
        if eigenvalues[0] >= -PSD_TOLERANCE:
            return self
        if eigenvalues[0] < -REPAIR_LIMIT:
            raise NotPSDError(
                f"smallest eigenvalue {eigenvalues[0]:.3g} is too negative "
                "to repair"
            )
        logger.debug(
            "Repairing correlation matrix, smallest eigenvalue %.3g",
            eigenvalues[0],
        )
        clipped = np.where(eigenvalues < PSD_TOLERANCE, 0.0, eigenvalues)
        values = (vectors * clipped) @ vectors.T
        scale = np.sqrt(np.diag(values))
        values = values / np.outer(scale, scale)
        return CorrelationMatrix(0.5 * (values + values.T))


def _active(g: int, active: Iterable[int]) -> Tuple[int, ...]:
    subset = tuple(sorted(set(int(i) for i in active)))
    if not subset:
        raise EmptySubsetError("the active subset is empty")
    for i in subset:
        if not 1 <= i <= g - 1:
            raise IndexOutOfRangeError(
                f"treatment index {i} outside 1..{g - 1}"
            )
    return subset


def _name(i: int, names: Optional[Sequence[str]]) -> str:
    return names[i] if names is not None else str(i)


def dunnett_contrasts(
    g: int, active: Iterable[int], names: Optional[Sequence[str]] = None
) -> ContrastMatrix:
    """Many-to-one contrasts, one row per treatment in ``active``.

    Rows are ordered by ascending treatment index; the row for ``i`` has
    -1 at the control and +1 at ``i``.
    """
    subset = _active(g, active)
    rows = np.zeros((len(subset), g))
    for row, i in enumerate(subset):
        rows[row, 0] = -1.0
        rows[row, i] = 1.0
    labels = tuple(f"{_name(i, names)} - {_name(0, names)}" for i in subset)
    return ContrastMatrix(rows, ContrastKind.DUNNETT, subset, labels)


def grand_mean_contrasts(
    g: int, active: Iterable[int], names: Optional[Sequence[str]] = None
) -> ContrastMatrix:
    """Each compared group against the mean of the other compared groups.

    The compared set is the control plus ``active`` (``m`` groups); the row
    for target ``t`` has -1 at ``t`` and ``1 / (m - 1)`` at every other
    compared group.
    """
    subset = _active(g, active)
    compared = (0,) + subset
    m = len(compared)
    rows = np.zeros((m, g))
    for row, target in enumerate(compared):
        rows[row, list(compared)] = 1.0 / (m - 1)
        rows[row, target] = -1.0
    members = ",".join(_name(i, names) for i in compared)
    labels = tuple(
        f"mean({members}) vs {_name(t, names)}" for t in compared
    )
    return ContrastMatrix(rows, ContrastKind.GRAND_MEAN, subset, labels)


def pairwise_row(
    g: int, i: int, names: Optional[Sequence[str]] = None
) -> ContrastMatrix:
    """Single treatment-minus-control contrast for a ``g``-group design.

    Raises
    ------
    dunnettctp.errors.IndexOutOfRangeError
        Raised if ``i`` is not in ``1..g-1``.
    """
    if not 1 <= i <= g - 1:
        raise IndexOutOfRangeError(f"treatment index {i} outside 1..{g - 1}")
    rows = np.zeros((1, g))
    rows[0, 0] = -1.0
    rows[0, i] = 1.0
    label = f"{_name(i, names)} - {_name(0, names)}"
    return ContrastMatrix(rows, ContrastKind.PAIRWISE_ROW, (i,), (label,))


def custom_contrasts(
    rows: Sequence[Sequence[float]], labels: Optional[Sequence[str]] = None
) -> ContrastMatrix:
    """User-supplied contrasts, validated only for zero row sums."""
    array = np.atleast_2d(np.asarray(rows, dtype=float))
    if labels is None:
        labels = [f"c{i + 1}" for i in range(array.shape[0])]
    active = tuple(
        int(j) for j in np.flatnonzero(np.any(array != 0.0, axis=0)) if j > 0
    )
    return ContrastMatrix(array, ContrastKind.CUSTOM, active, tuple(labels))


def load_contrasts(path: Path, n_groups: int) -> ContrastMatrix:
    """Read a contrast CSV: one row per contrast, one column per group and
    an optional ``label`` column.
    """
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as e:
        raise DatasetError(f"cannot read contrast file {path}: {e}")
    labels = None
    if "label" in frame.columns:
        labels = [str(x) for x in frame.pop("label")]
    if frame.shape[1] != n_groups:
        raise ContrastError(
            f"contrast file has {frame.shape[1]} coefficient columns, "
            f"expected {n_groups}"
        )
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as e:
        raise DatasetError(f"non-numeric contrast coefficient: {e}")
    return custom_contrasts(values, labels)


def correlation(contrasts: ContrastMatrix, fit: ModelFit) -> CorrelationMatrix:
    """Correlation of the contrast t-statistics under the fitted model.

    ``R[q, r] = c_q' V c_r / sqrt(c_q' V c_q * c_r' V c_r)``.

    Raises
    ------
    dunnettctp.errors.DegenerateContrastError
        Raised if a contrast has ``c' V c <= 0``.
    """
    if contrasts.n_groups != fit.n_groups:
        raise ContrastError(
            f"contrast matrix has {contrasts.n_groups} columns, fit has "
            f"{fit.n_groups} groups"
        )
    c = contrasts.rows
    cov = c @ fit.covariance_scale @ c.T
    variances = np.diag(cov).copy()
    if np.any(variances <= 0.0):
        bad = int(np.argmin(variances))
        raise DegenerateContrastError(
            f"contrast {contrasts.labels[bad]!r} has zero variance"
        )
    values = cov / np.sqrt(np.outer(variances, variances))
    values = 0.5 * (values + values.T)
    np.fill_diagonal(values, 1.0)
    return CorrelationMatrix(values)
