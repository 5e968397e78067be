"""Data model and least-squares estimation for the one-way layout with an
optional additive block factor.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    DatasetError,
    EmptyGroupError,
    RankDeficientError,
    ZeroResidualDfError,
)

__all__ = [
    "Record",
    "Dataset",
    "ModelFit",
    "GroupSummary",
    "fit_one_way",
    "fit_additive",
    "fit",
    "summarize",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Record:
    """A single observation.

    Group 0 is the control by convention.
    """

    group: int
    response: float
    block: Optional[str] = None


@dataclass(frozen=True)
class Dataset:
    """An immutable collection of observations.

    Parameters
    ----------
    records : `tuple` of `Record`
        The observations.
    labels : `tuple` of `str`, optional
        Display names of the groups, indexed by group. Defaults to the
        group indices as strings.
    """

    records: Tuple[Record, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        with_block = 0
        for position, record in enumerate(self.records):
            if record.group < 0:
                raise DatasetError(
                    f"record {position}: negative group index {record.group}"
                )
            if not math.isfinite(record.response):
                raise DatasetError(
                    f"record {position}: response {record.response!r} "
                    "is not finite"
                )
            if record.block is not None:
                with_block += 1
        if 0 < with_block < len(self.records):
            raise DatasetError(
                "either every record or no record must carry a block level"
            )
        if not self.labels:
            labels = tuple(str(i) for i in range(self.n_groups))
            object.__setattr__(self, "labels", labels)
        elif len(self.labels) < self.n_groups:
            raise DatasetError(
                f"{len(self.labels)} labels given for {self.n_groups} groups"
            )

    @classmethod
    def from_arrays(
        cls,
        groups: Sequence[int],
        responses: Sequence[float],
        blocks: Optional[Sequence[str]] = None,
        labels: Sequence[str] = (),
    ) -> Dataset:
        """Build a dataset from parallel sequences."""
        if len(groups) != len(responses):
            raise DatasetError("groups and responses differ in length")
        if blocks is None:
            records = tuple(
                Record(int(g), float(y)) for g, y in zip(groups, responses)
            )
        else:
            if len(blocks) != len(groups):
                raise DatasetError("blocks and groups differ in length")
            records = tuple(
                Record(int(g), float(y), str(b))
                for g, y, b in zip(groups, responses, blocks)
            )
        return cls(records=records, labels=tuple(labels))

    @property
    def n_groups(self) -> int:
        """Number of groups ``g = k + 1`` implied by the largest index."""
        if not self.records:
            return 0
        return max(r.group for r in self.records) + 1

    @property
    def has_blocks(self) -> bool:
        return bool(self.records) and self.records[0].block is not None

    @property
    def groups(self) -> np.ndarray:
        return np.array([r.group for r in self.records], dtype=int)

    @property
    def responses(self) -> np.ndarray:
        return np.array([r.response for r in self.records], dtype=float)

    @property
    def block_levels(self) -> Tuple[str, ...]:
        """Block levels sorted; the first level is the reference."""
        if not self.has_blocks:
            return ()
        return tuple(sorted({str(r.block) for r in self.records}))

    def group_responses(self, group: int) -> List[float]:
        return [r.response for r in self.records if r.group == group]

    def subset(self, groups: Sequence[int]) -> Dataset:
        """Restrict the dataset to ``groups`` and relabel them ``0..m-1``
        in the given order.
        """
        mapping = {g: i for i, g in enumerate(groups)}
        records = tuple(
            Record(mapping[r.group], r.response, r.block)
            for r in self.records
            if r.group in mapping
        )
        labels = tuple(self.labels[g] for g in groups)
        return Dataset(records=records, labels=labels)


@dataclass(frozen=True, eq=False)
class ModelFit:
    """Least-squares summaries consumed by every test.

    Attributes
    ----------
    n_groups : `int`
        Number of groups ``g = k + 1``.
    n : `numpy.ndarray`
        Per-group sample sizes.
    means : `numpy.ndarray`
        Per-group (adjusted) mean estimates.
    s2 : `float`
        Pooled residual variance.
    df : `int`
        Residual degrees of freedom.
    covariance_scale : `numpy.ndarray`
        ``(g, g)`` matrix ``V`` with ``Cov(means) = s2 * V``.
    model : `str`
        ``"one-way"`` or ``"additive"``.
    data : `Dataset`, optional
        The data the model was fitted to. Used for subset refits; not part
        of equality.
    """

    n_groups: int
    n: np.ndarray
    means: np.ndarray
    s2: float
    df: int
    covariance_scale: np.ndarray
    model: str = "one-way"
    data: Optional[Dataset] = field(default=None, repr=False)

    @property
    def k(self) -> int:
        """Number of treatments compared with the control."""
        return self.n_groups - 1

    @property
    def labels(self) -> Tuple[str, ...]:
        if self.data is not None:
            return self.data.labels[: self.n_groups]
        return tuple(str(i) for i in range(self.n_groups))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelFit):
            return NotImplemented
        return (
            self.n_groups == other.n_groups
            and self.model == other.model
            and self.df == other.df
            and self.s2 == other.s2
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.means, other.means)
            and np.array_equal(self.covariance_scale, other.covariance_scale)
        )

    def refit(self, groups: Sequence[int]) -> ModelFit:
        """Fit the same model family to the data of ``groups`` only."""
        if self.data is None:
            raise DatasetError("the fit carries no data to refit")
        sub = self.data.subset(groups)
        if self.model == "additive":
            return fit_additive(sub)
        return fit_one_way(sub)

    def to_dict(self) -> Dict[str, object]:
        return {
            "model": self.model,
            "groups": list(self.labels),
            "n": [int(x) for x in self.n],
            "means": [float(x) for x in self.means],
            "s2": float(self.s2),
            "df": int(self.df),
        }


@dataclass(frozen=True)
class GroupSummary:
    """Raw per-group summary statistics."""

    group: int
    label: str
    n: int
    mean: float
    sd: float
    sd_defined: bool = True


def _check_groups(data: Dataset) -> np.ndarray:
    g = data.n_groups
    counts = np.bincount(data.groups, minlength=g) if g else np.zeros(0)
    for group, count in enumerate(counts):
        if count == 0:
            raise EmptyGroupError(group)
    return counts.astype(int)


def fit_one_way(data: Dataset) -> ModelFit:
    """Fit the one-way layout ``y_ij = mu_i + e_ij``.

    Parameters
    ----------
    data : `Dataset`
        Observations; a block factor, if present, is ignored.

    Returns
    -------
    fit : `ModelFit`
        Group sample means, pooled variance on ``N - g`` degrees of freedom
        and ``V = diag(1 / n_i)``.

    Raises
    ------
    dunnettctp.errors.EmptyGroupError
        Raised if a group index in ``0..k`` has no observations.
    dunnettctp.errors.ZeroResidualDfError
        Raised if ``N <= g``.
    """
    if data.n_groups == 0:
        raise ZeroResidualDfError("the dataset is empty")
    counts = _check_groups(data)
    g = data.n_groups
    total = len(data.records)
    df = total - g
    if df < 1:
        raise ZeroResidualDfError(
            f"{total} observations leave no residual df for {g} groups"
        )

    # fsum makes every sum independent of record order
    means = np.empty(g)
    within = []
    for group in range(g):
        values = data.group_responses(group)
        mean = math.fsum(values) / len(values)
        means[group] = mean
        within.extend((y - mean) ** 2 for y in values)
    ss = math.fsum(within)

    return ModelFit(
        n_groups=g,
        n=counts,
        means=means,
        s2=ss / df,
        df=df,
        covariance_scale=np.diag(1.0 / counts),
        model="one-way",
        data=data,
    )


def fit_additive(data: Dataset) -> ModelFit:
    """Fit ``response ~ group + block`` without interaction.

    Treatment coding is used with group 0 and the first (sorted) block level
    as references. Adjusted group means are evaluated at equal block
    weights.

    Parameters
    ----------
    data : `Dataset`
        Observations carrying a block level.

    Returns
    -------
    fit : `ModelFit`
        Adjusted means ``L beta``, residual variance on
        ``N - g - (b - 1)`` degrees of freedom and
        ``V = L (X'X)^-1 L'``. A single block level gives exactly the
        `fit_one_way` result.

    Raises
    ------
    dunnettctp.errors.RankDeficientError
        Raised if groups and blocks are confounded.
    dunnettctp.errors.EmptyGroupError
        Raised if a group index in ``0..k`` has no observations.
    """
    if not data.has_blocks:
        raise DatasetError("fit_additive requires a block factor")
    levels = data.block_levels
    if len(levels) < 2:
        return fit_one_way(data)

    counts = _check_groups(data)
    g = data.n_groups
    b = len(levels)
    total = len(data.records)
    p = g + b - 1
    df = total - p
    if df < 1:
        raise ZeroResidualDfError(
            f"{total} observations leave no residual df for {p} parameters"
        )

    # canonical row order makes the fit independent of record order
    records = sorted(
        data.records, key=lambda r: (r.group, str(r.block), r.response)
    )
    level_index = {level: i for i, level in enumerate(levels)}
    design = np.zeros((total, p))
    design[:, 0] = 1.0
    for row, record in enumerate(records):
        if record.group > 0:
            design[row, record.group] = 1.0
        level = level_index[str(record.block)]
        if level > 0:
            design[row, g + level - 1] = 1.0
    y = np.array([r.response for r in records], dtype=float)

    rank = np.linalg.matrix_rank(design)
    if rank < p:
        raise RankDeficientError(
            f"design matrix has rank {rank} < {p}; group and block are "
            "confounded"
        )

    q, r = scipy.linalg.qr(design, mode="economic")
    beta = scipy.linalg.solve_triangular(r, q.T @ y)
    residuals = y - design @ beta
    s2 = float(residuals @ residuals) / df
    r_inv = scipy.linalg.solve_triangular(r, np.eye(p))
    xtx_inv = r_inv @ r_inv.T

    # Reference grid: each group at equal block weights
    grid = np.zeros((g, p))
    grid[:, 0] = 1.0
    for group in range(1, g):
        grid[group, group] = 1.0
    grid[:, g:] = 1.0 / b
    means = grid @ beta
    v = grid @ xtx_inv @ grid.T
    v = 0.5 * (v + v.T)

    logger.debug(
        "Additive fit: %d groups, %d block levels, df=%d", g, b, df
    )
    return ModelFit(
        n_groups=g,
        n=counts,
        means=means,
        s2=s2,
        df=df,
        covariance_scale=v,
        model="additive",
        data=data,
    )


def fit(data: Dataset) -> ModelFit:
    """Fit the additive model when the data carry blocks, else the one-way
    layout.
    """
    if data.has_blocks:
        return fit_additive(data)
    return fit_one_way(data)


def summarize(data: Dataset) -> List[GroupSummary]:
    """Per-group sample size, mean and standard deviation, ordered by group
    index. Groups without observations are omitted.
    """
    summaries = []
    for group in range(data.n_groups):
        values = data.group_responses(group)
        if not values:
            continue
        n = len(values)
        mean = math.fsum(values) / n
        if n > 1:
            var = math.fsum((y - mean) ** 2 for y in values) / (n - 1)
            sd, defined = math.sqrt(var), True
        else:
            sd, defined = 0.0, False
        summaries.append(
            GroupSummary(
                group=group,
                label=data.labels[group],
                n=n,
                mean=mean,
                sd=sd,
                sd_defined=defined,
            )
        )
    return summaries
