"""Closed testing over the complete family of many-to-one intersection
hypotheses.

Every nonempty subset ``S`` of the treatments ``1..k`` names the
intersection hypothesis ``mu_0 = mu_i`` for all ``i`` in ``S``. Each node
gets a local p-value from the method's marginal test; the closed-test
adjusted p-value of treatment ``i`` is the largest local p-value among
the nodes containing ``i``.
"""

from __future__ import annotations

import enum
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import config
from .contrasts import dunnett_contrasts, grand_mean_contrasts
from .design import ModelFit
from .errors import EmptySubsetError, ReportSchemaError, TooManyGroupsError
from .marginal import (
    DenominatorScope,
    DfMode,
    ElementaryMode,
    Sidedness,
    TestMethod,
    TestResult,
    anova_f,
    mct_maxtest,
    two_sample_t,
)

__all__ = [
    "ClosureMethod",
    "HypothesisNode",
    "ClosureResult",
    "run_closure",
    "dunnett_single_step",
    "node_seed",
]

HARD_GROUP_LIMIT = 20
"""Largest ``k`` ever enumerated, whatever the configuration says."""

COST_WARNING_GROUPS = 10


class ClosureMethod(enum.Enum):
    """Multiple comparison procedures for many-to-one comparisons."""

    DUNNETT = "dunnett"
    CTP_DU = "ctp-du"
    CTP_F = "ctp-f"
    CTP_GM = "ctp-gm"

    @property
    def code(self) -> str:
        """One-letter code used in simulation tables."""
        return _CODES[self]


_CODES = {
    ClosureMethod.DUNNETT: "D",
    ClosureMethod.CTP_DU: "N",
    ClosureMethod.CTP_F: "C",
    ClosureMethod.CTP_GM: "W",
}


@dataclass(frozen=True)
class HypothesisNode:
    """An intersection hypothesis with its local test."""

    subset: Tuple[int, ...]
    local_p: float
    test: Optional[TestResult] = None

    def contains(self, i: int) -> bool:
        return i in self.subset


@dataclass(frozen=True)
class ClosureResult:
    """Local and adjusted p-values of one procedure.

    Attributes
    ----------
    method : `ClosureMethod`
        The procedure.
    side : `Sidedness`
        Direction of the alternatives actually tested.
    labels : `tuple` of `str`
        Group labels, control first.
    nodes : `tuple` of `HypothesisNode`
        Nodes ordered by subset size, then lexicographically.
    adjusted : `tuple` of `float`
        Adjusted p-value of each treatment ``1..k``, in that order.
    alpha : `float`, optional
        Level at which ``rejected`` was determined.
    rejected : `tuple` of `int`
        Treatments with adjusted p-value strictly below ``alpha``.
    """

    method: ClosureMethod
    side: Sidedness
    labels: Tuple[str, ...]
    nodes: Tuple[HypothesisNode, ...]
    adjusted: Tuple[float, ...]
    alpha: Optional[float] = None
    rejected: Tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.labels) - 1

    def comparison(self, i: int) -> str:
        return f"{self.labels[i]} - {self.labels[0]}"

    def node(self, subset: Sequence[int]) -> HypothesisNode:
        key = tuple(sorted(subset))
        for node in self.nodes:
            if node.subset == key:
                return node
        raise KeyError(key)

    def node_adjusted(self, subset: Sequence[int]) -> float:
        """Largest local p-value among the nodes containing ``subset``."""
        key = set(subset)
        return max(
            node.local_p for node in self.nodes if key <= set(node.subset)
        )

    def rejected_nodes(self) -> Tuple[Tuple[int, ...], ...]:
        """Subsets rejected by the closed test at ``alpha``."""
        if self.alpha is None:
            return ()
        alpha = self.alpha
        return tuple(
            node.subset
            for node in self.nodes
            if self.node_adjusted(node.subset) < alpha
        )

    def with_alpha(self, alpha: float) -> ClosureResult:
        """Return a copy with the rejection set at level ``alpha``."""
        rejected = tuple(
            i for i, p in enumerate(self.adjusted, start=1) if p < alpha
        )
        return replace(self, alpha=alpha, rejected=rejected)

    def is_coherent(self, alpha: Optional[float] = None) -> bool:
        """Check that every rejected treatment has all its containing nodes
        locally significant.
        """
        level = self.alpha if alpha is None else alpha
        if level is None:
            return True
        for i, p in enumerate(self.adjusted, start=1):
            if p >= level:
                continue
            if any(
                node.local_p >= level
                for node in self.nodes
                if node.contains(i)
            ):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        nodes = []
        for node in self.nodes:
            entry: Dict[str, Any] = {
                "subset": list(node.subset),
                "p": node.local_p,
            }
            if node.test is not None:
                entry["test"] = node.test.to_dict()
            nodes.append(entry)
        return {
            "method": self.method.value,
            "side": self.side.value,
            "labels": list(self.labels),
            "alpha": self.alpha,
            "adjusted": [
                {"treatment": i, "comparison": self.comparison(i), "p": p}
                for i, p in enumerate(self.adjusted, start=1)
            ],
            "rejected": list(self.rejected),
            "nodes": nodes,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ClosureResult:
        """Rebuild a result from its `to_dict` form.

        Node tests are not restored; adjusted p-values and the rejection
        set are recomputed from the node p-values.

        Raises
        ------
        dunnettctp.errors.ReportSchemaError
            Raised if a required key is missing or malformed.
        """
        try:
            method = ClosureMethod(data["method"])
            side = Sidedness(data["side"])
            labels = tuple(str(x) for x in data["labels"])
            nodes = tuple(
                HypothesisNode(
                    subset=tuple(int(i) for i in entry["subset"]),
                    local_p=float(entry["p"]),
                )
                for entry in data["nodes"]
            )
            alpha = data.get("alpha")
            alpha = None if alpha is None else float(alpha)
        except (KeyError, TypeError, ValueError) as e:
            raise ReportSchemaError(f"malformed closure result: {e!r}")
        if not nodes:
            raise ReportSchemaError("closure result has no nodes")
        result = cls(
            method=method,
            side=side,
            labels=labels,
            nodes=nodes,
            adjusted=_adjusted(nodes, len(labels) - 1),
        )
        return result if alpha is None else result.with_alpha(alpha)


def node_seed(seed: int, subset: Sequence[int]) -> int:
    """Seed of a node's integration, derived from the master seed and the
    subset only.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(subset))
    return int(sequence.generate_state(1)[0])


def _lattice(k: int) -> List[Tuple[int, ...]]:
    treatments = range(1, k + 1)
    return [
        subset
        for size in range(1, k + 1)
        for subset in itertools.combinations(treatments, size)
    ]


def _adjusted(
    nodes: Sequence[HypothesisNode], k: int
) -> Tuple[float, ...]:
    adjusted = []
    for i in range(1, k + 1):
        containing = [node.local_p for node in nodes if node.contains(i)]
        if not containing:
            raise ReportSchemaError(f"no node contains treatment {i}")
        adjusted.append(max(containing))
    return tuple(adjusted)


def _check_size(k: int) -> None:
    if k < 1:
        raise EmptySubsetError("the design has no treatment group")
    limit = min(config.max_groups, HARD_GROUP_LIMIT)
    if k > limit:
        raise TooManyGroupsError(
            f"{k} treatments exceed the closure limit of {limit}"
        )


def run_closure(
    fit: ModelFit,
    method: ClosureMethod,
    side: Sidedness = Sidedness.TWO_SIDED,
    seed: Optional[int] = None,
    *,
    alpha: Optional[float] = None,
    accuracy: Optional[float] = None,
    decide_at: Optional[float] = None,
    elementary_mode: ElementaryMode = ElementaryMode.PAIRWISE_FULL_DF,
    denominator: DenominatorScope = DenominatorScope.SUBSET_REFIT,
    workers: int = 1,
    logger: Optional[logging.Logger] = None,
) -> ClosureResult:
    """Run a closed testing procedure on a fitted model.

    Parameters
    ----------
    fit : `ModelFit`
        The fitted model; group 0 is the control.
    method : `ClosureMethod`
        ``CTP_DU`` tests intersections with the many-to-one max-test and
        single treatments with the pooled two-sample t-test; ``CTP_GM``
        uses grand-mean max-tests at every node; ``CTP_F`` uses subset
        F-tests. ``DUNNETT`` delegates to `dunnett_single_step`.
    side : `Sidedness`
        Direction of the alternatives. F-tests are always two-sided.
    seed : `int`, optional
        Master seed; node seeds derive from it and the node's subset.
    alpha : `float`, optional
        If given, the rejection set at this level is recorded.
    accuracy : `float`, optional
        Integration accuracy of max-tests.
    decide_at : `float`, optional
        Stop max-test integrations once each p-value is known to lie
        above or below this level. Rejections at that level stay exact
        while the reported p-values become coarse.
    elementary_mode : `ElementaryMode`
        Single-treatment test of the F-test closure.
    denominator : `DenominatorScope`
        Residual variance of subset F-tests.
    workers : `int`
        Threads used to evaluate nodes; results do not depend on it.
    logger : `logging.Logger`, optional
        Logger for warnings.

    Raises
    ------
    dunnettctp.errors.TooManyGroupsError
        Raised if ``k`` exceeds the enumeration limit.
    """
    logger = logger or logging.getLogger(__name__)
    if method is ClosureMethod.DUNNETT:
        return dunnett_single_step(
            fit,
            side,
            seed,
            alpha=alpha,
            accuracy=accuracy,
            decide_at=decide_at,
        )
    k = fit.k
    _check_size(k)
    if k > COST_WARNING_GROUPS:
        logger.warning(
            "Enumerating %d intersection hypotheses for k=%d", 2**k - 1, k
        )
    if method is ClosureMethod.CTP_F and side is not Sidedness.TWO_SIDED:
        logger.warning(
            "The F-test closure is two-sided; ignoring side=%s", side.value
        )
        side = Sidedness.TWO_SIDED
    seed = config.seed if seed is None else seed
    labels = fit.labels
    g = fit.n_groups

    def evaluate(subset: Tuple[int, ...]) -> HypothesisNode:
        name = ",".join(labels[i] for i in subset)
        if method is ClosureMethod.CTP_F:
            test = anova_f(subset, fit, elementary_mode, denominator)
        elif method is ClosureMethod.CTP_DU and len(subset) == 1:
            test = two_sample_t(subset[0], fit, side, DfMode.POOLED_FULL)
        else:
            if method is ClosureMethod.CTP_DU:
                contrasts = dunnett_contrasts(g, subset, labels)
            else:
                contrasts = grand_mean_contrasts(g, subset, labels)
            test = mct_maxtest(
                contrasts,
                fit,
                side,
                node_seed(seed, subset),
                accuracy=accuracy,
                per_row=False,
                decide_at=decide_at,
                label=name,
            )
        return HypothesisNode(subset=subset, local_p=test.p, test=test)

    subsets = _lattice(k)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            nodes = tuple(pool.map(evaluate, subsets))
    else:
        nodes = tuple(evaluate(subset) for subset in subsets)

    result = ClosureResult(
        method=method,
        side=side,
        labels=labels,
        nodes=nodes,
        adjusted=_adjusted(nodes, k),
    )
    return result if alpha is None else result.with_alpha(alpha)


def dunnett_single_step(
    fit: ModelFit,
    side: Sidedness = Sidedness.TWO_SIDED,
    seed: Optional[int] = None,
    *,
    alpha: Optional[float] = None,
    accuracy: Optional[float] = None,
    decide_at: Optional[float] = None,
) -> ClosureResult:
    """Classical single-step Dunnett procedure.

    Adjusted p-values are the per-row adjusted p-values of the max-test on
    the full many-to-one contrast matrix, stored as one singleton node per
    treatment.
    """
    k = fit.k
    _check_size(k)
    labels = fit.labels
    contrasts = dunnett_contrasts(fit.n_groups, range(1, k + 1), labels)
    test = mct_maxtest(
        contrasts,
        fit,
        side,
        seed,
        accuracy=accuracy,
        decide_at=decide_at,
        label="all",
    )
    nodes = tuple(
        HypothesisNode(
            subset=(i,),
            local_p=row.p_adjusted,
            test=TestResult(
                p=row.p_adjusted,
                statistic=row.t,
                df_used=test.df_used,
                method=TestMethod.MCT_DUNNETT,
                per_row=(row,),
                zero_variance=test.zero_variance,
                abs_error=test.abs_error,
                label=row.label,
            ),
        )
        for i, row in zip(range(1, k + 1), test.per_row)
    )
    result = ClosureResult(
        method=ClosureMethod.DUNNETT,
        side=side,
        labels=labels,
        nodes=nodes,
        adjusted=tuple(node.local_p for node in nodes),
    )
    return result if alpha is None else result.with_alpha(alpha)
