"""Monte Carlo estimation of familywise error rates and power."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import config
from .closure import ClosureMethod, run_closure
from .design import Dataset, fit_one_way
from .errors import DunnettCtpError
from .scenarios import Scenario

__all__ = [
    "DEFAULT_METHODS",
    "MethodRates",
    "PowerReport",
    "simulate",
    "draw_dataset",
]

logger = logging.getLogger(__name__)

DEFAULT_METHODS: Tuple[ClosureMethod, ...] = (
    ClosureMethod.DUNNETT,
    ClosureMethod.CTP_DU,
    ClosureMethod.CTP_F,
    ClosureMethod.CTP_GM,
)
"""Procedures in the column order of the power tables."""


def _se(rate: float, runs: int) -> float:
    if runs == 0 or math.isnan(rate):
        return math.nan
    return math.sqrt(rate * (1.0 - rate) / runs)


def _rate(count: int, runs: int) -> float:
    return count / runs if runs else math.nan


@dataclass(frozen=True)
class MethodRates:
    """Rejection counts of one procedure over the completed runs."""

    method: ClosureMethod
    runs: int
    pair_counts: Tuple[int, ...]
    any_count: int
    fwer_count: int

    @property
    def per_pair(self) -> Tuple[float, ...]:
        return tuple(_rate(c, self.runs) for c in self.pair_counts)

    @property
    def per_pair_se(self) -> Tuple[float, ...]:
        return tuple(_se(rate, self.runs) for rate in self.per_pair)

    @property
    def any_pair(self) -> float:
        return _rate(self.any_count, self.runs)

    @property
    def any_pair_se(self) -> float:
        return _se(self.any_pair, self.runs)

    @property
    def fwer(self) -> float:
        """Rate of runs rejecting at least one true null hypothesis."""
        return _rate(self.fwer_count, self.runs)

    @property
    def fwer_se(self) -> float:
        return _se(self.fwer, self.runs)


@dataclass(frozen=True)
class PowerReport:
    """Simulation results of one scenario.

    Attributes
    ----------
    scenario : `Scenario`
        The simulated design.
    methods : `tuple` of `MethodRates`
        Results per procedure, in the requested order.
    runs : `int`
        Completed runs.
    failures : `int`
        Runs aborted by a numerical or data error.
    """

    scenario: Scenario
    methods: Tuple[MethodRates, ...]
    runs: int
    failures: int = 0

    @property
    def fwer_type(self) -> str:
        return self.scenario.fwer_type

    def rates(self, method: ClosureMethod) -> MethodRates:
        for rates in self.methods:
            if rates.method is method:
                return rates
        raise KeyError(method)

    def has(self, method: ClosureMethod) -> bool:
        return any(rates.method is method for rates in self.methods)


@dataclass
class _Tally:
    """Integer counts accumulated over a block of runs."""

    k: int
    methods: Tuple[ClosureMethod, ...]
    runs: int = 0
    failures: int = 0
    pairs: Dict[ClosureMethod, List[int]] = field(default_factory=dict)
    any: Dict[ClosureMethod, int] = field(default_factory=dict)
    fwer: Dict[ClosureMethod, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for method in self.methods:
            self.pairs.setdefault(method, [0] * self.k)
            self.any.setdefault(method, 0)
            self.fwer.setdefault(method, 0)

    def merge(self, other: _Tally) -> None:
        self.runs += other.runs
        self.failures += other.failures
        for method in self.methods:
            self.pairs[method] = [
                a + b for a, b in zip(self.pairs[method], other.pairs[method])
            ]
            self.any[method] += other.any[method]
            self.fwer[method] += other.fwer[method]


def _run_streams(
    scenario: Scenario, index: int
) -> Tuple[np.random.Generator, int]:
    data_stream, integration_stream = np.random.SeedSequence(
        scenario.seed, spawn_key=(index,)
    ).spawn(2)
    seed = int(integration_stream.generate_state(1)[0])
    return np.random.default_rng(data_stream), seed


def draw_dataset(scenario: Scenario, rng: np.random.Generator) -> Dataset:
    """Draw normal responses for every group of a scenario.

    Group ``i`` is drawn with ``scenario.error_sd[i]``: its own ``sd``, or
    the common ``sigma`` when the scenario sets one.
    """
    groups: List[int] = []
    responses: List[float] = []
    for group, (n, mu, sd) in enumerate(
        zip(scenario.n, scenario.mu, scenario.error_sd)
    ):
        groups.extend([group] * n)
        responses.extend(rng.normal(mu, sd, size=n).tolist())
    return Dataset.from_arrays(groups, responses)


def _run_block(
    scenario: Scenario,
    methods: Tuple[ClosureMethod, ...],
    indices: Sequence[int],
    accuracy: float,
) -> _Tally:
    tally = _Tally(k=scenario.k, methods=methods)
    true_nulls = set(scenario.true_nulls)
    for index in indices:
        rng, seed = _run_streams(scenario, index)
        try:
            fit = fit_one_way(draw_dataset(scenario, rng))
            results = [
                run_closure(
                    fit,
                    method,
                    scenario.side,
                    seed,
                    alpha=scenario.alpha,
                    accuracy=accuracy,
                    decide_at=scenario.alpha,
                )
                for method in methods
            ]
        except DunnettCtpError as e:
            logger.warning(
                "Run %d of scenario %s failed: %s", index, scenario.name, e
            )
            tally.failures += 1
            continue
        tally.runs += 1
        for method, result in zip(methods, results):
            for i in result.rejected:
                tally.pairs[method][i - 1] += 1
            if result.rejected:
                tally.any[method] += 1
            if true_nulls.intersection(result.rejected):
                tally.fwer[method] += 1
    return tally


def _blocks(runs: int, workers: int) -> List[range]:
    size = max(1, math.ceil(runs / (4 * workers)))
    return [
        range(start, min(runs, start + size))
        for start in range(0, runs, size)
    ]


def simulate(
    scenario: Scenario,
    methods: Iterable[ClosureMethod] = DEFAULT_METHODS,
    *,
    accuracy: Optional[float] = None,
    workers: int = 1,
    logger: Optional[logging.Logger] = None,
) -> PowerReport:
    """Estimate rejection rates of several procedures on simulated data.

    Every run draws one dataset from the scenario and applies each
    procedure to the same data. Run ``i`` takes its random streams from
    the scenario seed and ``i`` alone, so results do not depend on
    ``workers``.

    Parameters
    ----------
    scenario : `Scenario`
        Design, true means and standard deviations, level and run count.
    methods : iterable of `ClosureMethod`
        Procedures to evaluate.
    accuracy : `float`, optional
        Integration accuracy of multivariate t p-values. Defaults to
        `dunnettctp.config.simulation_accuracy`.
    workers : `int`
        Worker processes.
    logger : `logging.Logger`, optional
        Logger for progress messages.

    Returns
    -------
    report : `PowerReport`
        Per-pair, any-pair and familywise rejection rates.
    """
    logger = logger or logging.getLogger(__name__)
    methods = tuple(methods)
    accuracy = config.simulation_accuracy if accuracy is None else accuracy

    total = _Tally(k=scenario.k, methods=methods)
    if workers > 1:
        blocks = _blocks(scenario.runs, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, scenario, methods, block, accuracy)
                for block in blocks
            ]
            for future in futures:
                total.merge(future.result())
    else:
        total.merge(
            _run_block(scenario, methods, range(scenario.runs), accuracy)
        )

    if total.failures:
        logger.warning(
            "Scenario %s: %d of %d runs failed",
            scenario.name,
            total.failures,
            scenario.runs,
        )
    logger.info(
        "Scenario %s finished: %d runs (%s)",
        scenario.name,
        total.runs,
        scenario.fwer_type,
    )
    return PowerReport(
        scenario=scenario,
        methods=tuple(
            MethodRates(
                method=method,
                runs=total.runs,
                pair_counts=tuple(total.pairs[method]),
                any_count=total.any[method],
                fwer_count=total.fwer[method],
            )
            for method in methods
        ),
        runs=total.runs,
        failures=total.failures,
    )
