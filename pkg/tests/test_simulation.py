"""Tests for the simulation module."""

from dataclasses import replace

import numpy as np
import pytest

from dunnettctp.closure import ClosureMethod
from dunnettctp.scenarios import Scenario, bundled_table6
from dunnettctp.simulation import DEFAULT_METHODS, draw_dataset, simulate


@pytest.fixture
def small_scenario():
    return Scenario(
        n=(5, 5, 5),
        mu=(0.0, 0.0, 3.0),
        sd=(1.0, 1.0, 1.0),
        runs=12,
        seed=11,
        name="small",
    )


def test_draw_dataset(small_scenario):
    data = draw_dataset(small_scenario, np.random.default_rng(0))
    assert data.n_groups == 3
    assert len(data.records) == 15


def test_draw_dataset_with_common_sd():
    scenario = Scenario(
        n=(200, 200),
        mu=(0.0, 0.0),
        sd=(1.0, 100.0),
        sigma=1.0,
        runs=1,
    )
    common = draw_dataset(scenario, np.random.default_rng(3))
    assert np.std(common.group_responses(1), ddof=1) < 2.0

    separate = draw_dataset(
        replace(scenario, sigma=None), np.random.default_rng(3)
    )
    assert np.std(separate.group_responses(1), ddof=1) > 50.0


def test_simulate_counts(small_scenario):
    report = simulate(small_scenario)
    assert report.runs == 12
    assert report.failures == 0
    assert report.fwer_type == "strong"
    assert [r.method for r in report.methods] == list(DEFAULT_METHODS)
    for rates in report.methods:
        assert all(0.0 <= rate <= 1.0 for rate in rates.per_pair)
        assert max(rates.per_pair) <= rates.any_pair <= 1.0
        # Treatment 1 is the only true null.
        assert rates.fwer == rates.per_pair[0]
        assert rates.per_pair[1] > 0.5


def test_simulate_is_independent_of_workers(small_scenario):
    methods = [ClosureMethod.DUNNETT, ClosureMethod.CTP_GM]
    serial = simulate(small_scenario, methods, workers=1)
    parallel = simulate(small_scenario, methods, workers=2)
    assert serial == parallel


def test_simulate_method_lookup(small_scenario):
    report = simulate(small_scenario.with_runs(2), [ClosureMethod.CTP_F])
    assert report.has(ClosureMethod.CTP_F)
    assert not report.has(ClosureMethod.DUNNETT)
    assert report.rates(ClosureMethod.CTP_F).runs == 2
    with pytest.raises(KeyError):
        report.rates(ClosureMethod.DUNNETT)


def _bundled(name):
    (scenario,) = [s for s in bundled_table6() if s.name == name]
    return scenario


# Published per-pair rejection rates, procedures in DEFAULT_METHODS order.
PUBLISHED_PER_PAIR = {
    "n5555-mu10-10-10": (
        (0.020, 0.019, 0.022),
        (0.022, 0.020, 0.024),
        (0.014, 0.014, 0.014),
        (0.015, 0.015, 0.014),
    ),
    "n10101010-mu10-10-10": (
        (0.016, 0.022, 0.018),
        (0.019, 0.024, 0.021),
        (0.013, 0.014, 0.014),
        (0.014, 0.016, 0.015),
    ),
    "n20202020-mu10-10-10": (
        (0.019, 0.017, 0.021),
        (0.020, 0.018, 0.022),
        (0.014, 0.014, 0.015),
        (0.015, 0.013, 0.014),
    ),
    "n5555-mu13-13-13": (
        (0.762, 0.758, 0.751),
        (0.830, 0.826, 0.818),
        (0.775, 0.773, 0.765),
        (0.814, 0.814, 0.812),
    ),
    "n5555-mu10-10-13": (
        (0.018, 0.013, 0.752),
        (0.028, 0.021, 0.754),
        (0.025, 0.020, 0.772),
        (0.028, 0.022, 0.825),
    ),
    "n8552-mu10-13-13": (
        (0.018, 0.832, 0.527),
        (0.040, 0.849, 0.581),
        (0.050, 0.847, 0.536),
        (0.052, 0.818, 0.551),
    ),
}


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(PUBLISHED_PER_PAIR))
def test_per_pair_rates_match_published(name):
    scenario = _bundled(name)
    report = simulate(scenario, workers=4)
    assert report.runs == 2000
    tolerance = 0.02 if scenario.fwer_type == "weak" else 0.05
    for rates, expected in zip(report.methods, PUBLISHED_PER_PAIR[name]):
        assert rates.per_pair == pytest.approx(expected, abs=tolerance)
        if scenario.fwer_type == "weak":
            assert rates.fwer == rates.any_pair
            assert rates.fwer <= 0.065


@pytest.mark.slow
def test_any_pair_power_with_one_shifted_treatment():
    report = simulate(_bundled("n5555-mu10-10-13"), workers=4)
    expected = (0.757, 0.761, 0.779, 0.833)
    for rates, value in zip(report.methods, expected):
        assert rates.any_pair == pytest.approx(value, abs=0.05)


@pytest.mark.slow
def test_familywise_error_of_balanced_design():
    scenario = Scenario(
        n=(10, 10, 10, 10),
        mu=(0.0, 0.0, 0.0, 0.0),
        sd=(1.0, 1.0, 1.0, 1.0),
        runs=10_000,
        seed=20210917,
        name="balanced-null",
    )
    report = simulate(scenario, workers=4)
    for rates in report.methods:
        assert rates.fwer <= 0.065
    # CTP-F and CTP-GM reject less than alpha under the global null
    for method in (ClosureMethod.DUNNETT, ClosureMethod.CTP_DU):
        assert report.rates(method).fwer >= 0.035
