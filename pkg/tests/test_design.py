"""Tests for the design module."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunnettctp.design import (
    Dataset,
    Record,
    fit,
    fit_additive,
    fit_one_way,
    summarize,
)
from dunnettctp.errors import (
    DatasetError,
    EmptyGroupError,
    RankDeficientError,
    ZeroResidualDfError,
)


def test_one_way_fit(four_groups):
    model = fit_one_way(four_groups)
    assert model.n_groups == 4
    assert model.k == 3
    assert model.df == 16
    assert list(model.n) == [5, 5, 5, 5]
    assert model.means[0] == pytest.approx(10.02)
    assert model.means[3] == pytest.approx(13.1)
    assert np.allclose(model.covariance_scale, np.eye(4) / 5)

    within = sum(
        sum((y - np.mean(ys)) ** 2 for y in ys)
        for ys in (four_groups.group_responses(g) for g in range(4))
    )
    assert model.s2 == pytest.approx(within / 16)
    assert model.model == "one-way"
    assert model.labels == ("0", "1", "2", "3")


def test_fit_dispatches_on_blocks(four_groups, blocked):
    assert fit(four_groups).model == "one-way"
    assert fit(blocked).model == "additive"


def test_empty_group_is_reported():
    data = Dataset.from_arrays([0, 0, 2, 2], [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(EmptyGroupError) as excinfo:
        fit_one_way(data)
    assert excinfo.value.group == 1


def test_zero_residual_df():
    data = Dataset.from_arrays([0, 1], [1.0, 2.0])
    with pytest.raises(ZeroResidualDfError):
        fit_one_way(data)
    with pytest.raises(ZeroResidualDfError):
        fit_one_way(Dataset(records=()))


def test_records_are_validated():
    with pytest.raises(DatasetError):
        Dataset(records=(Record(-1, 1.0),))
    with pytest.raises(DatasetError):
        Dataset(records=(Record(0, math.nan),))
    with pytest.raises(DatasetError):
        Dataset(records=(Record(0, 1.0, "a"), Record(1, 2.0)))
    with pytest.raises(DatasetError):
        Dataset.from_arrays([0, 1], [1.0])


def test_subset_relabels_groups(four_groups):
    labeled = Dataset(
        records=four_groups.records, labels=("p", "a", "b", "c")
    )
    sub = labeled.subset([0, 3])
    assert sub.n_groups == 2
    assert sub.labels == ("p", "c")
    assert sub.group_responses(1) == labeled.group_responses(3)


def test_refit_uses_the_subset(four_groups):
    model = fit_one_way(four_groups)
    pair = model.refit([0, 2])
    assert pair.n_groups == 2
    assert pair.df == 8
    assert pair.means[1] == pytest.approx(model.means[2])


def test_additive_balanced_means(blocked):
    model = fit_additive(blocked)
    assert model.df == 12 - 4
    for group in range(3):
        raw = np.mean(blocked.group_responses(group))
        assert model.means[group] == pytest.approx(raw)

    design = np.zeros((12, 4))
    design[:, 0] = 1.0
    for row, record in enumerate(blocked.records):
        if record.group > 0:
            design[row, record.group] = 1.0
        if record.block == "m":
            design[row, 3] = 1.0
    _, residual, _, _ = np.linalg.lstsq(design, blocked.responses, rcond=None)
    assert model.s2 == pytest.approx(float(residual[0]) / 8)


def test_additive_single_block_equals_one_way(four_groups):
    blocks = ["x"] * len(four_groups.records)
    data = Dataset.from_arrays(
        four_groups.groups, four_groups.responses, blocks=blocks
    )
    assert fit_additive(data) == fit_one_way(four_groups)


def test_additive_confounded_design():
    data = Dataset.from_arrays(
        [0, 0, 1, 1, 2, 2],
        [1.0, 1.5, 2.0, 2.5, 3.0, 3.5],
        blocks=["a", "a", "b", "b", "b", "b"],
    )
    with pytest.raises(RankDeficientError):
        fit_additive(data)


def test_summarize():
    data = Dataset.from_arrays(
        [0, 0, 0, 1], [1.0, 2.0, 3.0, 7.0], labels=["ctl", "dose"]
    )
    first, second = summarize(data)
    assert first.label == "ctl"
    assert first.n == 3
    assert first.mean == pytest.approx(2.0)
    assert first.sd == pytest.approx(1.0)
    assert first.sd_defined
    assert second.n == 1
    assert not second.sd_defined


responses = st.lists(
    st.floats(min_value=-100, max_value=100, allow_nan=False),
    min_size=9,
    max_size=9,
)


@settings(max_examples=50, deadline=None)
@given(responses, st.randoms(use_true_random=False))
def test_fit_ignores_record_order(values, random):
    groups = [0, 0, 0, 1, 1, 1, 2, 2, 2]
    data = Dataset.from_arrays(groups, values)
    order = list(range(9))
    random.shuffle(order)
    shuffled = Dataset.from_arrays(
        [groups[i] for i in order], [values[i] for i in order]
    )
    assert fit_one_way(shuffled) == fit_one_way(data)


@settings(max_examples=50, deadline=None)
@given(
    responses,
    st.floats(min_value=-50, max_value=50),
    st.floats(min_value=0.1, max_value=10),
)
def test_fit_shift_and_scale(values, shift, scale):
    groups = [0, 0, 0, 1, 1, 1, 2, 2, 2]
    base = fit_one_way(Dataset.from_arrays(groups, values))
    moved = fit_one_way(
        Dataset.from_arrays(groups, [scale * y + shift for y in values])
    )
    assert np.allclose(
        moved.means, scale * base.means + shift, rtol=1e-9, atol=1e-6
    )
    assert moved.s2 == pytest.approx(scale**2 * base.s2, rel=1e-6, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-100, max_value=100, allow_nan=False),
        min_size=12,
        max_size=12,
    ),
    st.randoms(use_true_random=False),
)
def test_additive_fit_ignores_record_order(values, random):
    groups = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]
    blocks = ["f", "m", "f", "m"] * 3
    data = Dataset.from_arrays(groups, values, blocks=blocks)
    order = list(range(12))
    random.shuffle(order)
    shuffled = Dataset.from_arrays(
        [groups[i] for i in order],
        [values[i] for i in order],
        blocks=[blocks[i] for i in order],
    )
    assert fit_additive(shuffled) == fit_additive(data)
