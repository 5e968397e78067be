"""Tests for the contrasts module."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dunnettctp.contrasts import (
    ContrastKind,
    CorrelationMatrix,
    correlation,
    custom_contrasts,
    dunnett_contrasts,
    grand_mean_contrasts,
    load_contrasts,
    pairwise_row,
)
from dunnettctp.design import Dataset, fit_one_way
from dunnettctp.errors import (
    ContrastError,
    EmptySubsetError,
    IndexOutOfRangeError,
    NotPSDError,
)
from dunnettctp.marginal import contrast_t


def test_dunnett_rows():
    c = dunnett_contrasts(4, [3, 1])
    assert c.kind is ContrastKind.DUNNETT
    assert c.active_set == (1, 3)
    assert c.rows.tolist() == [[-1, 1, 0, 0], [-1, 0, 0, 1]]
    assert c.labels == ("1 - 0", "3 - 0")


def test_dunnett_names():
    c = dunnett_contrasts(3, [1, 2], ["placebo", "low", "high"])
    assert c.labels == ("low - placebo", "high - placebo")


def test_grand_mean_rows():
    c = grand_mean_contrasts(4, [1, 3])
    assert c.q == 3
    expected = [
        [-1.0, 0.5, 0.0, 0.5],
        [0.5, -1.0, 0.0, 0.5],
        [0.5, 0.5, 0.0, -1.0],
    ]
    assert np.allclose(c.rows, expected)


def test_invalid_subsets():
    with pytest.raises(EmptySubsetError):
        dunnett_contrasts(4, [])
    with pytest.raises(IndexOutOfRangeError):
        dunnett_contrasts(4, [4])
    with pytest.raises(IndexOutOfRangeError):
        pairwise_row(3, 0)


def test_custom_contrasts_check_row_sums():
    c = custom_contrasts([[-1, 0.5, 0.5], [0, -1, 1]], ["trend", "step"])
    assert c.kind is ContrastKind.CUSTOM
    assert c.active_set == (1, 2)
    with pytest.raises(ContrastError):
        custom_contrasts([[1, 1, 0]])


def test_load_contrasts(tmp_path):
    path = tmp_path / "contrasts.csv"
    path.write_text("label,g0,g1,g2\nmean,-1,0.5,0.5\nlast,-1,0,1\n")
    c = load_contrasts(path, 3)
    assert c.labels == ("mean", "last")
    assert c.rows.tolist() == [[-1, 0.5, 0.5], [-1, 0, 1]]
    with pytest.raises(ContrastError):
        load_contrasts(path, 4)


def test_balanced_dunnett_correlation(four_groups):
    model = fit_one_way(four_groups)
    corr = correlation(dunnett_contrasts(4, [1, 2, 3]), model)
    expected = np.full((3, 3), 0.5)
    np.fill_diagonal(expected, 1.0)
    assert np.allclose(corr.values, expected)


def test_unbalanced_dunnett_correlation():
    data = Dataset.from_arrays(
        [0] * 8 + [1] * 2 + [2] * 4, [float(i % 5) for i in range(14)]
    )
    corr = correlation(dunnett_contrasts(3, [1, 2]), fit_one_way(data))
    # n0 = 8, n1 = 2, n2 = 4
    rho = 1 / np.sqrt((1 + 8 / 2) * (1 + 8 / 4))
    assert corr.values[0, 1] == pytest.approx(rho)


def test_row_scaling_changes_neither_correlation_nor_t(four_groups):
    model = fit_one_way(four_groups)
    base = grand_mean_contrasts(4, [1, 2, 3])
    scaled = base.scaled([2.0, 0.5, 7.0, 3.0])
    assert np.allclose(scaled.rows[2], 7.0 * base.rows[2])
    assert scaled.labels == base.labels
    assert np.allclose(
        correlation(scaled, model).values, correlation(base, model).values
    )
    assert np.allclose(contrast_t(scaled, model), contrast_t(base, model))


def test_correlation_repair():
    near = CorrelationMatrix.equicorrelated(3, -0.5 - 1e-9)
    assert near.min_eigenvalue < -1e-10
    repaired = near.repaired()
    assert repaired.min_eigenvalue > -1e-10
    assert np.allclose(np.diag(repaired.values), 1.0)

    with pytest.raises(NotPSDError):
        CorrelationMatrix.equicorrelated(3, -0.6).repaired()


def test_correlation_must_be_symmetric():
    with pytest.raises(NotPSDError):
        CorrelationMatrix(np.array([[1.0, 0.2], [0.3, 1.0]]))


@given(
    st.integers(min_value=2, max_value=8).flatmap(
        lambda g: st.tuples(
            st.just(g),
            st.sets(st.integers(min_value=1, max_value=g - 1), min_size=1),
        )
    )
)
def test_rows_sum_to_zero(case):
    g, subset = case
    for c in (dunnett_contrasts(g, subset), grand_mean_contrasts(g, subset)):
        assert np.allclose(c.rows.sum(axis=1), 0.0)
        outside = [j for j in range(1, g) if j not in subset]
        assert np.all(c.rows[:, outside] == 0.0)
