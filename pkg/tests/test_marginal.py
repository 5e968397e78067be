"""Tests for the marginal (local) tests."""

import math

import numpy as np
import pytest
from scipy import stats

from dunnettctp.contrasts import (
    custom_contrasts,
    dunnett_contrasts,
    grand_mean_contrasts,
)
from dunnettctp.design import Dataset, fit_one_way
from dunnettctp.marginal import (
    DenominatorScope,
    DfMode,
    ElementaryMode,
    Sidedness,
    TestMethod,
    anova_f,
    contrast_t,
    mct_maxtest,
    two_sample_t,
)


def responses(data, group):
    return data.group_responses(group)


def test_sidedness_aliases():
    assert Sidedness.parse("two") is Sidedness.TWO_SIDED
    assert Sidedness.parse("one") is Sidedness.GREATER
    assert Sidedness.parse("less") is Sidedness.LESS
    with pytest.raises(ValueError):
        Sidedness.parse("sideways")


def test_contrast_t(four_groups):
    model = fit_one_way(four_groups)
    t = contrast_t(dunnett_contrasts(4, [3]), model)
    expected = (model.means[3] - model.means[0]) / math.sqrt(
        model.s2 * (1 / 5 + 1 / 5)
    )
    assert t[0] == pytest.approx(expected)


def test_two_group_maxtest_is_the_t_test(two_groups):
    model = fit_one_way(two_groups)
    result = mct_maxtest(dunnett_contrasts(2, [1]), model)
    reference = stats.ttest_ind(
        responses(two_groups, 1), responses(two_groups, 0), equal_var=True
    )
    assert result.p == pytest.approx(reference.pvalue, rel=1e-9)
    assert result.statistic == pytest.approx(reference.statistic)
    assert result.abs_error == 0.0


def test_one_sided_maxtest(two_groups):
    model = fit_one_way(two_groups)
    c = dunnett_contrasts(2, [1])
    greater = mct_maxtest(c, model, Sidedness.GREATER)
    less = mct_maxtest(c, model, Sidedness.LESS)
    two = mct_maxtest(c, model, Sidedness.TWO_SIDED)
    assert greater.p == pytest.approx(two.p / 2)
    assert less.p == pytest.approx(1 - greater.p)


def test_maxtest_rows(four_groups):
    model = fit_one_way(four_groups)
    result = mct_maxtest(dunnett_contrasts(4, [1, 2, 3]), model, seed=3)
    assert result.method is TestMethod.MCT_DUNNETT
    assert len(result.per_row) == 3
    for row in result.per_row:
        assert row.p_adjusted >= row.p_raw
        assert row.p_adjusted <= min(1.0, 3 * row.p_raw) + 1e-3
    assert result.p == min(row.p_adjusted for row in result.per_row)
    assert result.per_row[2].p_adjusted < 0.001
    assert result.statistic == pytest.approx(
        max(abs(row.t) for row in result.per_row)
    )


def test_hypothesis_level_p_matches_rows(four_groups):
    model = fit_one_way(four_groups)
    c = dunnett_contrasts(4, [1, 2])
    full = mct_maxtest(c, model, seed=9)
    node = mct_maxtest(c, model, seed=9, per_row=False)
    assert node.per_row == ()
    assert node.p == pytest.approx(full.p, abs=2e-4)


def test_grand_mean_maxtest(four_groups):
    model = fit_one_way(four_groups)
    result = mct_maxtest(grand_mean_contrasts(4, [1, 2, 3]), model, seed=1)
    assert result.method is TestMethod.MCT_GRAND_MEAN
    assert len(result.per_row) == 4
    assert result.p < 0.001


def test_custom_maxtest(four_groups):
    model = fit_one_way(four_groups)
    c = custom_contrasts([[-3, -1, 1, 3], [-1, 0, 0, 1]])
    result = mct_maxtest(c, model, seed=1, label="custom")
    assert result.method is TestMethod.MCT_CUSTOM
    assert result.label == "custom"
    assert 0.0 <= result.p <= 1.0


@pytest.mark.parametrize("build", [dunnett_contrasts, grand_mean_contrasts])
def test_two_sided_p_ignores_the_sign_of_the_data(four_groups, build):
    negated = Dataset.from_arrays(
        four_groups.groups, -four_groups.responses
    )
    c = build(4, [1, 2, 3])
    base = mct_maxtest(c, fit_one_way(four_groups), seed=5)
    flipped = mct_maxtest(c, fit_one_way(negated), seed=5)
    assert flipped.p == pytest.approx(base.p, rel=1e-12, abs=1e-15)
    for a, b in zip(base.per_row, flipped.per_row):
        assert b.t == pytest.approx(-a.t)
        assert b.p_adjusted == pytest.approx(a.p_adjusted, abs=1e-12)


def test_zero_variance():
    data = Dataset.from_arrays([0, 0, 1, 1, 2, 2], [1, 1, 1, 1, 3, 3])
    model = fit_one_way(data)
    assert model.s2 == 0.0
    result = mct_maxtest(dunnett_contrasts(3, [1, 2]), model)
    assert result.zero_variance
    assert result.per_row[0].t == 0.0
    assert result.per_row[0].p_adjusted == 1.0
    assert math.isinf(result.per_row[1].t)
    assert result.per_row[1].p_adjusted == 0.0
    assert result.p == 0.0


def test_pooled_two_sample_t(four_groups):
    model = fit_one_way(four_groups)
    result = two_sample_t(2, model)
    t = (model.means[2] - model.means[0]) / math.sqrt(model.s2 * 2 / 5)
    assert result.method is TestMethod.TWO_SAMPLE_T
    assert result.df_used == 16
    assert result.p == pytest.approx(2 * stats.t.sf(abs(t), 16))


def test_pair_only_two_sample_t(four_groups):
    model = fit_one_way(four_groups)
    result = two_sample_t(2, model, df_mode=DfMode.PAIR_ONLY)
    reference = stats.ttest_ind(
        responses(four_groups, 2), responses(four_groups, 0), equal_var=True
    )
    assert result.df_used == 8
    assert result.p == pytest.approx(reference.pvalue, rel=1e-9)


def test_anova_f_matches_one_way_anova(four_groups):
    model = fit_one_way(four_groups)
    groups = [responses(four_groups, g) for g in range(4)]

    result = anova_f([1, 2, 3], model)
    reference = stats.f_oneway(*groups)
    assert result.method is TestMethod.ANOVA_F
    assert result.statistic == pytest.approx(reference.statistic)
    assert result.p == pytest.approx(reference.pvalue, rel=1e-8)

    subset = anova_f([1, 2], model)
    reference = stats.f_oneway(*groups[:3])
    assert subset.statistic == pytest.approx(reference.statistic)
    assert subset.df_used == 12
    assert subset.label == "F(0,1,2)"


def test_anova_f_full_residual(four_groups):
    model = fit_one_way(four_groups)
    result = anova_f(
        [1, 2], model, denominator=DenominatorScope.FULL_RESIDUAL
    )
    assert result.df_used == 16
    groups = [responses(four_groups, g) for g in range(3)]
    grand = np.mean(np.concatenate(groups))
    between = sum(len(g) * (np.mean(g) - grand) ** 2 for g in groups)
    assert result.statistic == pytest.approx(between / 2 / model.s2)


def test_anova_f_elementary_modes(four_groups):
    model = fit_one_way(four_groups)
    pairwise = anova_f([3], model)
    assert pairwise.method is TestMethod.PAIRWISE_T
    assert pairwise.p == pytest.approx(two_sample_t(3, model).p)

    subset = anova_f([3], model, ElementaryMode.SUBSET_F)
    reference = stats.ttest_ind(
        responses(four_groups, 3), responses(four_groups, 0), equal_var=True
    )
    assert subset.method is TestMethod.ANOVA_F
    assert subset.statistic == pytest.approx(reference.statistic**2)
    assert subset.p == pytest.approx(reference.pvalue, rel=1e-8)


def test_result_to_dict(two_groups):
    result = mct_maxtest(dunnett_contrasts(2, [1]), fit_one_way(two_groups))
    data = result.to_dict()
    assert list(data) == ["method", "statistic", "df", "p", "rows"]
    assert data["df"] == 7
    assert data["rows"][0]["label"] == "1 - 0"
