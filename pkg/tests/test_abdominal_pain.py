"""Adjusted p-values of the abdominal pain dose-finding trial."""

from pathlib import Path

import pytest

from dunnettctp.closure import ClosureMethod, run_closure
from dunnettctp.datasets import load_csv
from dunnettctp.design import fit
from dunnettctp.marginal import ElementaryMode

DATA = Path(__file__).parent / "data" / "ibscovars.csv"

# Two-sided adjusted p-values of doses 1 to 4 against placebo, with
# gender as an additive block factor.
EXPECTED = {
    ClosureMethod.DUNNETT: (0.0779, 0.0654, 0.0229, 0.0234),
    ClosureMethod.CTP_F: (0.0346, 0.0346, 0.0346, 0.0346),
    ClosureMethod.CTP_DU: (0.0358, 0.0358, 0.0222, 0.0222),
    ClosureMethod.CTP_GM: (0.0234, 0.0226, 0.0117, 0.0121),
}


@pytest.fixture(scope="module")
def model():
    if not DATA.exists():
        pytest.skip(f"{DATA.name} not available")
    data = load_csv(
        DATA,
        group_column="dose",
        response_column="resp",
        block_column="gender",
    )
    return fit(data)


def test_additive_model(model):
    assert model.model == "additive"
    assert model.k == 4


@pytest.mark.parametrize("method", list(EXPECTED))
def test_adjusted_p_values(model, method):
    result = run_closure(model, method, seed=20210917)
    assert result.adjusted == pytest.approx(EXPECTED[method], abs=5e-3)


@pytest.mark.parametrize("mode", list(ElementaryMode))
def test_f_closure_elementary_modes(model, mode):
    # the global F-test dominates every adjusted p-value
    result = run_closure(model, ClosureMethod.CTP_F, elementary_mode=mode)
    assert result.adjusted == pytest.approx(
        EXPECTED[ClosureMethod.CTP_F], abs=5e-3
    )
