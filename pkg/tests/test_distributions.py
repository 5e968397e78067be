"""Tests for the distributions module."""

import math

import numpy as np
import pytest
from scipy import stats

from dunnettctp.distributions import (
    chi_scale_ppf,
    f_cdf,
    f_sf,
    normal_cdf,
    normal_ppf,
    t_cdf,
    t_ppf,
    t_sf,
)
from dunnettctp.errors import DomainError


@pytest.mark.parametrize("df", [1, 5, 16.5, 100])
@pytest.mark.parametrize("x", [-3.0, -0.4, 0.0, 1.2, 6.0])
def test_t_matches_scipy(x, df):
    assert t_cdf(x, df) == pytest.approx(stats.t.cdf(x, df), rel=1e-10)
    assert t_sf(x, df) == pytest.approx(stats.t.sf(x, df), rel=1e-10)


def test_t_normal_limit():
    assert t_cdf(1.96, math.inf) == pytest.approx(normal_cdf(1.96))
    assert t_ppf(0.975, math.inf) == pytest.approx(1.959964, abs=1e-6)
    assert normal_ppf(0.5) == 0.0


def test_t_quantile_inverts_cdf():
    for p in (0.01, 0.5, 0.975):
        assert t_cdf(t_ppf(p, 7), 7) == pytest.approx(p, rel=1e-10)


def test_small_upper_tail_keeps_precision():
    p = t_sf(40.0, 10)
    assert 0 < p < 1e-11
    assert p == pytest.approx(stats.t.sf(40.0, 10), rel=1e-8)


def test_f_tails():
    assert f_sf(3.2, 3, 16) == pytest.approx(stats.f.sf(3.2, 3, 16))
    assert f_cdf(3.2, 3, 16) == pytest.approx(stats.f.cdf(3.2, 3, 16))
    assert f_sf(0.0, 2, 5) == 1.0
    assert f_sf(math.inf, 2, 5) == 0.0
    assert f_cdf(-1.0, 2, 5) == 0.0


def test_chi_scale():
    u = np.array([0.1, 0.5, 0.9])
    expected = np.sqrt(stats.chi2.ppf(u, 12) / 12)
    assert np.allclose(chi_scale_ppf(u, 12), expected)


@pytest.mark.parametrize("df", [0, -1.0])
def test_domain(df):
    with pytest.raises(DomainError):
        t_cdf(0.0, df)
    with pytest.raises(ValueError):
        f_sf(1.0, 2, df)
