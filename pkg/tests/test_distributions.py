"""Distribution toolkit: exact values, round trips, seeded streams."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from confbel import distributions as dist
from confbel.audit import ks_uniform
from confbel.mc import MCConfig

# High-precision reference values, computed independently of the scipy
# routines the module wraps (arbitrary-precision erf/betainc/gammainc).
Z_975 = 1.9599639845400542
T4_CDF_2776 = 0.9749886108400118
T4_Q_975 = 2.7764451051977944
BINOM_25_03_PMF7 = 0.1711936396919514

SPECS = {
    "normal": dist.normal(),
    "student_t": dist.student_t(4),
    "chi_square": dist.chi_square(3),
    "binomial": dist.binomial(25, 0.3),
    "uniform01": dist.uniform01(),
}


def test_spec_validation():
    with pytest.raises(ValueError):
        dist.DistSpec("cauchy")
    with pytest.raises(ValueError):
        dist.student_t(0)
    with pytest.raises(ValueError):
        dist.binomial(25, 1.2)
    with pytest.raises(ValueError):
        dist.DistSpec("normal", df=3)
    assert dist.binomial(25, 0.3).is_discrete
    assert not dist.normal().is_discrete


def test_cdf_known_values():
    assert dist.cdf(dist.normal(), 0.0) == 0.5
    assert dist.cdf(dist.binomial(2, 0.5), 1) == pytest.approx(0.75, abs=1e-14)
    assert dist.cdf(dist.student_t(4), 2.776) == pytest.approx(T4_CDF_2776, abs=1e-12)
    assert dist.cdf(dist.chi_square(3), 7.814727903251179) == pytest.approx(0.95, abs=1e-12)
    assert dist.cdf(dist.uniform01(), 0.3) == 0.3
    assert dist.cdf(dist.normal(), Z_975) == pytest.approx(0.975, abs=1e-13)


def test_quantile_known_values():
    assert dist.quantile(dist.normal(), 0.975) == pytest.approx(Z_975, abs=1e-9)
    assert dist.quantile(dist.student_t(4), 0.975) == pytest.approx(T4_Q_975, abs=1e-8)
    assert dist.quantile(dist.uniform01(), 0.3) == pytest.approx(0.3, abs=1e-10)
    # support maximum is reached just below p = 1
    assert dist.quantile(dist.binomial(25, 0.68), 1.0 - 1e-12) == 25


def test_quantile_endpoint_errors():
    for p in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            dist.quantile(dist.normal(), p)


def test_binom_log_pmf_exact():
    assert np.exp(dist.binom_log_pmf(25, 7, 0.3)) == pytest.approx(BINOM_25_03_PMF7, rel=1e-13)
    # degenerate p: point masses at the support edges
    assert np.exp(dist.binom_log_pmf(10, 0, 0.0)) == 1.0
    assert np.exp(dist.binom_log_pmf(10, 10, 1.0)) == 1.0
    table = np.exp(dist.binom_log_pmf(25, np.arange(26), 0.3))
    assert table.sum() == pytest.approx(1.0, abs=1e-12)


def test_binom_cdf_table_matches_pmf_cumsum():
    table = dist.binom_cdf_table(25, 0.3)
    pmf = np.exp(dist.binom_log_pmf(25, np.arange(26), 0.3))
    assert_allclose(table, np.cumsum(pmf), atol=1e-12)
    assert table[-1] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_cdf_monotone_on_grid(name):
    spec = SPECS[name]
    if name == "binomial":
        grid = np.linspace(-1, 26, 1000)
    elif name == "chi_square":
        grid = np.linspace(0, 30, 1000)
    elif name == "uniform01":
        grid = np.linspace(-0.2, 1.2, 1000)
    else:
        grid = np.linspace(-8, 8, 1000)
    vals = np.asarray([dist.cdf(spec, x) for x in grid])
    assert np.all(np.diff(vals) >= 0)
    assert np.all((vals >= 0) & (vals <= 1))


@pytest.mark.parametrize("name", ["normal", "student_t", "chi_square", "uniform01"])
def test_continuous_round_trips(name):
    spec = SPECS[name]
    ps = np.linspace(0.001, 0.999, 41)
    qs = dist.quantile(spec, ps)
    assert_allclose(dist.cdf(spec, qs), ps, atol=1e-9)
    xs = qs[::4]
    assert_allclose(dist.quantile(spec, dist.cdf(spec, xs)), xs, atol=1e-7, rtol=1e-7)


@given(p=st.floats(min_value=1e-6, max_value=1 - 1e-6))
@settings(max_examples=60, deadline=None)
def test_binomial_quantile_is_minimal(p):
    spec = dist.binomial(25, 0.3)
    k = dist.quantile(spec, p)
    assert dist.cdf(spec, k) >= p
    if k > 0:
        assert dist.cdf(spec, k - 1) < p


def test_sample_determinism():
    mc = MCConfig(reps=10, seed=7)
    a = dist.sample(dist.normal(), mc)
    b = dist.sample(dist.normal(), MCConfig(reps=10, seed=7))
    assert np.array_equal(a, b)
    c = dist.sample(dist.normal(), MCConfig(reps=10, seed=7, stream_id=1))
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("name", ["normal", "student_t", "chi_square", "uniform01"])
def test_sampler_goodness(name):
    # 1% KS critical value for the cdf-transformed stream
    spec = SPECS[name]
    reps = 100_000
    draws = dist.sample(spec, MCConfig(reps=reps, seed=3))
    u = dist.cdf(spec, draws)
    assert ks_uniform(np.clip(u, 0.0, 1.0)) <= 1.63 / np.sqrt(reps)


def test_normal_sample_mean():
    reps = 100_000
    draws = dist.sample(dist.normal(), MCConfig(reps=reps, seed=5))
    assert abs(draws.mean()) <= 3.0 / np.sqrt(reps)


def test_binomial_sample_matches_inversion():
    spec = dist.binomial(25, 0.3)
    mc = MCConfig(reps=2000, seed=9)
    draws = dist.sample(spec, mc)
    u = mc.uniforms(2000)
    expected = np.asarray([dist.quantile(spec, ui) for ui in u])
    assert np.array_equal(draws, expected)
    assert draws.min() >= 0 and draws.max() <= 25


def test_sample_uniform_minmax_shape_and_order():
    pairs = dist.sample_uniform_minmax(10, MCConfig(reps=5000, seed=21))
    assert pairs.shape == (5000, 2)
    assert np.all(pairs[:, 0] <= pairs[:, 1])
    assert np.all((pairs >= 0.0) & (pairs <= 1.0))
    # order-statistic means: 1/(n+1) and n/(n+1), each with sd ~ 1/(n+1)/sqrt(reps)-ish
    assert pairs[:, 0].mean() == pytest.approx(1 / 11, abs=0.005)
    assert pairs[:, 1].mean() == pytest.approx(10 / 11, abs=0.005)
    with pytest.raises(ValueError):
        dist.sample_uniform_minmax(1, MCConfig(reps=10, seed=0))
