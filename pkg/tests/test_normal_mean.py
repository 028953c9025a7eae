"""Normal location model and the |theta| calibration demonstration."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import optimize, special

from confbel.audit import coverage_probability, ks_uniform
from confbel.mc import MCConfig
from confbel.models import normal_mean

W_MAX = 0.38292492254802621  # value of the CD assignment at x = 0


def test_pivot_contour_closed_form():
    assert normal_mean.pivot_contour(0.4, 0.4) == 1.0
    assert normal_mean.pivot_contour(0.0, 1.0) == pytest.approx(2 * special.ndtr(-1.0), abs=1e-14)
    # symmetric in the residual
    th = np.linspace(-3, 3, 41)
    assert_allclose(normal_mean.pivot_contour(0.0, th), normal_mean.pivot_contour(0.0, -th), atol=1e-15)


def test_family_coverage():
    est = coverage_probability(
        normal_mean.sampling(), normal_mean.family(), 0.5, 0.05, MCConfig(reps=20_000, seed=37)
    )
    assert est.estimate == pytest.approx(0.95, abs=4 * est.se)


def test_abs_fiber():
    assert normal_mean.abs_fiber(-0.1) == []
    assert normal_mean.abs_fiber(0.0) == [0.0]
    assert normal_mean.abs_fiber(0.7) == [0.7, -0.7]


def test_abs_contour_is_branch_maximum():
    x = 1.3
    c = normal_mean.abs_contour(x)
    phis = np.linspace(0.0, 4.0, 81)
    want = np.maximum(normal_mean.pivot_contour(x, phis), normal_mean.pivot_contour(x, -phis))
    assert_allclose(c(phis), want, atol=1e-15)
    assert c(abs(x)) == 1.0


def test_cd_abs_value_closed_form():
    x, phi = 0.9, 0.5
    want = special.ndtr(phi - x) - special.ndtr(-phi - x)
    assert normal_mean.cd_abs_value(x, phi) == pytest.approx(want, abs=1e-15)
    with pytest.raises(ValueError):
        normal_mean.cd_abs_value(0.9, -0.5)
    # a genuine CDF in phi: monotone, 0 at 0, 1 in the limit
    phis = np.linspace(0.0, 30.0, 301)
    vals = normal_mean.cd_abs_value(x, phis)
    assert np.all(np.diff(vals) >= 0)
    assert vals[0] == 0.0
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)


def test_cd_abs_draws_deterministic_and_bounded():
    mc = MCConfig(reps=2000, seed=41)
    draws = normal_mean.cd_abs_draws(mc)
    assert np.array_equal(draws, normal_mean.cd_abs_draws(mc))
    assert draws.shape == (2000,)
    assert np.all(draws > 0.0)
    assert np.all(draws <= W_MAX + 1e-12)


def cd_abs_exact_cdf(t: float, theta: float = 0.5) -> float:
    """CDF of the CD assignment at the truth, by inverting its even profile."""
    w = lambda x: special.ndtr(theta - x) - special.ndtr(-theta - x)
    if t <= 0.0:
        return 0.0
    if t >= w(0.0):
        return 1.0
    x_t = optimize.brentq(lambda x: w(x) - t, 0.0, 60.0)
    return float(1.0 - special.ndtr(x_t - theta) + special.ndtr(-x_t - theta))


def test_cd_abs_draws_far_from_uniform_but_match_their_law():
    mc = MCConfig(reps=5000, seed=1)
    draws = np.sort(normal_mean.cd_abs_draws(mc))
    # nowhere near Uniform(0, 1)
    assert ks_uniform(draws) > 0.10
    # yet exactly as predicted by the closed-form law of the assignment
    grid = np.linspace(1e-4, W_MAX, 200)
    exact = np.asarray([cd_abs_exact_cdf(t) for t in grid])
    empirical = np.searchsorted(draws, grid, side="right") / len(draws)
    assert np.max(np.abs(empirical - exact)) < 0.02


def test_abs_plausibility_remains_valid_at_truth():
    # the consonant marginal dominates one exactly-uniform branch, so its
    # exceedance stays below alpha even though the CD assignment's does not
    theta = 0.5
    mc = MCConfig(reps=20_000, seed=43)
    xs = normal_mean.sampling().sample(theta, mc)
    pl = np.maximum(normal_mean.pivot_contour(xs, theta), normal_mean.pivot_contour(xs, -theta))
    cd = normal_mean.cd_abs_value(xs, theta)
    for alpha in (0.05, 0.1, 0.25):
        se = np.sqrt(alpha * (1 - alpha) / mc.reps)
        assert np.mean(pl <= alpha) <= alpha + 3 * se
    # the additive assignment is anti-conservative at small levels here
    assert np.mean(cd <= 0.05) > 0.05 + 3 * np.sqrt(0.05 * 0.95 / mc.reps)
