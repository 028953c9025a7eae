"""Normal-ratio model: quadrature routes, stranded mass, equal-tailed sets,
and the failure modes of treating the assignment as a CDF."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from confbel.audit import coverage_probability
from confbel.mc import MCConfig
from confbel.models import fieller

# High-precision quadrature oracle, 30 significant digits.
G_120_AT_010 = 0.8401409115935648
G_120_AT_M002 = 0.080798578563873676
LOWER_120_005 = -0.048111552939992403
UPPER_120_005 = 0.14908123008219377


def _phi(t: float) -> float:
    return 0.5 * math.erfc(-t / math.sqrt(2.0))


def g_closed_form(x, phi: float) -> float:
    # Averaging Phi(phi z - x1) over z ~ N(x2, 1) asks for the chance that one
    # normal variable falls below an independent scaled one; their difference
    # is again normal, so the whole mixture collapses to a single Phi call.
    # Built on math.erfc, so it shares nothing with the scipy routes on trial.
    x1, x2 = float(x[0]), float(x[1])
    return _phi((phi * x2 - x1) / math.hypot(1.0, phi))


XS = [(1.0, 20.0), (1.0, 0.5), (-0.7, 2.3), (1.0, -1.5)]
PHIS = [-2.0, -0.02, 0.0, 0.05, 0.1, 0.8, 3.0]


def test_cdf_matches_single_normal_reduction():
    for x in XS:
        for phi in PHIS:
            assert fieller.fieller_cdf(x, phi) == pytest.approx(g_closed_form(x, phi), abs=1e-9)


def test_cdf_batch_matches_closed_form():
    xs = np.asarray(XS)
    for phi in PHIS:
        want = [g_closed_form(x, phi) for x in XS]
        assert_allclose(fieller.fieller_cdf_batch(xs, phi), want, atol=1e-8)


def test_cdf_batch_per_row_phi_and_shapes():
    xs = np.asarray(XS)
    phis = np.asarray([0.3, -1.0, 0.0, 2.0])
    got = fieller.fieller_cdf_batch(xs, phis)
    assert got.shape == (4,)
    assert_allclose(got, [g_closed_form(x, p) for x, p in zip(XS, phis)], atol=1e-8)
    assert fieller.fieller_cdf_batch(np.asarray([1.0, 20.0]), 0.1).shape == (1,)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(-5.0, 5.0), st.floats(-4.0, 4.0))
def test_cdf_reduction_property(x1, x2, phi):
    assert fieller.fieller_cdf((x1, x2), phi) == pytest.approx(
        g_closed_form((x1, x2), phi), abs=1e-9
    )


def test_cdf_frozen_values():
    assert fieller.fieller_cdf((1.0, 20.0), 0.05) == pytest.approx(0.5, abs=1e-10)
    assert fieller.fieller_cdf((1.0, 20.0), 0.1) == pytest.approx(G_120_AT_010, abs=1e-10)
    assert fieller.fieller_cdf((1.0, 20.0), -0.02) == pytest.approx(G_120_AT_M002, abs=1e-10)


def test_cdf_monotone_when_denominator_is_solid():
    # Range chosen so G stays clear of the float64 saturation plateaus.
    phis = np.linspace(-0.15, 0.3, 241)
    g = fieller.fieller_cdf_batch(np.tile([1.0, 20.0], (phis.size, 1)), phis)
    assert np.all(np.diff(g) > 0.0)


def test_dip_when_denominator_is_weak():
    # Global minimum at phi = -x2/x1 with value Phi(-sqrt(x1^2 + x2^2)).
    x = (1.0, 0.1)
    dip = fieller.fieller_cdf(x, -0.1)
    assert dip == pytest.approx(_phi(-math.hypot(1.0, 0.1)), abs=1e-9)
    assert fieller.fieller_cdf(x, -0.6) > dip
    assert fieller.fieller_cdf(x, 0.4) > dip


def test_runs_backwards_for_negative_denominator():
    phis = np.linspace(-1.0, 1.0, 81)
    g = fieller.fieller_cdf_batch(np.tile([1.0, -1.5], (phis.size, 1)), phis)
    assert np.all(np.diff(g) < 0.0)


def test_mass_at_infinity_closed_form():
    for x2 in (-1.5, 0.0, 0.1, 0.5, 20.0):
        assert fieller.mass_at_infinity((1.0, x2)) == pytest.approx(
            0.5 * math.erfc(x2 / math.sqrt(2.0)), abs=1e-15
        )


def test_interval_frozen_endpoints():
    iv = fieller.fieller_interval((1.0, 20.0), 0.05)
    assert iv.lower == pytest.approx(LOWER_120_005, abs=1e-8)
    assert iv.upper == pytest.approx(UPPER_120_005, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.32])
def test_interval_quantile_round_trip(alpha):
    iv = fieller.fieller_interval((1.0, 20.0), alpha)
    assert fieller.fieller_cdf((1.0, 20.0), iv.lower) == pytest.approx(alpha / 2, abs=1e-8)
    assert fieller.fieller_cdf((1.0, 20.0), iv.upper) == pytest.approx(1 - alpha / 2, abs=1e-8)


def test_intervals_nest():
    wide = fieller.fieller_interval((1.0, 20.0), 0.05)
    narrow = fieller.fieller_interval((1.0, 20.0), 0.32)
    assert wide.lower < narrow.lower < narrow.upper < wide.upper


def test_interval_escapes_when_mass_swallows_the_tail():
    iv = fieller.fieller_interval((1.0, 0.5), 0.05)  # Phi(-0.5) ~ 0.31 > 0.025
    assert iv.lower == -np.inf and iv.upper == np.inf
    iv = fieller.fieller_interval((1.0, 0.1), 0.6)  # Phi(-0.1) ~ 0.46 > 0.3
    assert iv.lower == -np.inf and iv.upper == np.inf


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.7])
def test_interval_alpha_validation(alpha):
    with pytest.raises(ValueError):
        fieller.fieller_interval((1.0, 20.0), alpha)


def test_quantile_through_the_dip_raises():
    # alpha/2 = 0.475 sits between the stranded mass Phi(-0.1) ~ 0.460 and the
    # upper tail limit, so the bracket spans the dip and the probe must balk.
    with pytest.raises(fieller.NonMonotoneError):
        fieller.fieller_interval((1.0, 0.1), 0.95)


def test_center_through_the_dip_raises():
    with pytest.raises(fieller.NonMonotoneError):
        fieller.family().center((1.0, 0.1))


def test_family_member_matches_interval():
    fam = fieller.family()
    iv = fieller.fieller_interval((1.0, 20.0), 0.05)
    for phi in np.linspace(-0.2, 0.35, 45):
        if min(abs(phi - iv.lower), abs(phi - iv.upper)) < 1e-6:
            continue
        assert fam.member((1.0, 20.0), 0.05, phi) == (iv.lower <= phi <= iv.upper)


def test_family_member_batch_matches_scalar():
    fam = fieller.family()
    xs = np.asarray([[1.0, 20.0], [0.5, 3.0], [-0.7, 2.3]])
    for phi in (-0.1, 0.05, 0.4):
        got = fam.member_batch(xs, 0.1, phi)
        assert got.tolist() == [fam.member(x, 0.1, phi) for x in xs]


def test_center_is_the_median():
    # G((1, 20), 1/20) = 1/2 by symmetry of the reduced argument.
    assert fieller.family().center((1.0, 20.0)) == pytest.approx(0.05, abs=1e-7)


def test_sampling_shape_and_determinism():
    sm = fieller.sampling()
    a = sm.sample((1.0, 20.0), MCConfig(reps=500, seed=7))
    b = sm.sample((1.0, 20.0), MCConfig(reps=500, seed=7))
    assert a.shape == (500, 2)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sm.sample((1.0, 20.0), MCConfig(reps=500, seed=8)))
    assert np.mean(a[:, 0]) == pytest.approx(1.0, abs=4 / np.sqrt(500))
    assert np.mean(a[:, 1]) == pytest.approx(20.0, abs=4 / np.sqrt(500))


def test_interest_ratio():
    assert fieller.interest((3.0, 2.0)) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        fieller.interest((0.3, 0.0))


def test_equal_tailed_set_covers_at_nominal_rate_here():
    # With the +-infinity escape hatch the equal-tailed set is calibrated at
    # this truth; the batch runner reports whatever the draw says.
    est = coverage_probability(
        fieller.sampling(),
        fieller.family(),
        (1.0, 20.0),
        0.05,
        MCConfig(reps=4000, seed=29),
        interest=fieller.interest,
    )
    assert est.estimate == pytest.approx(0.95, abs=4 * math.sqrt(0.95 * 0.05 / 4000))
