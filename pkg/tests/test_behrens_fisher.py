"""Two-sample mean difference with unequal variances: interval family vs fusion."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from confbel.audit import coverage_probability
from confbel.mc import MCConfig
from confbel.models import behrens_fisher as bf
from confbel.reportio import write_rows

# independently computed from the stock data (arbitrary-precision t CDF)
DIFF = 1.444
SE = 0.67382220476648262
T4_Q_975 = 2.7764451051977944
HS_AT_ZERO = 0.098754664550390614

MC = MCConfig(reps=100_000, seed=11)


def test_data_summaries():
    d = bf.DEFAULT_DATA
    assert d.diff == pytest.approx(DIFF, abs=1e-15)
    assert d.se == pytest.approx(SE, abs=1e-15)
    assert d.dof == 4
    with pytest.raises(ValueError):
        bf.BehrensFisherData(1, 0.0, 1.0, 5, 0.0, 1.0)
    with pytest.raises(ValueError):
        bf.BehrensFisherData(5, 0.0, 0.0, 5, 0.0, 1.0)


def test_from_csv_raw_rows(tmp_path):
    rows = [{"group": "a", "value": v} for v in ("1.0", "2.0", "3.0")]
    rows += [{"group": "b", "value": v} for v in ("10.0", "14.0")]
    path = tmp_path / "raw.csv"
    write_rows(path, rows, {}, "csv")
    d = bf.BehrensFisherData.from_csv(path)
    assert (d.n1, d.n2) == (3, 2)
    assert d.m1 == pytest.approx(2.0)
    assert d.v1 == pytest.approx(1.0)  # ddof = 1
    assert d.m2 == pytest.approx(12.0)
    assert d.v2 == pytest.approx(8.0)


def test_from_csv_summary_form(tmp_path):
    rows = [
        {"n": "5", "mean": "7.580", "variance": "2.237"},
        {"n": "11", "mean": "6.136", "variance": "0.073"},
    ]
    path = tmp_path / "summary.csv"
    write_rows(path, rows, {}, "csv")
    d = bf.BehrensFisherData.from_csv(path)
    assert d == bf.DEFAULT_DATA

    bad = tmp_path / "bad.csv"
    write_rows(bad, rows[:1], {}, "csv")
    with pytest.raises(ValueError):
        bf.BehrensFisherData.from_csv(bad)


def test_hs_contour_and_interval():
    d = bf.DEFAULT_DATA
    assert bf.hs_contour(d, d.diff) == pytest.approx(1.0, abs=1e-14)
    assert bf.hs_contour(d, 0.0) == pytest.approx(HS_AT_ZERO, abs=1e-12)
    iv = bf.hs_interval(d, 0.05)
    assert iv.lower == pytest.approx(DIFF - T4_Q_975 * SE, abs=1e-9)
    assert iv.upper == pytest.approx(DIFF + T4_Q_975 * SE, abs=1e-9)
    # contour at the endpoints returns the level
    assert bf.hs_contour(d, iv.lower) == pytest.approx(0.05, abs=1e-9)


def test_pivotal_draws_cached_and_shaped():
    a = bf.pivotal_draws(5, 11, MC)
    b = bf.pivotal_draws(5, 11, MC)
    assert a is b
    assert a.shape == (MC.reps, 3)
    # u21 ~ mean of 4 squared normals: mean 1, var 1/2
    assert a[:, 1].mean() == pytest.approx(1.0, abs=0.02)
    assert a[:, 2].mean() == pytest.approx(1.0, abs=0.02)


def test_t_lambda_edges():
    u = np.asarray([[1.0, 4.0, 0.25]])
    assert bf.t_lambda(u, 1.0)[0] == pytest.approx(0.5)
    assert bf.t_lambda(u, 0.0)[0] == pytest.approx(2.0)
    assert bf.t_lambda(u, 0.5)[0] == pytest.approx(1.0 / np.sqrt(0.5 * 4.25))


def test_lambda_of():
    assert bf.lambda_of((0.0, 0.0, 1.0, 1.0), 5, 11) == pytest.approx((1 / 5) / (1 / 5 + 1 / 11))
    assert bf.lambda_of((0.0, 0.0, 1.0, 1e9), 5, 11) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ValueError):
        bf.lambda_of((0.0, 0.0, -1.0, 1.0), 5, 11)


def test_lambda_one_slice_is_exact_t():
    # at lambda = 1 the pivot is a plain |t| with dof = n1 - 1 = dof of the
    # interval family, so the sampled slice must match the closed form
    d = bf.DEFAULT_DATA
    phis = np.linspace(d.diff - 4 * d.se, d.diff + 4 * d.se, 21)
    got = bf.bf_lambda_plaus(d, phis, 1.0, MC)
    want = bf.hs_contour(d, phis)
    assert np.max(np.abs(got - want)) < 0.01


def test_lambda_plaus_validation():
    with pytest.raises(ValueError):
        bf.bf_lambda_plaus(bf.DEFAULT_DATA, 0.0, 1.5, MC)


def test_marginal_dominates_slices_and_peaks_at_one():
    d = bf.DEFAULT_DATA
    phis = np.linspace(d.diff - 3 * d.se, d.diff + 3 * d.se, 41)
    marginal = bf.bf_marginal_contour(d, phis, MC)
    for lam in (0.0, 0.3, 0.7, 1.0):
        slice_pl = bf.bf_lambda_plaus(d, phis, lam, MC)
        assert np.all(marginal >= slice_pl - 1e-12)
    assert bf.bf_marginal_contour(d, d.diff, MC) == pytest.approx(1.0, abs=1e-12)


def test_family_coverage_nominal():
    theta = (0.0, 0.0, 4.0, 1.0)
    est = coverage_probability(
        bf.sampling(5, 11),
        bf.family(5, 11),
        theta,
        0.05,
        MCConfig(reps=20_000, seed=47),
        interest=lambda t: t[0] - t[1],
    )
    # the interval family is conservative for unequal variances: >= nominal
    assert est.estimate >= 0.95 - 4 * est.se


def test_association_round_trip():
    assoc = bf.association(5, 11)
    theta = (1.2, 4.0, 1.0)  # (phi, s1, s2)
    x = (2.0, 3.1, 0.8)  # (d, v1, v2)
    u = assoc.fiber(x, theta)
    assert u.shape == (1, 3)
    fwd = assoc.forward(theta, u[0])
    assert_allclose(fwd, x, atol=1e-12)
    focal = assoc.focal(x, u[0])
    assert_allclose(np.ravel(focal.included()), theta, atol=1e-12)


def test_contour_at_truth_validity():
    fn = bf.contour_at_truth(5, 11, MC)
    theta = (0.0, 0.0, 4.0, 1.0)
    mc = MCConfig(reps=10_000, seed=53)
    xs = bf.sampling(5, 11).sample(theta, mc)
    pls = fn(xs, theta)
    assert pls.shape == (mc.reps,)
    for alpha in (0.05, 0.25, 0.5):
        se = np.sqrt(alpha * (1 - alpha) / mc.reps)
        assert np.mean(pls <= alpha) <= alpha + 3 * se


def test_default_grid_centered():
    g = bf.default_grid(bf.DEFAULT_DATA)
    pts = g.points()
    assert len(pts) == 201
    assert pts[0] == pytest.approx(DIFF - 6 * SE)
    assert pts[-1] == pytest.approx(DIFF + 6 * SE)
