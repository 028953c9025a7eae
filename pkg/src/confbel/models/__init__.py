"""Worked models, each packaged as a :class:`ModelBundle`.

A bundle collects everything the audits and the containment checks need about
one model: the confidence-region family, the association and random-set pair
behind the fused contour, a data generator under a declared truth, and
vectorized evaluators for the fused contour and region membership over an
interest-parameter grid.  ``REGISTRY`` maps bundle names to factories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .. import distributions as dist
from ..audit import SamplingModel
from ..contours import ConfidenceFamily, GridSpec
from ..fusion import Association, RandomSetFamily
from ..mc import MCConfig
from . import behrens_fisher, binomial, dkw, fieller, normal_mean, uniform_loc

__all__ = [
    "ModelBundle",
    "REGISTRY",
    "behrens_fisher",
    "binomial",
    "dkw",
    "fieller",
    "normal_mean",
    "uniform_loc",
    "behrens_fisher_bundle",
    "binomial_bundle",
    "dkw_bundle",
    "normal_mean_bundle",
    "uniform_loc_bundle",
]


@dataclass(frozen=True)
class ModelBundle:
    """One model's family, fused construction, and audit plumbing.

    ``plaus_grid(x, phis)`` and ``member_grid(x, alpha, phis)`` evaluate the
    fused contour and the confidence-region membership over the same
    interest-parameter candidates, which is how containment gets checked.
    ``contour_at_truth(xs, theta)`` feeds the validity audits.
    ``mc_boundary_se`` is zero for exact contours and three Monte Carlo
    standard errors for estimated ones; containment checks exempt grid points
    whose contour sits within that distance of the level.
    """

    name: str
    family: ConfidenceFamily
    association: Association
    random_set: RandomSetFamily
    sampling: SamplingModel
    contour_at_truth: Callable
    plaus_grid: Callable
    member_grid: Callable
    default_grid: Callable
    data_replicates: Callable
    interest: Callable
    theta_grid_hint: tuple = ()
    mc_boundary_se: float = 0.0
    containment_candidates: Callable | None = None

    def candidates_for(self, x) -> Sequence:
        if self.containment_candidates is not None:
            return self.containment_candidates(x)
        return self.default_grid(x).points()


def binomial_bundle(n: int = 25) -> ModelBundle:
    return ModelBundle(
        name="binomial",
        family=binomial.family(n),
        association=binomial.association(n),
        random_set=binomial.random_set(n),
        sampling=binomial.sampling(n),
        contour_at_truth=binomial.contour_at_truth(n),
        plaus_grid=lambda x, phis: binomial.im_contour(n, int(x), phis),
        member_grid=lambda x, alpha, phis: binomial.cp_member(n, int(x), alpha, phis),
        default_grid=lambda x: binomial.default_grid(),
        data_replicates=lambda theta, k, mc: [
            int(v) for v in dist.sample(dist.binomial(n, float(theta)), mc.with_reps(k))
        ],
        interest=lambda theta: theta,
        theta_grid_hint=tuple(np.round(np.linspace(0.1, 0.9, 9), 10)),
    )


def uniform_loc_bundle(n: int = 10) -> ModelBundle:
    def member_grid(x, alpha, phis):
        iv = uniform_loc.interval(x, alpha)
        phis = np.asarray(phis, dtype=float)
        return (phis >= iv.lower) & (phis <= iv.upper)

    return ModelBundle(
        name="uniform_loc",
        family=uniform_loc.family(),
        association=uniform_loc.association(),
        random_set=uniform_loc.random_set(n),
        sampling=uniform_loc.sampling(n),
        contour_at_truth=uniform_loc.contour_at_truth,
        plaus_grid=lambda x, phis: uniform_loc.alpha_index_exact(x, phis),
        member_grid=member_grid,
        default_grid=uniform_loc.default_grid,
        data_replicates=lambda theta, k, mc: list(theta + dist.sample_uniform_minmax(n, mc.with_reps(k))),
        interest=lambda theta: theta,
        theta_grid_hint=(0.0, 0.37),
    )


def normal_mean_bundle() -> ModelBundle:
    def member_grid(x, alpha, phis):
        z = dist.quantile(dist.normal(), 1.0 - alpha / 2.0)
        return np.abs(float(x) - np.asarray(phis, dtype=float)) <= z

    return ModelBundle(
        name="normal_mean",
        family=normal_mean.family(),
        association=normal_mean.association(),
        random_set=normal_mean.random_set(),
        sampling=normal_mean.sampling(),
        contour_at_truth=lambda xs, theta: normal_mean.pivot_contour(xs, theta),
        plaus_grid=lambda x, phis: normal_mean.pivot_contour(float(x), phis),
        member_grid=member_grid,
        default_grid=lambda x: GridSpec(float(x) - 8.0, float(x) + 8.0, 512),
        data_replicates=lambda theta, k, mc: list(theta + dist.sample(dist.normal(), mc.with_reps(k))),
        interest=lambda theta: theta,
        theta_grid_hint=(0.0, 1.3),
    )


def behrens_fisher_bundle(
    n1: int = 5,
    n2: int = 11,
    mc_internal: MCConfig = MCConfig(reps=100_000, seed=11),
) -> ModelBundle:
    def member_grid(x, alpha, phis):
        iv = behrens_fisher.hs_interval(x, alpha)
        phis = np.asarray(phis, dtype=float)
        return (phis >= iv.lower) & (phis <= iv.upper)

    def data_replicates(theta, k, mc):
        rows = behrens_fisher.sampling(n1, n2).sample(theta, mc.with_reps(k))
        return [
            behrens_fisher.BehrensFisherData(n1, float(r[0]), float(r[2]), n2, float(r[1]), float(r[3]))
            for r in rows
        ]

    return ModelBundle(
        name="behrens_fisher",
        family=behrens_fisher.family(n1, n2),
        association=behrens_fisher.association(n1, n2),
        random_set=behrens_fisher.random_set(n1, n2),
        sampling=behrens_fisher.sampling(n1, n2),
        contour_at_truth=behrens_fisher.contour_at_truth(n1, n2, mc_internal),
        plaus_grid=lambda x, phis: behrens_fisher.bf_marginal_contour(x, phis, mc_internal),
        member_grid=member_grid,
        default_grid=behrens_fisher.default_grid,
        data_replicates=data_replicates,
        interest=lambda theta: float(theta[0] - theta[1]) if len(theta) == 4 else float(theta[0]),
        theta_grid_hint=((0.0, 0.0, 4.0, 1.0),),
        mc_boundary_se=3.0 * float(np.sqrt(0.25 / mc_internal.reps)),
    )


def dkw_bundle(n: int = 799, mc_internal: MCConfig = MCConfig(reps=100_000, seed=23)) -> ModelBundle:
    def contour_at_truth(xs, truth):
        u = np.asarray(truth.cdf(np.asarray(xs, dtype=float)))
        d = dkw.ks_distances(u)
        table = dkw.ks_null_sample(n, mc_internal)
        return 1.0 - np.searchsorted(table, d, side="left") / len(table)

    def plaus_grid(x, candidates):
        return np.asarray([dkw.dkw_contour(x, c, mc_internal)[1] for c in candidates])

    def member_grid(x, alpha, candidates):
        delta = dkw.dkw_delta(x.n, alpha)
        return np.asarray([dkw.sup_norm(x, c) <= delta for c in candidates])

    def containment_candidates(x):
        ehat = x.ecdf()
        delta = dkw.dkw_delta(x.n, 0.05)
        shifted = [
            dkw.StepFn(ehat.xs, np.clip(ehat.ys + c * delta, 0.0, 1.0), y_pre=float(np.clip(c * delta, 0.0, 1.0)))
            for c in (-1.5, -1.0, -0.6, -0.25, 0.0, 0.25, 0.6, 1.0, 1.5)
        ]
        scale = float(np.mean(x.values))
        smooth = dkw.ParametricCDF(
            cdf=lambda t: -np.expm1(-np.maximum(np.asarray(t, dtype=float), 0.0) / scale),
            quantile=lambda u: -scale * np.log1p(-u),
        )
        return shifted + [smooth]

    def data_replicates(truth, k, mc):
        rows = dkw.sampling(n).sample(truth, mc.with_reps(k))
        return [dkw.EmpiricalSample(r) for r in rows]

    unit_exp = dkw.ParametricCDF(
        cdf=lambda t: -np.expm1(-np.maximum(np.asarray(t, dtype=float), 0.0)),
        quantile=lambda u: -np.log1p(-u),
    )
    return ModelBundle(
        name="dkw",
        family=ConfidenceFamily(
            member=lambda x, alpha, f: dkw.sup_norm(x, f) <= dkw.dkw_delta(x.n, alpha),
            center=lambda x: x.ecdf(),
        ),
        association=dkw.association(n),
        random_set=dkw.random_set(n),
        sampling=dkw.sampling(n),
        contour_at_truth=contour_at_truth,
        plaus_grid=plaus_grid,
        member_grid=member_grid,
        default_grid=lambda x: GridSpec(0.0, 1.0, 2),  # unused; candidates are CDFs
        data_replicates=data_replicates,
        interest=lambda truth: truth,
        theta_grid_hint=(unit_exp,),
        mc_boundary_se=3.0 * float(np.sqrt(0.25 / mc_internal.reps)),
        containment_candidates=containment_candidates,
    )


REGISTRY: dict[str, Callable[[], ModelBundle]] = {
    "binomial": binomial_bundle,
    "uniform_loc": uniform_loc_bundle,
    "normal_mean": normal_mean_bundle,
    "behrens_fisher": behrens_fisher_bundle,
    "dkw": dkw_bundle,
}
