"""Monte Carlo calibration audits.

Three questions get answered here, all by simulation under a declared truth:

* coverage: how often does ``C_alpha(X)`` capture the interest value;
* contour validity: is ``P{pl_X(theta) <= alpha} <= alpha`` at the truth;
* assertion validity: the same bound for ``pl_X(A)`` when the truth is in ``A``.

Estimates are flagged when they exceed the nominal level by more than
``flag_sigma`` binomial standard errors (default 3).  Each parameter point
gets its own substream, and every alpha level within a point shares the same
draws, so exceedance curves are monotone in alpha by construction and audit
results are reproducible bit for bit from the Monte Carlo configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .contours import Assertion, ConfidenceFamily, as_alpha
from .mc import MCConfig
from .reportio import write_rows

DEFAULT_ALPHA_GRID = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9)
DEFAULT_FLAG_SIGMA = 3.0


@dataclass(frozen=True)
class SamplingModel:
    """Data generator for audits: ``sample(theta, mc)`` returns mc.reps draws.

    The return value is whatever the audited callables consume: a 1-d array
    for scalar data, an (reps, k) array for vector summaries.
    """

    name: str
    sample: Callable[..., np.ndarray]


@dataclass(frozen=True)
class CoverageEstimate:
    theta: object
    alpha: float
    estimate: float
    se: float
    reps: int

    def as_row(self) -> dict:
        return {
            "theta": _label(self.theta),
            "alpha": self.alpha,
            "estimate": self.estimate,
            "se": self.se,
            "reps": self.reps,
        }


@dataclass(frozen=True)
class AuditRow:
    label: str
    alpha: float
    exceedance: float
    se: float
    flagged: bool
    reps: int

    def as_row(self) -> dict:
        return {
            "label": self.label,
            "alpha": self.alpha,
            "exceedance": self.exceedance,
            "se": self.se,
            "flagged": self.flagged,
            "reps": self.reps,
        }


@dataclass(frozen=True)
class AuditReport:
    """Rows of exceedance estimates plus the provenance needed to rerun them."""

    kind: str
    rows: tuple[AuditRow, ...]
    metadata: dict

    def flagged(self) -> tuple[AuditRow, ...]:
        return tuple(r for r in self.rows if r.flagged)

    @property
    def passed(self) -> bool:
        return not self.flagged()

    def worst_excess(self) -> float:
        """Largest (exceedance - alpha) over all rows; negative when clean."""
        return max((r.exceedance - r.alpha) for r in self.rows)

    def write(self, path, fmt: str = "csv") -> None:
        write_rows(path, [r.as_row() for r in self.rows], dict(self.metadata), fmt)


def _label(theta) -> str:
    if np.ndim(theta) == 0:
        return f"{float(theta):.10g}"
    return "(" + ", ".join(f"{float(t):.10g}" for t in np.ravel(np.asarray(theta, dtype=float))) + ")"


def coverage_probability(
    sampling: SamplingModel,
    family: ConfidenceFamily,
    theta,
    alpha,
    mc: MCConfig,
    interest: Callable | None = None,
) -> CoverageEstimate:
    """Estimate ``P{C_alpha(X) contains phi(theta)}`` under truth ``theta``."""
    a = as_alpha(alpha)
    phi = interest(theta) if interest is not None else theta
    xs = sampling.sample(theta, mc)
    if family.member_batch is not None:
        hits = np.asarray(family.member_batch(xs, a, phi), dtype=bool)
    else:
        hits = np.fromiter((bool(family.member(x, a, phi)) for x in xs), dtype=bool, count=len(xs))
    est = float(np.mean(hits))
    se = float(np.sqrt(est * (1.0 - est) / len(hits)))
    return CoverageEstimate(theta, a, est, se, len(hits))


def _exceedance_rows(
    label: str,
    pls: np.ndarray,
    alpha_grid: Sequence[float],
    flag_sigma: float,
) -> list[AuditRow]:
    reps = len(pls)
    rows = []
    for alpha in alpha_grid:
        a = as_alpha(alpha)
        exceed = float(np.mean(pls <= a))
        se = float(np.sqrt(a * (1.0 - a) / reps))
        rows.append(AuditRow(label, a, exceed, se, exceed > a + flag_sigma * se, reps))
    return rows


def contour_validity_audit(
    sampling: SamplingModel,
    contour_at_truth: Callable[..., np.ndarray],
    theta_grid: Sequence,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    mc: MCConfig = MCConfig(reps=10_000),
    flag_sigma: float = DEFAULT_FLAG_SIGMA,
) -> AuditReport:
    """Audit ``P{pl_X(theta) <= alpha} <= alpha`` over a grid of truths.

    ``contour_at_truth(xs, theta)`` must evaluate the plausibility of the
    truth for every sampled data value at once (array in, array out).
    """
    rows: list[AuditRow] = []
    for i, theta in enumerate(theta_grid):
        sub = mc.substream(i)
        xs = sampling.sample(theta, sub)
        pls = np.asarray(contour_at_truth(xs, theta), dtype=float)
        if pls.shape != (len(xs),):
            raise ValueError("contour_at_truth must return one plausibility per draw")
        rows.extend(_exceedance_rows(_label(theta), pls, alpha_grid, flag_sigma))
    meta = {
        "report": "contour-validity",
        "model": sampling.name,
        "reps": mc.reps,
        "seed": mc.seed,
        "stream_id": mc.stream_id,
        "flag_sigma": flag_sigma,
        "alpha_grid": ",".join(f"{as_alpha(a):g}" for a in alpha_grid),
    }
    return AuditReport("contour-validity", tuple(rows), meta)


def assertion_validity_audit(
    sampling: SamplingModel,
    assertion_plaus: Callable[..., np.ndarray],
    assertion: Assertion,
    theta_grid: Sequence,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    mc: MCConfig = MCConfig(reps=10_000),
    flag_sigma: float = DEFAULT_FLAG_SIGMA,
) -> AuditReport:
    """Audit ``P{pl_X(A) <= alpha} <= alpha`` for truths inside ``A``.

    The bound only holds for true parameters belonging to the assertion, so
    every grid point is checked for membership first.
    """
    for theta in theta_grid:
        if not assertion.contains(theta):
            raise ValueError(f"truth {theta!r} lies outside the audited assertion")
    rows: list[AuditRow] = []
    for i, theta in enumerate(theta_grid):
        sub = mc.substream(i)
        xs = sampling.sample(theta, sub)
        pls = np.asarray(assertion_plaus(xs, theta), dtype=float)
        if pls.shape != (len(xs),):
            raise ValueError("assertion_plaus must return one plausibility per draw")
        rows.extend(_exceedance_rows(_label(theta), pls, alpha_grid, flag_sigma))
    meta = {
        "report": "assertion-validity",
        "model": sampling.name,
        "reps": mc.reps,
        "seed": mc.seed,
        "stream_id": mc.stream_id,
        "flag_sigma": flag_sigma,
        "alpha_grid": ",".join(f"{as_alpha(a):g}" for a in alpha_grid),
    }
    return AuditReport("assertion-validity", tuple(rows), meta)


def ks_uniform(samples) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and Uniform(0, 1).

    Inputs must already live in [0, 1]; the statistic is the exact sup-norm
    distance between the empirical CDF and the identity.
    """
    u = np.sort(np.asarray(samples, dtype=float))
    n = len(u)
    if n == 0:
        raise ValueError("ks_uniform needs at least one sample")
    if u[0] < -1e-12 or u[-1] > 1.0 + 1e-12:
        raise ValueError("samples must lie in [0, 1]")
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - u)
    d_minus = np.max(u - (i - 1) / n)
    return float(max(d_plus, d_minus))
