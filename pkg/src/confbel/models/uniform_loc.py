"""Uniform location model: n draws from Unif(theta, theta + 1).

The sufficient summary is the pair ``x = (min, max)``.  With ``d = x2 - x1``
the exact-coverage interval family is

    C_alpha(x) = [x1 - (1 - d)(1 - alpha/2),  x1 - (1 - d) alpha/2],

whose coverage equals ``1 - alpha`` for every theta and every n.  Everything
about the fused construction is available in closed form here, which makes
this model the main exactness fixture: writing ``r = (x1 - theta) /
(1 + theta - x2)`` for theta strictly between ``x2 - 1`` and ``x1``, the
auxiliary supports are

    S_alpha = {u : alpha/(2 - alpha) <= u1 / (1 - u2) <= (2 - alpha)/alpha},

free of theta, the alpha index is ``2 min(r, 1) / (1 + r)``, the support mass
is exactly ``1 - alpha``, and the fused plausibility equals the alpha index.

The association is singular: focal sets are non-empty only on the diagonal
``u1 - u2 = x1 - x2`` of the auxiliary square, so naive sampled compatibility
checks would starve.  The deterministic witness ``u(x) = x - thetahat(x)``
with ``thetahat = (x1 + x2 - 1)/2`` resolves them.
"""

from __future__ import annotations

import numpy as np

from .. import distributions as dist
from ..audit import SamplingModel
from ..contours import ConfidenceFamily, GridSpec, Interval, IntervalUnion, PlausibilityContour
from ..fusion import Association, RandomSetFamily
from ..mc import MCConfig

_EMPTY = IntervalUnion(())


def _split(x):
    x1, x2 = float(x[0]), float(x[1])
    if x2 < x1:
        raise ValueError(f"(min, max) pair out of order: {x!r}")
    return x1, x2


def theta_hat(x) -> float:
    """Midpoint of the range-collapsed interval; center of every C_alpha."""
    x1, x2 = _split(x)
    return 0.5 * (x1 + x2 - 1.0)


def interval(x, alpha: float) -> Interval:
    x1, x2 = _split(x)
    slack = 1.0 - (x2 - x1)
    return Interval(x1 - slack * (1.0 - alpha / 2.0), x1 - slack * alpha / 2.0)


def member(x, alpha: float, theta: float) -> bool:
    iv = interval(x, alpha)
    return iv.lower <= theta <= iv.upper


def family() -> ConfidenceFamily:
    def member_batch(xs, alpha, theta):
        xs = np.asarray(xs, dtype=float)
        slack = 1.0 - (xs[:, 1] - xs[:, 0])
        lo = xs[:, 0] - slack * (1.0 - alpha / 2.0)
        hi = xs[:, 0] - slack * alpha / 2.0
        return (lo <= theta) & (theta <= hi)

    return ConfidenceFamily(member=member, center=theta_hat, member_batch=member_batch)


def alpha_index_exact(x, theta):
    """``2 min(r, 1) / (1 + r)`` with the degenerate edges handled explicitly."""
    x1, x2 = _split(x)
    thetas = np.asarray(theta, dtype=float)
    num = x1 - thetas  # u1 of the fiber point
    den = 1.0 + thetas - x2  # 1 - u2 of the fiber point
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
        val = 2.0 * np.minimum(r, 1.0) / (1.0 + r)
    out = np.where((num < 0.0) | (den < 0.0), 0.0, val)
    # num == den == 0 happens only when the range equals 1 and theta is the
    # single possible location; the fiber point is then in every support.
    out = np.where((np.abs(num) < 1e-14) & (np.abs(den) < 1e-14), 1.0, out)
    out = np.where(den == 0.0, np.where(np.abs(num) < 1e-14, 1.0, 0.0), out)
    return out if out.ndim else float(out)


def contour(x) -> PlausibilityContour:
    """Fused plausibility contour; equals the alpha index exactly."""
    return PlausibilityContour(
        lambda theta: alpha_index_exact(x, theta),
        sup_witness=theta_hat(x),
        unimodal=True,
    )


def association() -> Association:
    def fiber(x, theta):
        x1, x2 = _split(x)
        u = np.asarray([x1 - theta, x2 - theta], dtype=float)
        if u[0] < 0.0 or u[1] > 1.0 or u[0] > u[1]:
            return np.empty((0, 2))
        return u[None, :]

    def focal(x, u):
        x1, x2 = _split(x)
        u = np.ravel(np.asarray(u, dtype=float))
        t1, t2 = x1 - u[0], x2 - u[1]
        ok = abs(t1 - t2) <= 1e-12 and 0.0 <= u[0] <= u[1] <= 1.0
        return Interval(t1, t1) if ok else _EMPTY

    def compat_witness(x):
        th = theta_hat(x)
        return np.asarray([x[0] - th, x[1] - th], dtype=float)

    return Association(
        forward=lambda theta, u: (theta + u[0], theta + u[1]),
        fiber=fiber,
        focal=focal,
        compat_witness=compat_witness,
    )


def support_member(u, alpha, theta=None):
    """Closed membership in S_alpha (theta-free)."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    u1, u2 = u[:, 0], u[:, 1]
    slack = 1.0 - u2
    valid = (u1 >= 0.0) & (u2 <= 1.0) & (u1 <= u2)
    lo_ok = u1 * (2.0 - alpha) >= slack * alpha
    hi_ok = u1 * alpha <= slack * (2.0 - alpha)
    return valid & lo_ok & hi_ok


def random_set(n: int) -> RandomSetFamily:
    return RandomSetFamily(
        support_member=support_member,
        aux_sampler=lambda mc: dist.sample_uniform_minmax(n, mc),
        mass=lambda alpha, theta, mc: 1.0 - alpha,
    )


def sampling(n: int) -> SamplingModel:
    return SamplingModel(
        name=f"uniform_loc(n={n})",
        sample=lambda theta, mc: theta + dist.sample_uniform_minmax(n, mc),
    )


def contour_at_truth(xs, theta) -> np.ndarray:
    """Vectorized fused plausibility of the truth over (reps, 2) summaries."""
    xs = np.asarray(xs, dtype=float)
    num = xs[:, 0] - theta
    den = 1.0 + theta - xs[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
        val = 2.0 * np.minimum(r, 1.0) / (1.0 + r)
    return np.where((num < 0.0) | (den <= 0.0), 0.0, val)


def default_grid(x, n_points: int = 512) -> GridSpec:
    x1, x2 = _split(x)
    pad = 0.02 * max(1e-3, 1.0 - (x2 - x1))
    return GridSpec(x2 - 1.0 - pad, x1 + pad, n_points)
