"""Ratio of two normal means: the confidence-distribution cautionary tale.

``X = (X1, X2)`` with independent ``Xi ~ N(theta_i, 1)`` and interest
``phi = theta_1 / theta_2``.  The distribution-function assignment

    G_x(phi) = integral of Phi(phi z - x1) f(z - x2) dz   (f standard normal)

looks like a CDF for ``phi`` but is not one: it strands probability mass
``Phi(-x2)`` beyond each end of the real line, it dips (loses monotonicity)
around ``phi = -x2/x1`` whenever the denominator observation is small, and for
``x2 < 0`` it runs backwards entirely.  The equal-tailed construction
``{phi : alpha/2 <= G_x(phi) <= 1 - alpha/2}`` inherits those defects: its
endpoints escape to +-infinity exactly when the data stop identifying the
ratio, and quantile requests inside a non-monotone stretch have no answer at
all (:class:`NonMonotoneError`).  This module ships the construction as the
cautionary fixture for additive confidence assignments; it deliberately has no
fused counterpart, and the batch runner simply reports its Monte Carlo
coverage as observed.

Two quadrature routes are kept deliberately separate: an adaptive scalar one
with an error check, and a fixed-grid vectorized Simpson rule over
``z in [x2 - 10, x2 + 10]`` (truncation error under 1e-23) for Monte Carlo
work.  The tests hold them against each other and against a high-precision
oracle.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate, optimize, special

from .. import distributions as dist
from ..audit import SamplingModel
from ..contours import ConfidenceFamily, Interval
from ..mc import MCConfig

_HALF_WIDTH = 10.0
_SIMPSON_POINTS = 1601
_QUAD_TOL = 1e-8


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach the requested accuracy."""


class NonMonotoneError(RuntimeError):
    """G_x is not monotone where an inverse was requested."""


def _phi_pdf(z):
    return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)


def fieller_cdf(x, phi: float) -> float:
    """Scalar ``G_x(phi)`` by adaptive quadrature (absolute tolerance 1e-10)."""
    x1, x2 = float(x[0]), float(x[1])
    val, err = integrate.quad(
        lambda z: special.ndtr(phi * z - x1) * _phi_pdf(z - x2),
        x2 - _HALF_WIDTH,
        x2 + _HALF_WIDTH,
        epsabs=1e-10,
        epsrel=1e-10,
        limit=200,
    )
    if err > _QUAD_TOL:
        raise QuadratureError(f"G quadrature achieved only {err:.3g} absolute error at phi={phi!r}")
    return float(val)


_S_GRID = np.linspace(-_HALF_WIDTH, _HALF_WIDTH, _SIMPSON_POINTS)
_S_PDF = _phi_pdf(_S_GRID)


def fieller_cdf_batch(xs, phi) -> np.ndarray:
    """``G_x(phi)`` for many data rows at once (fixed-grid Simpson rule).

    ``xs`` is (m, 2); ``phi`` is a scalar or an (m,) array.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    phis = np.broadcast_to(np.asarray(phi, dtype=float), (len(xs),))
    z = xs[:, 1:2] + _S_GRID[None, :]
    integrand = special.ndtr(phis[:, None] * z - xs[:, 0:1]) * _S_PDF[None, :]
    return integrate.simpson(integrand, x=_S_GRID, axis=1)


def mass_at_infinity(x) -> float:
    """The CDF mass ``Phi(-x2)`` stranded beyond each end of the real line."""
    return float(special.ndtr(-float(x[1])))


def _g_inverse(x, p: float) -> float:
    """Solve ``G_x(phi) = p``; +-inf when the stranded mass swallows ``p``."""
    tail = mass_at_infinity(x)
    if p <= tail:
        return -np.inf
    if p >= 1.0 - tail:
        return np.inf
    lo, hi = -1.0, 1.0
    for _ in range(60):
        if fieller_cdf(x, lo) < p:
            break
        lo *= 2.0
    else:
        return -np.inf
    for _ in range(60):
        if fieller_cdf(x, hi) > p:
            break
        hi *= 2.0
    else:
        return np.inf
    probe = fieller_cdf_batch(np.asarray([x] * 41), np.linspace(lo, hi, 41))
    if np.any(np.diff(probe) < -1e-7):
        raise NonMonotoneError(f"G_x is not monotone on [{lo}, {hi}] for x={tuple(x)!r}")
    return float(optimize.brentq(lambda t: fieller_cdf(x, t) - p, lo, hi, xtol=1e-9))


def fieller_interval(x, alpha) -> Interval:
    """Equal-tailed set ``{phi : alpha/2 <= G_x(phi) <= 1 - alpha/2}``.

    Endpoints become infinite when ``Phi(-x2) >= alpha/2``; that is the
    mass-at-infinity escape hatch, not an error.
    """
    a = float(alpha)
    if not 0.0 < a < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return Interval(_g_inverse(x, a / 2.0), _g_inverse(x, 1.0 - a / 2.0))


def family() -> ConfidenceFamily:
    def member(x, alpha, phi):
        g = fieller_cdf(x, float(phi))
        return alpha / 2.0 <= g <= 1.0 - alpha / 2.0

    def member_batch(xs, alpha, phi):
        g = fieller_cdf_batch(xs, phi)
        return (g >= alpha / 2.0) & (g <= 1.0 - alpha / 2.0)

    def center(x):
        return _g_inverse(x, 0.5)

    return ConfidenceFamily(member=member, center=center, member_batch=member_batch)


def sampling() -> SamplingModel:
    def sample(theta, mc: MCConfig):
        t = np.asarray(theta, dtype=float)
        z = special.ndtri(mc.generator().random((mc.reps, 2)))
        return t[None, :] + z

    return SamplingModel(name="fieller", sample=sample)


def interest(theta) -> float:
    t1, t2 = float(theta[0]), float(theta[1])
    if t2 == 0.0:
        raise ValueError("theta_2 = 0 has no defined ratio")
    return t1 / t2
