"""Binomial success probability: exact tail intervals and their fused sharpening.

``X ~ Binomial(n, theta)``.  The equal-tailed exact family is

    C_alpha(x) = {theta : F_theta(x) >= alpha/2  and  1 - F_theta(x-1) >= alpha/2},

whose induced contour has the piecewise closed form (with ``F1 = F_theta(x-1)``
and ``F2 = F_theta(x)``)

    2 (1 - F1)   if F1 >= 1/2,
    2 F2         if F2 <= 1/2,
    1            otherwise,

equal to ``min(2 F2, 2(1 - F1), 1)``.  Fusing through the inverse-CDF
association ``x = min{k : F_theta(k) >= u}`` keeps the same alpha index but
replaces ``1 - alpha`` with the exact support mass, giving the sharpened
contour ``1 - g(theta, x)`` where

    g = sum over x' of pmf_theta(x') [F_theta(x') > alpha*/2] [F_theta(x'-1) < 1 - alpha*/2]

at ``alpha* = `` the piecewise contour above (strict inequalities: ``g`` is the
right limit of the support mass just beyond the index).  The sharpened contour
never exceeds the exact-tail one, and its level sets sit inside the exact-tail
intervals.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .. import distributions as dist
from ..audit import SamplingModel
from ..contours import ConfidenceFamily, GridRegion, GridSpec
from ..fusion import Association, RandomSetFamily
from ..mc import MCConfig


def cdf_given_theta(n: int, x, theta):
    """``F_theta(x)`` vectorized over theta via the incomplete-beta identity.

    Independent route from the summed-pmf table in :mod:`confbel.distributions`
    (the two are cross-checked in the test suite).
    """
    thetas = np.asarray(theta, dtype=float)
    xs = np.asarray(x)
    out = np.empty(np.broadcast(xs, thetas).shape, dtype=float)
    xb, tb = np.broadcast_arrays(xs, thetas)
    below = xb < 0
    above = xb >= n
    mid = ~below & ~above
    out[below] = 0.0
    out[above] = 1.0
    if np.any(mid):
        k = np.floor(xb[mid]).astype(float)
        out[mid] = special.betainc(n - k, k + 1.0, 1.0 - tb[mid])
    return out if out.ndim else float(out)


def sf_given_theta(n: int, x, theta):
    """``P(X >= x)`` vectorized, via the complementary incomplete-beta
    orientation rather than ``1 - F``: the upper tail keeps full relative
    accuracy however deep it is."""
    thetas = np.asarray(theta, dtype=float)
    xs = np.asarray(x)
    out = np.empty(np.broadcast(xs, thetas).shape, dtype=float)
    xb, tb = np.broadcast_arrays(xs, thetas)
    k = np.ceil(xb).astype(float)  # P(X >= x) = P(X >= ceil(x)) for real x
    below = k <= 0
    above = k > n
    mid = ~below & ~above
    out[below] = 1.0
    out[above] = 0.0
    if np.any(mid):
        out[mid] = special.betainc(k[mid], n - k[mid] + 1.0, tb[mid])
    return out if out.ndim else float(out)


def _tails(n: int, x: int, thetas):
    f1 = cdf_given_theta(n, x - 1, thetas)
    f2 = cdf_given_theta(n, x, thetas)
    return f1, f2


def cp_member(n: int, x: int, alpha: float, theta):
    """Exact-tail region membership, vectorized over theta."""
    thetas = np.asarray(theta, dtype=float)
    f2 = np.asarray(cdf_given_theta(n, x, thetas))
    sx = np.asarray(sf_given_theta(n, x, thetas))
    out = np.asarray((f2 >= alpha / 2.0) & (sx >= alpha / 2.0))
    return out if out.ndim else bool(out)


def cp_contour(n: int, x: int, theta):
    """``min(2 F2, 2 S, 1)`` with ``S = P(X >= x)``: the exact-tail contour
    and alpha index, each tail evaluated directly as a small number."""
    thetas = np.asarray(theta, dtype=float)
    f2 = np.asarray(cdf_given_theta(n, x, thetas))
    sx = np.asarray(sf_given_theta(n, x, thetas))
    out = np.minimum(np.minimum(2.0 * f2, 2.0 * sx), 1.0)
    return out if out.ndim else float(out)


def binom_g(n: int, x: int, theta):
    """Right-limit support mass ``g(theta, x)`` at the alpha index."""
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    astar = np.atleast_1d(cp_contour(n, x, thetas))
    ks = np.arange(n + 1, dtype=float)
    f_curr = cdf_given_theta(n, ks[:, None], thetas[None, :])
    # S[k] = P(X >= k) = 1 - F(k-1), but taken from the stable route.
    s_curr = sf_given_theta(n, ks[:, None], thetas[None, :])
    pmf = np.exp(dist.binom_log_pmf(n, ks[:, None], thetas[None, :]))
    qualifies = (f_curr > astar[None, :] / 2.0) & (s_curr > astar[None, :] / 2.0)
    g = np.sum(pmf * qualifies, axis=0)
    return g if np.ndim(theta) else float(g[0])


def _excluded_tail_mass(f, s, half):
    # Columns are theta points; mass outside the right-limit support is the
    # deepest low-tail CDF value still <= alpha*/2 plus its upper-tail twin.
    # Both addends are <= half by selection, so the sum can never round above
    # 2*half = alpha*: the sharpened contour stays below the exact-tail one
    # in float arithmetic, not just in the limit.
    lo = np.max(np.where(f <= half, f, 0.0), axis=0)
    hi = np.max(np.where(s <= half, s, 0.0), axis=0)
    return lo + hi


def im_contour(n: int, x: int, theta):
    """Fused contour: 1 at capped index, otherwise the excluded tail mass
    (equal to ``1 - g`` but evaluated without subtracting from one)."""
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    astar = np.atleast_1d(cp_contour(n, x, thetas))
    ks = np.arange(n + 1, dtype=float)
    f = cdf_given_theta(n, ks[:, None], thetas[None, :])
    s = sf_given_theta(n, ks[:, None], thetas[None, :])
    out = np.where(astar >= 1.0, 1.0, _excluded_tail_mass(f, s, astar[None, :] / 2.0))
    return out.reshape(np.shape(theta)) if np.ndim(theta) else float(out[0])


def im_contour_by_x(n: int, theta: float) -> np.ndarray:
    """Fused contour of ``theta`` for every possible outcome x = 0..n at once."""
    table = dist.binom_cdf_table(n, theta)  # F(0..n)
    ks = np.arange(n + 1, dtype=float)
    sf = np.asarray(sf_given_theta(n, ks, float(theta)))
    astar = np.minimum(np.minimum(2.0 * table, 2.0 * sf), 1.0)
    im = _excluded_tail_mass(table[:, None], sf[:, None], astar[None, :] / 2.0)
    return np.where(astar >= 1.0, 1.0, im)


def family(n: int) -> ConfidenceFamily:
    def member(x, alpha, theta):
        return bool(cp_member(n, int(x), alpha, float(theta)))

    def member_batch(xs, alpha, theta):
        xs = np.asarray(xs)
        table = dist.binom_cdf_table(n, float(theta))
        f_of = lambda k: np.where(k < 0, 0.0, table[np.clip(k.astype(int), 0, n)])
        f1, f2 = f_of(xs - 1), f_of(xs)
        return (f2 >= alpha / 2.0) & (1.0 - f1 >= alpha / 2.0)

    def center(x):
        # The median-unbiased-ish anchor: any theta with both tails above 1/2.
        return float(np.clip(x / n, 1e-9, 1.0 - 1e-9))

    return ConfidenceFamily(member=member, center=center, member_batch=member_batch)


def association(n: int) -> Association:
    def forward(theta, u):
        table = dist.binom_cdf_table(n, theta)
        return int(np.searchsorted(table, u, side="left"))

    def fiber(x, theta):
        x = int(x)
        table = dist.binom_cdf_table(n, float(theta))
        f1 = 0.0 if x == 0 else table[x - 1]
        f2 = table[x]
        if f2 - f1 <= 1e-300:
            return np.empty((0, 1))
        return np.asarray([[0.5 * (f1 + f2)]])

    def focal(x, u):
        # {theta : F_theta(x-1) < u <= F_theta(x)}, an interval in theta
        # because both tails are monotone in theta; resolved on a fine grid.
        u = float(np.ravel(u)[0])
        grid = np.linspace(0.0, 1.0, 4097)
        f1, f2 = _tails(n, int(x), grid)
        mask = (f1 < u) & (u <= f2)
        return GridRegion(grid, mask)

    return Association(forward=forward, fiber=fiber, focal=focal)


def support_member(n: int):
    def member(u, alpha, theta):
        u = np.ravel(np.asarray(u, dtype=float))
        table = dist.binom_cdf_table(n, float(theta))
        xs = np.searchsorted(table, u, side="left")
        xs = np.clip(xs, 0, n)
        f1 = np.where(xs == 0, 0.0, table[np.maximum(xs - 1, 0)])
        f2 = table[xs]
        return (f2 >= alpha / 2.0) & (1.0 - f1 >= alpha / 2.0)

    return member


def exact_mass(n: int, alpha: float, theta: float) -> float:
    """``P_U(S_alpha(theta))`` by full outcome enumeration (closed version)."""
    table = dist.binom_cdf_table(n, float(theta))
    pmf = np.diff(table, prepend=0.0)
    f1 = np.concatenate([[0.0], table[:-1]])
    keep = (table >= alpha / 2.0) & (1.0 - f1 >= alpha / 2.0)
    return float(np.sum(pmf[keep]))


def random_set(n: int) -> RandomSetFamily:
    return RandomSetFamily(
        support_member=support_member(n),
        aux_sampler=lambda mc: mc.uniforms(),
        mass=lambda alpha, theta, mc: exact_mass(n, alpha, theta),
    )


def sampling(n: int) -> SamplingModel:
    return SamplingModel(
        name=f"binomial(n={n})",
        sample=lambda theta, mc: dist.sample(dist.binomial(n, float(theta)), mc).astype(int),
    )


def contour_at_truth(n: int):
    def fn(xs, theta):
        by_x = im_contour_by_x(n, float(theta))
        return by_x[np.asarray(xs, dtype=int)]

    return fn


def default_grid(n_points: int = 512) -> GridSpec:
    return GridSpec(0.001, 0.999, n_points)
