"""Distribution primitives used by the contour and fusion machinery.

A small closed universe of families is enough for every model shipped here:
standard normal, Student t, chi-square, binomial, and Uniform(0, 1).  Each is
exposed through one frozen spec type and three operations (``cdf``,
``quantile``, ``sample``) so the rest of the package never touches a
distribution library directly.

Continuous CDFs delegate to scipy.special (double-precision incomplete
beta/gamma); the binomial CDF is an exact log-space probability-mass summation.
Quantiles invert the CDF: vectorized bisection for continuous families, the
minimal ``k`` with ``F(k) >= p`` for the binomial.  Samplers are inverse-CDF
transforms of Philox uniforms (see :mod:`confbel.mc`), which makes the binomial
sampler identical to the inversion used by the binomial association.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .mc import MCConfig

FAMILIES = ("normal", "student_t", "chi_square", "binomial", "uniform01")

_QUANTILE_TOL = 1e-10


@dataclass(frozen=True)
class DistSpec:
    """One member of the supported distribution universe.

    Parameters
    ----------
    family : str
        One of ``normal``, ``student_t``, ``chi_square``, ``binomial``,
        ``uniform01``.
    df : int, optional
        Degrees of freedom; required for ``student_t`` and ``chi_square``.
    n, p : optional
        Trial count and success probability; required for ``binomial``.
    """

    family: str
    df: int | None = None
    n: int | None = None
    p: float | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family in ("student_t", "chi_square"):
            if self.df is None or self.df < 1:
                raise ValueError(f"{self.family} requires integer df >= 1, got {self.df!r}")
        elif self.df is not None:
            raise ValueError(f"df is not a parameter of {self.family!r}")
        if self.family == "binomial":
            if self.n is None or self.n < 1:
                raise ValueError(f"binomial requires integer n >= 1, got {self.n!r}")
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"binomial requires p in [0, 1], got {self.p!r}")
        elif self.n is not None or self.p is not None:
            raise ValueError(f"n/p are not parameters of {self.family!r}")

    @property
    def is_discrete(self) -> bool:
        return self.family == "binomial"


def normal() -> DistSpec:
    return DistSpec("normal")


def student_t(df: int) -> DistSpec:
    return DistSpec("student_t", df=df)


def chi_square(df: int) -> DistSpec:
    return DistSpec("chi_square", df=df)


def binomial(n: int, p: float) -> DistSpec:
    return DistSpec("binomial", n=n, p=p)


def uniform01() -> DistSpec:
    return DistSpec("uniform01")


def binom_log_pmf(n: int, k, p) -> np.ndarray:
    """Log binomial pmf, stable for any (k, p) including the p in {0, 1} edges.

    Broadcasts over ``k`` and ``p``.
    """
    k = np.asarray(k, dtype=float)
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            special.gammaln(n + 1.0)
            - special.gammaln(k + 1.0)
            - special.gammaln(n - k + 1.0)
            + special.xlogy(k, p)
            + special.xlog1py(n - k, -p)
        )
    return out


def binom_cdf_table(n: int, p: float) -> np.ndarray:
    """Exact cumulative table ``F(0..n)`` with ``F(n)`` pinned to 1."""
    k = np.arange(n + 1)
    pmf = np.exp(binom_log_pmf(n, k, p))
    cum = np.cumsum(pmf)
    cum[-1] = 1.0
    return np.minimum(cum, 1.0)


def cdf(spec: DistSpec, x):
    """CDF of ``spec`` at ``x`` (scalar or array; array in, array out)."""
    xs = np.asarray(x, dtype=float)
    if spec.family == "normal":
        out = special.ndtr(xs)
    elif spec.family == "student_t":
        out = special.stdtr(spec.df, xs)
    elif spec.family == "chi_square":
        out = np.where(xs > 0.0, special.gammainc(spec.df / 2.0, np.maximum(xs, 0.0) / 2.0), 0.0)
    elif spec.family == "uniform01":
        out = np.clip(xs, 0.0, 1.0)
    else:
        table = binom_cdf_table(spec.n, spec.p)
        k = np.floor(xs).astype(int)
        out = np.where(k < 0, 0.0, table[np.clip(k, 0, spec.n)])
    return out if np.ndim(x) else float(out)


def _bisect_quantile(spec: DistSpec, ps: np.ndarray) -> np.ndarray:
    # Expand a bracket by doubling, then bisect to _QUANTILE_TOL.  All
    # supported continuous families have support inside [0, inf) or the line,
    # so the loop terminates quickly.
    lo = np.full_like(ps, -1.0)
    hi = np.ones_like(ps)
    if spec.family in ("chi_square",):
        lo = np.zeros_like(ps)
    for _ in range(200):
        bad = cdf(spec, lo) >= ps
        if not np.any(bad):
            break
        lo[bad] = np.where(lo[bad] < 0.0, lo[bad] * 2.0, -1.0)
    for _ in range(200):
        bad = cdf(spec, hi) < ps
        if not np.any(bad):
            break
        hi[bad] *= 2.0
    eps = np.finfo(float).eps
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = cdf(spec, mid) < ps
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        # Stop at the requested tolerance or at float spacing, whichever is
        # coarser for very large quantiles.
        if np.all(hi - lo <= _QUANTILE_TOL + 4.0 * eps * np.abs(hi)):
            break
    return 0.5 * (lo + hi)


def quantile(spec: DistSpec, p):
    """Inverse CDF.

    Continuous families: bisection on :func:`cdf` to absolute tolerance 1e-10.
    Binomial: the minimal integer ``k`` with ``F(k) >= p``.  ``p`` must lie
    strictly inside (0, 1).
    """
    ps = np.asarray(p, dtype=float)
    if np.any((ps <= 0.0) | (ps >= 1.0)):
        raise ValueError("quantile requires 0 < p < 1")
    scalar = np.ndim(p) == 0
    ps = np.atleast_1d(ps).astype(float)
    if spec.family == "uniform01":
        out = ps.copy()
    elif spec.family == "binomial":
        table = binom_cdf_table(spec.n, spec.p)
        out = np.searchsorted(table, ps, side="left").astype(float)
    else:
        out = _bisect_quantile(spec, ps.copy())
    return float(out[0]) if scalar else out


def sample(spec: DistSpec, mc: MCConfig) -> np.ndarray:
    """``mc.reps`` draws from ``spec``, reproducible from the stream key."""
    if spec.family == "chi_square":
        # Sum of df squared standard normals; one uniform per normal keeps the
        # draw count deterministic.
        u = mc.generator().random((mc.reps, spec.df))
        z = special.ndtri(u)
        return np.sum(z * z, axis=1)
    u = mc.uniforms()
    if spec.family == "normal":
        return special.ndtri(u)
    if spec.family == "student_t":
        return special.stdtrit(spec.df, u)
    if spec.family == "uniform01":
        return u
    table = binom_cdf_table(spec.n, spec.p)
    return np.searchsorted(table, u, side="left").astype(float)


def sample_uniform_minmax(n: int, mc: MCConfig) -> np.ndarray:
    """(reps, 2) array of (min, max) order statistics of ``n`` iid uniforms."""
    if n < 2:
        raise ValueError("order-statistic pairs need n >= 2")
    u = mc.generator().random((mc.reps, n))
    return np.column_stack([u.min(axis=1), u.max(axis=1)])
