"""Mean, variance, correlation and covariance of the solution process.

Means and variances integrate ``x`` and ``x^2`` against the 1-PDF (or the
steady-state density) over the exact image of the input box, split at the
corner images where the density has kinks.

Correlations ``E[X_n1 X_n2]`` default to the expectation route: the product
``x_n1(c,a,b) x_n2(c,a,b)`` integrated against the input density over the
input box.  This is the same quantity as the double integral of
``x1 x2 f_2`` over the plane (available as ``route="pdf2"``), but avoids
resolving the 2-PDF, which concentrates on a thin ridge once both periods
are large.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import JointDensity
from .model import ipow
from .quad import ConvergenceError, QuadratureConfig, integrate_batch
from .rvt import STEADY, _x_n, corner_images, density_values, pdf2_moment, support_range

__all__ = [
    "MomentSeries",
    "CovarianceSurface",
    "mean_var_at",
    "steady_moments",
    "moment_series",
    "correlation_at",
    "covariance_surface",
]

# Negative variances within this tolerance are rounding noise and clamp to 0.
VARIANCE_FLOOR = -1e-6

# Graded breakpoints in c for the expectation route: c_s * GRADING**k.
GRADING = 8.0
GRADED_LEVELS = 16


@dataclass(frozen=True)
class MomentSeries:
    entries: list
    steady_mean: float
    steady_std: float

    @property
    def periods(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries])

    @property
    def means(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries])

    @property
    def stds(self) -> np.ndarray:
        return np.array([e[2] for e in self.entries])


@dataclass(frozen=True)
class CovarianceSurface:
    periods: list
    gamma: np.ndarray
    cov: np.ndarray

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))


def _raw_moments(n, d, cfg):
    """Mass, first and second raw moments of ``X_n`` as a BatchResult."""
    lo, hi = support_range(d, n)
    bps = np.broadcast_to(corner_images(d, n), (3, corner_images(d, n).size))
    inner = cfg.tightened()

    def f(x, power):
        vals, conv = density_values(x, n, d, inner)
        return vals * x ** power, conv

    return integrate_batch(f, [lo] * 3, [hi] * 3, cfg, bps)


def _mean_var(n, d, cfg):
    res = _raw_moments(n, d, cfg)
    res.raise_if_failed(f"moments of X at n={n}")
    _, m1, m2 = res.values
    var = m2 - m1 * m1
    if var < VARIANCE_FLOOR:
        raise ConvergenceError(f"negative variance {var:.3g} at n={n}", float(res.errors.max()))
    return float(m1), float(max(var, 0.0))


def mean_var_at(n: int, d: JointDensity, cfg: QuadratureConfig | None = None):
    """``(E[X_n], Var[X_n])`` from the 1-PDF.

    Raises
    ------
    ConvergenceError
        If a quadrature fails, or the variance is below ``-1e-6``.
    """
    if n == STEADY:
        raise ValueError("use steady_moments for the steady state")
    return _mean_var(n, d, cfg or QuadratureConfig())


def steady_moments(d: JointDensity, cfg: QuadratureConfig | None = None):
    """``(E[X_inf], Var[X_inf])`` from the steady-state density."""
    return _mean_var(STEADY, d, cfg or QuadratureConfig())


def moment_series(n_max: int, d: JointDensity, cfg: QuadratureConfig | None = None,
                  periods=None) -> MomentSeries:
    """Mean and standard deviation for ``n = 0..n_max`` (or ``periods``) plus the steady state."""
    cfg = cfg or QuadratureConfig()
    periods = range(n_max + 1) if periods is None else sorted(periods)
    entries = []
    for n in periods:
        m, v = mean_var_at(n, d, cfg)
        entries.append((int(n), m, float(np.sqrt(v))))
    sm, sv = steady_moments(d, cfg)
    return MomentSeries(entries, sm, float(np.sqrt(sv)))


def _c_scale(a, b, n):
    """c at which ``x_n`` reaches half its saturation value ``(a-1)/b``."""
    inv = ipow(1.0 / a, n)
    with np.errstate(divide="ignore"):
        return inv * (a - 1.0) / (b * (1.0 - inv))


def _expectation(n1, n2, d, cfg):
    """``E[X_n1 X_n2]`` as a triple integral (outer a, then b, inner c)."""
    (c0, c1), (a0, a1), (b0, b1) = d.integration_box.intervals
    mid, inner = cfg.tightened(), cfg.tightened(100.0)
    k = np.arange(-2, GRADED_LEVELS)
    positive = [n for n in (n1, n2) if n > 0]

    def f_c(c, j, a, b):
        return _x_n(c, a[j], b[j], n1) * _x_n(c, a[j], b[j], n2) * d.pdf(c, a[j], b[j])

    def f_b(b, j, a):
        aa = a[j]
        bps = [(_c_scale(aa, b, n)[:, None] * GRADING ** k[None, :]) for n in positive]
        bps = np.concatenate(bps, axis=1) if bps else None
        res = integrate_batch(lambda c, i: f_c(c, i, aa, b),
                              np.full(b.size, c0), np.full(b.size, c1), inner, bps)
        return res.values, res.converged

    def f_a(a, _):
        res = integrate_batch(lambda b, j: f_b(b, j, a),
                              np.full(a.size, b0), np.full(a.size, b1), mid)
        return res.values, res.converged

    return integrate_batch(f_a, [a0], [a1], cfg)[0]


def correlation_at(n1: int, n2: int, d: JointDensity, cfg: QuadratureConfig | None = None,
                   route: str = "expectation") -> float:
    """Correlation ``E[X_n1 X_n2]``.

    ``route="pdf2"`` integrates ``x1 x2`` against the 2-PDF and requires
    ``n1 != n2``; the default expectation route also covers ``n1 == n2``.
    """
    cfg = cfg or QuadratureConfig()
    if route == "expectation":
        lo, hi = sorted((int(n1), int(n2)))
        res = _expectation(lo, hi, d, cfg)
    elif route == "pdf2":
        if n1 == n2:
            raise ValueError("the 2-PDF route needs n1 != n2; use mean_var_at for the diagonal")
        lo, hi = sorted((int(n1), int(n2)))
        res = pdf2_moment(lo, hi, d, cfg, weight=lambda u, v: u * v)
    else:
        raise ValueError(f"unknown route {route!r}")
    if not res.converged:
        raise ConvergenceError(f"correlation ({n1}, {n2})", res.error_estimate)
    return res.value


def covariance_surface(periods, d: JointDensity, cfg: QuadratureConfig | None = None,
                       route: str = "expectation") -> CovarianceSurface:
    """Correlation and covariance matrices over ``periods``.

    Off-diagonal entries come from :func:`correlation_at`; the diagonal from
    the 1-PDF variance.  The upper triangle is computed and mirrored, so both
    matrices are exactly symmetric.
    """
    cfg = cfg or QuadratureConfig()
    periods = [int(n) for n in periods]
    if not periods:
        raise ValueError("periods must be nonempty")
    k = len(periods)
    means = np.empty(k)
    gamma = np.empty((k, k))
    for i, n in enumerate(periods):
        m, v = mean_var_at(n, d, cfg)
        means[i] = m
        gamma[i, i] = v + m * m
    for i in range(k):
        for j in range(i + 1, k):
            g = correlation_at(periods[i], periods[j], d, cfg, route)
            gamma[i, j] = gamma[j, i] = g
    cov = gamma - np.outer(means, means)
    cov = 0.5 * (cov + cov.T)
    return CovarianceSurface(periods, gamma, cov)
