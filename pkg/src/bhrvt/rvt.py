"""Densities of the solution process obtained by the random variable transformation.

Three densities are provided, each as a vectorised ``*_values`` function
returning ``(values, converged)`` plus a scalar convenience wrapper that
raises :class:`~bhrvt.quad.ConvergenceError` on failure:

* the 1-PDF of ``X_n`` (:func:`pdf1_values`, :func:`pdf1_at`),
* the 2-PDF of ``(X_n1, X_n2)`` (:func:`pdf2_values`, :func:`pdf2_at`),
* the density of the steady state ``X_inf = (A-1)/B``
  (:func:`pdf_steady_values`, :func:`pdf_steady_at`).

All integrals run over the input density's ``integration_box``.  Wherever the
integrand is an indicator of that box composed with a smooth map, the inner
limits are solved for in closed form and the outer integral is split at the
points where those limits change branch, so the quadrature only ever sees
piecewise smooth integrands.

1-PDF routes
------------
``"ab"``
    keeps ``(a, b)`` and recovers ``c`` (outer ``a``, inner ``b``).  For
    large ``n`` the set of ``b`` mapping into the support of ``C`` shrinks
    like ``a**-n`` and cannot be resolved in double precision.
``"ac"`` (default for ``n >= 1``)
    keeps ``(a, c)`` and recovers ``b`` (outer ``a``, inner ``c``).  Same
    density, bounded Jacobian ``(a-1) a^n / (x^2 (a^n - 1))``, well
    conditioned for every ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize.elementwise import find_root

from .dist import JointDensity
from .mc import McConfig, quantile_range, simulate_paths, steady_samples
from .model import (ipow, solution_closed_form, transform_1pdf, transform_1pdf_for_b,
                    transform_2pdf, transform_steady)
from .quad import ConvergenceError, QuadratureConfig, integrate_batch

__all__ = [
    "STEADY",
    "DensityCurve",
    "DensitySurface",
    "support_range",
    "corner_images",
    "conditional_range",
    "pdf1_values",
    "pdf1_at",
    "pdf1_curve",
    "pdf1_mass",
    "pdf_steady_values",
    "pdf_steady_at",
    "pdf_steady_curve",
    "pdf2_values",
    "pdf2_at",
    "pdf2_surface",
    "pdf2_marginal",
    "pdf2_mass",
    "pdf2_moment",
    "density_values",
    "bin_averages",
    "l1_to_steady",
    "auto_grid",
]

STEADY = "steady"

# Scan points per 2-PDF problem used to bracket the a-values where the
# recovered (c, b) crosses the edge of the support box.
PDF2_SCAN_POINTS = 33

# Relative slack when testing recovered inputs against the box faces.
EDGE_RTOL = 1e-12

# Geometric breakpoints placed beyond the poles of the 1-PDF inner limits.
POLE_GRADING = 4.0
POLE_LEVELS = 30

AUTO_GRID_SAMPLES = 10**5
AUTO_GRID_POINTS = 200


@dataclass(frozen=True)
class DensityCurve:
    x: np.ndarray
    f: np.ndarray
    period: object
    meta: dict = field(default_factory=dict)

    @property
    def grid(self):
        return list(zip(self.x.tolist(), self.f.tolist()))

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.f, self.x))

    def l1_distance(self, other: "DensityCurve") -> float:
        """Trapezoid L1 distance on the union of both grids (linear interpolation,
        zero outside each curve's grid)."""
        x = np.union1d(self.x, other.x)
        fa = np.interp(x, self.x, self.f, left=0.0, right=0.0)
        fb = np.interp(x, other.x, other.f, left=0.0, right=0.0)
        return float(np.trapezoid(np.abs(fa - fb), x))


@dataclass(frozen=True)
class DensitySurface:
    x1: np.ndarray
    x2: np.ndarray
    values: np.ndarray
    periods: tuple
    meta: dict = field(default_factory=dict)

    @property
    def mass(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.x2, axis=1), self.x1))


def _period(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"period must be a non-negative integer, got {n!r}")
    return int(n)


def _box(d: JointDensity):
    return d.integration_box.intervals


def _x_n(c, a, b, n):
    """x_n allowing c == 0 (image 0)."""
    c, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (c, a, b)))
    out = np.zeros(c.shape)
    pos = c > 0
    out[pos] = solution_closed_form(c[pos], a[pos], b[pos], n)
    return out


def _steady(a, b):
    if np.any(np.asarray(b) <= 0):
        raise ValueError("steady-state support is unbounded when the b-interval reaches 0")
    return (np.asarray(a, float) - 1.0) / b


def corner_images(d: JointDensity, n) -> np.ndarray:
    """Sorted images of the integration-box corners under ``x_n`` (or the
    steady-state map).  Densities of ``X_n`` are smooth between these points."""
    (c0, c1), (a0, a1), (b0, b1) = _box(d)
    if n == STEADY:
        a, b = np.meshgrid([a0, a1], [b0, b1], indexing="ij")
        return np.unique(_steady(a, b))
    c, a, b = np.meshgrid([c0, c1], [a0, a1], [b0, b1], indexing="ij")
    return np.unique(_x_n(c.ravel(), a.ravel(), b.ravel(), _period(n)))


def support_range(d: JointDensity, n) -> tuple[float, float]:
    """Interval outside which the density of ``X_n`` (or ``X_inf``) vanishes."""
    pts = corner_images(d, n)
    return float(pts[0]), float(pts[-1])


def _a_breakpoints(x, n, d):
    """a-values where the inner limits of the 1-PDF integral change branch.

    These solve ``x_n(c_k, a, b_k) = x`` for the four (c, b) corners of the
    box; ``x_n`` is increasing in ``a`` so each has at most one root.
    """
    (c0, c1), (a0, a1), (b0, b1) = _box(d)
    out = np.full((x.size, 4), np.nan)
    for k, (ck, bk) in enumerate([(c0, b0), (c0, b1), (c1, b0), (c1, b1)]):
        if ck <= 0:
            continue
        g_lo = _x_n(ck, a0, bk, n) - x
        g_hi = _x_n(ck, a1, bk, n) - x
        has = (g_lo < 0) & (g_hi > 0)
        if not np.any(has):
            continue
        res = find_root(lambda a, xx: solution_closed_form(ck, a, bk, n) - xx,
                        (np.full(has.sum(), a0), np.full(has.sum(), a1)), args=(x[has],))
        out[has, k] = res.x
    return np.concatenate([out, _pole_grading(x, n, d, out)], axis=1)


def _pole_grading(x, n, d, roots):
    """Breakpoints graded away from the poles of the inner c-limits.

    ``c(b)`` recovered from ``x`` has a pole where ``(a-1)/(1-a^-n) = b x``.
    Just past the root where ``c(b) = c_1`` it decays like ``1/(a - pole)``
    on a scale ``root - pole`` that shrinks like ``a^-n``; geometric
    breakpoints resolve it in a few panels per level.
    """
    (c0, c1), (a0, a1), (b0, b1) = _box(d)
    grade = POLE_GRADING ** np.arange(POLE_LEVELS)
    out = np.full((x.size, 2 * POLE_LEVELS), np.nan)

    def g(a, target):
        return (a - 1.0) / (1.0 - ipow(1.0 / a, n)) - target

    for k, (bk, root_col) in enumerate([(b0, 2), (b1, 3)]):
        r = roots[:, root_col]
        has = np.isfinite(r) & (g(np.full(x.size, a0), bk * x) < 0) & (g(np.full(x.size, a1), bk * x) > 0)
        if not np.any(has):
            continue
        pole = find_root(g, (np.full(has.sum(), a0), np.full(has.sum(), a1)), args=(bk * x[has],)).x
        gap = r[has] - pole
        out[has, k * POLE_LEVELS:(k + 1) * POLE_LEVELS] = pole[:, None] + gap[:, None] * grade[None, :]
    return out


def _double(f, inner_limits, lo, hi, cfg, breakpoints=None):
    """Nested integral: outer variable ``u`` over ``[lo, hi]``, inner ``v``
    over ``inner_limits(u, owner)``; integrand ``f(u, v, owner)``."""
    inner_cfg = cfg.tightened()

    def outer(u, owner):
        vlo, vhi = inner_limits(u, owner)
        res = integrate_batch(lambda v, j: f(u[j], v, owner[j]), vlo, vhi, inner_cfg)
        return res.values, res.converged

    return integrate_batch(outer, lo, hi, cfg, breakpoints)


def _scatter(x, mask, res_values, res_conv):
    vals = np.zeros(x.shape)
    conv = np.ones(x.shape, dtype=bool)
    vals[mask] = res_values
    conv[mask] = res_conv
    return vals, conv


def pdf1_values(x, n: int, d: JointDensity, cfg: QuadratureConfig | None = None,
                route: str = "ac"):
    """1-PDF of ``X_n`` at the points ``x``; returns ``(values, converged)``.

    ``route`` selects the integration variables for ``n >= 1`` (see module
    docstring); at ``n = 0`` the density is the marginal of ``C`` and is
    computed directly.
    """
    cfg = cfg or QuadratureConfig()
    n = _period(n)
    if route not in ("ac", "ab"):
        raise ValueError(f"unknown route {route!r}")
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    lo, hi = support_range(d, n)
    mask = (x > 0) & (x >= lo) & (x <= hi)
    xs = x[mask]
    if xs.size == 0:
        return np.zeros(x.shape), np.ones(x.shape, dtype=bool)
    (c0, c1), (a0, a1), (b0, b1) = _box(d)
    m = xs.size
    bps = None

    if n == 0:
        def f(a, b, i):
            return d.pdf(xs[i], a, b)

        def limits(a, i):
            return np.full(a.size, b0), np.full(a.size, b1)

    elif route == "ac":
        # The c-limits already confine the recovered b to [b0, b1]; clamping
        # keeps rounding at the edges from switching the box indicator off.
        def f(a, c, i):
            xi = xs[i]
            b = np.clip(transform_1pdf_for_b(xi, n, a, c).inverse, b0, b1)
            jac = (a - 1.0) / (1.0 - ipow(1.0 / a, n)) / (xi * xi)
            return d.pdf(c, a, b) * jac

        def limits(a, i):
            xi = xs[i]
            lo_t, hi_t = transform_1pdf(xi, n, a, b0), transform_1pdf(xi, n, a, b1)
            c_lo = np.where(lo_t.valid, lo_t.inverse, np.inf)
            c_hi = np.where(hi_t.valid, hi_t.inverse, np.inf)
            return np.clip(c_lo, c0, c1), np.clip(c_hi, c0, c1)

        bps = _a_breakpoints(xs, n, d)

    else:
        def f(a, b, i):
            t = transform_1pdf(xs[i], n, a, b)
            c = np.clip(np.where(t.valid, t.inverse, c0), c0, c1)
            return np.where(t.valid, d.pdf(c, a, b), 0.0) * t.jacobian_abs

        def limits(a, i):
            xi = xs[i]
            with np.errstate(divide="ignore"):
                b_lo = transform_1pdf_for_b(xi, n, a, c0).inverse if c0 > 0 else np.full(a.size, -np.inf)
                b_hi = transform_1pdf_for_b(xi, n, a, c1).inverse
            return np.clip(b_lo, b0, b1), np.clip(b_hi, b0, b1)

        bps = _a_breakpoints(xs, n, d)

    res = _double(f, limits, np.full(m, a0), np.full(m, a1), cfg, bps)
    return _scatter(x, mask, res.values, res.converged)


def _scalar(values_conv, what):
    vals, conv = values_conv
    if not conv[0]:
        raise ConvergenceError(what)
    return float(vals[0])


def pdf1_at(x: float, n: int, d: JointDensity, cfg: QuadratureConfig | None = None,
            route: str = "ac") -> float:
    return _scalar(pdf1_values([x], n, d, cfg, route), f"1-PDF at x={x}, n={n}")


def pdf_steady_values(x, d: JointDensity, cfg: QuadratureConfig | None = None):
    """Density of ``X_inf = (A-1)/B``: outer ``c``, inner ``b``, ``a = x b + 1``."""
    cfg = cfg or QuadratureConfig()
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    lo, hi = support_range(d, STEADY)
    mask = (x > 0) & (x >= lo) & (x <= hi)
    xs = x[mask]
    if xs.size == 0:
        return np.zeros(x.shape), np.ones(x.shape, dtype=bool)
    (c0, c1), (a0, a1), (b0, b1) = _box(d)

    def f(c, b, i):
        t = transform_steady(xs[i], c, b)
        return d.pdf(c, np.clip(t.inverse, a0, a1), b) * t.jacobian_abs

    def limits(c, i):
        xi = xs[i]
        return np.clip((a0 - 1.0) / xi, b0, b1), np.clip((a1 - 1.0) / xi, b0, b1)

    res = _double(f, limits, np.full(xs.size, c0), np.full(xs.size, c1), cfg)
    return _scatter(x, mask, res.values, res.converged)


def pdf_steady_at(x: float, d: JointDensity, cfg: QuadratureConfig | None = None) -> float:
    return _scalar(pdf_steady_values([x], d, cfg), f"steady-state PDF at x={x}")


def density_values(x, n, d: JointDensity, cfg: QuadratureConfig | None = None):
    """Dispatch to the 1-PDF (integer ``n``) or the steady-state density."""
    if n == STEADY:
        return pdf_steady_values(x, d, cfg)
    return pdf1_values(x, n, d, cfg)


# -- 2-PDF -------------------------------------------------------------------

def _pdf2_breakpoints(x1, x2, n1, n2, d):
    """a-values where the recovered (c, b) leaves or enters the box, found by
    scanning a grid of a-values and refining every sign change."""
    (c0, c1), (a0, a1), (b0, b1) = _box(d)
    m = x1.size
    grid = np.linspace(a0, a1, PDF2_SCAN_POINTS)
    edges = np.array([c0, c1, b0, b1])

    def g(a, xx1, xx2, k):
        t = transform_2pdf(xx1, xx2, n1, n2, a)
        c, b = t.inverse
        v = np.where(k < 2, c, b) - edges[k.astype(int)]
        return np.nan_to_num(v, nan=-1.0, posinf=1e300, neginf=-1e300)

    k_all = np.arange(4)
    vals = g(grid[None, :, None], x1[:, None, None], x2[:, None, None], k_all[None, None, :])
    s = np.where(vals >= 0, 1, -1)
    change = s[:, :-1, :] != s[:, 1:, :]
    p, j, k = np.nonzero(change)
    if p.size == 0:
        return None
    res = find_root(g, (grid[j], grid[j + 1]), args=(x1[p], x2[p], k.astype(float)))
    counts = np.bincount(p, minlength=m)
    out = np.full((m, counts.max()), np.nan)
    order = np.argsort(p, kind="stable")
    slot = np.arange(p.size) - np.repeat(np.cumsum(counts) - counts, counts)
    out[p[order], slot] = res.x[order]
    return out


def pdf2_values(x1, n1: int, x2, n2: int, d: JointDensity, cfg: QuadratureConfig | None = None):
    """Joint density of ``(X_n1, X_n2)`` at aligned points; ``(values, converged)``.

    The integral over ``a`` is symmetric under exchanging ``(x1, n1)`` with
    ``(x2, n2)``; arguments are put in increasing period order first so that
    both orders give bit-identical results.
    """
    cfg = cfg or QuadratureConfig()
    n1, n2 = _period(n1), _period(n2)
    if n1 == n2:
        raise ValueError("the 2-PDF needs n1 != n2; use the 1-PDF for a single period")
    x1, x2 = np.broadcast_arrays(np.atleast_1d(np.asarray(x1, float)).ravel(),
                                 np.atleast_1d(np.asarray(x2, float)).ravel())
    if n1 > n2:
        x1, x2, n1, n2 = x2, x1, n2, n1
    lo1, hi1 = support_range(d, n1)
    lo2, hi2 = support_range(d, n2)
    mask = (x1 > 0) & (x2 > 0) & (x1 >= lo1) & (x1 <= hi1) & (x2 >= lo2) & (x2 <= hi2)
    y1, y2 = x1[mask], x2[mask]
    if y1.size == 0:
        return np.zeros(x1.shape), np.ones(x1.shape, dtype=bool)
    (c0, c1), (a0, a1), (b0, b1) = _box(d)

    # Recovered (c, b) within rounding of a box face count as inside, so
    # slices lying exactly on a face do not flicker in and out.
    tol_c, tol_b = EDGE_RTOL * (c1 - c0), EDGE_RTOL * (b1 - b0)

    def f(a, i):
        t = transform_2pdf(y1[i], y2[i], n1, n2, a)
        c, b = t.inverse
        inside = (t.valid & (c >= c0 - tol_c) & (c <= c1 + tol_c)
                  & (b >= b0 - tol_b) & (b <= b1 + tol_b))
        c = np.clip(np.where(inside, c, c0), c0, c1)
        b = np.clip(np.where(inside, b, b0), b0, b1)
        return np.where(inside, d.pdf(c, a, b), 0.0) * t.jacobian_abs

    bps = _pdf2_breakpoints(y1, y2, n1, n2, d)
    res = integrate_batch(f, np.full(y1.size, a0), np.full(y1.size, a1), cfg, bps)
    return _scatter(x1, mask, res.values, res.converged)


def pdf2_at(x1: float, n1: int, x2: float, n2: int, d: JointDensity,
            cfg: QuadratureConfig | None = None) -> float:
    return _scalar(pdf2_values([x1], n1, [x2], n2, d, cfg),
                   f"2-PDF at ({x1}, {n1}; {x2}, {n2})")


def _solve_a(x, n, c, b, d):
    """a in the box solving ``x_n(c, a, b) = x`` (NaN where none exists)."""
    (_, _), (a0, a1), (_, _) = _box(d)
    out = np.full(x.size, np.nan)
    has = (_x_n(c, a0, b, n) - x < 0) & (_x_n(c, a1, b, n) - x > 0)
    if np.any(has):
        out[has] = find_root(lambda a, xx: solution_closed_form(c, a, b, n) - xx,
                             (np.full(has.sum(), a0), np.full(has.sum(), a1)),
                             args=(x[has],)).x
    return out


def conditional_range(x1, n1: int, n2: int, d: JointDensity):
    """Range of ``X_n2`` given ``X_n1 = x1``, with its kinks.

    Given ``x1``, the slice of the 2-PDF in ``x2`` is smooth between the
    images of the twelve edges of the input box.  Returns ``(lo, hi, kinks)``
    with ``kinks`` of shape ``(m, 12)`` (NaN where an edge misses the level
    set ``x_n1 = x1``).  ``lo >= hi`` flags an empty slice.
    """
    x1 = np.atleast_1d(np.asarray(x1, float)).ravel()
    n1, n2 = _period(n1), _period(n2)
    (c0, c1), (a0, a1), (b0, b1) = _box(d)
    pts = []
    # a, b fixed: recover c
    for a, b in [(a0, b0), (a0, b1), (a1, b0), (a1, b1)]:
        t = transform_1pdf(x1, n1, a, b)
        c = np.where(t.valid, t.inverse, np.nan)
        ok = (c >= c0) & (c <= c1)
        pts.append(np.where(ok, _x_n(np.where(ok, c, c1), a, b, n2), np.nan))
    # c, a fixed: recover b
    for c, a in [(c0, a0), (c0, a1), (c1, a0), (c1, a1)]:
        if n1 == 0 or c <= 0:
            pts.append(np.full(x1.size, np.nan))
            continue
        with np.errstate(divide="ignore"):
            b = transform_1pdf_for_b(x1, n1, a, c).inverse
        ok = (b >= b0) & (b <= b1)
        pts.append(np.where(ok, _x_n(c, a, np.where(ok, b, b1), n2), np.nan))
    # c, b fixed: recover a
    for c, b in [(c0, b0), (c0, b1), (c1, b0), (c1, b1)]:
        if n1 == 0 or c <= 0:
            pts.append(np.full(x1.size, np.nan))
            continue
        a = _solve_a(x1, n1, c, b, d)
        ok = np.isfinite(a)
        pts.append(np.where(ok, _x_n(c, np.where(ok, a, a1), b, n2), np.nan))
    kinks = np.stack(pts, axis=1)
    any_ok = np.any(np.isfinite(kinks), axis=1)
    lo = np.where(any_ok, np.nanmin(np.where(any_ok[:, None], kinks, 0.0), axis=1), 0.0)
    hi = np.where(any_ok, np.nanmax(np.where(any_ok[:, None], kinks, 0.0), axis=1), 0.0)
    return lo, hi, kinks


def pdf2_marginal(x1, n1: int, n2: int, d: JointDensity, cfg: QuadratureConfig | None = None):
    """``integral of pdf2(x1, n1; x2, n2) dx2`` at each ``x1``; ``(values, converged)``.

    Should reproduce the 1-PDF of ``X_n1``.
    """
    cfg = cfg or QuadratureConfig()
    x1 = np.atleast_1d(np.asarray(x1, float)).ravel()
    lo, hi, corners = conditional_range(x1, n1, n2, d)
    inner = cfg.tightened()

    def f(x2, own):
        return pdf2_values(x1[own], n1, x2, n2, d, inner)

    res = integrate_batch(f, lo, hi, cfg, corners)
    return res.values, res.converged


def pdf2_moment(n1: int, n2: int, d: JointDensity, cfg: QuadratureConfig | None = None,
                weight=None):
    """``E[w(X_n1, X_n2)]`` by integrating ``w * pdf2`` over the plane.

    ``weight`` defaults to 1, giving the total mass of the 2-PDF.  Returns an
    :class:`~bhrvt.quad.IntegralResult`.
    """
    cfg = cfg or QuadratureConfig()
    weight = weight or (lambda u, v: np.ones_like(u))
    lo1, hi1 = support_range(d, n1)
    mid = cfg.tightened()
    inner = mid.tightened()

    def g(x1, own):
        lo, hi, corners = conditional_range(x1, n1, n2, d)

        def h(x2, j):
            vals, conv = pdf2_values(x1[j], n1, x2, n2, d, inner)
            return vals * weight(x1[j], x2), conv

        res = integrate_batch(h, lo, hi, mid, corners)
        return res.values, res.converged

    bps = corner_images(d, n1)[None, :]
    return integrate_batch(g, [lo1], [hi1], cfg, bps)[0]


def pdf2_mass(n1: int, n2: int, d: JointDensity, cfg: QuadratureConfig | None = None):
    return pdf2_moment(n1, n2, d, cfg)


# -- curves, grids, integrals of densities -------------------------------------

def auto_grid(d: JointDensity, n, num: int = AUTO_GRID_POINTS,
              mc: McConfig | None = None) -> np.ndarray:
    """Uniform grid over the padded 0.05%-99.95% quantile range of sampled ``X_n``."""
    mc = mc or McConfig(n_samples=AUTO_GRID_SAMPLES)
    if n == STEADY:
        values = steady_samples(d, mc)
    else:
        values = simulate_paths(d, _period(n), mc, periods=[n]).paths[:, 0]
    lo, hi = quantile_range(values)
    return np.linspace(lo, hi, num)


def _meta(d, cfg, **kw):
    return {"preset": getattr(d, "name", d.kind), "rel_tol": cfg.rel_tol,
            "abs_tol": cfg.abs_tol, **kw}


def _raise_unless(conv, what):
    if not np.all(conv):
        raise ConvergenceError(f"{what}: {int((~conv).sum())} grid points did not converge")


def pdf1_curve(n: int, d: JointDensity, x=None, cfg: QuadratureConfig | None = None,
               mc: McConfig | None = None, route: str = "ac") -> DensityCurve:
    cfg = cfg or QuadratureConfig()
    x = auto_grid(d, n, mc=mc) if x is None else np.asarray(x, float)
    vals, conv = pdf1_values(x, n, d, cfg, route)
    _raise_unless(conv, f"1-PDF curve n={n}")
    return DensityCurve(x, vals, n, _meta(d, cfg, n=n))


def pdf_steady_curve(d: JointDensity, x=None, cfg: QuadratureConfig | None = None,
                     mc: McConfig | None = None) -> DensityCurve:
    cfg = cfg or QuadratureConfig()
    x = auto_grid(d, STEADY, mc=mc) if x is None else np.asarray(x, float)
    vals, conv = pdf_steady_values(x, d, cfg)
    _raise_unless(conv, "steady-state curve")
    return DensityCurve(x, vals, STEADY, _meta(d, cfg, n=STEADY))


def pdf2_surface(n1: int, n2: int, d: JointDensity, x1=None, x2=None,
                 cfg: QuadratureConfig | None = None, mc: McConfig | None = None,
                 num: int = AUTO_GRID_POINTS) -> DensitySurface:
    """2-PDF on the tensor grid ``x1 x x2`` (``values[i, j] = pdf2(x1[i], x2[j])``)."""
    cfg = cfg or QuadratureConfig()
    if n1 == n2:
        raise ValueError("the 2-PDF needs n1 != n2; use the 1-PDF for a single period")
    x1 = auto_grid(d, n1, num, mc) if x1 is None else np.asarray(x1, float)
    x2 = auto_grid(d, n2, num, mc) if x2 is None else np.asarray(x2, float)
    g1, g2 = np.meshgrid(x1, x2, indexing="ij")
    vals, conv = pdf2_values(g1.ravel(), n1, g2.ravel(), n2, d, cfg)
    _raise_unless(conv, f"2-PDF surface ({n1}, {n2})")
    return DensitySurface(x1, x2, vals.reshape(g1.shape), (n1, n2),
                          _meta(d, cfg, n1=n1, n2=n2))


def _density_integral(n, d, cfg, weight_power=0):
    lo, hi = support_range(d, n)
    bps = corner_images(d, n)[None, :]

    def f(x, own):
        vals, conv = density_values(x, n, d, cfg.tightened())
        return vals * x ** weight_power, conv

    return integrate_batch(f, [lo], [hi], cfg, bps)[0]


def pdf1_mass(n, d: JointDensity, cfg: QuadratureConfig | None = None):
    """Total mass of the 1-PDF (or steady density for ``n="steady"``)."""
    return _density_integral(n, d, cfg or QuadratureConfig())


def bin_averages(edges, n, d: JointDensity, cfg: QuadratureConfig | None = None):
    """Mean density over each histogram bin; ``(values, converged)``."""
    cfg = cfg or QuadratureConfig()
    edges = np.asarray(edges, float)
    lo, hi = edges[:-1], edges[1:]
    bps = np.broadcast_to(corner_images(d, n), (lo.size, corner_images(d, n).size))

    def f(x, own):
        return density_values(x, n, d, cfg.tightened())

    res = integrate_batch(f, lo, hi, cfg, bps)
    return res.values / (hi - lo), res.converged


def l1_to_steady(n: int, d: JointDensity, cfg: QuadratureConfig | None = None):
    """``integral |f_1(x, n) - f_inf(x)| dx`` by adaptive quadrature."""
    cfg = cfg or QuadratureConfig()
    lo_n, hi_n = support_range(d, n)
    lo_s, hi_s = support_range(d, STEADY)
    bps = np.concatenate([corner_images(d, n), corner_images(d, STEADY)])[None, :]
    inner = cfg.tightened()

    def f(x, own):
        v1, ok1 = pdf1_values(x, n, d, inner)
        v2, ok2 = pdf_steady_values(x, d, inner)
        return np.abs(v1 - v2), ok1 & ok2

    return integrate_batch(f, [min(lo_n, lo_s)], [max(hi_n, hi_s)], cfg, bps)[0]
