"""Adaptive Gauss-Kronrod quadrature on finite intervals and boxes.

The engine is batched: a single call integrates many independent 1-D
problems at once, each with its own limits, and the integrand is called
with all panel nodes of all problems in one vectorised evaluation.  Multi
dimensional integrals are built by nesting batched 1-D integrals, which
keeps the number of Python-level calls proportional to the refinement
depth rather than to the number of panels.

Refinement is plain recursive bisection with the 7-point Gauss / 15-point
Kronrod pair on every panel.  A panel is accepted when its error estimate
is below its width-proportional share of ``max(abs_tol, rel_tol*|I|)``,
when its problem's summed error estimate (accepted plus pending panels)
already meets that tolerance, or when it reaches ``max_depth``; a problem
counts as converged when its summed error estimate meets the tolerance.
Panels are processed breadth first and results are summed in a fixed order,
so a given configuration always produces bit-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "BatchResult",
    "ConvergenceError",
    "integrate_batch",
    "integrate_1d",
    "integrate_2d",
    "integrate_3d",
]

# Kronrod abscissae (positive half, descending) and weights; Gauss points
# are the odd-indexed Kronrod abscissae.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_INDEX = np.array([1, 3, 5, 7, 9, 11, 13])
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny

PANEL_RULES = ("gk15",)

# Panels per integrand call; bounds memory when integrals are nested.
CHUNK_PANELS = 4096


class ConvergenceError(RuntimeError):
    """Raised when a quadrature does not reach its tolerance.

    ``error_estimate`` carries the best error estimate achieved.
    """

    def __init__(self, message: str, error_estimate: float = float("nan")):
        super().__init__(f"{message} (error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and depth limit shared by every integral."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_depth: int = 12
    panel_rule: str = "gk15"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")
        if self.panel_rule not in PANEL_RULES:
            raise ValueError(f"unknown panel rule {self.panel_rule!r}")

    def tightened(self, factor: float = 10.0) -> "QuadratureConfig":
        """Config used for inner integrals of a nested integral."""
        return replace(self, rel_tol=self.rel_tol / factor,
                       abs_tol=self.abs_tol / factor)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    panels_used: int
    converged: bool


@dataclass(frozen=True)
class BatchResult:
    """Per-problem results of :func:`integrate_batch`."""

    values: np.ndarray
    errors: np.ndarray
    panels: np.ndarray
    converged: np.ndarray

    def __len__(self):
        return self.values.size

    def __getitem__(self, i) -> IntegralResult:
        return IntegralResult(float(self.values[i]), float(self.errors[i]),
                              int(self.panels[i]), bool(self.converged[i]))

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def raise_if_failed(self, what: str = "integral"):
        if not self.all_converged:
            bad = ~self.converged
            raise ConvergenceError(
                f"{what}: {int(bad.sum())} of {bad.size} integrals did not converge",
                float(np.max(self.errors[bad])))
        return self


# f(x, owner) -> values, or (values, ok) where ok flags points whose own
# evaluation (e.g. an inner integral) failed to converge.
Integrand = Callable[[np.ndarray, np.ndarray], "np.ndarray | tuple[np.ndarray, np.ndarray]"]


def _panel_rule(fx, half):
    """Kronrod estimate and QUADPACK-style error estimate for each panel."""
    k = half * (fx @ KRONROD_WEIGHTS)
    g = half * (fx[:, GAUSS_INDEX] @ GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
    mean = 0.5 * (fx @ KRONROD_WEIGHTS)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ KRONROD_WEIGHTS)
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > _UFLOW / (50.0 * _EPS), np.maximum(floor, err), err)
    return k, err, floor


def integrate_batch(f: Integrand, lo, hi, cfg: QuadratureConfig | None = None,
                    breakpoints=None) -> BatchResult:
    """Integrate ``m`` one-dimensional problems simultaneously.

    Parameters
    ----------
    f : callable
        ``f(x, owner)`` with ``x`` a flat array of abscissae and ``owner`` the
        index of the problem each abscissa belongs to.  Returns an array of
        the same shape, or a pair ``(values, ok)``; points with ``ok`` false
        mark their problem as not converged.
    lo, hi : array_like, shape (m,)
        Limits.  Problems with ``hi <= lo`` are empty and integrate to 0.
    cfg : QuadratureConfig
    breakpoints : array_like, shape (m, k), optional
        Interior points where the integrand is known to be non-smooth.
        NaN entries and points outside ``[lo, hi]`` are ignored.
    """
    cfg = cfg or QuadratureConfig()
    lo = np.atleast_1d(np.asarray(lo, dtype=float)).ravel()
    hi = np.atleast_1d(np.asarray(hi, dtype=float)).ravel()
    lo, hi = np.broadcast_arrays(lo, hi)
    m = lo.size
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("integration limits must be finite")
    hi = np.maximum(hi, lo)

    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float).reshape(m, -1)
        bp = np.where(np.isnan(bp), hi[:, None], np.clip(bp, lo[:, None], hi[:, None]))
        edges = np.sort(np.concatenate([lo[:, None], bp, hi[:, None]], axis=1), axis=1)
    else:
        edges = np.stack([lo, hi], axis=1)
    npieces = edges.shape[1] - 1
    a = edges[:, :-1].ravel()
    b = edges[:, 1:].ravel()
    own = np.repeat(np.arange(m), npieces)
    keep = b > a
    a, b, own = a[keep], b[keep], own[keep]
    depth = np.zeros(a.size, dtype=int)

    span = hi - lo
    values = np.zeros(m)
    errors = np.zeros(m)
    panels = np.zeros(m, dtype=int)
    converged = np.ones(m, dtype=bool)

    while a.size:
        center = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = center[:, None] + half[:, None] * NODES[None, :]
        fx = np.empty(x.shape)
        for s in range(0, a.size, CHUNK_PANELS):
            sl = slice(s, s + CHUNK_PANELS)
            out = f(x[sl].ravel(), np.repeat(own[sl], NODES.size))
            if isinstance(out, tuple):
                out, ok = out
                bad = ~np.asarray(ok, dtype=bool).reshape(-1, NODES.size).all(axis=1)
                converged[own[sl][bad]] = False
            fx[sl] = np.asarray(out, dtype=float).reshape(-1, NODES.size)
        if not np.all(np.isfinite(fx)):
            raise FloatingPointError("integrand returned non-finite values")
        k, err, floor = _panel_rule(fx, half)

        current = values + np.bincount(own, weights=k, minlength=m)
        tau = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(current))
        allowed = tau[own] * (b - a) / span[own]
        pending = errors + np.bincount(own, weights=err, minlength=m)
        ok = (err <= allowed) | (err <= 2.0 * floor) | (pending <= tau)[own]
        forced = ~ok & (depth >= cfg.max_depth)
        accept = ok | forced

        values += np.bincount(own[accept], weights=k[accept], minlength=m)
        errors += np.bincount(own[accept], weights=err[accept], minlength=m)
        panels += np.bincount(own[accept], minlength=m)

        split = ~accept
        a, b, c = a[split], b[split], center[split]
        own, depth = own[split], depth[split] + 1
        a, b = np.stack([a, c], axis=1).ravel(), np.stack([c, b], axis=1).ravel()
        own, depth = np.repeat(own, 2), np.repeat(depth, 2)

    # Panels forced at max_depth are tolerated as long as the summed error
    # estimate still meets the global tolerance.
    converged &= errors <= np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(values))
    return BatchResult(values, errors, panels, converged)


def _as_vectorised(f):
    def g(x, owner):
        return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    return g


def integrate_1d(f: Callable[[np.ndarray], np.ndarray], interval: Sequence[float],
                 cfg: QuadratureConfig | None = None, breakpoints=None) -> IntegralResult:
    """Integrate a vectorised scalar function over a finite interval.

    >>> round(integrate_1d(lambda x: x**2, (0.0, 1.0)).value, 12)
    0.333333333333
    """
    lo, hi = map(float, interval)
    if not hi > lo:
        raise ValueError("interval must satisfy lo < hi")
    bp = None if breakpoints is None else np.asarray(breakpoints, float).reshape(1, -1)
    return integrate_batch(_as_vectorised(f), [lo], [hi], cfg, bp)[0]


def _nested(f_last, box, cfg):
    """Integrand over the first axis of ``box`` whose value is the integral of
    ``f_last`` over the remaining axes."""
    (lo, hi), rest = box[0], box[1:]
    if not rest:
        return lo, hi, lambda x, owner, *outer: f_last(*outer, x)

    inner_lo, inner_hi, inner_f = _nested(f_last, rest, cfg.tightened())
    inner_cfg = cfg.tightened()

    def g(x, owner, *outer):
        pts = outer + (x,)
        res = integrate_batch(
            lambda y, j: inner_f(y, j, *(p[j] for p in pts)),
            np.full(x.size, inner_lo), np.full(x.size, inner_hi), inner_cfg)
        return res.values, res.converged

    return lo, hi, g


def _integrate_box(f, box, cfg):
    cfg = cfg or QuadratureConfig()
    box = [tuple(map(float, iv)) for iv in box]
    for lo, hi in box:
        if not hi > lo:
            raise ValueError("each box interval must satisfy lo < hi")
    lo, hi, g = _nested(f, box, cfg)
    return integrate_batch(g, [lo], [hi], cfg)[0]


def integrate_2d(f: Callable[[np.ndarray, np.ndarray], np.ndarray], box,
                 cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integrate ``f(x, y)`` over ``box = ((x_lo, x_hi), (y_lo, y_hi))``.

    The outer integral runs over ``x``; inner integrals use a tolerance ten
    times tighter.  Non-convergence of any inner integral marks the result as
    not converged.
    """
    if len(box) != 2:
        raise ValueError("box must have two intervals")
    return _integrate_box(f, box, cfg)


def integrate_3d(f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray], box,
                 cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integrate ``f(x, y, z)`` over a box of three intervals (outermost first)."""
    if len(box) != 3:
        raise ValueError("box must have three intervals")
    return _integrate_box(f, box, cfg)
