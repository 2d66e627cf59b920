"""Beverton-Holt dynamics and the inverse maps / Jacobians used by the RVT densities.

The recurrence is ``x_{n+1} = a x_n / (1 + b x_n)`` with ``x_0 = c``.  All
functions accept numpy arrays and broadcast their arguments; the period
``n`` is always a single non-negative integer.

The transform kernels return a :class:`TransformEval`.  Evaluations that hit
a vanishing denominator, or whose recovered inputs leave the admissible
region, are flagged ``valid=False`` and have their Jacobian set to zero, so
they contribute nothing when integrated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GUARD_EPS",
    "TransformEval",
    "ipow",
    "iterate_map",
    "solution_closed_form",
    "steady_state_value",
    "transform_1pdf",
    "transform_1pdf_for_b",
    "transform_2pdf",
    "transform_steady",
]

# Relative size below which a denominator is treated as zero.
GUARD_EPS = 1e-14


@dataclass(frozen=True)
class TransformEval:
    """Result of an inverse map evaluation.

    ``inverse`` holds the recovered input(s): a single array for the 1-D
    kernels, a ``(c, b)`` pair for :func:`transform_2pdf`.
    """

    inverse: object
    jacobian_abs: np.ndarray
    valid: np.ndarray

    @property
    def inverse_value(self):
        return self.inverse


def _period(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"period must be a non-negative integer, got {n!r}")
    return int(n)


def ipow(a, n: int):
    """``a**n`` for integer ``n >= 0`` by repeated squaring."""
    n = _period(n)
    a = np.asarray(a, dtype=float)
    result = np.ones_like(a)
    base = a
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def iterate_map(c, a, b, n: int):
    """``x_n`` by applying the recurrence ``n`` times starting from ``c``."""
    n = _period(n)
    x = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for _ in range(n):
        x = a * x / (1.0 + b * x)
    return x + 0.0 * (a + b)


def solution_closed_form(c, a, b, n: int):
    """Explicit ``x_n``; the ``a == 1`` case uses ``1 / (1/c + b n)``.

    Requires ``c > 0``, ``a >= 1``, ``b >= 0``.
    """
    n = _period(n)
    c, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (c, a, b)))
    an = ipow(a, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        general = an * (a - 1.0) / (b * an + (a - 1.0) / c - b)
        unit = 1.0 / (1.0 / c + b * n)
    out = np.where(a == 1.0, unit, general)
    return out[()] if out.ndim == 0 else out


def steady_state_value(a, b):
    """Limit of ``x_n``: ``(a-1)/b``, or 0 when ``a == 1``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any((a != 1.0) & (b == 0.0)):
        raise ValueError("no finite steady state for a != 1 with b == 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(a == 1.0, 0.0, (a - 1.0) / b)
    return out[()] if out.ndim == 0 else out


def _guarded(num, den, scale):
    small = np.abs(den) <= GUARD_EPS * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        q = num / np.where(small, 1.0, den)
    return q, ~small


def transform_1pdf(x, n: int, a, b) -> TransformEval:
    """Recover ``c`` from ``x = x_n(c, a, b)`` with ``a`` and ``b`` held fixed.

    ``c = x (a-1) / (a^n (a-1) - b x (a^n - 1))`` and
    ``|dc/dx| = (a-1)^2 a^n / (a^n (a-1) - b x (a^n - 1))^2``.
    """
    n = _period(n)
    x, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, a, b)))
    an = ipow(a, n)
    t1 = an * (a - 1.0)
    t2 = b * x * (an - 1.0)
    den = t1 - t2
    c, ok = _guarded(x * (a - 1.0), den, np.maximum(np.abs(t1), np.abs(t2)))
    with np.errstate(divide="ignore", invalid="ignore"):
        jac = (a - 1.0) ** 2 * an / np.where(ok, den, 1.0) ** 2
    if n == 0:
        c, jac, ok = x.copy(), np.ones_like(x), np.ones(x.shape, dtype=bool)
    valid = ok & (c > 0)
    return TransformEval(c, np.where(valid, np.abs(jac), 0.0), valid)


def transform_1pdf_for_b(x, n: int, a, c) -> TransformEval:
    """Recover ``b`` from ``x = x_n(c, a, b)`` with ``a`` and ``c`` held fixed.

    ``b = (a-1)/(a^n - 1) * (a^n / x - 1 / c)`` and
    ``|db/dx| = (a-1) a^n / (x^2 (a^n - 1))``.  Unlike
    :func:`transform_1pdf` this stays well conditioned for large ``n``, since
    ``a^n / (a^n - 1)`` is computed as ``1 / (1 - a^-n)``.  Requires ``n >= 1``.
    """
    n = _period(n)
    if n == 0:
        raise ValueError("x_0 does not depend on b; use transform_1pdf for n = 0")
    x, a, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, a, c)))
    inv_an = ipow(1.0 / a, n)
    ratio = 1.0 / (1.0 - inv_an)             # a^n / (a^n - 1)
    scale = (a - 1.0) * inv_an * ratio        # (a-1) / (a^n - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = (a - 1.0) * ratio / x - scale / c
        jac = (a - 1.0) * ratio / (x * x)
    valid = np.isfinite(b) & (b > 0) & (x > 0) & (c > 0)
    return TransformEval(b, np.where(valid, jac, 0.0), valid)


def transform_2pdf(x1, x2, n1: int, n2: int, a) -> TransformEval:
    """Recover ``(c, b)`` from the values ``x1, x2`` at periods ``n1 != n2``.

    ``inverse`` is the pair ``(c, b)``; ``jacobian_abs`` is the absolute
    determinant of the inverse map in the ``(x1, x2)`` variables.
    """
    n1, n2 = _period(n1), _period(n2)
    if n1 == n2:
        raise ValueError("n1 == n2: the map (c, b) -> (x_n1, x_n2) is not invertible; "
                         "use the 1-PDF for equal periods")
    x1, x2, a = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, a)))
    p1, p2 = ipow(a, n1), ipow(a, n2)
    t1 = x1 * p2 * (p1 - 1.0)
    t2 = x2 * p1 * (p2 - 1.0)
    den = t1 - t2
    diff = p1 - p2
    c, ok_c = _guarded(x1 * x2 * diff, den, np.maximum(np.abs(t1), np.abs(t2)))
    u1, u2 = x2 * p1, x1 * p2
    b, ok_b = _guarded((a - 1.0) * (u1 - u2), x1 * x2 * diff, x1 * x2 * np.maximum(p1, p2))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        jac = np.abs((a - 1.0) * p1 * p2 * diff / np.where(ok_c, den, 1.0) ** 2)
    valid = ok_c & ok_b & (c > 0) & (b > 0) & np.isfinite(jac)
    return TransformEval((c, b), np.where(valid, jac, 0.0), valid)


def transform_steady(x, c, b) -> TransformEval:
    """Recover ``a = x b + 1`` from the steady state ``x = (a-1)/b``; ``|da/dx| = |b|``."""
    x, c, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, c, b)))
    return TransformEval(x * b + 1.0, np.abs(b), np.ones(x.shape, dtype=bool))
