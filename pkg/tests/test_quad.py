import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bhrvt.quad import (NODES, ConvergenceError, QuadratureConfig, integrate_1d, integrate_2d,
                        integrate_3d, integrate_batch)


def test_constant_is_exact():
    assert integrate_1d(lambda x: np.ones_like(x), (0.0, 1.0)).value == 1.0


def test_square_is_exact():
    r = integrate_1d(lambda x: x**2, (0.0, 1.0))
    assert abs(r.value - 1 / 3) < 1e-12
    assert r.converged


def test_reciprocal():
    r = integrate_1d(lambda x: 1 / x, (1.1, 2.0))
    assert abs(r.value - math.log(2 / 1.1)) < 1e-12


def test_2d_constant_and_separable():
    assert abs(integrate_2d(lambda x, y: np.ones_like(x), ((0, 1), (0, 1))).value - 1) < 1e-14
    r = integrate_2d(lambda a, b: a * b, ((1.1, 2.0), (0.1, 1.0)))
    assert abs(r.value - 1.3950 * 0.495) < 1e-12


def test_3d_gaussian_mass():
    f = lambda x, y, z: np.exp(-(x**2 + y**2 + z**2) / 2) / (2 * np.pi) ** 1.5
    r = integrate_3d(f, ((-9, 9),) * 3, QuadratureConfig(1e-9, 1e-12))
    assert r.converged
    assert abs(r.value - 1) < 1e-8


def test_endpoint_singularity_converges():
    r = integrate_1d(np.sqrt, (0.0, 1.0))
    assert r.converged
    assert abs(r.value - 2 / 3) < 1e-6


def test_jump_needs_breakpoint():
    step = lambda x: (x > 1 / math.pi).astype(float)
    with_bp = integrate_1d(step, (0, 1), breakpoints=[1 / math.pi])
    assert with_bp.converged and abs(with_bp.value - (1 - 1 / math.pi)) < 1e-14
    without = integrate_1d(step, (0, 1), QuadratureConfig(1e-12, 1e-14, max_depth=5))
    assert not without.converged


def test_batch_independent_problems():
    lo = np.array([0.0, 1.0, 2.0, 3.0])
    hi = np.array([1.0, 1.0, 4.0, 2.0])  # second and last are empty
    res = integrate_batch(lambda x, j: x * (j + 1), lo, hi)
    np.testing.assert_allclose(res.values, [0.5, 0.0, 3 * 6.0, 0.0], rtol=1e-14)
    assert res.all_converged


def test_batch_matches_single_calls():
    f = lambda x: np.sin(3 * x) * np.exp(-x)
    lo, hi = np.array([0.0, 0.5, -1.0]), np.array([2.0, 3.0, 0.0])
    batch = integrate_batch(lambda x, j: f(x), lo, hi)
    singles = [integrate_1d(f, (l, h)).value for l, h in zip(lo, hi)]
    np.testing.assert_allclose(batch.values, singles, rtol=1e-12)


def test_inner_failure_propagates():
    res = integrate_batch(lambda x, j: (np.ones_like(x), x < 0.5), [0.0], [1.0])
    assert not res.converged[0]
    with pytest.raises(ConvergenceError):
        res.raise_if_failed()


def test_nonfinite_integrand_is_an_error():
    with pytest.raises(FloatingPointError), np.errstate(divide="ignore"):
        integrate_1d(lambda x: 1 / (x - x), (0.0, 1.0))


def test_infinite_limits_rejected():
    with pytest.raises(ValueError):
        integrate_batch(lambda x, j: x, [0.0], [np.inf])


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_depth=0)
    with pytest.raises(ValueError):
        QuadratureConfig(panel_rule="simpson")
    t = QuadratureConfig(1e-6, 1e-9).tightened()
    assert t.rel_tol == pytest.approx(1e-7) and t.abs_tol == pytest.approx(1e-10)


def test_deterministic():
    f = lambda x: np.abs(np.sin(7 * x)) ** 0.3
    a = integrate_1d(f, (0, 3))
    b = integrate_1d(f, (0, 3))
    assert a == b


def test_rule_is_symmetric():
    np.testing.assert_allclose(NODES, -NODES[::-1], atol=0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.floats(-2, 2), st.floats(0.01, 3))
def test_polynomials_exact_on_one_panel(coefs, lo, width):
    p = np.polynomial.Polynomial(coefs)
    r = integrate_1d(p, (lo, lo + width))
    exact = p.integ()(lo + width) - p.integ()(lo)
    assert abs(r.value - exact) <= 1e-11 * max(1.0, abs(exact))


def test_tightening_does_not_hurt():
    f = lambda x: 1 / (1 + 25 * x**2)
    exact = 2 * math.atan(5) / 5
    errs = [abs(integrate_1d(f, (-1, 1), QuadratureConfig(tol, 1e-15)).value - exact)
            for tol in (1e-3, 1e-5, 1e-7, 1e-9)]
    assert all(b <= a or b < 1e-14 for a, b in zip(errs, errs[1:]))
