import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bhrvt.model import (ipow, iterate_map, solution_closed_form, steady_state_value,
                         transform_1pdf, transform_1pdf_for_b, transform_2pdf, transform_steady)

coef = st.tuples(st.floats(0.05, 1.0), st.floats(1.1, 2.0), st.floats(0.1, 1.0))


def test_iterate_examples():
    assert iterate_map(1.0, 2.0, 1.0, 0) == 1.0
    assert iterate_map(1.0, 2.0, 1.0, 5) == pytest.approx(1.0)
    assert iterate_map(0.5, 2.0, 0.5, 1) == pytest.approx(0.8)


def test_closed_form_examples():
    assert solution_closed_form(0.5, 2.0, 0.5, 1) == pytest.approx(0.8)
    assert solution_closed_form(0.5, 1.0, 0.0, 7) == pytest.approx(0.5)
    assert solution_closed_form(1.0, 1.0, 1.0, 1) == pytest.approx(0.5)


def test_steady_state_value():
    assert steady_state_value(2.0, 1.0) == 1.0
    assert steady_state_value(1.0, 0.3) == 0.0
    with pytest.raises(ValueError):
        steady_state_value(1.5, 0.0)


def test_ipow_matches_power():
    a = np.linspace(1.0, 2.0, 11)
    for n in (0, 1, 7, 50, 300):
        np.testing.assert_allclose(ipow(a, n), a**n, rtol=1e-13)
    with pytest.raises(ValueError):
        ipow(2.0, -1)


def test_negative_period_rejected():
    with pytest.raises(ValueError):
        iterate_map(0.5, 1.5, 0.5, -1)
    with pytest.raises(ValueError):
        solution_closed_form(0.5, 1.5, 0.5, 1.5)


@settings(max_examples=200, deadline=None)
@given(coef, st.integers(0, 50))
def test_closed_form_equals_recurrence(p, n):
    c, a, b = p
    assert abs(solution_closed_form(c, a, b, n) - iterate_map(c, a, b, n)) <= 1e-12 * iterate_map(c, a, b, n)


@settings(max_examples=200, deadline=None)
@given(coef, st.integers(0, 12))
def test_1pdf_round_trip(p, n):
    c, a, b = p
    x = solution_closed_form(c, a, b, n)
    t = transform_1pdf(x, n, a, b)
    assert t.valid
    assert abs(t.inverse_value - c) <= 1e-10 * c


@settings(max_examples=200, deadline=None)
@given(coef, st.integers(1, 60))
def test_1pdf_for_b_round_trip(p, n):
    c, a, b = p
    x = solution_closed_form(c, a, b, n)
    t = transform_1pdf_for_b(x, n, a, c)
    assert abs(t.inverse - b) <= 1e-9 * max(b, 1.0)


def test_1pdf_for_b_jacobian_is_derivative():
    x, n, a, c = 0.7, 6, 1.4, 0.3
    h = 1e-6
    fd = (transform_1pdf_for_b(x + h, n, a, c).inverse - transform_1pdf_for_b(x - h, n, a, c).inverse) / (2 * h)
    assert transform_1pdf_for_b(x, n, a, c).jacobian_abs == pytest.approx(abs(fd), rel=1e-7)
    with pytest.raises(ValueError):
        transform_1pdf_for_b(x, 0, a, c)


def test_1pdf_jacobian_is_derivative():
    x, n, a, b = 0.7, 4, 1.6, 0.4
    h = 1e-6
    fd = (transform_1pdf(x + h, n, a, b).inverse - transform_1pdf(x - h, n, a, b).inverse) / (2 * h)
    assert transform_1pdf(x, n, a, b).jacobian_abs == pytest.approx(abs(fd), rel=1e-7)


def test_1pdf_identity_at_zero():
    x = np.array([0.1, 0.5, 3.0])
    t = transform_1pdf(x, 0, 1.7, 0.2)
    np.testing.assert_array_equal(t.inverse, x)
    np.testing.assert_array_equal(t.jacobian_abs, 1.0)


def test_1pdf_invalid_region():
    # x above the steady state for this (a, b): no admissible c
    t = transform_1pdf(5.0, 3, 1.5, 0.5)
    assert not t.valid and t.jacobian_abs == 0


def test_1pdf_example():
    t = transform_1pdf(0.8, 1, 2.0, 0.5)
    assert t.inverse == pytest.approx(0.5)


@settings(max_examples=200, deadline=None)
@given(coef, st.integers(0, 8), st.integers(1, 8))
def test_2pdf_round_trip(p, n1, k):
    c, a, b = p
    n2 = n1 + k
    x1, x2 = solution_closed_form(c, a, b, n1), solution_closed_form(c, a, b, n2)
    if abs(x2 - x1) < 1e-6 * x1:
        return  # already at the steady state: (c, b) not recoverable
    t = transform_2pdf(x1, x2, n1, n2, a)
    cc, bb = t.inverse
    assert abs(cc - c) <= 1e-6 * c
    assert abs(bb - b) <= 1e-6 * b


def test_2pdf_example_and_swap():
    x1, x2 = solution_closed_form(0.5, 1.5, 0.5, 1), solution_closed_form(0.5, 1.5, 0.5, 2)
    t = transform_2pdf(x1, x2, 1, 2, 1.5)
    np.testing.assert_allclose(t.inverse, (0.5, 0.5), rtol=1e-12)
    s = transform_2pdf(x2, x1, 2, 1, 1.5)
    np.testing.assert_allclose(s.inverse, t.inverse, rtol=1e-12)
    assert s.jacobian_abs == pytest.approx(t.jacobian_abs, rel=1e-12)


def test_2pdf_jacobian_is_determinant():
    a, n1, n2 = 1.3, 1, 3
    x1, x2 = 0.6, 0.9
    h = 1e-6

    def inv(u, v):
        return np.array(transform_2pdf(u, v, n1, n2, a).inverse)

    j = np.column_stack([(inv(x1 + h, x2) - inv(x1 - h, x2)) / (2 * h),
                         (inv(x1, x2 + h) - inv(x1, x2 - h)) / (2 * h)])
    assert transform_2pdf(x1, x2, n1, n2, a).jacobian_abs == pytest.approx(abs(np.linalg.det(j)), rel=1e-6)


def test_2pdf_equal_periods_rejected():
    with pytest.raises(ValueError, match="1-PDF"):
        transform_2pdf(0.5, 0.5, 3, 3, 1.5)


def test_steady_examples():
    t = transform_steady(1.0, 0.5, 0.5)
    assert t.inverse == pytest.approx(1.5) and t.jacobian_abs == pytest.approx(0.5)
    assert transform_steady(0.0, 0.1, 0.3).inverse == 1.0
    t = transform_steady(2.0, 0.2, 0.45)
    assert t.inverse == pytest.approx(1.9) and t.jacobian_abs == pytest.approx(0.45)


@settings(max_examples=100, deadline=None)
@given(coef)
def test_monotone_approach_to_steady_state(p):
    c, a, b = p
    s = (a - 1) / b
    if abs(c - s) < 1e-3:
        return
    d = np.abs(np.array([solution_closed_form(c, a, b, n) for n in range(30)]) - s)
    d = d[d > 1e-12 * s]
    assert np.all(np.diff(d) < 0)
