import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seriesbound import catalog
from seriesbound.bounds import (adaptive_bounds, integral_bounds_from_series, partial_sum,
                                refined_bounds, screen, triple_bounds, verify_sandwich)
from seriesbound.errors import DomainError, EvalError, HypothesisViolation
from seriesbound.expr import parse_expr
from seriesbound.quadrature import QuadConfig

# 1/(x^2 + 4), the running example throughout
QUAD4 = parse_expr("1/(x^2+4)")
QUAD4_I = 0.5 * (math.pi / 2 - math.atan(0.5))


# -- partial sums ------------------------------------------------------------------


def test_partial_sum_examples():
    assert partial_sum(QUAD4, 1) == 0.2
    assert round(partial_sum(QUAD4, 1000), 6) == 0.659404
    assert partial_sum(parse_expr("1"), 7) == 7.0


def test_partial_sum_is_order_independent():
    # exactly-rounded summation: reversing the terms cannot change the result
    k = np.arange(1, 200001, dtype=float)
    terms = 1.0 / k ** 1.3
    assert partial_sum(lambda x: 1.0 / x ** 1.3, 200000) == math.fsum(terms[::-1])


def test_partial_sum_accepts_strings_and_callables():
    assert partial_sum("1/x", 4) == pytest.approx(25 / 12, rel=1e-15)
    assert partial_sum(lambda k: 1 / k, 4) == pytest.approx(25 / 12, rel=1e-15)


def test_partial_sum_validation():
    with pytest.raises(DomainError):
        partial_sum(QUAD4, 0)
    with pytest.raises(DomainError):
        partial_sum(QUAD4, 2.5)
    with pytest.raises(EvalError):
        partial_sum(parse_expr("1/(x-3)"), 5)


# -- triple bounds -----------------------------------------------------------------


def test_triple_quad4_values():
    b = triple_bounds(QUAD4)
    assert abs(b.lower - 0.553574) <= 1e-5 and abs(b.upper - 0.753574) <= 1e-5
    assert (b.n_terms, b.partial_sum, b.f1, b.method) == (1, 0.2, 0.2, "triple")
    assert b.lower <= QUAD4_I <= b.tail_integral + b.quad_error


def test_triple_geometric():
    b = triple_bounds(parse_expr("2^(-x)"))
    assert b.lower <= 1.0 <= b.upper
    assert b.lower == pytest.approx(1 / (2 * math.log(2)), abs=1e-9)


def test_triple_lower_takes_max_of_integral_and_first_term():
    # for exp(-3x) the first term e^-3 exceeds the integral e^-3/3
    b = triple_bounds(parse_expr("exp(-3*x)"))
    assert b.lower == pytest.approx(math.exp(-3), rel=1e-9)
    assert b.lower <= 1 / math.expm1(3) <= b.upper


def test_triple_divergent():
    b = triple_bounds(parse_expr("1/x"))
    assert b.diverged and b.lower == b.upper == math.inf


def test_triple_rejects_unscreened_hypotheses():
    with pytest.raises(HypothesisViolation) as info:
        triple_bounds(parse_expr("x"))
    assert info.value.report is not None and not info.value.report.decreasing_ok


def test_skip_screening_marks_result():
    b = triple_bounds(QUAD4, skip_screening=True)
    assert not b.hypotheses_verified and b.screening is None
    assert triple_bounds(QUAD4).hypotheses_verified


def test_callable_inputs_are_screened_by_differences():
    assert screen(lambda x: 1 / (x * x + 4)).ok
    report = screen(lambda x: np.sin(x) + 2)
    assert not report.decreasing_ok and report.counterexample.quantity == "step"
    b = triple_bounds(lambda x: 1 / (x * x + 4))
    assert abs(b.upper - 0.753574) <= 1e-5


# -- refined bounds ----------------------------------------------------------------


def test_refined_quad4_n1000():
    b = refined_bounds(QUAD4, 1000)
    assert abs(b.lower - 0.659404) <= 1e-5 and abs(b.upper - 0.660404) <= 1e-5
    # closed-form tail I_1000 = atan(2/1000)/2
    assert abs(b.tail_integral - 0.5 * math.atan(0.002)) <= b.quad_error


def test_refined_n1_reduces_to_first_term_and_full_integral():
    b = refined_bounds(QUAD4, 1)
    assert b.partial_sum == 0.2
    assert 0.2 - 1e-15 <= b.lower <= 0.2
    assert abs(b.upper - 0.753574) <= 1e-5
    assert abs(b.tail_integral - QUAD4_I) <= b.quad_error


def test_refined_inverse_squares():
    b = refined_bounds(parse_expr("1/x^2"), 10)
    s10 = math.fsum(1 / k ** 2 for k in range(1, 11))
    assert b.lower == pytest.approx(s10, rel=1e-15)
    assert b.upper == pytest.approx(s10 + 0.1, abs=1e-9)
    # high-n oracle: S_N plus the integral tail bracket around pi^2/6
    N = 10 ** 6
    s_big = math.fsum(1.0 / np.arange(1, N + 1, dtype=float) ** 2)
    assert s_big + 1 / (N + 1) <= math.pi ** 2 / 6 + 1e-12
    assert b.lower <= math.pi ** 2 / 6 <= b.upper


def test_refined_invariants():
    for n in (1, 3, 17, 400):
        b = refined_bounds(QUAD4, n)
        assert b.lower >= b.partial_sum - b.quad_error
        assert b.upper - b.lower <= b.tail_integral + 2 * b.quad_error
        assert abs((b.upper - b.lower) - b.tail_integral) <= 2 * b.quad_error
        assert b.lower <= b.upper and b.f1 > 0


def test_refined_divergent():
    b = refined_bounds(parse_expr("x^-0.5"), 10)
    assert b.diverged and b.upper == math.inf


def test_triple_and_refined_n1_are_consistent():
    for f in (QUAD4, parse_expr("x^-3"), parse_expr("exp(-0.5*x)")):
        t, r = triple_bounds(f), refined_bounds(f, 1)
        slack = t.quad_error + r.quad_error
        assert abs(t.upper - r.upper) <= slack
        # the triple lower end max(I, f(1)) is never looser than f(1)
        assert t.lower >= r.lower - slack


# -- adaptive ----------------------------------------------------------------------


def test_adaptive_reaches_1e_3_at_1024_terms():
    b = adaptive_bounds(QUAD4, 1e-3)
    assert b.target_met and b.width <= 1e-3 and b.n_terms == 1024


def test_adaptive_wide_target_stops_at_first_stage():
    b = adaptive_bounds(QUAD4, 1.0)
    assert b.n_terms == 1 and b.width == pytest.approx(QUAD4_I, abs=1e-9)


def test_adaptive_cap_returns_best_effort():
    b = adaptive_bounds(QUAD4, 1e-6, n_cap=100)
    assert not b.target_met and b.n_terms == 64 and not b.diverged
    assert b.lower <= catalog.closed_sum(catalog.lookup("shifted_quadratic", {"a": 2})) <= b.upper


def test_adaptive_divergent():
    assert adaptive_bounds(parse_expr("1/x"), 1e-3).diverged


def test_adaptive_partial_sum_matches_direct_sum():
    b = adaptive_bounds(QUAD4, 1e-4)
    assert b.partial_sum == partial_sum(QUAD4, b.n_terms)


def test_adaptive_validation():
    with pytest.raises(DomainError):
        adaptive_bounds(QUAD4, 0.0)
    with pytest.raises(DomainError):
        adaptive_bounds(QUAD4, 1e-3, n_cap=0)


# -- reciprocal direction ----------------------------------------------------------


def test_integral_from_series_examples():
    lo, hi = integral_bounds_from_series(0.660404, 0.660405, 0.2)
    assert lo == pytest.approx(0.460404, abs=1e-12) and hi == 0.660405
    assert lo <= 0.553574 <= hi
    lo, hi = integral_bounds_from_series(1.0, 1.0, 0.5)
    assert (lo, hi) == (0.5, 1.0) and lo <= 1 / (2 * math.log(2)) <= hi
    assert integral_bounds_from_series(3.0, 3.0, 1.0) == (2.0, 3.0)


@given(st.floats(-1e6, 1e6), st.floats(0, 1e3), st.floats(1e-6, 1e3))
def test_integral_from_series_width_law(s_lo, width, f1):
    lo, hi = integral_bounds_from_series(s_lo, s_lo + width, f1)
    assert (hi - lo) == pytest.approx((s_lo + width - s_lo) + f1, rel=1e-9, abs=1e-6)


def test_integral_from_series_validation():
    with pytest.raises(DomainError):
        integral_bounds_from_series(2.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        integral_bounds_from_series(1.0, 2.0, 0.0)


# -- sandwich ----------------------------------------------------------------------


def test_sandwich_quad4_n3():
    r = verify_sandwich(QUAD4, 3)
    assert r.s_inf == pytest.approx(1 / 8 + 1 / 13, rel=1e-15)
    assert r.s_sup == pytest.approx(0.325, rel=1e-15)
    assert abs(r.integral_1_to_n - 0.5 * (math.atan(1.5) - math.atan(0.5))) <= 1e-12
    assert r.holds and r.slack_low > 0 and r.slack_high > 0


def test_sandwich_constant_is_the_equality_case():
    r = verify_sandwich(parse_expr("0.7"), 5)
    assert r.holds
    assert r.s_inf == r.s_sup == pytest.approx(2.8, rel=1e-15)
    assert abs(r.slack_low) <= r.quad_error and abs(r.slack_high) <= r.quad_error


def test_sandwich_inverse_square_n2():
    r = verify_sandwich(parse_expr("1/x^2"), 2)
    assert (r.s_inf, r.s_sup) == (0.25, 1.0)
    assert r.integral_1_to_n == pytest.approx(0.5, abs=1e-12) and r.holds


def test_sandwich_by_construction():
    for n in (2, 9, 30):
        r = verify_sandwich(QUAD4, n)
        s_n = partial_sum(QUAD4, n)
        assert r.s_inf == pytest.approx(s_n - 0.2, abs=1e-15)
        assert r.s_sup == pytest.approx(partial_sum(QUAD4, n - 1), abs=1e-15)


def test_sandwich_fails_for_increasing_function():
    assert not verify_sandwich(parse_expr("x"), 4).holds


def test_sandwich_validation():
    with pytest.raises(DomainError):
        verify_sandwich(QUAD4, 1)


# -- properties --------------------------------------------------------------------

_FAMILY = st.one_of(
    st.floats(1.3, 5).map(lambda p: catalog.lookup("p_series", {"p": p})),
    st.floats(0.05, 20).map(lambda a: catalog.lookup("shifted_quadratic", {"a": a})),
    st.floats(0.05, 5).map(lambda a: catalog.lookup("exponential", {"a": a})),
)


@settings(max_examples=40, deadline=None)
@given(_FAMILY, st.integers(1, 300))
def test_refined_nesting(entry, n):
    a, b = refined_bounds(entry, n), refined_bounds(entry, n + 1)
    assert b.lower >= a.lower
    assert b.upper <= a.upper + 2 * max(a.quad_error, b.quad_error)


@settings(max_examples=40, deadline=None)
@given(_FAMILY, st.integers(2, 60))
def test_sandwich_property(entry, n):
    assert verify_sandwich(entry, n).holds


@settings(max_examples=25, deadline=None)
@given(_FAMILY, st.floats(1e-8, 1e-1))
def test_adaptive_success_implies_width(entry, target):
    b = adaptive_bounds(entry, target, n_cap=2 ** 16)
    if b.target_met:
        assert b.width <= target
    assert b.lower <= b.upper


def test_looser_quadrature_tolerance_widens_honestly():
    cfg = QuadConfig(abs_tol=1e-4)
    b = refined_bounds(QUAD4, 10, cfg)
    s = catalog.closed_sum(catalog.lookup("shifted_quadratic", {"a": 2}))
    assert b.lower <= s <= b.upper and b.quad_error <= 1e-4
