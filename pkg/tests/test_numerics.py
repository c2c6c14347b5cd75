import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagrow.errors import DomainError, ZeroDenominator
from pagrow.numerics import (
    EXACT,
    FLOAT,
    EvalMode,
    alternating_sum_scaled,
    binomial,
    falling_factorial,
    falling_factorial_ratio,
    log_gamma,
    signed_log_falling_factorial,
)

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=16
)


def test_falling_factorial_basics():
    assert falling_factorial(3, 2) == 6
    assert falling_factorial(Fraction(17, 3), 0) == 1
    assert falling_factorial(Fraction(1, 2), 1) == Fraction(1, 2)
    assert falling_factorial(5, 5) == 120
    assert falling_factorial(2, 4) == 0  # hits the zero factor


def test_falling_factorial_rejects_negative_m():
    with pytest.raises(DomainError):
        falling_factorial(3, -1)


@given(x=rationals, m=st.integers(min_value=1, max_value=100))
@settings(max_examples=60, deadline=None)
def test_falling_factorial_recurrence(x, m):
    assert falling_factorial(x, m) == falling_factorial(x, m - 1) * (x - m + 1)


def test_falling_factorial_ratio_examples():
    assert falling_factorial_ratio(Fraction(1, 2), 1, 1) == Fraction(1, 2)
    assert falling_factorial_ratio(Fraction(7, 3), Fraction(7, 3), 9) == 1
    assert falling_factorial_ratio(3, 5, 1) == Fraction(3, 5)


def test_falling_factorial_ratio_zero_denominator():
    # c_den = 0 makes [m + c - 1]_m include the factor 0
    with pytest.raises(ZeroDenominator):
        falling_factorial_ratio(1, 0, 3)
    with pytest.raises(ZeroDenominator):
        falling_factorial_ratio(1, -2, 5, FLOAT)


@given(
    c_num=rationals.filter(lambda c: c > 0 or c.denominator > 1),
    c_den=st.fractions(min_value=Fraction(1, 16), max_value=Fraction(50), max_denominator=16),
    m=st.integers(min_value=0, max_value=500),
)
@settings(max_examples=40, deadline=None)
def test_float_ratio_matches_exact(c_num, c_den, m):
    exact = falling_factorial_ratio(c_num, c_den, m, EXACT)
    approx = falling_factorial_ratio(c_num, c_den, m, FLOAT)
    if exact == 0:
        assert approx == 0
    else:
        assert abs(approx - float(exact)) <= 1e-10 * abs(float(exact))


def test_signed_log_detects_exact_zero():
    sign, lg = signed_log_falling_factorial(Fraction(-3), 10)
    assert sign == 0 and lg == float("-inf")
    sign, _ = signed_log_falling_factorial(Fraction(-5, 2), 4)
    assert sign == (-1) ** 3  # factors -5/2, -3/2, -1/2 negative, 1/2 positive


def test_log_gamma_values():
    assert log_gamma(1.0) == 0.0
    assert abs(log_gamma(1.5) - math.log(math.sqrt(math.pi) / 2)) < 1e-15
    assert abs(math.exp(log_gamma(3.5) - log_gamma(2.5)) - 2.5) < 1e-13


def test_log_gamma_against_high_precision():
    import mpmath

    # relative near the zeros of log-Gamma is ill-conditioned; use the
    # mixed criterion |err| <= tol * max(1, |ref|)
    for x in [0.5, 1.0 + 1e-9, 1.5, 2.0, 7.25, 123.456, 1e5, 1e9]:
        ref = float(mpmath.loggamma(x))
        got = log_gamma(x)
        assert abs(got - ref) <= 1e-13 * max(1.0, abs(ref))


def test_log_gamma_domain():
    with pytest.raises(DomainError):
        log_gamma(0.0)
    with pytest.raises(DomainError):
        log_gamma(-1.5)


def test_binomial_examples():
    assert binomial(5, 2) == 10
    assert binomial(-2, 2) == 3
    assert binomial(Fraction(2) + 1 - 1, 1) == 2
    assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)


def test_binomial_negation_identity_exhaustive():
    for r in range(1, 21):
        for n in range(0, 21):
            assert binomial(-r, n) == (-1) ** n * binomial(n + r - 1, n)


def test_alternating_sum_scaled_tracks_cancellation():
    # 1e300 - 1e300 + 1 in log space: huge cancellation, exact result 1
    terms = [(1, 300 * math.log(10)), (-1, 300 * math.log(10)), (1, 0.0)]
    value, cancellation = alternating_sum_scaled(terms)
    assert value == pytest.approx(1.0, rel=1e-10)
    assert cancellation > 1e200


def test_alternating_sum_scaled_handles_huge_terms():
    # exp(700) alone overflows squared intermediates; the result is fine
    value, _ = alternating_sum_scaled([(1, 700.0), (-1, 699.0)])
    expected = math.exp(700.0) * (1.0 - math.exp(-1.0))
    assert value == pytest.approx(expected, rel=1e-12)


def test_eval_mode_defaults():
    assert EXACT.exact and not FLOAT.exact
    assert FLOAT.cancellation_warn_threshold == 1e-8
    custom = EvalMode(exact=False, cancellation_warn_threshold=1e-3)
    assert custom.name == "float"
