"""Exact-rational and stable floating-point primitives.

Everything here is pure and immutable.  Exact values are ``fractions.Fraction``
(re-exported as ``Rational``); half-integer and general rational arguments are
first class, there is no integer-only fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import DomainError, ZeroDenominator

Rational = Fraction
RationalLike = Union[int, Fraction]


@dataclass(frozen=True)
class EvalMode:
    """Evaluation mode for closed-form formulas.

    ``exact`` never rounds.  Float mode evaluates through log-Gamma and
    records an estimated cancellation magnitude (max |term| / |result|) per
    alternating sum, warning when it exceeds ``cancellation_warn_threshold``.
    """

    exact: bool
    cancellation_warn_threshold: float = 1e-8

    @property
    def name(self) -> str:
        return "exact" if self.exact else "float"


EXACT = EvalMode(exact=True)
FLOAT = EvalMode(exact=False)


def falling_factorial(x: RationalLike, m: int) -> Fraction:
    """x(x-1)...(x-m+1); the empty product for m = 0."""
    if m < 0:
        raise DomainError(f"falling factorial needs m >= 0, got {m}")
    x = Fraction(x)
    out = Fraction(1)
    for j in range(m):
        out *= x - j
    return out


def falling_factorial_ratio(
    c_num: RationalLike, c_den: RationalLike, m: int, mode: EvalMode = EXACT
):
    """[m+c_num-1]_m / [m+c_den-1]_m.

    Exact mode returns a Fraction.  Float mode uses the identity
    [m+c-1]_m = Gamma(m+c)/Gamma(c) for positive c and a signed log-product
    otherwise.  Raises ZeroDenominator when the denominator vanishes.
    """
    if m < 0:
        raise DomainError(f"falling factorial ratio needs m >= 0, got {m}")
    c_num = Fraction(c_num)
    c_den = Fraction(c_den)
    if mode.exact:
        den = falling_factorial(Fraction(m) + c_den - 1, m)
        if den == 0:
            raise ZeroDenominator(f"[m+{c_den}-1]_{m} = 0")
        if c_num == c_den:
            return Fraction(1)
        return falling_factorial(Fraction(m) + c_num - 1, m) / den
    sign_d, log_d = signed_log_falling_factorial(c_den, m)
    if sign_d == 0:
        raise ZeroDenominator(f"[m+{c_den}-1]_{m} = 0")
    sign_n, log_n = signed_log_falling_factorial(c_num, m)
    if sign_n == 0:
        return 0.0
    return sign_n * sign_d * math.exp(log_n - log_d)


def signed_log_falling_factorial(c: RationalLike, m: int) -> tuple[int, float]:
    """(sign, log|value|) of [m+c-1]_m = (c)(c+1)...(c+m-1).

    Sign 0 means the product is exactly zero (c a nonpositive integer within
    range).  Positive c goes through log-Gamma, which stays accurate for the
    large m this module is used with.
    """
    c = Fraction(c)
    if m == 0:
        return 1, 0.0
    cf = float(c)
    if c > 0:
        return 1, math.lgamma(m + cf) - math.lgamma(cf)
    # factors c, c+1, ..., c+m-1 with c <= 0: track signs, catch exact zeros
    if c.denominator == 1 and -c < m:
        return 0, float("-inf")
    sign = 1
    log_abs = 0.0
    for j in range(m):
        f = cf + j
        if f < 0:
            sign = -sign
        log_abs += math.log(abs(f))
    return sign, log_abs


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if x <= 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def binomial(r: RationalLike, n: int) -> Fraction:
    """Generalized binomial coefficient [r]_n / n! for integer n >= 0.

    Satisfies binomial(-r, n) = (-1)^n * binomial(n+r-1, n).
    """
    if n < 0:
        raise DomainError(f"binomial needs n >= 0, got {n}")
    return falling_factorial(r, n) / math.factorial(n)


def alternating_sum_scaled(signed_logs: Sequence[tuple[int, float]]) -> tuple[float, float]:
    """Sum signed terms given as (sign, log|term|); return (value, cancellation).

    Terms are rescaled by the largest magnitude before a Neumaier-compensated
    summation, so intermediate magnitudes never overflow.  The cancellation
    estimate is max|term| / |result| (inf when the result is zero but some
    term is not).
    """
    peak = max((lg for s, lg in signed_logs if s != 0), default=float("-inf"))
    if peak == float("-inf"):
        return 0.0, 1.0
    total = 0.0
    comp = 0.0
    for sign, lg in signed_logs:
        if sign == 0:
            continue
        term = sign * math.exp(lg - peak)
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
    scaled = total + comp
    if scaled == 0.0:
        return 0.0, float("inf")
    value = math.copysign(math.exp(peak + math.log(abs(scaled))), scaled)
    return value, 1.0 / abs(scaled)
