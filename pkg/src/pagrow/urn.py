"""Exact triangular-urn analytics and degree-distribution adapters.

The urn holds white and black balls; a white draw returns the ball plus
``alpha`` white and ``sigma - alpha`` black, a black draw returns it plus
``sigma`` black.  White count after m draws is ``a0 + alpha * x`` where x
counts white draws.  Closed forms below are evaluated exactly over rationals
by default and cross-checked by two independent oracles: a rational dynamic
program over white-draw counts, and a truncated expansion of the
history-counting generating function.

For a growth run seeded with k loops, the degree of vertex i >= 2 evolves
(in the single-increment approximation) like the white count of the urn
alpha=1, sigma=2, a0=k, b0=2i-k; complete-seed adapters use the ball-unit
parameters alpha=k, sigma=2k with total-degree bookkeeping.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CancellationWarning,
    DomainError,
    NonIntegralParameters,
    ParameterOutOfRange,
)
from .growth import COMPLETE, K_LOOPS, SeedGraph
from .numerics import (
    EXACT,
    FLOAT,
    EvalMode,
    Rational,
    alternating_sum_scaled,
    binomial,
    falling_factorial_ratio,
    signed_log_falling_factorial,
)
from .pmf import DegreePmf, check_mass

# Auto mode: exact tables up to support length 500, exact moments up to
# m = 2000; float with cancellation tracking beyond that.
AUTO_EXACT_PMF_MAX_M = 500
AUTO_EXACT_MOMENT_MAX_M = 2000

DP_ORACLE_MAX_M = 5000
GF_ORACLE_MAX_M = 8


@dataclass(frozen=True)
class TriangularUrnSpec:
    """Replacement rule (white draw: +alpha white, +sigma-alpha black;
    black draw: +sigma black) with initial white a0 > 0 and black b0 >= 0."""

    alpha: int
    sigma: int
    a0: Fraction
    b0: Fraction

    def __post_init__(self):
        if not (isinstance(self.alpha, int) and isinstance(self.sigma, int)):
            raise ParameterOutOfRange("alpha and sigma must be integers")
        if not 1 <= self.alpha <= self.sigma:
            raise ParameterOutOfRange(
                f"need sigma >= alpha >= 1, got alpha={self.alpha} sigma={self.sigma}"
            )
        object.__setattr__(self, "a0", Fraction(self.a0))
        object.__setattr__(self, "b0", Fraction(self.b0))
        if self.a0 <= 0:
            raise ParameterOutOfRange(f"a0 must be positive, got {self.a0}")
        if self.b0 < 0:
            raise ParameterOutOfRange(f"b0 must be non-negative, got {self.b0}")

    @property
    def t0(self) -> Fraction:
        return self.a0 + self.b0

    def scaled(self, c: int) -> "TriangularUrnSpec":
        """Same x-distribution with every parameter multiplied by c."""
        return TriangularUrnSpec(self.alpha * c, self.sigma * c, self.a0 * c, self.b0 * c)


def _resolve_mode(mode: EvalMode | None, m: int, table: bool) -> EvalMode:
    if mode is not None:
        return mode
    limit = AUTO_EXACT_PMF_MAX_M if table else AUTO_EXACT_MOMENT_MAX_M
    return EXACT if m <= limit else FLOAT


def urn_pmf(spec: TriangularUrnSpec, m: int, mode: EvalMode | None = None) -> DegreePmf:
    """P(white count = a0 + x*alpha) for x = 0..m after m draws.

    The alternating falling-factorial-ratio sum cancels catastrophically for
    large x; exact mode is immune, float mode sums scaled terms with
    compensation and records the worst max|term|/|result| ratio, warning
    above the mode's threshold.
    """
    if m < 0:
        raise ParameterOutOfRange(f"m must be >= 0, got {m}")
    mode = _resolve_mode(mode, m, table=True)
    t0s = spec.t0 / spec.sigma
    a_over_alpha = spec.a0 / spec.alpha
    if mode.exact:
        ratios = [
            falling_factorial_ratio(Fraction(spec.b0 - spec.alpha * i, spec.sigma), t0s, m)
            for i in range(m + 1)
        ]
        probs = []
        prefactor = Fraction(1)
        for x in range(m + 1):
            if x > 0:
                prefactor = prefactor * (x + a_over_alpha - 1) / x
            acc = Fraction(0)
            c = Fraction(1)  # C(x, i), advanced incrementally
            for i in range(x + 1):
                acc += c * ratios[i] if i % 2 == 0 else -c * ratios[i]
                if i < x:
                    c = c * (x - i) / (i + 1)
            probs.append(prefactor * acc)
        out = DegreePmf(spec.a0, spec.alpha, tuple(probs), exact=True)
        check_mass(out)
        return out

    # float path: everything in log space, one scaled compensated sum per x
    _, log_den = signed_log_falling_factorial(t0s, m)
    signed_logs = []
    for i in range(m + 1):
        s, lg = signed_log_falling_factorial(Fraction(spec.b0 - spec.alpha * i, spec.sigma), m)
        signed_logs.append((s, lg - log_den))
    a = float(a_over_alpha)
    probs = []
    worst = 0.0
    for x in range(m + 1):
        log_pref = math.lgamma(x + a) - math.lgamma(a) - math.lgamma(x + 1)
        terms = []
        for i in range(x + 1):
            s, lg = signed_logs[i]
            sign = s if i % 2 == 0 else -s
            log_binom = math.lgamma(x + 1) - math.lgamma(i + 1) - math.lgamma(x - i + 1)
            terms.append((sign, log_pref + log_binom + lg))
        value, cancellation = alternating_sum_scaled(terms)
        worst = max(worst, 0.0 if math.isinf(cancellation) else cancellation)
        probs.append(value)
    if worst > mode.cancellation_warn_threshold:
        warnings.warn(
            f"alternating sum cancellation ratio {worst:.3e} exceeds "
            f"{mode.cancellation_warn_threshold:.1e}; float-mode table is unreliable",
            CancellationWarning,
            stacklevel=2,
        )
    return DegreePmf(spec.a0, spec.alpha, tuple(probs), exact=False, cancellation=worst)


def urn_pmf_dp_oracle(spec: TriangularUrnSpec, m: int) -> DegreePmf:
    """Independent exact oracle: forward dynamic program over white draws.

    After s draws the urn holds t0 + s*sigma balls, a0 + j*alpha of them
    white when j draws were white so far.
    """
    if not 0 <= m <= DP_ORACLE_MAX_M:
        raise ParameterOutOfRange(f"dp oracle supports 0 <= m <= {DP_ORACLE_MAX_M}, got {m}")
    probs = [Fraction(1)]
    for s in range(m):
        total = spec.t0 + s * spec.sigma
        nxt = [Fraction(0)] * (s + 2)
        for j, p in enumerate(probs):
            if p:
                white = (spec.a0 + j * spec.alpha) / total
                nxt[j + 1] += p * white
                nxt[j] += p * (1 - white)
        probs = nxt
    out = DegreePmf(spec.a0, spec.alpha, tuple(probs), exact=True)
    check_mass(out)
    return out


def urn_gf_oracle(spec: TriangularUrnSpec, m: int) -> DegreePmf:
    """Second oracle: truncated expansion of the history generating function.

    Expands x^{a0} * (1-sigma z)^{-b0/sigma} * (1 - x^alpha (1 - (1-sigma
    z)^{alpha/sigma}))^{-a0/alpha} to order z^m, then normalizes the z^m
    coefficient row by histories-per-count: multiply by m! and divide by
    t0 (t0+sigma) ... (t0+(m-1)sigma).  Needs integral ball counts.
    """
    if not 0 <= m <= GF_ORACLE_MAX_M:
        raise ParameterOutOfRange(f"gf oracle supports 0 <= m <= {GF_ORACLE_MAX_M}, got {m}")
    if spec.a0.denominator != 1 or spec.b0.denominator != 1:
        raise NonIntegralParameters("gf oracle needs integral a0 and b0")
    a0, b0 = int(spec.a0), int(spec.b0)
    alpha, sigma = spec.alpha, spec.sigma

    # scalar series in z, coefficient lists of length m+1
    def power_series(exponent: Fraction) -> list[Fraction]:
        return [binomial(exponent, j) * (-sigma) ** j for j in range(m + 1)]

    shrink = power_series(Fraction(alpha, sigma))  # (1 - sigma z)^(alpha/sigma)
    u = [-c for c in shrink]
    u[0] += 1  # u = 1 - (1 - sigma z)^(alpha/sigma), valuation 1

    def mul(f: list[Fraction], g: list[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * (m + 1)
        for i, fi in enumerate(f):
            if fi:
                for j in range(m + 1 - i):
                    if g[j]:
                        out[i + j] += fi * g[j]
        return out

    # rows[a] = scalar series multiplying x^a
    rows: dict[int, list[Fraction]] = {}
    u_pow = [Fraction(0)] * (m + 1)
    u_pow[0] = Fraction(1)
    a_over_alpha = spec.a0 / spec.alpha
    for j in range(m + 1):
        coef = binomial(j + a_over_alpha - 1, j)
        if coef:
            rows[a0 + alpha * j] = [coef * c for c in u_pow]
        if j < m:
            u_pow = mul(u_pow, u)

    black = power_series(Fraction(-b0, sigma))  # (1 - sigma z)^(-b0/sigma)
    table: dict[int, Fraction] = {}
    histories = Fraction(1)
    for s in range(m):
        histories *= spec.t0 + s * sigma
    norm = Fraction(math.factorial(m)) / histories if m else Fraction(1)
    for a, series in rows.items():
        coef_m = mul(series, black)[m]
        if coef_m:
            table[a] = coef_m * norm

    probs = [table.get(a0 + alpha * x, Fraction(0)) for x in range(m + 1)]
    out = DegreePmf(spec.a0, spec.alpha, tuple(probs), exact=True)
    check_mass(out)
    return out


def _gamma_shift_ratio(spec: TriangularUrnSpec, q: Fraction, m: int, exact: bool):
    """Gamma(t0/s)Gamma(m+q/s) / (Gamma(q/s)Gamma(t0/s+m)) as a telescoping
    product (exact) or through log-Gamma (float)."""
    if exact:
        out = Fraction(1)
        for s in range(m):
            out *= (Fraction(q, spec.sigma) + s) / (spec.t0 / spec.sigma + s)
        return out
    qs, ts = float(q) / spec.sigma, float(spec.t0) / spec.sigma
    return math.exp(math.lgamma(m + qs) - math.lgamma(qs) + math.lgamma(ts) - math.lgamma(ts + m))


def urn_mean(spec: TriangularUrnSpec, m: int, mode: EvalMode | None = None):
    """E[white count after m draws]."""
    if m < 0:
        raise ParameterOutOfRange(f"m must be >= 0, got {m}")
    mode = _resolve_mode(mode, m, table=False)
    g1 = _gamma_shift_ratio(spec, spec.t0 + spec.alpha, m, mode.exact)
    return spec.a0 * g1 if mode.exact else float(spec.a0) * g1


def urn_second_moment(spec: TriangularUrnSpec, m: int, mode: EvalMode | None = None):
    """E[(white count)^2] after m draws.

    Combines the second factorial moment extracted from the history
    generating function with the mean; the sign of the lower-order term is
    pinned against the dynamic-program oracle in the test suite.
    """
    if m < 0:
        raise ParameterOutOfRange(f"m must be >= 0, got {m}")
    mode = _resolve_mode(mode, m, table=False)
    g2 = _gamma_shift_ratio(spec, spec.t0 + 2 * spec.alpha, m, mode.exact)
    g1 = _gamma_shift_ratio(spec, spec.t0 + spec.alpha, m, mode.exact)
    if mode.exact:
        return spec.a0 * ((spec.a0 + spec.alpha) * g2 - spec.alpha * g1)
    return float(spec.a0) * (float(spec.a0 + spec.alpha) * g2 - spec.alpha * g1)


def urn_second_moment_displayed_variant(spec: TriangularUrnSpec, m: int) -> Fraction:
    """Rejected sign variant a0[(a0+alpha) G(t0+2a) + (alpha+1) G(t0+a)].

    Kept only so the regression tests can demonstrate that it disagrees with
    the enumeration oracles (14 vs 13/2 on alpha=1, sigma=2, a0=b0=2, m=1).
    """
    g2 = _gamma_shift_ratio(spec, spec.t0 + 2 * spec.alpha, m, exact=True)
    g1 = _gamma_shift_ratio(spec, spec.t0 + spec.alpha, m, exact=True)
    return spec.a0 * ((spec.a0 + spec.alpha) * g2 + (spec.alpha + 1) * g1)


# -- degree-formula surface ---------------------------------------------------


def expected_degree(k: int, i: int, n: int) -> Fraction:
    """E[d_n(v_i)] = k * prod_{t=i}^{n-1} (1 + 1/(2t)), exact.

    Restricted to i >= 2: the first vertex is born with 2k loop ends, not k,
    so the product form does not apply to it.
    """
    if i < 2:
        raise ParameterOutOfRange(f"expected_degree needs i >= 2, got {i}")
    if n < i:
        raise ParameterOutOfRange(f"expected_degree needs n >= i, got n={n} i={i}")
    out = Fraction(k)
    for t in range(i, n):
        out *= 1 + Fraction(1, 2 * t)
    return out


def expected_degree_gamma(k: int, i: int, n: int) -> float:
    """Gamma-ratio form k Gamma(i) Gamma(n+1/2) / (Gamma(i+1/2) Gamma(n))."""
    if i < 2 or n < i:
        raise ParameterOutOfRange(f"need 2 <= i <= n, got i={i} n={n}")
    return k * math.exp(
        math.lgamma(i) + math.lgamma(n + 0.5) - math.lgamma(i + 0.5) - math.lgamma(n)
    )


def expected_degree_asymptotic(k: int, i: int, n: int) -> float:
    """Leading-order k * sqrt(n/i)."""
    return k * math.sqrt(n / i)


def expected_degree_second_moment(k: int, i: int, n: int) -> Fraction:
    """E[d_n(v_i)^2] under the k-loop-seed urn description, exact."""
    spec, m = kloops_urn_spec(k, i, n)
    return urn_second_moment(spec, m, EXACT)


def kloops_urn_spec(k: int, i: int, n: int) -> tuple[TriangularUrnSpec, int]:
    """Urn (in degree units) tracking d(v_i) for the k-loop seed: alpha=1,
    sigma=2, a0=k, b0=2i-k, m=n-i draws."""
    if i < 2:
        raise ParameterOutOfRange(f"k-loop urn adapter needs i >= 2, got {i}")
    if 2 * i < k:
        raise ParameterOutOfRange(f"k-loop urn needs 2i >= k, got k={k} i={i}")
    if n < i:
        raise ParameterOutOfRange(f"need n >= i, got n={n} i={i}")
    return TriangularUrnSpec(1, 2, Fraction(k), Fraction(2 * i - k)), n - i


def complete_urn_spec(k: int, j: int, i: int, n: int) -> tuple[TriangularUrnSpec, int]:
    """Urn (in ball units, alpha=k, sigma=2k) tracking k*d(v_i) for the
    complete-graph seed on j vertices; total-degree bookkeeping.

    Seed vertices (i <= j): a0 = k(j-1), t0 = j(j-1), m = n-j.
    Later vertices (i > j): a0 = k^2, t0 = j(j-1) + 2(i-j)k, m = n-i.
    """
    if j < k + 1:
        raise ParameterOutOfRange(f"complete seed needs j >= k+1, got j={j} k={k}")
    if i < 1:
        raise ParameterOutOfRange(f"vertex index must be >= 1, got {i}")
    if i <= j:
        if n < j:
            raise ParameterOutOfRange(f"need n >= j, got n={n} j={j}")
        a0 = Fraction(k * (j - 1))
        t0 = Fraction(j * (j - 1))
        return TriangularUrnSpec(k, 2 * k, a0, t0 - a0), n - j
    if n < i:
        raise ParameterOutOfRange(f"need n >= i, got n={n} i={i}")
    a0 = Fraction(k * k)
    t0 = Fraction(j * (j - 1) + 2 * (i - j) * k)
    return TriangularUrnSpec(k, 2 * k, a0, t0 - a0), n - i


def degree_pmf_from_seed(
    k: int, seed: SeedGraph, i: int, n: int, mode: EvalMode | None = None
) -> DegreePmf:
    """Distribution of d_n(v_i) under the urn description, in degree units."""
    if seed.variant == K_LOOPS:
        spec, m = kloops_urn_spec(k, i, n)
    elif seed.variant == COMPLETE:
        spec, m = complete_urn_spec(k, seed.j, i, n)
    else:
        raise ParameterOutOfRange("urn adapters cover k-loop and complete seeds only")
    ball_pmf = urn_pmf(spec, m, mode)
    d0 = spec.a0 / spec.alpha
    if d0.denominator != 1:
        raise ParameterOutOfRange(f"initial degree {d0} is not integral")
    return DegreePmf(
        int(d0), 1, ball_pmf.probs, exact=ball_pmf.exact, cancellation=ball_pmf.cancellation
    )


def alpha_degree_seq(k: int, d: int) -> Fraction:
    """Limiting proportion of degree-d vertices: 2k(k+1)/(d(d+1)(d+2))."""
    if k < 1:
        raise DomainError(f"alpha_degree_seq needs k >= 1, got {k}")
    if d < k:
        raise DomainError(f"alpha_degree_seq needs d >= k, got d={d} k={k}")
    return Fraction(2 * k * (k + 1), d * (d + 1) * (d + 2))
