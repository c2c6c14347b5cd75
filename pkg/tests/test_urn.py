import io
import math
import warnings
from fractions import Fraction

import pytest

from pagrow.errors import (
    CancellationWarning,
    DomainError,
    NonIntegralParameters,
    ParameterOutOfRange,
)
from pagrow.growth import SeedGraph
from pagrow.numerics import EXACT, FLOAT, EvalMode, binomial, falling_factorial_ratio
from pagrow.urn import (
    TriangularUrnSpec,
    alpha_degree_seq,
    complete_urn_spec,
    degree_pmf_from_seed,
    expected_degree,
    expected_degree_asymptotic,
    expected_degree_gamma,
    expected_degree_second_moment,
    kloops_urn_spec,
    urn_gf_oracle,
    urn_mean,
    urn_pmf,
    urn_pmf_dp_oracle,
    urn_second_moment,
    urn_second_moment_displayed_variant,
)

S11 = TriangularUrnSpec(1, 2, Fraction(1), Fraction(1))
S22 = TriangularUrnSpec(1, 2, Fraction(2), Fraction(2))

SMALL_GRID = [
    TriangularUrnSpec(alpha, sigma, Fraction(a0), Fraction(b0))
    for alpha in (1, 2, 3)
    for sigma in (alpha, alpha + 1, 2 * alpha)
    for a0 in (1, 2, 5)
    for b0 in (0, 1, 3)
]


def test_spec_validation():
    with pytest.raises(ParameterOutOfRange):
        TriangularUrnSpec(3, 2, Fraction(1), Fraction(1))  # sigma < alpha
    with pytest.raises(ParameterOutOfRange):
        TriangularUrnSpec(1, 2, Fraction(0), Fraction(1))  # a0 <= 0
    with pytest.raises(ParameterOutOfRange):
        TriangularUrnSpec(1, 2, Fraction(1), Fraction(-1))  # b0 < 0
    half = TriangularUrnSpec(1, 2, Fraction(2), Fraction(3, 2))  # half-integers are fine
    assert half.t0 == Fraction(7, 2)


def test_pmf_hand_cases():
    assert urn_pmf(S11, 1).as_dict() == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    assert urn_pmf(S22, 1).as_dict() == {2: Fraction(1, 2), 3: Fraction(1, 2)}
    assert urn_pmf(S22, 0).as_dict() == {2: Fraction(1)}
    assert urn_pmf(TriangularUrnSpec(2, 5, Fraction(7), Fraction(9)), 0).as_dict() == {
        7: Fraction(1)
    }


def test_dp_oracle_hand_cases():
    assert urn_pmf_dp_oracle(S22, 1).as_dict() == {2: Fraction(1, 2), 3: Fraction(1, 2)}
    assert urn_pmf_dp_oracle(S11, 0).as_dict() == {1: Fraction(1)}


def test_pmf_equals_dp_oracle_on_grid():
    for spec in SMALL_GRID:
        for m in (0, 1, 2, 7, 30):
            closed = urn_pmf(spec, m, EXACT)
            oracle = urn_pmf_dp_oracle(spec, m)
            assert closed.probs == oracle.probs, (spec, m)
            assert closed.total() == 1


def test_pmf_equals_dp_oracle_half_integer_arguments():
    spec = TriangularUrnSpec(1, 2, Fraction(2), Fraction(3))  # odd b0 with sigma 2
    for m in (1, 5, 40):
        assert urn_pmf(spec, m, EXACT).probs == urn_pmf_dp_oracle(spec, m).probs


def test_gf_oracle_agreement():
    assert urn_gf_oracle(S22, 1).as_dict() == {2: Fraction(1, 2), 3: Fraction(1, 2)}
    assert urn_gf_oracle(S11, 0).as_dict() == {1: Fraction(1)}
    assert urn_gf_oracle(S11, 2).probs == urn_pmf_dp_oracle(S11, 2).probs
    for spec in SMALL_GRID[:12]:
        for m in (3, 8):
            assert urn_gf_oracle(spec, m).probs == urn_pmf(spec, m, EXACT).probs, (spec, m)


def test_gf_oracle_guards():
    with pytest.raises(ParameterOutOfRange):
        urn_gf_oracle(S11, 9)
    with pytest.raises(NonIntegralParameters):
        urn_gf_oracle(TriangularUrnSpec(1, 2, Fraction(3, 2), Fraction(1)), 3)


def test_scale_invariance():
    for c in (2, 3):
        for m in (1, 4, 9):
            assert urn_pmf(S22.scaled(c), m).probs == urn_pmf(S22, m).probs
            assert urn_pmf_dp_oracle(S22.scaled(c), m).probs == urn_pmf_dp_oracle(S22, m).probs


def test_mean_hand_cases_and_consistency():
    assert urn_mean(S22, 0) == 2
    assert urn_mean(S22, 1) == Fraction(5, 2)
    for spec in SMALL_GRID:
        for m in (0, 1, 5, 20):
            pmf = urn_pmf_dp_oracle(spec, m)
            assert urn_mean(spec, m, EXACT) == pmf.mean(), (spec, m)
            assert urn_second_moment(spec, m, EXACT) == pmf.second_moment(), (spec, m)


def test_second_moment_hand_case_and_rejected_variant():
    assert urn_second_moment(S22, 1) == Fraction(13, 2)
    assert urn_second_moment(S22, 0) == 4
    # the sign variant evaluates to 14 and is contradicted by enumeration
    assert urn_second_moment_displayed_variant(S22, 1) == 14
    assert urn_pmf_dp_oracle(S22, 1).second_moment() == Fraction(13, 2)


def test_second_moment_degree_form():
    # E[d^2] = k(k+1) Gamma(i)Gamma(n+1)/(Gamma(i+1)Gamma(n)) - E[d] at k=2,i=2,n=3
    assert expected_degree_second_moment(2, 2, 3) == 9 - Fraction(5, 2)


def test_float_moments_close_to_exact():
    for spec in SMALL_GRID[:9]:
        for m in (1, 10, 100):
            exact = urn_mean(spec, m, EXACT)
            approx = urn_mean(spec, m, FLOAT)
            assert abs(approx - float(exact)) <= 1e-11 * float(exact)
            exact2 = urn_second_moment(spec, m, EXACT)
            approx2 = urn_second_moment(spec, m, FLOAT)
            assert abs(approx2 - float(exact2)) <= 1e-10 * float(exact2)


def test_auto_mode_switches_to_float_for_large_m():
    small = urn_pmf(S22, 3)
    assert small.exact
    big = urn_mean(S22, 2001)
    assert isinstance(big, float)


def test_float_pmf_masses_and_cancellation_flag():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        for m in (1, 5, 25, 50):
            pmf = urn_pmf(S22, m, FLOAT)
            assert not pmf.exact
            assert abs(sum(pmf.probs) - 1.0) <= 1e-9
            assert pmf.cancellation is not None


def test_float_pmf_warns_on_catastrophic_cancellation():
    with pytest.warns(CancellationWarning):
        urn_pmf(S22, 60, FLOAT)
    # a forgiving threshold silences the warning
    lax = EvalMode(exact=False, cancellation_warn_threshold=1e300)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        urn_pmf(S22, 10, lax)


def test_float_pmf_head_is_accurate():
    exact = urn_pmf(S22, 40, EXACT)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        approx = urn_pmf(S22, 40, FLOAT)
    for x in range(6):  # low-x entries cancel mildly and stay accurate
        assert approx.probs[x] == pytest.approx(float(exact.probs[x]), rel=1e-8)


# -- degree adapters -----------------------------------------------------------


def test_kloops_adapter_parameters():
    spec, m = kloops_urn_spec(3, 4, 10)
    assert (spec.alpha, spec.sigma) == (1, 2)
    assert spec.a0 == 3 and spec.b0 == 2 * 4 - 3 and m == 6
    with pytest.raises(ParameterOutOfRange):
        kloops_urn_spec(2, 1, 5)  # i = 1 is the loop seed vertex
    with pytest.raises(ParameterOutOfRange):
        kloops_urn_spec(5, 2, 9)  # b0 = 2i - k < 0


def test_complete_adapter_parameters():
    spec, m = complete_urn_spec(2, 5, 3, 7)
    assert (spec.alpha, spec.sigma) == (2, 4)
    assert spec.a0 == 8 and spec.b0 == 12 and m == 2
    spec, m = complete_urn_spec(2, 5, 7, 9)
    assert spec.a0 == 4 and spec.t0 == 5 * 4 + 2 * 2 * 2 and m == 2


def test_degree_pmf_hand_cases():
    seed = SeedGraph.k_loops(2)
    assert degree_pmf_from_seed(2, seed, 2, 3).as_dict() == {
        2: Fraction(1, 2),
        3: Fraction(1, 2),
    }
    assert degree_pmf_from_seed(2, seed, 5, 5).as_dict() == {2: Fraction(1)}
    k5 = degree_pmf_from_seed(2, SeedGraph.complete_kj(2, 5), 3, 6)
    assert k5.as_dict()[4] == Fraction(3, 5)  # first draw black: b0/t0 = 12/20


def test_degree_pmf_rejects_bad_queries():
    with pytest.raises(ParameterOutOfRange):
        degree_pmf_from_seed(5, SeedGraph.k_loops(5), 2, 9)  # b0 < 0
    with pytest.raises(ParameterOutOfRange):
        degree_pmf_from_seed(2, SeedGraph.custom(2, [(1, 2), (1, 2)]), 1, 4)


def test_complete_adapter_matches_dp_oracle_not_published_variant():
    # adapter parameters (b0 = (j-k)(j-1)) match the oracle; the variant
    # with numerator (j-1)^2 - k*u does not even normalize for k >= 2
    k, j, i, n = 2, 5, 3, 7
    spec, m = complete_urn_spec(k, j, i, n)
    oracle = urn_pmf_dp_oracle(spec, m)
    adapter = degree_pmf_from_seed(k, SeedGraph.complete_kj(k, j), i, n)
    assert adapter.probs == oracle.probs

    R = Fraction(j * (j - 1), 2 * k)
    variant = {}
    for x in range(m + 1):
        total = Fraction(0)
        for u in range(x + 1):
            ratio = falling_factorial_ratio(Fraction((j - 1) ** 2 - k * u, 2 * k), R, m)
            total += (-1) ** u * binomial(x, u) * ratio
        variant[j - 1 + x] = binomial(x + j - 2, x) * total
    assert variant != adapter.as_dict()
    assert sum(variant.values()) == Fraction(7, 5)  # not a probability table
    assert variant[4] == Fraction(2, 3) and adapter.as_dict()[4] == Fraction(2, 5)


# -- expected degree -----------------------------------------------------------


def test_expected_degree_examples():
    assert expected_degree(7, 3, 3) == 7  # empty product
    assert expected_degree(2, 2, 3) == Fraction(5, 2)
    with pytest.raises(ParameterOutOfRange):
        expected_degree(2, 1, 5)


def test_expected_degree_gamma_and_asymptotic():
    exact = expected_degree(3, 4, 100)
    assert expected_degree_gamma(3, 4, 100) == pytest.approx(float(exact), rel=1e-12)
    asym = expected_degree_asymptotic(3, 4, 100)
    assert asym == 3 * math.sqrt(25)
    assert abs(float(exact) - asym) / asym < 0.25


def test_expected_degree_equals_urn_mean_of_adapter():
    for i in (2, 7, 50):
        for extra in (0, 3, 200):
            n = i + extra
            spec, m = kloops_urn_spec(2, i, n)
            assert expected_degree(2, i, n) == urn_mean(spec, m, EXACT)


def test_expected_degree_gamma_matches_product_band():
    for i in (2, 13, 50):
        product = expected_degree(2, i, i + 200)
        gamma = expected_degree_gamma(2, i, i + 200)
        assert abs(gamma - float(product)) <= 1e-12 * float(product)


# -- limiting degree proportions -------------------------------------------------


def test_alpha_values():
    assert alpha_degree_seq(2, 2) == Fraction(1, 2)
    assert alpha_degree_seq(2, 3) == Fraction(1, 5)
    assert alpha_degree_seq(2, 4) == Fraction(1, 10)


def test_alpha_domain():
    with pytest.raises(DomainError):
        alpha_degree_seq(2, 1)
    with pytest.raises(DomainError):
        alpha_degree_seq(0, 1)


def test_alpha_telescoping_partial_sums():
    for k in (1, 2, 3):
        for D in (k, k + 5, k + 60):
            total = sum(alpha_degree_seq(k, d) for d in range(k, D + 1))
            assert total == 1 - Fraction(k * (k + 1), (D + 1) * (D + 2))


def test_alpha_cubic_tail():
    for d in (30, 100, 400):
        ratio = alpha_degree_seq(2, d) / Fraction(2 * 2 * 3, d**3)
        assert Fraction(9, 10) <= ratio <= 1


def test_pmf_csv_output():
    buf = io.StringIO()
    urn_pmf(S22, 1).to_csv(buf)
    assert buf.getvalue() == "value,probability\n2,1/2\n3,1/2\n"
    buf = io.StringIO()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CancellationWarning)
        urn_pmf(S22, 1, FLOAT).to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[1].startswith("2,0.5") and lines[2].startswith("3,0.5")
