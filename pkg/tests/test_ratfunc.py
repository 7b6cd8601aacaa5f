from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from core.ratfunc import (
    N,
    ONE,
    ZERO,
    Poly,
    RatFunc,
    RatFuncError,
    n_power,
    poly_gcd,
    ratfunc_arith,
    ratfunc_eval,
    ratfunc_normalize,
    ratfunc_parse,
    ratfunc_sum,
    to_sympy,
)


@st.composite
def polys(draw, max_degree=3):
    coeffs = draw(st.lists(st.integers(min_value=-4, max_value=4), min_size=1, max_size=max_degree + 1))
    return Poly.of(*coeffs)


@st.composite
def ratfuncs(draw):
    num = draw(polys())
    den = draw(polys(max_degree=2))
    assume(not den.is_zero())
    return ratfunc_normalize(num, den)


def test_normalize_cancels_common_factor():
    # (n^2 - 1) / (n - 1) = n + 1
    f = ratfunc_normalize(Poly.of(-1, 0, 1), Poly.of(-1, 1))
    assert f == RatFunc.poly(Poly.of(1, 1))
    assert f.is_polynomial()


def test_normalize_makes_denominator_monic():
    f = ratfunc_normalize(Poly.of(2), Poly.of(0, 4))
    assert f.den == Poly.of(0, 1)
    assert f.num == Poly.of(Fraction(1, 2))


def test_zero_denominator():
    with pytest.raises(RatFuncError, match="zero denominator"):
        ratfunc_normalize(Poly.of(1), Poly.of(0))


def test_zero_is_canonical():
    assert ratfunc_normalize(Poly.of(0), Poly.of(3, 1)) == ZERO
    assert ZERO.den == Poly.of(1)


def test_pole_at_evaluation_point():
    f = 1 / (N - 2)
    with pytest.raises(RatFuncError, match="pole at evaluation point"):
        ratfunc_eval(f, 2)


def test_eval_is_exact():
    f = (N - 1) * (N - 2) / (N * N)
    assert ratfunc_eval(f, 5) == Fraction(12, 25)
    assert f(7) == Fraction(30, 49)


def test_arith_by_name():
    a, b = N - 1, N
    assert ratfunc_arith(a, b, "add") == 2 * N - 1
    assert ratfunc_arith(a, b, "sub") == RatFunc.const(-1)
    assert ratfunc_arith(a, b, "mul") == N * N - N
    assert ratfunc_arith(a, b, "div") == 1 - n_power(-1)
    with pytest.raises(RatFuncError, match="division by zero"):
        ratfunc_arith(a, ZERO, "div")
    with pytest.raises(RatFuncError):
        ratfunc_arith(a, b, "pow")


def test_parse_matches_arithmetic():
    assert ratfunc_parse("(n-2)/n") == (N - 2) / N
    assert ratfunc_parse("(n-1)*(n-2)/n^2") == (N - 1) * (N - 2) / (N * N)
    assert ratfunc_parse("x - 1") == N - 1
    assert ratfunc_parse("3/4") == RatFunc.const(Fraction(3, 4))


def test_parse_rejects_garbage():
    with pytest.raises(RatFuncError):
        ratfunc_parse("n +* 2")
    with pytest.raises(RatFuncError):
        ratfunc_parse("m + 1")


def test_limits():
    assert ((N - 1) / N).limit_at_infinity() == 1
    assert n_power(-2).limit_at_infinity() == 0
    assert N.limit_at_infinity() is None
    assert ((N - 2) / N).limit_at_infinity() == 1


def test_compact_text():
    assert (N - 1).compact() == "(n-1)"
    assert N.compact() == "n"
    assert ONE.compact() == "1"
    assert RatFunc.const(-1).compact() == "-1"
    assert (1 - N).compact() == "(-n+1)"


def test_n_power():
    assert n_power(0) == ONE
    assert n_power(2) == N * N
    assert n_power(-2) == 1 / (N * N)


def test_poly_gcd():
    a = Poly.of(-1, 0, 1)  # n^2 - 1
    b = Poly.of(1, 2, 1)  # (n + 1)^2
    assert poly_gcd(a, b) == Poly.of(1, 1)


def test_sum_of_fractions():
    terms = [(Poly.of(-1), Poly.of(0, 1)), (Poly.of(-1), Poly.of(0, 1)), (Poly.of(1), Poly.of(0, 1))]
    assert ratfunc_sum(terms) == -n_power(-1)
    assert ratfunc_sum([]) == ZERO


def test_to_sympy():
    import sympy

    n = sympy.Symbol("n")
    assert sympy.simplify(to_sympy((N - 1) / N) - (n - 1) / n) == 0


@given(ratfuncs())
def test_text_parses_back(f):
    assert ratfunc_parse(str(f)) == f


@settings(max_examples=60)
@given(ratfuncs(), ratfuncs(), st.integers(min_value=5, max_value=40))
def test_evaluation_is_a_ring_homomorphism(a, b, n):
    assume(a.den(n) != 0 and b.den(n) != 0)
    assert (a + b)(n) == a(n) + b(n)
    assert (a * b)(n) == a(n) * b(n)
    assert (a - b)(n) == a(n) - b(n)


@given(ratfuncs(), ratfuncs())
def test_division_undoes_multiplication(a, b):
    assume(not b.is_zero())
    assert (a * b) / b == a


@given(ratfuncs())
def test_normal_form_invariants(f):
    assert f.den.leading == 1
    assert poly_gcd(f.num, f.den).degree == 0
