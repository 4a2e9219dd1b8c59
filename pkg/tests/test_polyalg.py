import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernelforge.polyalg import (
    FactorizedPoly,
    RationalPolynomial,
    as_fraction,
    binomial_basis_decompose,
    binomial_basis_synthesize,
    expand,
    fraction_str,
    rising_factorial,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small_polys = st.lists(rationals, min_size=0, max_size=7).map(RationalPolynomial)


def test_rising_factorial_values():
    assert rising_factorial(1, 5) == 120
    assert rising_factorial(Fraction(1, 2), 3) == Fraction(15, 8)
    assert rising_factorial("3/2", 0) == 1
    assert rising_factorial(-2, 3) == 0
    assert isinstance(rising_factorial(Fraction(1, 3), 4), Fraction)


def test_rising_factorial_float_matches_gamma():
    for s in (0.3, 1.7, 4.25):
        for k in range(6):
            assert rising_factorial(s, k) == pytest.approx(math.gamma(s + k) / math.gamma(s), rel=1e-13)


def test_rising_factorial_rejects_negative_length():
    with pytest.raises(ValueError):
        rising_factorial(1, -1)


@given(rationals, st.integers(0, 12))
def test_rising_factorial_recurrence(s, k):
    assert rising_factorial(s, k + 1) == rising_factorial(s, k) * (s + k)


def test_as_fraction_refuses_float():
    with pytest.raises(TypeError):
        as_fraction(0.1)
    with pytest.raises(TypeError):
        as_fraction(True)
    assert as_fraction("7/3") == Fraction(7, 3)


def test_trailing_zeros_and_degree():
    p = RationalPolynomial([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert RationalPolynomial().degree == -1
    assert RationalPolynomial([0, 0]).is_zero()


def test_hand_expansion():
    # (s+1)(s+2)(s+3/2) = s^3 + 9/2 s^2 + 13/2 s + 3
    p = expand(FactorizedPoly([(1, 2), (Fraction(3, 2), 1)]))
    assert p.coeffs == (3, Fraction(13, 2), Fraction(9, 2), 1)
    assert p.pretty() == "s^3 + 9/2 s^2 + 13/2 s + 3"


def test_pretty_signs():
    assert RationalPolynomial([-1, 0, Fraction(-1, 2)]).pretty("x") == "-1/2 x^2 - 1"
    assert RationalPolynomial([0, 1]).pretty() == "s"
    assert RationalPolynomial().pretty() == "0"


def test_fraction_str():
    assert fraction_str(Fraction(6, 3)) == "2"
    assert fraction_str(Fraction(-3, 4)) == "-3/4"


@given(small_polys, small_polys, rationals)
def test_ring_operations_are_pointwise(p, q, x):
    assert (p + q).eval(x) == p.eval(x) + q.eval(x)
    assert (p - q).eval(x) == p.eval(x) - q.eval(x)
    assert (p * q).eval(x) == p.eval(x) * q.eval(x)


@given(small_polys, rationals, rationals, rationals)
def test_compose_linear(p, a, b, x):
    assert p.compose_linear(a, b).eval(x) == p.eval(a * x + b)


@given(small_polys, st.floats(-3, 3))
def test_eval_real_matches_exact(p, x):
    exact = float(p.eval(Fraction(x)))
    assert p.eval_real(x) == pytest.approx(exact, rel=1e-9, abs=1e-9)


def test_factorized_pretty_and_latex():
    f = FactorizedPoly([(1, 8), (4, 8)])
    assert f.pretty() == "(s+1)_8 (s+4)_8"
    assert f.degree == 16
    g = FactorizedPoly([(Fraction(3, 2), 2)])
    assert g.latex() == r"\left(s+\frac{3}{2}\right)_{2}"
    assert FactorizedPoly().pretty() == "1"


@given(st.lists(st.tuples(rationals, st.integers(0, 4)), max_size=4), rationals)
def test_factorized_eval_matches_expansion(factors, x):
    f = FactorizedPoly(factors)
    assert f.eval(x) == f.expand().eval(x)
    # monic, so never cancels
    assert f.expand().degree == f.degree


def test_decompose_disk():
    # chi(k)/chi(0) = k + 1 for the unit disc with mu = 1
    assert binomial_basis_decompose(RationalPolynomial([1, 1])) == [0, 1]
    assert binomial_basis_decompose(RationalPolynomial()) == []


@settings(max_examples=60)
@given(st.lists(rationals, min_size=1, max_size=8))
def test_decompose_synthesize_bijection(cs):
    while len(cs) > 1 and cs[-1] == 0:
        cs = cs[:-1]
    q = binomial_basis_synthesize(cs)
    if q.is_zero():
        return
    assert binomial_basis_decompose(q) == cs
    for k in range(6):
        assert q.eval(k) == sum(c * math.comb(k + j, j) for j, c in enumerate(cs))


@given(small_polys)
def test_synthesize_inverts_decompose(q):
    assert binomial_basis_synthesize(binomial_basis_decompose(q)) == q
