import cmath
import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qlattice.numkit import (
    CharSum,
    Cyclo,
    QExpansion,
    QModZ,
    bernoulli_b,
    divisor_sigma,
    divisors,
    f_j,
    gamma_coeff,
    mobius,
    numeric_embed,
    root_of_unity,
    totient,
    units_mod,
    zeta,
    zeta_product,
)

small_frac = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def cyclos(draw, level=None):
    N = level or draw(st.integers(1, 24))
    terms = draw(st.dictionaries(st.integers(0, N - 1), small_frac, max_size=4))
    return Cyclo.from_exponents(N, terms)


@st.composite
def cyclo_triples(draw):
    N = draw(st.integers(1, 18))
    return draw(cyclos(N)), draw(cyclos(N)), draw(cyclos(N))


# --- Bernoulli and gamma coefficients


def test_gamma_coefficients():
    assert gamma_coeff(1) == Fraction(-1, 12)
    assert gamma_coeff(2) == Fraction(1, 720)
    assert bernoulli_b(1) == Fraction(1, 6)
    assert bernoulli_b(2) == Fraction(1, 30)


def test_gamma_against_series_expansion():
    x = sympy.Symbol("x")
    ser = sympy.series(x / (sympy.exp(x) - 1), x, 0, 13).removeO()
    for j in range(1, 7):
        assert -ser.coeff(x, 2 * j) == sympy.Rational(gamma_coeff(j).numerator, gamma_coeff(j).denominator)
        assert bernoulli_b(j) == (-1) ** j * math.factorial(2 * j) * gamma_coeff(j)


# --- arithmetic functions


def test_f_j_examples():
    assert f_j(1, 6) == 2
    assert all(f_j(j, 1) == 1 for j in range(-3, 4))
    assert f_j(2, 4) == 12


def test_f_j_is_totient_and_mobius_sum():
    for n in range(1, 60):
        assert f_j(1, n) == totient(n) == sympy.totient(n)
        for j in (-2, 0, 3):
            assert f_j(j, n) == sum(mobius(d) * Fraction(n // d) ** j for d in divisors(n))


@given(st.integers(1, 60), st.integers(1, 60), st.integers(-3, 3))
def test_f_j_multiplicative(m, n, j):
    if math.gcd(m, n) == 1:
        assert f_j(j, m * n) == f_j(j, m) * f_j(j, n)


def test_divisor_sigma():
    assert divisor_sigma(1, 6) == 12
    assert divisor_sigma(1, 1) == 1
    assert divisor_sigma(3, 2) == 9
    for n in range(1, 100):
        assert divisor_sigma(2, n) == sympy.divisor_sigma(n, 2)


def test_units_mod():
    assert units_mod(12) == [1, 5, 7, 11]
    assert len(units_mod(1)) == 1


# --- Q/Z and roots of unity


def test_qmodz_reduction():
    assert QModZ.of(Fraction(7, 4)) == QModZ.of(Fraction(3, 4))
    assert QModZ.of(Fraction(-1, 3)) == QModZ.of(Fraction(2, 3))
    assert QModZ.of(0).b == 1
    assert len(QModZ.of(Fraction(1, 2)).divisions(2)) == 2


def test_root_of_unity_examples():
    assert root_of_unity(0) == Cyclo.rational(1)
    assert root_of_unity(Fraction(1, 2)) == Cyclo.rational(-1)
    assert abs(numeric_embed(root_of_unity(Fraction(1, 4)), 1) - 1j) < 1e-15


def test_embed_rejects_nonunit():
    with pytest.raises(ValueError):
        numeric_embed(root_of_unity(Fraction(1, 4)).lift(4), 2)


@settings(max_examples=200)
@given(cyclo_triples())
def test_cyclo_ring_laws(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    assert (a - a).is_zero()


@settings(max_examples=200)
@given(cyclo_triples(), st.data())
def test_embedding_multiplicative(t, data):
    a, b, _ = t
    N = a.level if a.level == b.level else math.lcm(a.level, b.level)
    k = data.draw(st.sampled_from(units_mod(N) if N > 1 else [1]))
    assert abs(numeric_embed(a * b, k) - numeric_embed(a, k) * numeric_embed(b, k)) < 1e-12


@given(cyclos(), st.integers(1, 4))
def test_lift_is_injective_and_multiplicative(a, m):
    b = a.lift(a.level * m)
    assert b == a
    assert abs(numeric_embed(b) - numeric_embed(a)) < 1e-12
    assert (b * b) == (a * a).lift(a.level * m)


@given(cyclos())
def test_inverse_and_norm(a):
    if a.is_zero():
        return
    assert a * a.inverse() == Cyclo.rational(1)
    if a.level <= 2:
        assert a.norm() == a.rational_value()  # degree one: the norm is the element
    else:
        assert a.norm() > 0  # CM field: a product of conjugate pairs


def test_galois_action():
    z = Cyclo.zeta(5)
    assert z.galois(2) == Cyclo.zeta(5, 2)
    assert abs(numeric_embed(z, 2) - numeric_embed(z.galois(2), 1)) < 1e-15


# --- character sums


def test_charsum_indicator_is_divisibility():
    ind = CharSum.indicator(6)
    for rho in range(24):
        assert ind.evaluate(rho) == Cyclo.rational(1 if rho % 6 == 0 else 0)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 48))
def test_charsum_product_pointwise(d1, d2, rho):
    a, b = CharSum.indicator(d1), CharSum.char(Fraction(1, d2), 3)
    assert (a * b).evaluate(rho) == a.evaluate(rho) * b.evaluate(rho)


# --- q-expansions


@st.composite
def series(draw, order=8):
    coeffs = draw(st.lists(small_frac, min_size=1, max_size=order))
    v = draw(st.integers(-1, 2))
    return QExpansion.from_rationals(coeffs, order=order + v, valuation=v)


@settings(max_examples=100)
@given(series(), series(), series())
def test_qexpansion_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


def test_qexpansion_truncation_bookkeeping():
    a = QExpansion.from_rationals([1, 2, 3], order=3)
    b = QExpansion.from_rationals([5, 1], order=4, valuation=2)
    p = a * b
    # a is known to O(q^3) and b = q^2 (...) to O(q^4): the product is known to O(q^4)
    assert p.order == 4 and p.valuation == 2
    with pytest.raises(IndexError):
        p.coeff(5)
    inv = a.inverse()
    assert (a * inv) == QExpansion.constant(1, 3)


def test_qexpansion_numeric_evaluation():
    a = QExpansion.from_rationals([1, -24, 252], order=3)
    tau = 0.1 + 1.5j
    q = cmath.exp(2j * math.pi * tau)
    assert abs(a.evaluate(tau) - (1 - 24 * q + 252 * q * q)) < 1e-15


# --- zeta


@pytest.mark.parametrize("s", [1.5, 2.0, 2.5, 3.0, 4.0, 7.25])
def test_zeta_against_mpmath(s):
    v, err = zeta(s)
    ref = float(mpmath.zeta(s))
    assert abs(v - ref) <= err + 1e-15
    assert err < 1e-12


def test_zeta_product():
    zp = zeta_product(3.0, 10**4)
    assert zp.consistent()
    assert abs(zp.full_value - 1.9773) < 1e-3
    assert zeta_product(4.0, 1).partial_sum == 1
    with pytest.raises(ValueError):
        zeta_product(2.0, 10)
