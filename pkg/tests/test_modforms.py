import cmath
import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qlattice.gl2_system import QLattice2Level
from qlattice.lat2d import Sublattice, sl2_elements
from qlattice.modforms import (
    E2ka_numeric,
    E2ka_recursive,
    FrickeLabel,
    SAMPLE_TAUS,
    Xa_numeric,
    c_numeric,
    delta_numeric,
    delta_product_series,
    div11_check,
    ek_numeric,
    ek_series,
    fricke_numeric,
    fricke_qexp,
    j_numeric,
    mu_L,
    mu_L_direct,
    mu_L_series,
    nu_numeric,
    nu_series,
    nu_symbolic,
    pn_poly,
    sl2_lift,
    stratum,
    wealg_check,
    weierstrass_data,
    weight_covariance_check,
    wp_lattice_oracle,
    wp_numeric,
    wp_qseries,
)

TAU = SAMPLE_TAUS[0]
E4, E6, X, J = sympy.symbols("e4 e6 X j")


def _coeffs(series, n):
    return [series.coeff(i).rational_value() for i in range(n)]


# --- exact series


def test_eisenstein_examples():
    assert _coeffs(ek_series(2, 4).series, 4) == [Fraction(1, 3), -8, -24, -32]
    assert _coeffs(ek_series(4, 3).series, 2) == [Fraction(1, 45), Fraction(16, 3)]
    e6 = _coeffs(ek_series(6, 3).series, 2)
    assert e6 == [Fraction(2, 945), Fraction(2, 945) * -504]
    with pytest.raises(ValueError):
        ek_series(3, 4)


@pytest.mark.parametrize("m", [4, 5, 7])
def test_higher_eisenstein_from_e4_e6(m):
    assert wealg_check(m, 15).ok


def test_eisenstein_numeric_against_mpmath():
    # e_4 = pi^-4 G_4 with G_4 = 2 zeta(4) E_4
    q = cmath.exp(2j * math.pi * TAU)
    E4ref = 1 + 240 * complex(mpmath.nsum(lambda n: n**3 * q**n / (1 - q**n), [1, mpmath.inf]))
    assert abs(ek_numeric(4, TAU) - float(2 * mpmath.zeta(4) / mpmath.pi**4) * E4ref) < 1e-14


def test_delta_and_j():
    w = weierstrass_data(6)
    assert w.delta.valuation == 1 and w.j.valuation == -1
    assert w.j.coeff(-1).rational_value() == 1 and w.j.coeff(0).rational_value() == 744
    assert w.j.coeff(1).rational_value() == 196884
    # Delta in this scale is 2^12 q prod (1 - q^n)^24
    prod = delta_product_series(6)
    for n in range(1, 6):
        assert w.delta.coeff(n) == prod.coeff(n) * 4096


def test_delta_and_j_numeric():
    q = cmath.exp(2j * math.pi * TAU)
    assert abs(delta_numeric(TAU) - q * (1 - 24 * q + 252 * q * q - 1472 * q**3)) < 5000 * abs(q) ** 5
    j = j_numeric(TAU)
    assert abs(j - j_numeric(-1 / TAU)) < 1e-9 * abs(j)
    assert abs(j - j_numeric(TAU + 1)) < 1e-9 * abs(j)
    assert abs(j_numeric(1j) - 1728) < 1e-8


def test_nu_values():
    assert nu_symbolic(2) == sympy.Symbol("e2")
    assert nu_symbolic(4) == -5 * E4
    assert nu_symbolic(6) == -14 * E6
    assert nu_series(4, 8) == ek_series(4, 8).scale(-5)
    assert nu_series(6, 8) == ek_series(6, 8).scale(-14)
    assert abs(nu_numeric(4, TAU) + 5 * ek_numeric(4, TAU)) < 1e-15


def test_pn_polynomials():
    assert pn_poly(1) == sympy.Poly(X, J, X)
    assert pn_poly(2) == sympy.Poly(X**2 - J**2 + 1728 * J, J, X)
    p3 = pn_poly(3).as_expr()
    assert sympy.Poly(p3, X).LC() == 1 and sympy.degree(p3, J) == 3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pn_numeric(n):
    """c^n E_{2n,a} = P_n(j, c X_a) with E_{2n,a} by a direct lattice sum."""
    lat = QLattice2Level(3, (1, 0, 0, 1), TAU)
    a = (Fraction(1, 3), Fraction(2, 3))
    c, j = c_numeric(TAU), j_numeric(TAU)
    lhs = c**n * E2ka_numeric(n, a, lat)
    rhs = complex(pn_poly(n).as_expr().subs({J: j, X: c * Xa_numeric(a, lat)}).evalf(20))
    assert abs(lhs - rhs) < 1e-8 * abs(rhs)


# --- Weierstrass function


def test_wp_against_lattice_oracle():
    z = 0.3 + 0.2 * TAU
    val, err = wp_qseries(z, TAU)
    ref, ref_err = wp_lattice_oracle(z, TAU)
    assert err < 1e-12 and ref_err < 1e-6
    assert abs(val - ref) < 1e-8


@settings(max_examples=50)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.sampled_from(SAMPLE_TAUS))
def test_wp_periodic_and_even(x, y, tau):
    z = x + y * tau
    w = wp_numeric(z, tau)
    scale = max(1.0, abs(w))
    assert abs(wp_numeric(z + 1, tau) - w) < 1e-9 * scale
    assert abs(wp_numeric(z - tau, tau) - w) < 1e-9 * scale
    assert abs(wp_numeric(-z, tau) - w) < 1e-9 * scale


def test_wp_rejects_lattice_points():
    with pytest.raises(ValueError):
        wp_numeric(1 + TAU, TAU)


# --- Fricke functions


def test_fricke_qexp_matches_numeric():
    for v in (FrickeLabel(0, Fraction(1, 2)), FrickeLabel(Fraction(1, 3), Fraction(2, 3)), FrickeLabel(Fraction(1, 4), 0)):
        s = fricke_qexp(v, 20)
        assert abs(s.evaluate(TAU) - fricke_numeric(v, TAU)) < 1e-8 * abs(fricke_numeric(v, TAU))


def test_fricke_level_one_coefficients_are_rational_for_rational_labels():
    s = fricke_qexp(FrickeLabel(0, Fraction(1, 2)), 6)
    assert all(s.coeff(Fraction(i, 2)).level <= 2 for i in range(-2, 8))


@pytest.mark.parametrize("N", [2, 3, 4])
def test_fricke_invariant_under_principal_congruence(N):
    v = FrickeLabel(Fraction(1, N), 0)
    f = fricke_numeric(v, TAU)
    for g in ((1, N, 0, 1), (1 - N, N, -N, 1 + N), (1 + N, N, -N, 1 - N)):
        a, b, c, d = g
        assert a * d - b * c == 1
        gt = (a * TAU + b) / (c * TAU + d)
        assert abs(fricke_numeric(v, gt) - f) < 1e-7 * abs(f)


def test_fricke_zero_label_rejected():
    with pytest.raises(ValueError):
        FrickeLabel(1, 2)


# --- X_a and E_{2k,a}


def test_xa_vanishes_on_the_lattice_and_is_even():
    lat = QLattice2Level(4, (2, 0, 0, 2), TAU)
    assert Xa_numeric((Fraction(1, 2), Fraction(1, 2)), lat) == 0
    lat = QLattice2Level(4, (1, 2, 3, 1), TAU)
    for i in range(4):
        for j in range(4):
            a, b = Fraction(i, 4), Fraction(j, 4)
            assert abs(Xa_numeric((a, b), lat) - Xa_numeric((-a % 1, -b % 1), lat)) < 1e-9


@pytest.mark.parametrize("k", [2, 3, 4])
def test_E2ka_two_routes(k):
    lat = QLattice2Level(3, (1, 1, 0, 1), SAMPLE_TAUS[1])
    for a in ((Fraction(1, 3), 0), (Fraction(1, 3), Fraction(1, 3)), (0, 0)):
        d = E2ka_numeric(k, a, lat)
        r = E2ka_recursive(k, a, lat)
        assert abs(d - r) < 1e-8 * max(1.0, abs(d))


def test_weight_covariance():
    lat = QLattice2Level(3, (1, 2, 0, 1), TAU)
    for g in (((1, 1), (0, 1)), ((0, -1), (1, 0)), ((2, 1), (1, 1))):
        assert weight_covariance_check((Fraction(1, 3), Fraction(2, 3)), lat, g).ok


# --- the eta cocycle


def test_mu_L_examples():
    assert abs(mu_L(Sublattice.full(), TAU)) < 1e-14
    L = Sublattice(1, 0, 2)
    target = 2 * ek_numeric(2, 2 * TAU) - ek_numeric(2, TAU)
    assert abs(mu_L(L, TAU) - target) < 1e-12
    assert abs(mu_L_series(L, 20).evaluate(TAU) - target) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_mu_L_slash_and_direct_agree(n):
    from qlattice.lat2d import enumerate_index

    for L in enumerate_index(n):
        for tau in SAMPLE_TAUS:
            a, b = mu_L(L, tau), mu_L_direct(L, tau)
            assert abs(a - b) < 1e-9 * max(1.0, abs(a)), L


# --- division relations


def test_stratum():
    assert stratum((1, 0, 0, 1), 2) == Sublattice.full()
    assert stratum((0, 0, 0, 0), 2) == Sublattice(2, 0, 2)


@pytest.mark.parametrize("rho", [(1, 0, 0, 1), (1, 0, 0, 0), (0, 0, 0, 0), (2, 1, 0, 2), (1, 1, 1, 1)])
def test_div11(rho):
    r = div11_check(2, QLattice2Level(4, rho, TAU))
    assert r.ok, r.details


def test_div11_level_three():
    for rho in ((1, 0, 0, 1), (0, 1, 0, 0), (0, 0, 0, 0)):
        r = div11_check(3, QLattice2Level(3, rho, SAMPLE_TAUS[2]))
        assert r.ok, r.details


def test_sl2_lift_reduces_correctly():
    for N in (2, 3, 5, 6):
        for g in sl2_elements(N):
            for tau in (None, TAU):
                a, b, c, d = sl2_lift(g, N, tau)
                assert a * d - b * c == 1
                assert all((x - y) % N == 0 for x, y in zip((a, b, c, d), g))
