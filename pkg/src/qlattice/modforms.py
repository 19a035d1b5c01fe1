"""Modular forms: exact q-expansions and a numeric layer for the lattice functions.

Exact part: Eisenstein series e_k in the scale e_k = pi^-k sum' y^-k, the
Weierstrass data g2, g3, Delta, j and c = -2^7 3^5 g2 g3 / Delta, the weight-0
polynomials P_n, the nu_{2k} series and Fricke q-expansions with cyclotomic
coefficients.

Numeric part: the Weierstrass function by its q-series with an independent
row-summed lattice oracle, X_a and E_{2k,a} on level-N Q-lattices, the
eta-cocycle mu_L, and the two division relations summed over N-torsion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .gl2_system import QLattice2Level
from .lat2d import Sublattice, _ext_gcd, enumerate_SN, mat, mat_inv, mat_det
from .numkit import Cyclo, QExpansion, bernoulli_b, divisor_sigma, rat, root_of_unity
from .qlat1d import Report

__all__ = [
    "ModFormSeries",
    "ek_series",
    "wealg_check",
    "e_symbolic",
    "weierstrass_data",
    "delta_product_series",
    "nu_series",
    "nu_symbolic",
    "E_symbolic",
    "pn_poly",
    "ek_numeric",
    "delta_numeric",
    "j_numeric",
    "c_numeric",
    "wp_qseries",
    "wp_numeric",
    "wp_lattice_oracle",
    "lattice_power_sum",
    "FrickeLabel",
    "fricke_numeric",
    "fricke_qexp",
    "Xa_numeric",
    "E2ka_numeric",
    "E2ka_recursive",
    "nu_numeric",
    "sl2_lift",
    "slash",
    "mu_L_series",
    "mu_L",
    "mu_L_direct",
    "stratum",
    "pi_N_L",
    "div11_check",
    "alpha_NLk",
    "omega_division_check",
    "weight_covariance_check",
    "xa_galois_check",
    "SAMPLE_TAUS",
]

SAMPLE_TAUS = (0.1 + 1.2j, -0.37 + 0.9j, 0.25 + 2.0j)

E4, E6, XS, JS = sympy.symbols("e4 e6 X j")


# ---------------------------------------------------------------------------
# exact series


@dataclass(frozen=True)
class ModFormSeries:
    weight: int
    level: int
    series: QExpansion

    def __add__(self, other: "ModFormSeries") -> "ModFormSeries":
        if self.weight != other.weight:
            raise ValueError("cannot add forms of different weights")
        return ModFormSeries(self.weight, math.lcm(self.level, other.level), self.series + other.series)

    def __sub__(self, other: "ModFormSeries") -> "ModFormSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "ModFormSeries":
        return ModFormSeries(self.weight, self.level, self.series.scale(c))

    def __mul__(self, other):
        if isinstance(other, ModFormSeries):
            return ModFormSeries(self.weight + other.weight, math.lcm(self.level, other.level), self.series * other.series)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ModFormSeries):
            return NotImplemented
        return self.weight == other.weight and self.series == other.series

    __hash__ = None  # type: ignore[assignment]


def _ek_coeffs(k: int, order: int) -> list[Fraction]:
    const = Fraction(2**k, math.factorial(k)) * bernoulli_b(k // 2)
    lin = (-1) ** (k // 2) * Fraction(2 ** (k + 1), math.factorial(k - 1))
    return [const] + [lin * divisor_sigma(k - 1, n) for n in range(1, order)]


@lru_cache(maxsize=None)
def _ek_cached(k: int, order: int) -> QExpansion:
    return QExpansion.from_rationals(_ek_coeffs(k, order), order)


def ek_series(k: int, order: int) -> ModFormSeries:
    """e_k = (2^k/k!) B_{k/2} + (-1)^{k/2} 2^{k+1}/(k-1)! sum sigma_{k-1}(n) q^n."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    return ModFormSeries(k, 1, _ek_cached(k, order))


def _wealg_coeff(m: int) -> Fraction:
    return Fraction((m - 3) * (4 * m * m - 1), 3)


def _wealg_rhs(m: int, e: dict):
    out = None
    for r in range(2, m - 1):
        t = e[2 * r] * e[2 * m - 2 * r] * ((2 * r - 1) * (2 * m - 2 * r - 1))
        out = t if out is None else out + t
    return out


def wealg_check(m: int, order: int) -> Report:
    """Derive e_8, ..., e_{2m} from e_4, e_6 and compare each with its own q-expansion."""
    if m < 4:
        raise ValueError("m must be >= 4")
    rep = Report(f"wealg m<={m}")
    derived = {4: ek_series(4, order).series, 6: ek_series(6, order).series}
    for mm in range(4, m + 1):
        derived[2 * mm] = _wealg_rhs(mm, derived).scale(1 / _wealg_coeff(mm))
        direct = ek_series(2 * mm, order).series
        rep.checked += 1
        if derived[2 * mm] != direct:
            n = next(i for i in range(order) if derived[2 * mm]._get(i) != direct._get(i))
            rep.fail({"m": mm, "exponent": n})
    return rep


@lru_cache(maxsize=None)
def e_symbolic(k: int) -> sympy.Expr:
    """e_k as a polynomial in e4, e6."""
    if k == 4:
        return E4
    if k == 6:
        return E6
    if k < 4 or k % 2:
        raise ValueError("k must be even and >= 4")
    m = k // 2
    rhs = sum((2 * r - 1) * (2 * m - 2 * r - 1) * e_symbolic(2 * r) * e_symbolic(2 * m - 2 * r) for r in range(2, m - 1))
    return sympy.expand(rhs / sympy.Rational(_wealg_coeff(m).numerator, _wealg_coeff(m).denominator))


def delta_product_series(order: int) -> QExpansion:
    """q prod (1 - q^n)^24, computed without Eisenstein series."""
    p = [0] * order
    p[0] = 1
    for n in range(1, order):
        for _ in range(24):
            for i in range(order - 1, n - 1, -1):
                p[i] -= p[i - n]
    return QExpansion.from_rationals([0] + p[: order - 1], order)


@dataclass(frozen=True)
class WeierstrassData:
    g2: QExpansion
    g3: QExpansion
    delta: QExpansion
    j: QExpansion
    c: QExpansion


@lru_cache(maxsize=None)
def weierstrass_data(order: int) -> WeierstrassData:
    """g2 = 60 e4, g3 = 140 e6, Delta = g2^3 - 27 g3^2, j = 1728 g2^3/Delta, c = -2^7 3^5 g2 g3/Delta."""
    if order < 2:
        raise ValueError("order must be >= 2")
    M = order + 2
    g2 = ek_series(4, M).series.scale(60)
    g3 = ek_series(6, M).series.scale(140)
    delta = g2**3 - (g3 * g3).scale(27)
    dinv = delta.inverse()
    j = (g2**3 * dinv).scale(1728)
    c = (g2 * g3 * dinv).scale(-(2**7) * 3**5)
    return WeierstrassData(g2.truncate(order), g3.truncate(order), delta.truncate(order), j.truncate(order), c.truncate(order))


@lru_cache(maxsize=None)
def nu_symbolic(k: int) -> sympy.Expr:
    """nu_k in e4, e6 from the recursion with X -> 0 and the seed nu_2 = e_2."""
    return _recursion_symbolic(k, with_x=False)


@lru_cache(maxsize=None)
def E_symbolic(k: int) -> sympy.Expr:
    """E_{k,a} in X_a, e4, e6 (E_{2,a} - e_2 = X_a)."""
    return _recursion_symbolic(k, with_x=True)


def _recursion_symbolic(k: int, with_x: bool) -> sympy.Expr:
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    m = k // 2
    e2 = sympy.Symbol("e2")
    E = {2: e2 + XS if with_x else e2}

    def e(w):
        return e2 if w == 2 else e_symbolic(w)

    X = XS if with_x else 0
    for mm in range(2, m + 1):
        val = X * (E[2 * mm - 2] - e(2 * mm - 2)) + (1 - sympy.binomial(2 * mm, 2)) * e(2 * mm)
        for kk in range(1, mm - 1):
            val -= (2 * kk + 1) * e(2 * kk + 2) * (E[2 * mm - 2 * kk - 2] - e(2 * mm - 2 * kk - 2))
        E[2 * mm] = sympy.expand(val)
    if E[k].has(e2) and k > 2:
        raise AssertionError("e2 should cancel from the recursion")
    return E[k]


def nu_series(k: int, order: int) -> ModFormSeries:
    """nu_k as an exact series, running the recursion on q-expansions."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    e = {w: ek_series(w, order).series for w in range(2, k + 1, 2)}
    nu = {2: e[2]}
    for mm in range(2, k // 2 + 1):
        val = e[2 * mm].scale(1 - math.comb(2 * mm, 2))
        for kk in range(1, mm - 1):
            val = val - (e[2 * kk + 2] * (nu[2 * mm - 2 * kk - 2] - e[2 * mm - 2 * kk - 2])).scale(2 * kk + 1)
        nu[2 * mm] = val
    return ModFormSeries(k, 1, nu[k])


@lru_cache(maxsize=None)
def pn_poly(n: int) -> sympy.Poly:
    """P_n in Q[j, X] with c^n E_{2n,a} = P_n(j, c X_a)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return sympy.Poly(XS, JS, XS)
    expr = sympy.Poly(E_symbolic(2 * n), XS, E4, E6)
    J = JS * (JS - 1728)
    c2e4 = J / 5
    c3e6 = -sympy.Rational(2, 35) * JS * (JS - 1728) ** 2
    out = 0
    for (i, a, b), coeff in expr.terms():
        if 2 * i + 4 * a + 6 * b != 2 * n:
            raise AssertionError("recursion output is not homogeneous")
        out += coeff * XS**i * c2e4**a * c3e6**b
    return sympy.Poly(sympy.expand(out), JS, XS)


# ---------------------------------------------------------------------------
# numeric evaluation of series


def _q(tau: complex) -> complex:
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    return cmath.exp(2j * math.pi * tau)


def _terms_needed(tau: complex, digits: float = 40.0) -> int:
    return int(digits / (2 * math.pi * complex(tau).imag)) + 8


def ek_numeric(k: int, tau: complex) -> complex:
    """e_k(tau) summed as a Lambert series."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    q = _q(tau)
    n = np.arange(1, _terms_needed(tau) + 1, dtype=float)
    qn = q**n
    lam = np.sum(n ** (k - 1) * qn / (1 - qn))
    const = Fraction(2**k, math.factorial(k)) * bernoulli_b(k // 2)
    lin = (-1) ** (k // 2) * Fraction(2 ** (k + 1), math.factorial(k - 1))
    return complex(float(const) + float(lin) * lam)


def delta_numeric(tau: complex) -> complex:
    """q prod (1 - q^n)^24 (the classical normalization)."""
    q = _q(tau)
    n = np.arange(1, _terms_needed(tau) + 1)
    return complex(q * np.prod((1 - q**n) ** 24))


def _E4E6(tau):
    return ek_numeric(4, tau) * 45, ek_numeric(6, tau) * 472.5


def j_numeric(tau: complex) -> complex:
    a, _ = _E4E6(tau)
    return a**3 / delta_numeric(tau)


def c_numeric(tau: complex) -> complex:
    """-2^7 3^5 g2 g3 / Delta = -3 E4 E6 / Delta in classical normalization."""
    a, b = _E4E6(tau)
    return -3 * a * b / delta_numeric(tau)


# ---------------------------------------------------------------------------
# Weierstrass function


def _reduce(z: complex, tau: complex) -> complex:
    """Representative of z mod Z + tau Z with |Im-coordinate| <= 1/2 and |Re-coordinate| <= 1/2."""
    z, tau = complex(z), complex(tau)
    y = z.imag / tau.imag
    z -= round(y) * tau
    return z - round(z.real)


def _in_lattice(z: complex, tau: complex, tol: float = 1e-12) -> bool:
    w = _reduce(z, tau)
    return abs(w) < tol


def wp_qseries(z: complex, tau: complex) -> tuple[complex, float]:
    """(wp(z), truncation estimate) from
    wp/(2 pi i)^2 = 1/12 + sum_{m in Z} x_m/(1-x_m)^2 - 2 sum_{m>=1} q^m/(1-q^m)^2, x_m = q^m u."""
    if _in_lattice(z, tau):
        raise ValueError("z lies in the lattice")
    z = _reduce(z, tau)
    q = _q(tau)
    M = _terms_needed(tau) + 2
    m = np.arange(-M, M + 1)
    x = np.exp(2j * math.pi * (m * complex(tau) + z))
    x = np.where(np.abs(x) > 1, 1 / x, x)
    s = np.sum(x / (1 - x) ** 2)
    mp = np.arange(1, M + 1)
    qm = np.exp(2j * math.pi * mp * complex(tau))
    s2 = np.sum(qm / (1 - qm) ** 2)
    val = (2j * math.pi) ** 2 * (1 / 12 + s - 2 * s2)
    err = 4 * math.pi**2 * 8 * abs(q) ** (M - 0.5)
    return complex(val), err


def wp_numeric(z: complex, tau: complex) -> complex:
    return wp_qseries(z, tau)[0]


def _row_count(tau: complex) -> int:
    return int(36 / (2 * math.pi * complex(tau).imag)) + 2


def _wp_rows(z: complex, tau: complex, M: int) -> complex:
    K = _row_count(tau)
    n = np.arange(-K, K + 1)[:, None]
    m = np.arange(-M, M + 1)[None, :]
    w = m + n * complex(tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = 1 / (z - w) ** 2 - 1 / w**2
    inner[K, M] = 1 / z**2
    total = np.sum(inner)
    # midpoint-rule tails in m for each row, from the exact antiderivatives
    A = M + 0.5
    r = n[:, 0] * complex(tau)
    tail = -1 / (z - A - r) - 1 / (A + r) + 1 / (z + A - r) - 1 / (A - r)
    return complex(total + np.sum(tail))


def wp_lattice_oracle(z: complex, tau: complex, M: int = 2000) -> tuple[complex, float]:
    """wp from 1/z^2 + sum'(1/(z-w)^2 - 1/w^2) over rows |n| <= K, |m| <= M.

    Row sums decay exponentially in |n|; the m-tails are replaced by their
    integrals.  The error estimate is the change when M is doubled.
    """
    if _in_lattice(z, tau):
        raise ValueError("z lies in the lattice")
    z = _reduce(z, tau)
    a = _wp_rows(z, tau, M)
    b = _wp_rows(z, tau, 2 * M)
    return b, abs(b - a)


def lattice_power_sum(z: complex, tau: complex, s: int, exclude_origin: bool = False, M: int = 600) -> complex:
    """sum over y in z + Z + tau Z of y^-s for s >= 3, row by row with integral tails."""
    if s < 3:
        raise ValueError("only absolutely convergent sums (s >= 3)")
    z = _reduce(z, tau)
    K = _row_count(tau)
    n = np.arange(-K, K + 1)[:, None]
    m = np.arange(-M, M + 1)[None, :]
    y = z + m + n * complex(tau)
    inv = np.zeros_like(y)
    mask = np.ones(y.shape, dtype=bool)
    if exclude_origin:
        mask[K, M] = False
    inv[mask] = 1 / y[mask] ** s
    total = np.sum(inv)
    A = M + 0.5
    w = z + n[:, 0] * complex(tau)
    tail = ((A + w) ** (1 - s) - (w - A) ** (1 - s)) / (s - 1)
    return complex(total + np.sum(tail))


# ---------------------------------------------------------------------------
# Fricke functions


@dataclass(frozen=True)
class FrickeLabel:
    v1: Fraction
    v2: Fraction

    def __init__(self, v1, v2):
        object.__setattr__(self, "v1", rat(v1) % 1)
        object.__setattr__(self, "v2", rat(v2) % 1)
        if self.v1 == 0 and self.v2 == 0:
            raise ValueError("the zero label has no Fricke function")

    @property
    def level(self) -> int:
        return math.lcm(self.v1.denominator, self.v2.denominator)

    def act(self, u) -> "FrickeLabel":
        """v -> u v for an integer matrix u."""
        (a, b), (c, d) = u
        return FrickeLabel(a * self.v1 + b * self.v2, c * self.v1 + d * self.v2)


def fricke_numeric(v: FrickeLabel, tau: complex) -> complex:
    """c(tau) pi^-2 wp(v1 tau + v2)."""
    z = float(v.v1) * complex(tau) + float(v.v2)
    return c_numeric(tau) * wp_numeric(z, tau) / math.pi**2


def fricke_qexp(v: FrickeLabel, order: int) -> QExpansion:
    """Exact expansion in q^{1/N}, coefficients in Q(zeta_N); valid to q^{order}."""
    N = v.level
    R = order * N + N  # exponents in units of 1/N for the X part
    zero = Cyclo.rational(0, N)
    X = [zero] * R
    a1 = int(v.v1 * N)
    zeta = lambda k: Cyclo.zeta(N, (k * int(v.v2 * N)) % N)  # noqa: E731
    const = Cyclo.rational(Fraction(1, 12), N)
    if a1 == 0:
        u = root_of_unity(v.v2).lift(N)
        const = const + u * ((1 - u) * (1 - u)).inverse()
    else:
        for k in range(1, R // a1 + 1):
            if k * a1 < R:
                X[k * a1] = X[k * a1] + zeta(k) * k
    for mm in range(1, order + 2):
        for sign in (1, -1):
            step = mm * N + sign * a1
            for k in range(1, R // step + 1):
                if k * step < R:
                    X[k * step] = X[k * step] + (zeta(k) if sign == 1 else zeta(-k)) * k
        for k in range(1, R // (mm * N) + 1):
            if k * mm * N < R:
                X[k * mm * N] = X[k * mm * N] - Cyclo.rational(2 * k, N)
    X[0] = X[0] + const
    xs = QExpansion(N, 0, [c * -4 for c in X], R)
    c = weierstrass_data(order + 2).c
    return (c * xs).truncate(order * N)


# ---------------------------------------------------------------------------
# lattice functions on level-N Q-lattices


def _label(a, N: int) -> tuple[Fraction, Fraction]:
    a1, a2 = rat(a[0]), rat(a[1])
    if (a1 * N).denominator != 1 or (a2 * N).denominator != 1:
        raise ValueError("label is not N-torsion for the lattice level")
    return a1 % 1, a2 % 1


def _phi_in_lattice(a, lat: QLattice2Level) -> bool:
    x1, x2 = lat.phi_coords(a)
    return x1 == 0 and x2 == 0


def Xa_numeric(a, lat: QLattice2Level) -> complex:
    """pi^-2 wp(phi(a)) with phi(a) = rho_1(a) - tau rho_2(a); zero when phi(a) is in the lattice."""
    a = _label(a, lat.level)
    if _phi_in_lattice(a, lat):
        return 0j
    return wp_numeric(lat.phi(a), lat.tau) / math.pi**2


def nu_numeric(k: int, tau: complex) -> complex:
    expr = nu_symbolic(k)
    return complex(expr.subs({E4: ek_numeric(4, tau), E6: ek_numeric(6, tau)}).evalf(17))


def E2ka_numeric(k: int, a, lat: QLattice2Level) -> complex:
    """pi^-2k sum_{y in Lambda + phi(a)} y^-2k for k >= 2, or nu_{2k} when phi(a) is in the lattice."""
    if k < 2:
        raise ValueError("weight 2 is handled by Xa_numeric")
    a = _label(a, lat.level)
    if _phi_in_lattice(a, lat):
        return nu_numeric(2 * k, lat.tau)
    return lattice_power_sum(lat.phi(a), lat.tau, 2 * k) / math.pi ** (2 * k)


def E2ka_recursive(k: int, a, lat: QLattice2Level) -> complex:
    """E_{2k,a} from X_a, e4 and e6 through the recursion."""
    a = _label(a, lat.level)
    if _phi_in_lattice(a, lat):
        return nu_numeric(2 * k, lat.tau)
    x = Xa_numeric(a, lat)
    expr = E_symbolic(2 * k)
    return complex(expr.subs({XS: x, E4: ek_numeric(4, lat.tau), E6: ek_numeric(6, lat.tau)}).evalf(17))


# ---------------------------------------------------------------------------
# slash operators and the eta cocycle


def sl2_lift(alpha, N: int, tau: complex | None = None) -> tuple[int, int, int, int]:
    """An element of SL2(Z) reducing to alpha in SL2(Z/N).

    With tau given, the lift is chosen among small candidates to keep
    Im(gamma^-1 tau) as large as possible, which keeps q-series evaluation
    at gamma^-1 tau away from the cusp.
    """
    a, b, c, d = (int(x) % N for x in (alpha if len(alpha) == 4 else (*alpha[0], *alpha[1])))
    if (a * d - b * c - 1) % N:
        raise ValueError("alpha is not in SL2(Z/N)")
    if N == 1:
        return (1, 0, 0, 1)
    if tau is not None:
        return _best_lift(a, b, c, d, N, complex(tau))
    if c == 0:
        c = N
    t = 0
    while math.gcd(c, d + t * N) != 1:
        t += 1
    d += t * N
    k = (1 - (a * d - b * c)) // N  # a d - b c = 1 - k N
    # want x d - y c = k, then (a + xN) d - (b + yN) c = 1
    _, s, u = _ext_gcd(d, -c)  # s d - u c = 1
    x, y = s * k, u * k
    out = (a + x * N, b + y * N, c, d)
    if out[0] * out[3] - out[1] * out[2] != 1:
        raise AssertionError("lift failed")
    return out


def _best_lift(a0, b0, c0, d0, N, tau):
    # gamma^-1 tau has imaginary part Im(tau) / |a - c tau|^2
    best, best_j = None, math.inf
    for c in (c0 + t * N for t in range(-2, 3)):
        for a in (a0 + s * N for s in range(-3, 4)):
            j = abs(a - c * tau)
            if j >= best_j or math.gcd(a, c) != 1:
                continue
            _, d1, mb = _ext_gcd(a, -c)  # d1 a - mb c = 1
            for m in range(N):
                b, d = mb + m * a, d1 + m * c
                if (b - b0) % N == 0 and (d - d0) % N == 0:
                    best, best_j = (a, b, c, d), j
                    break
    if best is None:
        return sl2_lift((a0, b0, c0, d0), N)
    return best


def _mobius(g, tau: complex) -> tuple[complex, complex]:
    """(g tau, c tau + d)."""
    (a, b), (c, d) = g
    tau = complex(tau)
    j = float(c) * tau + float(d)
    return (float(a) * tau + float(b)) / j, j


def slash(f, weight: int, g, tau: complex, det_power: bool = True) -> complex:
    """(f|_w g)(tau) = Det(g)^{w/2} f(g tau) (c tau + d)^-w; the Det factor is optional."""
    gt, j = _mobius(g, tau)
    val = f(gt) * j ** (-weight)
    if det_power:
        val *= float(mat_det(mat(g))) ** (weight / 2)
    return val


def mu_L_series(L: Sublattice, order: int) -> QExpansion:
    """n e2(n tau) - e2(tau) for a lattice with elementary divisors (d, d n)."""
    d1, n = _elementary(L)
    if not L.is_diagonal() or L.d % L.a:
        raise ValueError("exact series only for diagonal lattices diag(d, d n)")
    e2 = ek_series(2, order).series
    return (e2.substitute_power(n).truncate(order).scale(n) - e2).truncate(order)


def _elementary(L: Sublattice) -> tuple[int, int]:
    d1 = math.gcd(math.gcd(L.a, L.b), L.d)
    return d1, L.index // (d1 * d1)


def _smith_frame(L: Sublattice) -> tuple[int, int, tuple]:
    """(d1, n, gamma) with gamma in SL2(Z) and L = gamma diag(d1, d1 n) Z^2."""
    d1, n = _elementary(L)
    a, b, d = L.a // d1, L.b // d1, L.d // d1
    found = None
    for i in range(-n - 1, n + 2):
        for j in range(-n - 1, n + 2):
            x, y = i * a + j * b, j * d
            if math.gcd(x, y) == 1:
                found = (x, y)
                break
        if found:
            break
    x, y = found
    _, s, t = _ext_gcd(x, y)  # s x + t y = 1
    gamma = ((x, -t), (y, s))
    return d1, n, gamma


def _mu_diag_numeric(n: int, tau: complex) -> complex:
    return n * ek_numeric(2, n * complex(tau)) - ek_numeric(2, tau)


def mu_L(L: Sublattice, tau: complex) -> complex:
    """mu_L(tau) by slash transport: mu_L = mu_{diag(d, dn)} | gamma^-1."""
    _, n, gamma = _smith_frame(L)
    ginv = mat_inv(mat(gamma))
    return slash(lambda t: _mu_diag_numeric(n, t), 2, ginv, tau)


def mu_L_direct(L: Sublattice, tau: complex) -> complex:
    """Log-derivative of eta^4|g / eta^4 with g = m^-1, m(Z^2) = L, in the scale where diag(d, dn) gives n e2(n tau) - e2(tau)."""
    g = mat_inv(L.basis)
    gt, j = _mobius(g, tau)
    c = float(g[1][0])
    return float(mat_det(g)) * ek_numeric(2, gt) / j**2 - 2 * c / (1j * math.pi * j) - ek_numeric(2, tau)


# ---------------------------------------------------------------------------
# division relations


def _columns_in(L: Sublattice, rho) -> bool:
    a, b, c, d = rho
    return (a, c) in L and (b, d) in L


def stratum(rho, N: int) -> Sublattice:
    """L = rho(Z^2) + N Z^2, so that rho((1/N) Z^2) = (1/N) L."""
    a, b, c, d = rho
    from .lat2d import hnf

    return hnf([[a, b, N, 0], [c, d, 0, N]])


def pi_N_L(N: int, L: Sublattice, rho) -> int:
    """pi_L prod_{L' strictly inside L} (1 - pi_{L'}), literally."""
    if not _columns_in(L, rho):
        return 0
    for Lp in enumerate_SN(N):
        if Lp != L and Lp.index > L.index and _sub(Lp, L) and _columns_in(Lp, rho):
            return 0
    return 1


def _sub(L1: Sublattice, L2: Sublattice) -> bool:
    return (L1.a, 0) in L2 and (L1.b, L1.d) in L2


def _torsion(N: int):
    return [(Fraction(i, N), Fraction(j, N)) for i in range(N) for j in range(N)]


@dataclass
class NumericReport:
    name: str
    ok: bool
    residual: float
    tol: float
    witness: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def div11_check(N: int, lat: QLattice2Level, tol: float = 1e-8) -> NumericReport:
    """sum_{Na=0} X_a(rho, tau) against N^2 sum_L pi(N, L)(rho) mu_L(tau)."""
    if lat.level % N:
        raise ValueError("lattice level must be a multiple of N")
    lhs = sum(Xa_numeric(a, lat) for a in _torsion(N))
    rho = tuple(x % N for x in lat.rho)
    rhs = 0j
    active = []
    for L in enumerate_SN(N):
        if pi_N_L(N, L, rho):
            active.append(L)
            rhs += N * N * mu_L(L, lat.tau)
    res = abs(lhs - rhs)
    ok = res <= tol and len(active) == 1 and active[0] == stratum(rho, N)
    return NumericReport(
        f"div11 N={N}", ok, res, tol,
        None if ok else {"N": N, "rho": rho, "tau": lat.tau},
        {"lhs": lhs, "rhs": rhs, "strata": [str(L) for L in active]},
    )


def alpha_NLk(N: int, L: Sublattice, k: int, tau: complex, det_power: bool) -> complex:
    """N^{2k} d^2 n^{k+1} e_{2k}|m^-1 - Det(m)(e_{2k} - nu_{2k}) for m = basis of L."""
    d, n = _elementary(L)
    m = L.basis
    slashed = slash(lambda t: ek_numeric(2 * k, t), 2 * k, mat_inv(m), tau, det_power)
    e = ek_numeric(2 * k, tau)
    return N ** (2 * k) * d * d * n ** (k + 1) * slashed - float(mat_det(m)) * (e - nu_numeric(2 * k, tau))


def _alpha_by_sublattice_sum(N: int, L: Sublattice, k: int, tau: complex) -> complex:
    """For diagonal strata: collapsing the torsion sum gives N^{2k} d^{2-2k} n e_{2k}(n tau) - Det(m)(e_{2k} - nu_{2k})."""
    d, n = _elementary(L)
    e = ek_numeric(2 * k, tau)
    return N ** (2 * k) * d ** (2 - 2 * k) * n * ek_numeric(2 * k, n * complex(tau)) - L.index * (e - nu_numeric(2 * k, tau))


def omega_division_check(N: int, k: int, lat: QLattice2Level, tol: float = 1e-6) -> NumericReport:
    """sum_{Na=0} E_{2k,a}(rho, tau) against sum_L pi(N, L)(rho) alpha_{N,L,k}(tau), both slash conventions."""
    if lat.level % N:
        raise ValueError("lattice level must be a multiple of N")
    lhs = sum(E2ka_numeric(k, a, lat) for a in _torsion(N))
    rho = tuple(x % N for x in lat.rho)
    rhs = {True: 0j, False: 0j}
    strata = [L for L in enumerate_SN(N) if pi_N_L(N, L, rho)]
    for L in strata:
        for conv in rhs:
            rhs[conv] += alpha_NLk(N, L, k, lat.tau, conv)
    res = {("with_det" if c else "without_det"): abs(lhs - v) for c, v in rhs.items()}
    best = min(res, key=res.get)
    ok = res[best] <= tol
    details = {"lhs": lhs, "rhs_with_det": rhs[True], "rhs_without_det": rhs[False], "residuals": res,
               "convention": best if ok else None, "strata": [str(L) for L in strata]}
    if all(L.is_diagonal() and L.d % L.a == 0 for L in strata):
        alt = sum(_alpha_by_sublattice_sum(N, L, k, lat.tau) for L in strata)
        details["residual_collapsed_sum"] = abs(lhs - alt)
    return NumericReport(
        f"omega division N={N} k={k}", ok, res[best], tol,
        None if ok else {"N": N, "k": k, "strata": [str(L) for L in strata], "tau": lat.tau},
        details,
    )


def weight_covariance_check(a, lat: QLattice2Level, gamma, tol: float = 1e-8) -> NumericReport:
    """X_a(gamma rho, gamma tau) = (c tau + d)^2 X_a(rho, tau)."""
    (ga, gb), (gc, gd) = gamma
    if ga * gd - gb * gc != 1:
        raise ValueError("gamma must lie in SL2(Z)")
    r11, r12, r21, r22 = lat.rho
    grho = (ga * r11 + gb * r21, ga * r12 + gb * r22, gc * r11 + gd * r21, gc * r12 + gd * r22)
    gt, j = _mobius(gamma, lat.tau)
    lhs = Xa_numeric(a, QLattice2Level(lat.level, grho, gt))
    rhs = j**2 * Xa_numeric(a, lat)
    res = abs(lhs - rhs)
    return NumericReport("weight covariance", res <= tol * max(1.0, abs(rhs)), res, tol,
                         None if res <= tol * max(1.0, abs(rhs)) else {"gamma": gamma, "a": a, "tau": lat.tau},
                         {"lhs": lhs, "rhs": rhs})


_S = ((0, -1), (1, 0))


def _mat_mod_mul(x, y, N):
    (a, b), (c, d) = x
    (e, f), (g, h) = y
    return (((a * e + b * g) % N, (a * f + b * h) % N), ((c * e + d * g) % N, (c * f + d * h) % N))


def _as_rows(m):
    if len(m) == 4:
        return ((m[0], m[1]), (m[2], m[3]))
    return tuple(tuple(int(x) for x in r) for r in m)


def xa_galois_check(level: int, alpha, rho, tau: complex, label=(1, 0), tol: float = 1e-8) -> NumericReport:
    """c X_a(alpha rho, tau) three ways.

    direct: the lattice function at (alpha rho, tau);
    labels: the Fricke function of s alpha s^-1 v, v = s rho a;
    galois: write alpha = diag(k, 1) alpha_1 with alpha_1 in SL2(Z/N); take the
    exact q-expansion for alpha_1 rho, raise its roots of unity to the k-th
    power and sum it at tau.  The SL2 factor is also checked against the
    slash by a lift of alpha_1.
    """
    N = level
    A = _as_rows(alpha)
    R = _as_rows(rho)
    k = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % N
    if math.gcd(k, N) != 1:
        raise ValueError("alpha must be invertible mod N")
    a = (Fraction(label[0], N), Fraction(label[1], N))
    aR = _mat_mod_mul(A, R, N)
    lat = QLattice2Level(N, (aR[0][0], aR[0][1], aR[1][0], aR[1][1]), tau)
    c = c_numeric(tau)
    direct = c * Xa_numeric(a, lat)

    def fricke_label(M):
        x1 = (M[0][0] * a[0] + M[0][1] * a[1]) % 1
        x2 = (M[1][0] * a[0] + M[1][1] * a[1]) % 1
        return (-x2) % 1, x1  # s (x1, x2)

    v = fricke_label(R)
    details = {"direct": direct}
    if v == (0, 0):
        vals = {"direct": direct, "labels": 0j, "galois": 0j}
    else:
        # s alpha s^-1 = [[d, -c], [-b, a]]
        sas = ((A[1][1], -A[1][0]), (-A[0][1], A[0][0]))
        vp = FrickeLabel(*v).act(sas)
        vals = {"direct": direct, "labels": fricke_numeric(vp, tau)}
        kinv = pow(k, -1, N)
        dinv = ((kinv, 0), (0, 1))
        A1 = _mat_mod_mul(dinv, A, N)
        w = fricke_label(_mat_mod_mul(A1, R, N))
        gal = fricke_qexp(FrickeLabel(*w), 30).galois(k).evaluate(tau)
        vals["galois"] = gal
        gamma = sl2_lift((A1[0][0], A1[0][1], A1[1][0], A1[1][1]), N, tau)
        ginv = ((gamma[3], -gamma[1]), (-gamma[2], gamma[0]))
        gt, _ = _mobius(ginv, tau)
        vals["sl2_slash"] = c_numeric(gt) * Xa_numeric(a, QLattice2Level(N, R, gt))
        vals["sl2_label"] = fricke_numeric(FrickeLabel(*w), tau)
    details.update(vals)
    # the sl2 pair is a different function of tau: compare it only with itself
    spread = {key: abs(vals[key] - direct) for key in ("direct", "labels", "galois")}
    sl2 = abs(vals.get("sl2_slash", 0) - vals.get("sl2_label", 0)) / max(1.0, abs(vals.get("sl2_label", 0)))
    res = max(max(spread.values()) / max(1.0, abs(direct)), sl2)
    ok = res <= tol
    return NumericReport(
        "galois covariance", ok, res, tol,
        None if ok else {"alpha": A, "rho": R, "label": label, "tau": tau, "spread": spread, "sl2": sl2},
        details,
    )
