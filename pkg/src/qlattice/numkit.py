"""Exact arithmetic substrate.

Rationals are plain :class:`fractions.Fraction` values (aliased ``Rat``).
On top of them this module provides elements of Q/Z, cyclotomic numbers in
a canonical power basis, the rational group algebra Q[Q/Z] viewed as
character sums on the profinite integers, truncated q-series with
fractional exponents, a handful of arithmetic functions and a small
zeta evaluator with explicit error terms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
from sympy import cyclotomic_poly, factorint
from sympy.abc import x as _x

Rat = Fraction

__all__ = [
    "Rat",
    "rat",
    "QModZ",
    "Cyclo",
    "CharSum",
    "QExpansion",
    "gamma_coeff",
    "gamma_k",
    "bernoulli_b",
    "f_j",
    "mobius",
    "divisors",
    "divisor_sigma",
    "sigma_table",
    "totient",
    "prime_factors",
    "units_mod",
    "root_of_unity",
    "numeric_embed",
    "zeta",
    "zeta_product",
    "ZetaProduct",
]


def rat(value) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("refusing to build an exact rational from a float")
    return Fraction(value)


# ---------------------------------------------------------------------------
# elementary arithmetic functions


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in _factor(n)]


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("divisors of a positive integer only")
    ds = [1]
    for p, e in _factor(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def mobius(n: int) -> int:
    fac = _factor(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def totient(n: int) -> int:
    out = n
    for p, _ in _factor(n):
        out = out // p * (p - 1)
    return out


def units_mod(n: int) -> list[int]:
    if n == 1:
        return [0]
    return [k for k in range(n) if math.gcd(k, n) == 1]


def divisor_sigma(k: int, n: int) -> int:
    """Sum of d**k over the positive divisors d of n."""
    if n < 1 or k < 0:
        raise ValueError("need k >= 0 and n >= 1")
    return sum(d**k for d in divisors(n))


def sigma_table(k: int, nmax: int) -> np.ndarray:
    """sigma_k(n) for n = 0..nmax as a float64 array (entry 0 unused)."""
    out = np.zeros(nmax + 1, dtype=np.float64)
    for d in range(1, nmax + 1):
        out[d::d] += float(d) ** k
    return out


def f_j(j: int, n: int) -> Fraction:
    """sum_{d | n} mu(d) (n/d)^j, valid for any integer j."""
    if n < 1:
        raise ValueError("n must be positive")
    total = Fraction(0)
    for d in divisors(n):
        mu = mobius(d)
        if mu:
            total += mu * Fraction(n // d) ** j
    return total


# ---------------------------------------------------------------------------
# Bernoulli-type constants


@lru_cache(maxsize=None)
def _todd_series(order: int) -> tuple[Fraction, ...]:
    # x/(e^x - 1) by long division of power series: (e^x - 1)/x = sum x^n/(n+1)!
    den = [Fraction(1, math.factorial(n + 1)) for n in range(order + 1)]
    out: list[Fraction] = []
    for n in range(order + 1):
        acc = Fraction(1) if n == 0 else Fraction(0)
        for i in range(n):
            acc -= out[i] * den[n - i]
        out.append(acc)
    return tuple(out)


def gamma_coeff(j: int) -> Fraction:
    """gamma_{2j}, defined by x/(e^x-1) = 1 - x/2 - sum_j gamma_{2j} x^{2j}."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return -_todd_series(2 * j)[2 * j]


def gamma_k(k: int) -> Fraction:
    """gamma_k for any k >= 1; zero for odd k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(0) if k % 2 else gamma_coeff(k // 2)


def bernoulli_b(j: int) -> Fraction:
    """Positive-index Bernoulli numbers B_1 = 1/6, B_2 = 1/30, B_3 = 1/42, ..."""
    return (-1) ** j * math.factorial(2 * j) * gamma_coeff(j)


# ---------------------------------------------------------------------------
# Q/Z


@dataclass(frozen=True, order=True)
class QModZ:
    """Reduced fraction a/b with 0 <= a < b; zero is 0/1."""

    a: int
    b: int

    def __post_init__(self):
        if self.b < 1 or not 0 <= self.a < self.b or math.gcd(self.a, self.b) != 1:
            raise ValueError(f"QModZ({self.a}, {self.b}) is not reduced")

    @classmethod
    def of(cls, value) -> "QModZ":
        if isinstance(value, QModZ):
            return value
        fr = rat(value)
        fr = fr - math.floor(fr)
        return cls(fr.numerator, fr.denominator)

    @property
    def frac(self) -> Fraction:
        return Fraction(self.a, self.b)

    def order(self) -> int:
        return self.b

    def __add__(self, other) -> "QModZ":
        return QModZ.of(self.frac + QModZ.of(other).frac)

    def __sub__(self, other) -> "QModZ":
        return QModZ.of(self.frac - QModZ.of(other).frac)

    def __neg__(self) -> "QModZ":
        return QModZ.of(-self.frac)

    def __mul__(self, k: int) -> "QModZ":
        if not isinstance(k, int):
            return NotImplemented
        return QModZ.of(self.frac * k)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.a == 0

    def divisions(self, n: int) -> list["QModZ"]:
        """All s with n*s = self."""
        base = self.frac / n
        return [QModZ.of(base + Fraction(j, n)) for j in range(n)]

    def __str__(self) -> str:
        return "0" if self.a == 0 else f"{self.a}/{self.b}"

    def __repr__(self) -> str:
        return f"QModZ({self})"


# ---------------------------------------------------------------------------
# cyclotomic numbers


@lru_cache(maxsize=None)
def _cyclo_tables(n: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """(phi(n), reduction of zeta^j for j = 0..n-1 in the power basis)."""
    phi = totient(n)
    poly = [int(c) for c in cyclotomic_poly(n, _x, polys=True).all_coeffs()][::-1]
    # poly[i] is the coefficient of x^i; monic of degree phi
    rows: list[tuple[int, ...]] = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x and reduce x^phi = -sum poly[i] x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * poly[i] for i, c in enumerate(cur)]
    return phi, tuple(rows)


class Cyclo:
    """Element of Q(zeta_N) in the power basis 1, zeta, ..., zeta^{phi(N)-1}.

    Values of different levels compare and combine by embedding both into
    the level lcm(N1, N2) via zeta_N = zeta_{kN}^k.
    """

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs: Sequence[Fraction]):
        phi, _ = _cyclo_tables(level)
        if len(coeffs) != phi:
            raise ValueError("coefficient vector has wrong length")
        self.level = level
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    # constructors
    @classmethod
    def from_exponents(cls, level: int, terms: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]) -> "Cyclo":
        phi, table = _cyclo_tables(level)
        acc = [Fraction(0)] * phi
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            if not c:
                continue
            row = table[e % level]
            for i, r in enumerate(row):
                if r:
                    acc[i] += c * r
        return cls(level, acc)

    @classmethod
    def rational(cls, value, level: int = 1) -> "Cyclo":
        return cls.from_exponents(level, {0: rat(value)})

    @classmethod
    def zeta(cls, level: int, power: int = 1) -> "Cyclo":
        return cls.from_exponents(level, {power: Fraction(1)})

    def lift(self, level: int) -> "Cyclo":
        if level == self.level:
            return self
        if level % self.level:
            raise ValueError(f"cannot embed level {self.level} into level {level}")
        k = level // self.level
        return Cyclo.from_exponents(level, {k * i: c for i, c in enumerate(self.coeffs) if c})

    @staticmethod
    def _coerce(other) -> "Cyclo":
        if isinstance(other, Cyclo):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclo.rational(other)
        raise TypeError(f"cannot combine Cyclo with {type(other).__name__}")

    def _pair(self, other):
        other = self._coerce(other)
        lv = math.lcm(self.level, other.level)
        return self.lift(lv), other.lift(lv), lv

    # arithmetic
    def __add__(self, other):
        try:
            a, b, lv = self._pair(other)
        except TypeError:
            return NotImplemented
        return Cyclo(lv, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.level, [-c for c in self.coeffs])

    def __sub__(self, other):
        try:
            return self + (-self._coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclo(self.level, [c * other for c in self.coeffs])
        try:
            a, b, lv = self._pair(other)
        except TypeError:
            return NotImplemented
        if lv == 1:
            return Cyclo(1, [a.coeffs[0] * b.coeffs[0]])
        acc: dict[int, Fraction] = {}
        bc = [(j, y) for j, y in enumerate(b.coeffs) if y]
        for i, xv in enumerate(a.coeffs):
            if not xv:
                continue
            for j, y in bc:
                e = (i + j) % lv
                acc[e] = acc.get(e, Fraction(0)) + xv * y
        return Cyclo.from_exponents(lv, acc)

    __rmul__ = __mul__

    def galois(self, k: int) -> "Cyclo":
        """Automorphism zeta_N -> zeta_N^k (k a unit mod N)."""
        if math.gcd(k, self.level) != 1:
            raise ValueError(f"{k} is not a unit modulo {self.level}")
        return Cyclo.from_exponents(self.level, {(k * i) % self.level: c for i, c in enumerate(self.coeffs) if c})

    def conj(self) -> "Cyclo":
        return self.galois(-1 % self.level if self.level > 1 else 1)

    def norm(self) -> Fraction:
        prod = Cyclo.rational(1, self.level)
        for k in units_mod(self.level):
            prod = prod * self.galois(k if self.level > 1 else 1)
        return prod.rational_value()

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.level == 1:
            return Cyclo(1, [1 / self.coeffs[0]])
        others = Cyclo.rational(1, self.level)
        for k in units_mod(self.level):
            if k != 1:
                others = others * self.galois(k)
        nrm = (self * others).rational_value()
        return others * (1 / nrm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Cyclo.rational(1, self.level)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # predicates and conversion
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.coeffs[0]

    def __eq__(self, other):
        try:
            a, b, _ = self._pair(other)
        except TypeError:
            return NotImplemented
        return a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]

    def __complex__(self):
        return numeric_embed(self, 1)

    def __repr__(self):
        terms = [f"{c}*z{self.level}^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"Cyclo[{self.level}](" + (" + ".join(terms) or "0") + ")"


def root_of_unity(r) -> Cyclo:
    """The exact root of unity exp(2 pi i r) as an element of Q(zeta_b)."""
    q = QModZ.of(r)
    return Cyclo.zeta(q.b, q.a)


def numeric_embed(c: Cyclo, k: int = 1) -> complex:
    """Complex value under zeta_N -> exp(2 pi i k / N)."""
    if math.gcd(k, c.level) != 1:
        raise ValueError(f"{k} is not a unit modulo {c.level}")
    w = cmath.exp(2j * math.pi * k / c.level)
    return complex(sum(float(a) * w**i for i, a in enumerate(c.coeffs) if a))


# ---------------------------------------------------------------------------
# rational group algebra of Q/Z, read as functions on the profinite integers


def _qmodz(num: int, den: int) -> QModZ:
    """num/den mod 1 from integers, skipping Fraction construction."""
    g = math.gcd(num, den)
    num, den = num // g, den // g
    out = object.__new__(QModZ)
    object.__setattr__(out, "a", num % den)
    object.__setattr__(out, "b", den)
    return out


class CharSum:
    """Finite sum  sum_u c_u e(u)  with u in Q/Z and rational c_u.

    Read as the function rho -> sum_u c_u exp(2 pi i rho u) on the profinite
    integers; distinct characters are linearly independent, so equality of
    the coefficient maps is equality of functions.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[QModZ, Fraction] | None = None):
        self.terms = {QModZ.of(k): Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def _trusted(cls, terms: dict) -> "CharSum":
        out = cls.__new__(cls)
        out.terms = {k: v for k, v in terms.items() if v}
        return out

    @classmethod
    def const(cls, value) -> "CharSum":
        return cls({QModZ(0, 1): rat(value)})

    @classmethod
    def char(cls, u, coeff=1) -> "CharSum":
        return cls({QModZ.of(u): rat(coeff)})

    @classmethod
    def indicator(cls, d: int) -> "CharSum":
        """Indicator of d * (profinite integers)."""
        return cls({QModZ.of(Fraction(j, d)): Fraction(1, d) for j in range(d)})

    def __add__(self, other: "CharSum") -> "CharSum":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return CharSum(out)

    def __neg__(self):
        return CharSum({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "CharSum") -> "CharSum":
        return self + (-other)

    def scale(self, c) -> "CharSum":
        c = rat(c)
        return CharSum({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "CharSum") -> "CharSum":
        if not isinstance(other, CharSum):
            return self.scale(other)
        out: dict[QModZ, Fraction] = {}
        for k1, v1 in self.terms.items():
            a1, b1 = k1.a, k1.b
            for k2, v2 in other.terms.items():
                k = _qmodz(a1 * k2.b + k2.a * b1, b1 * k2.b)
                out[k] = out[k] + v1 * v2 if k in out else v1 * v2
        return CharSum._trusted(out)

    def conj(self) -> "CharSum":
        return CharSum({-k: v for k, v in self.terms.items()})

    def pullback(self, s: Fraction) -> "CharSum":
        """rho -> f(s rho) on the domain s*rho integral, zero elsewhere."""
        s = rat(s)
        moved = self.dilate(s)
        if s.denominator == 1:
            return moved
        return moved * CharSum.indicator(s.denominator)

    def dilate(self, s) -> "CharSum":
        """Frequencies multiplied by s; colliding characters are summed."""
        s = rat(s)
        sn, sd = s.numerator, s.denominator
        out: dict[QModZ, Fraction] = {}
        for k, v in self.terms.items():
            u = _qmodz(k.a * sn, k.b * sd)
            out[u] = out[u] + v if u in out else v
        return CharSum._trusted(out)

    def level(self) -> int:
        return math.lcm(1, *(k.b for k in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, rho: int) -> Cyclo:
        """Exact value at the integer rho (an element of the profinite integers)."""
        lv = self.level()
        # several characters can land on the same root of unity, so pass pairs and let them add up
        return Cyclo.from_exponents(lv, [((k.a * (lv // k.b) * rho) % lv, v) for k, v in self.terms.items()])

    def __eq__(self, other):
        if not isinstance(other, CharSum):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        body = " + ".join(f"{v}*e({k})" for k, v in sorted(self.terms.items()))
        return f"CharSum({body or '0'})"


# ---------------------------------------------------------------------------
# truncated q-series in q^{1/N}


class QExpansion:
    """sum_{i >= v} c_i q^{i/N} + O(q^{M/N}) with Cyclo coefficients.

    ``coeffs[i - v]`` is the coefficient of q^{i/N}; ``order`` is M.  The
    valuation is exact: either the leading stored coefficient is nonzero or
    the series is zero to the stated order (then ``valuation == order``).
    """

    __slots__ = ("ram", "valuation", "coeffs", "order")

    def __init__(self, ram: int, valuation: int, coeffs: Sequence, order: int):
        cs = [c if isinstance(c, Cyclo) else Cyclo.rational(c) for c in coeffs]
        if valuation + len(cs) > order:
            cs = cs[: max(0, order - valuation)]
        # strip leading zeros so the valuation is exact
        k = 0
        while k < len(cs) and cs[k].is_zero():
            k += 1
        cs = cs[k:]
        valuation += k
        if not cs:
            valuation = order
        # pad so that every exponent below the order is stored
        cs = cs + [Cyclo.rational(0)] * (order - valuation - len(cs))
        self.ram = ram
        self.valuation = valuation
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def from_rationals(cls, coeffs: Sequence, order: int | None = None, valuation: int = 0, ram: int = 1) -> "QExpansion":
        order = valuation + len(coeffs) if order is None else order
        return cls(ram, valuation, [Cyclo.rational(c) for c in coeffs], order)

    @classmethod
    def constant(cls, value, order: int, ram: int = 1) -> "QExpansion":
        return cls(ram, 0, [value], order)

    @classmethod
    def monomial(cls, exponent: int, coeff, order: int, ram: int = 1) -> "QExpansion":
        return cls(ram, exponent, [coeff], order)

    def coeff(self, exponent) -> Cyclo:
        """Coefficient of q^exponent (exponent a rational)."""
        e = rat(exponent) * self.ram
        if e.denominator != 1:
            return Cyclo.rational(0)
        i = int(e)
        if i >= self.order:
            raise IndexError("coefficient beyond the truncation order")
        if i < self.valuation:
            return Cyclo.rational(0)
        return self.coeffs[i - self.valuation]

    def ramify(self, ram: int) -> "QExpansion":
        if ram == self.ram:
            return self
        if ram % self.ram:
            raise ValueError("ramification must be a multiple")
        k = ram // self.ram
        zero = Cyclo.rational(0)
        cs = []
        for c in self.coeffs:
            cs.append(c)
            cs.extend([zero] * (k - 1))
        return QExpansion(ram, self.valuation * k, cs, self.order * k)

    def _aligned(self, other: "QExpansion"):
        ram = math.lcm(self.ram, other.ram)
        return self.ramify(ram), other.ramify(ram), ram

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            other = QExpansion.constant(other, max(self.order, 1), self.ram)
        a, b, ram = self._aligned(other)
        order = min(a.order, b.order)
        v = min(a.valuation, b.valuation)
        cs = [a._get(i) + b._get(i) for i in range(v, order)]
        return QExpansion(ram, v, cs, order)

    __radd__ = __add__

    def _get(self, i: int) -> Cyclo:
        if i < self.valuation or i >= self.order:
            return Cyclo.rational(0)
        return self.coeffs[i - self.valuation]

    def __neg__(self):
        return QExpansion(self.ram, self.valuation, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QExpansion":
        return QExpansion(self.ram, self.valuation, [x * c for x in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            return self.scale(other)
        if not isinstance(other, QExpansion):
            return NotImplemented
        a, b, ram = self._aligned(other)
        v = a.valuation + b.valuation
        order = min(a.order + b.valuation, b.order + a.valuation)
        n = max(0, order - v)
        acc: list = [None] * n
        bc = b.coeffs
        for i, x in enumerate(a.coeffs):
            if i >= n or x.is_zero():
                continue
            for j in range(min(len(bc), n - i)):
                y = bc[j]
                if y.is_zero():
                    continue
                t = x * y
                acc[i + j] = t if acc[i + j] is None else acc[i + j] + t
        zero = Cyclo.rational(0)
        return QExpansion(ram, v, [z if z is not None else zero for z in acc], order)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QExpansion":
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return QExpansion.constant(1, self.order - self.valuation, self.ram)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def inverse(self) -> "QExpansion":
        if self.valuation >= self.order:
            raise ZeroDivisionError("series is zero to its truncation order")
        v = self.valuation
        rel = self.order - v  # relative precision
        lead_inv = self.coeffs[0].inverse()
        out = [lead_inv]
        for n in range(1, rel):
            acc = Cyclo.rational(0)
            for i in range(1, n + 1):
                acc = acc + self.coeffs[i] * out[n - i]
            out.append(-(acc * lead_inv))
        return QExpansion(self.ram, -v, out, -v + rel)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Cyclo)):
            return self.scale(1 / other if not isinstance(other, Cyclo) else other.inverse())
        return self * other.inverse()

    def substitute_power(self, n: int) -> "QExpansion":
        """q -> q^n."""
        zero = Cyclo.rational(0)
        cs = []
        for i, c in enumerate(self.coeffs):
            cs.append(c)
            if i < len(self.coeffs) - 1:
                cs.extend([zero] * (n - 1))
        return QExpansion(self.ram, self.valuation * n, cs, self.order * n)

    def galois(self, k: int) -> "QExpansion":
        return QExpansion(self.ram, self.valuation, [c.galois(k % c.level if c.level > 1 else 1) for c in self.coeffs], self.order)

    def truncate(self, order: int) -> "QExpansion":
        return QExpansion(self.ram, self.valuation, self.coeffs, min(order, self.order))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def rational_coeffs(self) -> list[Fraction]:
        return [c.rational_value() for c in self.coeffs]

    def evaluate(self, tau: complex) -> complex:
        q = cmath.exp(2j * math.pi * tau / self.ram)
        return sum(numeric_embed(c) * q ** (self.valuation + i) for i, c in enumerate(self.coeffs) if not c.is_zero())

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        a, b, _ = self._aligned(other)
        order = min(a.order, b.order)
        v = min(a.valuation, b.valuation)
        return all(a._get(i) == b._get(i) for i in range(v, order))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        shown = []
        for i, c in enumerate(self.coeffs[:6]):
            if not c.is_zero():
                e = Fraction(self.valuation + i, self.ram)
                shown.append(f"({c.rational_value() if c.is_rational() else c})q^{e}")
        return "QExpansion(" + " + ".join(shown) + f" + O(q^{Fraction(self.order, self.ram)}))"


# ---------------------------------------------------------------------------
# zeta values


def zeta(s: float, terms: int = 16, corrections: int = 10) -> tuple[float, float]:
    """Riemann zeta for real s > 1 by Euler-Maclaurin; returns (value, error bound)."""
    if s <= 1:
        raise ValueError("zeta(s) needs s > 1 here")
    n = terms
    head = math.fsum(k ** (-s) for k in range(1, n))
    tail = n ** (1 - s) / (s - 1) + 0.5 * n ** (-s)
    poch = s  # s (s+1) ... (s+2j-2)
    corr = []
    for j in range(1, corrections + 1):
        b2j = (-1) ** (j + 1) * float(bernoulli_b(j))  # B_{2j} in the modern convention
        corr.append(b2j / math.factorial(2 * j) * poch * n ** (-s - 2 * j + 1))
        poch *= (s + 2 * j - 1) * (s + 2 * j)
    # remainder is bounded by the size of the first omitted term
    b_next = float(bernoulli_b(corrections + 1))
    err = abs(b_next / math.factorial(2 * corrections + 2) * poch * n ** (-s - 2 * corrections - 1))
    return head + tail + math.fsum(corr), err + 4e-16 * (head + tail)


@dataclass(frozen=True)
class ZetaProduct:
    beta: float
    cutoff: int
    partial_sum: float
    full_value: float
    tail_bound: float
    full_error: float

    def consistent(self) -> bool:
        gap = self.full_value - self.partial_sum
        return -self.full_error - 1e-12 <= gap <= self.tail_bound + self.full_error + 1e-12


def sigma1_tail_bound(beta: float, cutoff: int) -> float:
    """Upper bound for sum_{n > D} sigma_1(n) n^{-beta}, beta > 2.

    Uses sigma_1(n) <= n (1 + log n) and the integral majorant of the
    decreasing function x^{1-beta} (1 + log x).
    """
    s = beta - 2.0
    d = float(cutoff)
    return d ** (-s) * ((1.0 + math.log(d)) / s + 1.0 / s**2)


def zeta_product(beta: float, cutoff: int) -> ZetaProduct:
    """Partial sum of sigma_1(n) n^{-beta} against zeta(beta) zeta(beta-1)."""
    if beta <= 2:
        raise ValueError("the series sum sigma_1(n) n^-beta diverges for beta <= 2")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    sig = sigma_table(1, cutoff)[1:]
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    partial = math.fsum((sig * n ** (-beta)).tolist())
    z1, e1 = zeta(beta)
    z2, e2 = zeta(beta - 1)
    full = z1 * z2
    err = abs(z1) * e2 + abs(z2) * e1 + e1 * e2
    return ZetaProduct(beta, cutoff, partial, full, sigma1_tail_bound(beta, cutoff), err)
