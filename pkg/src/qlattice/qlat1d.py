"""One-dimensional Q-lattices at finite level.

A lattice (q Z, q rho) with rho in the profinite integers is stored as
(q, N, c) where c = rho mod N.  Weight-zero functions of such lattices
(e(r), e_{1,a}, e_{k,a}, the divisibility projections pi_n) are functions
of c in Z/N and take values in Q(zeta_N).

The commensurability groupoid is modelled through characters: a function
on pairs (r, rho) is stored as r -> CharSum in rho, and the CharSum
already carries the domain indicator [r rho integral].  Equality of two
such functions is equality of all their values on the profinite integers.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import sympy

from .bc_system import BCElement, BCMonomial
from .numkit import CharSum, Cyclo, QModZ, divisors, f_j, gamma_k, rat, root_of_unity

__all__ = [
    "QLattice1",
    "commensurable_1d",
    "admissible",
    "GroupoidFn1",
    "groupoid_convolve",
    "groupoid_adjoint",
    "bc_image",
    "monomial_image",
    "oracle_equivalence_check",
    "e1",
    "e1_cayley",
    "e1_finite_sum",
    "pk_poly",
    "lambda_k",
    "ek",
    "pi_n",
    "pi_N_d",
    "LevelFn",
    "level_fn",
    "Report",
    "check_div_rel",
    "check_div1",
    "pi2_identity",
    "span_check",
    "alpha_n_action",
    "muepsilon_check",
]


# ---------------------------------------------------------------------------
# lattices and commensurability


@dataclass(frozen=True)
class QLattice1:
    """(q Z, q rho) with rho = c modulo the level N."""

    q: Fraction
    level: int
    c: int

    def __init__(self, q, level: int, c: int):
        q = rat(q)
        if q <= 0 or level < 1:
            raise ValueError("need q > 0 and level >= 1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "c", c % level)

    def phi(self, a) -> Fraction:
        """phi(a) in Q / qZ, as the representative in [0, q)."""
        a = QModZ.of(a)
        if self.level % a.b:
            raise ValueError(f"label {a} is not {self.level}-torsion")
        return self.q * QModZ.of(self.c * a.frac).frac

    def phi_in_lattice(self, a) -> bool:
        return self.phi(a) == 0

    def scale(self, s) -> "QLattice1":
        return QLattice1(self.q * rat(s), self.level, self.c)

    def character(self, r) -> Cyclo:
        """e(r) evaluated on the lattice: exp(2 pi i rho(r))."""
        r = QModZ.of(r)
        if self.level % r.b:
            raise ValueError(f"label {r} is not {self.level}-torsion")
        return root_of_unity(self.c * r.frac)


def _frac_gcd(x: Fraction, y: Fraction) -> Fraction:
    """Positive generator of xZ + yZ."""
    den = math.lcm(x.denominator, y.denominator)
    return Fraction(math.gcd(int(x * den), int(y * den)), den)


def commensurable_1d(l1: QLattice1, l2: QLattice1) -> bool:
    """phi_1 - phi_2 = 0 modulo q_1 Z + q_2 Z on the torsion visible at the common level.

    With equal levels this only depends on c mod N.  With different levels
    the stored representatives 0 <= c < N are lifted to the lcm.
    """
    L = math.lcm(l1.level, l2.level)
    g = _frac_gcd(l1.q, l2.q)
    delta = (l1.q * l1.c - l2.q * l2.c) / L
    return (delta / g).denominator == 1


def admissible(r, lat: QLattice1) -> bool:
    """Is r rho integral?  Decided at the lattice's level (den(r) must divide it)."""
    r = rat(r)
    if r <= 0:
        raise ValueError("ratio must be positive")
    b = r.denominator
    if lat.level % b:
        raise ValueError(f"denominator {b} does not divide the level {lat.level}")
    return lat.c % b == 0


# ---------------------------------------------------------------------------
# groupoid convolution algebra


class GroupoidFn1:
    """Finitely supported function on pairs (r, rho), r in Q*_+, r rho integral."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Fraction, CharSum] | None = None):
        self.terms = {rat(k): v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def unit(cls) -> "GroupoidFn1":
        return cls({Fraction(1): CharSum.const(1)})

    @classmethod
    def delta(cls, r, values: CharSum | None = None) -> "GroupoidFn1":
        """Supported on the ratio r; ``values`` defaults to the domain indicator."""
        r = rat(r)
        dom = CharSum.indicator(r.denominator)
        return cls({r: dom if values is None else values * dom})

    def __add__(self, other: "GroupoidFn1") -> "GroupoidFn1":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return GroupoidFn1(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "GroupoidFn1":
        return GroupoidFn1({k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GroupoidFn1):
            return groupoid_convolve(self, other)
        return self.scale(other)

    def evaluate(self, r, rho: int) -> Cyclo:
        r = rat(r)
        if r not in self.terms:
            return Cyclo.rational(0)
        return self.terms[r].evaluate(rho)

    def support(self) -> list[Fraction]:
        return sorted(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GroupoidFn1):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return "GroupoidFn1(" + ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items())) + ")"


def _check_bound(r: Fraction, bound: int | None):
    if bound is not None and (r.numerator > bound or r.denominator > bound):
        raise ValueError(f"support ratio {r} escapes the declared bound {bound}")


def groupoid_convolve(f1: GroupoidFn1, f2: GroupoidFn1, bound: int | None = None) -> GroupoidFn1:
    """(f1 * f2)(r, rho) = sum_s f1(r/s, s rho) f2(s, rho)."""
    out: dict[Fraction, CharSum] = {}
    for s, F2 in f2.terms.items():
        for t, F1 in f1.terms.items():
            r = t * s
            _check_bound(r, bound)
            val = F1.pullback(s) * F2
            out[r] = out[r] + val if r in out else val
    return GroupoidFn1(out)


def groupoid_adjoint(f: GroupoidFn1) -> GroupoidFn1:
    """f*(r, rho) = conj f(1/r, r rho); a term of f at t lands at 1/t, pulled back by 1/t."""
    return GroupoidFn1({1 / t: F.pullback(1 / t).conj() for t, F in f.terms.items()})


@functools.lru_cache(maxsize=None)
def monomial_image(n: int, r: QModZ, m: int) -> GroupoidFn1:
    """Image of mu_n e(r) mu_m^* as a product of generator images."""
    mu_n = GroupoidFn1({Fraction(n): CharSum.const(1)})
    e_r = GroupoidFn1({Fraction(1): CharSum.char(r.frac)})
    mu_m_star = GroupoidFn1({Fraction(1, m): CharSum.indicator(m)})
    return groupoid_convolve(groupoid_convolve(mu_n, e_r), mu_m_star)


def bc_image(x: BCElement) -> GroupoidFn1:
    """Image of a BC element in the groupoid convolution algebra."""
    out = GroupoidFn1()
    for mono, v in x.terms.items():
        out = out + monomial_image(mono.n, mono.r, mono.m).scale(v)
    return out


def oracle_equivalence_check(bound: int = 6) -> "Report":
    """Normal-form product vs groupoid convolution for every pair of monomials
    mu_n e(r) mu_m^* with n, m and the denominator of r at most ``bound``."""
    from .bc_system import BCElement, bc_product

    labels = sorted({QModZ.of(Fraction(a, b)) for b in range(1, bound + 1) for a in range(b)})
    monos = [
        BCElement.monomial(n, r, m)
        for n in range(1, bound + 1)
        for m in range(1, bound + 1)
        if math.gcd(n, m) == 1
        for r in labels
    ]
    images = [bc_image(x) for x in monos]
    rep = Report(f"oracle equivalence (bound {bound})")
    top = 1
    for x, fx in zip(monos, images):
        for y, fy in zip(monos, images):
            lhs = bc_image(bc_product(x, y))
            rhs = groupoid_convolve(fx, fy)
            rep.checked += 1
            top = max(top, *(F.level() for F in lhs.terms.values()), 1)
            if lhs != rhs:
                rep.fail((str(x), str(y)))
    rep.details["monomials"] = len(monos)
    rep.details["max_level"] = top
    return rep


# ---------------------------------------------------------------------------
# weight-zero functions


def _check_label(a: QModZ, lat: QLattice1):
    if lat.level % a.b:
        raise ValueError(f"label {a} needs a level divisible by {a.b}, got {lat.level}")


def e1_cayley(a, lat: QLattice1) -> Cyclo:
    """0 if phi(a) in the lattice, else (1/2)(U+1)/(U-1) with U = e(a)(lat)."""
    a = QModZ.of(a)
    _check_label(a, lat)
    if lat.phi_in_lattice(a):
        return Cyclo.rational(0, lat.level)
    U = lat.character(a).lift(lat.level)
    return ((U + 1) / (U - 1)) * Fraction(1, 2)


def e1_finite_sum(a, lat: QLattice1) -> Cyclo:
    """sum_{k=1}^{n-1} (k/n - 1/2) e(k a), n the order of a."""
    a = QModZ.of(a)
    _check_label(a, lat)
    n = a.b
    terms: dict[int, Fraction] = {}
    for k in range(1, n):
        e = (lat.c * k * a.a * (lat.level // n)) % lat.level
        terms[e] = terms.get(e, Fraction(0)) + Fraction(k, n) - Fraction(1, 2)
    return Cyclo.from_exponents(lat.level, terms)


def e1(a, lat: QLattice1) -> Cyclo:
    """e_{1,a} evaluated on a lattice; both closed forms are computed and must agree."""
    return _e1(QModZ.of(a), lat)


@functools.lru_cache(maxsize=1 << 16)
def _e1(a: QModZ, lat: QLattice1) -> Cyclo:
    x, y = e1_cayley(a, lat), e1_finite_sum(a, lat)
    if x != y:
        raise ArithmeticError(f"e1 closed forms disagree at a={a}, {lat}")
    return x


@functools.lru_cache(maxsize=None)
def pk_poly(k: int) -> sympy.Poly:
    """P_1 = u,  P_{k+1} = (1/k)(u^2 - 1/4) P_k'."""
    if k < 1:
        raise ValueError("k >= 1")
    u = sympy.Symbol("u")
    p = sympy.Poly(u, u, domain="QQ")
    for j in range(1, k):
        p = (sympy.Poly(u**2 - sympy.Rational(1, 4), u, domain="QQ") * p.diff(u)) * sympy.Rational(1, j)
    if p.eval(0) != sympy.Rational(lambda_k(k).numerator, lambda_k(k).denominator):
        raise ArithmeticError(f"P_{k}(0) differs from (2^k - 1) gamma_k")
    return p


def lambda_k(k: int) -> Fraction:
    return (2**k - 1) * gamma_k(k)


def _poly_at(p: sympy.Poly, z: Cyclo) -> Cyclo:
    acc = Cyclo.rational(0, z.level)
    for c in p.all_coeffs():
        acc = acc * z + Fraction(int(c.p), int(c.q))
    return acc


def ek(k: int, a, lat: QLattice1) -> Cyclo:
    """e_{k,a}: P_k(e_{1,a}) off the divisor, lambda_k on it."""
    return _ek(k, QModZ.of(a), lat)


@functools.lru_cache(maxsize=1 << 16)
def _ek(k: int, a: QModZ, lat: QLattice1) -> Cyclo:
    _check_label(a, lat)
    if lat.phi_in_lattice(a):
        return Cyclo.rational(lambda_k(k), lat.level)
    return _poly_at(pk_poly(k), e1(a, lat))


def pi_n(n: int, lat: QLattice1) -> int:
    """1 if phi vanishes on the n-torsion, else 0."""
    if lat.level % n:
        raise ValueError(f"{n} does not divide the level {lat.level}")
    return 1 if lat.c % n == 0 else 0


def pi_N_d(N: int, d: int, lat: QLattice1) -> int:
    """pi_{N/d} prod_{k | d, k > 1} (1 - pi_{kN/d}), read literally."""
    m = N // d
    out = pi_n(m, lat)
    for k in divisors(d):
        if k > 1:
            out *= 1 - pi_n(k * m, lat)
    return out


# ---------------------------------------------------------------------------
# level functions and relation checks


@dataclass(frozen=True)
class LevelFn:
    """A function of c in Z/M with values in a cyclotomic field."""

    level: int
    values: tuple

    def __call__(self, c: int) -> Cyclo:
        return self.values[c % self.level]

    def lift(self, level: int) -> "LevelFn":
        if level % self.level:
            raise ValueError("can only lift to a multiple of the level")
        return LevelFn(level, tuple(self.values[c % self.level] for c in range(level)))

    def __mul__(self, other: "LevelFn") -> "LevelFn":
        L = math.lcm(self.level, other.level)
        return LevelFn(L, tuple(self(c) * other(c) for c in range(L)))

    def __eq__(self, other):
        if not isinstance(other, LevelFn):
            return NotImplemented
        L = math.lcm(self.level, other.level)
        return all(self(c) == other(c) for c in range(L))

    __hash__ = None  # type: ignore[assignment]


def level_fn(level: int, fn: Callable[[QLattice1], object]) -> LevelFn:
    vals = []
    for c in range(level):
        v = fn(QLattice1(1, level, c))
        vals.append(v if isinstance(v, Cyclo) else Cyclo.rational(v))
    return LevelFn(level, tuple(vals))


@dataclass
class Report:
    name: str
    ok: bool = True
    checked: int = 0
    witness: object = None
    details: dict = field(default_factory=dict)

    def fail(self, witness):
        if self.ok:
            self.ok = False
            self.witness = witness

    def __bool__(self):
        return self.ok


def check_div_rel(N: int, k: int) -> Report:
    """sum_{Na=0} e_{k,a} = gamma_k sum_{d|N} ((2^k-2) f_1(d) + N^k f_{1-k}(d)) pi_d, for every c."""
    rep = Report(f"div_rel N={N} k={k}")
    g = gamma_k(k)
    for c in range(N):
        lat = QLattice1(1, N, c)
        lhs = Cyclo.rational(0, N)
        for j in range(N):
            lhs = lhs + ek(k, Fraction(j, N), lat)
        rhs = g * sum(((2**k - 2) * f_j(1, d) + Fraction(N) ** k * f_j(1 - k, d)) * pi_n(d, lat) for d in divisors(N))
        rep.checked += 1
        if lhs != Cyclo.rational(rhs):
            rep.fail((N, k, c))
    return rep


def check_div1(N: int, k: int, x, level: int | None = None, corrected: bool | None = None) -> Report:
    """(1/N) sum_{Na=0} e_{k,x+a} against the pi(N,d)-weighted right side, for every c.

    Odd k uses the plain form; even k (or ``corrected=True``) the form with the
    (1 - pi_{delta(dx)}) factor and the extra gamma_k term.
    """
    x = QModZ.of(x)
    M = math.lcm(N, x.b) if level is None else level
    if M % N or M % x.b:
        raise ValueError("level must be divisible by N and the order of x")
    corrected = (k % 2 == 0) if corrected is None else corrected
    rep = Report(f"div1 N={N} k={k} x={x} level={M}" + (" corrected" if corrected else ""))
    g = gamma_k(k)
    for c in range(M):
        lat = QLattice1(1, M, c)
        lhs = Cyclo.rational(0, M)
        for j in range(N):
            lhs = lhs + ek(k, x + Fraction(j, N), lat)
        lhs = lhs * Fraction(1, N)
        rhs = Cyclo.rational(0, M)
        for d in divisors(N):
            w = pi_N_d(N, d, lat)
            if not w:
                continue
            dx = x * d
            if corrected:
                p = pi_n(dx.b, lat)
                rhs = rhs + ek(k, dx, lat) * ((1 - p) * Fraction(d) ** (k - 1))
                rhs = rhs + g * (Fraction(d) ** (k - 1) + Fraction(2**k - 2, d)) * p
            else:
                rhs = rhs + ek(k, dx, lat) * Fraction(d) ** (k - 1)
        rep.checked += 1
        if lhs != rhs:
            rep.fail((N, k, str(x), M, c))
    return rep


def pi2_identity() -> Report:
    """pi_2 = 3 + 2 sum_{4a=0} e_{2,a} on all c in Z/4."""
    rep = Report("pi2 identity")
    for c in range(4):
        lat = QLattice1(1, 4, c)
        s = Cyclo.rational(0, 4)
        for j in range(4):
            s = s + ek(2, Fraction(j, 4), lat)
        rep.checked += 1
        rep.details[c] = str(s.rational_value()) if s.is_rational() else repr(s)
        if s * 2 + 3 != Cyclo.rational(pi_n(2, lat)):
            rep.fail(c)
    return rep


def _rational_coords(f: LevelFn, K: int) -> list[Fraction]:
    out: list[Fraction] = []
    for c in range(f.level):
        out.extend(f(c).lift(K).coeffs)
    return out


class _Echelon:
    """Incrementally maintained row-echelon basis over Q."""

    def __init__(self):
        self.rows: list[tuple[int, list[Fraction]]] = []

    def reduce(self, v: list[Fraction]) -> list[Fraction]:
        v = list(v)
        for piv, row in self.rows:
            if v[piv]:
                c = v[piv]
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def add(self, v: list[Fraction]) -> bool:
        v = self.reduce(v)
        piv = next((i for i, a in enumerate(v) if a), None)
        if piv is None:
            return False
        inv = 1 / v[piv]
        v = [a * inv for a in v]
        self.rows = [(p, [a - r[piv] * b for a, b in zip(r, v)]) for p, r in self.rows]
        self.rows.append((piv, v))
        return True

    def contains(self, v: list[Fraction]) -> bool:
        return not any(self.reduce(v))

    def __len__(self):
        return len(self.rows)


def _product_closure(gens: list[LevelFn], level: int) -> tuple[_Echelon, int]:
    ech = _Echelon()
    one = level_fn(level, lambda lat: 1)
    ech.add(_rational_coords(one, level))
    frontier = [one]
    while frontier:
        new = []
        for f in frontier:
            for g in gens:
                h = f * g
                if ech.add(_rational_coords(h, level)):
                    new.append(h)
        frontier = new
    return ech, len(ech)


def span_check(N: int, generator_torsion: int | None = None) -> Report:
    """Products of e_{1,a} span the characters e(r), N r = 0, over Q.

    Functions of c are flattened to rational vectors through the canonical
    basis of the cyclotomic field.  For even N the N-torsion generators are
    not enough (for N = 2 they vanish identically), so by default the
    generators range over the 2N-torsion, as needed to reach pi_{2^b}.  The
    rank obtained with N-torsion generators alone is kept in the details.
    """
    T = generator_torsion or (2 * N if N % 2 == 0 else N)
    if T % N:
        raise ValueError("generator torsion must be a multiple of N")
    rep = Report(f"span N={N} generators {T}-torsion")
    literal = [level_fn(N, functools.partial(e1, Fraction(j, N))) for j in range(1, N)]
    rep.details["literal_rank"] = _product_closure(literal, N)[1]
    gens = [level_fn(T, functools.partial(e1, Fraction(j, T))) for j in range(1, T)]
    ech, dim = _product_closure(gens, T)
    rep.details["algebra_dim"] = dim
    targets = _Echelon()
    for j in range(N):
        ej = level_fn(T, lambda lat, j=j: lat.character(Fraction(j, N)))
        v = _rational_coords(ej, T)
        rep.checked += 1
        targets.add(v)
        if not ech.contains(v):
            rep.fail(f"e({j}/{N}) not in span")
    rep.details["rank"] = len(targets)
    if len(targets) != N:
        rep.fail(f"rank {len(targets)} != {N}")
    return rep


def alpha_n_action(n: int, f: LevelFn) -> LevelFn:
    """alpha_n(f)(rho) = f(rho/n) where n | rho, and 0 elsewhere; level M becomes nM."""
    M = f.level
    zero = Cyclo.rational(0)
    return LevelFn(n * M, tuple(f(c // n) if c % n == 0 else zero for c in range(n * M)))


def muepsilon_check(n: int, k: int, a, level: int) -> Report:
    """alpha_n(e_{k,a}) = pi_n e_{k,b} for every b with n b = a."""
    a = QModZ.of(a)
    rep = Report(f"alpha_{n}(e_{k},{a}) level={level}")
    lhs = alpha_n_action(n, level_fn(level, lambda lat: ek(k, a, lat)))
    L = lhs.level
    for b in a.divisions(n):
        if L % b.b:
            raise ValueError("level too small for the division points")
        rhs = level_fn(L, lambda lat, b=b: ek(k, b, lat) * pi_n(n, lat))
        rep.checked += 1
        if lhs != rhs:
            rep.fail(str(b))
    return rep
