"""Rank-two lattice combinatorics.

Finite-index sublattices of Z^2 are kept in column Hermite form: the
columns (a, 0) and (b, d) with 0 <= b < a.  Rational 2x2 matrices are
tuples of rows of Fractions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .numkit import divisor_sigma, divisors, prime_factors, rat

__all__ = [
    "Mat2",
    "mat",
    "mat_mul",
    "mat_inv",
    "mat_det",
    "mat_apply",
    "is_integral",
    "Sublattice",
    "hnf",
    "meet",
    "rational_meet",
    "enumerate_index",
    "enumerate_SN",
    "in_SN",
    "subgroup_count_bruteforce",
    "MuSymbol",
    "mu_product",
    "mu_adjoint",
    "left_coset_reps",
    "double_coset_reps",
    "omega",
    "omega_ab",
    "omega_ab_table",
    "sl2_order",
    "sl2_elements",
    "smith_diagonal",
]

Mat2 = tuple  # ((a, b), (c, d)) with Fraction entries


def mat(rows) -> Mat2:
    (a, b), (c, d) = rows
    return ((rat(a), rat(b)), (rat(c), rat(d)))


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def mat_det(x: Mat2) -> Fraction:
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def mat_inv(x: Mat2) -> Mat2:
    D = mat_det(x)
    if D == 0:
        raise ValueError("singular matrix")
    return ((x[1][1] / D, -x[0][1] / D), (-x[1][0] / D, x[0][0] / D))


def mat_apply(x: Mat2, v) -> tuple:
    return (x[0][0] * v[0] + x[0][1] * v[1], x[1][0] * v[0] + x[1][1] * v[1])


def is_integral(x: Mat2) -> bool:
    return all(Fraction(e).denominator == 1 for row in x for e in row)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s a + t b = g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


@dataclass(frozen=True, order=True)
class Sublattice:
    """Z-span of the columns (a, 0) and (b, d), with 0 <= b < a."""

    a: int
    b: int
    d: int

    def __post_init__(self):
        if self.a < 1 or self.d < 1 or not 0 <= self.b < self.a:
            raise ValueError(f"({self.a}, {self.b}, {self.d}) is not in Hermite form")

    @property
    def index(self) -> int:
        return self.a * self.d

    @property
    def basis(self) -> Mat2:
        return ((Fraction(self.a), Fraction(self.b)), (Fraction(0), Fraction(self.d)))

    def __contains__(self, v) -> bool:
        x, y = rat(v[0]), rat(v[1])
        if x.denominator != 1 or y.denominator != 1 or y % self.d:
            return False
        return (x - (y // self.d) * self.b) % self.a == 0

    def is_diagonal(self) -> bool:
        return self.b == 0

    @classmethod
    def full(cls) -> "Sublattice":
        return cls(1, 0, 1)

    def __str__(self):
        return f"L[{self.a},{self.b};0,{self.d}]"


def _column_hnf(cols: Sequence[tuple[int, int]]) -> tuple[int, int, int]:
    ys = [int(c[1]) for c in cols]
    d = 0
    for y in ys:
        d = math.gcd(d, y)
    if d == 0:
        raise ValueError("generators do not span a full-rank lattice")
    # combination v with second coordinate d
    v = (0, 0)
    for x, y in cols:
        g, s, t = _ext_gcd(v[1], int(y))
        v = (s * v[0] + t * int(x), g)
    a = 0
    for x, y in cols:
        a = math.gcd(a, int(x) - (int(y) // d) * v[0])
    a = math.gcd(a, 0)
    if a == 0:
        raise ValueError("generators do not span a full-rank lattice")
    return a, v[0] % a, d


def hnf(m) -> Sublattice:
    """Canonical form of the lattice spanned by the columns of an integer matrix (2 x k)."""
    rows = [list(r) for r in m]
    if len(rows) != 2:
        raise ValueError("expected two rows")
    cols = list(zip(rows[0], rows[1]))
    if any(Fraction(e).denominator != 1 for c in cols for e in c):
        raise ValueError("hnf expects integer entries")
    cols = [(int(x), int(y)) for x, y in cols]
    if len(cols) == 2 and cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0] == 0:
        raise ValueError("singular matrix")
    return Sublattice(*_column_hnf(cols))


def _rational_hnf_basis(cols: Iterable[tuple[Fraction, Fraction]]) -> tuple[Mat2, int]:
    cols = [(rat(x), rat(y)) for x, y in cols]
    D = math.lcm(1, *(e.denominator for c in cols for e in c))
    a, b, d = _column_hnf([(int(x * D), int(y * D)) for x, y in cols])
    return ((Fraction(a, D), Fraction(b, D)), (Fraction(0), Fraction(d, D))), D


def _columns(B: Mat2):
    return [(B[0][0], B[1][0]), (B[0][1], B[1][1])]


def _dual(B: Mat2) -> Mat2:
    inv = mat_inv(B)
    return ((inv[0][0], inv[1][0]), (inv[0][1], inv[1][1]))  # transpose


def rational_meet(B1: Mat2, B2: Mat2) -> Mat2:
    """Basis of B1 Z^2 intersected with B2 Z^2, via (L1* + L2*)*."""
    dual_sum, _ = _rational_hnf_basis(_columns(_dual(B1)) + _columns(_dual(B2)))
    out, _ = _rational_hnf_basis(_columns(_dual(dual_sum)))
    return out


def _as_sublattice(B: Mat2) -> Sublattice:
    if not is_integral(B):
        raise ValueError("lattice is not contained in Z^2")
    return hnf([[int(B[0][0]), int(B[0][1])], [int(B[1][0]), int(B[1][1])]])


def meet(L1: Sublattice, L2: Sublattice) -> Sublattice:
    """L1 intersected with L2."""
    return _as_sublattice(rational_meet(L1.basis, L2.basis))


def enumerate_index(n: int) -> list[Sublattice]:
    """All sublattices of index n, sigma_1(n) of them."""
    return [Sublattice(a, b, n // a) for a in divisors(n) for b in range(a)]


def in_SN(L: Sublattice, N: int) -> bool:
    """N Z^2 contained in L:  a | N, d | N, a | N b / d."""
    return N % L.a == 0 and N % L.d == 0 and ((N // L.d) * L.b) % L.a == 0


def enumerate_SN(N: int) -> list[Sublattice]:
    return [L for n in divisors(N * N) for L in enumerate_index(n) if in_SN(L, N)]


def subgroup_count_bruteforce(N: int) -> int:
    """Number of subgroups of (Z/N)^2, by closing every pair of elements."""
    elems = [(x, y) for x in range(N) for y in range(N)]
    seen = set()
    for u, v in itertools.combinations_with_replacement(elems, 2):
        H = frozenset(((i * u[0] + j * v[0]) % N, (i * u[1] + j * v[1]) % N) for i in range(N) for j in range(N))
        seen.add(H)
    return len(seen)


# ---------------------------------------------------------------------------
# partial isometries mu(g, L)


@dataclass(frozen=True)
class MuSymbol:
    """mu(g, L) with g in GL2+(Q) and g(L) inside Z^2."""

    g: Mat2
    L: Sublattice

    def __post_init__(self):
        g = mat(self.g)
        object.__setattr__(self, "g", g)
        if mat_det(g) <= 0:
            raise ValueError("g must have positive determinant")
        if not is_integral(mat_mul(g, self.L.basis)):
            raise ValueError(f"g({self.L}) is not contained in Z^2")


def mu_product(x: MuSymbol, y: MuSymbol) -> MuSymbol:
    """mu(g1, L1) mu(g2, L2) = mu(g1 g2, g2^-1(L1) meet L2)."""
    pre = mat_mul(mat_inv(y.g), x.L.basis)
    B = rational_meet(pre, y.L.basis)
    try:
        L = _as_sublattice(B)
    except ValueError as exc:
        raise ValueError(f"cannot compose {x} and {y}: {exc}") from None
    return MuSymbol(mat_mul(x.g, y.g), L)


def mu_adjoint(x: MuSymbol) -> MuSymbol:
    """mu(g, L)^* = mu(g^-1, g(L))."""
    return MuSymbol(mat_inv(x.g), _as_sublattice(mat_mul(x.g, x.L.basis)))


# ---------------------------------------------------------------------------
# cosets of the modular group


def left_coset_reps(n: int) -> list[Mat2]:
    """Representatives [[a, b], [0, d]], ad = n, 0 <= b < d, of SL2(Z) \\ {det n}."""
    return [mat([[a, b], [0, n // a]]) for a in divisors(n) for b in range(n // a)]


def double_coset_reps(n: int) -> list[Mat2]:
    """Left cosets inside the primitive double coset of diag(1, n): gcd(a, b, d) = 1."""
    return [m for m in left_coset_reps(n) if math.gcd(math.gcd(int(m[0][0]), int(m[0][1])), int(m[1][1])) == 1]


def omega(n: int) -> int:
    """n prod_{p | n} (1 + 1/p)."""
    out = Fraction(n)
    for p in prime_factors(n):
        out *= 1 + Fraction(1, p)
    return int(out)


def omega_ab(p: int, l: int, a: int, b: int) -> int:
    """Cosets h of Gamma diag(p^-l, 1) Gamma with h diag(p^a, p^b) integral, by enumeration."""
    n = p**l
    count = 0
    for m in double_coset_reps(n):
        prod = mat_mul(m, mat([[p**a, 0], [0, p**b]]))
        if all(int(e) % n == 0 for row in prod for e in row):
            count += 1
    return count


def omega_ab_table(p: int, l: int, a: int, b: int) -> int:
    """0 if b < l; p^a if a < l <= b; p^l (1 + 1/p) if a >= l."""
    if b < l:
        return 0
    if a < l:
        return p**a
    return int(p**l * (1 + Fraction(1, p)))


def sl2_order(N: int) -> int:
    """|SL2(Z/N)| = N^3 prod_{p | N} (1 - p^-2)."""
    out = Fraction(N) ** 3
    for p in prime_factors(N):
        out *= 1 - Fraction(1, p * p)
    return int(out)


def sl2_elements(N: int) -> list[tuple[int, int, int, int]]:
    """All (a, b, c, d) mod N with ad - bc = 1 mod N."""
    rng = range(N)
    return [(a, b, c, d) for a in rng for b in rng for c in rng for d in rng if (a * d - b * c - 1) % N == 0]


def smith_diagonal(m: Mat2) -> tuple[int, int]:
    """Elementary divisors (d1, d2), d1 | d2, of a nonsingular integer matrix."""
    if not is_integral(m):
        raise ValueError("integer matrix expected")
    d1 = math.gcd(math.gcd(int(m[0][0]), int(m[0][1])), math.gcd(int(m[1][0]), int(m[1][1])))
    D = abs(int(mat_det(m)))
    if D == 0:
        raise ValueError("singular matrix")
    return d1, D // d1
