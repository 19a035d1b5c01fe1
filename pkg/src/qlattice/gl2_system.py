"""The GL2 system at finite level.

An element of the convolution algebra is a finite sum over left cosets
Gamma g (g in GL2+(Q)) of functions of rho in M2(Z/N).  Coefficients do
not depend on tau.  Coset keys are the upper-triangular row Hermite form
(a, b, d), 0 <= b < d, of the coset.  The value at (g, rho) is zero unless
g rho is integral; for g = A/k that only depends on rho mod k, so levels
are always multiples of the denominators involved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np
import sympy

from .lat2d import (
    Mat2,
    Sublattice,
    double_coset_reps,
    hnf,
    is_integral,
    mat,
    mat_det,
    mat_inv,
    mat_mul,
    sl2_elements,
    sl2_order,
)
from .numkit import divisors, rat, sigma1_tail_bound, zeta

__all__ = [
    "QLattice2Level",
    "QLattice2",
    "commensurable_2d",
    "coset_key",
    "key_matrix",
    "GL2Element",
    "convolve",
    "adjoint",
    "hecke_T",
    "hecke_embed",
    "hecke_twisted",
    "classical_hecke_product",
    "double_coset_left_reps",
    "ProjOp",
    "KMSResult",
    "kms_state_eval",
    "proba_closed_forms",
    "sigma_closed_form",
    "sigma_recursion_check",
    "equi_distribution",
    "symmetry_right",
    "endo_theta",
    "e_L_indicator",
    "inner_check",
    "sigma_eigenvalues",
    "galois_covariance_check",
]


# ---------------------------------------------------------------------------
# Q-lattices


def _mod_matrix(rho, N: int) -> tuple[int, int, int, int]:
    if len(rho) == 2:
        (a, b), (c, d) = rho
    else:
        a, b, c, d = rho
    return (int(a) % N, int(b) % N, int(c) % N, int(d) % N)


@dataclass(frozen=True)
class QLattice2Level:
    """Level-N datum (rho mod N, tau): Lambda = Z + tau Z, phi(x) = rho_1(x) - tau rho_2(x)."""

    level: int
    rho: tuple
    tau: complex = 1j

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        if complex(self.tau).imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        object.__setattr__(self, "rho", _mod_matrix(self.rho, self.level))

    @property
    def det(self) -> int:
        a, b, c, d = self.rho
        return (a * d - b * c) % self.level

    def is_invertible(self) -> bool:
        return math.gcd(self.det, self.level) == 1

    def phi(self, a) -> complex:
        """phi(a) for a = (a1, a2) in (1/N)Z^2 / Z^2, a representative in C."""
        a1, a2 = rat(a[0]), rat(a[1])
        r11, r12, r21, r22 = self.rho
        x1 = r11 * a1 + r12 * a2
        x2 = r21 * a1 + r22 * a2
        return float(x1 % 1) - complex(self.tau) * float(x2 % 1)

    def phi_coords(self, a) -> tuple[Fraction, Fraction]:
        """(rho a) mod Z^2, i.e. phi(a) in the basis (1, -tau)."""
        a1, a2 = rat(a[0]), rat(a[1])
        r11, r12, r21, r22 = self.rho
        return ((r11 * a1 + r12 * a2) % 1, (r21 * a1 + r22 * a2) % 1)


@dataclass(frozen=True)
class QLattice2:
    """(B Z^2, x -> B rho x) in the coordinates of the basis (1, -tau); rho mod N."""

    basis: Mat2
    level: int
    rho: tuple

    def __init__(self, basis, level: int, rho):
        object.__setattr__(self, "basis", mat(basis))
        if mat_det(self.basis) == 0:
            raise ValueError("basis must be nonsingular")
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "rho", _mod_matrix(rho, level))


def _rational_sum_basis(B1: Mat2, B2: Mat2) -> Mat2:
    from .lat2d import _rational_hnf_basis, _columns

    return _rational_hnf_basis(_columns(B1) + _columns(B2))[0]


def commensurable_2d(x: QLattice2, y: QLattice2) -> bool:
    """phi_1 - phi_2 vanishes modulo Lambda_1 + Lambda_2 on the N-torsion."""
    if x.level != y.level:
        raise ValueError(f"incompatible levels {x.level} and {y.level}")
    N = x.level
    S = _rational_sum_basis(x.basis, y.basis)
    Sinv = mat_inv(S)
    r1 = ((x.rho[0], x.rho[1]), (x.rho[2], x.rho[3]))
    r2 = ((y.rho[0], y.rho[1]), (y.rho[2], y.rho[3]))
    diff = [[(p - q) / N for p, q in zip(ra, rb)] for ra, rb in zip(mat_mul(x.basis, mat(r1)), mat_mul(y.basis, mat(r2)))]
    coords = mat_mul(Sinv, mat(diff))
    return is_integral(coords)


# ---------------------------------------------------------------------------
# cosets


def coset_key(g: Mat2) -> tuple[Fraction, Fraction, Fraction]:
    """Row Hermite form (a, b, d) of Gamma g: [[a, b], [0, d]], a, d > 0, 0 <= b < d."""
    g = mat(g)
    if mat_det(g) <= 0:
        raise ValueError("positive determinant required")
    k = math.lcm(*(e.denominator for row in g for e in row))
    (p, q), (r, s) = ((int(e * k) for e in row) for row in g)
    from .lat2d import _ext_gcd

    gg, u, v = _ext_gcd(p, r)
    # [[u, v], [-r/gg, p/gg]] has determinant one and kills the lower-left entry
    top = (gg, u * q + v * s)
    bottom = (0, (-r // gg) * q + (p // gg) * s)
    d = bottom[1]
    b = top[1] % d
    return (Fraction(gg, k), Fraction(b, k), Fraction(d, k))


def key_matrix(key) -> Mat2:
    a, b, d = key
    return ((Fraction(a), Fraction(b)), (Fraction(0), Fraction(d)))


def _den(g: Mat2) -> int:
    return math.lcm(*(Fraction(e).denominator for row in g for e in row))


def double_coset_left_reps(g: Mat2) -> list[Mat2]:
    """Left coset representatives of Gamma g Gamma (g rational, det > 0)."""
    g = mat(g)
    D = _den(g)
    A = tuple(tuple(int(e * D) for e in row) for row in g)
    e1 = math.gcd(math.gcd(A[0][0], A[0][1]), math.gcd(A[1][0], A[1][1]))
    n = int(mat_det(mat(A))) // (e1 * e1)
    return [tuple(tuple(e * e1 / D for e in row) for row in m) for m in double_coset_reps(n)]


# ---------------------------------------------------------------------------
# the convolution algebra


_GRIDS: dict[int, np.ndarray] = {}


def _grid(M: int) -> np.ndarray:
    """Integer array of shape (4, M, M, M, M): the entries of every rho mod M."""
    if M not in _GRIDS:
        _GRIDS[M] = np.indices((M, M, M, M), dtype=np.int64)
    return _GRIDS[M]


def _left_action(g: Mat2, M: int, N: int):
    """(mask, index) for rho mod M -> g rho: mask = [g rho integral], index = g rho mod N."""
    k = _den(g)
    if M % (k * N):
        raise ValueError(f"level {M} cannot resolve g rho mod {N}")
    A = [[int(e * k) for e in row] for row in g]
    R = _grid(M)
    P = (
        A[0][0] * R[0] + A[0][1] * R[2],
        A[0][0] * R[1] + A[0][1] * R[3],
        A[1][0] * R[0] + A[1][1] * R[2],
        A[1][0] * R[1] + A[1][1] * R[3],
    )
    mask = np.ones(R.shape[1:], dtype=bool)
    for x in P:
        mask &= x % k == 0
    idx = tuple((x // k) % N for x in P)
    return mask, idx


def _lift_array(F: np.ndarray, N: int, M: int) -> np.ndarray:
    if N == M:
        return F
    if M % N:
        raise ValueError("can only lift to a multiple of the level")
    R = _grid(M) % N
    return F[R[0], R[1], R[2], R[3]]


def _zero_array(M: int) -> np.ndarray:
    out = np.empty((M, M, M, M), dtype=object)
    out.fill(Fraction(0))
    return out


def _const_array(M: int, c) -> np.ndarray:
    out = np.empty((M, M, M, M), dtype=object)
    out.fill(rat(c))
    return out


def _is_zero(F: np.ndarray) -> bool:
    return not any(F.flat)


class GL2Element:
    """Finite sum over Gamma-cosets of level-N functions of rho (tau-constant)."""

    __slots__ = ("level", "terms")

    def __init__(self, level: int, terms: Mapping | None = None):
        self.level = level
        out = {}
        for key, F in (terms or {}).items():
            F = np.asarray(F, dtype=object)
            if F.shape != (level,) * 4:
                raise ValueError(f"coefficient for {key} has shape {F.shape}, expected level {level}")
            if not _is_zero(F):
                out[tuple(Fraction(x) for x in key)] = F
        self.terms = out

    # constructors
    @classmethod
    def unit(cls) -> "GL2Element":
        return cls(1, {(1, 0, 1): _const_array(1, 1)})

    @classmethod
    def from_rho_function(cls, level: int, fn: Callable[[tuple[int, int, int, int]], object], check: bool = True) -> "GL2Element":
        """Element supported on Gamma with coefficient rho -> fn(rho); fn must be SL2-invariant."""
        F = _zero_array(level)
        for idx in itertools.product(range(level), repeat=4):
            F[idx] = rat(fn(idx))
        el = cls(level, {(1, 0, 1): F})
        if check and not el.is_invariant():
            raise ValueError("coefficient is not invariant under the left action of SL2")
        return el

    @classmethod
    def averaged(cls, level: int, fn: Callable[[tuple[int, int, int, int]], object]) -> "GL2Element":
        """Supported on Gamma, coefficient averaged over SL2(Z/N) acting on the left."""
        G = sl2_elements(level)
        F = _zero_array(level)
        base = {idx: rat(fn(idx)) for idx in itertools.product(range(level), repeat=4)}
        for idx in base:
            r11, r12, r21, r22 = idx
            acc = Fraction(0)
            for a, b, c, d in G:
                acc += base[((a * r11 + b * r21) % level, (a * r12 + b * r22) % level, (c * r11 + d * r21) % level, (c * r12 + d * r22) % level)]
            F[idx] = acc / len(G)
        return cls(level, {(1, 0, 1): F})

    # linear structure
    def lift(self, M: int) -> "GL2Element":
        return GL2Element(M, {k: _lift_array(F, self.level, M) for k, F in self.terms.items()})

    def __add__(self, other: "GL2Element") -> "GL2Element":
        M = math.lcm(self.level, other.level)
        a, b = self.lift(M), other.lift(M)
        out = dict(a.terms)
        for k, F in b.terms.items():
            out[k] = out[k] + F if k in out else F
        return GL2Element(M, out)

    def scale(self, c) -> "GL2Element":
        c = rat(c)
        return GL2Element(self.level, {k: F * c for k, F in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        if isinstance(other, GL2Element):
            return convolve(self, other)
        return self.scale(other)

    @property
    def star(self) -> "GL2Element":
        return adjoint(self)

    def coefficient(self, g) -> np.ndarray:
        key = coset_key(g)
        return self.terms.get(key, _zero_array(self.level))

    def value(self, g, rho) -> Fraction:
        r = _mod_matrix(rho, self.level)
        return self.coefficient(g)[r]

    def support(self) -> list:
        return sorted(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GL2Element):
            return NotImplemented
        M = math.lcm(self.level, other.level)
        a, b = self.lift(M), other.lift(M)
        if set(a.terms) != set(b.terms):
            return False
        return all(np.array_equal(a.terms[k], b.terms[k]) for k in a.terms)

    __hash__ = None  # type: ignore[assignment]

    def is_invariant(self) -> bool:
        """f(g gamma, rho) = f(g, gamma rho) for gamma in {S, T, T^-1}."""
        N = self.level
        gens = [((0, -1), (1, 0)), ((1, 1), (0, 1)), ((1, -1), (0, 1))]
        for key, F in self.terms.items():
            G = key_matrix(key)
            for gam in gens:
                gam = mat(gam)
                moved = self.terms.get(coset_key(mat_mul(G, gam)))
                _, idx = _left_action(gam, N, N)
                lhs = moved if moved is not None else _zero_array(N)
                if not np.array_equal(lhs, F[idx]):
                    return False
        return True

    def domain_ok(self) -> bool:
        """Every coefficient vanishes where g rho is not integral."""
        for key, F in self.terms.items():
            g = key_matrix(key)
            k = _den(g)
            if self.level % k:
                return False
            mask, _ = _left_action(g, self.level, 1)
            if any(F[~mask].flat):
                return False
        return True

    def __repr__(self):
        return f"GL2Element(level={self.level}, support={[tuple(str(x) for x in k) for k in self.support()]})"


def convolve(f1: GL2Element, f2: GL2Element) -> GL2Element:
    """(f1 * f2)(g, rho) = sum_h f1(g h^-1, h rho) f2(h, rho) over h rho integral.

    The output level is the smallest common multiple that resolves every
    h rho mod N1; inputs of different levels are lifted rather than rejected.
    """
    N1, N2 = f1.level, f2.level
    M = N2
    for key in f2.terms:
        M = math.lcm(M, _den(key_matrix(key)) * N1)
    out: dict = {}
    for hkey, F2 in f2.terms.items():
        h = key_matrix(hkey)
        mask, idx = _left_action(h, M, N1)
        F2M = _lift_array(F2, N2, M)
        for tkey, F1 in f1.terms.items():
            val = np.where(mask, F1[idx], Fraction(0)) * F2M
            g = coset_key(mat_mul(key_matrix(tkey), h))
            out[g] = out[g] + val if g in out else val
    return GL2Element(M, out)


def adjoint(f: GL2Element) -> GL2Element:
    """f^*(g, rho) = f(g^-1, g rho) (coefficients are rational)."""
    N = f.level
    reps: dict = {}
    done = set()
    for key in f.terms:
        inv = mat_inv(key_matrix(key))
        for g in double_coset_left_reps(inv):
            gk = coset_key(g)
            if gk in done:
                continue
            done.add(gk)
            src = coset_key(mat_inv(g))
            if src in f.terms:
                reps[gk] = (g, src)
    M = N
    for g, _ in reps.values():
        M = math.lcm(M, _den(g) * N)
    out = {}
    for gk, (g, src) in reps.items():
        mask, idx = _left_action(g, M, N)
        out[gk] = np.where(mask, f.terms[src][idx], Fraction(0))
    return GL2Element(M, out)


# ---------------------------------------------------------------------------
# Hecke operators


def hecke_T(n: int) -> dict:
    """T_n: every double coset of determinant n, coefficient 1."""
    return {(d1, n // d1): Fraction(1) for d1 in divisors(n) if (n // d1) % d1 == 0}


def _double_coset_cosets(d1: int, d2: int) -> list[Mat2]:
    return [tuple(tuple(e * d1 for e in row) for row in m) for m in double_coset_reps(d2 // d1)]


def hecke_embed(c: Mapping) -> GL2Element:
    """A bi-invariant function on integer matrices, as an element of level 1."""
    terms = {}
    for (d1, d2), v in c.items():
        if d2 % d1:
            raise ValueError("elementary divisors must satisfy d1 | d2")
        for m in _double_coset_cosets(d1, d2):
            terms[coset_key(m)] = _const_array(1, v)
    return GL2Element(1, terms)


def hecke_twisted(c: Mapping, level: int, phi: Callable[[tuple], object]) -> GL2Element:
    """f(g, rho) = c(Gamma g Gamma) phi(g rho mod N) with phi made SL2-invariant by averaging."""
    base = GL2Element.averaged(level, phi).terms.get((1, 0, 1), _zero_array(level))
    terms = {}
    for (d1, d2), v in c.items():
        for m in _double_coset_cosets(d1, d2):
            _, idx = _left_action(m, level, level)
            terms[coset_key(m)] = base[idx] * rat(v)
    return GL2Element(level, terms)


def _smith(m: Mat2) -> tuple[int, int]:
    e1 = math.gcd(math.gcd(int(m[0][0]), int(m[0][1])), math.gcd(int(m[1][0]), int(m[1][1])))
    return e1, int(mat_det(m)) // e1


def classical_hecke_product(c1: Mapping, c2: Mapping) -> dict:
    """Product of bi-invariant functions: (f1 f2)(g) = sum_h f1(g h^-1) f2(h) over integral g h^-1."""
    dets = {a * b * c * d for a, b in c1 for c, d in c2}
    out: dict = {}
    for n in sorted(dets):
        for e1 in divisors(n):
            if (n // e1) % e1:
                continue
            g = mat([[e1, 0], [0, n // e1]])
            acc = Fraction(0)
            for (a, b), v2 in c2.items():
                for h in _double_coset_cosets(a, b):
                    q = mat_mul(g, mat_inv(h))
                    if is_integral(q):
                        acc += rat(c1.get(_smith(q), 0)) * rat(v2)
            if acc:
                out[(e1, n // e1)] = acc
    return out


# ---------------------------------------------------------------------------
# projections and the KMS states


def _vp(x: np.ndarray, p: int, cap: int) -> np.ndarray:
    v = np.zeros(x.shape, dtype=np.int64)
    for t in range(1, cap + 1):
        v += (x % p**t == 0)
    return v


@dataclass(frozen=True)
class ProjOp:
    """Divisibility projections of Q-lattices at a prime or an integer.

    kind 'pi' (n): n divides rho;  'pid' (n): n divides det rho;
    'e' (p, i, j): elementary divisors p^a | p^b of rho with a >= i, b >= j;
    'pip' (p, k, l): the difference combination of 'e' terms;
    'prod': a product of other projections.
    """

    kind: str
    args: tuple
    factors: tuple = ()

    @classmethod
    def pi(cls, n: int) -> "ProjOp":
        return cls("pi", (n,))

    @classmethod
    def pi_det(cls, n: int) -> "ProjOp":
        return cls("pid", (n,))

    @classmethod
    def e(cls, p: int, i: int, j: int) -> "ProjOp":
        if not 0 <= i <= j:
            raise ValueError("need 0 <= i <= j")
        return cls("e", (p, i, j))

    @classmethod
    def pi_p(cls, p: int, k: int, l: int) -> "ProjOp":
        if not 0 <= k <= l:
            raise ValueError("need 0 <= k <= l")
        return cls("pip", (p, k, l))

    @classmethod
    def product(cls, *ops: "ProjOp") -> "ProjOp":
        return cls("prod", (), tuple(ops))

    def expand(self) -> dict:
        """pi_p(k, l) as a signed sum of e_p terms."""
        if self.kind == "e":
            return {self.args: 1}
        if self.kind != "pip":
            raise ValueError("only e_p and pi_p expand into e_p terms")
        p, i, j = self.args
        if i < j:
            return {(p, i, j): 1, (p, i + 1, j): -1, (p, i, j + 1): -1, (p, i + 1, j + 1): 1}
        return {(p, j, j): 1, (p, j, j + 1): -1}

    @property
    def level(self) -> int:
        if self.kind in ("pi", "pid"):
            return self.args[0]
        if self.kind == "e":
            p, i, j = self.args
            return p ** max(i, 2 * j, 1)
        if self.kind == "pip":
            return math.lcm(*(ProjOp.e(*t).level for t in self.expand()))
        return math.lcm(1, *(f.level for f in self.factors))

    def evaluate(self, R: np.ndarray) -> np.ndarray:
        """Values on integer matrices R of shape (4, ...) (entries rho11, rho12, rho21, rho22)."""
        R = np.asarray(R, dtype=np.int64)
        if self.kind == "pi":
            (n,) = self.args
            return np.all(R % n == 0, axis=0).astype(np.int64)
        if self.kind == "pid":
            (n,) = self.args
            return ((R[0] * R[3] - R[1] * R[2]) % n == 0).astype(np.int64)
        if self.kind == "e":
            return _e_p_values(R, *self.args)
        if self.kind == "pip":
            out = np.zeros(R.shape[1:], dtype=np.int64)
            for (p, i, j), c in self.expand().items():
                out += c * _e_p_values(R, p, i, j)
            return out
        out = np.ones(R.shape[1:], dtype=np.int64)
        for f in self.factors:
            out *= f.evaluate(R)
        return out

    def as_element(self) -> GL2Element:
        N = self.level
        F = self.evaluate(_grid(N)).astype(object)
        F = np.vectorize(Fraction, otypes=[object])(F)
        return GL2Element(N, {(1, 0, 1): F})


def _e_p_values(R: np.ndarray, p: int, i: int, j: int) -> np.ndarray:
    B = max(i, 2 * j, 1)
    q = p**B
    R = R % q
    content = np.minimum(np.minimum(_vp(R[0], p, B), _vp(R[1], p, B)), np.minimum(_vp(R[2], p, B), _vp(R[3], p, B)))
    det = (R[0] * R[3] - R[1] * R[2]) % q
    vdet = _vp(det, p, B)
    # content >= j already forces b >= a >= j; otherwise a < j is exact and a + j <= B
    out = np.where(content >= j, content >= i, (content >= i) & (vdet >= content + j))
    return out.astype(np.int64)


@dataclass(frozen=True)
class KMSResult:
    value: float
    tail_bound: float
    partition: float
    cutoff: int

    def within(self, target: float, slack: float = 1e-12) -> bool:
        return abs(self.value - target) <= self.tail_bound + slack


def _hnf_weights(beta: float, D: int, N: int):
    """A[a0, d0] = sum w q, B[a0, d0] = sum w over a d <= D (w = (ad)^-beta, d = qN + d0)."""
    alphas = np.arange(1, D + 1, dtype=np.int64)
    counts = D // alphas
    a = np.repeat(alphas, counts)
    starts = np.cumsum(counts) - counts
    d = np.arange(a.size, dtype=np.int64) - np.repeat(starts, counts) + 1
    w = (a.astype(np.float64) * d.astype(np.float64)) ** (-beta)
    q, rem = np.divmod(d, N)
    cell = (a % N) * N + rem
    A = np.bincount(cell, weights=w * q, minlength=N * N).reshape(N, N)
    Bw = np.bincount(cell, weights=w, minlength=N * N).reshape(N, N)
    return A, Bw


def _observable_values(f, rho: tuple, N: int) -> np.ndarray:
    """F[a0, d0, r0] = f(1, [[a0, r0], [0, d0]] rho mod N)."""
    a0, d0, r0 = np.indices((N, N, N), dtype=np.int64)
    r11, r12, r21, r22 = rho
    R = np.stack([(a0 * r11 + r0 * r21) % N, (a0 * r12 + r0 * r22) % N, (d0 * r21) % N, (d0 * r22) % N])
    if isinstance(f, GL2Element):
        F = f.terms.get((1, 0, 1))
        if F is None:
            return np.zeros((N, N, N))
        R = R % f.level
        return np.vectorize(float)(F[R[0], R[1], R[2], R[3]])
    return np.asarray(f.evaluate(R), dtype=np.float64)


def kms_state_eval(beta: float, lat: QLattice2Level, f, cutoff: int = 10**4) -> KMSResult:
    """Z^-1 sum over Gamma \\ M2(Z)+ with det m <= D of f(1, m rho) det(m)^-beta, Z = zeta(beta) zeta(beta-1).

    ``f`` is a GL2Element or a ProjOp; only its coefficient on Gamma enters.
    The tail bound is sup|f| Z^-1 sum_{n > D} sigma_1(n) n^-beta.
    """
    if beta <= 2:
        raise ValueError("KMS states are only implemented for beta > 2")
    if not lat.is_invertible():
        raise ValueError("the lattice must be invertible at its level")
    N = lat.level
    if N % f.level:
        raise ValueError(f"the lattice level {N} must be a multiple of the observable level {f.level}")
    F = _observable_values(f, lat.rho, N)
    A, Bw = _hnf_weights(beta, cutoff, N)
    a0, d0, r0 = np.indices((N, N, N))
    W = A[a0, d0] + Bw[a0, d0] * (r0 < d0)
    z1, e1 = zeta(beta)
    z2, e2 = zeta(beta - 1)
    Z = z1 * z2
    total = math.fsum((F * W).ravel())
    sup = float(np.max(np.abs(F))) if F.size else 0.0
    tail = sup * sigma1_tail_bound(beta, cutoff) / Z + abs(total) * (e1 * z2 + e2 * z1) / Z**2
    return KMSResult(total / Z, tail, Z, cutoff)


def proba_closed_forms(beta, p: int, k: int, l: int):
    """phi(pi_p(k, l)) as (sympy expression in x = p^-beta, numeric value at beta)."""
    if not 0 <= k <= l:
        raise ValueError("need 0 <= k <= l")
    x = sympy.Symbol("x", positive=True)
    base = (1 - x) * (1 - p * x)
    if k < l:
        expr = x ** (k + l) * sympy.Integer(p) ** (l - k) * (1 + sympy.Rational(1, p)) * base
    else:
        expr = x ** (2 * l) * base
    val = float(expr.subs(x, sympy.Float(p) ** (-beta))) if beta is not None else None
    return expr, val


def sigma_closed_form(p: int, n: int, x=None):
    """sigma(n) = a (p x^{-1})^{-n}... i.e. a p^n x^n + (1 - a) x^{2n}, a = (1+p)(1-x)/(p-x)."""
    x = sympy.Symbol("x", positive=True) if x is None else x
    a = (1 + p) * (1 - x) / (p - x)
    return a * p**n * x**n + (1 - a) * x ** (2 * n)


@dataclass
class RecursionReport:
    ok: bool
    values: list
    failed_at: int | None = None


def sigma_recursion_check(p: int, l_max: int) -> RecursionReport:
    """Solve the KMS induction for sigma(l) with x = p^-beta formal and compare with the closed form."""
    x = sympy.Symbol("x", positive=True)
    c = p * (1 + sympy.Rational(1, p))
    sig = [sympy.Integer(1)]
    for l in range(1, l_max + 1):
        known = sum(sympy.Integer(p) ** k * (x ** (2 * k) * sig[l - k] - x ** (2 * k + 2) * sig[l - k - 1]) for k in range(1, l))
        lhs = sympy.Integer(p) ** (l - 1) * c * x**l
        first = sympy.Integer(p) ** (l - 1) * c * x ** (2 * l)
        # the k = 0 term is sigma(l) - x^2 sigma(l-1)
        sig.append(sympy.cancel(lhs - first - known + x**2 * sig[l - 1]))
    for l, s in enumerate(sig):
        if sympy.cancel(s - sigma_closed_form(p, l, x)) != 0:
            return RecursionReport(False, sig, l)
    return RecursionReport(True, sig)


def equi_distribution(N: int, beta: float, cutoff: int):
    """Normalized weight of each residue of m mod N over Gamma \\ M2(Z)+, det m <= D.

    Residues of coset representatives are only defined up to SL2(Z/N) on the
    left, so the weights are averaged over that group.  Returns (weights,
    max |N^4 w - 1|).
    """
    if beta <= 2:
        raise ValueError("beta must exceed 2")
    A, Bw = _hnf_weights(beta, cutoff, N)
    H = np.zeros((N, N, N, N))
    for a0, r0, d0 in itertools.product(range(N), repeat=3):
        H[a0, r0, 0, d0] = A[a0, d0] + Bw[a0, d0] * (r0 < d0)
    G = sl2_elements(N)
    R = _grid(N)
    avg = np.zeros_like(H)
    for a, b, c, d in G:
        # gamma x for every x; summing H[gamma x] over gamma equals summing H[gamma^-1 x]
        idx = ((a * R[0] + b * R[2]) % N, (a * R[1] + b * R[3]) % N, (c * R[0] + d * R[2]) % N, (c * R[1] + d * R[3]) % N)
        avg += H[idx]
    avg /= len(G)
    w = avg / avg.sum()
    weights = {tuple(int(v) for v in k): float(w[k]) for k in itertools.product(range(N), repeat=4)}
    dev = float(np.max(np.abs(N**4 * w - 1)))
    return weights, dev


# ---------------------------------------------------------------------------
# symmetries


def symmetry_right(gamma, f: GL2Element) -> GL2Element:
    """theta_gamma(f)(g, rho) = f(g, rho gamma), gamma in GL2(Z/N)."""
    N = f.level
    (a, b), (c, d) = gamma
    if math.gcd((a * d - b * c) % N, N) != 1:
        raise ValueError("gamma is not invertible modulo the level")
    R = _grid(N)
    idx = ((R[0] * a + R[1] * c) % N, (R[0] * b + R[1] * d) % N, (R[2] * a + R[3] * c) % N, (R[2] * b + R[3] * d) % N)
    return GL2Element(N, {k: F[idx] for k, F in f.terms.items()})


def endo_theta(m, f: GL2Element) -> GL2Element:
    """theta_m(f)(g, rho) = f(g, rho m / det m) where rho m = 0 mod det m, else 0.  Level N becomes N det m."""
    m = mat(m)
    if not is_integral(m) or mat_det(m) <= 0:
        raise ValueError("m must be an integer matrix with positive determinant")
    n = int(mat_det(m))
    N = f.level
    M = N * n
    R = _grid(M)
    (p, q), (r, s) = ((int(e) for e in row) for row in m)
    P = (R[0] * p + R[1] * r, R[0] * q + R[1] * s, R[2] * p + R[3] * r, R[2] * q + R[3] * s)
    mask = np.ones(R.shape[1:], dtype=bool)
    for x in P:
        mask &= x % n == 0
    idx = tuple((x // n) % N for x in P)
    return GL2Element(M, {k: np.where(mask, F[idx], Fraction(0)) for k, F in f.terms.items()})


def e_L_indicator(m, level: int) -> GL2Element:
    """Rows of rho lie in the row span of adj(m), by enumeration of that span mod level."""
    m = mat(m)
    (p, q), (r, s) = ((int(e) for e in row) for row in m)
    adj = ((s, -q), (-r, p))
    span = {((i * adj[0][0] + j * adj[1][0]) % level, (i * adj[0][1] + j * adj[1][1]) % level) for i in range(level) for j in range(level)}
    return GL2Element.from_rho_function(level, lambda x: int((x[0], x[1]) in span and (x[2], x[3]) in span), check=False)


def inner_check(n: int, f: GL2Element) -> bool:
    """theta_{nI}(f) = mu_[n] f mu_[n]^* with mu_[n] the indicator of Gamma nI."""
    mu = GL2Element(1, {(n, 0, n): _const_array(1, 1)})
    lhs = endo_theta(((n, 0), (0, n)), f)
    rhs = convolve(convolve(mu, f), adjoint(mu))
    return lhs == rhs


def sigma_eigenvalues(f: GL2Element) -> set:
    """Determinants of the coset labels: sigma_t multiplies each term by det(g)^{it}."""
    return {mat_det(key_matrix(k)) for k in f.terms}


def galois_covariance_check(level: int, alpha, rho, tau: complex, label=(1, 0), tol: float = 1e-8):
    """X_a(alpha rho, tau) computed directly and through the action on Fricke labels."""
    from .modforms import xa_galois_check

    return xa_galois_check(level, alpha, rho, tau, label, tol)
