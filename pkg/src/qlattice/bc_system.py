"""The one-dimensional (BC) algebra in normal form, its dynamics and KMS states.

Elements are finite rational combinations of monomials mu_n e(r) mu_m^*
with gcd(n, m) = 1.  Products are reduced with the commutation rules

    e(r) mu_n = mu_n e(n r)          mu_n^* e(r) = e(n r) mu_n^*
    mu_b^* mu_c = mu_{c/g} mu_{b/g}^*                (g = gcd(b, c))
    mu_g e(r) mu_g^* = (1/g) sum_{g s = r} e(s)

Only the last one is part of the presentation; the others are derived, so
the first product triggers a sweep comparing them with the groupoid
convolution model in :mod:`qlattice.qlat1d`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np
import sympy

from .numkit import (
    CharSum,
    Cyclo,
    QModZ,
    f_j,
    numeric_embed,
    prime_factors,
    rat,
    root_of_unity,
    zeta,
)

__all__ = [
    "QModZ",
    "BCMonomial",
    "BCElement",
    "GroundStateLabel",
    "bc_product",
    "bc_adjoint",
    "bc_time_evolution",
    "sigma_eigenvalue",
    "state_value",
    "kms_low",
    "kms_low_expression",
    "kms_low_formal_check",
    "kms_high",
    "KMSValue",
    "kms_zero_temperature",
    "gibbs_diagonal",
    "kms_eigen_check",
    "symmetry_act",
    "intertwine_check",
    "phase_state",
    "phase_state_exact",
    "fock_apply",
    "phaseop_check",
    "phase_orthonormality_check",
    "renorm_identity_check",
    "RuleViolation",
]


class RuleViolation(RuntimeError):
    """A derived commutation rule disagrees with the groupoid model."""


@dataclass(frozen=True, order=True)
class BCMonomial:
    """mu_n e(r) mu_m^* with gcd(n, m) = 1."""

    n: int
    r: QModZ
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("isometry labels must be positive")
        if math.gcd(self.n, self.m) != 1:
            raise ValueError(f"mu_{self.n} e({self.r}) mu_{self.m}^* is not in normal form")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.n, self.m)

    def __str__(self):
        parts = []
        if self.n != 1:
            parts.append(f"mu{self.n}")
        parts.append(f"e({self.r})")
        if self.m != 1:
            parts.append(f"mu{self.m}*")
        return " ".join(parts)


class BCElement:
    """Finite map BCMonomial -> rational coefficient (zeros dropped)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[BCMonomial, Fraction] | None = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    # constructors
    @classmethod
    def monomial(cls, n: int = 1, r=0, m: int = 1, coeff=1) -> "BCElement":
        r = QModZ.of(r)
        g = math.gcd(n, m)
        if g == 1:
            return cls({BCMonomial(n, r, m): rat(coeff)})
        # reduce through the averaging rule
        return _normal_triple(n, r, m, rat(coeff))

    @classmethod
    def one(cls) -> "BCElement":
        return cls.monomial()

    @classmethod
    def e(cls, r) -> "BCElement":
        return cls.monomial(1, r, 1)

    @classmethod
    def mu(cls, n: int) -> "BCElement":
        return cls.monomial(n, 0, 1)

    @classmethod
    def mu_star(cls, m: int) -> "BCElement":
        return cls.monomial(1, 0, m)

    @classmethod
    def pi(cls, n: int) -> "BCElement":
        return bc_product(cls.mu(n), cls.mu_star(n))

    # linear structure
    def __add__(self, other: "BCElement") -> "BCElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return BCElement(out)

    def __neg__(self):
        return BCElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BCElement":
        c = rat(c)
        return BCElement({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, BCElement):
            return bc_product(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "BCElement":
        out = BCElement.one()
        for _ in range(k):
            out = out * self
        return out

    @property
    def star(self) -> "BCElement":
        return bc_adjoint(self)

    def is_zero(self) -> bool:
        return not self.terms

    def labels(self) -> list[QModZ]:
        return [k.r for k in self.terms]

    def __eq__(self, other):
        if not isinstance(other, BCElement):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "BCElement(0)"
        body = " + ".join(f"{v}*[{k}]" for k, v in sorted(self.terms.items()))
        return f"BCElement({body})"


# ---------------------------------------------------------------------------
# normal-form product


def _normal_triple(n: int, r: QModZ, m: int, coeff: Fraction) -> BCElement:
    """mu_n e(r) mu_m^* for arbitrary n, m, via mu_g e(r) mu_g^* = (1/g) sum e(s)."""
    g = math.gcd(n, m)
    if g == 1:
        return BCElement({BCMonomial(n, r, m): coeff})
    c = coeff / g
    out: dict[BCMonomial, Fraction] = {}
    for s in r.divisions(g):
        key = BCMonomial(n // g, s, m // g)
        out[key] = out.get(key, Fraction(0)) + c
    return BCElement(out)


def _monomial_product(x: BCMonomial, y: BCMonomial) -> BCElement:
    # (mu_a e(r) mu_b^*)(mu_c e(s) mu_d^*)
    a, r, b = x.n, x.r, x.m
    c, s, d = y.n, y.r, y.m
    g = math.gcd(b, c)
    b1, c1 = b // g, c // g
    # mu_b^* mu_c = mu_{c1} mu_{b1}^*, then move e(r) right and e(s) left
    t = c1 * r + b1 * s
    return _normal_triple(a * c1, t, b1 * d, Fraction(1))


_RULES_CHECKED = False


def _product_raw(x: BCElement, y: BCElement) -> BCElement:
    out: dict[BCMonomial, Fraction] = {}
    for kx, vx in x.terms.items():
        for ky, vy in y.terms.items():
            for k, v in _monomial_product(kx, ky).terms.items():
                out[k] = out.get(k, Fraction(0)) + vx * vy * v
    return BCElement(out)


def bc_product(x: BCElement, y: BCElement) -> BCElement:
    """Normal-form product of two elements."""
    global _RULES_CHECKED
    if not _RULES_CHECKED:
        _RULES_CHECKED = True
        try:
            _validate_rules()
        except Exception:
            _RULES_CHECKED = False
            raise
    return _product_raw(x, y)


def _validate_rules(bound: int = 4) -> None:
    """Compare every derived rule on small generators with the groupoid model."""
    from .qlat1d import bc_image, groupoid_convolve

    labels = sorted({QModZ.of(Fraction(a, b)) for b in range(1, bound + 1) for a in range(b)})
    gens = [BCElement.mu(n) for n in range(1, bound + 1)]
    gens += [BCElement.mu_star(n) for n in range(2, bound + 1)]
    gens += [BCElement.e(r) for r in labels]
    for x in gens:
        for y in gens:
            lhs = bc_image(_product_raw(x, y))
            rhs = groupoid_convolve(bc_image(x), bc_image(y))
            if lhs != rhs:
                raise RuleViolation(f"normal form of {x} * {y} disagrees with the groupoid convolution")


def bc_adjoint(x: BCElement) -> BCElement:
    """(mu_n e(r) mu_m^*)^* = mu_m e(-r) mu_n^*; coefficients are rational."""
    return BCElement({BCMonomial(k.m, -k.r, k.n): v for k, v in x.terms.items()})


# ---------------------------------------------------------------------------
# dynamics and states


def sigma_eigenvalue(x: BCElement) -> Fraction:
    """The common ratio n/m if x is an eigenvector of the time evolution."""
    ratios = {k.ratio for k in x.terms}
    if len(ratios) != 1:
        raise ValueError(f"not an eigenvector of the time evolution: ratios {sorted(ratios)}")
    return ratios.pop()


def bc_time_evolution(t, x: BCElement):
    """sigma_t(x).

    With ``t="formal"`` returns the per-monomial eigenvalues n/m; with a real
    t returns the monomials with complex coefficients (n/m)^{it} c.
    """
    if isinstance(t, str):
        if t != "formal":
            raise ValueError("t must be a real number or 'formal'")
        return {k: k.ratio for k in x.terms}
    return {k: complex(v) * cmath.exp(1j * float(t) * math.log(k.n / k.m)) for k, v in x.terms.items()}


@dataclass(frozen=True)
class GroundStateLabel:
    """Embedding of the cyclotomic tower truncated at level N: zeta_N -> exp(2 pi i k/N)."""

    level: int
    k: int = 1

    def __post_init__(self):
        if self.level < 1 or math.gcd(self.k, self.level) != 1:
            raise ValueError(f"{self.k} is not a unit modulo {self.level}")

    def refine(self, level: int) -> "GroundStateLabel":
        """A compatible unit at a multiple of the level."""
        if level % self.level:
            raise ValueError("can only refine to a multiple of the level")
        k = self.k
        while math.gcd(k, level) != 1:
            k += self.level
        return GroundStateLabel(level, k % level)

    def embed(self, r) -> complex:
        r = QModZ.of(r)
        if self.level % r.b:
            raise ValueError(f"label {r} has order not dividing the level {self.level}")
        return cmath.exp(2j * math.pi * self.k * r.a / r.b)


def kms_low(beta: float, r) -> float:
    """phi_beta(e(a/b)) for 0 < beta <= 1: b^-beta prod_{p | b} (1 - p^{beta-1})/(1 - p^-1)."""
    if not 0 < beta <= 1:
        raise ValueError("kms_low covers 0 < beta <= 1; use kms_high above 1")
    b = QModZ.of(r).b
    out = float(b) ** (-beta)
    for p in prime_factors(b):
        out *= (1 - p ** (beta - 1)) / (1 - 1 / p)
    return out


def kms_low_expression(b: int, beta=None):
    """Both closed forms as sympy expressions in beta: (product form, f_{1-beta}(b)/f_1(b))."""
    beta = sympy.Symbol("beta", positive=True) if beta is None else beta
    prod = sympy.Integer(b) ** (-beta)
    for p in prime_factors(b):
        prod *= (1 - sympy.Integer(p) ** (beta - 1)) / (1 - sympy.Rational(1, p))
    f1b = sum(sympy.mobius(d) * sympy.Integer(b // d) ** (1 - beta) for d in sympy.divisors(b))
    return prod, f1b / sympy.Integer(f_j(1, b))


def kms_low_formal_check(b: int, exponents: Iterable = (sympy.Rational(1, 2), sympy.Rational(1, 3), sympy.Integer(1))) -> bool:
    """Product formula against the Moebius ratio, formally and at rational beta.

    Formally, p^{-beta} is replaced by an independent symbol x_p so that
    both sides become rational functions in the x_p.
    """
    ps = prime_factors(b)
    xs = {p: sympy.Symbol(f"x_{p}", positive=True) for p in ps}

    def power(n):  # n^{-beta} as a monomial in the x_p
        out = sympy.Integer(1)
        for p in ps:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out *= xs[p] ** e
        return out

    prod = power(b)
    for p in ps:
        prod *= (1 - 1 / (p * xs[p])) / (1 - sympy.Rational(1, p))
    mob = sum(sympy.mobius(d) * sympy.Integer(b // d) * power(b // d) for d in sympy.divisors(b))
    if sympy.cancel(prod - mob / sympy.Integer(f_j(1, b))) != 0:
        return False
    for beta in exponents:
        lhs, rhs = kms_low_expression(b, beta)
        if not sympy.simplify(sympy.expand(lhs - rhs)) == 0:
            return False
    return True


@dataclass(frozen=True)
class KMSValue:
    value: complex
    bound: float
    exact: bool


def kms_high(beta: float, ground: GroundStateLabel, r, cutoff: int = 10**5) -> KMSValue:
    """phi_{beta, rho}(e(a/b)) = zeta(beta)^-1 sum_n n^-beta rho(zeta_{a/b}^n)."""
    if beta <= 1:
        raise ValueError("kms_high needs beta > 1")
    r = QModZ.of(r)
    if ground.level % r.b:
        raise ValueError("the level of the ground label must be divisible by the order of r")
    if r.b == 1:
        return KMSValue(1.0, 0.0, True)
    if r.b == 2:
        # sum (-1)^n n^-beta = -(1 - 2^{1-beta}) zeta(beta)
        return KMSValue(2.0 ** (1 - beta) - 1.0, 0.0, True)
    z, zerr = zeta(beta)
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    phase = np.exp(2j * np.pi * ((ground.k * r.a * np.arange(1, cutoff + 1)) % r.b) / r.b)
    partial = np.sum(n ** (-beta) * phase)
    tail = float(cutoff) ** (1 - beta) / (beta - 1)
    return KMSValue(complex(partial / z), tail / z + abs(partial) * zerr / z**2, False)


def kms_zero_temperature(ground: GroundStateLabel, r) -> Cyclo:
    """The beta -> infinity value rho(zeta_r) as an exact root of unity."""
    r = QModZ.of(r)
    if ground.level % r.b:
        raise ValueError("label order must divide the level")
    return root_of_unity(QModZ.of(ground.k * r.frac))


def state_value(x: BCElement, on_e: Callable[[QModZ], complex]) -> complex:
    """phi(x) for the state with phi(e(r)) = on_e(r), vanishing off the diagonal."""
    return sum((float(v) * on_e(k.r) for k, v in x.terms.items() if k.n == 1 and k.m == 1), 0.0)


def gibbs_diagonal(x: BCElement, ground: GroundStateLabel | None = None) -> CharSum:
    """n -> <n| x |n> in the Gibbs representation, as a character sum in n."""
    k = 1 if ground is None else ground.k
    out = CharSum()
    for mono, v in x.terms.items():
        if mono.n == 1 and mono.m == 1:
            out = out + CharSum.char(k * mono.r.frac, v)
    return out


@dataclass(frozen=True)
class EigenCheck:
    eigenvalue: Fraction
    exact: bool | None
    lhs: complex
    rhs: complex
    residual: float

    @property
    def ok(self) -> bool:
        return (self.exact is not False) and self.residual < 1e-9


def kms_eigen_check(beta: float, x: BCElement, y: BCElement, ground: GroundStateLabel | None = None, cutoff: int = 10**5) -> EigenCheck:
    """phi(yx) = lambda^-beta phi(xy) for an eigenvector y with eigenvalue lambda.

    For beta > 1 the identity is also verified exactly: the diagonal
    coefficient functions c(n) of both products in the Gibbs representation
    are compared as generalized Dirichlet series, which is independent of beta.
    """
    lam = sigma_eigenvalue(y)
    xy, yx = bc_product(x, y), bc_product(y, x)
    exact: bool | None = None
    if beta > 1:
        p, q = lam.numerator, lam.denominator
        c_xy, c_yx = gibbs_diagonal(xy, ground), gibbs_diagonal(yx, ground)
        # sum_n c_yx(n) n^-b = sum_m c_xy(m) (lam m)^-b, matched term by term
        cond_a = (c_xy - c_xy * CharSum.indicator(q)).is_zero()
        cond_b = (c_yx - c_yx * CharSum.indicator(p)).is_zero()
        cond_c = c_yx.dilate(p) == c_xy.dilate(q)
        exact = cond_a and cond_b and cond_c
        g = ground or GroundStateLabel(math.lcm(1, *(k.r.b for k in xy.terms), *(k.r.b for k in yx.terms)))

        def on_e(r):
            return kms_high(beta, g.refine(math.lcm(g.level, r.b)) if g.level % r.b else g, r, cutoff).value
    else:
        def on_e(r):
            return kms_low(beta, r)
    lhs = state_value(yx, on_e)
    rhs = float(lam) ** (-beta) * state_value(xy, on_e)
    return EigenCheck(lam, exact, lhs, rhs, abs(lhs - rhs))


# ---------------------------------------------------------------------------
# symmetries


def symmetry_act(k: int, level: int, x: BCElement) -> BCElement:
    """e(r) -> e(k r) for k a unit mod level; isometries are fixed."""
    if math.gcd(k, level) != 1:
        raise ValueError(f"{k} is not a unit modulo {level}")
    out: dict[BCMonomial, Fraction] = {}
    for mono, v in x.terms.items():
        if level % mono.r.b:
            raise ValueError(f"label {mono.r} has order not dividing {level}")
        key = BCMonomial(mono.n, k * mono.r, mono.m)
        out[key] = out.get(key, Fraction(0)) + v
    return BCElement(out)


def intertwine_check(ground: GroundStateLabel, k: int, r) -> bool:
    """phi_inf(nu_k e(r)) equals the Galois twist zeta -> zeta^k of phi_inf(e(r)), exactly."""
    N = ground.level
    r = QModZ.of(r)
    moved = symmetry_act(k, N, BCElement.e(r))
    (mono,) = moved.terms
    lhs = kms_zero_temperature(ground, mono.r).lift(N)
    rhs = kms_zero_temperature(ground, r).lift(N).galois(k % N if N > 1 else 1)
    num_ok = abs(numeric_embed(lhs, 1) - numeric_embed(rhs, 1)) < 1e-12
    return lhs == rhs and num_ok


# ---------------------------------------------------------------------------
# phase states on the Fock space l^2(N) with basis |0>, |1>, ...


FockVector = dict  # n -> Cyclo


def fock_apply(x: BCElement, vec: Mapping[int, Cyclo]) -> dict[int, Cyclo]:
    """Action with e(a/b)|n> = zeta_{a/b}^n |n>, mu_k|n> = |kn>, mu_k^*|n> = |n/k> or 0."""
    out: dict[int, Cyclo] = {}
    for mono, coef in x.terms.items():
        for n, amp in vec.items():
            if n % mono.m:
                continue
            j = n // mono.m
            val = amp * root_of_unity(QModZ.of(mono.r.frac * j)) * coef
            t = mono.n * j
            out[t] = out[t] + val if t in out else val
    return {n: v for n, v in out.items() if not v.is_zero()}


def phase_state_exact(N: int, m: int) -> tuple[dict[int, Cyclo], Fraction]:
    """Unnormalized |theta_{m,N}> with exact amplitudes, and its squared normalization 1/(N+1)."""
    if not 0 <= m <= N:
        raise ValueError("need 0 <= m <= N")
    vec = {n: root_of_unity(Fraction(m * n, N + 1)).lift(N + 1) for n in range(N + 1)}
    return vec, Fraction(1, N + 1)


def phase_state(N: int, m: int) -> np.ndarray:
    """(N+1)^{-1/2} sum_n exp(2 pi i m n/(N+1)) |n>, as a complex vector of length N+1."""
    if not 0 <= m <= N:
        raise ValueError("need 0 <= m <= N")
    n = np.arange(N + 1)
    return np.exp(2j * np.pi * m * n / (N + 1)) / math.sqrt(N + 1)


def _inner(u: Mapping[int, Cyclo], v: Mapping[int, Cyclo]) -> Cyclo:
    acc = Cyclo.rational(0)
    for n, a in u.items():
        if n in v:
            acc = acc + a.conj() * v[n]
    return acc


def phase_orthonormality_check(N: int) -> bool:
    """<theta_m|theta_m'> = delta_{m m'} exactly in Q(zeta_{N+1})."""
    states = [phase_state_exact(N, m) for m in range(N + 1)]
    for m, (u, w) in enumerate(states):
        for mp, (v, _) in enumerate(states):
            val = _inner(u, v) * w
            if val != Cyclo.rational(1 if m == mp else 0):
                return False
    return True


def phaseop_check(N: int, m: int) -> bool:
    """|theta_{m,N}> = e(m/(N+1)) v_N with v_N the uniform superposition."""
    vec, _ = phase_state_exact(N, m)
    uniform = {n: Cyclo.rational(1) for n in range(N + 1)}
    moved = fock_apply(BCElement.e(Fraction(m, N + 1)), uniform)
    keys = set(vec) | set(moved)
    zero = Cyclo.rational(0)
    return all(vec.get(n, zero) == moved.get(n, zero) for n in keys)


def _poly_eval(poly: Mapping[tuple[int, ...], Fraction], labels: tuple[QModZ, ...]) -> BCElement:
    out = BCElement()
    for exps, c in poly.items():
        term = BCElement.one()
        for lab, e in zip(labels, exps):
            term = bc_product(term, BCElement.e(lab) ** e)
        out = out + term.scale(c)
    return out


def renorm_identity_check(n: int, poly: Mapping[tuple[int, ...], Fraction], labels, fock_range: int = 0) -> bool:
    """mu_n P(e(r_1..r_k)) mu_n^* = (pi_n / n^k) sum_{n s = r} P(e(s_1..s_k)).

    ``poly`` maps exponent tuples to rational coefficients.  With
    ``fock_range`` > 0 both sides are also compared on |0>, ..., |fock_range-1>.
    """
    import itertools

    labels = tuple(QModZ.of(r) for r in labels)
    k = len(labels)
    lhs = bc_product(bc_product(BCElement.mu(n), _poly_eval(poly, labels)), BCElement.mu_star(n))
    avg = BCElement()
    for sols in itertools.product(*(lab.divisions(n) for lab in labels)):
        avg = avg + _poly_eval(poly, tuple(sols))
    rhs = bc_product(BCElement.pi(n), avg).scale(Fraction(1, n**k))
    if lhs != rhs:
        return False
    for j in range(fock_range):
        a = fock_apply(lhs, {j: Cyclo.rational(1)})
        b = fock_apply(rhs, {j: Cyclo.rational(1)})
        zero = Cyclo.rational(0)
        if any(a.get(t, zero) != b.get(t, zero) for t in set(a) | set(b)):
            return False
    return True
