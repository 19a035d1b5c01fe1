"""Command-line front end: data tables and verification reports as JSON or CSV."""

from __future__ import annotations

import csv
import datetime as _dt
import functools
import io
import json
import math
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable

import click

from . import __version__

SCHEMA = "qlattice.report/1"
DEFAULT_SEED = 20240607


# ---------------------------------------------------------------------------
# reports


class Report:
    def __init__(self, suite: str, seed: int, **meta):
        self.suite = suite
        self.checks: list[dict] = []
        self.rows: list[dict] = []
        self.meta = {"version": __version__, "seed": seed, **meta}

    def check(self, cid: str, ok: bool, witness=None, residual=None, tolerance=None):
        self.checks.append(
            {"id": cid, "status": "pass" if ok else "fail", "witness": _plain(witness), "residual": residual, "tolerance": tolerance}
        )

    def run(self, cid: str, fn: Callable[[], tuple], tolerance=None):
        """fn returns (ok, witness, residual); exceptions become failures."""
        try:
            ok, witness, residual = fn()
        except Exception as exc:  # reported, never swallowed silently
            ok, witness, residual = False, f"{type(exc).__name__}: {exc}", None
        self.check(cid, ok, witness, residual, tolerance)

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "generated": None if os.environ.get("QLAT_DETERMINISTIC") else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "metadata": self.meta,
            "ok": self.ok,
            "checks": self.checks,
            "rows": self.rows,
        }

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"
        records = self.rows if self.rows else self.checks
        buf = io.StringIO()
        if records:
            fields = list(dict.fromkeys(k for r in records for k in r))
            w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            for r in records:
                w.writerow({k: _csv_cell(r.get(k)) for k in fields})
        return buf.getvalue()


def _plain(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return str(x)


def _csv_cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return v


def _local_options(fn):
    """Let --format and --seed also follow the subcommand."""

    @functools.wraps(fn)
    def wrapper(*args, fmt_local=None, seed_local=None, **kwargs):
        ctx = click.get_current_context()
        if fmt_local:
            ctx.obj["format"] = fmt_local
        if seed_local is not None:
            ctx.obj["seed"] = seed_local
        return fn(*args, **kwargs)

    wrapper = click.option("--format", "fmt_local", type=click.Choice(["json", "csv"]), default=None, help="output format")(wrapper)
    wrapper = click.option("--seed", "seed_local", type=int, default=None, help="random seed")(wrapper)
    return wrapper


def _emit(ctx: click.Context, rep: Report):
    fmt = ctx.obj["format"]
    text = rep.render(fmt)
    click.echo(text, nl=False)
    out_dir = os.environ.get("QLAT_REPORT_DIR")
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{rep.suite.replace(' ', '_')}.{fmt}").write_text(text)
    if not rep.ok:
        ctx.exit(1)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{text!r} is not a rational number") from None


# ---------------------------------------------------------------------------
# command tree


@click.group()
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.version_option(__version__)
@click.pass_context
def main(ctx: click.Context, fmt: str, seed: int):
    """One- and two-dimensional Q-lattice systems: evaluation and verification."""
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, seed=seed)


@main.group()
def bc():
    """One-dimensional system."""


@bc.command("kms")
@click.option("--beta", type=float, required=True)
@click.option("--r", "r_text", required=True, help="label a/b in Q/Z")
@click.option("--ground", default=None, help="k/N: zeta_N -> exp(2 pi i k/N), used above beta = 1")
@click.option("--cutoff", type=int, default=10**5, show_default=True)
@_local_options
@click.pass_context
def bc_kms(ctx, beta, r_text, ground, cutoff):
    """State value on e(r)."""
    from .bc_system import GroundStateLabel, kms_high, kms_low
    from .numkit import QModZ

    r = QModZ.of(_fraction(r_text))
    rep = Report("bc kms", ctx.obj["seed"], beta=beta, cutoff=cutoff)
    if beta <= 0:
        raise click.BadParameter("beta must be positive", param_hint="--beta")
    if beta <= 1:
        val, bound, regime = kms_low(beta, r), 0.0, "low"
        rep.rows.append({"beta": beta, "r": str(r), "value": val, "bound": bound, "regime": regime})
    else:
        if ground:
            g = _fraction(ground)
            lab = GroundStateLabel(g.denominator, g.numerator)
        else:
            lab = GroundStateLabel(r.b, 1)
        res = kms_high(beta, lab, r, cutoff)
        v = res.value
        rep.rows.append(
            {"beta": beta, "r": str(r), "value": v.real if isinstance(v, complex) and v.imag == 0 else _plain(v),
             "bound": res.bound, "regime": "high", "exact": res.exact}
        )
    _emit(ctx, rep)


@bc.command("verify")
@click.option("--level", type=int, default=12, show_default=True)
@_local_options
@click.pass_context
def bc_verify(ctx, level):
    """Exact checks of the one-dimensional system up to a level."""
    rep = Report("bc verify", ctx.obj["seed"], level=level)
    _bc_suite(rep, level, ctx.obj["seed"], quick=False)
    _emit(ctx, rep)


@main.group()
def lat():
    """Sublattice combinatorics."""


@lat.command("count")
@click.option("--max", "nmax", type=int, required=True)
@_local_options
@click.pass_context
def lat_count(ctx, nmax):
    """Number of index-n sublattices of Z^2 against sigma_1(n)."""
    from .lat2d import enumerate_index
    from .numkit import divisor_sigma

    rep = Report("lat count", ctx.obj["seed"], max=nmax)
    bad = []
    for n in range(1, nmax + 1):
        c = len(enumerate_index(n))
        rep.rows.append({"n": n, "count": c})
        if c != divisor_sigma(1, n):
            bad.append(n)
    rep.check("count = sigma_1", not bad, bad or None)
    _emit(ctx, rep)


@main.group()
def gl2():
    """Two-dimensional system."""


def _parse_obs(text: str):
    from .gl2_system import ProjOp

    parts = text.split(":")
    try:
        nums = [int(x) for x in parts[1:]]
        kind = parts[0]
        if kind == "e":
            return ProjOp.e(*nums)
        if kind == "pip":
            return ProjOp.pi_p(*nums)
        if kind == "pi":
            return ProjOp.pi(*nums)
        if kind == "pid":
            return ProjOp.pi_det(*nums)
    except (TypeError, ValueError) as exc:
        raise click.BadParameter(f"{text!r}: {exc}", param_hint="--obs") from None
    raise click.BadParameter(f"unknown observable {text!r}; use e:p:i:j, pip:p:k:l, pi:n or pid:n", param_hint="--obs")


@gl2.command("kms")
@click.option("--beta", type=float, required=True)
@click.option("--level", type=int, default=None, help="level of the invertible lattice (default: observable level)")
@click.option("--obs", required=True, help="e:p:i:j | pip:p:k:l | pi:n | pid:n")
@click.option("--cutoff", type=int, default=10**4, show_default=True)
@_local_options
@click.pass_context
def gl2_kms(ctx, beta, level, obs, cutoff):
    """KMS state of a divisibility projection at the identity lattice."""
    from .gl2_system import QLattice2Level, kms_state_eval, proba_closed_forms

    op = _parse_obs(obs)
    N = level or op.level
    rep = Report("gl2 kms", ctx.obj["seed"], beta=beta, level=N, obs=obs, cutoff=cutoff)
    try:
        res = kms_state_eval(beta, QLattice2Level(N, (1, 0, 0, 1)), op, cutoff)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    row = {"beta": beta, "obs": obs, "value": res.value, "tail_bound": res.tail_bound, "partition": res.partition}
    if op.kind == "pip":
        p, k, l = op.args
        _, closed = proba_closed_forms(beta, p, k, l)
        row["closed_form"] = closed
        rep.check("closed form within tail bound", res.within(closed), None, abs(res.value - closed), res.tail_bound)
    rep.rows.append(row)
    _emit(ctx, rep)


@gl2.command("equi")
@click.option("--level", type=int, default=2, show_default=True)
@click.option("--betas", default="2.5,2.2,2.1", show_default=True)
@click.option("--cutoff", type=int, default=10**4, show_default=True)
@_local_options
@click.pass_context
def gl2_equi(ctx, level, betas, cutoff):
    """Deviation of the residue distribution from uniform as beta decreases to 2."""
    from .gl2_system import equi_distribution

    bs = [float(b) for b in betas.split(",") if b.strip()]
    rep = Report("gl2 equi", ctx.obj["seed"], level=level, cutoff=cutoff)
    devs = []
    for b in bs:
        _, dev = equi_distribution(level, b, cutoff)
        devs.append(dev)
        rep.rows.append({"beta": b, "max_relative_deviation": dev})
    mono = all(devs[i + 1] < devs[i] for i in range(len(devs) - 1))
    rep.check("deviation decreases along the given betas", mono, devs if not mono else None)
    _emit(ctx, rep)


@main.group()
def mf():
    """Modular forms."""


_SERIES = ("e2", "e4", "e6", "e8", "e10", "e12", "delta", "j", "c", "g2", "g3", "nu4", "nu6", "nu8")


@mf.command("qexp")
@click.option("--series", "name", type=click.Choice(_SERIES), required=True)
@click.option("--order", type=int, default=10, show_default=True)
@_local_options
@click.pass_context
def mf_qexp(ctx, name, order):
    """Exact q-expansion coefficients."""
    from .modforms import ek_series, nu_series, weierstrass_data

    if order < 2:
        raise click.BadParameter("order must be >= 2", param_hint="--order")
    if name.startswith("e"):
        s = ek_series(int(name[1:]), order).series
    elif name.startswith("nu"):
        s = nu_series(int(name[2:]), order).series
    else:
        s = getattr(weierstrass_data(order), name)
    rep = Report("mf qexp", ctx.obj["seed"], series=name, order=order)
    for i in range(s.valuation, s.order):
        rep.rows.append({"exponent": str(Fraction(i, s.ram)), "coefficient": str(s.coeff(Fraction(i, s.ram)).rational_value())})
    _emit(ctx, rep)


@main.group()
def verify():
    """Verification suites."""


@verify.command("all")
@click.option("--quick", is_flag=True, help="smaller parameters, exact checks and light numerics only")
@_local_options
@click.pass_context
def verify_all(ctx, quick):
    """Run every module's check suite."""
    seed = ctx.obj["seed"]
    rep = Report("verify all", seed, quick=quick)
    t0 = time.perf_counter()
    _numkit_suite(rep, seed, quick)
    _bc_suite(rep, 6 if quick else 24, seed, quick)
    _qlat1d_suite(rep, quick)
    _lat2d_suite(rep, quick)
    _gl2_suite(rep, seed, quick)
    _mf_suite(rep, quick)
    rep.meta["elapsed_s"] = None if os.environ.get("QLAT_DETERMINISTIC") else round(time.perf_counter() - t0, 1)
    _emit(ctx, rep)


# ---------------------------------------------------------------------------
# suites


def _numkit_suite(rep: Report, seed: int, quick: bool):
    from .numkit import Cyclo, f_j, numeric_embed, units_mod, zeta

    rng = random.Random(seed)

    def cyclo_embed():
        worst = 0.0
        for _ in range(20 if quick else 200):
            N = rng.randint(1, 24)
            a = Cyclo.from_exponents(N, {rng.randrange(N): Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(3)})
            b = Cyclo.from_exponents(N, {rng.randrange(N): Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(3)})
            for k in units_mod(N):
                worst = max(worst, abs(numeric_embed(a * b, k) - numeric_embed(a, k) * numeric_embed(b, k)))
        return worst < 1e-9, None, worst

    def fj_mult():
        bad = [(m, n) for m in range(1, 30) for n in range(1, 30) if math.gcd(m, n) == 1 and f_j(2, m * n) != f_j(2, m) * f_j(2, n)]
        return not bad, bad[:3] or None, None

    def zeta_values():
        v, err = zeta(2.0)
        return abs(v - math.pi**2 / 6) <= err + 1e-14, None, abs(v - math.pi**2 / 6)

    rep.run("numkit: embedding is multiplicative", cyclo_embed, 1e-9)
    rep.run("numkit: f_j multiplicative", fj_mult)
    rep.run("numkit: zeta(2)", zeta_values)


def _bc_suite(rep: Report, level: int, seed: int, quick: bool):
    from .bc_system import (
        BCElement,
        GroundStateLabel,
        bc_product,
        intertwine_check,
        kms_eigen_check,
        kms_high,
        kms_low,
        phase_orthonormality_check,
        phaseop_check,
        renorm_identity_check,
    )
    from .numkit import QModZ, units_mod
    from .qlat1d import oracle_equivalence_check

    rng = random.Random(seed)
    bound = 3 if quick else 6

    def oracle():
        r = oracle_equivalence_check(bound)
        return r.ok, r.witness, None

    def assoc():
        labels = [QModZ.of(Fraction(a, b)) for b in range(1, 7) for a in range(b) if math.gcd(a, b) == 1]

        def mono():
            n, m = rng.randint(1, 6), rng.randint(1, 6)
            while math.gcd(n, m) != 1:
                n, m = rng.randint(1, 6), rng.randint(1, 6)
            return BCElement.monomial(n, rng.choice(labels), m)

        for _ in range(50 if quick else 1000):
            x, y, z = mono(), mono(), mono()
            if bc_product(bc_product(x, y), z) != bc_product(x, bc_product(y, z)):
                return False, (str(x), str(y), str(z)), None
        return True, None, None

    def gluing():
        worst = 0.0
        for b in (0.5, 1.0):
            worst = max(worst, abs(kms_low(b, Fraction(1, 2)) - (2 ** (1 - b) - 1)))
        for b in (1.5, 3.0):
            worst = max(worst, abs(kms_high(b, GroundStateLabel(2), Fraction(1, 2)).value - (2 ** (1 - b) - 1)))
        return worst < 1e-10, None, worst

    def eigen():
        gens = [BCElement.mu(2), BCElement.mu_star(3), BCElement.e(Fraction(1, 3)), BCElement.monomial(2, Fraction(1, 5), 3)]
        for x in gens:
            for y in gens:
                r = kms_eigen_check(3.0, x, y)
                if not r.ok:
                    return False, (str(x), str(y)), r.residual
        return True, None, None

    def galois():
        for N in range(1, level + 1):
            for k in units_mod(N):
                for a in range(N):
                    if not intertwine_check(GroundStateLabel(N), k, Fraction(a, N)):
                        return False, (N, k, a), None
        return True, None, None

    def phases():
        top = 6 if quick else 12
        ok = all(phase_orthonormality_check(N) for N in range(1, top + 1))
        ok = ok and all(phaseop_check(11, m) for m in range(12))
        poly = {(1,): Fraction(1), (2,): Fraction(1, 2)}
        ok = ok and all(renorm_identity_check(n, poly, [Fraction(1, 12)], fock_range=12) for n in (2, 3))
        return ok, None, None

    rep.run(f"bc: normal form vs groupoid, bound {bound}", oracle)
    rep.run("bc: associativity on random triples", assoc)
    rep.run("bc: low/high temperature values at r = 1/2", gluing, 1e-10)
    rep.run("bc: KMS eigenvector identity at beta = 3", eigen, 1e-9)
    rep.run(f"bc: Galois intertwining, levels <= {level}", galois)
    rep.run("bc: phase states", phases)


def _qlat1d_suite(rep: Report, quick: bool):
    from .qlat1d import check_div1, check_div_rel, pi2_identity, span_check

    Nmax, kmax = (4, 3) if quick else (8, 5)

    def divrel():
        for N in range(1, Nmax + 1):
            for k in range(1, kmax + 1):
                r = check_div_rel(N, k)
                if not r.ok:
                    return False, (N, k, r.witness), None
        return True, None, None

    def div1():
        top = 3 if quick else 6
        for N in range(1, top + 1):
            for k in range(1, 5):
                for b in range(1, 9):
                    for a in range(b):
                        if math.gcd(a, b) != 1:
                            continue
                        r = check_div1(N, k, Fraction(a, b))
                        if not r.ok:
                            return False, (N, k, f"{a}/{b}", r.witness), None
        return True, None, None

    def spans():
        for N in ((2, 3) if quick else (2, 3, 4, 8)):
            r = span_check(N)
            if not r.ok:
                return False, (N, r.details), None
        return True, None, None

    rep.run("qlat1d: division relations", divrel)
    rep.run("qlat1d: division by N at each label", div1)
    rep.run("qlat1d: pi_2 identity", lambda: (pi2_identity().ok, None, None))
    rep.run("qlat1d: products of e_1 span the level", spans)


def _lat2d_suite(rep: Report, quick: bool):
    from .lat2d import double_coset_reps, enumerate_index, omega, omega_ab, omega_ab_table, sl2_elements, sl2_order
    from .numkit import divisor_sigma, zeta_product

    top = 100 if quick else 500

    def counts():
        bad = [n for n in range(1, top + 1) if len(enumerate_index(n)) != divisor_sigma(1, n)]
        return not bad, bad or None, None

    def zeta12():
        zp = zeta_product(3.0, 10**4)
        return zp.consistent(), None, None

    def omegas():
        bad = [n for n in range(1, 51) if len(double_coset_reps(n)) != omega(n)]
        bad += [("sl2", N) for N in range(1, 7) if len(sl2_elements(N)) != sl2_order(N)]
        for p in (2, 3):
            for l in range(1, 4):
                for a in range(0, 5):
                    for b in range(a, 5):
                        if omega_ab(p, l, a, b) != omega_ab_table(p, l, a, b):
                            bad.append(("omega_ab", p, l, a, b))
        return not bad, bad[:5] or None, None

    rep.run(f"lat2d: index-n counts, n <= {top}", counts)
    rep.run("lat2d: sum sigma_1(n) n^-3 against zeta(3) zeta(2)", zeta12)
    rep.run("lat2d: omega, SL2 order, omega_ab table", omegas)


def _gl2_suite(rep: Report, seed: int, quick: bool):
    from .gl2_system import (
        ProjOp,
        QLattice2Level,
        classical_hecke_product,
        convolve,
        equi_distribution,
        hecke_T,
        hecke_embed,
        kms_state_eval,
        proba_closed_forms,
        sigma_recursion_check,
    )

    rng = random.Random(seed)

    def hecke():
        t2, t3 = hecke_T(2), hecke_T(3)
        target = dict(hecke_T(4))
        target[(2, 2)] += 2
        ok = classical_hecke_product(t2, t2) == target
        ok = ok and classical_hecke_product(t2, t3) == hecke_T(6)
        ok = ok and convolve(hecke_embed(t2), hecke_embed(t2)) == hecke_embed(target)
        ok = ok and convolve(hecke_embed(t2), hecke_embed(t3)) == hecke_embed(hecke_T(6))
        return ok, None, None

    def assoc():
        basis = [{(1, 2): 1}, {(1, 3): 1}, {(2, 2): 1}, {(1, 1): 1}, {(1, 4): 1}]
        for _ in range(10 if quick else 100):
            x, y, z = (hecke_embed({k: rng.randint(1, 3) for k in rng.choice(basis)}) for _ in range(3))
            if convolve(convolve(x, y), z) != convolve(x, convolve(y, z)):
                return False, None, None
        return True, None, None

    def kms():
        op = ProjOp.e(2, 0, 1)
        res = kms_state_eval(3.0, QLattice2Level(op.level, (1, 0, 0, 1)), op, 10**4)
        return res.within(11 / 32), None, abs(res.value - 11 / 32)

    def proba():
        worst = 0.0
        for p in (2, 3):
            for k, l in ((0, 0), (0, 1), (1, 1)):
                for beta in (2.5, 3.0):
                    op = ProjOp.pi_p(p, k, l)
                    res = kms_state_eval(beta, QLattice2Level(op.level, (1, 0, 0, 1)), op, 10**4 if not quick else 2000)
                    _, closed = proba_closed_forms(beta, p, k, l)
                    if not res.within(closed):
                        return False, (p, k, l, beta), abs(res.value - closed)
                    worst = max(worst, abs(res.value - closed))
        return True, None, worst

    def sigma():
        bad = [(p, sigma_recursion_check(p, 4 if quick else 6).failed_at) for p in (2, 3, 5)]
        bad = [b for b in bad if b[1] is not None]
        return not bad, bad or None, None

    def equi():
        devs = [equi_distribution(2, b, 10**4)[1] for b in (2.5, 2.2, 2.1)]
        return devs[0] > devs[1] > devs[2], devs, None

    rep.run("gl2: Hecke structure constants", hecke)
    rep.run("gl2: convolution associativity", assoc)
    rep.run("gl2: e_2(0,1) at beta = 3 is 11/32", kms)
    rep.run("gl2: projection probabilities", proba)
    rep.run("gl2: sigma recursion", sigma)
    rep.run("gl2: equidistribution as beta decreases", equi)


def _mf_suite(rep: Report, quick: bool):
    from fractions import Fraction as F

    import sympy

    from .gl2_system import QLattice2Level
    from .lat2d import enumerate_SN
    from .modforms import (
        E4,
        E6,
        JS,
        SAMPLE_TAUS,
        XS,
        div11_check,
        ek_series,
        nu_symbolic,
        omega_division_check,
        pn_poly,
        wealg_check,
        weierstrass_data,
        wp_lattice_oracle,
        wp_qseries,
    )

    order = 20 if quick else 50

    def wealg():
        r = wealg_check(6 if quick else 8, order)
        return r.ok, r.witness, None

    def nus():
        ok = nu_symbolic(4) == -5 * E4 and nu_symbolic(6) == -14 * E6 and nu_symbolic(8) == sympy.Rational(45, 7) * E4**2
        return ok, None, None

    def cj():
        M = 12 if quick else 30
        W = weierstrass_data(M + 4)
        j, c = W.j, W.c
        e4, e6 = ek_series(4, M + 4).series, ek_series(6, M + 4).series
        ok = (c * c * e4).truncate(M) == (j * (j - 1728)).scale(F(1, 5)).truncate(M)
        ok = ok and (c**3 * e6).truncate(M) == (j * (j - 1728) * (j - 1728)).scale(F(-2, 35)).truncate(M)
        return ok, None, None

    def pn():
        J = JS * (JS - 1728)
        ok = pn_poly(2) == sympy.Poly(XS**2 - J, JS, XS)
        ok = ok and pn_poly(3) == sympy.Poly(XS**3 - sympy.Rational(9, 5) * XS * J + sympy.Rational(4, 5) * JS * (JS - 1728) ** 2, JS, XS)
        return ok, None, None

    def wp():
        worst = 0.0
        for tau in SAMPLE_TAUS[: 1 if quick else 3]:
            for z in (0.3 + 0.2 * tau, 0.5, 0.5 * tau, 0.1 + 0.45 * tau):
                a, _ = wp_qseries(z, tau)
                b, _ = wp_lattice_oracle(z, tau, 500 if quick else 2000)
                worst = max(worst, abs(a - b))
        return worst < 1e-8, None, worst

    def div11():
        worst = 0.0
        for L in enumerate_SN(2):
            r = div11_check(2, QLattice2Level(2, (L.a, L.b, 0, L.d), SAMPLE_TAUS[0]))
            worst = max(worst, r.residual)
            if not r.ok:
                return False, r.witness, r.residual
        return True, None, worst

    def omega_div():
        worst = 0.0
        for L in enumerate_SN(2):
            r = omega_division_check(2, 2, QLattice2Level(2, (L.a, L.b, 0, L.d), SAMPLE_TAUS[0]))
            worst = max(worst, r.residual)
            if not r.ok:
                return False, {"stratum": str(L), **r.details["residuals"]}, r.residual
        return True, None, worst

    rep.run("mf: Eisenstein algebra relations", wealg)
    rep.run("mf: nu_4, nu_6, nu_8", nus)
    rep.run("mf: c^2 e4 and c^3 e6 in terms of j", cj)
    rep.run("mf: P_2 and P_3", pn)
    rep.run("mf: Weierstrass q-series vs lattice sum", wp, 1e-8)
    rep.run("mf: torsion sum of X_a at N = 2", div11, 1e-8)
    if not quick:
        rep.run("mf: weight-4 torsion sum at N = 2", omega_div, 1e-6)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
