"""Graded-commutative polynomial arithmetic with Koszul signs.

Monomials are exponent tuples over a name-sorted generator list; odd
(exterior) generators square to zero and anticommute. Signs are governed
solely by homological degree.
"""
from __future__ import annotations

import re

from .fields import FieldSpec, UsageError
from .grading import Degree
from .monomials import GeneratorSpec, monomial_degree, monomial_str, sort_generators


class PolyContext:
    """A fixed generator list with resolved parities over a field."""

    def __init__(self, field: FieldSpec, gens):
        self.field = field
        self.gens = sort_generators(gens)
        self.index = {g.name: i for i, g in enumerate(self.gens)}
        self.parity = [g.resolved_parity(field) for g in self.gens]
        self.ngens = len(self.gens)

    def unit_monomial(self):
        return (0,) * self.ngens

    def gen_monomial(self, name):
        if name not in self.index:
            raise UsageError(f"unknown generator {name!r}")
        e = [0] * self.ngens
        e[self.index[name]] = 1
        return tuple(e)

    def monomial_degree(self, expo) -> Degree:
        return monomial_degree(self.gens, expo)

    def monomial_str(self, expo) -> str:
        return monomial_str(self.gens, expo)

    # -- monomial products -------------------------------------------------
    def mul_monomials(self, a, b):
        """(sign, product exponent tuple) or (0, None) when the product dies.

        Koszul signs are governed solely by homological degree; parity caps
        exponents. Over char != 2 an odd-degree letter squares to zero.
        """
        char2 = self.field.char == 2
        for i in range(self.ngens):
            if a[i] + b[i] < 2:
                continue
            if self.parity[i] == "odd":
                return 0, None
            if not char2 and self.gens[i].degree.d % 2:
                return 0, None
        sign = 1
        if not char2:
            odd_a = [i for i in range(self.ngens)
                     if a[i] and self.gens[i].degree.d % 2]
            crossings = 0
            for j in range(self.ngens):
                if b[j] and self.gens[j].degree.d % 2:
                    crossings += sum(a[i] for i in odd_a if i > j) * b[j]
            if crossings % 2:
                sign = -1
        out = tuple(x + y for x, y in zip(a, b))
        return sign, out


class Polynomial:
    """Immutable polynomial: dict {exponent tuple: scalar} over a PolyContext."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: PolyContext, terms=None):
        F = ctx.field
        clean = {}
        for m, c in (terms or {}).items():
            c = F.coerce(c)
            if not F.is_zero(c):
                clean[m] = c
        self.ctx = ctx
        self.terms = clean

    @staticmethod
    def zero(ctx):
        return Polynomial(ctx)

    @staticmethod
    def unit(ctx):
        return Polynomial(ctx, {ctx.unit_monomial(): ctx.field.one()})

    @staticmethod
    def generator(ctx, name):
        return Polynomial(ctx, {ctx.gen_monomial(name): ctx.field.one()})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        F = self.ctx.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = F.add(out.get(m, F.zero()), c)
        return Polynomial(self.ctx, out)

    def __sub__(self, other):
        F = self.ctx.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = F.sub(out.get(m, F.zero()), c)
        return Polynomial(self.ctx, out)

    def scale(self, c):
        F = self.ctx.field
        return Polynomial(self.ctx, {m: F.mul(v, F.coerce(c))
                                     for m, v in self.terms.items()})

    def __mul__(self, other):
        F = self.ctx.field
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                sign, m = self.ctx.mul_monomials(ma, mb)
                if sign == 0:
                    continue
                c = F.mul(ca, cb)
                if sign < 0:
                    c = F.neg(c)
                out[m] = F.add(out.get(m, F.zero()), c)
        return Polynomial(self.ctx, out)

    def homogeneous_degree(self) -> Degree | None:
        """The common degree of all terms, None for 0, error if mixed."""
        degs = {self.ctx.monomial_degree(m).as_pair() for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise UsageError(f"inhomogeneous polynomial: degrees {sorted(degs)}")
        n, d = degs.pop()
        return Degree(n, d)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            ms = self.ctx.monomial_str(m)
            if ms == "1":
                parts.append(str(c))
            elif c == self.ctx.field.one():
                parts.append(ms)
            else:
                parts.append(f"{c}*{ms}")
        return " + ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9']*)"
                    r"(?:\^(?P<pow>\d+))?|(?P<op>[*+()-]))")


def parse_polynomial(ctx: PolyContext, text) -> Polynomial:
    """Parse 'sigma*z + 2*x^2' style strings (integer coefficients, ^ powers)."""
    if isinstance(text, (int,)):
        return Polynomial.unit(ctx).scale(text)
    text = text.strip()
    if not text or text == "0":
        return Polynomial.zero(ctx)
    # split into +/- separated terms (no parentheses in the schema)
    terms = []
    cur, sign = "", 1
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip():
            terms.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif ch in "+-" and depth == 0 and not cur.strip():
            sign = sign * (1 if ch == "+" else -1)
        else:
            cur += ch
    if cur.strip():
        terms.append((sign, cur))
    out = Polynomial.zero(ctx)
    for sgn, term in terms:
        poly = Polynomial.unit(ctx).scale(sgn)
        for factor in term.split("*"):
            factor = factor.strip().strip("()")
            if not factor:
                raise UsageError(f"empty factor in term {term!r}")
            if re.fullmatch(r"-?\d+", factor):
                poly = poly.scale(int(factor))
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9']*)(?:\^(\d+))?", factor)
            if not m:
                raise UsageError(f"cannot parse factor {factor!r}")
            name, power = m.group(1), int(m.group(2) or 1)
            g = Polynomial.generator(ctx, name)
            for _ in range(power):
                poly = poly * g
        out = out + poly
    return out


def leibniz_differential(ctx: PolyContext, diff_on_gens, poly: Polynomial) -> Polynomial:
    """Extend d (given on generators as Polynomials) to poly as an odd derivation."""
    F = ctx.field
    out = Polynomial.zero(ctx)
    for mono, coeff in poly.terms.items():
        hom_prefix = 0
        for i in range(ctx.ngens):
            e = mono[i]
            if e == 0:
                continue
            g = ctx.gens[i]
            dg = diff_on_gens.get(g.name)
            if dg is not None and not dg.is_zero():
                # m = A * g^e * B; d on this slot: e * A * g^(e-1) * dg * B
                # with the sign of moving d past A: (-1)^{hom(A)}
                prefix = tuple(mono[j] if j < i else 0 for j in range(ctx.ngens))
                rest = tuple((e - 1) if j == i else (mono[j] if j > i else 0)
                             for j in range(ctx.ngens))
                term = Polynomial(ctx, {prefix: F.coerce(coeff)})
                term = term * dg
                term = term * Polynomial(ctx, {rest: F.one()})
                term = term.scale(e)
                if hom_prefix % 2:
                    term = term.scale(-1)
                out = out + term
            hom_prefix += e * g.degree.d
    return out
