"""Monomial bases of free graded-commutative algebras and truncations."""
from __future__ import annotations

from dataclasses import dataclass

from .fields import FieldSpec, UsageError
from .grading import Box, Degree


@dataclass(frozen=True)
class GeneratorSpec:
    """A named algebra generator with its degree and commutation parity.

    parity 'even' means polynomial (unbounded exponent), 'odd' means exterior
    (exponent <= 1, Koszul sign -1 past other odd generators). 'auto' derives
    it from the homological degree and the field characteristic.
    """

    name: str
    degree: Degree
    parity: str = "auto"

    def resolved_parity(self, field: FieldSpec) -> str:
        if self.parity in ("even", "odd"):
            return self.parity
        if self.parity != "auto":
            raise UsageError(f"bad parity {self.parity!r}")
        if field.char == 2:
            return "even"
        return "odd" if self.degree.d % 2 else "even"


def sort_generators(gens) -> list:
    """Name order (UTF-8 bytes), the global monomial-order convention."""
    names = [g.name for g in gens]
    if len(set(names)) != len(names):
        raise UsageError("duplicate generator names")
    return sorted(gens, key=lambda g: g.name.encode("utf-8"))


def check_connective(gens):
    for g in gens:
        if g.degree.n <= 0 and g.degree.d <= 0:
            raise UsageError(
                f"non-connective generator {g.name} at {g.degree}")


def monomial_str(gens_sorted, expo) -> str:
    parts = []
    for g, e in zip(gens_sorted, expo):
        if e == 1:
            parts.append(g.name)
        elif e > 1:
            parts.append(f"{g.name}^{e}")
    return "*".join(parts) if parts else "1"


def monomial_degree(gens_sorted, expo) -> Degree:
    n = sum(e * g.degree.n for g, e in zip(gens_sorted, expo))
    d = sum(e * g.degree.d for g, e in zip(gens_sorted, expo))
    if gens_sorted and all(g.degree.f is not None for g in gens_sorted):
        f = sum(e * g.degree.f for g, e in zip(gens_sorted, expo))
        return Degree(n, d, f)
    return Degree(n, d)


def enumerate_exponents(field: FieldSpec, gens, box: Box, caps=None):
    """All exponent tuples whose degree lies in the box, graded-lex order.

    caps: optional dict name -> exclusive exponent bound (truncations).
    Generators must be connective enough that the box cuts the enumeration
    finite: n >= 1, or n <= 0 with d >= 1.
    """
    check_connective(gens)
    gens_sorted = sort_generators(gens)
    caps = caps or {}
    out = {}

    def bound(g) -> int:
        cap = caps.get(g.name)
        limits = []
        if g.degree.n >= 1:
            limits.append((box.n_max - min(0, box.n_min)) // g.degree.n)
        if g.degree.d >= 1:
            limits.append((box.d_max - min(0, box.d_min)) // g.degree.d)
        if g.resolved_parity(field) == "odd":
            limits.append(1)
        if cap is not None:
            limits.append(cap - 1)
        if not limits:
            raise UsageError(f"generator {g.name} cannot be bounded by the box")
        return max(0, min(limits))

    maxes = [bound(g) for g in gens_sorted]

    def rec(idx, expo, n, d):
        if n > box.n_max and all(g.degree.n >= 0 for g in gens_sorted[idx:]):
            return
        if idx == len(gens_sorted):
            deg = monomial_degree(gens_sorted, expo)
            if box.contains_nd(deg.n, deg.d):
                out.setdefault(deg, []).append(tuple(expo))
            return
        g = gens_sorted[idx]
        for e in range(maxes[idx] + 1):
            expo.append(e)
            rec(idx + 1, expo, n + e * g.degree.n, d + e * g.degree.d)
            expo.pop()

    rec(0, [], 0, 0)
    for deg in out:
        out[deg].sort(reverse=True)  # graded-lex: higher power of the first name first
    return gens_sorted, out


def enumerate_monomials(field: FieldSpec, gens, box: Box):
    """Map Degree -> ordered list of monomial strings for the free algebra."""
    gens_sorted, table = enumerate_exponents(field, gens, box)
    return {deg: [monomial_str(gens_sorted, e) for e in expos]
            for deg, expos in table.items()}


def monomial_dims(field: FieldSpec, gens, box: Box, caps=None):
    """Map Degree -> count of monomials (0-entries omitted)."""
    _, table = enumerate_exponents(field, gens, box, caps=caps)
    return {deg: len(expos) for deg, expos in table.items()}


def truncated_quotient_dims(field: FieldSpec, gens, truncations, box: Box):
    """Dimensions of the truncated quotient Lambda[U] (x) k[x..]/(x^M..) (x) Sym[W].

    truncations: dict generator name -> power M >= 1; only polynomial
    generators may be truncated.
    """
    by_name = {g.name: g for g in gens}
    for name, power in truncations.items():
        if name not in by_name:
            raise UsageError(f"unknown generator {name!r} in truncations")
        if power < 1:
            raise UsageError(f"truncation power for {name!r} must be >= 1")
        if by_name[name].resolved_parity(field) == "odd":
            raise UsageError(f"cannot truncate exterior generator {name!r}")
    return monomial_dims(field, gens, box, caps=dict(truncations))
