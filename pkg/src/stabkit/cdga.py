"""Finitely presented graded-commutative dg-algebras and their homology."""
from __future__ import annotations

from dataclasses import dataclass

from .complexes import BasedComplex, BoxTable
from .fields import FieldSpec, UsageError
from .grading import Box, Degree
from .monomials import GeneratorSpec, enumerate_exponents
from .polynomials import (Polynomial, PolyContext, leibniz_differential,
                          parse_polynomial)


@dataclass
class CDGAPresentation:
    """Generators, their degrees, and a degree (0,-1) differential."""

    field: FieldSpec
    gens: list
    differential: dict  # generator name -> Polynomial (or parseable string)

    def __post_init__(self):
        self.ctx = PolyContext(self.field, self.gens)
        parsed = {}
        for name, poly in self.differential.items():
            if name not in self.ctx.index:
                raise UsageError(f"differential on unknown generator {name!r}")
            if not isinstance(poly, Polynomial):
                poly = parse_polynomial(self.ctx, poly)
            parsed[name] = poly
        self.differential = parsed

    def d_of(self, name) -> Polynomial:
        return self.differential.get(name, Polynomial.zero(self.ctx))

    def d(self, poly: Polynomial) -> Polynomial:
        return leibniz_differential(self.ctx, self.differential, poly)


def validate_cdga(P: CDGAPresentation) -> list:
    """Diagnostics for homogeneity, degree (0,-1), and d^2 = 0; [] means ok."""
    out = []
    for name, poly in P.differential.items():
        g = P.ctx.gens[P.ctx.index[name]]
        try:
            deg = poly.homogeneous_degree()
        except UsageError as e:
            out.append(f"d({name}): {e}")
            continue
        if deg is not None and (deg.n != g.degree.n or deg.d != g.degree.d - 1):
            out.append(f"d({name}) has degree ({deg.n},{deg.d}), expected "
                       f"({g.degree.n},{g.degree.d - 1})")
    if out:
        return out
    for name in P.differential:
        dd = P.d(P.d_of(name))
        if not dd.is_zero():
            out.append(f"d^2({name}) = {dd} != 0")
    return out


def build_cdga_complex(P: CDGAPresentation, box: Box, d_margin=1) -> BasedComplex:
    """Chain groups = monomials in the box (d widened by the margin)."""
    diags = validate_cdga(P)
    if diags:
        raise UsageError("; ".join(diags))
    wide = Box(n_max=box.n_max, d_min=box.d_min - d_margin,
               d_max=box.d_max + d_margin, n_min=box.n_min)
    gens_sorted, expos = enumerate_exponents(P.field, P.gens, wide)
    assert gens_sorted == P.ctx.gens
    cx = BasedComplex(P.field)
    by_spot = {}
    for deg, monos in sorted(expos.items(), key=lambda kv: (kv[0].n, kv[0].d)):
        for m in monos:
            cx.add_basis_element(deg.n, deg.d, P.ctx.monomial_str(m))
        by_spot.setdefault((deg.n, deg.d), []).extend(monos)
    for (n, d), monos in by_spot.items():
        for m in monos:
            dm = P.d(Polynomial(P.ctx, {m: P.field.one()}))
            if dm.is_zero():
                continue
            if d - 1 < wide.d_min:
                continue
            image = {P.ctx.monomial_str(mm): c for mm, c in dm.terms.items()}
            cx.set_differential_column(n, d, P.ctx.monomial_str(m), image)
    cx.check_d_squared()
    return cx


def cdga_homology_box(P: CDGAPresentation, box: Box, with_basis=True,
                      budget=None) -> BoxTable:
    """Homology dims (and echelonized representative cycles) per degree."""
    cx = build_cdga_complex(P, box)
    kwargs = {} if budget is None else {"budget": budget}
    return cx.homology_table(box, with_basis=with_basis, **kwargs)


def _element_cycle(P: CDGAPresentation, element) -> Polynomial:
    poly = element if isinstance(element, Polynomial) else \
        parse_polynomial(P.ctx, element)
    if not P.d(poly).is_zero():
        raise UsageError(f"element {poly} is not a cycle")
    poly.homogeneous_degree()
    return poly


def cone_complex(cx: BasedComplex, actions, box: Box) -> BasedComplex:
    """Iterated mapping cone of commuting chain operators.

    actions: list of (name, Degree (N,D), matrix-provider) where the provider
    maps (n, d) to {source label -> {target label: scalar}} realizing the
    operator (n,d) -> (n+N, d+D). The cone adjoins one exterior letter of
    degree (N, D+1) per action; D(m e_S) = (dm) e_S
    + sum_i (-1)^(d(m)+sum of earlier letter degrees) (a_i m) e_{S-i}.

    The differential preserves the grading n, so cone spots outside
    [n_min, n_max] are dropped; d-truncation effects stay below box.d_min.
    """
    F = cx.field
    r = len(actions)
    out = BasedComplex(F)
    shift, members = {}, {}
    for bits in range(2 ** r):
        S = [i for i in range(r) if (bits >> i) & 1]
        members[bits] = S
        shift[bits] = (sum(actions[i][1].n for i in S),
                       sum(actions[i][1].d + 1 for i in S))

    def cone_label(bits, label):
        es = ".".join("e_" + actions[i][0] for i in members[bits])
        return f"{label}|{es}" if es else label

    for bits in range(2 ** r):
        sn, sd = shift[bits]
        for (n, d), labels in sorted(cx.basis.items()):
            nn, nd = n + sn, d + sd
            if not (box.n_min <= nn <= box.n_max):
                continue
            for lab in labels:
                out.add_basis_element(nn, nd, cone_label(bits, lab))

    provider_cache = {}

    def action_column(i, n, d, lab):
        key = (i, n, d)
        if key not in provider_cache:
            provider_cache[key] = actions[i][2](n, d)
        return provider_cache[key].get(lab, {})

    for bits in range(2 ** r):
        sn, sd = shift[bits]
        S = members[bits]
        for (n, d), labels in sorted(cx.basis.items()):
            nn, nd = n + sn, d + sd
            if (nn, nd) not in out.basis:
                continue
            target_index = out._index.get((nn, nd - 1), {})
            for lab in labels:
                image = {}
                for tgt, val in _column_of(cx, n, d, lab).items():
                    image[cone_label(bits, tgt)] = F.coerce(val)
                for pos, i in enumerate(S):
                    nbits = bits & ~(1 << i)
                    eps = d + sum(actions[j][1].d + 1 for j in S[:pos])
                    for tgt, val in action_column(i, n, d, lab).items():
                        key = cone_label(nbits, tgt)
                        v = F.coerce(val)
                        if eps % 2:
                            v = F.neg(v)
                        image[key] = F.add(image.get(key, F.zero()), v)
                image = {k: v for k, v in image.items() if not F.is_zero(v)}
                if not image:
                    continue
                if any(k not in target_index for k in image):
                    if nd - 1 >= box.d_min - 1:
                        raise AssertionError(
                            f"cone target missing at ({nn},{nd - 1})")
                    continue
                out.set_differential_column(nn, nd, cone_label(bits, lab), image)
    _check_d_squared_above(out, box.d_min)
    return out


def _check_d_squared_above(cx: BasedComplex, d_floor: int):
    for (n, d) in list(cx.basis):
        if d < d_floor + 1:
            continue
        if not cx.differential(n, d - 1).matmul(cx.differential(n, d)).is_zero():
            raise AssertionError(f"cone d^2 != 0 at ({n},{d})")


def _column_of(cx: BasedComplex, n, d, label) -> dict:
    col = cx.index_of(n, d, label)
    rows = cx.basis.get((n, d - 1), [])
    out = {}
    for (i, j, v) in cx.entries.get((n, d), ()):
        if j == col:
            out[rows[i]] = v
    return out


def koszul_quotient_cdga(P: CDGAPresentation, elements, box: Box,
                         with_basis=False) -> BoxTable:
    """Kill cycles of a cdga by iterated mapping cones at the chain level."""
    polys = [_element_cycle(P, e) for e in elements]
    degs = [p.homogeneous_degree() for p in polys]
    if any(deg is None for deg in degs):
        raise UsageError("cannot kill the zero element via a cdga cone; "
                         "use the table-level quotient")
    max_shift_d = sum(deg.d + 1 for deg in degs)
    inner_box = Box(n_max=box.n_max, d_min=box.d_min - max_shift_d - 1,
                    d_max=box.d_max + 1, n_min=box.n_min)
    cx = build_cdga_complex(P, inner_box)

    def provider_for(poly):
        def provider(n, d):
            cols = {}
            for lab in cx.basis.get((n, d), ()):  # multiply basis monomial by poly
                mono = _label_to_poly(P, lab)
                prod = poly * mono
                cols[lab] = {P.ctx.monomial_str(m): c
                             for m, c in prod.terms.items()}
            return cols
        return provider

    actions = [(f"k{i}", deg, provider_for(poly))
               for i, (poly, deg) in enumerate(zip(polys, degs))]
    cone = cone_complex(cx, actions, box)
    table = cone.homology_table(box, with_basis=with_basis)
    table.mode = "chain-cone"
    return table


def _label_to_poly(P: CDGAPresentation, label) -> Polynomial:
    return parse_polynomial(P.ctx, label if label != "1" else "1")


def koszul_quotient_table(table_complex: BasedComplex, actions, box: Box,
                          with_basis=False) -> BoxTable:
    """Table-level iterated cone: input complex has zero differential."""
    cone = cone_complex(table_complex, actions, box)
    out = cone.homology_table(box, with_basis=with_basis)
    out.mode = "table-les"
    return out
