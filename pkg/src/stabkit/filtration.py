"""Spectral sequences of complete filtered complexes.

A filtered complex is a finite based complex with a filtration value per
basis element; the differential may only preserve or lower filtration.
Pages are computed from chain-level representatives,
E^r_f = Z^r_f / (Z^{r-1}_{f-1} + d Z^{r-1}_{f+r-1}),
so classes can be traced from page to page, and the tau-module structure of
filtered homotopy is read off from the same data as a persistence barcode.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cdga import CDGAPresentation, build_cdga_complex
from .complexes import BasedComplex
from .fields import UsageError
from .grading import Box, Degree
from .hopf import HopfPresentation, cobar_complex, materialize
from .sparse import (SparseMatrix, image_basis, in_span, kernel_basis, rank,
                     solve)


class FilteredComplex:
    """A based complex with filtration values; strata fil_f = (phi <= f)."""

    def __init__(self, cx: BasedComplex, filtration: dict, box: Box):
        self.cx = cx
        self.filt = filtration          # (n,d) -> list of ints per basis elt
        self.box = box
        values = [v for vals in filtration.values() for v in vals]
        self.f_min = min(values) if values else 0
        self.f_max = max(values) if values else 0
        self._zcache = {}
        self._check()

    def _check(self):
        for (n, d), labels in self.cx.basis.items():
            if len(self.filt.get((n, d), ())) != len(labels):
                raise UsageError(f"filtration values missing at ({n},{d})")
        for (n, d) in self.cx.basis:
            phi_src = self.filt[(n, d)]
            phi_tgt = self.filt.get((n, d - 1), [])
            for (i, j, v) in self.cx.entries.get((n, d), ()):
                if phi_tgt[i] > phi_src[j]:
                    raise UsageError(
                        f"differential raises filtration at ({n},{d})")

    def stratum_columns(self, n, d, f):
        """Indices of basis elements of fil_f at (n,d)."""
        return [i for i, phi in enumerate(self.filt.get((n, d), ())) if phi <= f]

    def page_span(self) -> int:
        """Pages stabilize at r > f_max - f_min."""
        return self.f_max - self.f_min + 1


def filtered_cdga_complex(P: CDGAPresentation, box: Box) -> FilteredComplex:
    """The multiplicative weight filtration: generators at f = -1."""
    cx = build_cdga_complex(P, box)
    filt = {}
    for (n, d), labels in cx.basis.items():
        vals = []
        for lab in labels:
            if lab == "1":
                vals.append(0)
            else:
                weight = sum(int(part.split("^")[1]) if "^" in part else 1
                             for part in lab.split("*"))
                vals.append(-weight)
        filt[(n, d)] = vals
    fbox = Box(n_max=box.n_max, d_min=box.d_min, d_max=box.d_max,
               n_min=box.n_min, f_min=-box.n_max - 1, f_max=0)
    return FilteredComplex(cx, filt, fbox)


def aug_filtered_cobar(A: HopfPresentation, box: Box) -> FilteredComplex:
    """Cobar with the augmentation-ideal filtration on letters."""
    cx = cobar_complex(A, box)
    weights = materialize(A, box.n_max).weights
    filt = {}
    for (n, d), labels in cx.basis.items():
        vals = []
        for lab in labels:
            if lab == "[]":
                vals.append(0)
            else:
                letters = lab[1:-1].split("|")
                vals.append(-sum(weights[x] for x in letters))
        filt[(n, d)] = vals
    fbox = Box(n_max=box.n_max, d_min=box.d_min, d_max=box.d_max,
               n_min=box.n_min, f_min=-box.n_max - 1, f_max=0)
    return FilteredComplex(cx, filt, fbox)


@dataclass
class PageSpot:
    """One tridegree of one page, with chain-level representatives."""

    reps: SparseMatrix       # ambient chains at (n,d), one column per class
    denominator: SparseMatrix

    @property
    def dim(self):
        return self.reps.cols

    def reduce(self, vec: dict):
        """Coordinates of an ambient chain's class, None if not in Z^r + den."""
        sol = solve(self.denominator.hstack(self.reps), vec)
        if sol is None:
            return None
        nb = self.denominator.cols
        return {j - nb: v for j, v in sol.items() if j >= nb}


@dataclass
class Page:
    """One page E^r: spot subquotients plus d^r matrices."""

    r: int
    spots: dict = field(default_factory=dict)         # (n,d,f) -> PageSpot
    differentials: dict = field(default_factory=dict)  # (n,d,f) -> SparseMatrix

    def dim(self, n, d, f) -> int:
        spot = self.spots.get((n, d, f))
        return spot.dim if spot else 0

    def to_json(self):
        groups = [{"n": n, "d": d, "f": f, "dim": spot.dim}
                  for (n, d, f), spot in sorted(self.spots.items()) if spot.dim]
        diffs = []
        for (n, d, f), mat in sorted(self.differentials.items()):
            if mat.is_zero():
                continue
            diffs.append({"from": {"n": n, "d": d, "f": f},
                          "to": {"n": n, "d": d - 1, "f": f - self.r},
                          "rank": rank(mat),
                          "entries": [[i, j, str(v)] for (i, j), v
                                      in sorted(mat.entries.items())]})
        return {"page": self.r, "groups": groups, "differentials": diffs}


def _z_space(fc: FilteredComplex, n, d, f, r) -> SparseMatrix:
    """Ambient basis of Z^r_f = {x in F_f : dx in F_{f-r}} at (n,d)."""
    F = fc.cx.field
    cols = fc.stratum_columns(n, d, f)
    dim = fc.cx.dim(n, d)
    if not cols:
        return SparseMatrix.zero(F, dim, 0)
    # normalize the cache key: only the cutoffs matter
    f_eff = min(f, fc.f_max)
    cut = f - r
    phi_tgt_all = fc.filt.get((n, d - 1), [])
    if not any(phi > cut for phi in phi_tgt_all):
        cut = fc.f_max  # no constraint rows at all
    key = (n, d, f_eff, cut)
    hit = fc._zcache.get(key)
    if hit is not None:
        return hit
    diff = fc.cx.differential(n, d)
    high_rows = [i for i, phi in enumerate(phi_tgt_all) if phi > cut]
    row_pos = {i: k for k, i in enumerate(high_rows)}
    col_pos = {j: k for k, j in enumerate(cols)}
    ent = []
    for (i, j), v in diff.entries.items():
        if i in row_pos and j in col_pos:
            ent.append((row_pos[i], col_pos[j], v))
    restricted = SparseMatrix(F, len(high_rows), len(cols), ent)
    K = kernel_basis(restricted)
    ambient_cols = []
    for col in K.columns():
        ambient_cols.append({cols[j]: v for j, v in col.items()})
    out = SparseMatrix.from_columns(F, dim, ambient_cols)
    fc._zcache[key] = out
    return out


def _page_spot(fc: FilteredComplex, n, d, f, r) -> PageSpot:
    F = fc.cx.field
    dim = fc.cx.dim(n, d)
    Z = _z_space(fc, n, d, f, r)
    Zlow = _z_space(fc, n, d, f - 1, r - 1)
    Zup = _z_space(fc, n, d + 1, f + r - 1, r - 1)
    dZup_cols = []
    diff_up = fc.cx.differential(n, d + 1)
    for col in Zup.columns():
        img = diff_up.apply(col)
        if img:
            dZup_cols.append(img)
    den = image_basis(Zlow.hstack(SparseMatrix.from_columns(F, dim, dZup_cols)))
    chosen = []
    span = den
    for col in Z.columns():
        if not in_span(span, col):
            chosen.append(col)
            span = span.hstack(SparseMatrix.from_columns(F, dim, [col]))
    return PageSpot(SparseMatrix.from_columns(F, dim, chosen), den)


def compute_pages(fc: FilteredComplex, r_max=None) -> list:
    """Pages E^1 .. E^{r_max} with explicit differentials.

    The final page equals E^infinity when r_max >= the filtration span
    (flagged on the result).
    """
    span = fc.page_span()
    if r_max is None:
        r_max = span
    box = fc.box
    f_lo = box.f_min if box.f_min is not None else fc.f_min
    f_hi = box.f_max if box.f_max is not None else fc.f_max
    spots_nd = sorted(fc.cx.basis)
    pages = []
    for r in range(1, r_max + 1):
        page = Page(r)
        for (n, d) in spots_nd:
            if not (box.n_min <= n <= box.n_max):
                continue
            if not (box.d_min - 1 <= d <= box.d_max + 1):
                continue
            # E^r_{n,d,f} is a subquotient of gr_f, so only occupied
            # filtration values can carry anything
            for f in sorted({phi for phi in fc.filt[(n, d)]}):
                if not (f_lo <= f <= f_hi):
                    continue
                spot = _page_spot(fc, n, d, f, r)
                if spot.dim:
                    page.spots[(n, d, f)] = spot
        for (n, d, f), spot in page.spots.items():
            tgt = page.spots.get((n, d - 1, f - r))
            diff = fc.cx.differential(n, d)
            cols = []
            for col in spot.reps.columns():
                img = diff.apply(col)
                if tgt is None:
                    if img and _nonzero_on_page(fc, page, n, d - 1, f - r, img):
                        raise AssertionError(
                            f"d^{r} image misses its spot at ({n},{d - 1},{f - r})")
                    cols.append({})
                    continue
                coords = tgt.reduce(img)
                if coords is None:
                    raise AssertionError(
                        f"d^{r} image not in Z^{r} at ({n},{d - 1},{f - r})")
                cols.append(coords)
            tgt_dim = tgt.dim if tgt else 0
            page.differentials[(n, d, f)] = SparseMatrix.from_columns(
                fc.cx.field, tgt_dim, cols)
        pages.append(page)
    return pages


def _nonzero_on_page(fc, page, n, d, f, vec) -> bool:
    spot = _page_spot(fc, n, d, f, page.r)
    coords = spot.reduce(vec)
    return bool(coords)


def page_is_infinity(fc: FilteredComplex, r: int) -> bool:
    return r >= fc.page_span()


def total_homology_dims(fc: FilteredComplex, box: Box) -> dict:
    """Homology of the colimit (the full complex), per bidegree."""
    table = fc.cx.homology_table(box)
    return dict(table.dims)


# ----------------------------------------------------------- tau modules --
@dataclass
class TauBar:
    birth: int
    length: int | None   # None = free (infinite bar)


@dataclass
class TauModuleTable:
    """Per bidegree: the k[tau]-module decomposition of filtered homotopy."""

    bars: dict           # (n,d) -> list of TauBar
    f_range: tuple

    def free_rank(self, n, d) -> int:
        return sum(1 for b in self.bars.get((n, d), ()) if b.length is None)

    def torsion_orders(self, n, d):
        return sorted((b.birth, b.length) for b in self.bars.get((n, d), ())
                      if b.length is not None)

    def dim_at(self, n, d, f) -> int:
        out = 0
        for b in self.bars.get((n, d), ()):
            if b.birth <= f and (b.length is None or f < b.birth + b.length):
                out += 1
        return out


def _homology_rank_map(fc: FilteredComplex, n, d, fa, fb) -> int:
    """rank of H_{n,d}(fil_fa) -> H_{n,d}(fil_fb)."""
    F = fc.cx.field
    dim = fc.cx.dim(n, d)
    Za = _cycles_in_stratum(fc, n, d, fa)
    Bb = _boundaries_in_stratum(fc, n, d, fb)
    return rank(Za.hstack(Bb)) - rank(Bb)


def _cycles_in_stratum(fc, n, d, f) -> SparseMatrix:
    F = fc.cx.field
    cols = fc.stratum_columns(n, d, f)
    diff = fc.cx.differential(n, d)
    ent = [(i, cols.index(j), v) for (i, j), v in diff.entries.items()
           if j in cols]
    restricted = SparseMatrix(F, diff.rows, len(cols), ent)
    K = kernel_basis(restricted)
    amb = [{cols[j]: v for j, v in col.items()} for col in K.columns()]
    return SparseMatrix.from_columns(F, fc.cx.dim(n, d), amb)


def _boundaries_in_stratum(fc, n, d, f) -> SparseMatrix:
    F = fc.cx.field
    cols = fc.stratum_columns(n, d + 1, f)
    diff = fc.cx.differential(n, d + 1)
    imgs = []
    for j in cols:
        col = diff.column(j)
        if col:
            imgs.append(col)
    return image_basis(SparseMatrix.from_columns(F, fc.cx.dim(n, d), imgs))


def tau_modules(fc: FilteredComplex, box: Box) -> TauModuleTable:
    """Persistence barcode of f -> H(fil_f): free part + tau^k torsion."""
    lo, hi = fc.f_min - 1, fc.f_max
    bars = {}
    for (n, d) in sorted(fc.cx.basis):
        if not (box.n_min <= n <= box.n_max and box.d_min <= d <= box.d_max):
            continue
        ranks = {}
        for fa in range(lo, hi + 1):
            for fb in range(fa, hi + 1):
                ranks[(fa, fb)] = _homology_rank_map(fc, n, d, fa, fb)

        def r(a, b):
            if a < lo:
                return 0
            return ranks[(a, min(b, hi))]

        out = []
        for a in range(lo, hi + 1):
            # infinite bars born at a
            inf_count = r(a, hi) - r(a - 1, hi)
            for _ in range(inf_count):
                out.append(TauBar(a, None))
            for b in range(a + 1, hi + 1):
                mult = (r(a, b - 1) - r(a, b)) - (r(a - 1, b - 1) - r(a - 1, b))
                for _ in range(mult):
                    out.append(TauBar(a, b - a))
        if out:
            bars[(n, d)] = out
    return TauModuleTable(bars, (lo, hi))


# ------------------------------------------------------ survival analysis --
@dataclass
class SurvivalReport:
    status: str                  # 'permanent' | 'dies' | 'undecided'
    dies_at: int | None = None
    m_min: int | None = None
    certified_to_page: int | None = None
    obstruction: tuple | None = None

    def __str__(self):
        if self.status == "dies":
            return f"dies at page {self.dies_at}"
        if self.status == "permanent":
            extra = f" for the p^{self.m_min}-th power" if self.m_min else ""
            return (f"permanent within box{extra} "
                    f"(certified to page {self.certified_to_page})")
        return f"undecided (obstruction at {self.obstruction})"


def _spot_death_page(fc, pages, tri):
    """('support', r) for the least r with d^r != 0 out of the spot,
    ('hit', r) if the spot is quotiented away entering page r+1 without
    supporting, or None if it survives every computed page."""
    for page in pages:
        if page.dim(*tri) == 0:
            return ("hit", page.r - 1)
        mat = page.differentials.get(tri)
        if mat is not None and not mat.is_zero():
            return ("support", page.r)
    return None


def survival_analysis(fc: FilteredComplex, pages, target: Degree, p: int,
                      max_power=4) -> SurvivalReport:
    """Power-rule survival for the class spanning the spot at `target`.

    Reports the least M such that every differential target
    E^r_{p^M n, p^M d - 1, p^M f - r} vanishes for all analyzable r >= the
    page p^M r_0 guaranteed by the Leibniz/power rule, where r_0 is the page
    on which the base class dies (r_0 = infinity means M = 0 works).
    """
    tri = (target.n, target.d, target.f)
    if target.f is None:
        raise UsageError("survival target needs a tridegree")
    if not pages:
        raise UsageError("no pages computed")
    if pages[0].dim(*tri) == 0:
        raise UsageError(f"no class at {target}")
    horizon = pages[-1].r
    death = _spot_death_page(fc, pages, tri)
    if death is None:
        ok, obstruction = _targets_vanish(fc, pages, tri, 1)
        if ok:
            return SurvivalReport("permanent", m_min=0,
                                  certified_to_page=horizon)
        return SurvivalReport("undecided", obstruction=obstruction)
    kind, r0 = death
    if kind != "support":
        # the power rule needs the class to die by supporting a differential
        return SurvivalReport("dies", dies_at=r0)
    for M in range(1, max_power + 1):
        q = p ** M
        ptri = (q * target.n, q * target.d, q * target.f)
        if ptri[0] > fc.box.n_max:
            break
        if pages[0].dim(*ptri) == 0:
            continue
        guaranteed = q * r0  # the p^M-th power survives until E^{p^M r_0}
        ok, obstruction = _targets_vanish(fc, pages, ptri, guaranteed)
        if ok:
            return SurvivalReport("permanent", dies_at=r0, m_min=M,
                                  certified_to_page=horizon)
    return SurvivalReport("dies", dies_at=r0)


def _targets_vanish(fc, pages, tri, r_from):
    """Check E^r targets (n, d-1, f-r) vanish for all r >= r_from inside the box."""
    n, d, f = tri
    horizon = pages[-1].r
    floor = fc.f_min
    r = r_from
    while f - r >= floor:
        page = pages[min(r, horizon) - 1]
        if page.dim(n, d - 1, f - r) != 0:
            return False, (n, d - 1, f - r)
        r += 1
    return True, None
