"""Finite based chain complexes in a degree box, and their homology tables."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .fields import FieldSpec, ResourceError, UsageError
from .grading import Box, Degree
from .sparse import SparseMatrix, Subquotient, subquotient


def worker_count() -> int:
    env = os.environ.get("STABKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"bad STABKIT_THREADS value {env!r}")
    return os.cpu_count() or 1


DEFAULT_CELL_BUDGET = 2_000_000


@dataclass
class BoxTable:
    """Dimensions (and optional representatives) per degree inside a box."""

    box: Box
    dims: dict                      # Degree -> count (zero entries omitted)
    basis: dict | None = None       # Degree -> list of representative strings
    reliable_subbox: Box | None = None
    flags: tuple = ()
    mode: str | None = None

    def __post_init__(self):
        if self.reliable_subbox is None:
            self.reliable_subbox = self.box
        for deg, c in self.dims.items():
            if c < 0:
                raise UsageError(f"negative dimension at {deg}")
        if self.basis is not None:
            for deg, reps in self.basis.items():
                if len(reps) != self.dims.get(deg, 0):
                    raise UsageError(f"basis size mismatch at {deg}")

    def dim(self, n, d) -> int:
        return self.dims.get(Degree(n, d), 0)

    def nonzero(self):
        return sorted(self.dims.items(), key=lambda kv: (kv[0].n, kv[0].d))

    def to_json(self):
        out = {
            "box": self.box.to_json(),
            "dims": [{"n": deg.n, "d": deg.d, "dim": c}
                     for deg, c in self.nonzero()],
            "reliable_subbox": self.reliable_subbox.to_json(),
        }
        if self.basis:
            out["basis"] = {str(deg): reps for deg, reps in
                            sorted(self.basis.items(), key=lambda kv: (kv[0].n, kv[0].d))
                            if reps}
        if self.flags:
            out["flags"] = sorted(self.flags)
        if self.mode:
            out["mode"] = self.mode
        return out

    @staticmethod
    def from_json(obj) -> "BoxTable":
        dims = {Degree(e["n"], e["d"]): e["dim"] for e in obj["dims"]}
        return BoxTable(Box.from_json(obj["box"]), dims,
                        reliable_subbox=Box.from_json(obj["reliable_subbox"])
                        if "reliable_subbox" in obj else None,
                        flags=tuple(obj.get("flags", ())),
                        mode=obj.get("mode"))


class BasedComplex:
    """A chain complex with named bases per bidegree and d of degree (0,-1)."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.basis = {}        # (n,d) -> list of labels
        self._index = {}       # (n,d) -> {label: position}
        self.entries = {}      # (n,d) -> list of (row, col, scalar) into (n,d-1)

    def add_basis_element(self, n, d, label):
        spot = self.basis.setdefault((n, d), [])
        idx = self._index.setdefault((n, d), {})
        if label in idx:
            raise UsageError(f"duplicate basis label {label!r} at ({n},{d})")
        idx[label] = len(spot)
        spot.append(label)

    def dim(self, n, d) -> int:
        return len(self.basis.get((n, d), ()))

    def index_of(self, n, d, label) -> int:
        return self._index[(n, d)][label]

    def set_differential_column(self, n, d, label, image: dict):
        """image: {target label: scalar} in (n, d-1)."""
        col = self.index_of(n, d, label)
        rows = self._index.get((n, d - 1), {})
        ent = self.entries.setdefault((n, d), [])
        for tgt, val in image.items():
            if tgt not in rows:
                raise UsageError(f"differential target {tgt!r} missing at ({n},{d - 1})")
            ent.append((rows[tgt], col, val))

    def differential(self, n, d) -> SparseMatrix:
        """Matrix of d: (n,d) -> (n,d-1)."""
        return SparseMatrix(self.field, self.dim(n, d - 1), self.dim(n, d),
                            self.entries.get((n, d), ()))

    def check_d_squared(self):
        for (n, d) in list(self.basis):
            m = self.differential(n, d)
            m2 = self.differential(n, d - 1).matmul(m)
            if not m2.is_zero():
                raise UsageError(f"d^2 != 0 at ({n},{d})")

    def total_cells(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def homology_spot(self, n, d) -> Subquotient:
        return subquotient(self.differential(n, d), self.differential(n, d + 1))

    def homology_table(self, box: Box, with_basis=False,
                       reliable: Box | None = None,
                       budget=DEFAULT_CELL_BUDGET) -> BoxTable:
        if self.total_cells() > budget:
            raise ResourceError(
                f"complex has {self.total_cells()} cells, budget {budget}",
                partial=None)
        spots = [deg for deg in box.degrees()
                 if self.dim(deg.n, deg.d) or self.dim(deg.n, deg.d + 1)]

        def work(deg):
            sq = self.homology_spot(deg.n, deg.d)
            reps = None
            if with_basis:
                labels = self.basis.get((deg.n, deg.d), [])
                reps = [_vector_str(self.field, col, labels)
                        for col in sq.quotient_basis.columns()]
            return deg, sq.dim, reps

        results = {}
        nworkers = worker_count()
        if nworkers > 1 and len(spots) > 8:
            with ThreadPoolExecutor(max_workers=nworkers) as pool:
                for deg, dim, reps in pool.map(work, spots):
                    results[deg] = (dim, reps)
        else:
            for deg in spots:
                results[deg] = work(deg)[1:]
        dims = {deg: v[0] for deg, v in results.items() if v[0]}
        basis = ({deg: v[1] for deg, v in results.items() if v[0]}
                 if with_basis else None)
        return BoxTable(box, dims, basis=basis, reliable_subbox=reliable or box)


def _vector_str(field, col: dict, labels) -> str:
    parts = []
    for i in sorted(col):
        c = col[i]
        if c == field.one():
            parts.append(labels[i])
        else:
            parts.append(f"{c}*{labels[i]}")
    return " + ".join(parts) if parts else "0"


def euler_characteristics(cx: BasedComplex, table: BoxTable):
    """Columnwise chain vs homology Euler characteristic (for invariants)."""
    box = table.box
    chain, hom = {}, {}
    for n in range(box.n_min, box.n_max + 1):
        chain[n] = sum((-1) ** d * cx.dim(n, d)
                       for d in range(box.d_min, box.d_max + 1))
        hom[n] = sum((-1) ** deg.d * c for deg, c in table.dims.items()
                     if deg.n == n)
    return chain, hom
