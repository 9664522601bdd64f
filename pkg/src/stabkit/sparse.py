"""Exact sparse linear algebra over Q and F_p.

Matrices are immutable after construction; elimination produces new objects.
Pivots are chosen Markowitz-style (least fill) with deterministic (row, col)
tie-breaks, so every derived basis is reproducible.
"""
from __future__ import annotations

from .fields import FieldSpec, UsageError


class SparseMatrix:
    """Immutable sparse matrix with entries in a FieldSpec."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: FieldSpec, rows: int, cols: int, entries=()):
        if rows < 0 or cols < 0:
            raise UsageError("negative matrix shape")
        clean = {}
        for i, j, v in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise UsageError(f"entry ({i},{j}) out of range for {rows}x{cols}")
            if (i, j) in clean:
                raise UsageError(f"duplicate entry at ({i},{j})")
            v = field.coerce(v)
            if not field.is_zero(v):
                clean[(i, j)] = v
        self.field = field
        self.rows = rows
        self.cols = cols
        self.entries = clean

    # -- construction helpers ---------------------------------------------
    @staticmethod
    def zero(field, rows, cols):
        return SparseMatrix(field, rows, cols)

    @staticmethod
    def identity(field, n):
        return SparseMatrix(field, n, n, [(i, i, field.one()) for i in range(n)])

    @staticmethod
    def from_dense(field, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        ent = []
        for i, row in enumerate(rows_list):
            if len(row) != cols:
                raise UsageError("ragged dense input")
            for j, v in enumerate(row):
                v = field.coerce(v)
                if not field.is_zero(v):
                    ent.append((i, j, v))
        return SparseMatrix(field, rows, cols, ent)

    @staticmethod
    def from_columns(field, rows, columns):
        """columns: list of dicts {row: value} (or lists)."""
        ent = []
        for j, col in enumerate(columns):
            items = col.items() if isinstance(col, dict) else enumerate(col)
            for i, v in items:
                v = field.coerce(v)
                if not field.is_zero(v):
                    ent.append((i, j, v))
        return SparseMatrix(field, rows, len(columns), ent)

    def to_dense(self):
        z = self.field.zero()
        out = [[z] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column(self, j):
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def columns(self):
        cols = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def transpose(self):
        return SparseMatrix(self.field, self.cols, self.rows,
                            [(j, i, v) for (i, j), v in self.entries.items()])

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.rows != self.rows or other.field != self.field:
            raise UsageError("hstack shape/field mismatch")
        ent = [(i, j, v) for (i, j), v in self.entries.items()]
        ent += [(i, j + self.cols, v) for (i, j), v in other.entries.items()]
        return SparseMatrix(self.field, self.rows, self.cols + other.cols, ent)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows or self.field != other.field:
            raise UsageError("matmul shape/field mismatch")
        F = self.field
        by_row = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(i, []).append((k, v))
        by_col = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(k, []).append((j, v))
        acc = {}
        for i, row in by_row.items():
            for k, v in row:
                for j, w in by_col.get(k, ()):
                    key = (i, j)
                    acc[key] = F.add(acc.get(key, F.zero()), F.mul(v, w))
        ent = [(i, j, v) for (i, j), v in acc.items() if not F.is_zero(v)]
        return SparseMatrix(self.field, self.rows, other.cols, ent)

    def apply(self, vec: dict) -> dict:
        """Apply to a sparse column vector {index: value}."""
        F = self.field
        out = {}
        by_col = {}
        for (i, j), v in self.entries.items():
            by_col.setdefault(j, []).append((i, v))
        for j, x in vec.items():
            if F.is_zero(x):
                continue
            for i, v in by_col.get(j, ()):
                out[i] = F.add(out.get(i, F.zero()), F.mul(v, x))
        return {i: v for i, v in out.items() if not F.is_zero(v)}

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.field == other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.field}, {self.rows}x{self.cols}, nnz={len(self.entries)})"


class _Eliminator:
    """One Gaussian elimination pass with Markowitz pivoting.

    Mutable scratch structure; SparseMatrix stays immutable.
    """

    def __init__(self, M: SparseMatrix, pivot_cols_limit=None):
        self.F = M.field
        self.rows = M.rows
        self.cols = M.cols
        self.pivot_limit = M.cols if pivot_cols_limit is None else pivot_cols_limit
        self.row_data = [dict() for _ in range(M.rows)]
        for (i, j), v in M.entries.items():
            self.row_data[i][j] = v
        self.col_index = [set() for _ in range(M.cols)]
        for i, row in enumerate(self.row_data):
            for j in row:
                self.col_index[j].add(i)
        self.pivots = []  # list of (row, col) in elimination order
        self.pivot_rows = set()
        self.pivot_cols = set()

    def _choose_pivot(self):
        best = None
        for i in range(self.rows):
            if i in self.pivot_rows:
                continue
            row = self.row_data[i]
            for j, v in row.items():
                if j >= self.pivot_limit or j in self.pivot_cols or self.F.is_zero(v):
                    continue
                score = (len(row) - 1) * (len(self.col_index[j]) - 1)
                key = (score, i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            return None
        return best[1], best[2]

    def run(self):
        F = self.F
        while True:
            piv = self._choose_pivot()
            if piv is None:
                break
            pi, pj = piv
            self.pivots.append((pi, pj))
            self.pivot_rows.add(pi)
            self.pivot_cols.add(pj)
            prow = self.row_data[pi]
            inv = F.inv(prow[pj])
            for i in list(self.col_index[pj]):
                if i == pi or i in self.pivot_rows:
                    continue
                row = self.row_data[i]
                c = F.mul(row.get(pj, F.zero()), inv)
                if F.is_zero(c):
                    continue
                for j, v in prow.items():
                    new = F.sub(row.get(j, F.zero()), F.mul(c, v))
                    if F.is_zero(new):
                        if j in row:
                            del row[j]
                            self.col_index[j].discard(i)
                    else:
                        if j not in row:
                            self.col_index[j].add(i)
                        row[j] = new
        return self


def rank(M: SparseMatrix) -> int:
    """Rank of M over its field; deterministic."""
    return len(_Eliminator(M).run().pivots)


def kernel_basis(M: SparseMatrix) -> SparseMatrix:
    """Columns form a basis of the null space of M (cols(M) - rank columns)."""
    F = M.field
    el = _Eliminator(M).run()
    pivot_by_col = {j: i for (i, j) in el.pivots}
    free_cols = [j for j in range(M.cols) if j not in pivot_by_col]
    # Back-substitute on the reduced rows. Process pivots in reverse order.
    basis_cols = []
    for fc in free_cols:
        vec = {fc: F.one()}
        for (pi, pj) in reversed(el.pivots):
            row = el.row_data[pi]
            s = F.zero()
            for j, v in row.items():
                if j == pj:
                    continue
                x = vec.get(j)
                if x is not None:
                    s = F.add(s, F.mul(v, x))
            if not F.is_zero(s):
                vec[pj] = F.neg(F.mul(s, F.inv(row[pj])))
        basis_cols.append(vec)
    return SparseMatrix.from_columns(F, M.cols, basis_cols)


def solve(M: SparseMatrix, b: dict):
    """One solution x (sparse dict) of M x = b, or None if inconsistent."""
    F = M.field
    aug = SparseMatrix(F, M.rows, M.cols + 1,
                       [(i, j, v) for (i, j), v in M.entries.items()]
                       + [(i, M.cols, v) for i, v in b.items()
                          if not F.is_zero(F.coerce(v))])
    el = _Eliminator(aug, pivot_cols_limit=M.cols).run()
    for i in range(M.rows):
        if i in el.pivot_rows:
            continue
        if not F.is_zero(el.row_data[i].get(M.cols, F.zero())):
            return None
    x = {}
    for (pi, pj) in reversed(el.pivots):
        row = el.row_data[pi]
        s = F.neg(row.get(M.cols, F.zero()))
        for j, v in row.items():
            if j in (pj, M.cols):
                continue
            xv = x.get(j)
            if xv is not None:
                s = F.add(s, F.mul(v, xv))
        x[pj] = F.neg(F.mul(s, F.inv(row[pj])))
    return {j: v for j, v in x.items() if not F.is_zero(v)}


def image_basis(M: SparseMatrix) -> SparseMatrix:
    """Columns spanning the column space: the pivot columns of M, echelon order."""
    el = _Eliminator(M).run()
    cols = sorted(j for (_, j) in el.pivots)
    return SparseMatrix.from_columns(M.field, M.rows, [M.column(j) for j in cols])


def in_span(M: SparseMatrix, vec: dict) -> bool:
    return solve(M, vec) is not None


class Subquotient:
    """A based subquotient ker(d_out)/im(d_in) of an ambient based space.

    coordinate_map sends an ambient cycle to its class in the chosen
    quotient basis; boundaries map to 0.
    """

    __slots__ = ("field", "ambient_dim", "cycle_basis", "boundary_basis",
                 "quotient_basis", "_solver")

    def __init__(self, field, ambient_dim, cycle_basis, boundary_basis,
                 quotient_basis):
        self.field = field
        self.ambient_dim = ambient_dim
        self.cycle_basis = cycle_basis        # SparseMatrix, columns
        self.boundary_basis = boundary_basis  # SparseMatrix, columns
        self.quotient_basis = quotient_basis  # SparseMatrix, columns
        self._solver = boundary_basis.hstack(quotient_basis)

    @property
    def dim(self) -> int:
        return self.quotient_basis.cols

    def reduce(self, vec: dict) -> dict:
        """Coordinates of a cycle's class in the quotient basis."""
        sol = solve(self._solver, vec)
        if sol is None:
            raise UsageError("vector is not a cycle of this subquotient")
        nb = self.boundary_basis.cols
        return {j - nb: v for j, v in sol.items() if j >= nb}

    def coordinate_matrix(self) -> SparseMatrix:
        """Matrix form of reduce on the cycle subspace: columns = reduce(cycle_basis)."""
        cols = [self.reduce(c) for c in self.cycle_basis.columns()]
        return SparseMatrix.from_columns(self.field, self.dim, cols)


def subquotient(d_out: SparseMatrix, d_in: SparseMatrix) -> Subquotient:
    """Homology at the middle spot of d_in, d_out with d_out . d_in = 0 (checked)."""
    if d_out.field != d_in.field:
        raise UsageError("mismatched fields")
    if d_out.cols != d_in.rows:
        raise UsageError("shape mismatch: d_out.cols != d_in.rows")
    if not d_out.matmul(d_in).is_zero():
        raise UsageError("not a complex: d_out . d_in != 0")
    F = d_out.field
    cycles = kernel_basis(d_out)
    boundaries = image_basis(d_in)
    # Select quotient representatives: cycle columns independent mod boundaries,
    # chosen greedily in echelon order for byte-stable output.
    chosen = []
    span = boundaries
    for col in cycles.columns():
        if not in_span(span, col):
            chosen.append(col)
            span = span.hstack(SparseMatrix.from_columns(F, d_out.cols, [col]))
    quotient = SparseMatrix.from_columns(F, d_out.cols, chosen)
    return Subquotient(F, d_out.cols, cycles, boundaries, quotient)
