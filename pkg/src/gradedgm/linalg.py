"""Exact linear algebra over Q and prime fields.

Everything downstream (weight pieces, cohomology, towers) reduces to rank,
kernel and solve over an exact field.  Rationals are Python Fractions (always
in lowest terms, positive denominator); prime-field elements are ints in
[0, p).  All functions are pure and deterministic: elimination always pivots
on the first nonzero entry in column-major order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple


class DimensionError(ValueError):
    """Shape mismatch in a matrix/vector operation."""


class RationalField:
    name = "Q"

    zero = Fraction(0)
    one = Fraction(1)

    def of_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def scalar_str(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "QQ"


class PrimeField:
    """F_p with elements normalized to [0, p)."""

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError("modulus %r is not prime" % (p,))
        self.p = p
        self.name = "F%d" % p
        self.zero = 0
        self.one = 1 % p

    def of_int(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.p)
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def scalar_str(self, a) -> str:
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return "GF(%d)" % self.p


QQ = RationalField()


def field_from_name(name: str):
    """Parse a field descriptor: "Q" or "Fp:<prime>"."""
    if name in ("Q", "QQ"):
        return QQ
    if name.startswith("Fp:"):
        return PrimeField(int(name[3:]))
    raise ValueError("unknown field descriptor %r (use Q or Fp:<p>)" % (name,))


def field_name(field) -> str:
    return "Q" if field is QQ or isinstance(field, RationalField) else "Fp:%d" % field.p


@dataclass(frozen=True)
class Matrix:
    """Dense matrix; rows of scalars over an exact field.

    Entries are stored as a tuple of row tuples and never mutated, so values
    are safe to share across threads.
    """

    field: object
    rows: int
    cols: int
    entries: tuple

    @staticmethod
    def from_rows(field, rows: Sequence[Sequence]) -> "Matrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        for r in rows:
            if len(r) != nc:
                raise DimensionError("ragged rows")
        return Matrix(field, nr, nc, tuple(tuple(r) for r in rows))

    @staticmethod
    def zero(field, rows: int, cols: int) -> "Matrix":
        z = field.zero
        return Matrix(field, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return Matrix(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def from_columns(field, columns: Sequence[Sequence], dim: int) -> "Matrix":
        """Matrix whose columns are the given vectors of length `dim`."""
        for c in columns:
            if len(c) != dim:
                raise DimensionError("column of length %d, expected %d" % (len(c), dim))
        return Matrix(field, dim, len(columns),
                      tuple(tuple(c[i] for c in columns) for i in range(dim)))

    def column(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self) -> List[list]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows,
                      tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def mul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError("cannot multiply %dx%d by %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        F = self.field
        out = []
        for i in range(self.rows):
            nz = [(k, a) for k, a in enumerate(self.entries[i]) if not F.is_zero(a)]
            row = []
            for j in range(other.cols):
                acc = F.zero
                for k, a in nz:
                    b = other.entries[k][j]
                    if not F.is_zero(b):
                        acc = F.add(acc, F.mul(a, b))
                row.append(acc)
            out.append(tuple(row))
        return Matrix(F, self.rows, other.cols, tuple(out))

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.cols:
            raise DimensionError("vector of length %d, expected %d" % (len(vec), self.cols))
        F = self.field
        out = []
        for i in range(self.rows):
            acc = F.zero
            row = self.entries[i]
            for k in range(self.cols):
                if not F.is_zero(vec[k]):
                    acc = F.add(acc, F.mul(row[k], vec[k]))
            out.append(acc)
        return out

    def add(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in add")
        F = self.field
        return Matrix(F, self.rows, self.cols,
                      tuple(tuple(F.add(a, b) for a, b in zip(r1, r2))
                            for r1, r2 in zip(self.entries, other.entries)))

    def neg(self) -> "Matrix":
        F = self.field
        return Matrix(F, self.rows, self.cols,
                      tuple(tuple(F.neg(a) for a in r) for r in self.entries))

    def is_zero(self) -> bool:
        F = self.field
        return all(F.is_zero(a) for r in self.entries for a in r)

    def __str__(self):
        return "\n".join("[" + " ".join(self.field.scalar_str(a) for a in r) + "]" for r in self.entries)


def block_matrix(field, blocks: Sequence[Sequence[Optional[Matrix]]],
                 row_dims: Sequence[int], col_dims: Sequence[int]) -> Matrix:
    """Assemble a block matrix; None blocks are zero."""
    total_r, total_c = sum(row_dims), sum(col_dims)
    z = field.zero
    rows = [[z] * total_c for _ in range(total_r)]
    r0 = 0
    for bi, rdim in enumerate(row_dims):
        c0 = 0
        for bj, cdim in enumerate(col_dims):
            blk = blocks[bi][bj]
            if blk is not None:
                if blk.rows != rdim or blk.cols != cdim:
                    raise DimensionError("block (%d,%d) has shape %dx%d, expected %dx%d"
                                         % (bi, bj, blk.rows, blk.cols, rdim, cdim))
                for i in range(rdim):
                    row = rows[r0 + i]
                    for j in range(cdim):
                        row[c0 + j] = blk.entries[i][j]
            c0 += cdim
        r0 += rdim
    return Matrix(field, total_r, total_c, tuple(tuple(r) for r in rows))


def _rref(field, rows: List[list]) -> Tuple[List[list], List[int]]:
    """Reduced row echelon form; returns (rows, pivot column list).

    Pivot rule: scan columns left to right, take the first row (top to
    bottom among unused rows) with a nonzero entry.  This fixes the output
    bit-for-bit.  Rows are eliminated as sparse dicts: the Koszul and Cech
    differentials are mostly 0/+-1 incidence matrices, where dense
    elimination over Q would dominate the whole computation.
    """
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    srows = [{j: v for j, v in enumerate(row) if not field.is_zero(v)} for row in rows]
    pivots: List[int] = []
    r = 0
    one = field.one
    for c in range(nc):
        if r >= nr:
            break
        pr = None
        for i in range(r, nr):
            if c in srows[i]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            srows[r], srows[pr] = srows[pr], srows[r]
        prow = srows[r]
        pv = prow[c]
        if pv != one:
            inv = field.inv(pv)
            prow = {j: field.mul(inv, v) for j, v in prow.items()}
            srows[r] = prow
        items = list(prow.items())
        for i in range(nr):
            if i == r:
                continue
            row = srows[i]
            f = row.get(c)
            if f is None:
                continue
            for j, v in items:
                nv = field.sub(row.get(j, field.zero), field.mul(f, v))
                if field.is_zero(nv):
                    row.pop(j, None)
                else:
                    row[j] = nv
        pivots.append(c)
        r += 1
    z = field.zero
    out = []
    for row in srows:
        dense = [z] * nc
        for j, v in row.items():
            dense[j] = v
        out.append(dense)
    return out, pivots


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    rows = [list(r) for r in m.entries]
    rows, pivots = _rref(m.field, rows)
    return Matrix(m.field, m.rows, m.cols, tuple(tuple(r) for r in rows)), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def rank_kernel(m: Matrix) -> Tuple[int, List[list]]:
    """Rank and kernel basis of m.

    The kernel basis comes from the RREF free columns (ascending), each
    vector with 1 in its free coordinate and the pivot back-substitutions;
    this is the reduced echelon normal form of the kernel, so the output is
    reproducible across runs.
    """
    R, pivots = rref(m)
    F = m.field
    pivset = set(pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    basis = []
    for fc in free:
        v = [F.zero] * m.cols
        v[fc] = F.one
        for r_idx, pc in enumerate(pivots):
            v[pc] = F.neg(R.entries[r_idx][fc])
        basis.append(v)
    return len(pivots), basis


def solve_linear(m: Matrix, b: Sequence) -> Optional[list]:
    """One solution of m x = b (free variables zero in RREF order), or None."""
    if len(b) != m.rows:
        raise DimensionError("rhs of length %d, expected %d" % (len(b), m.rows))
    F = m.field
    rows = [list(r) + [b[i]] for i, r in enumerate(m.entries)]
    rows, pivots = _rref(F, rows)
    if m.cols in pivots:
        return None
    x = [F.zero] * m.cols
    for r_idx, pc in enumerate(pivots):
        x[pc] = rows[r_idx][m.cols]
    return x


def _is_identity(field, cycles, dim: int) -> bool:
    for j, c in enumerate(cycles):
        for i in range(dim):
            v = c[i]
            if i == j:
                if v != field.one:
                    return False
            elif not field.is_zero(v):
                return False
    return True


class ColumnSolver:
    """Repeated exact solves of A x = v for a fixed column matrix A.

    Precomputes the row transform T with T*A in RREF, so each solve is a
    single matrix-vector product plus consistency checks.
    """

    def __init__(self, field, columns: Sequence[Sequence], dim: int):
        self.field = field
        self.dim = dim
        self.ncols = len(columns)
        aug = [[columns[j][i] for j in range(self.ncols)] for i in range(dim)]
        ident = Matrix.identity(field, dim)
        rows = [aug[i] + list(ident.entries[i]) for i in range(dim)]
        rows, pivots = _rref(field, [r[:] for r in rows])
        # pivots beyond ncols would come from the identity block; the RREF of
        # [A | I] has pivots of A first since elimination is left-to-right
        self.pivots = [p for p in pivots if p < self.ncols]
        self.rank = len(self.pivots)
        self.transform = Matrix(field, dim, dim,
                                tuple(tuple(r[self.ncols:]) for r in rows))

    def solve(self, v: Sequence) -> Optional[list]:
        """x with A x = v (free coordinates zero), or None if inconsistent."""
        F = self.field
        w = self.transform.apply(v)
        x = [F.zero] * self.ncols
        for r_idx, pc in enumerate(self.pivots):
            x[pc] = w[r_idx]
        for r_idx in range(self.rank, self.dim):
            if not F.is_zero(w[r_idx]):
                return None
        return x


class Subquotient:
    """Basis of span(cycles)/span(boundaries) inside an ambient k^n.

    Representatives are the cycles whose columns become pivots after the
    boundary columns, in input order; `coords` expresses any vector of
    span(boundaries) + span(cycles) in the representative basis.
    """

    def __init__(self, field, dim_ambient: int, cycles: Sequence[Sequence],
                 boundaries: Sequence[Sequence] = ()):  # noqa: B006
        self.field = field
        self.dim_ambient = dim_ambient
        self._nb = len(boundaries)
        self._trivial = (self._nb == 0 and len(cycles) == dim_ambient
                         and _is_identity(field, cycles, dim_ambient))
        if self._trivial:
            self.rep_indices = list(range(dim_ambient))
            self.reps = [list(c) for c in cycles]
            self.dim = dim_ambient
            self._rep_pos = {k: k for k in range(dim_ambient)}
            self._solver = None
            return
        cols = [list(b) for b in boundaries] + [list(c) for c in cycles]
        solver = ColumnSolver(field, cols, dim_ambient) if cols else None
        rep_idx = []
        if solver is not None:
            for p in solver.pivots:
                if p >= self._nb:
                    rep_idx.append(p - self._nb)
        self.rep_indices = rep_idx
        self.reps = [list(cycles[i]) for i in rep_idx]
        self.dim = len(self.reps)
        self._rep_pos = {idx: k for k, idx in enumerate(rep_idx)}
        self._solver = solver

    def coords(self, v: Sequence) -> list:
        """Class of v in the representative basis; v must be a cycle (mod boundaries)."""
        if self._trivial:
            return list(v)
        if self._solver is None:
            if any(not self.field.is_zero(a) for a in v):
                raise ValueError("vector is not in the subspace")
            return []
        x = self._solver.solve(v)
        if x is None:
            raise ValueError("vector is not in the subspace spanned by boundaries and cycles")
        out = [self.field.zero] * self.dim
        for p in self._solver.pivots:
            if p >= self._nb:
                out[self._rep_pos[p - self._nb]] = x[p]
        return out

    def representative(self, h: Sequence) -> list:
        F = self.field
        v = [F.zero] * self.dim_ambient
        for c, rep in zip(h, self.reps):
            if not F.is_zero(c):
                for i in range(self.dim_ambient):
                    v[i] = F.add(v[i], F.mul(c, rep[i]))
        return v
