"""Finitely generated graded modules via presentations, and the weightwise
module protocol used by every complex-building operation.

A weightwise module exposes:

    field
    ring                 -- WeightedRing or VeroneseView
    weight_piece(i)      -- WeightPiece (finite ordered basis of M_i)
    mult_matrix(f, i)    -- matrix of multiplication M_i -> M_{i + deg f}
    element_weight(f)    -- grading degree of a homogeneous ring element

Presented modules (cokernels of homogeneous matrices between twisted free
modules), kernels/cokernels of weightwise maps, twists and Veronese views
all implement it, so Koszul stages, Cech slices, towers and torsion tests
run uniformly over any of them.  Pieces and matrices are cached behind a
lock; modules are immutable after construction.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .gring import HomogeneityError, WeightedRing, WindowError
from .linalg import Matrix, Subquotient, rank, rank_kernel
from .poly import Poly, mono_str, parse_poly


@dataclass
class WeightPiece:
    """Weight-i slice of a module: dimension with an ordered labelled basis."""

    weight: int
    dim: int
    labels: Tuple[str, ...]
    sub: Subquotient  # representatives live in the internal ambient space


class FreeQuotientModule:
    """Cokernel of a homogeneous matrix between twisted free modules.

    Generator t spans A(-twists[t]); relation column c is a vector of
    polynomials (entry per generator) that must be weight-homogeneous with
    respect to the twists.
    """

    def __init__(self, ring, twists: Sequence[int], rel_columns: Sequence[Sequence[Poly]] = ()):
        self.ring = ring
        self.field = ring.field
        self.twists = tuple(int(a) for a in twists)
        self.ngens = len(self.twists)
        cols = []
        col_weights = []
        for c, col in enumerate(rel_columns):
            if len(col) != self.ngens:
                raise ValueError("relation column %d has %d entries, expected %d"
                                 % (c, len(col), self.ngens))
            wset = set()
            for t, p in enumerate(col):
                if p.is_zero():
                    continue
                try:
                    w = ring.element_weight(p)
                except HomogeneityError:
                    raise HomogeneityError("relation entry (%d,%d) is not weight-homogeneous" % (t, c))
                wset.add(w + self.twists[t])
            if len(wset) > 1:
                raise HomogeneityError(
                    "relation column %d mixes weights %s relative to the twists"
                    % (c, sorted(wset)))
            if wset:
                cols.append(tuple(col))
                col_weights.append(wset.pop())
        self.rel_columns = tuple(cols)
        self.col_weights = tuple(col_weights)
        self._pieces: Dict[int, WeightPiece] = {}
        self._free_index: Dict[int, Dict[Tuple[int, tuple], int]] = {}
        self._mults: Dict[tuple, Matrix] = {}
        self._lock = threading.RLock()

    # free-module bookkeeping ---------------------------------------------------

    def _free_basis(self, i: int) -> List[Tuple[int, tuple]]:
        out = []
        for t, a in enumerate(self.twists):
            for mono in self.ring.weight_basis(i - a):
                out.append((t, mono))
        return out

    def _free_coords(self, vec: Sequence[Poly], i: int) -> list:
        """Coordinates of a generator-coefficient vector in the free basis of weight i."""
        basis = self._free_basis(i)
        index = {bm: k for k, bm in enumerate(basis)}
        out = [self.field.zero] * len(basis)
        for t, p in enumerate(vec):
            if p.is_zero():
                continue
            coords = self.ring.coords_in_piece(p, i - self.twists[t])
            for k, mono in enumerate(self.ring.weight_basis(i - self.twists[t])):
                c = coords[k]
                if not self.field.is_zero(c):
                    out[index[(t, mono)]] = c
        return out

    # protocol ------------------------------------------------------------------

    def element_weight(self, f: Poly) -> int:
        return self.ring.element_weight(f)

    def weight_piece(self, i: int) -> WeightPiece:
        with self._lock:
            piece = self._pieces.get(i)
        if piece is not None:
            return piece
        basis = self._free_basis(i)
        n = len(basis)
        F = self.field
        boundaries = []
        for col, nu in zip(self.rel_columns, self.col_weights):
            for mono in self.ring.weight_basis(i - nu):
                g = Poly.monomial(F, len(mono), mono)
                vec = self._free_coords([g * p for p in col], i)
                boundaries.append(vec)
        cycles = [[F.one if k == j else F.zero for k in range(n)] for j in range(n)]
        sub = Subquotient(F, n, cycles, boundaries)
        names = self.ring.names
        labels = tuple("%s*e%d" % (mono_str(basis[j][1], names), basis[j][0])
                       for j in sub.rep_indices)
        piece = WeightPiece(weight=i, dim=sub.dim, labels=labels, sub=sub)
        with self._lock:
            self._pieces.setdefault(i, piece)
        return piece

    def mult_matrix(self, f: Poly, i: int) -> Matrix:
        w = self.element_weight(f)
        key = (f.key(), i)
        with self._lock:
            m = self._mults.get(key)
        if m is not None:
            return m
        src = self.weight_piece(i)
        tgt = self.weight_piece(i + w)
        basis = self._free_basis(i)
        cols = []
        for rep_idx in src.sub.rep_indices:
            t, mono = basis[rep_idx]
            g = Poly.monomial(self.field, len(mono), mono)
            vec = [Poly.zero(self.field, g.nvars) for _ in range(self.ngens)]
            vec[t] = f * g
            cols.append(tgt.sub.coords(self._free_coords(vec, i + w)))
        m = Matrix.from_columns(self.field, cols, tgt.dim)
        with self._lock:
            self._mults.setdefault(key, m)
        return m

    def element_coords(self, vec: Sequence[Poly], i: int) -> list:
        """Class of a generator-coefficient vector in the weight-i piece basis."""
        return self.weight_piece(i).sub.coords(self._free_coords(vec, i))

    def twist(self, n: int) -> "FreeQuotientModule":
        """M(n): weight_piece(M(n), i) = weight_piece(M, i+n)."""
        return FreeQuotientModule(self.ring, [a - n for a in self.twists], self.rel_columns)


def ring_module(ring) -> FreeQuotientModule:
    """The ring itself as a graded module over itself."""
    return FreeQuotientModule(ring, (0,), ())


def build_module(ring, twists: Sequence[int], relation_matrix: Sequence[Sequence] = ()) -> FreeQuotientModule:
    """Presented module from a relation matrix given column-wise.

    Entries may be polynomial strings; rows of each column correspond to the
    generators.
    """
    cols = []
    for col in relation_matrix:
        parsed = []
        for entry in col:
            if isinstance(entry, str):
                names = ring.names
                parsed.append(parse_poly(ring.field, names, entry))
            else:
                parsed.append(entry)
        cols.append(parsed)
    return FreeQuotientModule(ring, twists, cols)


class TwistedView:
    """Generic twist wrapper for modules that are not presented."""

    def __init__(self, base, n: int):
        self.base = base
        self.n = int(n)
        self.field = base.field
        self.ring = base.ring

    def element_weight(self, f):
        return self.base.element_weight(f)

    def weight_piece(self, i: int) -> WeightPiece:
        return self.base.weight_piece(i + self.n)

    def mult_matrix(self, f, i: int) -> Matrix:
        return self.base.mult_matrix(f, i + self.n)


def twist(module, n: int):
    if isinstance(module, FreeQuotientModule):
        return module.twist(n)
    return TwistedView(module, n)


class VeroneseModule:
    """m-uple view of a module: piece(i) = base piece(m*i); multipliers must
    lie in the m-uple subring."""

    def __init__(self, base, view_ring):
        self.base = base
        self.ring = view_ring
        self.field = base.field
        self.m = view_ring.m

    def element_weight(self, f):
        return self.ring.element_weight(f)

    def weight_piece(self, i: int) -> WeightPiece:
        return self.base.weight_piece(self.m * i)

    def mult_matrix(self, f, i: int) -> Matrix:
        self.ring.element_weight(f)  # validates divisibility
        return self.base.mult_matrix(f, self.m * i)


class WeightwiseMap:
    """Degree-zero map between weightwise modules, given per-weight matrices."""

    def __init__(self, src, tgt, matrix_fn: Callable[[int], Matrix]):
        self.src = src
        self.tgt = tgt
        self._fn = matrix_fn
        self._cache: Dict[int, Matrix] = {}
        self._lock = threading.RLock()

    def matrix(self, i: int) -> Matrix:
        with self._lock:
            m = self._cache.get(i)
            if m is None:
                m = self._fn(i)
                self._cache[i] = m
        return m


class KernelModule:
    """Weightwise kernel of a degree-zero map, with the restricted action."""

    def __init__(self, wmap: WeightwiseMap):
        self.map = wmap
        self.src = wmap.src
        self.field = wmap.src.field
        self.ring = wmap.src.ring
        self._pieces: Dict[int, WeightPiece] = {}
        self._lock = threading.RLock()

    def element_weight(self, f):
        return self.src.element_weight(f)

    def weight_piece(self, i: int) -> WeightPiece:
        with self._lock:
            piece = self._pieces.get(i)
        if piece is not None:
            return piece
        m = self.map.matrix(i)
        _, kern = rank_kernel(m)
        amb = self.src.weight_piece(i).dim
        sub = Subquotient(self.field, amb, kern, [])
        piece = WeightPiece(i, sub.dim, tuple("k%d" % t for t in range(sub.dim)), sub)
        with self._lock:
            self._pieces.setdefault(i, piece)
        return piece

    def mult_matrix(self, f, i: int) -> Matrix:
        w = self.element_weight(f)
        src_piece = self.weight_piece(i)
        tgt_piece = self.weight_piece(i + w)
        big = self.src.mult_matrix(f, i)
        cols = [tgt_piece.sub.coords(big.apply(rep)) for rep in src_piece.sub.reps]
        return Matrix.from_columns(self.field, cols, tgt_piece.dim)


class CokernelModule:
    """Weightwise cokernel of a degree-zero map, with the induced action."""

    def __init__(self, wmap: WeightwiseMap):
        self.map = wmap
        self.tgt = wmap.tgt
        self.field = wmap.tgt.field
        self.ring = wmap.tgt.ring
        self._pieces: Dict[int, WeightPiece] = {}
        self._lock = threading.RLock()

    def element_weight(self, f):
        return self.tgt.element_weight(f)

    def weight_piece(self, i: int) -> WeightPiece:
        with self._lock:
            piece = self._pieces.get(i)
        if piece is not None:
            return piece
        m = self.map.matrix(i)
        amb = self.tgt.weight_piece(i).dim
        F = self.field
        cycles = [[F.one if k == j else F.zero for k in range(amb)] for j in range(amb)]
        sub = Subquotient(F, amb, cycles, m.columns())
        piece = WeightPiece(i, sub.dim, tuple("q%d" % t for t in range(sub.dim)), sub)
        with self._lock:
            self._pieces.setdefault(i, piece)
        return piece

    def mult_matrix(self, f, i: int) -> Matrix:
        w = self.element_weight(f)
        src_piece = self.weight_piece(i)
        tgt_piece = self.weight_piece(i + w)
        big = self.tgt.mult_matrix(f, i)
        cols = [tgt_piece.sub.coords(big.apply(rep)) for rep in src_piece.sub.reps]
        return Matrix.from_columns(self.field, cols, tgt_piece.dim)


class PresentedHom:
    """Degree-zero homomorphism between presented modules, entries polynomial.

    Entry (u, t) multiplies source generator t into target block u; it must
    be homogeneous of weight src_twist(t) - tgt_twist(u).
    """

    def __init__(self, src: FreeQuotientModule, tgt: FreeQuotientModule,
                 entries: Sequence[Sequence[Poly]]):
        self.src = src
        self.tgt = tgt
        if len(entries) != tgt.ngens:
            raise ValueError("hom matrix has %d rows, expected %d" % (len(entries), tgt.ngens))
        for u, row in enumerate(entries):
            if len(row) != src.ngens:
                raise ValueError("hom matrix row %d has %d entries, expected %d"
                                 % (u, len(row), src.ngens))
            for t, p in enumerate(row):
                if p.is_zero():
                    continue
                w = src.ring.element_weight(p)
                if w != src.twists[t] - tgt.twists[u]:
                    raise HomogeneityError(
                        "hom entry (%d,%d) has weight %d, expected %d for a degree-zero map"
                        % (u, t, w, src.twists[t] - tgt.twists[u]))
        self.entries = tuple(tuple(row) for row in entries)

    def weightwise(self) -> WeightwiseMap:
        def fn(i: int) -> Matrix:
            src_piece = self.src.weight_piece(i)
            tgt_piece = self.tgt.weight_piece(i)
            basis = self.src._free_basis(i)
            cols = []
            for rep_idx in src_piece.sub.rep_indices:
                t, mono = basis[rep_idx]
                g = Poly.monomial(self.src.field, len(mono), mono)
                vec = [g * self.entries[u][t] for u in range(self.tgt.ngens)]
                cols.append(self.tgt.element_coords(vec, i))
            return Matrix.from_columns(self.src.field, cols, tgt_piece.dim)
        return WeightwiseMap(self.src, self.tgt, fn)


# ---------------------------------------------------------------------------
# torsion tests
# ---------------------------------------------------------------------------

@dataclass
class TorsionVerdict:
    kind: str                      # "Torsion" | "NotTorsion" | "Inconclusive"
    witness: Optional[str] = None  # generator that fails to kill, for NotTorsion
    power: Optional[int] = None    # kill exponent, or stationarity stage
    detail: str = ""

    @property
    def is_torsion(self) -> bool:
        return self.kind == "Torsion"


def composite_mult(module, f: Poly, i: int, s: int) -> Matrix:
    """Matrix of multiplication by f^s from weight i, composed stepwise."""
    w = module.element_weight(f)
    m = Matrix.identity(module.field, module.weight_piece(i).dim)
    for k in range(s):
        m = module.mult_matrix(f, i + k * w).mul(m)
    return m


def _vec_is_zero(field, v) -> bool:
    return all(field.is_zero(a) for a in v)


def torsion_test_element(module, gens: Sequence[Poly], i: int, coords: Sequence,
                         span: int = 3, budget: int = 12) -> TorsionVerdict:
    """Generator-power torsion test for one element of weight i.

    Torsion is certified exactly: each generator kills the element at some
    witnessed power (then a single power of the whole ideal kills it).  The
    negative verdict is heuristic: the kernel chain of f^s must be stationary
    for `span` steps with the element outside.
    """
    F = module.field
    names = module.ring.names
    kill_powers = []
    for f in gens:
        w = module.element_weight(f)
        v = list(coords)
        killed = None
        kernel_dims: List[int] = []
        try:
            for s in range(1, budget + 1):
                v = module.mult_matrix(f, i + (s - 1) * w).apply(v)
                if _vec_is_zero(F, v):
                    killed = s
                    break
                comp = composite_mult(module, f, i, s)
                kernel_dims.append(comp.cols - rank_kernel(comp)[0])
                if len(kernel_dims) > span and all(
                        kernel_dims[-1] == kernel_dims[-1 - t] for t in range(1, span + 1)):
                    return TorsionVerdict("NotTorsion", witness=f.to_str(names), power=s,
                                          detail="kernel chain of %s stationary for %d steps, element outside"
                                                 % (f.to_str(names), span))
        except WindowError:
            return TorsionVerdict("Inconclusive",
                                  detail="window exhausted while multiplying by %s" % f.to_str(names))
        if killed is None:
            return TorsionVerdict("Inconclusive",
                                  detail="budget %d exhausted on generator %s" % (budget, f.to_str(names)))
        kill_powers.append(killed)
    return TorsionVerdict("Torsion", power=max(kill_powers) if kill_powers else 0,
                          detail="killed by generator powers %s" % (kill_powers,))


def torsion_test(module, gens: Sequence[Poly], window: Tuple[int, int],
                 element: Optional[Tuple[int, Sequence]] = None,
                 span: int = 3, budget: int = 12):
    """Torsion test for one element (weight, coords) or, if element is None,
    for every basis vector of every window weight piece.

    Returns (overall TorsionVerdict, per-element list).
    """
    F = module.field
    items: List[Tuple[int, list]] = []
    if element is not None:
        items.append((element[0], list(element[1])))
    else:
        lo, hi = window
        for i in range(lo, hi + 1):
            piece = module.weight_piece(i)
            for k in range(piece.dim):
                items.append((i, [F.one if t == k else F.zero for t in range(piece.dim)]))
    verdicts = [(i, torsion_test_element(module, gens, i, v, span, budget)) for i, v in items]
    overall = TorsionVerdict("Torsion", detail="all %d tested elements torsion" % len(items))
    for i, v in verdicts:
        if v.kind == "NotTorsion":
            overall = TorsionVerdict("NotTorsion", witness=v.witness, power=v.power,
                                     detail="weight %d element is not torsion" % i)
            break
        if v.kind == "Inconclusive" and overall.kind != "NotTorsion":
            overall = TorsionVerdict("Inconclusive", detail="weight %d element inconclusive" % i)
    return overall, verdicts


def torsion_condition_ad_powers(module, ring, d: int, i: int, coords: Sequence,
                                span: int = 3, budget: int = 8) -> TorsionVerdict:
    """Lemma-style condition: x * (A_d)^n = 0 for large n (span computed weightwise)."""
    F = module.field
    power_basis: List[Poly] = [Poly.monomial(F, ring.nvars, m) for m in ring.weight_basis(d)]
    if not power_basis:
        return TorsionVerdict("Inconclusive", detail="A_%d is zero; condition degenerate" % d)
    current = list(power_basis)
    kernel_dims: List[int] = []
    try:
        for n in range(1, budget + 1):
            v = list(coords)
            all_killed = True
            piece_dim = module.weight_piece(i).dim
            stacked = None
            for g in current:
                mat = module.mult_matrix(g, i)
                if not _vec_is_zero(F, mat.apply(v)):
                    all_killed = False
                stacked = mat if stacked is None else Matrix(F, stacked.rows + mat.rows, piece_dim,
                                                             stacked.entries + mat.entries)
            if all_killed:
                return TorsionVerdict("Torsion", power=n, detail="(A_%d)^%d kills the element" % (d, n))
            kdim = piece_dim - rank_kernel(stacked)[0] if stacked is not None else piece_dim
            kernel_dims.append(kdim)
            if len(kernel_dims) > span and all(
                    kernel_dims[-1] == kernel_dims[-1 - t] for t in range(1, span + 1)):
                return TorsionVerdict("NotTorsion", power=n,
                                      detail="kernel chain of (A_%d)^n stationary, element outside" % d)
            # next power: span of products with A_d, pruned to a basis
            nxt: List[Poly] = []
            seen_cols: List[list] = []
            tgt_w = d * (n + 1)
            ring.require_window(tgt_w)
            tgt_dim = ring.weight_dim(tgt_w)
            for g in current:
                for h in power_basis:
                    p = ring.normal_form(g * h)
                    if p.is_zero():
                        continue
                    col = ring.coords_in_piece(p, tgt_w)
                    trial = seen_cols + [col]
                    if rank(Matrix.from_columns(F, trial, tgt_dim)) > len(seen_cols):
                        seen_cols.append(col)
                        nxt.append(p)
            current = nxt
            if not current:
                return TorsionVerdict("Torsion", power=n + 1,
                                      detail="(A_%d)^%d is zero in the ring" % (d, n + 1))
    except WindowError:
        return TorsionVerdict("Inconclusive", detail="window exhausted in (A_d)^n chain")
    return TorsionVerdict("Inconclusive", detail="budget %d exhausted in (A_d)^n chain" % budget)


def torsion_condition_tail(module, ring, gen_data, i: int, coords: Sequence,
                           window: Tuple[int, int]) -> TorsionVerdict:
    """Lemma-style condition: x * A_{>=s} = 0 for some s.

    The certificate is finite: if x * A_j = 0 for all j in [s, B] where B
    caps both s + d and the weight above which A_N = A_d * A_{N-d}, then
    x kills the whole tail (span-generation induction).
    """
    F = module.field
    d = gen_data.lcm_degree
    p_count = len(gen_data.gens)
    lemma_bound = d * p_count - sum(gen_data.degrees)
    lo, hi = window

    def annihilates_piece(j: int) -> bool:
        for mono in ring.weight_basis(j):
            g = Poly.monomial(F, ring.nvars, mono)
            if not _vec_is_zero(F, module.mult_matrix(g, i).apply(list(coords))):
                return False
        return True

    try:
        for s in range(lo, hi + 1):
            cert_top = max(s + d, lemma_bound + d + 1)
            if cert_top > hi:
                break
            if all(annihilates_piece(j) for j in range(s, cert_top + 1)):
                return TorsionVerdict("Torsion", power=s,
                                      detail="x * A_j = 0 for j in [%d, %d]" % (s, cert_top))
        for j in range(hi, max(hi - 2, lo) - 1, -1):
            if not annihilates_piece(j):
                return TorsionVerdict("NotTorsion", power=j,
                                      detail="x * A_%d != 0 at the top of the window" % j)
        return TorsionVerdict("Inconclusive", detail="window too small for a tail certificate")
    except WindowError:
        return TorsionVerdict("Inconclusive", detail="window exhausted in tail certificate")
