"""Local cohomology machinery: Koszul stages and their colimit, the
denominator-truncated extended Cech backend, saturation, triangle checks
and weight vanishing bounds.

Two independent backends live here.  The primary one computes each table
cell as the stabilized rank of composite transition maps between Koszul
stage cohomologies (cofinal diagonal system (m,...,m)).  The oracle models
every localization by a denominator-bounded quotient and converges
monotonically in the truncation level.  Cells that fail to stabilize within
budget are Inconclusive, never guessed.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .complexes import SliceMap, WeightSliceComplex, compose_slice_maps
from .gring import PositiveGeneratorData, WindowError
from .gmodule import WeightPiece, composite_mult
from .linalg import Matrix, Subquotient, rank, rank_kernel
from .poly import Poly


@dataclass
class CellInfo:
    status: str             # "stable" | "inconclusive"
    stage: int = 0          # base stage / truncation level reached
    span: int = 0
    note: str = ""


@dataclass
class CohomologyTable:
    """Map (cohomological degree j, weight i) -> dim, with provenance."""

    window: Tuple[int, int]
    jmin: int
    jmax: int
    backend: str
    entries: Dict[Tuple[int, int], Optional[int]]
    report: Dict[Tuple[int, int], CellInfo] = dc_field(default_factory=dict)

    def entry(self, j: int, i: int) -> Optional[int]:
        return self.entries.get((j, i), 0)

    def has_inconclusive(self) -> bool:
        return any(v is None for v in self.entries.values())

    def nonzero_cells(self) -> List[Tuple[int, int]]:
        return sorted((j, i) for (j, i), v in self.entries.items() if v)

    def to_json_obj(self) -> dict:
        obj: Dict[str, dict] = {}
        for j in range(self.jmin, self.jmax + 1):
            row = {}
            for i in range(self.window[0], self.window[1] + 1):
                v = self.entries.get((j, i), 0)
                row[str(i)] = "?" if v is None else v
            obj[str(j)] = row
        return {"backend": self.backend,
                "window": [self.window[0], self.window[1]],
                "table": obj}

    def to_tsv(self) -> str:
        lo, hi = self.window
        lines = ["j\\i\t" + "\t".join(str(i) for i in range(lo, hi + 1))]
        for j in range(self.jmin, self.jmax + 1):
            cells = []
            for i in range(lo, hi + 1):
                v = self.entries.get((j, i), 0)
                cells.append("?" if v is None else str(v))
            lines.append(str(j) + "\t" + "\t".join(cells))
        return "\n".join(lines) + "\n"


def _gen_list(module, gens) -> List[Tuple[Poly, int]]:
    """Normalize generators to (poly, degree-in-module-grading) pairs."""
    if isinstance(gens, PositiveGeneratorData):
        polys = gens.gens
    else:
        polys = list(gens)
    return [(f, module.element_weight(f)) for f in polys]


def _subsets(r: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []
    for q in range(r + 1):
        out.extend(itertools.combinations(range(r), q))
    return out


def _subset_sign(S_target: Tuple[int, ...], u: int) -> int:
    return -1 if sum(1 for s in S_target if s < u) % 2 else 1


# ---------------------------------------------------------------------------
# Koszul stages and the colimit backend
# ---------------------------------------------------------------------------

class KoszulStage:
    """Stage m of the cofinal Koszul system for the given generators.

    Degree-q term of the weight-i slice: sum over |S| = q of the module
    piece at i + m * d_S; differentials multiply by f_u^m with alternating
    signs; the transition to stage m+1 multiplies block S by prod_{s in S} f_s.
    """

    def __init__(self, module, gens: Sequence[Tuple[Poly, int]], m: int):
        self.module = module
        self.field = module.field
        self.gens = list(gens)
        for f, d in self.gens:
            module.element_weight(f)  # raises HomogeneityError if inhomogeneous
        self.m = m
        self.r = len(self.gens)
        self.subsets = _subsets(self.r)
        self._slices: Dict[int, WeightSliceComplex] = {}
        self._lock = threading.RLock()

    def block_weight(self, S: Tuple[int, ...], i: int) -> int:
        return i + self.m * sum(self.gens[s][1] for s in S)

    def slice(self, i: int) -> WeightSliceComplex:
        with self._lock:
            sl = self._slices.get(i)
        if sl is not None:
            return sl
        from .linalg import block_matrix
        F = self.field
        by_degree: Dict[int, List[Tuple[int, ...]]] = {}
        for S in self.subsets:
            by_degree.setdefault(len(S), []).append(S)
        dims = {}
        block_dims: Dict[int, List[int]] = {}
        for q, Ss in by_degree.items():
            block_dims[q] = [self.module.weight_piece(self.block_weight(S, i)).dim for S in Ss]
            dims[q] = sum(block_dims[q])
        diffs = {}
        for q in range(self.r):
            srcs = by_degree[q]
            tgts = by_degree[q + 1]
            blocks = [[None] * len(srcs) for _ in tgts]
            for sj, S in enumerate(srcs):
                for u in range(self.r):
                    if u in S:
                        continue
                    T = tuple(sorted(S + (u,)))
                    ti = tgts.index(T)
                    fu = self.gens[u][0].pow(self.m)
                    mat = self.module.mult_matrix(fu, self.block_weight(S, i))
                    if _subset_sign(T, u) < 0:
                        mat = mat.neg()
                    blocks[ti][sj] = mat
            diffs[q] = block_matrix(F, blocks, block_dims[q + 1], block_dims[q])
        sl = WeightSliceComplex(F, i, dims, diffs, check=True)
        with self._lock:
            self._slices.setdefault(i, sl)
        return sl

    def transition(self, nxt: "KoszulStage", i: int) -> SliceMap:
        """Stage map m -> m+1 (block S multiplied by f_S), on the weight-i slices."""
        from .linalg import block_matrix
        F = self.field
        by_degree: Dict[int, List[Tuple[int, ...]]] = {}
        for S in self.subsets:
            by_degree.setdefault(len(S), []).append(S)
        maps = {}
        for q, Ss in by_degree.items():
            blocks = [[None] * len(Ss) for _ in Ss]
            rdims = [nxt.module.weight_piece(nxt.block_weight(S, i)).dim for S in Ss]
            cdims = [self.module.weight_piece(self.block_weight(S, i)).dim for S in Ss]
            for k, S in enumerate(Ss):
                fS = Poly.one(F, self.gens[0][0].nvars) if not S else None
                if S:
                    fS = self.gens[S[0]][0]
                    for s in S[1:]:
                        fS = fS * self.gens[s][0]
                    blocks[k][k] = self.module.mult_matrix(fS, self.block_weight(S, i))
                else:
                    blocks[k][k] = Matrix.identity(F, cdims[k])
            maps[q] = block_matrix(F, blocks, rdims, cdims)
        return SliceMap(self.slice(i), nxt.slice(i), maps, check=True)


def koszul_complex(module, gens, m: int) -> KoszulStage:
    return KoszulStage(module, _gen_list(module, gens), m)


class _StageSequence:
    """Lazily extended sequence of slices with maps to the next one."""

    def __init__(self, make_slice: Callable[[int], WeightSliceComplex],
                 make_map: Callable[[int], SliceMap], first_index: int = 1):
        self.make_slice = make_slice
        self.make_map = make_map
        self.first = first_index
        self._slices: Dict[int, WeightSliceComplex] = {}
        self._maps: Dict[int, SliceMap] = {}

    def slice(self, n: int) -> WeightSliceComplex:
        if n not in self._slices:
            self._slices[n] = self.make_slice(n)
        return self._slices[n]

    def map_to_next(self, n: int) -> SliceMap:
        if n not in self._maps:
            self._maps[n] = self.make_map(n)
        return self._maps[n]


def stabilized_cell_dim(seq: _StageSequence, j: int, span: int, budget: int) -> Tuple[Optional[int], CellInfo]:
    """Colimit dimension of H^j along the sequence, by composite-rank stabilization.

    A cell is stable at base n when the ranks of the composites to the next
    span+1 stages are all equal and the next base yields the same value.
    """
    induced: Dict[int, Optional[Matrix]] = {}

    def induced_at(n: int) -> Optional[Matrix]:
        """Induced map on H^j from stage n to n+1; None stands for zero."""
        if n not in induced:
            if seq.slice(n).cohomology_dim(j) == 0 or seq.slice(n + 1).cohomology_dim(j) == 0:
                induced[n] = None
            else:
                induced[n] = seq.map_to_next(n).induced_cohomology(j)
        return induced[n]

    try:
        first = seq.first
        for base in range(first, budget + 1):
            if base + span + 1 > budget:
                break
            comp: Optional[Matrix] = None
            dead = False
            ranks = []
            for s in range(1, span + 2):
                step = induced_at(base + s - 1)
                if step is None or dead:
                    dead = True
                    ranks.append(0)
                    continue
                comp = step if comp is None else step.mul(comp)
                ranks.append(rank(comp))
            if len(set(ranks)) == 1:
                return ranks[0], CellInfo("stable", stage=base, span=span)
        return None, CellInfo("inconclusive", stage=budget, span=span,
                              note="composite ranks did not stabilize within budget")
    except WindowError as e:
        return None, CellInfo("inconclusive", note="window: %s" % e)


def local_cohomology_table(module, gens, window: Tuple[int, int],
                           budget: int = 9, span: int = 3, jobs: int = 1) -> CohomologyTable:
    """RGamma_I(M) dimensions over the window, by the Koszul colimit."""
    gl = _gen_list(module, gens)
    r = len(gl)
    stages: Dict[int, KoszulStage] = {}
    stage_lock = threading.RLock()

    def stage(m: int) -> KoszulStage:
        with stage_lock:
            st = stages.get(m)
            if st is None:
                st = KoszulStage(module, gl, m)
                stages[m] = st
            return st

    def compute_weight(i: int):
        seq = _StageSequence(lambda m: stage(m).slice(i),
                             lambda m: stage(m).transition(stage(m + 1), i))
        out = {}
        for j in range(r + 1):
            out[j] = stabilized_cell_dim(seq, j, span, budget)
        return out

    lo, hi = window
    weights = list(range(lo, hi + 1))
    results = _run_per_weight(compute_weight, weights, jobs)
    entries = {}
    report = {}
    for i in weights:
        for j, (dim, info) in results[i].items():
            entries[(j, i)] = dim
            report[(j, i)] = info
    return CohomologyTable(window=window, jmin=0, jmax=r, backend="koszul-colimit",
                           entries=entries, report=report)


def _run_per_weight(fn, weights, jobs: int):
    if jobs and jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            computed = list(ex.map(fn, weights))
        return dict(zip(weights, computed))
    return {i: fn(i) for i in weights}


# ---------------------------------------------------------------------------
# truncated extended Cech backend
# ---------------------------------------------------------------------------

class LocalizedBlockError(WindowError):
    pass


class TruncatedCech:
    """Extended Cech complex with denominator-bounded localization models.

    The block for a subset S at weight i and truncation t is the module
    piece at i + t * deg(f_S) modulo the stabilized f_S-power kernel; the
    class of z there stands for z / f_S^t.  Differentials multiply by f_u^t;
    raising t multiplies by f_S, so slices form a directed system whose
    colimit is the honest complex.
    """

    def __init__(self, module, gens, chain_budget: int = 10, chain_span: int = 2):
        self.module = module
        self.field = module.field
        self.gens = _gen_list(module, gens)
        self.r = len(self.gens)
        self.subsets = _subsets(self.r)
        self.chain_budget = chain_budget
        self.chain_span = chain_span
        self._blocks: Dict[Tuple[Tuple[int, ...], int, int], Subquotient] = {}
        self._slices: Dict[Tuple[int, int], WeightSliceComplex] = {}
        self._lock = threading.RLock()

    def _fS(self, S: Tuple[int, ...]) -> Poly:
        if not S:
            return Poly.one(self.field, self.gens[0][0].nvars)
        p = self.gens[S[0]][0]
        for s in S[1:]:
            p = p * self.gens[s][0]
        return p

    def _dS(self, S: Tuple[int, ...]) -> int:
        return sum(self.gens[s][1] for s in S)

    def block(self, S: Tuple[int, ...], i: int, t: int) -> Subquotient:
        """Model of (M_{f_S})_i at truncation t, as a quotient of the source piece."""
        key = (S, i, t)
        with self._lock:
            b = self._blocks.get(key)
        if b is not None:
            return b
        F = self.field
        src_w = i + t * self._dS(S)
        piece = self.module.weight_piece(src_w)
        n = piece.dim
        if not S:
            kern_vectors: List[list] = []
        else:
            fS = self._fS(S)
            dims = []
            kern_vectors = []
            stable = False
            for e in range(1, self.chain_budget + 1):
                comp = composite_mult(self.module, fS, src_w, e)
                _, kern = rank_kernel(comp)
                dims.append(len(kern))
                kern_vectors = kern
                if len(dims) > self.chain_span and all(
                        dims[-1] == dims[-1 - s] for s in range(1, self.chain_span + 1)):
                    stable = True
                    break
            if not stable and n > 0 and dims and dims[-1] != n:
                raise LocalizedBlockError(
                    "power-torsion chain for f_%s at weight %d did not stabilize" % (S, i))
        cycles = [[F.one if k == j else F.zero for k in range(n)] for j in range(n)]
        b = Subquotient(F, n, cycles, kern_vectors)
        with self._lock:
            self._blocks.setdefault(key, b)
        return b

    def _block_map(self, S: Tuple[int, ...], i: int, t: int, g: Poly,
                   T: Tuple[int, ...], i2: int, t2: int) -> Matrix:
        """Quotient-induced matrix of source-level multiplication by g."""
        src = self.block(S, i, t)
        tgt = self.block(T, i2, t2)
        src_w = i + t * self._dS(S)
        big = self.module.mult_matrix(g, src_w)
        cols = [tgt.coords(big.apply(rep)) for rep in src.reps]
        return Matrix.from_columns(self.field, cols, tgt.dim)

    def ext_slice(self, i: int, t: int) -> WeightSliceComplex:
        """Weight-i slice of the extended complex at truncation t (degrees 0..r)."""
        key = (i, t)
        with self._lock:
            sl = self._slices.get(key)
        if sl is not None:
            return sl
        from .linalg import block_matrix
        F = self.field
        by_degree: Dict[int, List[Tuple[int, ...]]] = {}
        for S in self.subsets:
            by_degree.setdefault(len(S), []).append(S)
        dims = {}
        bdims: Dict[int, List[int]] = {}
        for q, Ss in by_degree.items():
            bdims[q] = [self.block(S, i, t).dim for S in Ss]
            dims[q] = sum(bdims[q])
        diffs = {}
        for q in range(self.r):
            srcs, tgts = by_degree[q], by_degree[q + 1]
            blocks = [[None] * len(srcs) for _ in tgts]
            for sj, S in enumerate(srcs):
                for u in range(self.r):
                    if u in S:
                        continue
                    T = tuple(sorted(S + (u,)))
                    ti = tgts.index(T)
                    g = self.gens[u][0].pow(t)
                    mat = self._block_map(S, i, t, g, T, i, t)
                    if _subset_sign(T, u) < 0:
                        mat = mat.neg()
                    blocks[ti][sj] = mat
            diffs[q] = block_matrix(F, blocks, bdims[q + 1], bdims[q])
        sl = WeightSliceComplex(F, i, dims, diffs, check=True)
        with self._lock:
            self._slices.setdefault(key, sl)
        return sl

    def ext_transition(self, i: int, t: int) -> SliceMap:
        """Truncation raise t -> t+1: block S multiplies by f_S."""
        from .linalg import block_matrix
        F = self.field
        by_degree: Dict[int, List[Tuple[int, ...]]] = {}
        for S in self.subsets:
            by_degree.setdefault(len(S), []).append(S)
        maps = {}
        for q, Ss in by_degree.items():
            blocks = [[None] * len(Ss) for _ in Ss]
            rdims = [self.block(S, i, t + 1).dim for S in Ss]
            cdims = [self.block(S, i, t).dim for S in Ss]
            for k, S in enumerate(Ss):
                if not S:
                    blocks[k][k] = Matrix.identity(F, cdims[k])
                else:
                    blocks[k][k] = self._block_map(S, i, t, self._fS(S), S, i, t + 1)
            maps[q] = block_matrix(F, blocks, rdims, cdims)
        return SliceMap(self.ext_slice(i, t), self.ext_slice(i, t + 1), maps, check=True)

    def cech_from_ext(self, i: int, t: int) -> WeightSliceComplex:
        """The Cech complex slice: degrees 0..r-1, differentials negated."""
        ext = self.ext_slice(i, t)
        dims = {j: ext.dim(j + 1) for j in range(0, self.r)}
        diffs = {j: ext.diff(j + 1).neg() for j in range(0, self.r - 1)}
        return WeightSliceComplex(self.field, i, dims, diffs, check=False)

    def eta_matrix(self, i: int, t: int) -> Matrix:
        """eta = -d^0 : M_i -> C^0 of the extended slice at truncation t."""
        ext = self.ext_slice(i, t)
        d0 = ext.diff(0)
        return d0.neg()


def cech_truncated_oracle(module, gens, cell: Tuple[int, int], trunc: int = 8,
                          span: int = 3, kind: str = "rgam") -> Tuple[Optional[int], CellInfo]:
    """Oracle dimension of one cell from the truncated honest complex.

    kind="rgam" indexes the extended complex (degrees 0..r); kind="cech"
    indexes the Cech complex (degree j of Cech = degree j+1 of extended,
    except j=0 which is the kernel of the first Cech differential).
    """
    j, i = cell
    tc = TruncatedCech(module, gens)
    if kind == "cech":
        if j == 0:
            return _stabilized_cech_h0(tc, i, trunc, span)[:2]
        j = j + 1
    seq = _StageSequence(lambda t: tc.ext_slice(i, t),
                         lambda t: tc.ext_transition(i, t))
    return stabilized_cell_dim(seq, j, span, trunc)


def _stabilized_cech_h0(tc: TruncatedCech, i: int, trunc: int, span: int):
    """(dim, info, t*) of H^0(Cech)_i; transitions are injective, so the
    kernel dimensions converge monotonically."""
    dims = []
    for t in range(1, trunc + 1):
        try:
            ext = tc.ext_slice(i, t)
        except WindowError as e:
            return None, CellInfo("inconclusive", note="window: %s" % e), t
        d1 = ext.diff(1)
        kdim = d1.cols - rank(d1)
        dims.append(kdim)
        if len(dims) > span and all(dims[-1] == dims[-1 - s] for s in range(1, span + 1)):
            return kdim, CellInfo("stable", stage=t, span=span), t
    return None, CellInfo("inconclusive", stage=trunc,
                          note="H0 kernel dims did not stabilize"), trunc


class SaturatedModule:
    """N' = H^0(Cech_I(M)) realized as a weightwise module.

    Pieces are kernels of the first Cech differential at a common stabilized
    truncation; the ring action is induced blockwise on sources, so this
    object supports the same slicing interface and can be saturated again.
    """

    def __init__(self, module, gens, window: Tuple[int, int],
                 trunc: int = 8, span: int = 3):
        self.base = module
        self.ring = module.ring
        self.field = module.field
        self.window = window
        self.gens = _gen_list(module, gens)
        self.tc = TruncatedCech(module, gens)
        t_star = 1
        self._h0_dim: Dict[int, int] = {}
        lo, hi = window
        for i in range(lo, hi + 1):
            dim, info, t_used = _stabilized_cech_h0(self.tc, i, trunc, span)
            if dim is None:
                raise WindowError("saturation piece at weight %d did not stabilize "
                                  "(increase trunc or ring bound): %s" % (i, info.note))
            self._h0_dim[i] = dim
            t_star = max(t_star, t_used)
        self.t_star = t_star
        self._pieces: Dict[int, WeightPiece] = {}
        self._lock = threading.RLock()

    def element_weight(self, f: Poly) -> int:
        return self.base.element_weight(f)

    def weight_piece(self, i: int) -> WeightPiece:
        with self._lock:
            piece = self._pieces.get(i)
        if piece is not None:
            return piece
        ext = self.tc.ext_slice(i, self.t_star)
        d1 = ext.diff(1)
        _, kern = rank_kernel(d1)
        sub = Subquotient(self.field, ext.dim(1), kern, [])
        if i in self._h0_dim and sub.dim != self._h0_dim[i]:
            raise WindowError("saturation piece at weight %d changed between truncations" % i)
        piece = WeightPiece(i, sub.dim, tuple("s%d" % k for k in range(sub.dim)), sub)
        with self._lock:
            self._pieces.setdefault(i, piece)
        return piece

    def mult_matrix(self, f: Poly, i: int) -> Matrix:
        w = self.element_weight(f)
        src = self.weight_piece(i)
        tgt = self.weight_piece(i + w)
        t = self.t_star
        by_degree = [S for S in self.tc.subsets if len(S) == 1]
        # source-level multiplication on each singleton block
        from .linalg import block_matrix
        blocks = [[None] * len(by_degree) for _ in by_degree]
        rdims = [self.tc.block(S, i + w, t).dim for S in by_degree]
        cdims = [self.tc.block(S, i, t).dim for S in by_degree]
        for k, S in enumerate(by_degree):
            blocks[k][k] = self.tc._block_map(S, i, t, f, S, i + w, t)
        big = block_matrix(self.field, blocks, rdims, cdims)
        cols = [tgt.sub.coords(big.apply(rep)) for rep in src.sub.reps]
        return Matrix.from_columns(self.field, cols, tgt.dim)

    def eta(self, i: int) -> Matrix:
        """Realized map M_i -> N'_i (the paper's eta, i.e. -d^0 into H^0)."""
        piece = self.weight_piece(i)
        em = self.tc.eta_matrix(i, self.t_star)
        cols = [piece.sub.coords(em.column(c)) for c in range(em.cols)]
        return Matrix.from_columns(self.field, cols, piece.dim)


# ---------------------------------------------------------------------------
# tables, saturation, triangle, vanishing bounds
# ---------------------------------------------------------------------------

def cech_table(module, gens, window: Tuple[int, int], budget: int = 9, span: int = 3,
               trunc: int = 8, jobs: int = 1, with_maps: bool = True):
    """Cech cohomology dims: H^j = H^{j+1}(RGamma) for j >= 1 and H^0 from the
    four-term exact sequence; optionally the realized maps M_i -> H^0(Cech)_i.

    Returns (CohomologyTable, eta dict or None, SaturatedModule or None).
    """
    gl = _gen_list(module, gens)
    r = len(gl)
    rgam = local_cohomology_table(module, gens, window, budget=budget, span=span, jobs=jobs)
    lo, hi = window
    entries: Dict[Tuple[int, int], Optional[int]] = {}
    report: Dict[Tuple[int, int], CellInfo] = {}
    for i in range(lo, hi + 1):
        g0 = rgam.entries.get((0, i), 0)
        g1 = rgam.entries.get((1, i), 0)
        try:
            mdim = module.weight_piece(i).dim
        except WindowError:
            mdim = None
        if g0 is None or g1 is None or mdim is None:
            entries[(0, i)] = None
            report[(0, i)] = CellInfo("inconclusive", note="four-term input inconclusive")
        else:
            entries[(0, i)] = mdim - g0 + g1
            report[(0, i)] = CellInfo("stable", note="four-term")
        for j in range(1, r):
            entries[(j, i)] = rgam.entries.get((j + 1, i), 0)
            report[(j, i)] = rgam.report.get((j + 1, i), CellInfo("stable"))
    table = CohomologyTable(window=window, jmin=0, jmax=max(r - 1, 0),
                            backend="cech-via-koszul", entries=entries, report=report)
    if not with_maps:
        return table, None, None
    sat = SaturatedModule(module, gens, window, trunc=trunc, span=span)
    eta = {}
    for i in range(lo, hi + 1):
        eta[i] = sat.eta(i)
        expected = entries[(0, i)]
        if expected is not None and sat.weight_piece(i).dim != expected:
            entries[(0, i)] = None
            report[(0, i)] = CellInfo("inconclusive",
                                      note="four-term and truncated H0 disagree "
                                           "(%d vs %d)" % (expected, sat.weight_piece(i).dim))
    return table, eta, sat


@dataclass
class SaturationWeight:
    weight: int
    module_dim: int
    saturation_dim: Optional[int]
    kernel_dim: Optional[int]
    cokernel_dim: Optional[int]
    map: Optional[Matrix]


def saturate(module, gens, window: Tuple[int, int], budget: int = 9, span: int = 3,
             trunc: int = 8) -> Tuple[List[SaturationWeight], SaturatedModule]:
    """Weightwise data of N' = H^0(Cech_{I+}(M)) with the comparison map."""
    table, eta, sat = cech_table(module, gens, window, budget=budget, span=span, trunc=trunc)
    out = []
    lo, hi = window
    for i in range(lo, hi + 1):
        mdim = module.weight_piece(i).dim
        ndim = table.entries.get((0, i))
        m = eta[i] if eta else None
        if ndim is None or m is None:
            out.append(SaturationWeight(i, mdim, None, None, None, None))
            continue
        rk = rank(m)
        out.append(SaturationWeight(i, mdim, ndim, mdim - rk, ndim - rk, m))
    return out, sat


@dataclass
class FourTermData:
    """Realized 0 -> Gamma -> M -> H0(Cech) -> H1(RGamma) -> 0 at one weight."""

    weight: int
    gamma_dim: int           # dim H^0(RGamma)_i from the Koszul backend
    m_dim: int
    h0_dim: int              # dim H^0(Cech)_i (truncated realization)
    h1_dim: int              # dim H^1(RGamma)_i from the Koszul backend
    eta: Matrix              # M_i -> H0
    connecting: Matrix       # H0 -> H1 (truncated extended slice)
    ext_dims: Dict[int, int]  # H^j of the truncated extended slice
    koszul_dims: Dict[int, Optional[int]]


def verify_four_term(data: FourTermData) -> List[str]:
    """Exact rank bookkeeping of the triangle long sequence at one weight."""
    failures = []
    rk_eta = rank(data.eta)
    if rk_eta != data.m_dim - data.gamma_dim:
        failures.append("weight %d: rank(eta)=%d but dim M - dim Gamma = %d"
                        % (data.weight, rk_eta, data.m_dim - data.gamma_dim))
    rk_conn = rank(data.connecting)
    if rk_conn != data.h0_dim - rk_eta:
        failures.append("weight %d: rank(connecting)=%d but dim H0 - rank(eta) = %d"
                        % (data.weight, rk_conn, data.h0_dim - rk_eta))
    if rk_conn != data.h1_dim:
        failures.append("weight %d: connecting map is not onto H1 (rank %d vs dim %d)"
                        % (data.weight, rk_conn, data.h1_dim))
    comp = data.connecting.mul(data.eta)
    if not comp.is_zero():
        failures.append("weight %d: connecting . eta != 0" % data.weight)
    for j, kd in data.koszul_dims.items():
        ed = data.ext_dims.get(j, 0)
        if kd is not None and kd != ed:
            failures.append("weight %d: backend disagreement at degree %d (koszul %d vs cech %d)"
                            % (data.weight, j, kd, ed))
    return failures


@dataclass
class TriangleReport:
    window: Tuple[int, int]
    failures: List[str]
    inconclusive: List[int]

    @property
    def passed(self) -> bool:
        return not self.failures and not self.inconclusive


def four_term_data(module, gens, i: int, rgam: CohomologyTable,
                   sat: SaturatedModule) -> Optional[FourTermData]:
    g0 = rgam.entries.get((0, i))
    g1 = rgam.entries.get((1, i))
    if g0 is None or g1 is None:
        return None
    t = sat.t_star
    ext = sat.tc.ext_slice(i, t)
    h0 = sat.weight_piece(i)
    eta = sat.eta(i)
    h1 = ext.cohomology(1)
    cols = [h1.coords(rep) for rep in h0.sub.reps]
    connecting = Matrix.from_columns(module.field, cols, h1.dim)
    ext_dims = {j: ext.cohomology_dim(j) for j in ext.dims}
    koszul_dims = {j: rgam.entries.get((j, i)) for j in range(rgam.jmin, rgam.jmax + 1)}
    return FourTermData(weight=i, gamma_dim=g0, m_dim=module.weight_piece(i).dim,
                        h0_dim=h0.dim, h1_dim=g1, eta=eta, connecting=connecting,
                        ext_dims=ext_dims, koszul_dims=koszul_dims)


def triangle_check(module, gens, window: Tuple[int, int], budget: int = 9,
                   span: int = 3, trunc: int = 8, jobs: int = 1) -> TriangleReport:
    """Exactness of ... -> H^j(RGamma)_i -> H^j(M)_i -> H^j(Cech)_i -> ... per weight."""
    rgam = local_cohomology_table(module, gens, window, budget=budget, span=span, jobs=jobs)
    sat = SaturatedModule(module, gens, window, trunc=trunc, span=span)
    failures: List[str] = []
    inconclusive: List[int] = []
    lo, hi = window
    for i in range(lo, hi + 1):
        data = four_term_data(module, gens, i, rgam, sat)
        if data is None:
            inconclusive.append(i)
            continue
        failures.extend(verify_four_term(data))
    return TriangleReport(window=window, failures=failures, inconclusive=inconclusive)


@dataclass
class VanishingBounds:
    c_plus: Optional[int]
    c_minus: Optional[int]
    support_max: Optional[int]
    support_min: Optional[int]
    note: str = ""


def vanishing_bounds(module, gens_plus, gens_minus, window: Tuple[int, int],
                     budget: int = 9, span: int = 3, jobs: int = 1) -> VanishingBounds:
    """Least c+ with all RGamma_{I+} cells zero for i >= c+ (and the mirror c-).

    Returns None for a side whose support touches the window boundary
    (NotFoundInWindow) or whose relevant cells are inconclusive.
    """
    lo, hi = window
    plus = local_cohomology_table(module, gens_plus, window, budget=budget, span=span, jobs=jobs)
    minus = local_cohomology_table(module, gens_minus, window, budget=budget, span=span, jobs=jobs)

    def support_top(table: CohomologyTable) -> Tuple[Optional[int], str]:
        top = None
        for (j, i), v in table.entries.items():
            if v is None:
                return None, "inconclusive cell at (%d,%d)" % (j, i)
            if v:
                top = i if top is None else max(top, i)
        return top, ""

    def support_bot(table: CohomologyTable) -> Tuple[Optional[int], str]:
        bot = None
        for (j, i), v in table.entries.items():
            if v is None:
                return None, "inconclusive cell at (%d,%d)" % (j, i)
            if v:
                bot = i if bot is None else min(bot, i)
        return bot, ""

    smax, note_p = support_top(plus)
    smin, note_m = support_bot(minus)
    c_plus: Optional[int]
    c_minus: Optional[int]
    note = ""
    if note_p:
        c_plus, note = None, note_p
        smax = None
    elif smax is None:
        c_plus = lo  # RGamma vanishes identically in the window
    elif smax >= hi:
        c_plus, note = None, "support of RGamma_{I+} reaches the window top"
    else:
        c_plus = smax + 1
    if note_m:
        c_minus = None
        note = (note + "; " if note else "") + note_m
        smin = None
    elif smin is None:
        c_minus = hi
    elif smin <= lo:
        c_minus = None
        note = (note + "; " if note else "") + "support of RGamma_{I-} reaches the window bottom"
    else:
        c_minus = smin - 1
    return VanishingBounds(c_plus=c_plus, c_minus=c_minus,
                           support_max=smax, support_min=smin, note=note)
