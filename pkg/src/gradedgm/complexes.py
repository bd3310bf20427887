"""Weight-sliced cochain complexes of finite-dimensional vector spaces.

A slice is a bounded complex with explicit differential matrices; d.d = 0 is
checked exactly at construction.  Cohomology comes with realized bases
(Subquotient), so maps of slices induce honest matrices on cohomology.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import Matrix, Subquotient, rank, rank_kernel


class ComplexError(ValueError):
    pass


class WeightSliceComplex:
    """Cochain complex C^jmin -> ... -> C^jmax with explicit differentials."""

    def __init__(self, field, weight: int, dims: Dict[int, int], diffs: Dict[int, Matrix],
                 check: bool = True):
        self.field = field
        self.weight = weight
        self.dims = {j: d for j, d in dims.items() if d or j in dims}
        self.diffs = dict(diffs)
        degs = [j for j, d in dims.items()]
        self.jmin = min(degs) if degs else 0
        self.jmax = max(degs) if degs else 0
        self._cohom: Dict[int, Subquotient] = {}
        self._diff_rank: Dict[int, int] = {}
        self._lock = threading.RLock()
        if check:
            self._check()

    def dim(self, j: int) -> int:
        return self.dims.get(j, 0)

    def diff(self, j: int) -> Matrix:
        """d^j: C^j -> C^{j+1}; a zero matrix when absent."""
        m = self.diffs.get(j)
        if m is None:
            return Matrix.zero(self.field, self.dim(j + 1), self.dim(j))
        return m

    def _check(self):
        for j in sorted(self.dims):
            d0 = self.diff(j)
            if d0.cols != self.dim(j) or d0.rows != self.dim(j + 1):
                raise ComplexError("differential at degree %d has shape %dx%d, expected %dx%d"
                                   % (j, d0.rows, d0.cols, self.dim(j + 1), self.dim(j)))
            d1 = self.diff(j + 1)
            if d1.rows and d0.cols and not d1.mul(d0).is_zero():
                raise ComplexError("d.d != 0 first fails at degree %d" % j)

    def cohomology(self, j: int) -> Subquotient:
        """Realized H^j = ker d^j / im d^{j-1} with representative cocycles."""
        with self._lock:
            sq = self._cohom.get(j)
        if sq is not None:
            return sq
        _, cycles = rank_kernel(self.diff(j))
        boundaries = self.diff(j - 1).columns() if self.dim(j) else []
        sq = Subquotient(self.field, self.dim(j), cycles, boundaries)
        with self._lock:
            self._cohom.setdefault(j, sq)
        return sq

    def diff_rank(self, j: int) -> int:
        with self._lock:
            r = self._diff_rank.get(j)
        if r is None:
            d = self.diff(j)
            r = rank(d) if d.rows and d.cols else 0
            with self._lock:
                self._diff_rank.setdefault(j, r)
        return r

    def cohomology_dim(self, j: int) -> int:
        """dim ker d^j - rank d^{j-1}, from cached ranks (no basis realization)."""
        if self.dim(j) == 0:
            return 0
        return self.dim(j) - self.diff_rank(j) - self.diff_rank(j - 1)

    def euler_characteristic(self) -> int:
        return sum((-1) ** j * d for j, d in self.dims.items())


def build_slice(field, weight: int, dims: Dict[int, int], diffs: Dict[int, Matrix]) -> WeightSliceComplex:
    return WeightSliceComplex(field, weight, dims, diffs, check=True)


def cohomology_dims(slice_: WeightSliceComplex) -> List[Tuple[int, int]]:
    """[(j, dim H^j)] over the support; the Euler identity is asserted."""
    out = [(j, slice_.cohomology_dim(j)) for j in sorted(slice_.dims)]
    chi_terms = slice_.euler_characteristic()
    chi_cohom = sum((-1) ** j * d for j, d in out)
    if chi_terms != chi_cohom:
        raise ComplexError("Euler characteristic mismatch: terms %d vs cohomology %d"
                           % (chi_terms, chi_cohom))
    return out


class SliceMap:
    """Degree-zero map of slices; squares with the differentials are verified."""

    def __init__(self, src: WeightSliceComplex, tgt: WeightSliceComplex,
                 maps: Dict[int, Matrix], check: bool = True):
        self.src = src
        self.tgt = tgt
        self.maps = dict(maps)
        self.field = src.field
        if check:
            self._check()

    def map_at(self, j: int) -> Matrix:
        m = self.maps.get(j)
        if m is None:
            return Matrix.zero(self.field, self.tgt.dim(j), self.src.dim(j))
        return m

    def _check(self):
        degs = set(self.src.dims) | set(self.tgt.dims)
        for j in sorted(degs):
            f_j = self.map_at(j)
            if f_j.cols != self.src.dim(j) or f_j.rows != self.tgt.dim(j):
                raise ComplexError("slice map at degree %d has wrong shape" % j)
            left = self.tgt.diff(j).mul(f_j)
            right = self.map_at(j + 1).mul(self.src.diff(j))
            if not left.add(right.neg()).is_zero():
                raise ComplexError("slice map does not commute with differentials at degree %d" % j)

    def induced_cohomology(self, j: int) -> Matrix:
        """Matrix of H^j(src) -> H^j(tgt) in the realized bases."""
        hs = self.src.cohomology(j)
        ht = self.tgt.cohomology(j)
        f_j = self.map_at(j)
        cols = [ht.coords(f_j.apply(rep)) for rep in hs.reps]
        return Matrix.from_columns(self.field, cols, ht.dim)


def compose_slice_maps(outer: SliceMap, inner: SliceMap) -> SliceMap:
    degs = set(inner.src.dims) | set(outer.tgt.dims) | set(inner.tgt.dims)
    maps = {j: outer.map_at(j).mul(inner.map_at(j)) for j in degs}
    return SliceMap(inner.src, outer.tgt, maps, check=False)


def mapping_cone(smap: SliceMap) -> WeightSliceComplex:
    """cone(f)^j = src^{j+1} (+) tgt^j with d = [[-d_src, 0], [f, d_tgt]]."""
    from .linalg import block_matrix
    src, tgt = smap.src, smap.tgt
    F = smap.field
    degs = sorted(set(j - 1 for j in src.dims) | set(tgt.dims))
    dims = {j: src.dim(j + 1) + tgt.dim(j) for j in degs}
    diffs = {}
    for j in degs:
        rd = [src.dim(j + 2), tgt.dim(j + 1)]
        cd = [src.dim(j + 1), tgt.dim(j)]
        blk = [[src.diff(j + 1).neg(), None],
               [smap.map_at(j + 1), tgt.diff(j)]]
        diffs[j] = block_matrix(F, blk, rd, cd)
    return WeightSliceComplex(F, src.weight, dims, diffs, check=True)


def dual_slice(slice_: WeightSliceComplex) -> WeightSliceComplex:
    """k-linear dual: degrees negated, differentials transposed.

    dim H^j(dual) = dim H^{-j}(slice).
    """
    dims = {-j: d for j, d in slice_.dims.items()}
    diffs = {}
    for j in slice_.dims:
        # d_dual^{-j-1}: (C^{j+1})* -> (C^j)* is the transpose of d^j
        d = slice_.diff(j)
        if d.rows or d.cols:
            diffs[-j - 1] = d.transpose()
    return WeightSliceComplex(slice_.field, slice_.weight, dims, diffs, check=True)


def zero_slice(field, weight: int = 0) -> WeightSliceComplex:
    return WeightSliceComplex(field, weight, {0: 0}, {}, check=False)
