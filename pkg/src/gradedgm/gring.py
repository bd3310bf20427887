"""Weighted Z-graded polynomial quotient rings A = k[x_1..x_n]/J.

A ring is built from a weight vector and weight-homogeneous relations.  A
reduced grevlex Groebner basis gives canonical normal forms; standard
monomials enumerated by total degree give the weight-piece bases, with
local finiteness validated (not assumed) up to a total-degree bound.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import Matrix, rank
from .poly import (Mono, Poly, buchberger, grevlex_key, m_deg, m_divides,
                   m_weight, mono_str, parse_poly, reduce_poly)


class HomogeneityError(ValueError):
    pass


class LocalFinitenessError(ValueError):
    pass


class WindowError(ValueError):
    pass


class DegenerateGradingError(ValueError):
    pass


# extra silent total degrees required before a weight bucket counts as stable
CONFIRM_SPAN = 2


@dataclass
class PositiveGeneratorData:
    """Minimal homogeneous generators of I^+ (or I^- for sign=-1)."""

    gens: List[Poly]
    degrees: List[int]          # weights in the ring's own grading, all > 0 for sign=+1
    lcm_degree: int             # d, divisible by every generator degree
    sign: int = 1

    def signed_degrees(self) -> List[int]:
        return [self.sign * d for d in self.degrees]


class WeightedRing:
    """Presented Z-graded k-algebra with validated weight-piece bases.

    Immutable after construction; weight bases and normal forms are pure
    lookups, safe for concurrent reads.
    """

    def __init__(self, field, names: Sequence[str], weights: Sequence[int],
                 relations: Sequence[Poly], degree_bound: int):
        if len(names) != len(weights):
            raise ValueError("got %d variables but %d weights" % (len(names), len(weights)))
        self.field = field
        self.names = tuple(names)
        self.weights = tuple(int(w) for w in weights)
        self.nvars = len(names)
        self.degree_bound = int(degree_bound)
        self.relations = list(relations)
        for k, rel in enumerate(self.relations):
            if rel.is_zero():
                continue
            if not rel.is_homogeneous(self.weights):
                raise HomogeneityError(
                    "relation %d (%s) is not weight-homogeneous for weights %s"
                    % (k, rel.to_str(self.names), list(self.weights)))
        self.groebner = buchberger(self.relations)
        self.lead_monomials = [g.leading()[0] for g in self.groebner]
        self._std_by_weight: Dict[int, List[Mono]] = {}
        self._last_new: Dict[int, int] = {}
        self._index_cache: Dict[int, Dict[Mono, int]] = {}
        self._lock = threading.RLock()
        self._enumerate_standard_monomials()
        self._validate_local_finiteness()

    # -- construction helpers -------------------------------------------------

    def _is_standard(self, mono: Mono) -> bool:
        return not any(m_divides(lm, mono) for lm in self.lead_monomials)

    def _enumerate_standard_monomials(self):
        n = self.nvars
        buckets: Dict[int, List[Tuple[int, Mono]]] = {}
        for d in range(self.degree_bound + 1):
            for mono in _monomials_of_degree(n, d):
                if not self._is_standard(mono):
                    continue
                w = m_weight(mono, self.weights)
                buckets.setdefault(w, []).append((d, mono))
                self._last_new[w] = d
        for w, entries in buckets.items():
            entries.sort(key=lambda dm: (dm[0], tuple(-e for e in dm[1])))
            self._std_by_weight[w] = [m for _, m in entries]

    @property
    def _grading_kind(self) -> str:
        pos = any(w > 0 for w in self.weights)
        neg = any(w < 0 for w in self.weights)
        zero = any(w == 0 for w in self.weights)
        if pos and not neg and not zero:
            return "positive"
        if neg and not pos and not zero:
            return "negative"
        return "mixed"

    def _validate_local_finiteness(self):
        if self._grading_kind != "mixed":
            return  # all-positive/all-negative gradings are locally finite outright
        maxw = max((abs(w) for w in self.weights if w != 0), default=1) or 1
        headroom = 4
        for w, last in sorted(self._last_new.items()):
            first_possible = math.ceil(abs(w) / maxw)
            if first_possible + headroom <= self.degree_bound and last > self.degree_bound - CONFIRM_SPAN:
                raise LocalFinitenessError(
                    "weight %d keeps acquiring standard monomials up to total degree %d; "
                    "the grading is not locally finite (dim A_%d appears infinite)"
                    % (w, self.degree_bound, w))

    # -- queries ---------------------------------------------------------------

    def validated(self, i: int) -> bool:
        """Whether the weight-i standard-monomial basis is certified complete."""
        kind = self._grading_kind
        if kind == "positive":
            if i < 0:
                return True
            minw = min(self.weights)
            return i // minw <= self.degree_bound
        if kind == "negative":
            if i > 0:
                return True
            maxw = max(self.weights)  # closest to zero
            return abs(i) // abs(maxw) <= self.degree_bound
        maxw = max((abs(w) for w in self.weights if w != 0), default=1) or 1
        if math.ceil(abs(i) / maxw) + CONFIRM_SPAN > self.degree_bound:
            return False
        return self._last_new.get(i, -1) <= self.degree_bound - CONFIRM_SPAN

    def require_window(self, i: int):
        if not self.validated(i):
            raise WindowError(
                "weight %d is outside the validated window of this ring "
                "(degree bound %d); rebuild with a larger bound" % (i, self.degree_bound))

    def weight_basis(self, i: int) -> List[Mono]:
        """Ordered standard-monomial basis of A_i (degree, then descending lex)."""
        self.require_window(i)
        return self._std_by_weight.get(i, [])

    def weight_dim(self, i: int) -> int:
        return len(self.weight_basis(i))

    def basis_index(self, i: int) -> Dict[Mono, int]:
        with self._lock:
            idx = self._index_cache.get(i)
            if idx is None:
                idx = {m: k for k, m in enumerate(self.weight_basis(i))}
                self._index_cache[i] = idx
            return idx

    def normal_form(self, p: Poly) -> Poly:
        return reduce_poly(p, self.groebner)

    def coords_in_piece(self, p: Poly, i: int) -> List[object]:
        """Coordinates of normal_form(p) in the weight-i basis."""
        nf = self.normal_form(p)
        idx = self.basis_index(i)
        vec = [self.field.zero] * len(idx)
        for m, c in nf.terms.items():
            if m_weight(m, self.weights) != i:
                raise HomogeneityError("element has a term of weight %d, expected %d"
                                       % (m_weight(m, self.weights), i))
            vec[idx[m]] = c
        return vec

    def element_weight(self, p: Poly) -> int:
        w = p.weight_or_none(self.weights)
        if w is None:
            raise HomogeneityError("element %s is not weight-homogeneous" % (p.to_str(self.names),))
        return w

    def parse(self, text: str) -> Poly:
        return parse_poly(self.field, self.names, text)

    def poly_str(self, p: Poly) -> str:
        return p.to_str(self.names)

    # -- positive generators and Lemma-style span checks ------------------------

    def positive_generators(self, sign: int = 1) -> PositiveGeneratorData:
        """Minimal homogeneous generating set of I^+ (I^- for sign=-1), with lcm degree.

        Candidates are the variables of positive (resp. negative) weight;
        redundant ones (lying in the ideal spanned by the others modulo the
        relations) are dropped.  Generation is then verified weightwise up to
        the window bound.
        """
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        cand = [(self.weights[j] * sign, j) for j in range(self.nvars)
                if sign * self.weights[j] > 0]
        cand.sort()
        kept: List[int] = [j for _, j in cand]
        kept = [j for j in kept if not self.normal_form(Poly.variable(self.field, self.nvars, j)).is_zero()]
        if not kept:
            side = "A_{>0}" if sign > 0 else "A_{<0}"
            raise DegenerateGradingError("%s is zero: the grading is degenerate on this side" % side)
        # greedy minimalization via ideal membership modulo the relations
        changed = True
        while changed and len(kept) > 1:
            changed = False
            for pos in range(len(kept)):
                others = kept[:pos] + kept[pos + 1:]
                gb = buchberger(self.relations + [Poly.variable(self.field, self.nvars, j) for j in others])
                if reduce_poly(Poly.variable(self.field, self.nvars, kept[pos]), gb).is_zero():
                    kept.pop(pos)
                    changed = True
                    break
        gens = [Poly.variable(self.field, self.nvars, j) for j in kept]
        degrees = [sign * self.weights[j] for j in kept]
        d = math.lcm(*degrees)
        return PositiveGeneratorData(gens=gens, degrees=degrees, lcm_degree=d, sign=sign)

    def span_product(self, i: int, j: int) -> int:
        """dim of the span of A_i * A_j inside A_{i+j}."""
        bi, bj = self.weight_basis(i), self.weight_basis(j)
        target = i + j
        self.require_window(target)
        cols = []
        for a in bi:
            for b in bj:
                p = self.normal_form(Poly.monomial(self.field, self.nvars, a) *
                                     Poly.monomial(self.field, self.nvars, b))
                cols.append(self.coords_in_piece(p, target))
        dim_t = self.weight_dim(target)
        if not cols:
            return 0
        return rank(Matrix.from_columns(self.field, cols, dim_t))

    def check_AN_Ad(self, N: int, gen_data: Optional[PositiveGeneratorData] = None) -> bool:
        """Whether A_N equals the span of A_d * A_{N-d} (d = lcm generator degree)."""
        data = gen_data or self.positive_generators()
        d = data.lcm_degree
        return self.span_product(d, N - d) == self.weight_dim(N)


def _monomials_of_degree(nvars: int, d: int):
    """All exponent tuples of total degree d, in lexicographic order."""
    if nvars == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, d - first):
            yield (first,) + rest


def build_ring(vars: Sequence[str], weights: Sequence[int],
               relations: Sequence, field=None, bound: int = 12) -> WeightedRing:
    """Construct a validated WeightedRing; relation entries may be strings."""
    from .linalg import QQ
    field = field or QQ
    parsed = []
    for rel in relations:
        parsed.append(parse_poly(field, vars, rel) if isinstance(rel, str) else rel)
    return WeightedRing(field, vars, weights, parsed, degree_bound=bound)


class VeroneseView:
    """The m-uple view A^(m): weight_basis(view, i) = weight_basis(base, m*i).

    No new presentation is computed; all queries delegate to the base ring
    with weight scaling.  Elements of the view are base polynomials whose
    weight is divisible by m.
    """

    def __init__(self, base: WeightedRing, m: int):
        if m <= 0:
            raise ValueError("Veronese multiplier must be positive, got %d" % m)
        self.base = base
        self.m = int(m)
        self.field = base.field
        self.names = base.names
        self.nvars = base.nvars

    def validated(self, i: int) -> bool:
        return self.base.validated(self.m * i)

    def require_window(self, i: int):
        self.base.require_window(self.m * i)

    def weight_basis(self, i: int) -> List[Mono]:
        return self.base.weight_basis(self.m * i)

    def weight_dim(self, i: int) -> int:
        return self.base.weight_dim(self.m * i)

    def basis_index(self, i: int):
        return self.base.basis_index(self.m * i)

    def normal_form(self, p: Poly) -> Poly:
        return self.base.normal_form(p)

    def coords_in_piece(self, p: Poly, i: int):
        return self.base.coords_in_piece(p, self.m * i)

    def element_weight(self, p: Poly) -> int:
        w = self.base.element_weight(p)
        if w % self.m != 0:
            raise HomogeneityError("weight %d element is not in the %d-uple subring" % (w, self.m))
        return w // self.m

    def poly_str(self, p: Poly) -> str:
        return self.base.poly_str(p)

    def positive_generators(self, sign: int = 1, scan_bound: Optional[int] = None) -> PositiveGeneratorData:
        """Generators of (A^(m))_{>0}: scan view weights, keeping basis elements
        outside the span already generated."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        m = self.m
        if scan_bound is None:
            scan_bound = max(1, self.base.degree_bound // max(1, m * min(
                (abs(w) for w in self.base.weights if w != 0), default=1)) // 2 + 2)
        gens: List[Tuple[Poly, int]] = []
        silent = 0
        j = 0
        while j < scan_bound or silent < 2:
            j += 1
            if not self.validated(sign * j):
                break
            dim = self.weight_dim(sign * j)
            if dim == 0:
                silent += 1
                continue
            spanned = self._generated_span(gens, sign * j)
            if spanned == dim:
                silent += 1
                continue
            silent = 0
            # add basis monomials until the weight piece is covered
            for mono in self.weight_basis(sign * j):
                spanned = self._generated_span(gens, sign * j)
                if spanned == dim:
                    break
                trial = gens + [(Poly.monomial(self.field, self.nvars, mono), j)]
                if self._generated_span(trial, sign * j) > spanned:
                    gens = trial
        if not gens:
            side = "positive" if sign > 0 else "negative"
            raise DegenerateGradingError("the %s part of the Veronese view is zero" % side)
        degrees = [d for _, d in gens]
        return PositiveGeneratorData(gens=[g for g, _ in gens], degrees=degrees,
                                     lcm_degree=math.lcm(*degrees), sign=sign)

    def _generated_span(self, gens: List[Tuple[Poly, int]], view_weight: int) -> int:
        """dim of sum of g * A^(m)_{view_weight - deg g} inside the view piece."""
        dim_t = self.weight_dim(view_weight)
        if dim_t == 0:
            return 0
        sign = 1 if view_weight > 0 else -1
        cols = []
        for g, dg in gens:
            src = view_weight - sign * dg
            if not self.validated(src):
                continue
            for mono in self.weight_basis(src):
                p = self.normal_form(g * Poly.monomial(self.field, self.nvars, mono))
                cols.append(self.coords_in_piece(p, view_weight))
        if not cols:
            return 0
        return rank(Matrix.from_columns(self.field, cols, dim_t))


def veronese_view(ring: WeightedRing, m: int) -> VeroneseView:
    return VeroneseView(ring, m)
