"""Sparse multivariate polynomials, grevlex order, division and Buchberger.

Monomials are exponent tuples.  The term order is graded reverse
lexicographic on total degree (not weight), fixed globally, so Groebner
bases and normal forms are deterministic for any weight vector.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Mono = Tuple[int, ...]


def m_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def m_div(a: Mono, b: Mono) -> Optional[Mono]:
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


def m_divides(b: Mono, a: Mono) -> bool:
    return all(x >= y for x, y in zip(a, b))


def m_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def m_deg(a: Mono) -> int:
    return sum(a)


def m_weight(a: Mono, weights: Sequence[int]) -> int:
    return sum(e * w for e, w in zip(a, weights))


def grevlex_key(a: Mono):
    return (sum(a), tuple(-a[i] for i in range(len(a) - 1, -1, -1)))


def mono_str(a: Mono, names: Sequence[str]) -> str:
    parts = []
    for e, nm in zip(a, names):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append("%s^%d" % (nm, e))
    return "*".join(parts) if parts else "1"


class Poly:
    """Immutable sparse polynomial: exponent tuple -> nonzero coefficient."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field, nvars: int, terms: Dict[Mono, object]):
        self.field = field
        self.nvars = nvars
        self.terms = {m: c for m, c in terms.items() if not field.is_zero(c)}

    @staticmethod
    def zero(field, nvars: int) -> "Poly":
        return Poly(field, nvars, {})

    @staticmethod
    def const(field, nvars: int, c) -> "Poly":
        return Poly(field, nvars, {(0,) * nvars: c})

    @staticmethod
    def one(field, nvars: int) -> "Poly":
        return Poly.const(field, nvars, field.one)

    @staticmethod
    def variable(field, nvars: int, idx: int) -> "Poly":
        e = [0] * nvars
        e[idx] = 1
        return Poly(field, nvars, {tuple(e): field.one})

    @staticmethod
    def monomial(field, nvars: int, mono: Mono, c=None) -> "Poly":
        return Poly(field, nvars, {tuple(mono): field.one if c is None else c})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Poly") -> "Poly":
        F = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = F.add(out.get(m, F.zero), c)
        return Poly(F, self.nvars, out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.neg()

    def neg(self) -> "Poly":
        F = self.field
        return Poly(F, self.nvars, {m: F.neg(c) for m, c in self.terms.items()})

    def scale(self, c) -> "Poly":
        F = self.field
        return Poly(F, self.nvars, {m: F.mul(c, v) for m, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        F = self.field
        out: Dict[Mono, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m_mul(m1, m2)
                out[m] = F.add(out.get(m, F.zero), F.mul(c1, c2))
        return Poly(F, self.nvars, out)

    def mul_term(self, mono: Mono, coeff) -> "Poly":
        F = self.field
        return Poly(F, self.nvars, {m_mul(m, mono): F.mul(c, coeff) for m, c in self.terms.items()})

    def pow(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        out = Poly.one(self.field, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def leading(self) -> Tuple[Mono, object]:
        if not self.terms:
            raise ValueError("leading term of zero polynomial")
        m = max(self.terms, key=grevlex_key)
        return m, self.terms[m]

    def monic(self) -> "Poly":
        _, c = self.leading()
        return self.scale(self.field.inv(c))

    def total_degree(self) -> int:
        return max((m_deg(m) for m in self.terms), default=0)

    def weight_or_none(self, weights: Sequence[int]) -> Optional[int]:
        """The common weight of all terms, or None for 0 / inhomogeneous."""
        ws = {m_weight(m, weights) for m in self.terms}
        if len(ws) != 1:
            return None
        return ws.pop()

    def is_homogeneous(self, weights: Sequence[int]) -> bool:
        return len({m_weight(m, weights) for m in self.terms}) <= 1

    def sorted_terms(self) -> List[Tuple[Mono, object]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def key(self) -> tuple:
        """Hashable canonical form (for caches)."""
        F = self.field
        return tuple((m, F.scalar_str(c)) for m, c in self.sorted_terms())

    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        F = self.field
        parts = []
        for m, c in self.sorted_terms():
            cs = F.scalar_str(c)
            ms = mono_str(m, names)
            if ms == "1":
                term = cs
            elif cs == "1":
                term = ms
            elif cs == "-1":
                term = "-" + ms
            else:
                term = "%s*%s" % (cs, ms)
            parts.append(term)
        s = parts[0]
        for t in parts[1:]:
            s += " - " + t[1:] if t.startswith("-") else " + " + t
        return s

    def __repr__(self):
        return "Poly(%r)" % (self.key(),)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.key())


class PolyParseError(ValueError):
    pass


def parse_poly(field, names: Sequence[str], text: str) -> Poly:
    """Parse integer-coefficient polynomial syntax: + - * ^, declared variables."""
    nvars = len(names)
    name_idx = {nm: i for i, nm in enumerate(names)}
    toks: List[tuple] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j])))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if name not in name_idx:
                raise PolyParseError("unknown variable %r in %r" % (name, text))
            toks.append(("var", name_idx[name]))
            i = j
        elif ch in "+-*^()":
            toks.append((ch, ch))
            i += 1
        else:
            raise PolyParseError("unexpected character %r in %r" % (ch, text))
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def take(kind):
        nonlocal pos
        if peek() != kind:
            raise PolyParseError("expected %r at token %d in %r" % (kind, pos, text))
        tok = toks[pos]
        pos += 1
        return tok

    def parse_expr() -> Poly:
        nonlocal pos
        sign = 1
        while peek() in ("+", "-"):
            if take(peek())[0] == "-":
                sign = -sign
        p = parse_term()
        if sign < 0:
            p = p.neg()
        while peek() in ("+", "-"):
            op = take(peek())[0]
            q = parse_term()
            p = p + q if op == "+" else p - q
        return p

    def parse_term() -> Poly:
        p = parse_factor()
        while peek() == "*":
            take("*")
            p = p * parse_factor()
        return p

    def parse_factor() -> Poly:
        nonlocal pos
        neg = False
        while peek() == "-":
            take("-")
            neg = not neg
        base = parse_base()
        if peek() == "^":
            take("^")
            e = take("int")[1]
            base = base.pow(e)
        return base.neg() if neg else base

    def parse_base() -> Poly:
        kind = peek()
        if kind == "int":
            return Poly.const(field, nvars, field.of_int(take("int")[1]))
        if kind == "var":
            return Poly.variable(field, nvars, take("var")[1])
        if kind == "(":
            take("(")
            p = parse_expr()
            take(")")
            return p
        raise PolyParseError("unexpected token at %d in %r" % (pos, text))

    p = parse_expr()
    if pos != len(toks):
        raise PolyParseError("trailing input at token %d in %r" % (pos, text))
    return p


def reduce_poly(p: Poly, basis: Sequence[Poly]) -> Poly:
    """Fully reduced remainder of p modulo `basis` (grevlex division)."""
    F = p.field
    leads = [(g.leading()[0], g.leading()[1], g) for g in basis if not g.is_zero()]
    rem: Dict[Mono, object] = {}
    work = dict(p.terms)
    while work:
        m = max(work, key=grevlex_key)
        c = work.pop(m)
        if F.is_zero(c):
            continue
        hit = None
        for lm, lc, g in leads:
            q = m_div(m, lm)
            if q is not None:
                hit = (q, lc, g)
                break
        if hit is None:
            rem[m] = F.add(rem.get(m, F.zero), c)
            continue
        q, lc, g = hit
        factor = F.mul(c, F.inv(lc))
        for gm, gc in g.terms.items():
            t = m_mul(gm, q)
            if t == m:
                continue  # leading term cancels exactly against c
            work[t] = F.sub(work.get(t, F.zero), F.mul(factor, gc))
    return Poly(F, p.nvars, rem)


def s_poly(f: Poly, g: Poly) -> Poly:
    F = f.field
    fm, fc = f.leading()
    gm, gc = g.leading()
    l = m_lcm(fm, gm)
    return f.mul_term(m_div(l, fm), F.inv(fc)) - g.mul_term(m_div(l, gm), F.inv(gc))


def buchberger(gens: Sequence[Poly]) -> List[Poly]:
    """Reduced Groebner basis (grevlex) of the ideal generated by `gens`.

    Normal pair selection with the coprime-leading-term criterion; the
    result is autoreduced, monic and sorted, hence canonical.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    F = gens[0].field
    G: List[Poly] = []
    for g in sorted(gens, key=lambda q: grevlex_key(q.leading()[0])):
        r = reduce_poly(g, G)
        if not r.is_zero():
            G.append(r.monic())
    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}
    while pairs:
        i, j = min(pairs, key=lambda ij: (grevlex_key(m_lcm(G[ij[0]].leading()[0], G[ij[1]].leading()[0])), ij))
        pairs.discard((i, j))
        lmi, lmj = G[i].leading()[0], G[j].leading()[0]
        if m_lcm(lmi, lmj) == m_mul(lmi, lmj):
            continue  # coprime leading terms: S-polynomial reduces to zero
        r = reduce_poly(s_poly(G[i], G[j]), G)
        if r.is_zero():
            continue
        G.append(r.monic())
        k = len(G) - 1
        pairs.update((t, k) for t in range(k))
    # autoreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        G = [g for g in G if not g.is_zero()]
        for idx in range(len(G)):
            others = G[:idx] + G[idx + 1:]
            r = reduce_poly(G[idx], others)
            if r.is_zero():
                G.pop(idx)
                changed = True
                break
            r = r.monic()
            if r.terms != G[idx].terms:
                G[idx] = r
                changed = True
                break
    G.sort(key=lambda g: grevlex_key(g.leading()[0]))
    return G
