"""Independent oracles: linear algebra over Q(t) via sympy, and brute-force cycle search.

Nothing here uses the sweep. Pages come from the closed form
E^r_p = Z^r_p / (Z^{r-1}_{p-1} + dZ^{r-1}_{p+r-1}) and from the ker/im recursion,
with every subspace computed as a kernel or span over the fraction field.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from novsweep import NovikovScalar
from novsweep.ring import LaurentPoly

t = sympy.Symbol("t")
K = QQ.frac_field(t)


def to_field(v: NovikovScalar):
    num = sum(c * t**e for e, c in v.num.terms)
    den = sum(c * t**e for e, c in v.den.terms)
    return K.from_sympy(sympy.together(num / den))


def rank(vectors, length: int) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    return DomainMatrix([list(v) for v in vectors], (len(vectors), length), K).rank()


class FieldComplex:
    """The differential of a filtered complex as a matrix over Q(t)."""

    def __init__(self, C):
        self.C = C
        self.m = C.m
        self.index = C.partition.index
        self.D = [[K.zero] * self.m for _ in range(self.m)]
        for (i, j), v in C.matrix.items():
            self.D[i - 1][j - 1] = to_field(v)
        self._z = lru_cache(maxsize=None)(self._cycles)

    def boundary(self, x):
        m = self.m
        return tuple(sum((self.D[i][j] * x[j] for j in range(m)), K.zero) for i in range(m))

    def cycles(self, r: int, p: int, k: int):
        """Basis of index-k chains in F_p whose boundary lies in F_{p-r}."""
        if p < 0 or k < 0 or k > 2:
            return ()
        return self._z(max(p - r + 1, 0), min(p, self.m - 1), k)

    def _cycles(self, threshold: int, p: int, k: int):
        m = self.m
        cols = [j for j in range(1, p + 2) if self.index(j) == k]
        if not cols:
            return ()
        rows = list(range(threshold + 1, m + 1))
        if rows:
            A = DomainMatrix([[self.D[i - 1][j - 1] for j in cols] for i in rows], (len(rows), len(cols)), K)
            null = A.nullspace().to_Matrix().tolist() if A.rank() < len(cols) else []
            kernel = [[K.from_sympy(x) for x in vec] for vec in null]
        else:
            kernel = [[K.one if a == b else K.zero for b in range(len(cols))] for a in range(len(cols))]
        out = []
        for vec in kernel:
            full = [K.zero] * m
            for c, x in zip(cols, vec):
                full[c - 1] = x
            out.append(tuple(full))
        return tuple(out)

    def borders(self, r: int, p: int, k: int):
        """Spanning set of Z^{r-1}_{p-1} + dZ^{r-1}_{p+r-1} in degree k."""
        lower = list(self.cycles(r - 1, p - 1, k))
        images = [self.boundary(x) for x in self.cycles(r - 1, p + r - 1, k + 1)]
        return lower + images

    def page_rank(self, r: int, p: int) -> int:
        k = self.index(p + 1)
        Z = self.cycles(r, p, k)
        B = self.borders(r, p, k)
        if rank(list(Z) + B, self.m) != len(Z):
            raise AssertionError(f"borders escape the cycles at E^{r}_{p}")
        return len(Z) - rank(B, self.m)

    def differential_rank(self, r: int, p: int) -> int:
        """Rank of the map E^r_p -> E^r_{p-r} induced by the boundary."""
        if p - r < 0:
            return 0
        k = self.index(p + 1)
        if k == 0:
            return 0
        B = self.borders(r, p - r, k - 1)
        images = [self.boundary(x) for x in self.cycles(r, p, k)]
        return rank(B + images, self.m) - rank(B, self.m)

    def pages_by_recursion(self):
        """Ranks seeded at page 1 and advanced by E^{r+1} = ker d^r / im d^r."""
        m = self.m
        ranks = {(1, p): self.page_rank(1, p) for p in range(m)}
        nonzero = []
        for r in range(1, m):
            d = {p: (self.differential_rank(r, p) if ranks[(r, p)] else 0) for p in range(m)}
            for p, v in d.items():
                if v:
                    nonzero.append((r, p, p - r))
            for p in range(m):
                incoming = d[p + r] if p + r < m else 0
                ranks[(r + 1, p)] = ranks[(r, p)] - d[p] - incoming
        return ranks, nonzero


def novikov_ranks(C) -> dict[int, int]:
    """Betti numbers of the complex over Q(t)."""
    F = FieldComplex(C)
    m = F.m
    out = {}
    for k in (0, 1, 2):
        cols = [j for j in range(1, m + 1) if F.index(j) == k]
        below = [i for i in range(1, m + 1) if F.index(i) == k - 1]
        above = [j for j in range(1, m + 1) if F.index(j) == k + 1]
        rk_out = rank([[F.D[i - 1][j - 1] for i in below] for j in cols], len(below)) if cols and below else 0
        rk_in = rank([[F.D[i - 1][j - 1] for i in cols] for j in above], len(cols)) if cols and above else 0
        out[k] = len(cols) - rk_out - rk_in
    return out


# ---------------------------------------------------------------- brute force over Z((t))

_STEPS = (
    NovikovScalar(1),
    NovikovScalar(-1),
    NovikovScalar(LaurentPoly({1: 1})),
    NovikovScalar(LaurentPoly({1: -1})),
    NovikovScalar(LaurentPoly({-1: 1})),
)


def _apply(C, x: dict) -> dict:
    out: dict = {}
    for j, c in x.items():
        for i, v in C.matrix.column(j).items():
            s = out.get(i, NovikovScalar(0)) + v * c
            if s:
                out[i] = s
            else:
                out.pop(i, None)
    return out


def _combine(x: dict, y: dict, b) -> dict:
    out = dict(x)
    for j, c in y.items():
        s = out.get(j, NovikovScalar(0)) + b * c
        if s:
            out[j] = s
        else:
            out.pop(j, None)
    return out


def in_span(x: dict, generators) -> bool:
    """Exact membership over Z((t)) in the span of chains with distinct unit leading entries."""
    lead = {}
    for g in generators:
        top = max(g)
        if g[top] != 1 or top in lead:
            raise AssertionError("generators must have distinct leading columns with coefficient 1")
        lead[top] = g
    rest = dict(x)
    while rest:
        top = max(rest)
        if top not in lead:
            return False
        rest = _combine(rest, lead[top], -rest[top])
    return True


def brute_force_cycles(C, pool, r: int, p: int):
    """Chains v and v + b w from the pool that lie in Z^r_p."""
    threshold = p - r + 1
    found = []
    candidates = [dict(v) for v in pool]
    candidates += [_combine(v, w, b) for v, w in permutations(pool, 2) for b in _STEPS]
    for x in candidates:
        if x and max(x) <= p + 1 and all(i <= threshold for i in _apply(C, x)):
            found.append(x)
    return found
