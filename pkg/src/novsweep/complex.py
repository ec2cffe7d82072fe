"""Filtered 2-dimensional Novikov complexes: data model, file format, validation, generators."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import GenerationFailed, ParseError, StructureError
from .ring import (
    ONE,
    ZERO,
    LaurentPoly,
    NovikovScalar,
    ScalarClass,
    classify_scalar,
    is_unit,
)

__all__ = [
    "IndexPartition",
    "NovikovMatrix",
    "FilteredComplex",
    "LineType",
    "ValidationReport",
    "parse_complex",
    "render_complex",
    "render_grid",
    "validate_differential",
    "classify_line",
    "classify_column",
    "classify_row",
    "generate_example",
    "random_complex",
    "random_complexes",
]


@dataclass(frozen=True)
class IndexPartition:
    """Morse index of each column, 1-based access."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(k) for k in self.indices))

    @property
    def m(self) -> int:
        return len(self.indices)

    def index(self, j: int) -> int:
        return self.indices[j - 1]

    def block(self, k: int) -> tuple[int, ...]:
        """Columns of Morse index k (the set J_k)."""
        return tuple(j for j in range(1, self.m + 1) if self.indices[j - 1] == k)

    def kappa(self, k: int) -> Optional[int]:
        """First column of index k, or None if there is none."""
        for j, kk in enumerate(self.indices, start=1):
            if kk == k:
                return j
        return None


class NovikovMatrix:
    """Sparse m x m matrix over NovikovScalar with 1-based (row, col) keys.

    Treated as immutable once built; zero entries are never stored.
    """

    __slots__ = ("m", "_entries", "_cols", "_rows")

    def __init__(self, m: int, entries: Mapping[tuple[int, int], object] | Iterable = ()):
        self.m = m
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[tuple[int, int], NovikovScalar] = {}
        for (i, j), v in items:
            v = NovikovScalar.coerce(v)
            if v:
                data[(i, j)] = v
        self._entries = data
        self._cols = None
        self._rows = None

    @classmethod
    def identity(cls, m: int) -> "NovikovMatrix":
        return cls(m, {(j, j): ONE for j in range(1, m + 1)})

    def __getitem__(self, key: tuple[int, int]) -> NovikovScalar:
        return self._entries.get(key, ZERO)

    def get(self, i: int, j: int) -> NovikovScalar:
        return self._entries.get((i, j), ZERO)

    def items(self):
        return sorted(self._entries.items())

    def keys(self):
        return self._entries.keys()

    def __len__(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def _index(self):
        if self._cols is None:
            cols: dict[int, dict[int, NovikovScalar]] = {}
            rows: dict[int, dict[int, NovikovScalar]] = {}
            for (i, j), v in self._entries.items():
                cols.setdefault(j, {})[i] = v
                rows.setdefault(i, {})[j] = v
            self._cols, self._rows = cols, rows

    def column(self, j: int) -> dict[int, NovikovScalar]:
        self._index()
        return dict(self._cols.get(j, {}))

    def row(self, i: int) -> dict[int, NovikovScalar]:
        self._index()
        return dict(self._rows.get(i, {}))

    def to_dict(self) -> dict[tuple[int, int], NovikovScalar]:
        return dict(self._entries)

    def __matmul__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        if self.m != other.m:
            raise ValueError("dimension mismatch")
        other._index()
        acc: dict[tuple[int, int], NovikovScalar] = {}
        for (i, k), a in self._entries.items():
            for j, b in other._rows.get(k, {}).items() if other._rows else ():
                acc[(i, j)] = acc.get((i, j), ZERO) + a * b
        return NovikovMatrix(self.m, acc)

    def __add__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        acc = dict(self._entries)
        for key, v in other._entries.items():
            acc[key] = acc.get(key, ZERO) + v
        return NovikovMatrix(self.m, acc)

    def __neg__(self) -> "NovikovMatrix":
        return NovikovMatrix(self.m, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NovikovMatrix):
            return NotImplemented
        return self.m == other.m and self._entries == other._entries

    def __hash__(self):
        return hash((self.m, frozenset(self._entries.items())))

    def is_strictly_upper(self) -> bool:
        return all(i < j for i, j in self._entries)

    def is_unit_upper(self) -> bool:
        return all(i < j or (i == j and v == ONE) for (i, j), v in self._entries.items()) and all(
            (j, j) in self._entries for j in range(1, self.m + 1)
        )

    def square_is_zero(self) -> bool:
        return (self @ self).is_zero()

    def restrict(self, keep: Iterable[int]) -> "NovikovMatrix":
        """Zero out every row and column not in ``keep`` (labels are preserved)."""
        keep = set(keep)
        return NovikovMatrix(self.m, {(i, j): v for (i, j), v in self._entries.items() if i in keep and j in keep})

    def map_entries(self, fn) -> "NovikovMatrix":
        return NovikovMatrix(self.m, {k: fn(k, v) for k, v in self._entries.items()})

    def unit_upper_inverse(self) -> "NovikovMatrix":
        """Inverse of a unit upper-triangular matrix by back substitution."""
        if not self.is_unit_upper():
            raise ValueError("matrix is not unit upper triangular")
        self._index()
        # rows of the inverse from the bottom: X = I - N X with N the strict part
        rows: dict[int, dict[int, NovikovScalar]] = {}
        for i in range(self.m, 0, -1):
            acc = {i: ONE}
            for k, a in self._rows.get(i, {}).items():
                if k == i:
                    continue
                for j, x in rows[k].items():
                    acc[j] = acc.get(j, ZERO) - a * x
            rows[i] = {j: v for j, v in acc.items() if v}
        return NovikovMatrix(self.m, {(i, j): v for i, r in rows.items() for j, v in r.items()})

    def __repr__(self) -> str:
        return f"NovikovMatrix(m={self.m}, nnz={len(self._entries)})"


@dataclass(frozen=True)
class FilteredComplex:
    """Novikov differential with its index partition; column order is the filtration."""

    matrix: NovikovMatrix
    partition: IndexPartition
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(
                self,
                "labels",
                tuple(f"h^{j}_{k}" for j, k in enumerate(self.partition.indices, start=1)),
            )

    @property
    def m(self) -> int:
        return self.partition.m

    def index(self, j: int) -> int:
        return self.partition.index(j)

    def with_matrix(self, matrix: NovikovMatrix) -> "FilteredComplex":
        return FilteredComplex(matrix, self.partition, self.labels)


def check_structure(matrix: NovikovMatrix, partition: IndexPartition) -> None:
    """Raise StructureError unless the matrix fits the index partition."""
    idx = partition.indices
    if any(k not in (0, 1, 2) for k in idx):
        raise StructureError(f"Morse indices must lie in {{0, 1, 2}}, got {list(idx)}")
    if any(a > b for a, b in zip(idx, idx[1:])):
        raise StructureError("columns must be sorted by Morse index")
    if matrix.m != partition.m:
        raise StructureError(f"matrix size {matrix.m} does not match {partition.m} indices")
    for (i, j), _ in matrix.items():
        if not (1 <= i <= matrix.m and 1 <= j <= matrix.m):
            raise StructureError(f"entry ({i},{j}) outside a {matrix.m}x{matrix.m} matrix")
        if i >= j:
            raise StructureError(f"entry ({i},{j}) is on or below the diagonal")
        if idx[j - 1] != idx[i - 1] + 1:
            raise StructureError(
                f"entry ({i},{j}) joins indices {idx[i - 1]} and {idx[j - 1]}; only k -> k-1 incidences are allowed"
            )


# ---------------------------------------------------------------- file format

def _poly_pairs(p: LaurentPoly) -> list[list[int]]:
    return [[e, c] for e, c in p.terms]


def _read_poly(raw, where: str) -> LaurentPoly:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: polynomial must be a list of [exponent, coefficient] pairs")
    last = None
    terms = {}
    for pair in raw:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
        ):
            raise ParseError(f"{where}: bad term {pair!r}")
        e, c = pair
        if last is not None and e <= last:
            raise ParseError(f"{where}: exponents must be strictly increasing")
        if c == 0:
            raise ParseError(f"{where}: zero coefficient at exponent {e}")
        terms[e] = c
        last = e
    return LaurentPoly(terms)


def parse_complex(text: str) -> FilteredComplex:
    """Read the JSON matrix document (fields ``m``, ``indices``, ``entries``)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be an object")
    for key in ("m", "indices", "entries"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    m, indices, entries = doc["m"], doc["indices"], doc["entries"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise ParseError("m must be a non-negative integer")
    if not isinstance(indices, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in indices):
        raise ParseError("indices must be a list of integers")
    if not isinstance(entries, list):
        raise ParseError("entries must be a list")
    if len(indices) != m:
        raise StructureError(f"expected {m} indices, got {len(indices)}")
    data = {}
    for n, rec in enumerate(entries):
        where = f"entry #{n}"
        if not isinstance(rec, dict) or not {"row", "col", "poly"} <= set(rec):
            raise ParseError(f"{where}: needs row, col and poly")
        i, j = rec["row"], rec["col"]
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (i, j)):
            raise ParseError(f"{where}: row/col must be integers")
        if (i, j) in data:
            raise ParseError(f"{where}: duplicate position ({i},{j})")
        num = _read_poly(rec["poly"], where)
        if "den" in rec:
            den = _read_poly(rec["den"], where)
            if not is_unit(den):
                raise ParseError(f"{where}: denominator {den} is not a unit")
            value = NovikovScalar(num, den)
        else:
            value = NovikovScalar.coerce(num)
        data[(i, j)] = value
    partition = IndexPartition(tuple(indices))
    for (i, j) in data:
        if not (1 <= i <= m and 1 <= j <= m):
            raise StructureError(f"entry ({i},{j}) outside a {m}x{m} matrix")
    matrix = NovikovMatrix(m, data)
    check_structure(matrix, partition)
    return FilteredComplex(matrix, partition)


def matrix_records(matrix: NovikovMatrix) -> list[dict]:
    out = []
    for (i, j), v in matrix.items():
        rec = {"row": i, "col": j, "poly": _poly_pairs(v.num)}
        if not v.is_polynomial():
            rec["den"] = _poly_pairs(v.den)
        out.append(rec)
    return out


def dump_structured(doc) -> str:
    """Deterministic JSON with one-space indentation and fixed key order."""
    return json.dumps(doc, indent=1, sort_keys=False, separators=(",", ": ")) + "\n"


def render_complex(C: FilteredComplex, style: str = "structured", truncate: int = 8) -> str:
    if style == "structured":
        doc = {"m": C.m, "indices": list(C.partition.indices), "entries": matrix_records(C.matrix)}
        return dump_structured(doc)
    if style in ("grid", "text"):
        return render_grid(C.matrix, C.labels, truncate=truncate)
    raise ValueError(f"unknown style {style!r}")


def render_grid(
    matrix: NovikovMatrix,
    labels: Sequence[str] = (),
    truncate: int = 8,
    marks: Optional[Mapping[tuple[int, int], str]] = None,
    keep: Optional[Iterable[int]] = None,
) -> str:
    """Aligned text grid; ``marks`` maps positions to a suffix such as ``*`` or ``#``."""
    m = matrix.m
    idx = list(keep) if keep is not None else list(range(1, m + 1))
    labels = list(labels) or [str(j) for j in range(1, m + 1)]
    marks = marks or {}
    cells = [[""] + [labels[j - 1] for j in idx]]
    for i in idx:
        row = [labels[i - 1]]
        for j in idx:
            v = matrix.get(i, j)
            text = v.render(truncate) if v else "."
            row.append(text + marks.get((i, j), ""))
        cells.append(row)
    widths = [max(len(r[c]) for r in cells) for c in range(len(cells[0]))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class LineType:
    """Entry pattern of a saddle column or row.

    ``kind`` is 1 (null), 2 (single binomial), 3 (two opposite-sign monomials),
    4 (single monomial) or 0 when nothing matches; ``reason`` then says why.
    """

    kind: int
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.kind != 0

    def __str__(self) -> str:
        return f"type {self.kind}" if self.kind else f"Other ({self.reason})"


def classify_line(values: Iterable[NovikovScalar], strict_signs: bool = True) -> LineType:
    vals = [v for v in values if v]
    shapes = [classify_scalar(v) for v in vals]
    if any(not s.is_unit_shape for s in shapes):
        return LineType(0, "entry-form")
    if not vals:
        return LineType(1)
    if len(vals) == 1:
        return LineType(2) if shapes[0].is_binomial else LineType(4)
    if len(vals) == 2 and all(s.is_monomial for s in shapes):
        if shapes[0].sign != shapes[1].sign or not strict_signs:
            return LineType(3)
        return LineType(0, "sign-pattern")
    return LineType(0, "pattern")


def classify_column(C: FilteredComplex, j: int, matrix: Optional[NovikovMatrix] = None) -> LineType:
    M = matrix if matrix is not None else C.matrix
    return classify_line(M.column(j).values())


def classify_row(C: FilteredComplex, j: int, matrix: Optional[NovikovMatrix] = None) -> LineType:
    M = matrix if matrix is not None else C.matrix
    return classify_line(M.row(j).values())


@dataclass
class ValidationReport:
    square_zero: bool
    column_types: dict[int, LineType]
    row_types: dict[int, LineType]
    entry_violations: list[tuple[int, int, str]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return (
            self.square_zero
            and not self.entry_violations
            and all(t.ok for t in self.column_types.values())
            and all(t.ok for t in self.row_types.values())
        )

    @property
    def sign_violations(self) -> list[str]:
        return [d for d in self.diagnostics if "sign-pattern" in d]

    def summary(self) -> str:
        return "admissible" if self.admissible else "inadmissible: " + "; ".join(self.diagnostics)


def validate_differential(
    C: FilteredComplex,
    matrix: Optional[NovikovMatrix] = None,
    generators: Optional[Iterable[int]] = None,
) -> ValidationReport:
    """Square-zero test plus entry-shape and saddle line-type checks.

    ``matrix``/``generators`` allow validating a reduced matrix on a subset of generators.
    """
    M = matrix if matrix is not None else C.matrix
    gens = sorted(generators) if generators is not None else list(range(1, C.m + 1))
    if generators is not None:
        M = M.restrict(gens)
    report = ValidationReport(M.square_is_zero(), {}, {})
    if not report.square_zero:
        report.diagnostics.append("differential does not square to zero")
    for (i, j), v in M.items():
        shape = classify_scalar(v)
        if not (shape.is_unit_shape):
            report.entry_violations.append((i, j, str(shape)))
            report.diagnostics.append(f"entry ({i},{j}) = {v} is not 0, +-t^l or t^l1 - t^l2")
    for j in gens:
        if C.index(j) != 1:
            continue
        ct = classify_line(M.column(j).values())
        rt = classify_line(M.row(j).values())
        report.column_types[j] = ct
        report.row_types[j] = rt
        if not ct.ok:
            report.diagnostics.append(f"column {j}: {ct.reason} violation")
        if not rt.ok:
            report.diagnostics.append(f"row {j}: {rt.reason} violation")
    return report


# ---------------------------------------------------------------- generators

def _lift(entries: dict[tuple[int, int], NovikovScalar], shifts: Sequence[int], m: int):
    """Re-choose lifts: generator j moves by t^{s_j}, entry (i, j) picks up t^{s_j - s_i}."""
    if not shifts:
        return entries
    if len(shifts) != m:
        raise ValueError(f"expected {m} shift parameters, got {len(shifts)}")
    out = {}
    for (i, j), v in entries.items():
        out[(i, j)] = v * NovikovScalar.coerce(LaurentPoly({shifts[j - 1] - shifts[i - 1]: 1}))
    return out


def _p(text: str) -> NovikovScalar:
    from .ring import parse_poly

    return NovikovScalar.coerce(parse_poly(text))


# Two filtered torus complexes used as worked examples.
_TORUS_A = {
    (1, 4): "1", (1, 5): "t", (1, 6): "1",
    (2, 3): "-1 + t", (2, 4): "-1", (2, 5): "-1", (2, 6): "-t",
    (3, 7): "-t^2", (3, 8): "1",
    (4, 7): "t^2", (4, 8): "-t^2",
    (5, 8): "-1 + t",
    (6, 7): "-t^2", (6, 8): "t",
}

_TORUS_B = {
    (1, 3): "-t", (1, 4): "-1 + t", (1, 5): "-t", (1, 6): "-1",
    (2, 3): "1", (2, 5): "1", (2, 6): "t",
    (3, 7): "-t", (3, 8): "t",
    (4, 8): "1 - t^2",
    (5, 7): "t", (5, 8): "-t^2",
    (6, 8): "-1 + t",
}

_TORUS_INDICES = (0, 0, 1, 1, 1, 1, 2, 2)


def _finish(entries, indices, shifts) -> FilteredComplex:
    m = len(indices)
    entries = _lift(entries, list(shifts), m)
    C = FilteredComplex(NovikovMatrix(m, entries), IndexPartition(indices))
    try:
        check_structure(C.matrix, C.partition)
    except StructureError as exc:
        raise GenerationFailed(str(exc)) from exc
    report = validate_differential(C)
    if not report.admissible:
        raise GenerationFailed(report.summary())
    return C


_CHAINED = re.compile(r"chained\((\d+)\)$")


def generate_example(template, shift_params: Sequence[int] = ()) -> FilteredComplex:
    """Build a named complex.

    ``template`` is ``"torus_a"``, ``"torus_b"`` or ``"chained(g)"`` (also ``("chained", g)``).
    ``shift_params`` is empty or one lift exponent per generator.
    """
    if isinstance(template, tuple):
        name, g = template
        template = f"{name}({g})"
    if template == "torus_a":
        return _finish({k: _p(v) for k, v in _TORUS_A.items()}, _TORUS_INDICES, shift_params)
    if template == "torus_b":
        return _finish({k: _p(v) for k, v in _TORUS_B.items()}, _TORUS_INDICES, shift_params)
    match = _CHAINED.match(str(template))
    if match:
        return _chained(int(match.group(1)), shift_params)
    raise ValueError(f"unknown template {template!r}")


# A cell structure on a closed orientable surface, lifted to the infinite cyclic cover.
# Faces are cyclic words of (edge, +-1); edges carry (tail, head, level shift).

@dataclass
class _Surface:
    n_vertices: int
    edges: list[tuple[int, int, int]]
    faces: list[list[tuple[int, int]]]

    def chain_complex(self):
        """Incidence data {(cell_a, cell_b): scalar} keyed by ("v", i), ("e", i), ("f", i)."""
        inc: dict[tuple, NovikovScalar] = {}

        def add(key, exp, coef):
            inc[key] = inc.get(key, ZERO) + NovikovScalar.coerce(LaurentPoly({exp: coef}))

        for e, (tail, head, s) in enumerate(self.edges):
            add((("v", head), ("e", e)), s, 1)
            add((("v", tail), ("e", e)), 0, -1)
        for f, word in enumerate(self.faces):
            level = 0
            for e, d in word:
                s = self.edges[e][2]
                if d > 0:
                    add((("e", e), ("f", f)), level, 1)
                    level += s
                else:
                    level -= s
                    add((("e", e), ("f", f)), level, -1)
            if level != 0:
                raise GenerationFailed("face boundary does not close up in the cover")
        return {k: v for k, v in inc.items() if v}


def _assemble(surface: _Surface, vertex_order, edge_order, face_order, drop=frozenset()) -> tuple[dict, tuple]:
    order = [("v", i) for i in vertex_order] + [("e", i) for i in edge_order] + [("f", i) for i in face_order]
    order = [c for c in order if c not in drop]
    pos = {c: n for n, c in enumerate(order, start=1)}
    entries = {}
    for (a, b), v in surface.chain_complex().items():
        if a in pos and b in pos:
            entries[(pos[a], pos[b])] = v
    indices = tuple({"v": 0, "e": 1, "f": 2}[c[0]] for c in order)
    return entries, indices


def _chained(g: int, shifts: Sequence[int]) -> FilteredComplex:
    """Torus cut into g+1 annuli around the direction the circle-valued map winds."""
    if g < 1:
        raise ValueError("chained(g) needs g >= 1")
    n = g + 1
    edges = []
    for k in range(n):
        edges.append((k, (k + 1) % n, 0))  # a_k along the chain
        edges.append((k, k, 1))  # b_k, one turn around the circle
    faces = []
    for k in range(n):
        a, b, b_next = 2 * k, 2 * k + 1, 2 * ((k + 1) % n) + 1
        faces.append([(a, 1), (b_next, 1), (a, -1), (b, -1)])
    surface = _Surface(n, edges, faces)
    entries, indices = _assemble(surface, range(n), range(2 * n), range(n))
    return _finish(entries, indices, shifts)


def _random_surface(rng: random.Random, n_faces: int, n_edges: int) -> _Surface:
    sides_per_face = [1] * n_faces
    for _ in range(2 * n_edges - n_faces):
        sides_per_face[rng.randrange(n_faces)] += 1
    sides = [(f, k) for f in range(n_faces) for k in range(sides_per_face[f])]
    rng.shuffle(sides)
    face_words = [[None] * sides_per_face[f] for f in range(n_faces)]
    # corner (f, k) is the start of side k of face f
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    glue = []
    for e in range(n_edges):
        (f1, k1), (f2, k2) = sides[2 * e], sides[2 * e + 1]
        face_words[f1][k1] = (e, 1)
        face_words[f2][k2] = (e, -1)
        n1, n2 = sides_per_face[f1], sides_per_face[f2]
        tail, head = (f1, k1), (f1, (k1 + 1) % n1)
        union(tail, (f2, (k2 + 1) % n2))
        union(head, (f2, k2))
        glue.append((tail, head))
    roots = sorted({find(c) for c in parent})
    vid = {r: n for n, r in enumerate(roots)}
    # level shifts: random on edges off a spanning tree of the dual graph, then solve the tree
    adjacency: dict[int, list[tuple[int, int]]] = {f: [] for f in range(n_faces)}
    owner = {}
    for f, word in enumerate(face_words):
        for e, d in word:
            owner.setdefault(e, []).append(f)
    for e, fs in owner.items():
        if fs[0] != fs[1]:
            adjacency[fs[0]].append((fs[1], e))
            adjacency[fs[1]].append((fs[0], e))
    tree_edge_of = {}
    seen, stack, order = {0}, [0], []
    while stack:
        f = stack.pop()
        order.append(f)
        for nb, e in adjacency[f]:
            if nb not in seen:
                seen.add(nb)
                tree_edge_of[nb] = e
                stack.append(nb)
    shift = {e: rng.randint(-2, 2) for e in range(n_edges) if e not in tree_edge_of.values()}
    for f in reversed(order[1:]):
        e_tree = tree_edge_of[f]
        total, sign = 0, 0
        for e, d in face_words[f]:
            if e == e_tree:
                sign = d
            else:
                total += d * shift[e]
        shift[e_tree] = -sign * total
    edges = [(vid[find(t)], vid[find(h)], shift[e]) for e, (t, h) in enumerate(glue)]
    return _Surface(len(roots), edges, face_words)


def random_complex(seed: int, max_size: int = 14, drop_rate: float = 0.15) -> FilteredComplex:
    """Random admissible complex: a cellular Novikov complex of a random surface cover.

    Sinks and sources may be dropped (flow lines escaping to infinity), which keeps
    the square-zero identity and produces single-monomial lines. Raises
    GenerationFailed when the drawn surface is too large.
    """
    rng = random.Random(seed)
    components = 1 if rng.random() < 0.75 else 2
    pieces = []
    for _ in range(components):
        n_faces = rng.randint(1, 3)
        n_edges = rng.randint(max(1, (n_faces + 1) // 2), 5)
        pieces.append(_random_surface(rng, n_faces, n_edges))
    # disjoint union
    nv = sum(p.n_vertices for p in pieces)
    edges, faces, voff, eoff = [], [], 0, 0
    for p in pieces:
        edges += [(t + voff, h + voff, s) for t, h, s in p.edges]
        faces += [[(e + eoff, d) for e, d in w] for w in p.faces]
        voff += p.n_vertices
        eoff += len(p.edges)
    surface = _Surface(nv, edges, faces)
    drop = {("v", i) for i in range(nv) if rng.random() < drop_rate}
    drop |= {("f", i) for i in range(len(faces)) if rng.random() < drop_rate}
    m = nv + len(edges) + len(faces) - len(drop)
    if m > max_size or m < 1:
        raise GenerationFailed(f"drawn complex has {m} generators (limit {max_size})")
    vo, eo, fo = list(range(nv)), list(range(len(edges))), list(range(len(faces)))
    rng.shuffle(vo), rng.shuffle(eo), rng.shuffle(fo)
    entries, indices = _assemble(surface, vo, eo, fo, frozenset(drop))
    shifts = [rng.randint(-1, 1) for _ in indices]
    return _finish(entries, indices, shifts)


def random_complexes(count: int, max_size: int = 14, start_seed: int = 0, min_size: int = 1):
    """Yield ``count`` admissible random complexes, skipping failed draws."""
    seed, made = start_seed, 0
    while made < count:
        try:
            C = random_complex(seed, max_size)
        except GenerationFailed:
            seed += 1
            continue
        seed += 1
        if C.m >= min_size:
            made += 1
            yield seed - 1, C
