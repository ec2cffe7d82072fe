"""Diagonal sweep of a filtered Novikov matrix with pivot markup and column changes of basis.

The sweep runs over diagonals r = 1..m-1. On diagonal r of the current matrix
every nonzero entry is either left alone (a primary pivot sits below it in its
column), marked Primary (its row and column are free), or marked ChangeOfBasis
(its row already holds a primary pivot further left). Each ChangeOfBasis entry
is cleared by adding a multiple of the primary pivot's column, and the whole
matrix is conjugated by the resulting unit upper-triangular matrix.

Two tracks are kept: the conjugated matrices and the "raw" matrices that only
receive the column operations (right multiplication).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .complex import (
    FilteredComplex,
    NovikovMatrix,
    classify_line,
    dump_structured,
    matrix_records,
    validate_differential,
)
from .errors import InadmissibleInput, InternalInvariantViolation
from .ring import ONE, ZERO, NovikovScalar, classify_scalar

PRIMARY = "Primary"
CHANGE_OF_BASIS = "ChangeOfBasis"


@dataclass(frozen=True)
class PivotMark:
    kind: str
    row: int
    col: int
    value: NovikovScalar
    diagonal: int
    paired_col: Optional[int] = None  # column of the row's primary pivot, for ChangeOfBasis marks

    @property
    def position(self) -> tuple[int, int]:
        return (self.row, self.col)

    def key(self):
        return (self.kind, self.row, self.col, self.value, self.diagonal)


@dataclass
class SweepStep:
    diagonal: int
    marks: tuple[PivotMark, ...]
    basis_change: NovikovMatrix
    changed_columns: tuple[int, ...]


@dataclass
class SweepHistory:
    """Everything the sweep produced.

    ``matrix(r)`` is the matrix whose diagonal r gets marked; requests past the
    last step return the last matrix.
    """

    complex: FilteredComplex
    matrices: list[NovikovMatrix]
    raw_matrices: list[NovikovMatrix]
    basis_changes: list[NovikovMatrix]
    chain_matrices: list[NovikovMatrix]
    steps: list[SweepStep]
    marks: list[PivotMark] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.complex.m

    @property
    def length(self) -> int:
        """Index L of the last matrix."""
        return len(self.matrices)

    def _at(self, seq, r: int):
        if r < 1:
            raise IndexError(f"step {r} < 1")
        return seq[min(r, len(seq)) - 1]

    def matrix(self, r: int) -> NovikovMatrix:
        return self._at(self.matrices, r)

    def raw(self, r: int) -> NovikovMatrix:
        return self._at(self.raw_matrices, r)

    def chains(self, r: int) -> NovikovMatrix:
        """Matrix whose column j holds sigma^{j,r} in the original generators."""
        return self._at(self.chain_matrices, r)

    def chain(self, j: int, r: int) -> dict[int, NovikovScalar]:
        return self.chains(r).column(j)

    def basis_change(self, r: int) -> NovikovMatrix:
        if 1 <= r <= len(self.basis_changes):
            return self.basis_changes[r - 1]
        return NovikovMatrix.identity(self.m)

    @property
    def final(self) -> NovikovMatrix:
        return self.matrices[-1]

    @property
    def primaries(self) -> list[PivotMark]:
        return [mk for mk in self.marks if mk.kind == PRIMARY]

    @property
    def changes(self) -> list[PivotMark]:
        return [mk for mk in self.marks if mk.kind == CHANGE_OF_BASIS]

    def primary_in_column(self, j: int) -> Optional[PivotMark]:
        for mk in self.primaries:
            if mk.col == j:
                return mk
        return None

    def primary_in_row(self, i: int) -> Optional[PivotMark]:
        for mk in self.primaries:
            if mk.row == i:
                return mk
        return None

    def marks_on(self, r: int) -> list[PivotMark]:
        return [mk for mk in self.marks if mk.diagonal == r]


def format_chain(chain: dict[int, NovikovScalar], C: FilteredComplex, truncate: int = 8) -> str:
    """Render a chain as ``h^6_1 - (1 + t) h^4_1 - t h^3_1``, highest generator first."""
    out = ""
    for ell in sorted(chain, reverse=True):
        c, label = chain[ell], C.labels[ell - 1]
        negative = c.is_polynomial() and len(c.num) == 1 and c.num.terms[0][1] < 0
        mag = -c if negative else c
        if mag == ONE:
            body = label
        elif mag.is_polynomial() and len(mag.num) == 1:
            body = f"{mag.render(truncate)} {label}"
        else:
            body = f"({mag.render(truncate)}) {label}"
        if not out:
            out = f"-{body}" if negative else body
        else:
            out += f" - {body}" if negative else f" + {body}"
    return out or "0"


# ---------------------------------------------------------------- engine

class _SweepState:
    def __init__(self, C: FilteredComplex):
        self.C = C
        self.main = C.matrix
        self.raw = C.matrix
        self.chains = NovikovMatrix.identity(C.m)
        self.primary_row: dict[int, PivotMark] = {}
        self.primary_col: dict[int, PivotMark] = {}


def mark_diagonal(state: _SweepState, r: int) -> list[PivotMark]:
    """Classify the nonzero entries of diagonal r, in increasing column order."""
    D = state.main
    marks = []
    for j in range(r + 1, state.C.m + 1):
        i = j - r
        v = D.get(i, j)
        if not v:
            continue
        below = state.primary_col.get(j)
        if below is not None and below.row > i:
            continue
        in_row = state.primary_row.get(i)
        if in_row is None and below is None:
            mk = PivotMark(PRIMARY, i, j, v, r)
            state.primary_row[i] = mk
            state.primary_col[j] = mk
        elif in_row is not None and below is None and in_row.col < j:
            mk = PivotMark(CHANGE_OF_BASIS, i, j, v, r, paired_col=in_row.col)
        else:
            raise InternalInvariantViolation(f"entry ({i},{j}) on diagonal {r} fits no markup rule")
        marks.append(mk)
    return marks


def _elementary(m: int, u: int, j: int, c: NovikovScalar) -> NovikovMatrix:
    data = {(k, k): ONE for k in range(1, m + 1)}
    data[(u, j)] = c
    return NovikovMatrix(m, data)


def apply_change_of_basis(state: _SweepState, marks: list[PivotMark]) -> tuple[NovikovMatrix, NovikovMatrix]:
    """Clear every ChangeOfBasis mark; returns (next main matrix, T).

    Division by a non-unit pivot raises DivisionByNonUnit.
    """
    m = state.C.m
    D = state.main
    ops = []
    for mk in marks:
        if mk.kind != CHANGE_OF_BASIS:
            continue
        pivot = D.get(mk.row, mk.paired_col)
        ops.append((mk.paired_col, mk.col, -(mk.value / pivot)))
    if not ops:
        return D, NovikovMatrix.identity(m)
    T = NovikovMatrix(m, {**{(k, k): ONE for k in range(1, m + 1)}, **{(u, j): c for u, j, c in ops}})
    forward = NovikovMatrix.identity(m)
    for u, j, c in ops:
        forward = forward @ _elementary(m, u, j, c)
    backward = NovikovMatrix.identity(m)
    for u, j, c in reversed(ops):
        backward = backward @ _elementary(m, u, j, c)
    if not (forward == T == backward):
        raise InternalInvariantViolation("elementary column operations on one diagonal do not commute")
    new_main = T.unit_upper_inverse() @ D @ T
    for u, j, c in ops:
        mk_row = next(mk.row for mk in marks if mk.col == j and mk.kind == CHANGE_OF_BASIS)
        if new_main.get(mk_row, j):
            raise InternalInvariantViolation(f"change of basis left ({mk_row},{j}) nonzero")
        if any(s > mk_row for s in new_main.column(j)):
            raise InternalInvariantViolation(f"change of basis filled column {j} below row {mk_row}")
    return new_main, T


def run_sssa(C: FilteredComplex, validate: bool = True) -> SweepHistory:
    if validate:
        report = validate_differential(C)
        if not report.admissible:
            raise InadmissibleInput(report.summary())
    m = C.m
    state = _SweepState(C)
    matrices, raws, chains, Ts, steps, all_marks = [state.main], [state.raw], [state.chains], [], [], []
    last_mark, last_change = 0, 0
    for r in range(1, m):
        marks = mark_diagonal(state, r)
        all_marks.extend(marks)
        new_main, T = apply_change_of_basis(state, marks)
        changed = tuple(mk.col for mk in marks if mk.kind == CHANGE_OF_BASIS)
        if marks:
            last_mark = r
        if changed:
            last_change = r
            state.main = new_main
            state.raw = state.raw @ T
            state.chains = state.chains @ T
        steps.append(SweepStep(r, tuple(marks), T, changed))
        Ts.append(T)
        matrices.append(state.main)
        raws.append(state.raw)
        chains.append(state.chains)
    L = max(1, last_mark, last_change + 1)
    return SweepHistory(
        complex=C,
        matrices=matrices[:L],
        raw_matrices=raws[:L],
        basis_changes=Ts[: L - 1],
        chain_matrices=chains[:L],
        steps=steps[: L - 1] + [s for s in steps[L - 1 : L] if s.marks],
        marks=all_marks,
    )


def trace_records(h: SweepHistory) -> list[dict]:
    out = []
    for step in h.steps:
        out.append(
            {
                "diagonal": step.diagonal,
                "marks": [
                    {"kind": mk.kind, **matrix_records(NovikovMatrix(h.m, {mk.position: mk.value}))[0]}
                    for mk in step.marks
                ],
                "basis_change": matrix_records(
                    NovikovMatrix(h.m, {k: v for k, v in step.basis_change.items() if k[0] != k[1]})
                ),
                "changed_columns": list(step.changed_columns),
            }
        )
    return out


def render_trace(h: SweepHistory) -> str:
    return dump_structured({"steps": trace_records(h)})


# ---------------------------------------------------------------- checks

@dataclass(frozen=True)
class Violation:
    check: str
    step: int
    detail: str

    def __str__(self):
        return f"[{self.check}] step {self.step}: {self.detail}"


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check: str, step: int, detail: str):
        self.violations.append(Violation(check, step, detail))

    def extend(self, other: "ViolationReport"):
        self.violations.extend(other.violations)
        return self

    def by_check(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.check] = counts.get(v.check, 0) + 1
        return counts


def check_pivot_form(h: SweepHistory) -> ViolationReport:
    rep = ViolationReport()
    for mk in h.marks:
        if not classify_scalar(mk.value).is_unit_shape:
            rep.add("pivot-form", mk.diagonal, f"{mk.kind} ({mk.row},{mk.col}) = {mk.value}")
    return rep


def check_pivot_disjointness(h: SweepHistory) -> ViolationReport:
    rep = ViolationReport()
    prim = h.primaries
    for a in range(len(prim)):
        for b in range(a + 1, len(prim)):
            p, q = prim[a], prim[b]
            if {p.row, p.col} & {q.row, q.col}:
                rep.add("disjointness", max(p.diagonal, q.diagonal), f"{p.position} and {q.position} share an index")
    return rep


def check_conjugation(h: SweepHistory) -> ViolationReport:
    """T * next == current * T on the main track, plus the raw/chain bookkeeping identities."""
    rep = ViolationReport()
    D0 = h.complex.matrix
    for r in range(1, h.length):
        T = h.basis_change(r)
        if T @ h.matrix(r + 1) != h.matrix(r) @ T:
            rep.add("conjugation", r, "T^r D^{r+1} != D^r T^r")
    for r in range(1, h.length + 1):
        S = h.chains(r)
        if h.raw(r) != D0 @ S:
            rep.add("chains", r, "raw track differs from D applied to the chains")
        if h.raw(r) != S @ h.matrix(r):
            rep.add("chains", r, "raw track differs from chains times the main track")
        if not h.matrix(r).is_strictly_upper() or not h.matrix(r).square_is_zero():
            rep.add("conjugation", r, "main matrix lost triangularity or square-zero")
    return rep


def check_block_invariants(h: SweepHistory) -> ViolationReport:
    """First-block column types, raw-track second-block row types and the five marking facts."""
    C = h.complex
    J1 = C.partition.block(1)
    J1set = set(J1)
    rep = ViolationReport()
    for r in range(1, h.length + 1):
        D = h.matrix(r)
        for j in J1:
            t = classify_line(D.column(j).values())
            if not t.ok:
                rep.add("first-block", r, f"column {j} of the main matrix: {t.reason}")
        R = h.raw(r)
        for s in J1:
            row = R.row(s)
            seen_binomial = None
            for j in sorted(row):
                shape = classify_scalar(row[j])
                if not shape.is_unit_shape:
                    rep.add("second-block", r, f"raw row {s}, column {j}: {row[j]} is neither monomial nor binomial")
                elif shape.is_binomial and seen_binomial is None:
                    seen_binomial = j
                elif shape.is_monomial and seen_binomial is not None:
                    rep.add("second-block", r, f"raw row {s}: monomial at column {j} after binomial at {seen_binomial}")
    cob_rows: dict[int, int] = {}
    for mk in h.changes:
        i, j, u, r = mk.row, mk.col, mk.paired_col, mk.diagonal
        if i not in J1set:
            continue
        cob_rows[i] = cob_rows.get(i, 0) + 1
        if cob_rows[i] > 1:
            rep.add("item-i", r, f"row {i} holds more than one change-of-basis mark")
        R = h.raw(r)
        cob, prim = classify_scalar(R.get(i, j)), classify_scalar(R.get(i, u))
        if not cob.is_monomial:
            rep.add("item-ii", r, f"change-of-basis ({i},{j}) = {R.get(i, j)} is not a monomial")
        if not (cob.is_monomial and prim.is_monomial and cob.sign != prim.sign):
            rep.add("item-iv", r, f"pivots ({i},{u}) and ({i},{j}) are not opposite-sign monomials")
        for s in range(1, i):
            above_j, above_u = classify_scalar(R.get(s, j)), classify_scalar(R.get(s, u))
            if above_j.is_binomial and R.get(s, u):
                rep.add("item-iii", r, f"binomial at ({s},{j}) but ({s},{u}) = {R.get(s, u)}")
            if above_j.is_monomial and above_u.is_monomial and above_j.sign == above_u.sign:
                rep.add("item-v", r, f"monomials at ({s},{u}) and ({s},{j}) share a sign")
    return rep


def check_final_matrix(final: NovikovMatrix) -> ViolationReport:
    rep = ViolationReport()
    for j in range(1, final.m + 1):
        if final.column(j) and final.row(j):
            rep.add("null-row", 0, f"column {j} and row {j} are both nonzero")
    if not final.square_is_zero():
        rep.add("final-square-zero", 0, "final matrix does not square to zero")
    for (i, j), v in final.items():
        if not v.is_polynomial():
            rep.add("polynomial", 0, f"entry ({i},{j}) = {v} is an infinite series")
        elif not classify_scalar(v).is_unit_shape:
            rep.add("polynomial", 0, f"entry ({i},{j}) = {v} is neither monomial nor binomial")
    return rep


def check_pivot_tracks(h: SweepHistory) -> ViolationReport:
    """Marked values agree on the main and raw tracks."""
    rep = ViolationReport()
    for mk in h.marks:
        if h.raw(mk.diagonal).get(mk.row, mk.col) != mk.value:
            rep.add("tracks", mk.diagonal, f"raw value at {mk.position} differs from the main track")
    return rep


def sweep_block(C: FilteredComplex, lower_index: int) -> SweepHistory:
    """Sweep with only the entries from index lower_index+1 to lower_index kept."""
    idx = C.partition.index
    kept = {k: v for k, v in C.matrix.items() if idx(k[0]) == lower_index}
    return run_sssa(C.with_matrix(NovikovMatrix(C.m, kept)), validate=False)


def check_block_isolation(h: SweepHistory) -> ViolationReport:
    rep = ViolationReport()
    full = sorted(mk.key()[:5] for mk in h.marks)
    split = sorted(mk.key()[:5] for k in (0, 1) for mk in sweep_block(h.complex, k).marks)
    if [(k, i, j, str(v), d) for k, i, j, v, d in full] != [(k, i, j, str(v), d) for k, i, j, v, d in split]:
        rep.add("block-isolation", 0, "marks of the block-wise sweeps differ from the full sweep")
    return rep


def check_idempotence(h: SweepHistory) -> ViolationReport:
    rep = ViolationReport()
    again = run_sssa(h.complex.with_matrix(h.final), validate=False)
    if again.changes:
        rep.add("idempotence", 0, f"resweeping the final matrix marks {len(again.changes)} change-of-basis pivots")
    return rep


def check_sweep(h: SweepHistory) -> ViolationReport:
    rep = ViolationReport()
    for fn in (
        check_pivot_form,
        check_pivot_disjointness,
        check_conjugation,
        check_block_invariants,
        check_pivot_tracks,
        check_block_isolation,
        check_idempotence,
    ):
        rep.extend(fn(h))
    rep.extend(check_final_matrix(h.final))
    return rep
