"""Row-clearing variant of the sweep, the flows it models, and periodic-orbit births.

Here every primary pivot clears its whole row on the following step, so after
step r the generators of pivots marked on diagonals below r can be dropped and
the remaining submatrix is again a Novikov matrix: the one of the flow obtained
by cancelling those critical-point pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .complex import FilteredComplex, NovikovMatrix, dump_structured, matrix_records, validate_differential
from .errors import InadmissibleInput, ReducedMatrixInvalid
from .ring import ONE, ZERO, NovikovScalar, classify_scalar
from .sssa import PRIMARY, PivotMark, SweepHistory

ATTRACTOR = "Attractor"
REPELLER = "Repeller"


@dataclass
class RcaHistory:
    complex: FilteredComplex
    matrices: list[NovikovMatrix]  # index r holds the r-th matrix, r = 0..m
    transforms: list[NovikovMatrix]  # index r holds the r-th transform, r = 0..m-1
    marks: list[PivotMark]

    @property
    def m(self) -> int:
        return self.complex.m

    def matrix(self, r: int) -> NovikovMatrix:
        return self.matrices[min(r, len(self.matrices) - 1)]

    def marks_on(self, r: int) -> list[PivotMark]:
        return [mk for mk in self.marks if mk.diagonal == r]

    def removed_through(self, r: int) -> set[int]:
        out = set()
        for mk in self.marks:
            if mk.diagonal <= r:
                out |= {mk.row, mk.col}
        return out


def _row_transform(D: NovikovMatrix, pivots: list[PivotMark], m: int) -> NovikovMatrix:
    """Transform whose row p clears the pivot row to the right of pivot column p.

    Pivots on one diagonal are taken successively in column order: each row is
    read from the matrix already reduced by the earlier pivots of the diagonal.
    Building all rows from the unreduced matrix leaves a pivot row uncleared
    whenever an earlier pivot row reaches a later pivot column.
    """
    T = NovikovMatrix.identity(m)
    current = D
    for mk in pivots:
        if mk.col >= m:
            continue
        inv = ONE / current.get(mk.row, mk.col)
        data = {(k, k): ONE for k in range(1, m + 1)}
        for ell, x in current.row(mk.row).items():
            if ell > mk.col:
                data[(mk.col, ell)] = -(inv * x)
        E = NovikovMatrix(m, data)
        current = E.unit_upper_inverse() @ current @ E
        T = T @ E
    return T


def run_rca(C: FilteredComplex, validate: bool = True) -> RcaHistory:
    if validate:
        report = validate_differential(C)
        if not report.admissible:
            raise InadmissibleInput(report.summary())
    m = C.m
    ident = NovikovMatrix.identity(m)
    matrices, transforms = [C.matrix], [ident]
    marks: list[PivotMark] = []
    pivot_cols: set[int] = set()
    for r in range(1, m):
        prev, T = matrices[-1], transforms[-1]
        D = T.unit_upper_inverse() @ prev @ T
        matrices.append(D)
        new = []
        for j in range(r + 1, m + 1):
            v = D.get(j - r, j)
            if v and j not in pivot_cols:
                mk = PivotMark(PRIMARY, j - r, j, v, r)
                new.append(mk)
                pivot_cols.add(j)
        marks.extend(new)
        transforms.append(_row_transform(D, new, m))
    # final update, performed as written even when it changes nothing
    if m >= 1:
        prev, T = matrices[-1], transforms[-1]
        matrices.append(T.unit_upper_inverse() @ prev @ T)
    return RcaHistory(C, matrices, transforms, marks)


def pivots_agree(s: SweepHistory, rc: RcaHistory) -> bool:
    ours = sorted((mk.row, mk.col, mk.diagonal, mk.value) for mk in rc.marks)
    theirs = sorted((mk.row, mk.col, mk.diagonal, mk.value) for mk in s.primaries)
    return ours == theirs


@dataclass(frozen=True)
class IncidenceUpdate:
    col: int
    row: int
    old: NovikovScalar
    new: NovikovScalar


@dataclass(frozen=True)
class CancellationEvent:
    step: int
    col: int  # index-k generator
    row: int  # index-(k-1) generator
    index: int  # k
    pivot: NovikovScalar
    updates: tuple[IncidenceUpdate, ...]
    annotations: tuple[str, ...] = ()

    @property
    def source(self) -> int:
        return self.col - 1

    @property
    def target(self) -> int:
        return self.row - 1


@dataclass
class FlowState:
    step: int
    generators: tuple[int, ...]
    matrix: NovikovMatrix  # zero outside ``generators``
    events: list[CancellationEvent] = field(default_factory=list)
    audit: list[str] = field(default_factory=list)

    def incidence(self, col: int, row: int) -> NovikovScalar:
        if col not in self.generators or row not in self.generators:
            raise KeyError(f"generator pair ({col},{row}) is not alive at step {self.step}")
        return self.matrix.get(row, col)


def _eliminate(M: dict, alive: set, a: int, b: int):
    """Cancel pivot (a, b) in the sparse map M; returns the list of changed entries."""
    pv = M[(a, b)]
    changes = []
    row_a = {j: v for (i, j), v in M.items() if i == a and j != b and j in alive}
    col_b = {i: v for (i, j), v in M.items() if j == b and i != a and i in alive}
    for j, x in row_a.items():
        for i, y in col_b.items():
            old = M.get((i, j), ZERO)
            new = old - x * y / pv
            changes.append((i, j, old, new))
            if new:
                M[(i, j)] = new
            else:
                M.pop((i, j), None)
    alive.discard(a)
    alive.discard(b)
    for key in [k for k in M if a in k or b in k]:
        del M[key]
    return changes


def _annotations(C: FilteredComplex, D: NovikovMatrix, alive: set, mk: PivotMark) -> tuple[str, ...]:
    if not classify_scalar(mk.value).is_binomial:
        return ()
    lab = C.labels
    notes = []
    if C.index(mk.col) == 1:
        for j, v in sorted(D.row(mk.row).items()):
            if j != mk.col and j in alive:
                notes.append(f"a flow line from {lab[j - 1]} loses its omega-limit set")
    else:
        for i, v in sorted(D.column(mk.col).items()):
            if i != mk.row and i in alive:
                notes.append(f"a flow line into {lab[i - 1]} loses its alpha-limit set")
    return tuple(notes)


def flow_family(rc: RcaHistory) -> list[FlowState]:
    """Reduced matrices of the successive flows, with cancellation events and an update audit."""
    C, m = rc.complex, rc.m
    states = []
    for r in range(1, m + 1):
        alive = set(range(1, m + 1)) - rc.removed_through(r - 1)
        D = rc.matrix(r).restrict(alive)
        report = validate_differential(C, D, alive)
        if not report.admissible or not D.is_strictly_upper():
            raise ReducedMatrixInvalid(f"reduced matrix at step {r}: {report.summary()}")
        states.append(FlowState(r, tuple(sorted(alive)), D))
    for n, st in enumerate(states[:-1]):
        r = st.step
        work = st.matrix.to_dict()
        alive = set(st.generators)
        for mk in sorted(rc.marks_on(r), key=lambda x: x.col):
            notes = _annotations(C, NovikovMatrix(m, work), alive, mk)
            changes = _eliminate(work, alive, mk.row, mk.col)
            ups = tuple(IncidenceUpdate(j, i, o, nw) for i, j, o, nw in sorted(changes) if o != nw)
            st.events.append(CancellationEvent(r, mk.col, mk.row, C.index(mk.col), mk.value, ups, notes))
            if not classify_scalar(mk.value).is_unit_shape:
                st.audit.append(f"pivot {mk.position} = {mk.value} is neither monomial nor binomial")
        nxt = states[n + 1]
        if set(nxt.generators) != alive:
            st.audit.append("surviving generators differ from the event log")
        if NovikovMatrix(m, work) != nxt.matrix:
            diff = sorted(set(work) ^ set(nxt.matrix.keys()) | {k for k in work if nxt.matrix.get(*k) != work[k]})
            st.audit.append(f"incidence updates disagree with the conjugated matrix at {diff}")
    return states


@dataclass(frozen=True)
class PeriodicOrbit:
    born_at_step: int
    period: int
    stability: str
    pivot_row: int
    pivot_col: int
    diagonal: int


def detect_orbits(states: list[FlowState]) -> list[PeriodicOrbit]:
    orbits = []
    for st in states:
        for ev in st.events:
            shape = classify_scalar(ev.pivot)
            if not shape.is_binomial:
                continue
            kind = ATTRACTOR if ev.index - 1 == 0 else REPELLER
            orbits.append(PeriodicOrbit(ev.step + 1, shape.gap, kind, ev.row, ev.col, ev.step))
    return orbits


def all_events(states: list[FlowState]) -> list[CancellationEvent]:
    return [ev for st in states for ev in st.events]


# ---------------------------------------------------------------- reports

def _val(v: NovikovScalar):
    rec = matrix_records(NovikovMatrix(1, {(1, 1): v}))
    return [rec[0]["poly"]] + ([rec[0]["den"]] if "den" in rec[0] else []) if rec else [[]]


def render_cancellations(states: list[FlowState], C: FilteredComplex, fmt: str = "text", truncate: int = 8) -> str:
    lab = C.labels
    events = all_events(states)
    if fmt == "structured":
        doc = {
            "events": [
                {
                    "step": ev.step,
                    "col": ev.col,
                    "row": ev.row,
                    "pivot": _val(ev.pivot),
                    "updates": [{"col": u.col, "row": u.row, "old": _val(u.old), "new": _val(u.new)} for u in ev.updates],
                    "annotations": list(ev.annotations),
                }
                for ev in events
            ],
            "surviving": list(states[-1].generators) if states else [],
            "audit": [a for st in states for a in st.audit],
        }
        return dump_structured(doc)
    lines = []
    for ev in events:
        lines.append(f"step {ev.step}: cancel ({lab[ev.col - 1]}, {lab[ev.row - 1]}) pivot {ev.pivot.render(truncate)}")
        for u in ev.updates:
            lines.append(
                f"    N({lab[u.col - 1]}, {lab[u.row - 1]}): {u.old.render(truncate)} -> {u.new.render(truncate)}"
            )
        for note in ev.annotations:
            lines.append(f"    {note}")
    if not events:
        lines.append("no cancellations")
    surv = states[-1].generators if states else ()
    lines.append(f"surviving generators: {len(surv)}" + (f" ({', '.join(lab[j - 1] for j in surv)})" if surv else ""))
    audit = [a for st in states for a in st.audit]
    lines.append("update audit: " + ("consistent" if not audit else "; ".join(audit)))
    return "\n".join(lines) + "\n"


def render_orbits(orbits: list[PeriodicOrbit], C: FilteredComplex, fmt: str = "text") -> str:
    if fmt == "structured":
        return dump_structured(
            {
                "orbits": [
                    {
                        "born_at_step": o.born_at_step,
                        "period": o.period,
                        "stability": o.stability,
                        "row": o.pivot_row,
                        "col": o.pivot_col,
                        "diagonal": o.diagonal,
                    }
                    for o in orbits
                ]
            }
        )
    if not orbits:
        return "no periodic orbits\n"
    lines = []
    for o in orbits:
        lines.append(
            f"{o.stability} born in flow {o.born_at_step}, period {o.period}, "
            f"from pivot ({o.pivot_row},{o.pivot_col}) on diagonal {o.diagonal}"
        )
    return "\n".join(lines) + "\n"
