"""Pages and differentials of the finest-filtration spectral sequence, read off a sweep.

Column j = p + 1 carries E_p. On page r the module E^r_p is zero when column j was
already used as a pivot column on an earlier diagonal, or when row j was; otherwise
it is free of rank one, generated by the sweep chain sigma^{j,r}. The differential
d^r_p is multiplication by the entry of the r-th matrix at (p - r + 1, p + 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .complex import NovikovMatrix, dump_structured, matrix_records
from .errors import IndexOutOfRange, InternalInvariantViolation, PageInconsistency, UndefinedDifferential
from .ring import NovikovScalar, classify_scalar
from .sssa import SweepHistory, format_chain

ZERO_MODULE = "Zero"
FREE = "FreeRankOne"


@dataclass(frozen=True)
class CycleGenerator:
    mu: int
    column: int
    step: int
    chain: Mapping[int, NovikovScalar]


@dataclass(frozen=True)
class CycleModule:
    r: int
    p: int
    generators: tuple[CycleGenerator, ...]

    @property
    def active(self) -> list[CycleGenerator]:
        return [g for g in self.generators if g.mu]


@dataclass(frozen=True)
class PageEntry:
    r: int
    p: int
    index: int
    status: str
    generator: Optional[Mapping[int, NovikovScalar]]
    differential_out: Optional[NovikovScalar]
    differential_target: int

    @property
    def free(self) -> bool:
        return self.status == FREE


@dataclass(frozen=True)
class Differential:
    r: int
    source: int
    target: int
    value: NovikovScalar


@dataclass
class SpectralSequence:
    history: SweepHistory
    pages: dict[tuple[int, int], PageEntry]
    differentials: list[Differential]
    stabilization_step: int
    einfty: dict[int, str] = field(default_factory=dict)

    @property
    def last_page(self) -> int:
        return max((r for r, _ in self.pages), default=1)

    def entry(self, r: int, p: int) -> PageEntry:
        return self.pages[(min(r, self.last_page), p)]

    def einfty_ranks(self) -> dict[int, int]:
        idx = self.history.complex.partition.index
        ranks = {0: 0, 1: 0, 2: 0}
        for p, status in self.einfty.items():
            if status == FREE:
                ranks[idx(p + 1)] += 1
        return ranks


def _check_position(h: SweepHistory, r: int, p: int):
    if r < 1:
        raise IndexOutOfRange(f"page {r} < 1")
    if not 0 <= p <= h.m - 1:
        raise IndexOutOfRange(f"filtration level {p} outside 0..{h.m - 1}")


def _pivot_row(h: SweepHistory, j: int) -> Optional[int]:
    mk = h.primary_in_column(j)
    return mk.row if mk else None


def cycle_generators(h: SweepHistory, r: int, p: int) -> CycleModule:
    """Generators of the cycles in filtration p whose boundary drops r levels."""
    _check_position(h, r, p)
    part = h.complex.partition
    k = part.index(p + 1)
    kappa = part.kappa(k)
    threshold = p - r + 1
    gens = []
    for xi in range(0, p + 2 - kappa):
        j = p + 1 - xi
        zeta = max(r - xi, 1)
        row = _pivot_row(h, j)
        mu = 0 if row is not None and row > threshold else 1
        gens.append(CycleGenerator(mu, j, zeta, h.chain(j, zeta)))
    return CycleModule(r, p, tuple(gens))


def _status(h: SweepHistory, r: int, p: int) -> str:
    j = p + 1
    row = _pivot_row(h, j)
    if row is not None and row > p - r + 1:
        return ZERO_MODULE
    mk = h.primary_in_row(j)
    if mk is not None and mk.diagonal < r:
        return ZERO_MODULE
    return FREE


def page_module(h: SweepHistory, r: int, p: int) -> tuple[str, Optional[dict[int, NovikovScalar]]]:
    """(status, generator chain) of E^r_p; the chain is None for the zero module."""
    _check_position(h, r, p)
    status = _status(h, r, p)
    return status, (h.chain(p + 1, r) if status == FREE else None)


def page_differential(h: SweepHistory, r: int, p: int) -> NovikovScalar:
    _check_position(h, r, p)
    if p - r < 0:
        raise UndefinedDifferential(f"d^{r}_{p} has no target (p - r < 0)")
    if _status(h, r, p) != FREE or _status(h, r, p - r) != FREE:
        raise UndefinedDifferential(f"d^{r}_{p}: source or target module is zero")
    return h.matrix(r).get(p - r + 1, p + 1)


def _differential_or_none(h, r, p):
    try:
        return page_differential(h, r, p)
    except UndefinedDifferential:
        return None


def compute_sequence(h: SweepHistory) -> SpectralSequence:
    """All pages r = 1..m, cross-checked against the kernel/image recursion."""
    m = h.m
    idx = h.complex.partition.index
    pages: dict[tuple[int, int], PageEntry] = {}
    diffs: list[Differential] = []
    for r in range(1, max(m, 1) + 1):
        for p in range(m):
            status, gen = page_module(h, r, p)
            d = _differential_or_none(h, r, p)
            pages[(r, p)] = PageEntry(r, p, idx(p + 1), status, gen, d, p - r)
            if d:
                if not classify_scalar(d).is_unit_shape:
                    raise InternalInvariantViolation(f"d^{r}_{p} = {d} is not an isomorphism")
                diffs.append(Differential(r, p, p - r, d))
        if r > 1:
            _check_recursion(pages, r - 1, m, h)
    last = max(m, 1)
    stable = last
    for r in range(last, 0, -1):
        if all(pages[(r, p)].status == pages[(last, p)].status for p in range(m)):
            stable = r
        else:
            break
    einfty = {p: pages[(last, p)].status for p in range(m)}
    return SpectralSequence(h, pages, diffs, stable, einfty)


def _check_recursion(pages, r: int, m: int, h: SweepHistory):
    """E^{r+1}_p = ker d^r_p / im d^r_{p+r} with every nonzero d^r an isomorphism."""
    for p in range(m):
        here = pages[(r, p)]
        expected = here.free
        if here.differential_out:
            expected = False
        if p + r < m and pages[(r, p + r)].differential_out:
            expected = False
        nxt = pages[(r + 1, p)]
        if nxt.free != expected:
            raise PageInconsistency(f"E^{r + 1}_{p} is {nxt.status} but the kernel/image recursion says otherwise")
        if nxt.free and here.free and h.basis_change(r).column(p + 1) == {p + 1: NovikovScalar.coerce(1)}:
            if nxt.generator != here.generator:
                raise PageInconsistency(f"generator of E_{p} changed between pages {r} and {r + 1} without a change of basis")


def verify_convergence(seq: SpectralSequence, expected_homology: Mapping[int, object]) -> bool:
    """Compare the surviving E-infinity generators per Morse index against expected homology.

    ``expected_homology`` maps degree k to a rank, or to ``(rank, torsion)`` where a
    non-empty torsion list can never match (the limit page is free).
    """
    ranks = seq.einfty_ranks()
    for k in (0, 1, 2):
        want = expected_homology.get(k, 0)
        if isinstance(want, tuple):
            rank, torsion = want
            if torsion:
                return False
        else:
            rank = want
        if ranks.get(k, 0) != rank:
            return False
    return all(s in (ZERO_MODULE, FREE) for s in seq.einfty.values())


# ---------------------------------------------------------------- reports

def page_records(seq: SpectralSequence) -> list[dict]:
    out = []
    m = seq.history.m
    for r in range(1, seq.last_page + 1):
        rows = []
        for p in range(m):
            e = seq.pages[(r, p)]
            rec = {"p": p, "index": e.index, "status": e.status}
            if e.free:
                rec["generator"] = [[ell, *_scalar_pair(c)] for ell, c in sorted(e.generator.items())]
            if e.differential_out is not None:
                rec["target"] = e.differential_target
                rec["differential"] = _scalar_pair(e.differential_out)
            rows.append(rec)
        out.append({"r": r, "entries": rows})
    return out


def _scalar_pair(v: NovikovScalar):
    rec = matrix_records(_single(v))
    if not rec:
        return [[]]
    return [rec[0]["poly"]] + ([rec[0]["den"]] if "den" in rec[0] else [])


def _single(v):
    return NovikovMatrix(1, {(1, 1): v})


def render_pages(seq: SpectralSequence, fmt: str = "text", truncate: int = 8) -> str:
    if fmt == "structured":
        doc = {
            "pages": page_records(seq),
            "differentials": [
                {"r": d.r, "source": d.source, "target": d.target, "value": _scalar_pair(d.value)}
                for d in seq.differentials
            ],
            "stabilization_step": seq.stabilization_step,
            "einfty": [seq.einfty[p] for p in sorted(seq.einfty)],
        }
        return dump_structured(doc)
    C = seq.history.complex
    lines = []
    shown = sorted({d.r for d in seq.differentials} | {1, seq.stabilization_step})
    for r in shown:
        lines.append(f"page E^{r}")
        for p in range(seq.history.m):
            e = seq.pages[(r, p)]
            text = "0" if not e.free else format_chain(e.generator, C, truncate)
            if e.differential_out:
                text += f"    d^{r} -> E_{e.differential_target}: {e.differential_out.render(truncate)}"
            lines.append(f"  p={p} k={e.index}  {text}")
    lines.append("nonzero differentials:")
    for d in seq.differentials:
        lines.append(f"  d^{d.r}_{d.source} -> E_{d.target}: {d.value.render(truncate)}")
    if not seq.differentials:
        lines.append("  none")
    lines.append(f"stabilizes at page {seq.stabilization_step}")
    ranks = seq.einfty_ranks()
    lines.append("E^inf ranks by index: " + ", ".join(f"k={k}: {ranks[k]}" for k in (0, 1, 2)))
    return "\n".join(lines) + "\n"
