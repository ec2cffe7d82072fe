"""Command-line pipeline: validate, sweep, pages, cancel, orbits, all."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .cancellation import (
    all_events,
    detect_orbits,
    flow_family,
    pivots_agree,
    render_cancellations,
    render_orbits,
    run_rca,
)
from .complex import FilteredComplex, NovikovMatrix, dump_structured, matrix_records, parse_complex, render_grid, validate_differential
from .errors import InadmissibleInput, InternalInvariantViolation, ParseError, StructureError
from .sssa import check_sweep, format_chain, render_trace, run_sssa, trace_records
from .spectral import compute_sequence, render_pages

COMMANDS = ("validate", "sweep", "pages", "cancel", "orbits", "all")

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_STRUCTURE = 4
EXIT_INADMISSIBLE = 5
EXIT_INTERNAL = 6


@dataclass(frozen=True)
class PipelineConfig:
    input: str
    command: str
    truncate: int = 8
    fmt: str = "text"
    trace: bool = False
    track: str = "both"

    def __post_init__(self):
        if self.truncate < 1:
            raise ValueError("truncation order must be at least 1")
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


class _Report:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.text: list[str] = []
        self.doc: dict = {"input": cfg.input, "command": cfg.command}

    def section(self, title: str, text: str, key: str, value):
        self.text.append((key, f"## {title}\n{text.rstrip()}\n"))
        self.doc[key] = value

    def note(self, text: str):
        self.text.append(("", text))

    def drop(self, key: str):
        self.text = [(k, t) for k, t in self.text if k != key]
        self.doc.pop(key, None)

    def render_text(self) -> str:
        return "".join(t for _, t in self.text)


def _validate(C: FilteredComplex, rep: _Report):
    v = validate_differential(C)
    lines = [f"generators: {C.m} (index 0: {len(C.partition.block(0))}, "
             f"index 1: {len(C.partition.block(1))}, index 2: {len(C.partition.block(2))})",
             f"square zero: {'yes' if v.square_zero else 'no'}"]
    for j in sorted(v.column_types):
        lines.append(f"{C.labels[j - 1]}: column {v.column_types[j]}, row {v.row_types[j]}")
    lines.append("verdict: " + v.summary())
    rep.section(
        "validation",
        "\n".join(lines),
        "validation",
        {
            "square_zero": v.square_zero,
            "columns": {str(j): v.column_types[j].kind for j in sorted(v.column_types)},
            "rows": {str(j): v.row_types[j].kind for j in sorted(v.row_types)},
            "admissible": v.admissible,
            "diagnostics": v.diagnostics,
        },
    )
    if not v.admissible:
        raise InadmissibleInput(v.summary())


def _sweep(C: FilteredComplex, rep: _Report):
    cfg = rep.cfg
    h = run_sssa(C, validate=False)
    checks = check_sweep(h)
    lines = [f"last matrix: step {h.length}"]
    for mk in h.marks:
        lines.append(f"  diagonal {mk.diagonal}: {mk.kind} ({mk.row},{mk.col}) = {mk.value.render(cfg.truncate)}")
    lines.append("chains at the last step:")
    for j in range(1, C.m + 1):
        ch = h.chain(j, h.length)
        if len(ch) > 1:
            lines.append(f"  sigma^{j} = {format_chain(ch, C, cfg.truncate)}")
    if cfg.track in ("main", "both"):
        lines.append("final matrix:")
        lines.append(render_grid(h.final, C.labels, cfg.truncate).rstrip())
    if cfg.track in ("raw", "both"):
        lines.append("final matrix without premultiplication:")
        lines.append(render_grid(h.raw(h.length), C.labels, cfg.truncate).rstrip())
    lines.append("invariant checks: " + ("all hold" if checks.ok else f"{len(checks.violations)} violations"))
    lines += [f"  {v}" for v in checks.violations]
    doc = {
        "length": h.length,
        "marks": [
            {"kind": mk.kind, "diagonal": mk.diagonal, **matrix_records(_one(mk.row, mk.col, mk.value, C.m))[0]}
            for mk in h.marks
        ],
        "violations": [str(v) for v in checks.violations],
    }
    if cfg.track in ("main", "both"):
        doc["final"] = matrix_records(h.final)
    if cfg.track in ("raw", "both"):
        doc["final_raw"] = matrix_records(h.raw(h.length))
    if cfg.trace:
        doc["trace"] = trace_records(h)
        lines.append("trace:")
        lines.append(render_trace(h).rstrip())
    rep.section("sweep", "\n".join(lines), "sweep", doc)
    if not checks.ok:
        raise InternalInvariantViolation(f"{len(checks.violations)} invariant violations")
    return h


def _one(i, j, v, m):
    return NovikovMatrix(m, {(i, j): v})


def _pages(h, rep: _Report):
    seq = compute_sequence(h)
    rep.section(
        "pages",
        render_pages(seq, "text", rep.cfg.truncate),
        "pages",
        json.loads(render_pages(seq, "structured")),
    )
    return seq


def _cancel(C, h, rep: _Report):
    rc = run_rca(C, validate=False)
    agree = pivots_agree(h, rc)
    states = flow_family(rc)
    text = render_cancellations(states, C, "text", rep.cfg.truncate)
    text += f"pivots agree with the sweep: {'yes' if agree else 'no'}\n"
    doc = json.loads(render_cancellations(states, C, "structured"))
    doc["pivots_agree"] = agree
    rep.section("cancellations", text, "cancellations", doc)
    audit = [a for st in states for a in st.audit]
    if not agree or audit:
        raise InternalInvariantViolation("cancellation replay disagrees with the sweep")
    return states


def _orbits(C, states, rep: _Report):
    orbits = detect_orbits(states)
    rep.section("orbits", render_orbits(orbits, C), "orbits", json.loads(render_orbits(orbits, C, "structured"))["orbits"])


def run_pipeline(cfg: PipelineConfig) -> tuple[int, str]:
    """Run one command on one input; returns (exit status, rendered report)."""
    rep = _Report(cfg)
    status = EXIT_OK
    try:
        try:
            with open(cfg.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            status = EXIT_IO
            raise _Stop(f"cannot read input: {exc}")
        C = parse_complex(text)
        _validate(C, rep)
        if cfg.command != "validate":
            if cfg.command in ("sweep", "all"):
                h = _sweep(C, rep)
            else:
                h = run_sssa(C, validate=False)
            if cfg.command in ("pages", "all"):
                seq = _pages(h, rep)
            if cfg.command in ("cancel", "orbits", "all"):
                if cfg.command == "orbits":
                    states = flow_family(run_rca(C, validate=False))
                else:
                    states = _cancel(C, h, rep)
                if cfg.command == "all":
                    events = sorted((e.step, e.source, e.target) for e in all_events(states))
                    diffs = sorted((d.r, d.source, d.target) for d in seq.differentials)
                    if events != diffs:
                        rep.drop("pages")
                        raise InternalInvariantViolation("cancellation events do not match the page differentials")
                if cfg.command in ("orbits", "all"):
                    _orbits(C, states, rep)
    except _Stop as exc:
        rep.doc["error"] = str(exc)
        rep.note(f"error: {exc}\n")
    except ParseError as exc:
        status = _fail(rep, "parse error", exc, EXIT_PARSE)
    except StructureError as exc:
        status = _fail(rep, "structure error", exc, EXIT_STRUCTURE)
    except InadmissibleInput as exc:
        status = _fail(rep, "inadmissible input", exc, EXIT_INADMISSIBLE)
    except (InternalInvariantViolation, ArithmeticError) as exc:
        status = _fail(rep, "internal invariant violation", exc, EXIT_INTERNAL)
    rep.doc["status"] = status
    if cfg.fmt == "structured":
        return status, dump_structured(rep.doc)
    return status, rep.render_text()


class _Stop(Exception):
    pass


def _fail(rep: _Report, category: str, exc: Exception, code: int) -> int:
    rep.doc["error"] = {"category": category, "message": str(exc)}
    rep.note(f"error ({category}): {exc}\n")
    return code


def _run(cfg):
    return run_pipeline(cfg)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="novsweep", description="Sweep filtered 2-dimensional Novikov complexes.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", action="append", required=True, metavar="PATH", help="matrix document (repeatable)")
    ap.add_argument("--truncate", type=int, default=8, metavar="N", help="series terms shown (default 8)")
    ap.add_argument("--format", dest="fmt", choices=("text", "structured"), default="text")
    ap.add_argument("--track", choices=("main", "raw", "both"), default="both")
    ap.add_argument("--trace", action="store_true", help="emit one record per sweep step")
    ap.add_argument("--jobs", type=int, default=1, metavar="K", help="process inputs in K worker processes")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.truncate < 1:
        ap.error("--truncate must be at least 1")
    base = PipelineConfig(args.input[0], args.command, args.truncate, args.fmt, args.trace, args.track)
    configs = [replace(base, input=path) for path in args.input]
    if args.jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run, configs))
    else:
        results = [run_pipeline(c) for c in configs]
    many = len(results) > 1
    for cfg, (status, out) in zip(configs, results):
        if many and args.fmt == "text":
            sys.stdout.write(f"# {cfg.input}\n")
        sys.stdout.write(out)
    return next((s for s, _ in results if s), EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
