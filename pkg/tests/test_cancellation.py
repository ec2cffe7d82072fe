import json

import pytest

from novsweep import parse_complex, run_sssa
from novsweep.cancellation import (
    ATTRACTOR,
    REPELLER,
    all_events,
    detect_orbits,
    flow_family,
    pivots_agree,
    render_cancellations,
    render_orbits,
    run_rca,
)
from novsweep.complex import random_complex
from novsweep.ring import parse_scalar
from novsweep.spectral import compute_sequence

S = parse_scalar


@pytest.fixture(scope="module")
def flows_b(torus_b):
    return flow_family(run_rca(torus_b))


def test_torus_a_pivot_set(torus_a, sweep_a):
    rc = run_rca(torus_a)
    assert sorted(mk.position for mk in rc.marks) == [(1, 4), (2, 3), (5, 8), (6, 7)]
    assert pivots_agree(sweep_a, rc)


def test_torus_b_pivots_agree(torus_b, sweep_b):
    assert pivots_agree(sweep_b, run_rca(torus_b))


def test_zero_matrix():
    C = parse_complex(json.dumps({"m": 3, "indices": [0, 1, 2], "entries": []}))
    rc = run_rca(C)
    assert not rc.marks
    assert all(M.is_zero() for M in rc.matrices)
    assert pivots_agree(run_sssa(C), rc)
    states = flow_family(rc)
    assert states[-1].generators == (1, 2, 3)
    assert detect_orbits(states) == []


def test_pivot_rows_are_cleared(torus_b, flows_b):
    rc = run_rca(torus_b)
    for r in range(1, rc.m + 1):
        D = rc.matrix(r)
        for mk in rc.marks:
            if mk.diagonal < r:
                assert mk.col in D.row(mk.row)
                assert all(j <= mk.col for j in D.row(mk.row))
    for st in flows_b:
        removed = rc.removed_through(st.step - 1)
        assert all(i not in removed and j not in removed for i, j in st.matrix.keys())


def test_incidence_updates(flows_b):
    f2, f3 = flows_b[1], flows_b[2]
    assert f2.incidence(5, 1) == S("0")
    assert f2.incidence(6, 1) == S("t^2 - 1")
    assert f3.incidence(4, 1) == S("t - 1")
    with pytest.raises(KeyError):
        f2.incidence(3, 2)
    ev = flows_b[0].events[0]
    assert (ev.col, ev.row) == (3, 2)
    assert {(u.col, u.row): u.new for u in ev.updates}[(6, 1)] == S("t^2 - 1")


def test_event_log_is_consistent(flows_b, sweep_b):
    assert all(not st.audit for st in flows_b)
    events = sorted((e.step, e.source, e.target) for e in all_events(flows_b))
    differentials = sorted((d.r, d.source, d.target) for d in compute_sequence(sweep_b).differentials)
    assert events == differentials
    assert flows_b[-1].generators == ()


def test_torus_b_orbits(flows_b):
    orbits = detect_orbits(flows_b)
    table = sorted((o.stability, o.period, o.pivot_row, o.pivot_col, o.born_at_step) for o in orbits)
    assert table == [(ATTRACTOR, 1, 1, 4, 4), (REPELLER, 1, 6, 8, 3)]


def test_monomial_pivots_give_no_orbit(flows_b):
    assert all((o.pivot_row, o.pivot_col) != (2, 3) for o in detect_orbits(flows_b))
    assert all((o.pivot_row, o.pivot_col) != (5, 7) for o in detect_orbits(flows_b))


def test_torus_a_orbits(torus_a):
    orbits = detect_orbits(flow_family(run_rca(torus_a)))
    assert sorted((o.stability, o.pivot_row, o.pivot_col) for o in orbits) == [
        (ATTRACTOR, 2, 3),
        (REPELLER, 5, 8),
    ]


def test_binomial_pivot_annotations(flows_b):
    notes = [n for st in flows_b for ev in st.events for n in ev.annotations]
    assert any("alpha-limit" in n for n in notes)


@pytest.mark.parametrize("seed", [18, 153])
def test_chained_pivots_on_one_diagonal(seed):
    """Pivot rows that reach later pivot columns of the same diagonal."""
    C = random_complex(seed)
    rc = run_rca(C)
    assert pivots_agree(run_sssa(C), rc)
    states = flow_family(rc)
    assert all(not st.audit for st in states)
    assert len(states[-1].generators) == C.m - 2 * len(rc.marks)


def test_reports(flows_b, torus_b):
    text = render_cancellations(flows_b, torus_b)
    assert "surviving generators: 0" in text and "update audit: consistent" in text
    doc = json.loads(render_cancellations(flows_b, torus_b, "structured"))
    assert len(doc["events"]) == 4 and doc["surviving"] == []
    orbits = detect_orbits(flows_b)
    assert "Attractor born in flow 4, period 1" in render_orbits(orbits, torus_b)
    assert len(json.loads(render_orbits(orbits, torus_b, "structured"))["orbits"]) == 2
