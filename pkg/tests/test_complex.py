import json

import pytest
from hypothesis import assume, given, settings, strategies as st

from novsweep.complex import (
    classify_column,
    classify_line,
    classify_row,
    generate_example,
    parse_complex,
    random_complex,
    render_complex,
    render_grid,
    validate_differential,
)
from novsweep.errors import GenerationFailed, ParseError, StructureError
from novsweep.ring import classify_scalar, parse_scalar

S = parse_scalar


def doc(m, indices, entries):
    return json.dumps({"m": m, "indices": indices, "entries": entries})


def test_parse_torus_b_round_trip(torus_b):
    C = parse_complex(render_complex(torus_b))
    assert C.matrix == torus_b.matrix
    assert [len(C.partition.block(k)) for k in (0, 1, 2)] == [2, 4, 2]
    assert C.labels[0] == "h^1_0" and C.labels[-1] == "h^8_2"


def test_parse_zero_complex():
    C = parse_complex(doc(1, [0], []))
    assert C.m == 1 and C.matrix.is_zero()


def test_parse_fraction_entry():
    C = parse_complex(doc(2, [0, 1], [{"row": 1, "col": 2, "poly": [[0, 1]], "den": [[0, 1], [1, -1]]}]))
    assert C.matrix.get(1, 2) == S("1/(1 - t)")


@pytest.mark.parametrize(
    "m, indices, entries",
    [
        (3, [0, 1, 1], [{"row": 3, "col": 2, "poly": [[0, 1]]}]),
        (2, [0, 3], []),
        (3, [1, 0, 1], []),
        (2, [0, 1, 1], []),
        (2, [0, 1], [{"row": 1, "col": 5, "poly": [[0, 1]]}]),
        (3, [0, 1, 1], [{"row": 2, "col": 3, "poly": [[0, 1]]}]),
    ],
)
def test_structure_errors(m, indices, entries):
    with pytest.raises(StructureError):
        parse_complex(doc(m, indices, entries))


@pytest.mark.parametrize(
    "text",
    [
        "{",
        "[]",
        json.dumps({"m": 2, "indices": [0, 1]}),
        doc(2, [0, 1], [{"row": 1, "col": 2, "poly": [[0, 0]]}]),
        doc(2, [0, 1], [{"row": 1, "col": 2, "poly": [[1, 1], [0, 1]]}]),
        doc(2, [0, 1], [{"row": 1, "col": 2, "poly": [[0, 1]]}, {"row": 1, "col": 2, "poly": [[0, 1]]}]),
        doc(2, [0, 1], [{"row": 1, "col": 2, "poly": [[0, 1]], "den": [[0, 2]]}]),
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_complex(text)


def test_validate_torus_b(torus_b):
    v = validate_differential(torus_b)
    assert v.admissible and v.square_zero


def test_validate_zero_matrix():
    C = parse_complex(doc(4, [0, 1, 1, 2], []))
    v = validate_differential(C)
    assert v.admissible
    assert all(t.kind == 1 for t in v.column_types.values())
    assert all(t.kind == 1 for t in v.row_types.values())


def test_same_sign_column_is_inadmissible():
    entries = [{"row": 1, "col": 3, "poly": [[1, 1]]}, {"row": 2, "col": 3, "poly": [[1, 1]]}]
    C = parse_complex(doc(3, [0, 0, 1], entries))
    v = validate_differential(C)
    assert not v.admissible
    assert v.column_types[3].reason == "sign-pattern"


def test_not_square_zero_is_inadmissible():
    entries = [{"row": 1, "col": 2, "poly": [[0, 1]]}, {"row": 2, "col": 3, "poly": [[0, 1]]}]
    C = parse_complex(doc(3, [0, 1, 2], entries))
    assert not validate_differential(C).admissible


def test_line_types():
    assert classify_line([]).kind == 1
    assert classify_line([S("t - 1")]).kind == 2
    assert classify_line([S("t^2"), S("-1")]).kind == 3
    assert not classify_line([S("2t")]).ok


def test_column_and_row_types(torus_b):
    for j in torus_b.partition.block(1):
        assert classify_column(torus_b, j).ok
        assert classify_row(torus_b, j).ok


def test_generate_examples():
    a = generate_example("torus_a")
    b = generate_example("torus_b")
    g1 = generate_example("chained(1)")
    for C in (a, b, g1):
        assert validate_differential(C).admissible
    assert [len(g1.partition.block(k)) for k in (0, 1, 2)] == [2, 4, 2]
    assert generate_example(("chained", 2)).m > g1.m
    with pytest.raises(ValueError):
        generate_example("torus_c")


def test_shift_params_conjugate_entries(torus_b):
    shifted = generate_example("torus_b", [0, 1, 0, 0, 2, 0, 0, 0])
    assert validate_differential(shifted).admissible
    assert shifted.matrix.get(2, 3) == torus_b.matrix.get(2, 3) * S("t^-1")


def test_grid_rendering(torus_b):
    text = render_grid(torus_b.matrix, torus_b.labels)
    assert text.splitlines()[0].split() == list(torus_b.labels)
    assert render_complex(torus_b, "grid") == text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_complexes_are_admissible(seed):
    try:
        C = random_complex(seed)
    except GenerationFailed:
        assume(False)
    v = validate_differential(C)
    assert v.admissible and v.square_zero
    assert C.matrix.is_strictly_upper()
    # each first-block line carries at most two entries, all unit shaped
    for j in C.partition.block(1):
        for line in (C.matrix.column(j), C.matrix.row(j)):
            assert len(line) <= 2
            assert all(classify_scalar(x).is_unit_shape for x in line.values())
    assert parse_complex(render_complex(C)).matrix == C.matrix
