import pytest
from hypothesis import given, settings, strategies as st

from novsweep.errors import DivisionByNonUnit, DivisionByZero, ParseError
from novsweep.ring import (
    ONE,
    ZERO,
    LaurentPoly,
    NovikovScalar,
    classify_scalar,
    is_unit,
    parse_poly,
    parse_scalar,
    poly_arith,
    scalar_arith,
    truncate_series,
)

P = parse_poly
S = parse_scalar

polys = st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=4).map(LaurentPoly)
unit_polys = st.builds(
    lambda low, sign, rest: LaurentPoly({low: sign}) + LaurentPoly({low + 1 + e: c for e, c in rest.items()}),
    st.integers(-3, 3),
    st.sampled_from([1, -1]),
    st.dictionaries(st.integers(0, 3), st.integers(-3, 3), max_size=3),
)
scalars = st.builds(NovikovScalar, polys, unit_polys)


def test_poly_arith_examples():
    assert poly_arith(P("t - 1"), P("t + 1"), "mul") == P("t^2 - 1")
    assert poly_arith(P("t^2 - 1"), P("t^2 - 1"), "sub") == LaurentPoly()
    assert poly_arith(P("t^-1 + 1"), P("t"), "mul") == P("1 + t")


def test_is_unit_examples():
    assert is_unit(P("t - 1"))
    assert not is_unit(LaurentPoly())
    assert not is_unit(P("2t"))


def test_scalar_division_examples():
    assert scalar_arith(S("t^2 - 1"), S("t - 1"), "div") == S("t + 1")
    x = S("t^3 - 2t^-1")
    assert scalar_arith(x, ONE, "div") == x
    inv = scalar_arith(ONE, S("t - 1"), "div")
    assert not inv.is_polynomial()
    assert truncate_series(inv, 4) == P("-1 - t - t^2 - t^3 - t^4")


def test_division_errors():
    with pytest.raises(DivisionByZero):
        scalar_arith(ONE, ZERO, "div")
    with pytest.raises(DivisionByNonUnit):
        scalar_arith(ONE, S("2 + t"), "div")
    with pytest.raises(DivisionByNonUnit):
        NovikovScalar(1, P("3t"))


def test_truncate_series_examples():
    assert truncate_series(S("1/(1 - t)"), 3) == P("1 + t + t^2 + t^3")
    got = truncate_series(S("1/(t - 1)"), 2)
    assert got == P("-1 - t - t^2")
    # multiply back by (t - 1): identity up to order 2
    assert truncate_series(NovikovScalar(got * P("t - 1")), 2) == P("1")
    assert truncate_series(S("t^-1"), 0) == P("t^-1")


def test_classify_examples():
    c = classify_scalar(S("t - 1"))
    assert c.is_binomial and (c.plus_exponent, c.minus_exponent) == (1, 0)
    c = classify_scalar(S("-t^2"))
    assert c.is_monomial and (c.sign, c.exponent) == (-1, 2)
    assert classify_scalar(S("2t")).kind == "other"
    assert classify_scalar(ZERO).kind == "zero"
    assert classify_scalar(S("1/(1 - t)")).kind == "other"


def test_canonical_form_and_rendering():
    a = S("(t - t^2)/(1 - t)")
    assert a == S("t") and a.is_polynomial()
    assert str(S("1/(t - 1)")) == "-1/(1 - t)"
    assert S("1/(1 - t)").render(3) == "1 + t + t^2 + O(t^3)"
    assert str(P("-1 + t^2 - t^-1")) == "-t^-1 - 1 + t^2"


@pytest.mark.parametrize("bad", ["", "t^", "2x", "t^1.5", "1/(0)", "1/(2t)"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_scalar(bad)


@given(polys, polys, polys)
def test_poly_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentPoly()


@given(polys)
def test_poly_text_round_trip(a):
    assert parse_poly(str(a)) == a


@settings(max_examples=60)
@given(scalars, scalars, scalars)
def test_scalar_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO


@settings(max_examples=60)
@given(unit_polys, scalars)
def test_division_round_trip(u, x):
    u = NovikovScalar(u)
    assert (x / u) * u == x
    assert (x * u) / u == x


@settings(max_examples=60)
@given(unit_polys, st.integers(0, 6))
def test_inverse_series_is_one(u, order):
    inv = ONE / NovikovScalar(u)
    low = u.low + inv.low
    head = truncate_series(inv, inv.low + order)
    prod = head * u
    # the product agrees with 1 through the truncation order
    assert all(prod.coefficient(e) == (1 if e == 0 else 0) for e in range(low, low + order + 1))


@given(polys)
def test_unit_shapes_are_units(a):
    if classify_scalar(NovikovScalar(a)).is_unit_shape:
        assert is_unit(a)
