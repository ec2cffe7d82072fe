"""Exact arithmetic in Z[t, t^-1] and in the part of Z((t)) reached by dividing by units.

A ``LaurentPoly`` is an immutable map exponent -> nonzero integer coefficient.
A ``NovikovScalar`` is a fraction of Laurent polynomials whose denominator is a
unit of Z((t)), kept in a canonical form so that equality is syntactic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping, Union

from .errors import DivisionByNonUnit, DivisionByZero, ParseError

__all__ = [
    "LaurentPoly",
    "NovikovScalar",
    "ScalarClass",
    "poly_arith",
    "is_unit",
    "scalar_arith",
    "truncate_series",
    "classify_scalar",
    "parse_poly",
    "parse_scalar",
    "T",
    "ONE",
    "ZERO",
]


class LaurentPoly:
    """Finite sum of integer multiples of powers t^k, k in Z."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[int, int], Iterable[tuple[int, int]], int, None] = None):
        if terms is None:
            items: dict[int, int] = {}
        elif isinstance(terms, int):
            items = {0: terms}
        elif isinstance(terms, Mapping):
            items = dict(terms)
        else:
            items = {}
            for e, c in terms:
                items[e] = items.get(e, 0) + c
        self._terms = tuple(sorted((int(e), int(c)) for e, c in items.items() if c != 0))
        self._hash = None

    @classmethod
    def _from_sorted(cls, terms: tuple) -> "LaurentPoly":
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "LaurentPoly":
        return cls({exponent: coefficient})

    @property
    def terms(self) -> tuple[tuple[int, int], ...]:
        """(exponent, coefficient) pairs in increasing exponent order."""
        return self._terms

    def as_dict(self) -> dict[int, int]:
        return dict(self._terms)

    def coefficient(self, exponent: int) -> int:
        for e, c in self._terms:
            if e == exponent:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def low(self) -> int:
        """Lowest exponent (valuation). Undefined for zero."""
        if not self._terms:
            raise ValueError("zero polynomial has no lowest exponent")
        return self._terms[0][0]

    @property
    def high(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no highest exponent")
        return self._terms[-1][0]

    @property
    def low_coefficient(self) -> int:
        return self._terms[0][1] if self._terms else 0

    def content(self) -> int:
        g = 0
        for _, c in self._terms:
            g = gcd(g, c)
        return g

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by t^k."""
        if k == 0:
            return self
        return LaurentPoly._from_sorted(tuple((e + k, c) for e, c in self._terms))

    def scale(self, c: int) -> "LaurentPoly":
        if c == 0:
            return ZERO_POLY
        return LaurentPoly._from_sorted(tuple((e, c * v) for e, v in self._terms))

    def __neg__(self) -> "LaurentPoly":
        return self.scale(-1)

    def __add__(self, other) -> "LaurentPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return ZERO_POLY
        if len(other._terms) == 1:
            (k, c), = other._terms
            return self.shift(k).scale(c)
        acc: dict[int, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self._terms) == 1 and abs(self._terms[0][1]) == 1:
                e, c = self._terms[0]
                return LaurentPoly({e * n: c ** -n})
            raise DivisionByNonUnit(f"negative power of non-monomial {self}")
        out = ONE_POLY
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, int):
            return self._terms == LaurentPoly(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __call__(self, value):
        """Evaluate at a number (Fraction, int, ...)."""
        total = 0
        for e, c in self._terms:
            total += c * value ** e
        return total

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        return format_terms(self._terms)


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly(x)
    return NotImplemented


ZERO_POLY = LaurentPoly()
ONE_POLY = LaurentPoly({0: 1})


def _term_str(e: int, c: int) -> str:
    if e == 0:
        return str(c)
    power = "t" if e == 1 else f"t^{e}"
    if c == 1:
        return power
    if c == -1:
        return "-" + power
    return f"{c}*{power}"


def format_terms(terms: Iterable[tuple[int, int]]) -> str:
    out = ""
    for e, c in terms:
        if not out:
            out = _term_str(e, c)
        elif c < 0:
            out += " - " + _term_str(e, -c)
        else:
            out += " + " + _term_str(e, c)
    return out or "0"


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
    (?:
        (?P<coef>\d+)\s*(?:\*?\s*(?P<t1>t)(?:\s*\^\s*(?P<e1>\(?\s*-?\d+\s*\)?))?)?
      | (?P<t2>t)(?:\s*\^\s*(?P<e2>\(?\s*-?\d+\s*\)?))?
    )\s*""",
    re.VERBOSE,
)


def parse_poly(text: str) -> LaurentPoly:
    """Parse the rendering produced by ``str(LaurentPoly)`` (whitespace-insensitive)."""
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    pos, acc, first = 0, {}, True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group("coef") is None and m.group("t2") is None):
            raise ParseError(f"cannot parse polynomial {text!r} at offset {pos}")
        if not first and m.group("sign") is None:
            raise ParseError(f"missing operator in {text!r} at offset {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("coef") is not None:
            coef = int(m.group("coef"))
            exp = 0
            if m.group("t1"):
                exp = int(m.group("e1").strip("() ")) if m.group("e1") else 1
        else:
            coef = 1
            exp = int(m.group("e2").strip("() ")) if m.group("e2") else 1
        acc[exp] = acc.get(exp, 0) + sign * coef
        pos, first = m.end(), False
    return LaurentPoly(acc)


def poly_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def is_unit(p: LaurentPoly) -> bool:
    """True iff p is invertible in Z((t)): nonzero with lowest coefficient +-1."""
    return bool(p) and abs(p.low_coefficient) == 1


# -- integer polynomial helpers (ascending coefficient lists, no trailing zeros) --

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _primitive(a: list[int]) -> list[int]:
    g = 0
    for c in a:
        g = gcd(g, c)
    if g > 1:
        a = [c // g for c in a]
    return a


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    lb, db = b[-1], len(b) - 1
    while len(a) - 1 >= db and a:
        la, shift = a[-1], len(a) - 1 - db
        a = [c * lb for c in a]
        for i, c in enumerate(b):
            a[i + shift] -= la * c
        _trim(a)
    return a


def _poly_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd over Z[t] (content ignored), normalized with positive leading term."""
    a, b = _primitive(list(a)), _primitive(list(b))
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _pseudo_rem(a, b)
        a, b = b, _primitive(r)
    if a and a[-1] < 0:
        a = [-c for c in a]
    return a


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 1)
    while a and len(a) - 1 >= db:
        shift = len(a) - 1 - db
        c, rem = divmod(a[-1], b[-1])
        if rem:
            raise ArithmeticError("inexact polynomial division")
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] -= c * bc
        _trim(a)
    if a:
        raise ArithmeticError("inexact polynomial division")
    return q


def _to_dense(p: LaurentPoly) -> tuple[int, list[int]]:
    low = p.low
    dense = [0] * (p.high - low + 1)
    for e, c in p.terms:
        dense[e - low] = c
    return low, dense


def _from_dense(low: int, dense: list[int]) -> LaurentPoly:
    return LaurentPoly._from_sorted(tuple((low + i, c) for i, c in enumerate(dense) if c))


class NovikovScalar:
    """Element of Z((t)) stored exactly as numerator/denominator with a unit denominator.

    Canonical form: the denominator has lowest exponent 0 and lowest coefficient +1,
    and shares no factor of positive degree with the numerator. Zero is 0/1.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Union[LaurentPoly, int] = 0, den: Union[LaurentPoly, int] = 1):
        num, den = _as_poly(num), _as_poly(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("NovikovScalar takes LaurentPoly or int arguments")
        if not den:
            raise DivisionByZero("zero denominator")
        if not is_unit(den):
            raise DivisionByNonUnit(f"denominator {den} is not a unit of Z((t))")
        self.num, self.den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly) -> "NovikovScalar":
        s = object.__new__(cls)
        s.num, s.den, s._hash = num, den, None
        return s

    @classmethod
    def coerce(cls, x) -> "NovikovScalar":
        if isinstance(x, NovikovScalar):
            return x
        if isinstance(x, LaurentPoly):
            return cls._raw(x, ONE_POLY)
        if isinstance(x, int):
            return cls._raw(LaurentPoly(x), ONE_POLY)
        raise TypeError(f"cannot coerce {type(x).__name__} to NovikovScalar")

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den == ONE_POLY

    def as_poly(self) -> LaurentPoly:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.num

    @property
    def low(self) -> int:
        """Lowest exponent of the series expansion (canonical denominators start at t^0)."""
        return self.num.low

    def is_unit(self) -> bool:
        return bool(self.num) and abs(self.num.low_coefficient) == 1

    def __neg__(self) -> "NovikovScalar":
        return NovikovScalar._raw(-self.num, self.den)

    def __add__(self, other) -> "NovikovScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if self.den is ONE_POLY or self.den == ONE_POLY:
                return NovikovScalar._raw(self.num + other.num, ONE_POLY)
            return _make(self.num + other.num, self.den)
        return _make(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "NovikovScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "NovikovScalar":
        return _as_scalar(other) - self

    def __mul__(self, other) -> "NovikovScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        if self.den == ONE_POLY and other.den == ONE_POLY:
            return NovikovScalar._raw(self.num * other.num, ONE_POLY)
        return _make(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "NovikovScalar":
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise DivisionByZero(f"division of {self} by zero")
        if not is_unit(other.num):
            raise DivisionByNonUnit(f"{other} is not a unit of Z((t))")
        if not self.num:
            return ZERO
        return _make(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "NovikovScalar":
        return _as_scalar(other) / self

    def inverse(self) -> "NovikovScalar":
        return ONE / self

    def __pow__(self, n: int) -> "NovikovScalar":
        base = self if n >= 0 else self.inverse()
        out = ONE
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other) -> bool:
        other = _as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def series(self, order: int) -> LaurentPoly:
        return truncate_series(self, order)

    def render(self, terms: int = 8) -> str:
        """Exact form for polynomials, otherwise ``terms`` series terms plus an O(.) tail."""
        if self.is_polynomial():
            return str(self.num)
        order = self.low + terms - 1
        head = truncate_series(self, order)
        return f"{head} + O(t^{order + 1})"

    def __repr__(self) -> str:
        return f"NovikovScalar({self})"

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.num)
        num = str(self.num)
        if len(self.num) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"


def _as_scalar(x):
    if isinstance(x, NovikovScalar):
        return x
    if isinstance(x, LaurentPoly):
        return NovikovScalar._raw(x, ONE_POLY)
    if isinstance(x, int):
        return NovikovScalar._raw(LaurentPoly(x), ONE_POLY)
    return NotImplemented


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if not num:
        return ZERO_POLY, ONE_POLY
    shift = den.low
    if shift:
        num, den = num.shift(-shift), den.shift(-shift)
    if len(den) > 1:
        nlow, ndense = _to_dense(num)
        _, ddense = _to_dense(den)
        g = _poly_gcd(ndense, ddense)
        if len(g) > 1:
            num = _from_dense(nlow, _exact_div(ndense, g))
            den = _from_dense(0, _exact_div(ddense, g))
    if den.low_coefficient < 0:
        num, den = -num, -den
    if den == ONE_POLY:
        den = ONE_POLY
    return num, den


def _make(num: LaurentPoly, den: LaurentPoly) -> NovikovScalar:
    n, d = _canonical(num, den)
    return NovikovScalar._raw(n, d)


ZERO = NovikovScalar._raw(ZERO_POLY, ONE_POLY)
ONE = NovikovScalar._raw(ONE_POLY, ONE_POLY)
T = NovikovScalar._raw(LaurentPoly({1: 1}), ONE_POLY)


def scalar_arith(a: NovikovScalar, b: NovikovScalar, op: str) -> NovikovScalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def truncate_series(s: NovikovScalar, order: int) -> LaurentPoly:
    """Terms of the Z((t)) expansion of s with exponent <= order (ascending long division)."""
    s = NovikovScalar.coerce(s)
    if not s.num:
        return ZERO_POLY
    if s.den == ONE_POLY:
        return LaurentPoly._from_sorted(tuple(tc for tc in s.num.terms if tc[0] <= order))
    # canonical denominators are 1 + (higher terms)
    den = s.den.terms
    rem = dict(s.num.terms)
    out = []
    e = s.num.low
    while e <= order:
        c = rem.pop(e, 0)
        if c:
            out.append((e, c))
            for de, dc in den[1:]:
                k = e + de
                v = rem.get(k, 0) - c * dc
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        e += 1
    return LaurentPoly._from_sorted(tuple(out))


@dataclass(frozen=True)
class ScalarClass:
    """Shape of an exact value: zero, +-t^l, t^l1 - t^l2, or anything else."""

    kind: str  # "zero" | "monomial" | "binomial" | "other"
    sign: int = 0
    exponent: int = 0
    plus_exponent: int = 0
    minus_exponent: int = 0

    @property
    def is_monomial(self) -> bool:
        return self.kind == "monomial"

    @property
    def is_binomial(self) -> bool:
        return self.kind == "binomial"

    @property
    def is_unit_shape(self) -> bool:
        return self.kind in ("monomial", "binomial")

    @property
    def gap(self) -> int:
        """Exponent spread of a binomial."""
        return abs(self.plus_exponent - self.minus_exponent)

    def __str__(self) -> str:
        if self.kind == "monomial":
            return f"Monomial({'+' if self.sign > 0 else '-'}, {self.exponent})"
        if self.kind == "binomial":
            return f"Binomial({self.plus_exponent}, {self.minus_exponent})"
        return self.kind.capitalize()


def classify_scalar(p) -> ScalarClass:
    p = NovikovScalar.coerce(p)
    if not p.num:
        return ScalarClass("zero")
    if not p.is_polynomial():
        return ScalarClass("other")
    terms = p.num.terms
    if len(terms) == 1 and abs(terms[0][1]) == 1:
        return ScalarClass("monomial", sign=terms[0][1], exponent=terms[0][0])
    if len(terms) == 2 and {terms[0][1], terms[1][1]} == {1, -1}:
        plus = terms[0][0] if terms[0][1] == 1 else terms[1][0]
        minus = terms[1][0] if terms[0][1] == 1 else terms[0][0]
        return ScalarClass("binomial", plus_exponent=plus, minus_exponent=minus)
    return ScalarClass("other")


def parse_scalar(text: str) -> NovikovScalar:
    """Parse ``p`` or ``(p)/(q)`` with p, q Laurent polynomials."""
    s = text.strip()
    depth, split = 0, None
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            split = i
    if split is None:
        return NovikovScalar.coerce(parse_poly(s.strip("() ") if s.startswith("(") and s.endswith(")") else s))
    num, den = s[:split].strip(), s[split + 1:].strip()
    unwrap = lambda x: x[1:-1] if x.startswith("(") and x.endswith(")") else x
    try:
        return NovikovScalar(parse_poly(unwrap(num)), parse_poly(unwrap(den)))
    except (DivisionByZero, DivisionByNonUnit) as exc:
        raise ParseError(str(exc)) from exc
