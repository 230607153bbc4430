"""Exact arithmetic in a simple algebraic number field Q(t).

A field is presented by the monic minimal polynomial of a primitive element
``t``; elements are coordinate tuples in the power basis ``1, t, ..., t^(d-1)``.
Rationals are ``gmpy2.mpq`` when available (an order of magnitude faster than
``fractions.Fraction``), with ``Fraction`` as a drop-in fallback.
"""

import re
from fractions import Fraction
from functools import lru_cache

from .errors import (
    FieldMismatch,
    IotaSquareMismatch,
    ParseError,
    ReducibleMinPoly,
)
from . import linalg

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

MAX_DEGREE = 8
_QT = type(Q(0))


def to_rational(value):
    """Exact rational from int, Fraction, mpq or a string like ``"-3/4"``."""
    if isinstance(value, str):
        s = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
            raise ParseError(f"not a rational literal: {value!r}")
        return Q(Fraction(s))
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return Q(value)


def format_rational(q):
    q = Q(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


class NumberField:
    """The field Q[t]/(minpoly), optionally with a chosen square root of -1."""

    __slots__ = ("minpoly", "degree", "iota", "_reduce", "_key", "zero", "one", "gen")

    def __init__(self, minpoly, iota_coords=None, check=True):
        coeffs = [to_rational(c) for c in minpoly]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise ReducibleMinPoly("minimal polynomial must be monic of degree >= 1")
        d = len(coeffs) - 1
        if d > MAX_DEGREE:
            raise ReducibleMinPoly(f"field degree {d} exceeds the supported maximum {MAX_DEGREE}")
        self.minpoly = tuple(coeffs)
        self.degree = d
        if check:
            _check_irreducible(self.minpoly)
        # t^k for k = d .. 2d-2 in the power basis
        red = []
        cur = [-c for c in self.minpoly[:d]]
        for _ in range(max(d - 1, 0)):
            red.append(tuple(cur))
            top = cur[-1]
            cur = [Q(0)] + cur[:-1]
            if top:
                cur = [a - top * c for a, c in zip(cur, self.minpoly[:d])]
        self._reduce = red
        self.zero = FieldElement(self, (Q(0),) * d)
        self.one = FieldElement(self, (Q(1),) + (Q(0),) * (d - 1))
        if d == 1:
            self.gen = FieldElement(self, (-self.minpoly[0],))
        else:
            self.gen = FieldElement(self, (Q(0), Q(1)) + (Q(0),) * (d - 2))
        self.iota = None
        self._key = (self.minpoly, None)
        if iota_coords is not None:
            iota = self.element(iota_coords)
            if iota * iota != -self.one:
                raise IotaSquareMismatch(f"({iota})^2 != -1 in this field")
            self.iota = iota
        self._key = (self.minpoly, None if self.iota is None else self.iota.coords)

    def __eq__(self, other):
        return self is other or (isinstance(other, NumberField) and self._key == other._key)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        poly = format_poly(self.minpoly, "t")
        if self.iota is None:
            return f"NumberField({poly})"
        return f"NumberField({poly}, iota={self.iota})"

    def element(self, value):
        """Coerce an int, rational, coordinate list, string literal or element."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch("element belongs to a different field")
            return value
        if isinstance(value, str):
            return parse_scalar(value, self)
        if isinstance(value, (list, tuple)):
            coords = [to_rational(v) for v in value]
            if len(coords) > self.degree:
                return self.from_poly(coords)
            coords += [Q(0)] * (self.degree - len(coords))
            return FieldElement(self, tuple(coords))
        return FieldElement(self, (to_rational(value),) + (Q(0),) * (self.degree - 1))

    __call__ = element

    def from_poly(self, coeffs):
        """Reduce a polynomial in t (constant term first) modulo the minpoly."""
        d = self.degree
        c = [to_rational(v) for v in coeffs]
        if d == 1:
            r = Q(0)
            root = -self.minpoly[0]
            for v in reversed(c):
                r = r * root + v
            return FieldElement(self, (r,))
        for k in range(len(c) - 1, d - 1, -1):
            top = c[k]
            if top:
                for m in range(d):
                    c[k - d + m] -= top * self.minpoly[m]
            c[k] = Q(0)
        c = c[:d] + [Q(0)] * (d - len(c))
        return FieldElement(self, tuple(c))

    @property
    def has_iota(self):
        return self.iota is not None

    def to_json(self):
        out = {"minpoly": [format_rational(c) for c in self.minpoly]}
        if self.iota is not None:
            out["iota"] = str(self.iota)
        return out


def field_make(minpoly, iota_coords=None):
    return NumberField(minpoly, iota_coords)


@lru_cache(maxsize=None)
def gaussian_rationals():
    return NumberField([1, 0, 1], [0, 1])


@lru_cache(maxsize=None)
def rationals():
    return NumberField([-1, 1])


def _check_irreducible(coeffs):
    d = len(coeffs) - 1
    # t | minpoly is rejected in every degree: t must be a unit of the field
    if coeffs[0] == 0:
        raise ReducibleMinPoly("minimal polynomial has the rational root 0")
    if d == 1:
        return
    for r in _rational_root_candidates(coeffs):
        if _peval(coeffs, r) == 0:
            raise ReducibleMinPoly(f"minimal polynomial has the rational root {format_rational(r)}")
    if d <= 3:
        return
    import sympy

    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * t**k
               for k, c in enumerate(coeffs))
    if not sympy.Poly(expr, t, domain="QQ").is_irreducible:
        raise ReducibleMinPoly("minimal polynomial factors over Q")


def _peval(coeffs, x):
    r = Q(0)
    for c in reversed(coeffs):
        r = r * x + c
    return r


def _divisors(n):
    n = abs(int(n))
    out = set()
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.add(i)
            out.add(n // i)
        i += 1
    return sorted(out)


def _rational_root_candidates(coeffs):
    den = 1
    for c in coeffs:
        den = den * int(c.denominator) // _gcd(den, int(c.denominator))
    ints = [int(c * den) for c in coeffs]
    lead, const = ints[-1], ints[0]
    for p in _divisors(const):
        for q in _divisors(lead):
            yield Q(p, q)
            yield Q(-p, q)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


class FieldElement:
    """Immutable element of a :class:`NumberField`."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = coords

    # -- coercion helpers
    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("operands live in different fields")
            return other.coords
        if isinstance(other, (int, Fraction, _QT)):
            return (Q(other),) + (Q(0),) * (self.field.degree - 1)
        return None

    def __add__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, oc)))

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, oc)))

    def __rsub__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return FieldElement(self.field, tuple(b - a for a, b in zip(self.coords, oc)))

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("operands live in different fields")
            return FieldElement(self.field, _mul_coords(self.field, self.coords, other.coords))
        if isinstance(other, (int, Fraction, _QT)):
            s = Q(other)
            return FieldElement(self.field, tuple(a * s for a in self.coords))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        s = Q(other)
        if s == 0:
            raise ZeroDivisionError("division by zero in number field")
        return FieldElement(self.field, tuple(a / s for a in self.coords))

    def __rtruediv__(self, other):
        return self.field.element(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self):
        if not self:
            raise ZeroDivisionError("division by zero in number field")
        F = self.field
        d = F.degree
        if d == 1:
            return FieldElement(F, (1 / self.coords[0],))
        # solve (multiplication-by-self matrix) v = 1
        cols = []
        basis = FieldElement(F, (Q(1),) + (Q(0),) * (d - 1))
        for _ in range(d):
            cols.append((basis * self).coords)
            basis = basis * F.gen
        rows = [[cols[j][i] for j in range(d)] for i in range(d)]
        rhs = [Q(1)] + [Q(0)] * (d - 1)
        sol = linalg.solve(rows, rhs, d, Q(0))
        return FieldElement(F, tuple(sol))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return (self.field is other.field or self.field == other.field) and self.coords == other.coords
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        return self.coords == oc

    def __hash__(self):
        if all(c == 0 for c in self.coords[1:]):
            return hash(self.coords[0])
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def is_rational(self):
        return not any(self.coords[1:])

    def rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def __str__(self):
        return format_poly(self.coords, "t")

    def __repr__(self):
        return f"FieldElement({self})"


def _mul_coords(F, x, y):
    d = F.degree
    if d == 1:
        return (x[0] * y[0],)
    prod = [Q(0)] * (2 * d - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                if b:
                    prod[i + j] += a * b
    res = prod[:d]
    for k in range(d, 2 * d - 1):
        c = prod[k]
        if c:
            for m, r in enumerate(F._reduce[k - d]):
                if r:
                    res[m] += c * r
    return tuple(res)


def format_poly(coeffs, var):
    """Render a polynomial (constant term first) in descending powers."""
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Q(coeffs[k])
        if c == 0:
            continue
        neg = c < 0
        a = -c if neg else c
        if k == 0:
            body = format_rational(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{format_rational(a)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts) if parts else "0"


def rational_rank(elems):
    """Dimension of the Q-span of ``elems`` inside their field.

    Returns ``(rank, basis_indices, coeffs)``: basis elements are the first
    independent ones in input order, and ``coeffs[k]`` expresses ``elems[k]``
    as a rational combination of them.
    """
    if not elems:
        raise ValueError("rational_rank needs at least one element")
    d = elems[0].field.degree
    cols = [e.coords for e in elems]
    rows = [[c[i] for c in cols] for i in range(d)]
    R, pivots = linalg.rref(rows, len(elems))
    coeffs = [[R[r][k] for r in range(len(pivots))] for k in range(len(elems))]
    return len(pivots), list(pivots), coeffs


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            while text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        num, name, op = m.groups()
        col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1
        if num is not None:
            out.append(("num", int(num), col))
        elif name is not None:
            out.append(("name", name, col))
        else:
            out.append(("op", "^" if op == "**" else op, col))
        pos = m.end()
    return out


class _Parser:
    """Recursive descent over ``+ - * / ^ ( )`` with pluggable atoms.

    The algebra is supplied by ``ring``: it must provide ``const(int)``,
    ``name(str)``, ``add``, ``sub``, ``mul``, ``neg``, ``div`` and ``pow``.
    """

    def __init__(self, text, ring):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.ring = ring

    def error(self, msg):
        if self.i < len(self.toks):
            col = self.toks[self.i][2]
        else:
            col = len(self.text.rstrip()) + 1
        raise ParseError(f"{msg} at column {col} in {self.text!r}")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            self.error("empty expression")
        v = self.expr()
        if self.i != len(self.toks):
            self.error("unexpected token")
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            v = self.ring.add(v, rhs) if op == "+" else self.ring.sub(v, rhs)
        return v

    def term(self):
        v = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                v = self.ring.mul(v, rhs)
            else:
                try:
                    v = self.ring.div(v, rhs)
                except ZeroDivisionError:
                    self.error("division by zero")
                except ValueError as exc:
                    self.error(str(exc))
        return v

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            v = self.unary()
            return self.ring.neg(v) if op == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, _ = self.take()
            if kind != "num":
                self.i -= 1
                self.error("expected a nonnegative integer exponent")
            v = self.ring.pow(v, val)
        return v

    def atom(self):
        kind, val, _ = self.peek()
        if kind == "num":
            self.take()
            return self.ring.const(val)
        if kind == "name":
            self.take()
            try:
                return self.ring.name(val)
            except KeyError:
                self.i -= 1
                self.error(f"unknown symbol {val!r}")
        if kind == "op" and val == "(":
            self.take()
            v = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return v
        self.error("expected a number, symbol or '('")


class _ScalarRing:
    def __init__(self, field, constants=None):
        self.F = field
        self.constants = constants or {}

    def const(self, k):
        return self.F.element(k)

    def name(self, s):
        if s == "t":
            return self.F.gen
        return self.constants[s]

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    mul = staticmethod(lambda a, b: a * b)
    neg = staticmethod(lambda a: -a)
    div = staticmethod(lambda a, b: a / b)
    pow = staticmethod(lambda a, k: a ** k)


def parse_scalar(text, field, constants=None):
    """Parse a polynomial-in-t literal such as ``"1/2*t^3 - 2*t + 7/3"``.

    Powers of ``t`` beyond the field degree are reduced modulo the minimal
    polynomial.  ``constants`` maps extra names to field elements.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text, _ScalarRing(field, constants)).parse()
