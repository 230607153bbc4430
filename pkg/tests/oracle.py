"""Independent sympy oracle for exact cross-checks.

Field elements are embedded into sympy through an explicit generator value
(``t -> I`` for Q(i), ``t -> I + sqrt(2)`` for Q(i, sqrt2)); series become
polynomials in ``x1..xn``.  Everything stays exact.
"""

import sympy

from dulac.scalars import NumberField, gaussian_rationals
from dulac.series import TruncatedSeries, VectorFieldJet, parse_series

I, SQRT2 = sympy.I, sympy.sqrt(2)

QI2_MINPOLY = [9, 0, -2, 0, 1]
QI2_SQRT2 = "(5*t - t^3)/6"


def qi2():
    return NumberField(QI2_MINPOLY, ["0", "1/6", "0", "1/6"])


GEN_VALUE = {
    (1, 0, 1): I,
    (9, 0, -2, 0, 1): I + SQRT2,
    (-1, 1): sympy.Integer(1),
    (-2, 0, 1): SQRT2,
}


def gen_value(field):
    return GEN_VALUE[tuple(int(c) for c in field.minpoly)]


def sym_scalar(c):
    tv = gen_value(c.field)
    return sympy.expand(sum(sympy.Rational(int(q.numerator), int(q.denominator)) * tv**k
                            for k, q in enumerate(c.coords)))


def xs(n):
    return sympy.symbols(f"x1:{n + 1}")


def sym_series(s):
    x = xs(s.n)
    out = sympy.Integer(0)
    for a, c in s.terms.items():
        mono = sympy.Integer(1)
        for v, e in zip(x, a):
            mono *= v**e
        out += sym_scalar(c) * mono
    return sympy.expand(out)


def sym_field(X):
    return [sym_series(c) for c in X]


def sym_truncate(expr, n, cap):
    """Drop every monomial of total degree above ``cap``."""
    x = xs(n)
    poly = sympy.Poly(sympy.expand(expr), *x)
    keep = [sympy.Mul(c, *[v**e for v, e in zip(x, m)]) for m, c in poly.terms() if sum(m) <= cap]
    return sympy.expand(sympy.Add(*keep))


def sym_equal(a, b):
    return sympy.expand(sympy.radsimp(sympy.expand(a - b))) == 0


def sym_derive(Xs, f, n):
    x = xs(n)
    return sympy.expand(sum(c * sympy.diff(f, v) for c, v in zip(Xs, x)))


def sym_bracket(Xs, Ys, n):
    return [sympy.expand(sym_derive(Xs, Y, n) - sym_derive(Ys, Xc, n)) for Xc, Y in zip(Xs, Ys)]


def series(text, n=2, field=None, cap=None):
    return parse_series(text, field or gaussian_rationals(), n, cap)


def vfield(comps, field=None, cap=None):
    F = field or gaussian_rationals()
    n = len(comps)
    return VectorFieldJet([parse_series(c, F, n, cap) for c in comps], cap)
