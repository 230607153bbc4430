"""Truncated multivariate power series, vector-field jets and coordinate changes.

Every value carries its truncation ``cap``: the highest degree through which
its coefficients are known exactly.  ``cap=None`` marks an exact polynomial.
Results of arithmetic carry the smallest cap of their operands unless an
operation can prove more (see :meth:`TruncatedSeries.mul`).

Exponent vectors are plain tuples of ints.  Terms are kept sparse, never store
zero coefficients and iterate in graded-lex order (degree ascending, then
``x1 > x2 > ...``) when rendered.
"""

from itertools import combinations_with_replacement

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    NonInvertibleLinearPart,
    NonvanishingAtOrigin,
    NotDivisible,
    ParseError,
    ValidationError,
)
from . import linalg
from .scalars import FieldElement, _Parser


def _min_cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def grlex_key(a):
    return (sum(a), tuple(-e for e in a))


def monomials(n, degree):
    """All exponent vectors of total ``degree`` in graded-lex order."""
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        a = [0] * n
        for i in combo:
            a[i] += 1
        out.append(tuple(a))
    out.sort(key=grlex_key)
    return out


def format_monomial(a):
    parts = []
    for i, e in enumerate(a):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts)


class TruncatedSeries:
    """A power series in ``n`` variables over a number field, known through ``cap``."""

    __slots__ = ("field", "n", "cap", "terms")

    def __init__(self, field, n, terms=None, cap=None):
        self.field = field
        self.n = n
        self.cap = cap
        t = {}
        if terms:
            for a, c in terms.items():
                if cap is not None and sum(a) > cap:
                    continue
                if not isinstance(c, FieldElement):
                    c = field.element(c)
                if c:
                    t[tuple(a)] = c
        self.terms = t

    @classmethod
    def _raw(cls, field, n, terms, cap):
        s = cls.__new__(cls)
        s.field = field
        s.n = n
        s.cap = cap
        s.terms = terms
        return s

    # -- constructors
    @classmethod
    def zero(cls, field, n, cap=None):
        return cls._raw(field, n, {}, cap)

    @classmethod
    def constant(cls, field, n, c, cap=None):
        return cls(field, n, {(0,) * n: c}, cap)

    @classmethod
    def variable(cls, field, n, j, cap=None):
        """The coordinate function ``x_{j+1}`` (``j`` is 0-based)."""
        a = [0] * n
        a[j] = 1
        return cls(field, n, {tuple(a): field.one}, cap)

    @classmethod
    def monomial(cls, field, a, c=1, cap=None):
        return cls(field, len(a), {tuple(a): c}, cap)

    # -- basic queries
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def coeff(self, a):
        return self.terms.get(tuple(a), self.field.zero)

    def order(self):
        """Lowest degree of a nonzero term, or None for the zero series."""
        if not self.terms:
            return None
        return min(sum(a) for a in self.terms)

    def degree(self):
        if not self.terms:
            return None
        return max(sum(a) for a in self.terms)

    def constant_term(self):
        return self.coeff((0,) * self.n)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def homogeneous(self, k):
        """The degree-``k`` slice, as an exact polynomial."""
        return TruncatedSeries._raw(
            self.field, self.n, {a: c for a, c in self.terms.items() if sum(a) == k}, None)

    def truncate(self, cap):
        cap = _min_cap(self.cap, cap)
        if cap is None:
            return self
        return TruncatedSeries._raw(
            self.field, self.n, {a: c for a, c in self.terms.items() if sum(a) <= cap}, cap)

    def with_cap(self, cap):
        """Declare a (possibly larger) cap, e.g. when the series is known to be exact."""
        return TruncatedSeries._raw(
            self.field, self.n,
            {a: c for a, c in self.terms.items() if cap is None or sum(a) <= cap}, cap)

    def agrees_with(self, other, through):
        """True when both series have equal coefficients in degrees ``<= through``."""
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(self.coeff(a) == other.coeff(a) for a in keys if sum(a) <= through)

    def first_difference(self, other):
        """Lowest degree where the two series differ (within both caps), or None."""
        self._check(other)
        cap = _min_cap(self.cap, other.cap)
        degs = [sum(a) for a in set(self.terms) | set(other.terms)
                if (cap is None or sum(a) <= cap) and self.coeff(a) != other.coeff(a)]
        return min(degs) if degs else None

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected TruncatedSeries, got {type(other).__name__}")
        if other.n != self.n:
            raise DimensionMismatch(f"series in {self.n} and {other.n} variables")
        if other.field is not self.field and other.field != self.field:
            raise FieldMismatch("series over different fields")

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        if isinstance(other, FieldElement) or isinstance(other, int) or hasattr(other, "denominator"):
            return TruncatedSeries.constant(self.field, self.n, other)
        return None

    # -- arithmetic
    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.n == other.n and self.cap == other.cap and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.cap, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        cap = _min_cap(self.cap, other.cap)
        out = dict(self.terms)
        for a, c in other.terms.items():
            v = out.get(a)
            if v is None:
                out[a] = c
            else:
                v = v + c
                if v:
                    out[a] = v
                else:
                    del out[a]
        if cap is not None:
            out = {a: c for a, c in out.items() if sum(a) <= cap}
        return TruncatedSeries._raw(self.field, self.n, out, cap)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self.field, self.n, {a: -c for a, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self.field.element(c)
        if not c:
            return TruncatedSeries.zero(self.field, self.n, self.cap)
        return TruncatedSeries._raw(self.field, self.n, {a: v * c for a, v in self.terms.items()}, self.cap)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.mul(other)
        if isinstance(other, (FieldElement, int)) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        return self * other

    def mul(self, other, cap="min"):
        """Product truncated at ``cap``.

        The default follows the min-cap rule.  ``cap="exact"`` uses the sharper
        bound ``min(cap_a + ord_b, cap_b + ord_a)`` through which the product
        is still exactly determined; an explicit integer truncates there.
        """
        self._check(other)
        if cap == "min":
            cap = _min_cap(self.cap, other.cap)
        elif cap == "exact":
            oa, ob = self.order(), other.order()
            if oa is None or ob is None:
                cap = _min_cap(self.cap, other.cap)
            else:
                ca = None if self.cap is None else self.cap + ob
                cb = None if other.cap is None else other.cap + oa
                cap = _min_cap(ca, cb)
        return TruncatedSeries._raw(self.field, self.n, _mul_terms(self.terms, other.terms, cap), cap)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = TruncatedSeries.constant(self.field, self.n, 1, self.cap)
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base)
            k >>= 1
        return result

    def diff(self, j):
        """Partial derivative in ``x_{j+1}``; the cap drops by one."""
        out = {}
        for a, c in self.terms.items():
            e = a[j]
            if e:
                b = a[:j] + (e - 1,) + a[j + 1:]
                out[b] = c * e
        cap = None if self.cap is None else self.cap - 1
        return TruncatedSeries._raw(self.field, self.n, out, cap)

    def inverse(self, cap=None):
        """Multiplicative inverse of a unit (nonzero constant term)."""
        c0 = self.constant_term()
        if not c0:
            raise NotDivisible("only series with nonzero constant term are invertible")
        cap = _min_cap(self.cap, cap)
        if cap is None:
            if self.degree() == 0:
                return TruncatedSeries.constant(self.field, self.n, c0.inverse())
            raise ValueError("inverse of a non-constant polynomial needs a cap")
        inv0 = c0.inverse()
        w = (self.scale(inv0) - 1).truncate(cap)  # u = c0 (1 + w)
        result = TruncatedSeries.constant(self.field, self.n, 1, cap)
        power = result
        for _ in range(cap):
            power = power.mul(-w)
            if not power:
                break
            result = result + power
        return result.scale(inv0)

    def divide(self, other):
        """Exact quotient ``q`` with ``q * other == self`` through the known degrees.

        ``other`` may have positive order ``r``; the quotient is then known
        through ``cap - r``.  Raises :class:`NotDivisible` when no such series
        exists, reporting the degree where division first fails.
        """
        self._check(other)
        r = other.order()
        if r is None:
            raise NotDivisible("division by the zero series")
        cap = _min_cap(self.cap, other.cap)
        if cap is None:
            return _poly_divide(self, other)
        qcap = cap - r
        if qcap < 0:
            return TruncatedSeries.zero(self.field, self.n, qcap)
        lead = other.homogeneous(r)
        # q^(k) * lead = [self - q_{<k} * other]^(k+r), solved slice by slice
        q = {}
        for k in range(0, qcap + 1):
            rest = {a: c for a, c in self.terms.items() if sum(a) == k + r}
            if q:
                for a, c in _mul_terms(q, other.terms, k + r).items():
                    if sum(a) == k + r:
                        v = rest.get(a, self.field.zero) - c
                        if v:
                            rest[a] = v
                        else:
                            rest.pop(a, None)
            if not rest:
                continue
            quot, rem = _divide_homogeneous(rest, lead.terms)
            if rem:
                err = NotDivisible(f"not divisible at degree {k + r}")
                err.degree = k + r
                raise err
            q.update(quot)
        return TruncatedSeries._raw(self.field, self.n, q, qcap)

    def evaluate(self, point):
        """Value of the (truncated) polynomial at a point of K^n."""
        if len(point) != self.n:
            raise DimensionMismatch("point has the wrong dimension")
        point = [self.field.element(p) for p in point]
        total = self.field.zero
        powers = [dict() for _ in range(self.n)]
        for a, c in self.terms.items():
            v = c
            for i, e in enumerate(a):
                if e:
                    pw = powers[i].get(e)
                    if pw is None:
                        pw = point[i] ** e
                        powers[i][e] = pw
                    v = v * pw
            total = total + v
        return total

    # -- rendering
    def __str__(self):
        return render_series(self)

    def __repr__(self):
        return f"TruncatedSeries({self}, cap={self.cap})"


def _mul_terms(ta, tb, cap):
    if not ta or not tb:
        return {}
    lb = sorted(((sum(b), b, c) for b, c in tb.items()), key=lambda x: x[0])
    out = {}
    for a, ca in ta.items():
        da = sum(a)
        lim = None if cap is None else cap - da
        if lim is not None and lim < 0:
            continue
        for db, b, cb in lb:
            if lim is not None and db > lim:
                break
            key = tuple([x + y for x, y in zip(a, b)])
            v = ca * cb
            old = out.get(key)
            out[key] = v if old is None else old + v
    return {a: c for a, c in out.items() if c}


def _divide_homogeneous(num, den):
    """Multivariate division of homogeneous polynomials by a single divisor.

    Returns ``(quotient, remainder)``; the remainder is empty iff ``den``
    divides ``num`` (one divisor, so the leading-term reduction is decisive).
    """
    lead_exp = min(den, key=grlex_key)
    lead_c = den[lead_exp]
    inv = lead_c.inverse()
    rem = dict(num)
    quot = {}
    out_rem = {}
    while rem:
        a = min(rem, key=grlex_key)
        c = rem[a]
        if all(x >= y for x, y in zip(a, lead_exp)):
            shift = tuple(x - y for x, y in zip(a, lead_exp))
            f = c * inv
            quot[shift] = quot.get(shift, f - f) + f
            for b, cb in den.items():
                key = tuple(x + y for x, y in zip(shift, b))
                v = rem.get(key)
                v = -f * cb if v is None else v - f * cb
                if v:
                    rem[key] = v
                else:
                    rem.pop(key, None)
        else:
            out_rem[a] = c
            del rem[a]
    return {a: c for a, c in quot.items() if c}, out_rem


def _poly_divide(num, den):
    """Exact polynomial division (both caps None)."""
    quot = {}
    rem = dict(num.terms)
    order = lambda a: (sum(a), a)  # noqa: E731  graded lex, x1 > x2 > ...
    lead_exp = max(den.terms, key=order)
    inv = den.terms[lead_exp].inverse()
    while rem:
        a = max(rem, key=order)
        if not all(x >= y for x, y in zip(a, lead_exp)):
            raise NotDivisible("polynomial division leaves a remainder")
        shift = tuple(x - y for x, y in zip(a, lead_exp))
        f = rem[a] * inv
        quot[shift] = f
        for b, cb in den.terms.items():
            key = tuple(x + y for x, y in zip(shift, b))
            v = rem.get(key)
            v = -f * cb if v is None else v - f * cb
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
    return TruncatedSeries._raw(num.field, num.n, quot, None)


def series_mul(a, b):
    return a.mul(b)


# ------------------------------------------------------------ vector fields

class VectorFieldJet:
    """An ``n``-component formal vector field ``sum_j X_j d/dx_j``."""

    __slots__ = ("components", "field", "n", "cap")

    def __init__(self, components, cap="auto"):
        comps = tuple(components)
        if not comps:
            raise DimensionMismatch("a vector field needs at least one component")
        n = comps[0].n
        field = comps[0].field
        for c in comps:
            if c.n != n:
                raise DimensionMismatch("components have different numbers of variables")
            if c.field != field:
                raise FieldMismatch("components over different fields")
        if len(comps) != n:
            raise DimensionMismatch(f"{len(comps)} components for {n} variables")
        if cap == "auto":
            cap = None
            for c in comps:
                cap = _min_cap(cap, c.cap)
        comps = tuple(c if c.cap == cap else c.with_cap(cap) for c in comps)
        self.components = comps
        self.field = field
        self.n = n
        self.cap = cap

    @classmethod
    def zero(cls, field, n, cap=None):
        return cls([TruncatedSeries.zero(field, n, cap) for _ in range(n)], cap)

    @classmethod
    def from_terms(cls, field, n, terms, cap=None):
        """Build from ``(exponents, component, coeff)`` triples, component 0-based."""
        comps = [dict() for _ in range(n)]
        for a, j, c in terms:
            c = field.element(c)
            comps[j][tuple(a)] = comps[j].get(tuple(a), field.zero) + c
        return cls([TruncatedSeries(field, n, t, cap) for t in comps], cap)

    @classmethod
    def linear(cls, field, matrix, cap=None):
        """The linear field ``x' = A x`` for an ``n x n`` matrix ``A``."""
        n = len(matrix)
        terms = []
        for j, row in enumerate(matrix):
            for k, v in enumerate(row):
                a = [0] * n
                a[k] = 1
                terms.append((a, j, v))
        return cls.from_terms(field, n, terms, cap)

    @classmethod
    def diagonal(cls, field, values, cap=None):
        n = len(values)
        return cls.linear(field, [[values[j] if j == k else 0 for k in range(n)] for j in range(n)], cap)

    def __getitem__(self, j):
        return self.components[j]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, VectorFieldJet):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __bool__(self):
        return any(self.components)

    def is_zero(self):
        return not any(self.components)

    def _check(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"vector fields in {self.n} and {other.n} variables")

    def __add__(self, other):
        self._check(other)
        return VectorFieldJet([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check(other)
        return VectorFieldJet([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return VectorFieldJet([-a for a in self], self.cap)

    def scale(self, c):
        return VectorFieldJet([a.scale(c) for a in self], self.cap)

    def multiply(self, f, cap="min"):
        """Pointwise product ``f * X`` with a scalar function."""
        return VectorFieldJet([f.mul(a, cap) for a in self])

    def homogeneous(self, k):
        return VectorFieldJet([a.homogeneous(k) for a in self], None)

    def truncate(self, cap):
        return VectorFieldJet([a.truncate(cap) for a in self])

    def with_cap(self, cap):
        return VectorFieldJet([a.with_cap(cap) for a in self], cap)

    def order(self):
        orders = [c.order() for c in self if c]
        return min(orders) if orders else None

    def degree(self):
        degs = [c.degree() for c in self if c]
        return max(degs) if degs else None

    def vanishes_at_origin(self):
        return all(not c.constant_term() for c in self)

    def linear_matrix(self):
        """The matrix ``A`` of the degree-1 slice, ``A[j][k]`` = coeff of ``x_k`` in ``X_j``."""
        rows = []
        for c in self:
            row = []
            for k in range(self.n):
                a = [0] * self.n
                a[k] = 1
                row.append(c.coeff(a))
            rows.append(row)
        return rows

    def terms(self):
        """``(exponents, component, coeff)`` triples in canonical order."""
        out = []
        for j, c in enumerate(self):
            for a, v in c.terms.items():
                out.append((a, j, v))
        out.sort(key=lambda t: (grlex_key(t[0]), t[1]))
        return out

    def agrees_with(self, other, through):
        self._check(other)
        return all(a.agrees_with(b, through) for a, b in zip(self, other))

    def first_difference(self, other):
        self._check(other)
        degs = [d for d in (a.first_difference(b) for a, b in zip(self, other)) if d is not None]
        return min(degs) if degs else None

    def evaluate(self, point):
        return [c.evaluate(point) for c in self]

    def __call__(self, f):
        return apply_derivation(self, f)

    def __str__(self):
        return render_vector_field(self)

    def __repr__(self):
        return f"VectorFieldJet({self}, cap={self.cap})"


def apply_derivation(X, f):
    """``X(f) = sum_j X_j * df/dx_j``.

    When ``X`` vanishes at the origin the result is exact through
    ``min(cap_X, cap_f)``; otherwise one degree of ``f`` is lost.
    """
    if not isinstance(f, TruncatedSeries):
        raise TypeError("apply_derivation expects a TruncatedSeries")
    if X.n != f.n:
        raise DimensionMismatch(f"field in {X.n} variables applied to a series in {f.n}")
    loss = 0 if X.vanishes_at_origin() else 1
    fcap = None if f.cap is None else f.cap - loss
    cap = _min_cap(X.cap, fcap)
    out = {}
    n = f.n
    for j in range(n):
        Xj = X.components[j].terms
        if not Xj:
            continue
        dj = {}
        for a, c in f.terms.items():
            e = a[j]
            if e:
                dj[a[:j] + (e - 1,) + a[j + 1:]] = c * e
        if not dj:
            continue
        for a, c in _mul_terms(Xj, dj, cap).items():
            old = out.get(a)
            out[a] = c if old is None else old + c
    return TruncatedSeries._raw(f.field, n, {a: c for a, c in out.items() if c}, cap)


def lie_bracket(X, Y):
    """``[X, Y]_j = X(Y_j) - Y(X_j)``."""
    X._check(Y)
    return VectorFieldJet([apply_derivation(X, Y[j]) - apply_derivation(Y, X[j]) for j in range(X.n)])


# ------------------------------------------------------- coordinate changes

class CoordinateChange:
    """New coordinates written as series in the old ones: ``y_j = phi_j(x)``."""

    __slots__ = ("components", "field", "n", "cap", "_inverse", "_linear")

    def __init__(self, components, cap="auto", check=True):
        comps = tuple(components)
        n = len(comps)
        if any(c.n != n for c in comps):
            raise DimensionMismatch("a coordinate change needs n components in n variables")
        if cap == "auto":
            cap = None
            for c in comps:
                cap = _min_cap(cap, c.cap)
        self.components = tuple(c.with_cap(cap) if c.cap != cap else c for c in comps)
        self.field = comps[0].field
        self.n = n
        self.cap = cap
        self._inverse = None
        self._linear = None
        if check:
            if any(c.constant_term() for c in comps):
                raise NonvanishingAtOrigin("coordinate change must fix the origin")
            lin = self.linear_matrix()
            if linalg.rank(lin) < n:
                raise NonInvertibleLinearPart("linear part of the coordinate change is singular")

    @classmethod
    def identity(cls, field, n, cap=None):
        return cls([TruncatedSeries.variable(field, n, j, cap) for j in range(n)], cap, check=False)

    def linear_matrix(self):
        if self._linear is None:
            rows = []
            for c in self.components:
                row = []
                for k in range(self.n):
                    a = [0] * self.n
                    a[k] = 1
                    row.append(c.coeff(a))
                rows.append(row)
            self._linear = rows
        return self._linear

    def __getitem__(self, j):
        return self.components[j]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        if not isinstance(other, CoordinateChange):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def is_identity(self, through=None):
        ident = CoordinateChange.identity(self.field, self.n, self.cap)
        if through is None:
            return self.components == ident.components
        return all(a.agrees_with(b, through) for a, b in zip(self, ident))

    def compose(self, inner):
        """``self o inner``: first apply ``inner``, then ``self``."""
        sub = _Substituter(inner)
        return CoordinateChange([sub(c) for c in self.components], check=False)

    def inverse(self):
        if self._inverse is None:
            inv = invert_change(self)
            if inv._inverse is None and self.cap is not None:
                inv._inverse = self.truncate(self.cap)
            self._inverse = inv
        return self._inverse

    def truncate(self, cap):
        return CoordinateChange([c.truncate(cap) for c in self.components], check=False)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    def __repr__(self):
        return f"CoordinateChange{self}"


class _Substituter:
    """Evaluate ``f o phi`` for many ``f`` with a shared monomial cache."""

    def __init__(self, change, cap="auto"):
        self.change = change
        self.cap = change.cap if cap == "auto" else cap
        self.field = change.field
        n = change.n
        self.cache = {(0,) * n: TruncatedSeries.constant(self.field, n, 1, self.cap)}

    def monomial(self, a):
        got = self.cache.get(a)
        if got is not None:
            return got
        j = max(i for i, e in enumerate(a) if e)
        b = a[:j] + (a[j] - 1,) + a[j + 1:]
        prev = self.monomial(b)
        res = TruncatedSeries._raw(
            self.field, self.change.n,
            _mul_terms(prev.terms, self.change.components[j].terms, self.cap), self.cap)
        self.cache[a] = res
        return res

    def __call__(self, f):
        if f.n != self.change.n:
            raise DimensionMismatch("series and coordinate change differ in dimension")
        cap = _min_cap(f.cap, self.cap)
        out = {}
        for a, c in f.terms.items():
            if cap is not None and sum(a) > cap:
                continue
            for b, v in self.monomial(a).terms.items():
                if cap is not None and sum(b) > cap:
                    continue
                w = v * c
                old = out.get(b)
                out[b] = w if old is None else old + w
        return TruncatedSeries._raw(f.field, f.n, {a: c for a, c in out.items() if c}, cap)


def substitute(f, change):
    """``f o change``, truncated at the smaller cap."""
    return _Substituter(change)(f)


def invert_change(change):
    """Series inverse ``psi`` with ``change o psi = id`` through the cap."""
    n = change.n
    F = change.field
    cap = change.cap
    if cap is None:
        raise ValueError("inverting a coordinate change needs a finite cap")
    lin = change.linear_matrix()
    if linalg.rank(lin) < n:
        raise NonInvertibleLinearPart("linear part of the coordinate change is singular")
    linv = _matrix_inverse(lin, F)
    # phi = L x + N(x); psi = L^{-1} (y - N(psi(y))), one order gained per pass
    nonlin = []
    for j, c in enumerate(change.components):
        nonlin.append(TruncatedSeries._raw(
            F, n, {a: v for a, v in c.terms.items() if sum(a) >= 2}, cap))
    ys = [TruncatedSeries.variable(F, n, j, cap) for j in range(n)]

    def apply_linv(vec):
        return [sum((vec[k].scale(linv[j][k]) for k in range(n) if linv[j][k]),
                    TruncatedSeries.zero(F, n, cap)) for j in range(n)]

    psi = apply_linv(ys)
    for _ in range(cap):
        sub = _Substituter(CoordinateChange(psi, cap, check=False))
        nxt = apply_linv([ys[j] - sub(nonlin[j]) for j in range(n)])
        if nxt == psi:
            break
        psi = nxt
    return CoordinateChange(psi, cap, check=False)


def _matrix_inverse(m, F):
    n = len(m)
    aug = [list(row) + [F.one if i == j else F.zero for j in range(n)] for i, row in enumerate(m)]
    R, pivots = linalg.rref(aug, 2 * n)
    return [row[n:] for row in R]


def pushforward(X, change):
    """The field ``X`` written in the new coordinates ``y = change(x)``.

    Component ``j`` is ``X(phi_j)`` (chain rule in the old coordinates)
    re-expressed through the inverse change.
    """
    if X.n != change.n:
        raise DimensionMismatch("field and coordinate change differ in dimension")
    inv = change.inverse()
    sub = _Substituter(inv)
    return VectorFieldJet([sub(apply_derivation(X, phi)) for phi in change.components])


def pullback(X, change):
    """Inverse of :func:`pushforward`: from new coordinates back to the old."""
    return pushforward(X, change.inverse())


# --------------------------------------------------------------- rendering

def _coeff_text(c):
    s = str(c)
    if " " in s:
        return f"({s})"
    return s


def render_series(s):
    if not s.terms:
        return "0"
    parts = []
    for a, c in s.sorted_terms():
        ctext = _coeff_text(c)
        mono = format_monomial(a)
        neg = ctext.startswith("-")
        body_c = ctext[1:] if neg else ctext
        body = body_c if not mono else f"{body_c} * {mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def render_vector_field(X):
    return "[" + ", ".join(render_series(c) for c in X) + "]"


# ----------------------------------------------------------------- parsing

class _SeriesRing:
    def __init__(self, field, n, cap, constants=None):
        self.F = field
        self.n = n
        self.cap = cap
        self.constants = constants or {}

    def const(self, k):
        return TruncatedSeries.constant(self.F, self.n, k, self.cap)

    def name(self, s):
        if s == "t":
            return TruncatedSeries.constant(self.F, self.n, self.F.gen, self.cap)
        if s.startswith("x") and s[1:].isdigit():
            j = int(s[1:])
            if 1 <= j <= self.n:
                return TruncatedSeries.variable(self.F, self.n, j - 1, self.cap)
            raise ValidationError(f"variable {s} out of range for n = {self.n}")
        return TruncatedSeries.constant(self.F, self.n, self.constants[s], self.cap)

    add = staticmethod(lambda a, b: a + b)
    sub = staticmethod(lambda a, b: a - b)
    mul = staticmethod(lambda a, b: a.mul(b))
    neg = staticmethod(lambda a: -a)

    @staticmethod
    def div(a, b):
        if any(sum(e) for e in b.terms):
            raise ValueError("only division by constants is supported")
        c = b.constant_term()
        if not c:
            raise ZeroDivisionError
        return a.scale(c.inverse())

    @staticmethod
    def pow(a, k):
        return a ** k


def parse_series(text, field, n, cap=None, constants=None):
    """Parse a polynomial expression in ``x1..xn`` with coefficients in Q(t)."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    return _Parser(text, _SeriesRing(field, n, cap, constants)).parse()
