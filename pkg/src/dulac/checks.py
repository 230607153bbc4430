"""Pass/fail records shared by the verification modules."""

from dataclasses import dataclass, field

from .series import TruncatedSeries, VectorFieldJet, render_series


@dataclass
class Check:
    name: str
    passed: bool | None  # None: inconclusive
    through: int | None = None  # degree bound of the check; None means exact
    degree: int | None = None  # first failing degree
    residual: str | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self):
        out = {"name": self.name,
               "status": status_of(self.passed),
               "through": "exact" if self.through is None else self.through}
        if self.degree is not None:
            out["first_failing_degree"] = self.degree
        if self.residual is not None:
            out["residual"] = self.residual
        if self.detail:
            out["detail"] = self.detail
        return out


def status_of(passed):
    return {True: "pass", False: "fail", None: "inconclusive"}[passed]


def verdict(checks):
    if any(c.passed is False for c in checks):
        return False
    if any(c.passed is None for c in checks):
        return None
    return True


def lowest_slice_text(expr, through=None):
    """Degree and rendering of the lowest nonzero slice (within ``through``)."""
    if isinstance(expr, VectorFieldJet):
        o = expr.order()
        if o is None or (through is not None and o > through):
            return None, None
        sl = expr.homogeneous(o)
        return o, "[" + ", ".join(render_series(c) for c in sl) + "]"
    o = expr.order()
    if o is None or (through is not None and o > through):
        return None, None
    return o, render_series(expr.homogeneous(o))


def zero_check(name, expr, through=None, **detail):
    """Check that a series or vector field vanishes in degrees ``<= through``."""
    if through is None:
        through = expr.cap
    deg, text = lowest_slice_text(expr, through)
    return Check(name, deg is None, through, deg, text, dict(detail))


def value_check(name, value, **detail):
    """Check that a field element is zero."""
    ok = not value
    return Check(name, ok, None, None if ok else 0, None if ok else str(value), dict(detail))


def equal_check(name, lhs, rhs, through=None, **detail):
    return zero_check(name, lhs - rhs, through, **detail)


def is_series(x):
    return isinstance(x, TruncatedSeries)
