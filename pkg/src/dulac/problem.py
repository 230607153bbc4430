"""JSON problem files: parsing, validation and canonical rendering.

Every parse failure names the JSON location it comes from, e.g.
``vector_field[1]: unknown symbol 'y' at column 5 in 'x1 + y'``.
"""

import json
from dataclasses import dataclass, field as dc_field

from .errors import DulacError, InputError, ParseError, ValidationError
from .scalars import NumberField, format_rational, gaussian_rationals, parse_scalar, to_rational
from .series import TruncatedSeries, VectorFieldJet, parse_series, render_series
from .walcher import DarbouxFunction, RationalVectorField

SCHEMA_VERSION = 1
_KEYS = {"schema", "name", "description", "field", "n", "truncation", "vector_field",
         "commuting_fields", "symmetries", "integrals", "semi_invariants"}


@dataclass
class ProblemFile:
    name: str
    field: NumberField
    n: int
    truncation: int
    vector_field: VectorFieldJet
    constants: tuple = ()  # ((name, FieldElement), ...)
    commuting_fields: list = dc_field(default_factory=list)
    symmetries: list = dc_field(default_factory=list)
    integrals: list = dc_field(default_factory=list)
    semi_invariants: list = dc_field(default_factory=list)  # [(F, cofactor or None)]
    description: str = ""

    @property
    def eigenvalues(self):
        A = self.vector_field.linear_matrix()
        return [A[j][j] for j in range(self.n)]

    def fields(self):
        """``X`` followed by the declared commuting fields."""
        one = TruncatedSeries.constant(self.field, self.n, 1)
        return [RationalVectorField(self.vector_field, one)] + list(self.commuting_fields)


def _where(*parts):
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out


def _wrap(fn, where):
    try:
        return fn()
    except (ParseError, ValidationError) as exc:
        raise type(exc)(str(exc), where) from exc
    except InputError as exc:
        err = type(exc)(f"{where}: {exc}")
        err.where = where
        raise err from exc
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(str(exc) or type(exc).__name__, where) from exc


def _require(doc, key, where, kind):
    if key not in doc:
        raise ValidationError(f"missing required key {key!r}", where or "problem")
    val = doc[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise ValidationError(f"expected an integer, got {json.dumps(val)}", _where(where, key) if where else key)
    return val


class _Ctx:
    def __init__(self, field, n, constants):
        self.field = field
        self.n = n
        self.constants = dict(constants)

    def scalar(self, node, where):
        if isinstance(node, bool):
            raise ValidationError("expected a scalar", where)
        if isinstance(node, int):
            return self.field(node)
        if isinstance(node, str):
            return _wrap(lambda: parse_scalar(node, self.field, self.constants), where)
        raise ValidationError(f"expected a scalar literal, got {json.dumps(node)}", where)

    def exponents(self, node, where):
        if not isinstance(node, list) or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0
                                                   for e in node):
            raise ValidationError("exponent vector must be a list of nonnegative integers", where)
        if len(node) != self.n:
            raise ValidationError(f"exponent vector has length {len(node)}, expected n = {self.n}", where)
        return tuple(node)

    def series(self, node, where):
        if isinstance(node, (str, int)) and not isinstance(node, bool):
            text = str(node)
            return _wrap(lambda: parse_series(text, self.field, self.n, None, self.constants), where)
        if isinstance(node, dict) and set(node) == {"terms"} and isinstance(node["terms"], list):
            terms = {}
            for k, t in enumerate(node["terms"]):
                w = _where(where, "terms", k)
                if not isinstance(t, list) or len(t) != 2:
                    raise ValidationError("series term must be [exponents, coefficient]", w)
                a = self.exponents(t[0], _where(w, 0))
                terms[a] = terms.get(a, self.field.zero) + self.scalar(t[1], _where(w, 1))
            return TruncatedSeries(self.field, self.n, terms)
        raise ValidationError("expected a series string or {\"terms\": [...]}", where)

    def vector_field(self, node, where):
        if isinstance(node, list):
            if len(node) != self.n:
                raise ValidationError(f"vector field has {len(node)} components, expected n = {self.n}", where)
            return VectorFieldJet([self.series(c, _where(where, j)) for j, c in enumerate(node)], None)
        if isinstance(node, dict) and set(node) == {"terms"} and isinstance(node["terms"], list):
            comps = [dict() for _ in range(self.n)]
            for k, t in enumerate(node["terms"]):
                w = _where(where, "terms", k)
                if not isinstance(t, list) or len(t) != 3:
                    raise ValidationError("vector field term must be [exponents, component, coefficient]", w)
                a = self.exponents(t[0], _where(w, 0))
                j = t[1]
                if not isinstance(j, int) or isinstance(j, bool) or not 1 <= j <= self.n:
                    raise ValidationError(f"component index must be in 1..{self.n}", _where(w, 1))
                comps[j - 1][a] = comps[j - 1].get(a, self.field.zero) + self.scalar(t[2], _where(w, 2))
            return VectorFieldJet([TruncatedSeries(self.field, self.n, c) for c in comps], None)
        raise ValidationError("expected a list of component strings or {\"terms\": [...]}", where)

    def rational_field(self, node, where):
        if not isinstance(node, dict) or "numerator" not in node:
            raise ValidationError("expected {\"numerator\": ..., \"denominator\": ...}", where)
        extra = set(node) - {"numerator", "denominator"}
        if extra:
            raise ValidationError(f"unknown keys {sorted(extra)}", where)
        num = self.vector_field(node["numerator"], _where(where, "numerator"))
        den = self.series(node.get("denominator", "1"), _where(where, "denominator"))
        if den.is_zero():
            raise ValidationError("denominator is zero", _where(where, "denominator"))
        return RationalVectorField(num, den)

    def darboux(self, node, where):
        if not isinstance(node, dict) or not isinstance(node.get("factors"), list) or not node["factors"]:
            raise ValidationError("expected {\"factors\": [{\"base\": ..., \"exponent\": ...}, ...]}", where)
        factors = []
        for k, f in enumerate(node["factors"]):
            w = _where(where, "factors", k)
            if not isinstance(f, dict) or "base" not in f:
                raise ValidationError("factor needs a 'base'", w)
            G = self.series(f["base"], _where(w, "base"))
            if G.is_zero():
                raise ValidationError("factor base is zero", _where(w, "base"))
            c = self.scalar(f.get("exponent", 1), _where(w, "exponent"))
            factors.append((G, c))
        return DarbouxFunction(factors)


def _parse_field(node):
    if node is None:
        return gaussian_rationals(), ()
    if not isinstance(node, dict) or "minpoly" not in node:
        raise ValidationError("field needs a 'minpoly' list", "field")
    mp = node["minpoly"]
    if not isinstance(mp, list) or not mp:
        raise ValidationError("minpoly must be a nonempty list of rationals", "field.minpoly")
    coeffs = []
    for k, c in enumerate(mp):
        w = _where("field", "minpoly", k)
        if isinstance(c, bool) or not isinstance(c, (int, str)):
            raise ValidationError("coefficient must be an integer or a rational string", w)
        coeffs.append(_wrap(lambda c=c: to_rational(c), w))
    base = _wrap(lambda: NumberField(coeffs), "field.minpoly")
    iota = None
    if node.get("iota") is not None:
        ctx = _Ctx(base, 0, {})
        iota = ctx.scalar(node["iota"], "field.iota")
        F = _wrap(lambda: NumberField(coeffs, list(iota.coords), check=False), "field.iota")
    else:
        F = base
    consts = []
    cnode = node.get("constants", {})
    if not isinstance(cnode, dict):
        raise ValidationError("constants must be an object", "field.constants")
    env = {}
    for name, text in cnode.items():
        if not name.isidentifier() or name == "t" or (name[0] == "x" and name[1:].isdigit()):
            raise ValidationError(f"invalid constant name {name!r}", "field.constants")
        val = _Ctx(F, 0, env).scalar(text, _where("field", "constants", name))
        env[name] = val
        consts.append((name, val))
    return F, tuple(consts)


def problem_from_dict(doc):
    if not isinstance(doc, dict):
        raise ValidationError("top level must be an object", "problem")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", "problem")
    F, consts = _parse_field(doc.get("field"))
    n = _require(doc, "n", "", int)
    if n < 1:
        raise ValidationError("n must be positive", "n")
    M = _require(doc, "truncation", "", int)
    if M < 2:
        raise ValidationError("truncation must be at least 2", "truncation")
    ctx = _Ctx(F, n, consts)
    X = ctx.vector_field(_require(doc, "vector_field", "", list), "vector_field")

    def many(key, fn):
        node = doc.get(key, [])
        if not isinstance(node, list):
            raise ValidationError("expected a list", key)
        return [fn(v, _where(key, k)) for k, v in enumerate(node)]

    def si(node, where):
        if not isinstance(node, dict) or "F" not in node:
            raise ValidationError("semi-invariant needs 'F'", where)
        G = ctx.series(node["F"], _where(where, "F"))
        cof = node.get("cofactor")
        return (G, None if cof is None else ctx.series(cof, _where(where, "cofactor")))

    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ValidationError("name must be a string", "name")
    return ProblemFile(
        name=name, field=F, n=n, truncation=M, vector_field=X, constants=consts,
        commuting_fields=many("commuting_fields", ctx.rational_field),
        symmetries=many("symmetries", ctx.rational_field),
        integrals=many("integrals", ctx.darboux),
        semi_invariants=many("semi_invariants", si),
        description=str(doc.get("description", "")))


def parse_problem_text(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    return problem_from_dict(doc)


def parse_problem(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ParseError("file is not valid UTF-8", str(path)) from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_problem_text(text)


def render_problem(p):
    """Canonical JSON-ready dict; ``problem_from_dict(render_problem(p)) == p``."""
    field = {"minpoly": [format_rational(c) for c in p.field.minpoly]}
    if p.field.iota is not None:
        field["iota"] = str(p.field.iota)
    if p.constants:
        field["constants"] = {k: str(v) for k, v in p.constants}
    out = {"schema": SCHEMA_VERSION, "name": p.name}
    if p.description:
        out["description"] = p.description
    out.update({"field": field, "n": p.n, "truncation": p.truncation,
                "vector_field": [render_series(c) for c in p.vector_field]})

    def rf(Y):
        return {"numerator": [render_series(c) for c in Y.numer], "denominator": render_series(Y.denom)}

    if p.commuting_fields:
        out["commuting_fields"] = [rf(Y) for Y in p.commuting_fields]
    if p.symmetries:
        out["symmetries"] = [rf(Y) for Y in p.symmetries]
    if p.integrals:
        out["integrals"] = [{"factors": [{"base": render_series(G), "exponent": str(c)} for G, c in P.factors]}
                            for P in p.integrals]
    if p.semi_invariants:
        sis = []
        for G, cof in p.semi_invariants:
            d = {"F": render_series(G)}
            if cof is not None:
                d["cofactor"] = render_series(cof)
            sis.append(d)
        out["semi_invariants"] = sis
    return out


__all__ = ["ProblemFile", "parse_problem", "parse_problem_text", "problem_from_dict",
           "render_problem", "DulacError"]
