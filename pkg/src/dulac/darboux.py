"""Darboux integrability certificates and a bounded semi-invariant search.

A certificate bundles three families of checks for fields ``X_1 = X, ...,
X_p`` (rational, ``Y = Y'/F``) and Darboux functions ``F_1, ..., F_q``:
pairwise commutation, common first integrals and generic independence.
Identities are checked after clearing denominators, exactly when every input
is a polynomial (``cap=None``) and through degree ``M`` otherwise.
"""

from dataclasses import dataclass, field as dc_field
from itertools import product

from .checks import Check, verdict, zero_check
from .errors import DimensionMismatch, NoWitnessFound
from . import linalg
from .normalform import validate_linear_part
from .scalars import Q
from .series import (
    TruncatedSeries,
    VectorFieldJet,
    apply_derivation,
    lie_bracket,
    monomials,
)
from .walcher import DarbouxFunction, RationalVectorField  # noqa: F401  (re-export)


def _all_exact(fields, integrals=()):
    for Y in fields:
        if Y.numer.cap is not None or Y.denom.cap is not None:
            return False
    for P in integrals:
        if any(G.cap is not None for G, _ in P.factors):
            return False
    return True


def _prep(x, M, exact):
    if exact:
        return x
    if isinstance(x, RationalVectorField):
        return RationalVectorField(_prep(x.numer, M, exact), _prep(x.denom, M, exact))
    return x.truncate(M) if x.cap is not None else x.with_cap(M)


def _check_dims(fields, integrals=()):
    ns = {Y.n for Y in fields} | {G.n for P in integrals for G, _ in P.factors}
    if len(ns) > 1:
        raise DimensionMismatch(f"inputs live in different dimensions: {sorted(ns)}")


def commutator_cleared(A, f, B, g):
    """``f^2 g^2 [A/f, B/g] = f g [A,B] - f A(g) B + g B(f) A``."""
    fg = f.mul(g)
    br = lie_bracket(A, B)
    return (br.multiply(fg)
            - B.multiply(f.mul(apply_derivation(A, g)))
            + A.multiply(g.mul(apply_derivation(B, f))))


def check_commuting(fields, M=None):
    """Pairwise ``[X_i, X_j] = 0`` for rational vector fields."""
    _check_dims(fields)
    exact = _all_exact(fields) or M is None
    fields = [_prep(Y, M, exact) for Y in fields]
    checks = []
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            A, f = fields[i].numer, fields[i].denom
            B, g = fields[j].numer, fields[j].denom
            expr = commutator_cleared(A, f, B, g)
            checks.append(zero_check(f"[X_{i + 1}, X_{j + 1}] = 0", expr,
                                     None if exact else M, pair=[i + 1, j + 1]))
    return checks


def first_integral_cleared(Y, P):
    """``sum_k c_k Y'(G_k) prod_{l != k} G_l`` (the denominator of ``Y`` drops out)."""
    return P.log_derivative_cleared(Y.numer)


def check_first_integrals(fields, integrals, M=None):
    """``X_i(F_j) = 0`` for every field and every Darboux function."""
    _check_dims(fields, integrals)
    exact = _all_exact(fields, integrals) or M is None
    fields = [_prep(Y, M, exact) for Y in fields]
    integrals = [DarbouxFunction([(_prep(G, M, exact), c) for G, c in P.factors]) for P in integrals]
    checks = []
    for i, Y in enumerate(fields):
        for j, P in enumerate(integrals):
            expr = first_integral_cleared(Y, P)
            checks.append(zero_check(f"X_{i + 1}(F_{j + 1}) = 0", expr,
                                     None if exact else M, pair=[i + 1, j + 1]))
    return checks


def sample_points(n, max_height=3, limit=400):
    """Deterministic rational points, by increasing height, nonzero coordinates."""
    seen = set()
    count = 0
    for h in range(1, max_height + 1):
        vals = sorted({Q(s * a, b) for a in range(1, h + 1) for b in range(1, h + 1) for s in (1, -1)},
                      key=lambda q: (abs(q.numerator) + q.denominator, -q))
        for p in product(vals, repeat=n):
            if p in seen:
                continue
            seen.add(p)
            yield p
            count += 1
            if count >= limit:
                return


def _log_gradient_row(P, point, field):
    """``sum_k c_k grad G_k / G_k`` at ``point``; None when some ``G_k`` vanishes there."""
    n = len(point)
    row = [field.zero] * n
    for G, c in P.factors:
        gv = G.evaluate(point)
        if not gv:
            return None
        inv = gv.inverse()
        for i in range(n):
            row[i] = row[i] + c * G.diff(i).evaluate(point) * inv
    return row


def find_witness(fields, integrals, n, max_height=3):
    """First sample point where both rank conditions hold.

    Returns ``(point, field_rank, integral_rank)``; raises
    :class:`NoWitnessFound` with the best ranks seen otherwise.
    """
    p, q = len(fields), len(integrals)
    field = (fields[0].numer.field if fields else integrals[0].factors[0][0].field)
    best = (-1, -1)
    for point in sample_points(n, max_height):
        vecs = []
        ok = True
        for Y in fields:
            fv = Y.denom.evaluate(point)
            if not fv:
                ok = False
                break
            vecs.append([c.evaluate(point) for c in Y.numer])
        if not ok:
            continue
        rows = []
        for P in integrals:
            row = _log_gradient_row(P, point, field)
            if row is None:
                ok = False
                break
            rows.append(row)
        if not ok:
            continue
        rf = linalg.rank(vecs) if vecs else 0
        rq = linalg.rank(rows) if rows else 0
        if (rf, rq) == (p, q):
            return point, rf, rq
        best = max(best, (rf, rq))
    err = NoWitnessFound(f"no sample point with field rank {p} and integral rank {q}")
    err.best = best
    raise err


def check_independence(fields, integrals, max_height=3):
    n = fields[0].n if fields else integrals[0].factors[0][0].n
    p, q = len(fields), len(integrals)
    if p + q != n:
        return [Check("p + q = n", False, None, None, f"p = {p}, q = {q}, n = {n}")]
    try:
        point, rf, rq = find_witness(fields, integrals, n, max_height)
    except NoWitnessFound as exc:
        return [Check("independence witness", None, None, None, str(exc),
                      {"best_ranks": list(exc.best)})]
    return [Check("independence witness", True, None, None, None,
                  {"point": [str(c) for c in point], "field_rank": rf, "integral_rank": rq})]


@dataclass
class IntegrabilityCertificate:
    p: int
    q: int
    n: int
    commuting: list
    first_integrals: list
    independence: list
    exact: bool = True

    @property
    def checks(self):
        return self.commuting + self.first_integrals + self.independence

    @property
    def passed(self):
        return verdict(self.checks)


def certify(fields, integrals, M=None):
    """Full Darboux-integrability certificate for the given data."""
    _check_dims(fields, integrals)
    n = fields[0].n
    exact = _all_exact(fields, integrals) or M is None
    return IntegrabilityCertificate(
        p=len(fields), q=len(integrals), n=n,
        commuting=check_commuting(fields, M),
        first_integrals=check_first_integrals(fields, integrals, M),
        independence=check_independence(fields, integrals),
        exact=exact)


# ---------------------------------------------------------------- search

@dataclass
class SemiInvariantSolution:
    G: TruncatedSeries
    cofactor: TruncatedSeries
    lowest_degree: int
    lambda0: object


def cofactor_candidates(lam, degG):
    """Distinct ``<a, lam>`` for ``1 <= |a| <= degG`` in graded-lex order of ``a``."""
    out = []
    for k in range(1, degG + 1):
        for a in monomials(len(lam), k):
            s = lam[0].field.zero
            for e, v in zip(a, lam):
                if e:
                    s = s + v * e
            if s not in out:
                out.append(s)
    return out


def _apply_matrix(X1, basis_in, basis_out, shift=None):
    """Columns: coordinates of ``X1(m) - shift*m`` for ``m`` in ``basis_in``."""
    F = X1.field
    idx = {a: i for i, a in enumerate(basis_out)}
    cols = []
    for a in basis_in:
        m = TruncatedSeries.monomial(F, a, 1)
        img = apply_derivation(X1, m)
        if shift is not None:
            img = img - m.scale(shift)
        col = [F.zero] * len(basis_out)
        for b, c in img.terms.items():
            col[idx[b]] = c
        cols.append(col)
    return [[cols[j][i] for j in range(len(basis_in))] for i in range(len(basis_out))]


def find_semi_invariants(X, degG, candidates=None, M=None):
    """Semi-invariants ``G`` with lowest degree ``<= degG`` and fixed constant cofactor.

    For every candidate ``lambda0`` and degree ``r`` each kernel vector of
    ``X^(1) - lambda0`` on degree-``r`` forms seeds a degree-by-degree linear
    solve for the higher terms of ``G`` and of its cofactor (free unknowns
    set to zero).  Seeds whose solve becomes inconsistent are dropped.
    """
    M = M if M is not None else (X.cap if X.cap is not None else degG)
    if degG > M:
        raise ValueError("degG must not exceed the working degree")
    lin = validate_linear_part(X)
    F = X.field
    n = X.n
    Xc = X.truncate(M) if X.cap is not None else X.with_cap(M)
    X1 = Xc.homogeneous(1)
    slices = {m: Xc.homogeneous(m) for m in range(2, M + 1)}
    if candidates is None:
        candidates = cofactor_candidates(list(lin.diag), degG)
    out = []
    for r in range(1, degG + 1):
        basis_r = monomials(n, r)
        for lam0 in candidates:
            A = _apply_matrix(X1, basis_r, basis_r, lam0)
            for seed in linalg.nullspace(A, len(basis_r), F.zero, F.one):
                sol = _extend_seed(Xc, X1, slices, lam0, r, dict(zip(basis_r, seed)), M)
                if sol is not None:
                    out.append(sol)
    return out


def _extend_seed(X, X1, slices, lam0, r, seed, M):
    F = X.field
    n = X.n
    G = {r: {a: c for a, c in seed.items() if c}}
    lam = {0: {(0,) * n: lam0}}
    for k in range(r + 1, M + 1):
        basis_k = monomials(n, k)
        basis_l = monomials(n, k - r)
        idx = {a: i for i, a in enumerate(basis_k)}
        # rhs = sum_{0<i<k-r} lam^(i) G^(k-i) - sum_{m>=2} X^(m)(G^(k-m+1))
        rhs = [F.zero] * len(basis_k)
        for i in range(1, k - r):
            li, gi = lam.get(i), G.get(k - i)
            if li and gi:
                for a, c in TruncatedSeries(F, n, li).mul(TruncatedSeries(F, n, gi)).terms.items():
                    rhs[idx[a]] = rhs[idx[a]] + c
        for m in range(2, k - r + 2):
            g = G.get(k - m + 1)
            if g and m in slices:
                for a, c in apply_derivation(slices[m], TruncatedSeries(F, n, g)).terms.items():
                    rhs[idx[a]] = rhs[idx[a]] - c
        # unknowns: G^(k) then lam^(k-r)
        left = _apply_matrix(X1, basis_k, basis_k, lam0)
        g_r = TruncatedSeries(F, n, G[r])
        cols_l = []
        for b in basis_l:
            prod = TruncatedSeries.monomial(F, b, 1).mul(g_r)
            col = [F.zero] * len(basis_k)
            for a, c in prod.terms.items():
                col[idx[a]] = -c
            cols_l.append(col)
        rows = [left[i] + [cols_l[j][i] for j in range(len(basis_l))] for i in range(len(basis_k))]
        sol = linalg.solve(rows, rhs, len(basis_k) + len(basis_l), F.zero)
        if sol is None:
            return None
        G[k] = {a: c for a, c in zip(basis_k, sol[:len(basis_k)]) if c}
        lam[k - r] = {a: c for a, c in zip(basis_l, sol[len(basis_k):]) if c}
    Gs = TruncatedSeries(F, n, {a: c for part in G.values() for a, c in part.items()}, M)
    Ls = TruncatedSeries(F, n, {a: c for part in lam.values() for a, c in part.items()}, M - r)
    return SemiInvariantSolution(Gs, Ls, r, lam0)


def validate_semi_invariant(X, G, lam, M):
    """``X(G) - lam G`` vanishes through ``M``."""
    X = X.truncate(M) if X.cap is not None else X.with_cap(M)
    diff = apply_derivation(X, G) - lam.mul(G, "exact")
    o = diff.order()
    return o is None or o > M
