"""Degree-by-degree Poincaré–Dulac normalization of vector-field jets.

The linear part must already be Jordan-split: diagonal entries are the
eigenvalues and the off-diagonal part is a nilpotent matrix that only couples
equal eigenvalues.  At each degree ``k`` the non-resonant part of the jet is
removed by the change ``y = x - U(x)`` where ``[X^(1), U]`` equals that part.
"""

from dataclasses import dataclass, field as dc_field

from .errors import LinearPartNotJordanSplit, MissingIota, NonvanishingAtOrigin
from .resonance import toric_decompose
from .series import (
    CoordinateChange,
    TruncatedSeries,
    VectorFieldJet,
    apply_derivation,
    lie_bracket,
    pushforward,
)


@dataclass(frozen=True)
class LinearPart:
    diag: tuple  # eigenvalues
    nilp: tuple  # n x n rows, zero diagonal

    @property
    def n(self):
        return len(self.diag)

    @property
    def field(self):
        return self.diag[0].field

    def semisimple(self, cap=None):
        return VectorFieldJet.diagonal(self.field, list(self.diag), cap)

    def nilpotent(self, cap=None):
        return VectorFieldJet.linear(self.field, [list(r) for r in self.nilp], cap)

    def has_nilpotent(self):
        return any(v for row in self.nilp for v in row)

    def weight(self, a, j=None):
        """``<a, lam>`` (function) or ``<a, lam> - lam_j`` (vector field monomial)."""
        s = self.field.zero
        for e, v in zip(a, self.diag):
            if e:
                s = s + v * e
        if j is not None:
            s = s - self.diag[j]
        return s


def validate_linear_part(X):
    """Split the degree-1 slice of ``X`` into its diagonal and nilpotent parts."""
    if not X.vanishes_at_origin():
        raise NonvanishingAtOrigin("the vector field does not vanish at the origin")
    A = X.linear_matrix()
    n = X.n
    F = X.field
    diag = tuple(A[j][j] for j in range(n))
    nilp = tuple(tuple(F.zero if j == k else A[j][k] for k in range(n)) for j in range(n))
    for j in range(n):
        for k in range(n):
            if j != k and nilp[j][k] and diag[j] != diag[k]:
                raise LinearPartNotJordanSplit(
                    f"entry ({j + 1},{k + 1}) couples distinct eigenvalues "
                    f"{diag[j]} and {diag[k]}; supply a Jordan-split linear part")
    power = [list(r) for r in nilp]
    for _ in range(n - 1):
        power = [[sum((power[i][m] * nilp[m][k] for m in range(n)), F.zero)
                  for k in range(n)] for i in range(n)]
    if any(v for row in power for v in row):
        raise LinearPartNotJordanSplit("off-diagonal part of the linear term is not nilpotent")
    return LinearPart(diag, nilp)


def split_resonant(lin, V):
    """Split a vector field into (non-resonant, resonant) parts, monomial by monomial."""
    F = lin.field
    n = lin.n
    nr = [dict() for _ in range(n)]
    res = [dict() for _ in range(n)]
    for j, comp in enumerate(V):
        for a, c in comp.terms.items():
            (res if not lin.weight(a, j) else nr)[j][a] = c
    mk = lambda parts: VectorFieldJet([TruncatedSeries(F, n, t, V.cap) for t in parts], V.cap)  # noqa: E731
    return mk(nr), mk(res)


def _ad_s_inverse(lin, W):
    F = lin.field
    n = lin.n
    comps = []
    for j, comp in enumerate(W):
        comps.append(TruncatedSeries._raw(
            F, n, {a: c / lin.weight(a, j) for a, c in comp.terms.items()}, comp.cap))
    return VectorFieldJet(comps, W.cap)


def homological_solve(lin, V):
    """Solve ``V = [X^(1), U] + R`` with ``R`` resonant and ``U`` non-resonant.

    ``ad_{X^s}`` is diagonal on monomial fields and ``ad_{X^n}`` is nilpotent and
    commutes with it, so ``U = sum_s (-ad_s^-1 ad_n)^s ad_s^-1 V_nr`` is a
    finite sum.
    """
    V_nr, R = split_resonant(lin, V)
    if V_nr.is_zero():
        return VectorFieldJet.zero(lin.field, lin.n, V.cap), R
    term = _ad_s_inverse(lin, V_nr)
    U = term
    if lin.has_nilpotent():
        N = lin.nilpotent()
        for _ in range(64 * lin.n):
            term = -_ad_s_inverse(lin, lie_bracket(N, term))
            if term.is_zero():
                break
            U = U + term
        else:  # pragma: no cover
            raise RuntimeError("Neumann series failed to terminate")
    return U, R


@dataclass
class NormalizationStep:
    degree: int
    generator: VectorFieldJet  # U; the step is y = x - U(x)
    change: CoordinateChange
    removed: int
    retained: int


@dataclass
class NormalizationResult:
    original: VectorFieldJet
    normalized: VectorFieldJet
    lin: LinearPart
    steps: list
    composed: CoordinateChange
    partial: dict  # degree m -> composition of the steps of degrees <= m
    decomp: object = None
    degree: int = 0
    diagnostics: list = dc_field(default_factory=list)

    @property
    def inverse(self):
        return self.composed.inverse()

    def change_through(self, m):
        """Composed change after normalizing degrees ``2..m``."""
        if m < 2:
            return CoordinateChange.identity(self.original.field, self.original.n, self.degree)
        return self.partial[min(m, self.degree)]


def normalize_to_degree(X, M):
    """Remove every non-resonant term of degrees ``2..M``."""
    if X.cap is not None and M > X.cap:
        raise ValueError(f"cannot normalize through degree {M}: jet is only known through {X.cap}")
    if M < 1:
        raise ValueError("degree must be positive")
    lin = validate_linear_part(X)
    F = X.field
    n = X.n
    cur = X.truncate(M) if X.cap is not None else X.with_cap(M)
    original = cur
    steps = []
    diagnostics = []
    composed = CoordinateChange.identity(F, n, M)
    partial = {}
    for k in range(2, M + 1):
        V = cur.homogeneous(k)
        U, R = homological_solve(lin, V)
        removed = sum(len(c.terms) for c in V) - sum(len(c.terms) for c in R)
        retained = sum(len(c.terms) for c in R)
        if U.is_zero():
            change = CoordinateChange.identity(F, n, M)
        else:
            change = CoordinateChange(
                [TruncatedSeries.variable(F, n, j, M) - U[j].with_cap(M) for j in range(n)], M)
            cur = pushforward(cur, change)
            composed = change.compose(composed)
        steps.append(NormalizationStep(k, U, change, removed, retained))
        diagnostics.append({"degree": k, "removed": removed, "retained": retained})
        partial[k] = composed
    decomp = toric_decompose(list(lin.diag)) if F.iota is not None else None
    return NormalizationResult(
        original=original, normalized=cur, lin=lin, steps=steps, composed=composed,
        partial=partial, decomp=decomp, degree=M, diagnostics=diagnostics)


def is_normal_form(X, lin=None, through=None):
    """``[X^s, X] = 0`` through ``through`` (default: the jet cap)."""
    lin = lin or validate_linear_part(X)
    br = lie_bracket(lin.semisimple(X.cap), X)
    if through is None:
        return br.is_zero()
    o = br.order()
    return o is None or o > through


def diagonal_generators(decomp, cap=None):
    """``Z_i = iota * sum_j rho_ij x_j d/dx_j`` for each torus generator."""
    F = decomp.iota.field
    return [VectorFieldJet.diagonal(F, [decomp.iota * r for r in row], cap) for row in decomp.rhos]


@dataclass
class TruncatedTorusGenerators:
    m: int
    generators: list  # in the original coordinates
    diagonal: list  # in the normalizing coordinates
    decomp: object


def torus_generators_truncated(res, m):
    """Pull the diagonal torus generators back to the original coordinates.

    Uses the coordinates that normalize degrees ``2..m``; the resulting
    ``Z_{i,m}`` preserve ``X`` up to order ``m``.
    """
    if res.decomp is None:
        raise MissingIota("torus generators need a designated square root of -1")
    if m > res.degree:
        raise ValueError(f"m = {m} exceeds the normalization degree {res.degree}")
    change = res.change_through(m)
    diag = diagonal_generators(res.decomp, res.degree)
    gens = [pushforward(Z, change.inverse()) for Z in diag]
    return TruncatedTorusGenerators(m, gens, diag, res.decomp)


def semisimple_from_generators(decomp, generators):
    """``sum_i gamma_i Z_i``; equals ``X^s`` in the degree-1 slice."""
    total = None
    for g, Z in zip(decomp.gammas, generators):
        term = Z.scale(g)
        total = term if total is None else total + term
    return total


def apply_linear(lin, f):
    """``X^(1)(f)`` for the linear part (semisimple plus nilpotent)."""
    X1 = lin.semisimple(f.cap) + lin.nilpotent(f.cap)
    return apply_derivation(X1, f)
