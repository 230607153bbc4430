"""Semi-invariants of a normal-form field and what the torus action conserves.

For ``X`` in normal form and a semi-invariant ``X(F) = lam F`` the unit
``beta = prod_k (1 + beta_k)`` moves the cofactor into the kernel of ``X^s``;
the renormalized ``F* = beta F`` is then an eigenfunction of ``X^s`` and of
every torus generator.  The verifiers below check the resulting identities
for Darboux first integrals and rational symmetries through a finite degree.
"""

from dataclasses import dataclass, field as dc_field

from .checks import Check, equal_check, value_check, verdict, zero_check
from .errors import (
    DenominatorNotSemiInvariant,
    FactorNotSemiInvariant,
    MixedTorusWeights,
    NotAFirstIntegral,
    NotASemiInvariant,
    NotCommuting,
    NotDivisible,
    NotInNormalForm,
)
from .normalform import diagonal_generators, validate_linear_part
from .series import TruncatedSeries, VectorFieldJet, apply_derivation, lie_bracket


@dataclass
class SemiInvariant:
    F: TruncatedSeries
    cofactor: TruncatedSeries

    @property
    def order(self):
        return self.F.order()


@dataclass
class DarbouxFunction:
    """Formal product ``prod G_j^{c_j}``; never expanded."""

    factors: list  # [(G, c)]

    def log_derivative_cleared(self, D):
        """``sum_j c_j D(G_j) prod_{l != j} G_l`` for a derivation ``D``."""
        total = None
        for j, (G, c) in enumerate(self.factors):
            term = apply_derivation(D, G).scale(c)
            for l, (H, _) in enumerate(self.factors):
                if l != j:
                    term = term.mul(H)
            total = term if total is None else total + term
        return total


@dataclass
class RationalVectorField:
    """``Y = numer / denom`` with a vector-field numerator and scalar denominator."""

    numer: VectorFieldJet
    denom: TruncatedSeries

    def __post_init__(self):
        if self.denom.is_zero():
            raise ValueError("denominator of a rational vector field is zero")
        if self.numer.n != self.denom.n:
            from .errors import DimensionMismatch
            raise DimensionMismatch("numerator and denominator differ in dimension")

    @property
    def n(self):
        return self.numer.n

    def truncate(self, cap):
        return RationalVectorField(self.numer.truncate(cap), self.denom.truncate(cap))


@dataclass
class WalcherResult:
    beta: TruncatedSeries
    F_star: TruncatedSeries
    lambda_star: TruncatedSeries
    lambda0: object
    torus_cofactors: tuple = ()
    torus_weights: tuple = ()
    factors: list = dc_field(default_factory=list)  # (k, beta_k)
    checks: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return verdict(self.checks)


def _cap(x, M):
    return x.truncate(M) if x.cap is not None else x.with_cap(M)


def require_normal_form(X, M, lin=None):
    lin = lin or validate_linear_part(X)
    br = lie_bracket(lin.semisimple(M), X)
    o = br.order()
    if o is not None and o <= M:
        sl = br.homogeneous(o)
        raise NotInNormalForm(f"[X^s, X] has a nonzero term of degree {o}",
                              residual=str(sl), degree=o)
    return lin


def make_semi_invariant(X, F, cofactor=None, M=None):
    """Validate ``X(F) = cofactor * F`` through ``M`` (computing the cofactor if absent)."""
    M = M if M is not None else X.cap
    X = _cap(X, M)
    F = _cap(F, M)
    r = F.order()
    if r is None:
        raise NotASemiInvariant("the zero series is not a semi-invariant")
    XF = apply_derivation(X, F)
    if cofactor is None:
        try:
            cofactor = XF.divide(F)
        except NotDivisible as exc:
            raise NotASemiInvariant(f"X(F) is not divisible by F ({exc})",
                                    degree=getattr(exc, "degree", None)) from exc
    else:
        cofactor = _cap(cofactor, M - r)
    diff = XF - cofactor.mul(F, "exact")
    o = diff.order()
    if o is not None and o <= M:
        raise NotASemiInvariant("X(F) != lambda F", residual=str(diff.homogeneous(o)), degree=o)
    return SemiInvariant(F, cofactor.truncate(M - r))


def _solve_linear_function(lin, rhs):
    """``(X^s + X^n)(b) = rhs`` for ``rhs`` supported on non-zero ``X^s``-weights."""
    F = lin.field
    n = lin.n

    def s_inv(f):
        return TruncatedSeries._raw(F, n, {a: c / lin.weight(a) for a, c in f.terms.items()}, f.cap)

    term = s_inv(rhs)
    total = term
    if lin.has_nilpotent():
        N = lin.nilpotent()
        for _ in range(64 * n):
            term = -s_inv(apply_derivation(N, term))
            if term.is_zero():
                break
            total = total + term
    return total


def walcher_normalize(X, si, M, decomp=None):
    """Renormalize a semi-invariant so that its cofactor is ``X^s``-invariant."""
    X = _cap(X, M)
    lin = require_normal_form(X, M)
    si = make_semi_invariant(X, si.F, si.cofactor, M)
    F = si.F
    r = F.order()
    qcap = M - r
    field = X.field
    n = X.n
    beta = TruncatedSeries.constant(field, n, 1, qcap)
    cur_F = F
    cur_lam = si.cofactor
    factors = []
    for k in range(1, qcap + 1):
        part = cur_lam.homogeneous(k)
        nonres = {a: c for a, c in part.terms.items() if lin.weight(a)}
        if not nonres:
            continue
        rhs = TruncatedSeries._raw(field, n, {a: -c for a, c in nonres.items()}, None)
        bk = _solve_linear_function(lin, rhs)
        factor = (bk + 1).with_cap(qcap)
        factors.append((k, bk))
        beta = beta.mul(factor)
        cur_F = factor.mul(cur_F, "exact")
        cur_lam = apply_derivation(X, cur_F).divide(cur_F)
    lam0 = si.cofactor.constant_term()
    res = WalcherResult(beta, cur_F, cur_lam, lam0, factors=factors)
    Xs = lin.semisimple(M)
    res.checks = [
        equal_check("F_star = beta * F", cur_F, beta.mul(F, "exact"), M),
        equal_check("X(F_star) = lambda_star * F_star",
                    apply_derivation(X, cur_F), cur_lam.mul(cur_F, "exact"), M),
        zero_check("X^s(lambda_star) = 0", apply_derivation(Xs, cur_lam), qcap),
        equal_check("X^s(F_star) = lambda0 * F_star",
                    apply_derivation(Xs, cur_F), cur_F.scale(lam0), M),
    ]
    if decomp is not None:
        cofs, weights = torus_cofactor_split(decomp, res)
        res.torus_cofactors = cofs
        res.torus_weights = weights
        for i, Z in enumerate(diagonal_generators(decomp, M)):
            res.checks.append(equal_check(
                f"Z_{i + 1}(F_star) = lambda0_{i + 1} * F_star",
                apply_derivation(Z, cur_F), cur_F.scale(cofs[i]), M))
        total = field.zero
        for g, c in zip(decomp.gammas, cofs):
            total = total + g * c
        res.checks.append(value_check("sum_i gamma_i lambda0_i = lambda0", total - lam0))
    return res


def torus_cofactor_split(decomp, res):
    """Constants ``lambda0_i`` with ``Z_i(F*) = lambda0_i F*``, from the torus weight.

    Returns ``(cofactors, integer_weights)``.  All monomials of the lowest
    slice of ``F*`` must share one torus weight.
    """
    F_star = res.F_star if isinstance(res, WalcherResult) else res
    r = F_star.order()
    weights = {decomp.weight(a) for a in F_star.homogeneous(r).terms}
    if len(weights) != 1:
        raise MixedTorusWeights(
            f"lowest slice of F* carries {len(weights)} distinct torus weights",
            residual=str(F_star.homogeneous(r)), degree=r)
    w = weights.pop()
    return tuple(decomp.iota * k for k in w), w


@dataclass
class ConservationReport:
    checks: list
    cofactors: list = dc_field(default_factory=list)
    torus_cofactors: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return verdict(self.checks)


def verify_darboux_conservation(X, P, decomp, M):
    """Check that a Darboux first integral of ``X`` is conserved by ``X^s`` and the ``Z_i``."""
    X = _cap(X, M)
    lin = require_normal_form(X, M)
    P = DarbouxFunction([(_cap(G, M), c) for G, c in P.factors])
    checks = []
    xp = P.log_derivative_cleared(X)
    o = xp.order()
    if o is not None and o <= M:
        raise NotAFirstIntegral("X(P) != 0", residual=str(xp.homogeneous(o)), degree=o)
    checks.append(zero_check("X(P) = 0 (cleared)", xp, M))
    cofactors = []
    for j, (G, c) in enumerate(P.factors):
        try:
            cofactors.append(apply_derivation(X, G).divide(G))
        except NotDivisible as exc:
            raise FactorNotSemiInvariant(
                f"X(G_{j + 1}) is not divisible by G_{j + 1}", residual=str(G),
                degree=getattr(exc, "degree", None)) from exc
    checks.append(Check("each G_j is a semi-invariant of X", True, M))
    field = X.field
    lam_sum = None
    lam0_sum = field.zero
    for (G, c), lam in zip(P.factors, cofactors):
        term = lam.scale(c)
        lam_sum = term if lam_sum is None else lam_sum + term
        lam0_sum = lam0_sum + c * lam.constant_term()
    checks.append(zero_check("sum_j c_j lambda_j = 0", lam_sum))
    checks.append(value_check("sum_j c_j lambda_j(0) = 0", lam0_sum))
    checks.append(zero_check("X^s(P) = 0 (cleared)", P.log_derivative_cleared(lin.semisimple(M)), M))
    torus = []
    # with irrational exponents the torus identities are not implied by X(P) = 0
    rational = all(c.is_rational() for _, c in P.factors)
    if decomp is not None:
        for i, Z in enumerate(diagonal_generators(decomp, M)):
            checks.append(zero_check(f"Z_{i + 1}(P) = 0 (cleared)", P.log_derivative_cleared(Z), M,
                                     rational_exponents=rational))
            s = field.zero
            row = []
            for j, (G, c) in enumerate(P.factors):
                try:
                    lam_ij = apply_derivation(Z, G).divide(G)
                except NotDivisible as exc:
                    raise FactorNotSemiInvariant(
                        f"Z_{i + 1}(G_{j + 1}) is not divisible by G_{j + 1}",
                        residual=str(G)) from exc
                row.append(lam_ij.constant_term())
                s = s + c * lam_ij.constant_term()
            torus.append(row)
            checks.append(value_check(f"sum_j c_j lambda_{i + 1}j(0) = 0", s, rational_exponents=rational))
    return ConservationReport(checks, cofactors, torus)


def verify_commutant_conservation(X, Y, decomp, M):
    """Check that a rational symmetry ``Y = Y'/F`` of ``X`` commutes with every ``Z_i``."""
    X = _cap(X, M)
    lin = require_normal_form(X, M)
    Yn = _cap(Y.numer, M)
    Fd = _cap(Y.denom, M)
    checks = []
    XF = apply_derivation(X, Fd)
    cleared = VectorFieldJet([Fd.mul(c) for c in lie_bracket(X, Yn)]) - Yn.multiply(XF)
    o = cleared.order()
    if o is not None and o <= M:
        raise NotCommuting("[X, Y] != 0", residual=str(cleared.homogeneous(o)), degree=o)
    checks.append(zero_check("F [X, Y'] - X(F) Y' = 0", cleared, M))
    try:
        lam = XF.divide(Fd)
    except NotDivisible as exc:
        raise DenominatorNotSemiInvariant(
            "X(F) is not divisible by F", residual=str(Fd),
            degree=getattr(exc, "degree", None)) from exc
    checks.append(Check("F is a semi-invariant of X", True, M))
    res = walcher_normalize(X, SemiInvariant(Fd, lam), M, decomp)
    checks.extend(res.checks)
    beta = res.beta
    F_star = res.F_star
    Y_star = Yn.multiply(beta, "exact")
    ycap = Y_star.cap
    checks.append(equal_check("[X, Y'*] = lambda* Y'*",
                              lie_bracket(X.truncate(ycap), Y_star),
                              Y_star.multiply(res.lambda_star, "exact"), ycap))
    if decomp is not None:
        for i, Z in enumerate(diagonal_generators(decomp, M)):
            lam_i = res.torus_cofactors[i]
            Zt = Z.truncate(ycap)
            br = lie_bracket(Zt, Y_star)
            checks.append(equal_check(f"[Z_{i + 1}, Y'*] = lambda0_{i + 1} Y'*",
                                      br, Y_star.scale(lam_i), ycap))
            cl = VectorFieldJet([F_star.mul(c, "exact") for c in br]) \
                - Y_star.multiply(apply_derivation(Z, F_star), "exact")
            checks.append(zero_check(f"[Z_{i + 1}, Y] = 0 (cleared)", cl, ycap))
    return ConservationReport(checks, [lam], [list(res.torus_cofactors)])
