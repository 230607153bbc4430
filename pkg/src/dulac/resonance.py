"""Resonances of a diagonal linear part and its toric decomposition.

A monomial vector field ``x^a d/dx_j`` is resonant for eigenvalues ``lam``
when ``<a, lam> = lam_j``.  Writing ``lam_j = iota * sum_i gamma_i rho_ij``
with rationally independent ``gamma`` and an integer matrix ``rho`` turns that
condition into the integer equations ``<a, rho_i> = rho_ij``.
"""

from dataclasses import dataclass, field as dc_field
from .errors import MissingIota
from . import linalg
from .scalars import Q, rational_rank
from .series import grlex_key, monomials

MAX_DEGREE = 20
MAX_DIMENSION = 6


@dataclass(frozen=True)
class ResonanceSet:
    degree: int
    entries: tuple  # ((a, j), ...) with j 0-based

    def __contains__(self, item):
        return item in self.entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class ToricDecomposition:
    """``lam_j = iota * sum_i gammas[i] * rhos[i][j]``."""

    tau: int
    gammas: tuple
    rhos: tuple  # tau rows of n ints
    n: int
    iota: object = dc_field(default=None, compare=False)

    def weight(self, a):
        """Integer torus weight ``(<a, rho_1>, ..., <a, rho_tau>)``."""
        return tuple(sum(x * r for x, r in zip(a, row)) for row in self.rhos)

    def reconstruct(self):
        out = []
        for j in range(self.n):
            s = self.iota.field.zero
            for g, row in zip(self.gammas, self.rhos):
                if row[j]:
                    s = s + g * row[j]
            out.append(self.iota * s)
        return out


def _dot(a, lam):
    s = lam[0].field.zero
    for e, v in zip(a, lam):
        if e:
            s = s + v * e
    return s


def enumerate_resonances(lam, M):
    """All ``(a, j)`` with ``2 <= |a| <= M`` and ``<a, lam> = lam_j``.

    Exhaustive: every exponent vector is tried, the inner product computed in
    the field and compared exactly.
    """
    if M < 2:
        raise ValueError("degree bound must be at least 2")
    n = len(lam)
    _check_limits(n, M)
    out = []
    for k in range(2, M + 1):
        for a in monomials(n, k):
            s = _dot(a, lam)
            for j in range(n):
                if s == lam[j]:
                    out.append((a, j))
    return ResonanceSet(M, tuple(out))


def _check_limits(n, M):
    if n > MAX_DIMENSION or M > MAX_DEGREE:
        raise ValueError(f"resonance search limited to n <= {MAX_DIMENSION}, M <= {MAX_DEGREE}")


def _coordinate_matrix(values):
    """d x n rational matrix whose column j holds the coordinates of values[j]."""
    d = values[0].field.degree
    return [[v.coords[i] for v in values] for i in range(d)]


def resonance_lattice_solver(lam, j, M):
    """Solutions ``a >= 0, 2 <= |a| <= M`` of ``<a, lam> = lam_j`` via the linear system.

    The equation is linear over Q in the coordinates, so its solution set is
    an affine lattice.  The free variables of the reduced system are
    enumerated over the bounded box; the pivot variables then follow and are
    kept when they are nonnegative integers.
    """
    n = len(lam)
    _check_limits(n, M)
    C = _coordinate_matrix(lam)
    R, pivots = linalg.rref(C, n)
    free = [c for c in range(n) if c not in pivots]
    ej = [int(i == j) for i in range(n)]
    found = []
    for vals in _bounded_vectors(len(free), M):
        a = [0] * n
        for f, v in zip(free, vals):
            a[f] = v
        ok = True
        for row, p in zip(R, pivots):
            # (a - e_j) in kernel: a_p - e_j[p] = -sum_f row[f] (a_f - e_j[f])
            val = Q(ej[p]) - sum((row[f] * (a[f] - ej[f]) for f in free), Q(0))
            if val.denominator != 1 or val < 0:
                ok = False
                break
            a[p] = int(val)
        if not ok:
            continue
        if 2 <= sum(a) <= M:
            found.append(tuple(a))
    found.sort(key=grlex_key)
    return found


def _bounded_vectors(k, M):
    """Nonnegative integer k-vectors with entry sum at most M."""
    if k == 0:
        yield ()
        return
    for first in range(M + 1):
        for rest in _bounded_vectors(k - 1, M - first):
            yield (first,) + rest


def resonances_by_lattice(lam, M):
    entries = []
    for j in range(len(lam)):
        entries.extend((a, j) for a in resonance_lattice_solver(lam, j, M))
    entries.sort(key=lambda e: (grlex_key(e[0]), e[1]))
    return ResonanceSet(M, tuple(entries))


def toric_decompose(lam):
    """Toric degree, incommensurable ``gammas`` and integer weights ``rhos``.

    ``rhos`` is the HNF basis of the saturated row lattice of the coordinate
    matrix of ``lam / iota``; ``gammas`` are the unique coefficients that make
    the reconstruction exact.
    """
    if not lam:
        raise ValueError("empty eigenvalue vector")
    F = lam[0].field
    if F.iota is None:
        raise MissingIota("the toric decomposition needs a designated square root of -1")
    n = len(lam)
    mu = [v / F.iota for v in lam]
    C = _coordinate_matrix(mu)
    R, pivots = linalg.rref(C, n)
    tau = len(pivots)
    if tau == 0:
        return ToricDecomposition(0, (), (), n, F.iota)
    rhos = linalg.saturate(R, n)
    # C = A rho; rho has full row rank, so A is read off at rho's pivot columns
    rho_piv = [next(c for c in range(n) if row[c]) for row in rhos]
    sub = [[Q(rhos[i][c]) for i in range(tau)] for c in rho_piv]  # tau x tau, sub[c][i]
    gammas = []
    # per coordinate row r: C[r][c] = sum_i A[r][i] rho[i][c] at the pivot columns
    A_rows = []
    for r in range(len(C)):
        rhs = [C[r][c] for c in rho_piv]
        sol = linalg.solve(sub, rhs, tau, Q(0))
        A_rows.append(sol)
    for i in range(tau):
        gammas.append(F.element([A_rows[r][i] for r in range(len(C))]))
    return ToricDecomposition(tau, tuple(gammas), tuple(tuple(r) for r in rhos), n, F.iota)


def is_resonant_monomial(decomp, a, j):
    """``<a, rho_i> = rho_ij`` for every torus generator (always true when tau = 0)."""
    return all(sum(x * r for x, r in zip(a, row)) == row[j] for row in decomp.rhos)


def is_resonant(lam, a, j):
    return _dot(a, lam) == lam[j]


def check_decomposition(decomp, lam):
    """Reconstruction, incommensurability and saturation; returns a dict of booleans."""
    if decomp.tau == 0:
        ok_recon = not any(lam)
    else:
        ok_recon = decomp.reconstruct() == list(lam)
    ok_rank = decomp.tau == 0 or rational_rank(list(decomp.gammas))[0] == decomp.tau
    ok_sat = decomp.tau == 0 or linalg.is_saturated([list(r) for r in decomp.rhos], decomp.n)
    return {"reconstruction": ok_recon, "incommensurable": ok_rank, "saturated": ok_sat}
