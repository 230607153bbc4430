"""Exact linear algebra over fields and over the integers.

The field routines are generic: entries may be rationals or
:class:`~dulac.scalars.FieldElement` values, anything supporting ``+ - * /``
and truthiness for "nonzero".  The integer routines work on lists of Python
ints and are used for lattice saturation and Hermite normal forms.
"""

from math import gcd


def rref(rows, ncols=None):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` is a new list of rows (zero rows
    dropped) and ``pivots[i]`` is the pivot column of row ``i``.  Pivots are
    chosen left to right, first nonzero entry top to bottom, so the result is
    canonical for a given input.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        piv = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], piv)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, ncols, zero, one):
    """Basis of ``{v : A v = 0}``, one vector per free column, in column order."""
    R, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(R, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def solve(rows, rhs, ncols, zero):
    """One solution of ``A v = rhs`` with all free variables zero, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return [zero] * ncols
    R, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    v = [zero] * ncols
    for row, p in zip(R, pivots):
        v[p] = row[ncols]
    return v


# ---------------------------------------------------------------- integers

def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf(rows):
    """Row-style Hermite normal form of an integer matrix.

    Zero rows are removed, pivots are positive and strictly increasing in
    column, and entries above each pivot lie in ``[0, pivot)``.  Two integer
    matrices generate the same row lattice iff their HNFs are equal.
    """
    m = [list(map(int, r)) for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    m = _integer_echelon(m, ncols)
    m = [row for row in m if any(row)]
    c = 0
    for r in range(len(m)):
        while m[r][c] == 0:
            c += 1
        if m[r][c] < 0:
            m[r] = [-v for v in m[r]]
        p = m[r][c]
        for i in range(r):
            q = m[i][c] // p
            if q:
                m[i] = [u - q * v for u, v in zip(m[i], m[r])]
    return [row for row in m if any(row)]


def integer_kernel(rows, ncols):
    """Z-basis (HNF-reduced) of ``{v in Z^n : A v = 0}`` for an integer ``A``."""
    if not rows or not any(any(r) for r in rows):
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    nr = len(rows)
    # [A^T | I]: unimodular row operations keep the right block a basis of Z^n
    aug = [[rows[i][c] for i in range(nr)] + [int(c == j) for j in range(ncols)]
           for c in range(ncols)]
    echelon = _integer_echelon(aug, nr)
    kernel = [row[nr:] for row in echelon if not any(row[:nr])]
    return hnf(kernel)


def _integer_echelon(m, upto):
    """Unimodular row reduction on the first ``upto`` columns (rows kept)."""
    m = [list(r) for r in m]
    r = 0
    for c in range(upto):
        for i in range(r + 1, len(m)):
            if m[i][c] == 0:
                continue
            if m[r][c] == 0:
                m[r], m[i] = m[i], m[r]
                continue
            a, b = m[r][c], m[i][c]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            top = [x * u + y * v for u, v in zip(m[r], m[i])]
            bot = [ag * v - bg * u for u, v in zip(m[r], m[i])]
            m[r], m[i] = top, bot
        if r < len(m) and m[r][c] != 0:
            r += 1
    return m


def saturate(rows, ncols):
    """HNF basis of ``span_Q(rows) ∩ Z^n`` for rational or integer rows."""
    ints = [_clear_denominators(r) for r in rows]
    ints = [r for r in ints if any(r)]
    if not ints:
        return []
    perp = integer_kernel(ints, ncols)
    if not perp:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    return integer_kernel(perp, ncols)


def _clear_denominators(row):
    den = 1
    for v in row:
        d = int(getattr(v, "denominator", 1))
        den = den * d // gcd(den, d)
    return [int(v * den) for v in row]


def is_saturated(rows, ncols):
    return hnf(rows) == saturate(rows, ncols)
