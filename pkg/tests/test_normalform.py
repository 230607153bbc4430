import pytest
from hypothesis import given, settings, strategies as st

from dulac.errors import LinearPartNotJordanSplit, MissingIota, NonvanishingAtOrigin
from dulac.normalform import (
    LinearPart,
    homological_solve,
    is_normal_form,
    normalize_to_degree,
    semisimple_from_generators,
    split_resonant,
    torus_generators_truncated,
    validate_linear_part,
)
from dulac.scalars import NumberField, gaussian_rationals
from dulac.series import TruncatedSeries, VectorFieldJet, lie_bracket, monomials
from oracle import series, sym_derive, sym_field, sym_series, sym_truncate, vfield, xs

F = gaussian_rationals()


def conjugacy_via_sympy(X, res, M):
    """``X(phi_j) = Y_j o phi`` through ``M``: no inverse change involved."""
    n = X.n
    x = xs(n)
    Xs = sym_field(X)
    phi = [sym_series(c) for c in res.composed]
    Ys = sym_field(res.normalized)
    for j in range(n):
        lhs = sym_truncate(sym_derive(Xs, phi[j], n), n, M)
        rhs = sym_truncate(Ys[j].subs(dict(zip(x, phi)), simultaneous=True), n, M)
        if lhs != rhs:
            return False
    return True


def test_validate_linear_part_examples():
    lin = validate_linear_part(vfield(["x1", "2*x2"]))
    assert lin.diag == (F(1), F(2)) and not lin.has_nilpotent()
    lin = validate_linear_part(vfield(["x1 + x2", "x2"]))
    assert lin.diag == (F(1), F(1)) and lin.nilp[0][1] == F(1)
    with pytest.raises(LinearPartNotJordanSplit):
        validate_linear_part(vfield(["x1 + x2", "2*x2"]))
    with pytest.raises(NonvanishingAtOrigin):
        validate_linear_part(vfield(["1 + x1", "x2"]))


def test_homological_examples():
    lin = LinearPart((F(1), F(2)), ((F(0), F(0)), (F(0), F(0))))
    U, R = homological_solve(lin, vfield(["0", "x1^3"]))
    assert U == vfield(["0", "x1^3"]) and R.is_zero()
    U, R = homological_solve(lin, vfield(["0", "x1^2"]))
    assert U.is_zero() and R == vfield(["0", "x1^2"])


def test_homological_with_nilpotent_part():
    lin = validate_linear_part(vfield(["x1 + x2", "x2"]))
    V = vfield(["x1^2", "0"])
    U, R = homological_solve(lin, V)
    X1 = vfield(["x1 + x2", "x2"])
    assert not U.is_zero()
    residue = V - lie_bracket(X1, U)
    assert residue == R
    nr, _ = split_resonant(lin, residue)
    assert nr.is_zero()


def test_shear_example():
    X = vfield(["x1", "2*x2 + x1^3"])
    res = normalize_to_degree(X, 4)
    assert res.normalized == vfield(["x1", "2*x2"], cap=4)
    assert list(res.composed) == [series("x1", cap=4), series("x2 - x1^3", cap=4)]
    assert conjugacy_via_sympy(X, res, 4)
    assert res.diagnostics[1] == {"degree": 3, "removed": 1, "retained": 0}


def test_already_resonant_is_fixed():
    X = vfield(["x1", "2*x2 + x1^2"])
    res = normalize_to_degree(X, 4)
    assert res.normalized == X.with_cap(4)
    assert res.composed.is_identity()


def test_one_dimensional_flattening():
    X = vfield(["x1 + x1^2"])
    res = normalize_to_degree(X, 3)
    assert res.normalized == vfield(["x1"], cap=3)
    assert conjugacy_via_sympy(X, res, 3)


def test_jordan_block_normalization():
    X = vfield(["x1 + x2 + x1^2", "x2 + x1*x2 + x2^2"])
    res = normalize_to_degree(X, 4)
    assert res.normalized == vfield(["x1 + x2", "x2"], cap=4)
    assert conjugacy_via_sympy(X, res, 4)


def test_degree_beyond_cap_rejected():
    with pytest.raises(ValueError):
        normalize_to_degree(vfield(["x1"], cap=3), 5)


def test_torus_generators_for_shear():
    X = vfield(["x1", "2*x2 + x1^3"])
    res = normalize_to_degree(X, 4)
    gens = torus_generators_truncated(res, 4)
    assert len(gens.generators) == 1
    Z = gens.generators[0]
    # iota * rho = t * (1, 2) up to the sign absorbed by gamma
    assert Z == X.with_cap(4).scale(F.iota * gens.decomp.rhos[0][0])
    assert lie_bracket(Z, X.with_cap(4)).order() is None
    Xs = semisimple_from_generators(res.decomp, gens.diagonal)
    assert Xs == res.lin.semisimple(4)


def test_torus_generators_already_normal():
    X = vfield(["x1", "-x2 + x1*x2^2"])
    res = normalize_to_degree(X, 5)
    gens = torus_generators_truncated(res, 5)
    assert gens.generators == gens.diagonal


def test_torus_needs_iota():
    K = NumberField([-2, 0, 1])
    X = VectorFieldJet([TruncatedSeries.variable(K, 1, 0)], None)
    res = normalize_to_degree(X, 3)
    with pytest.raises(MissingIota):
        torus_generators_truncated(res, 3)


# ------------------------------------------------------------ properties

def _random_jet(data, n, maxdeg):
    base = data.draw(st.sampled_from([F(1), F.iota, F("1 + t")]))
    ks = [data.draw(st.integers(-3, 3)) or 1 for _ in range(n)]
    comps = []
    for j in range(n):
        terms = {tuple(int(i == j) for i in range(n)): base * ks[j]}
        for k in range(2, maxdeg + 1):
            for a in monomials(n, k):
                if data.draw(st.integers(0, 4)) == 0:
                    terms[a] = F(data.draw(st.integers(-2, 2)))
        comps.append(TruncatedSeries(F, n, terms))
    return VectorFieldJet(comps, None)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.data())
def test_normalization_contract(n, data):
    M = 4 if n < 3 else 3
    X = _random_jet(data, n, M)
    res = normalize_to_degree(X, M)
    Y = res.normalized
    nr, _ = split_resonant(res.lin, Y - Y.homogeneous(1).with_cap(M))
    assert nr.is_zero()
    assert is_normal_form(Y, res.lin)
    assert conjugacy_via_sympy(X, res, M)
    # determinism
    assert normalize_to_degree(X, M).normalized == Y


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 3), st.data())
def test_truncated_torus_properties(n, data):
    M = 4 if n == 2 else 3
    X = _random_jet(data, n, M).with_cap(M)
    res = normalize_to_degree(X, M)
    gens = {m: torus_generators_truncated(res, m).generators for m in range(2, M + 1)}
    for m, Zs in gens.items():
        for Z in Zs:
            o = lie_bracket(Z, X).order()
            assert o is None or o > m
        for a in Zs:
            for b in Zs:
                o = lie_bracket(a, b).order()
                assert o is None or o > m
    for m in gens:
        for m2 in gens:
            lo = min(m, m2)
            for a, b in zip(gens[m], gens[m2]):
                assert a.agrees_with(b, lo)
