import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dulac.checks import verdict
from dulac.errors import (
    DenominatorNotSemiInvariant,
    MixedTorusWeights,
    NotAFirstIntegral,
    NotASemiInvariant,
    NotCommuting,
    NotInNormalForm,
)
from dulac.resonance import toric_decompose
from dulac.scalars import gaussian_rationals, parse_scalar
from dulac.series import TruncatedSeries
from dulac.walcher import (
    DarbouxFunction,
    RationalVectorField,
    SemiInvariant,
    make_semi_invariant,
    torus_cofactor_split,
    verify_commutant_conservation,
    verify_darboux_conservation,
    walcher_normalize,
)
from oracle import QI2_SQRT2, qi2, series, sym_series, sym_truncate, vfield, xs

F = gaussian_rationals()


def one_d_result(M=5):
    X = vfield(["x1"])
    si = make_semi_invariant(X, series("x1 + x1^2", 1), M=M)
    return X, si, walcher_normalize(X, si, M, toric_decompose([F(1)]))


def test_one_dimensional_fixture_against_sympy():
    X, si, res = one_d_result()
    (x,) = xs(1)
    lam = sympy.series((1 + 2 * x) / (1 + x), x, 0, 5).removeO()
    beta = sympy.series(1 / (1 + x), x, 0, 5).removeO()
    assert sym_series(si.cofactor) == sympy.expand(lam)
    assert sym_series(res.beta) == sympy.expand(beta)
    assert res.F_star == series("x1", 1, cap=5)
    assert res.lambda_star == series("1", 1, cap=4)
    assert res.lambda0 == F(1)
    assert verdict(res.checks) is True


def test_cofactor_already_invariant_gives_unit_beta():
    X = vfield(["x1", "-x2"])
    si = make_semi_invariant(X, series("x1 + x1^2*x2"), M=6)
    res = walcher_normalize(X, si, 6)
    assert si.cofactor == series("1", cap=5)
    assert res.beta == series("1", cap=5)
    assert res.F_star == si.F


def test_idempotence():
    X, _, res = one_d_result()
    again = walcher_normalize(X, SemiInvariant(res.F_star, res.lambda_star), 5)
    assert (again.beta - 1).is_zero()


def test_unit_freedom():
    # u = 1 + xy is X^s-invariant for the saddle
    X = vfield(["x1 + x1^2*x2", "-x2 - x1*x2^2"])
    G = series("x1 + x1^2")
    a = walcher_normalize(X, make_semi_invariant(X, G, M=6), 6)
    b = walcher_normalize(X, make_semi_invariant(X, G * series("1 + x1*x2"), M=6), 6)
    assert a.lambda_star == b.lambda_star and a.lambda0 == b.lambda0
    ratio = b.F_star.divide(a.F_star)
    assert ratio.constant_term() == F(1)


def test_saddle_with_nontrivial_beta_matches_sympy():
    M = 6
    X = vfield(["x1 + x1^2*x2", "-x2 - x1*x2^2"])
    si = make_semi_invariant(X, series("x1 + x1^2"), M=M)
    res = walcher_normalize(X, si, M, toric_decompose([F(1), F(-1)]))
    assert verdict(res.checks) is True
    x1, x2 = xs(2)
    # independent route: beta * F computed by sympy
    expected = sym_truncate(sym_series(res.beta) * (x1 + x1**2), 2, M)
    assert sym_series(res.F_star) == expected
    assert all(a[0] == a[1] for a in res.lambda_star.terms)


def test_semi_invariant_errors():
    X = vfield(["x1", "-x2"])
    with pytest.raises(NotASemiInvariant):
        make_semi_invariant(X, series("x1 + x2"), M=4)
    with pytest.raises(NotASemiInvariant):
        make_semi_invariant(X, series("x1"), series("2"), M=4)
    with pytest.raises(NotInNormalForm):
        walcher_normalize(vfield(["x1", "2*x2 + x1^3"]), SemiInvariant(series("x1"), series("1")), 4)


def test_torus_cofactor_split_examples():
    d = toric_decompose([F(1), F(-1)])
    cof, w = torus_cofactor_split(d, series("x1"))
    assert w == (1,)
    assert d.gammas[0] * cof[0] == F(1)
    assert torus_cofactor_split(d, series("x1*x2"))[1] == (0,)
    assert torus_cofactor_split(d, series("x1^2"))[1] == (2,)
    with pytest.raises(MixedTorusWeights):
        torus_cofactor_split(d, series("x1 + x2"))


def test_darboux_conservation_saddle():
    rep = verify_darboux_conservation(vfield(["x1", "-x2"]), DarbouxFunction([(series("x1*x2"), F(1))]),
                                      toric_decompose([F(1), F(-1)]), 6)
    assert rep.passed is True
    rep = verify_darboux_conservation(vfield(["x1", "-x2"]),
                                      DarbouxFunction([(series("x1"), F(1)), (series("x2"), F(1))]),
                                      toric_decompose([F(1), F(-1)]), 6)
    assert [str(c.constant_term()) for c in rep.cofactors] == ["1", "-1"]


def test_darboux_conservation_negative():
    with pytest.raises(NotAFirstIntegral) as exc:
        verify_darboux_conservation(vfield(["x1", "2*x2"]), DarbouxFunction([(series("x1*x2"), F(1))]),
                                    toric_decompose([F(1), F(2)]), 4)
    assert exc.value.residual == "3 * x1*x2"


def test_irrational_exponent_integral():
    K = qi2()
    s2 = parse_scalar(QI2_SQRT2, K)
    X = vfield(["x1", "-s*x2".replace("s", f"({s2})")], field=K)
    P = DarbouxFunction([(series("x1", field=K), s2), (series("x2", field=K), K(1))])
    d = toric_decompose([K(1), -s2])
    assert d.tau == 2
    rep = verify_darboux_conservation(X, P, d, 6)
    by_name = {c.name: c for c in rep.checks}
    assert by_name["X^s(P) = 0 (cleared)"].passed
    assert by_name["sum_j c_j lambda_j(0) = 0"].passed
    # each torus generator scales x^sqrt2 y by a nonzero constant: the
    # identity Z_i(P) = 0 needs rational exponents
    assert by_name["Z_1(P) = 0 (cleared)"].passed is False
    assert by_name["Z_1(P) = 0 (cleared)"].detail["rational_exponents"] is False
    total = sum((g * row[0] * s2 + g * row[1] for g, row in zip(d.gammas, rep.torus_cofactors)), K(0))
    assert total == K(0)


def test_commutant_conservation():
    d = toric_decompose([F(1), F(-1)])
    one = series("1")
    rep = verify_commutant_conservation(vfield(["x1", "-x2"]), RationalVectorField(vfield(["x1", "0"]), one), d, 6)
    assert rep.passed is True
    Y = RationalVectorField(vfield(["x1", "0"]), series("1 - x1*x2"))
    rep = verify_commutant_conservation(vfield(["x1", "-x2"]), Y, d, 6)
    assert rep.passed is True
    assert rep.cofactors[0].is_zero()
    X = vfield(["x1 + x1^2*x2", "-x2 - x1*x2^2"])
    Y = RationalVectorField(vfield(["x1", "-x2"]), series("1 - x1*x2"))
    assert verify_commutant_conservation(X, Y, d, 6).passed is True


def test_commutant_negative():
    d = toric_decompose([F(1), F(-1)])
    with pytest.raises(NotCommuting) as exc:
        verify_commutant_conservation(vfield(["x1", "-x2"]), RationalVectorField(vfield(["x2", "0"]), series("1")), d, 4)
    assert exc.value.degree == 1
    # X(F) = x not divisible by F = 1 + y: [X, Y'/F] = 0 fails first
    with pytest.raises((NotCommuting, DenominatorNotSemiInvariant)):
        verify_commutant_conservation(vfield(["x1", "-x2"]),
                                      RationalVectorField(vfield(["x1", "0"]), series("1 + x1")), d, 4)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4), st.integers(1, 3))
def test_walcher_invariants_on_random_units(cs, k):
    # F = x^k * u with a random unit u; X the resonant saddle
    M = 5
    X = vfield(["x1 + x1^2*x2", "-x2 - x1*x2^2"])
    u = TruncatedSeries(F, 2, {(0, 0): 1, (1, 0): cs[0], (0, 1): cs[1], (1, 1): cs[2], (2, 0): cs[3]})
    G = series(f"x1^{k}") * u
    si = make_semi_invariant(X, G, M=M)
    res = walcher_normalize(X, si, M, toric_decompose([F(1), F(-1)]))
    assert verdict(res.checks) is True
    again = walcher_normalize(X, SemiInvariant(res.F_star, res.lambda_star), M)
    assert (again.beta - 1).is_zero()
