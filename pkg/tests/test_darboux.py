import random

import pytest
from hypothesis import given, settings, strategies as st

from dulac.darboux import (
    certify,
    check_commuting,
    check_first_integrals,
    check_independence,
    commutator_cleared,
    cofactor_candidates,
    find_semi_invariants,
    first_integral_cleared,
    sample_points,
    validate_semi_invariant,
)
from dulac.scalars import Q, gaussian_rationals
from dulac.walcher import DarbouxFunction, RationalVectorField
from oracle import series, vfield

F = gaussian_rationals()


def rvf(comps, denom="1", n=2):
    return RationalVectorField(vfield(comps), series(denom, n))


def test_commuting_pair_with_denominator():
    X = rvf(["x1", "-x2"])
    Y = rvf(["x1", "0"], "1 - x1*x2")
    checks = check_commuting([X, Y])
    assert [c.passed for c in checks] == [True]
    assert checks[0].name == "[X_1, X_2] = 0"


def test_noncommuting_residual():
    checks = check_commuting([rvf(["x1", "0"]), rvf(["x2", "0"])])
    assert checks[0].passed is False
    assert checks[0].residual == "[-1 * x2, 0]"


def test_euler_field_is_not_integrated_by_xy():
    checks = check_first_integrals([rvf(["x1", "x2"])], [DarbouxFunction([(series("x1*x2"), F(1))])])
    assert checks[0].passed is False and checks[0].residual == "2 * x1*x2"


def test_saddle_certificate():
    cert = certify([rvf(["x1", "-x2"])], [DarbouxFunction([(series("x1*x2"), F(1))])])
    assert cert.passed is True and cert.exact
    assert cert.independence[0].detail["field_rank"] == 1


def test_dependent_integrals_inconclusive():
    Ps = [DarbouxFunction([(series("x1*x2", 3), F(1))]), DarbouxFunction([(series("x1*x2", 3), F(2))])]
    X = RationalVectorField(vfield(["x1", "-x2", "0"]), series("1", 3))
    checks = check_independence([X], Ps)
    assert checks[0].passed is None
    assert checks[0].detail["best_ranks"] == [1, 1]


def test_wrong_count_fails():
    checks = check_independence([rvf(["x1", "-x2"])], [])
    assert checks[0].passed is False and checks[0].name == "p + q = n"


def test_three_dimensional_certificate():
    X = RationalVectorField(vfield(["x1", "-x2", "t*x3"]), series("1", 3))
    Y = RationalVectorField(vfield(["0", "0", "x3"]), series("1", 3))
    P = DarbouxFunction([(series("x1*x2", 3), F(1))])
    cert = certify([X, Y], [P])
    assert cert.passed is True
    assert cert.independence[0].detail["field_rank"] == 2
    assert cert.independence[0].detail["integral_rank"] == 1


def test_truncated_mode_reports_degree():
    X = RationalVectorField(vfield(["x1", "-x2"], cap=4), series("1", cap=4))
    checks = check_first_integrals([X], [DarbouxFunction([(series("x1 + x2", cap=4), F(1))])], M=4)
    assert checks[0].passed is False and checks[0].through == 4 and checks[0].degree == 1


def test_sample_points_are_deterministic_and_nonzero():
    a = list(sample_points(2, 2))
    assert a == list(sample_points(2, 2))
    assert a[0] == (Q(1), Q(1))
    assert all(all(c != 0 for c in p) for p in a)
    assert len(set(a)) == len(a)


def test_semi_invariant_search_examples():
    X = vfield(["x1", "2*x2 + x1^2"], cap=4)
    sols = find_semi_invariants(X, 2, M=4)
    found = {(s.G.truncate(2).__str__(), str(s.lambda0)) for s in sols}
    assert ("1 * x1", "1") in found
    assert ("1 * x1^2", "2") in found
    for s in sols:
        assert validate_semi_invariant(X, s.G, s.cofactor, 4)


def test_semi_invariant_search_saddle():
    X = vfield(["x1", "-x2"], cap=4)
    lows = {str(s.G) for s in find_semi_invariants(X, 2, M=4)}
    assert {"1 * x1", "1 * x2", "1 * x1^2", "1 * x1*x2", "1 * x2^2"} <= lows


def test_cofactor_candidates():
    assert cofactor_candidates([F(1), F(-1)], 2) == [F(1), F(-1), F(2), F(0), F(-2)]


# ---------------------------------------------------------- properties

def _point(rnd, n):
    return [Q(rnd.choice([-1, 1]) * rnd.randint(1, 9), rnd.randint(1, 9)) for _ in range(n)]


def _verdict_by_points(expr_values):
    return all(not v for v in expr_values)


def test_pointwise_reverification_agrees():
    rnd = random.Random(7)
    cases = [
        ([rvf(["x1", "-x2"]), rvf(["x1", "0"], "1 - x1*x2")], [DarbouxFunction([(series("x1*x2"), F(1))])]),
        ([rvf(["x1", "0"]), rvf(["x2", "0"])], []),
        ([rvf(["x1", "x2"])], [DarbouxFunction([(series("x1*x2"), F(1))])]),
        ([rvf(["x1", "-x2"])], [DarbouxFunction([(series("x1"), F(1)), (series("x2"), F(1))])]),
    ]
    for fields, integrals in cases:
        pts = [_point(rnd, 2) for _ in range(10)]
        for c in check_commuting(fields):
            i, j = (k - 1 for k in c.detail["pair"])
            e = commutator_cleared(fields[i].numer, fields[i].denom, fields[j].numer, fields[j].denom)
            assert c.passed == _verdict_by_points(comp.evaluate(p) for p in pts for comp in e)
        for c in check_first_integrals(fields, integrals):
            i, j = (k - 1 for k in c.detail["pair"])
            e = first_integral_cleared(fields[i], integrals[j])
            assert c.passed == _verdict_by_points(e.evaluate(p) for p in pts)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=2), st.integers(-3, 3).filter(bool), st.booleans())
def test_first_integral_invariances(ab, k, swap):
    # x^b y^a is a first integral of a x d/dx - b y d/dy; rescaling exponents keeps that
    a, b = ab
    X = rvf([f"{a}*x1", f"-{b}*x2"])
    P = DarbouxFunction([(series("x1"), F(b)), (series("x2"), F(a))])
    Pk = DarbouxFunction([(G, c * k) for G, c in P.factors])
    assert check_first_integrals([X], [P])[0].passed
    assert check_first_integrals([X], [Pk])[0].passed
    Pperm = DarbouxFunction(list(reversed(P.factors)) if swap else P.factors)
    assert check_first_integrals([X], [Pperm])[0].passed
    bad = DarbouxFunction([(series("x1"), F(b + 1)), (series("x2"), F(a))])
    assert check_first_integrals([X], [bad])[0].passed is False


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=3, max_size=3), st.sampled_from([(1, -1), (1, 2), (2, 3)]))
def test_found_semi_invariants_validate(cs, lam):
    M = 4
    X = vfield([f"{lam[0]}*x1 + {cs[0]}*x1^2*x2", f"{lam[1]}*x2 + {cs[1]}*x1*x2^2 + {cs[2]}*x2^3"], cap=M)
    for s in find_semi_invariants(X, 2, M=M):
        assert validate_semi_invariant(X, s.G, s.cofactor, M)
        assert s.cofactor.constant_term() == s.lambda0


def test_search_rejects_large_degree():
    with pytest.raises(ValueError):
        find_semi_invariants(vfield(["x1", "-x2"], cap=3), 4, M=3)
