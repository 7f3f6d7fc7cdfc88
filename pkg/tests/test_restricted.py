import pytest
import sympy

from qgb.hopf import counit
from qgb.qgroup import build
from qgb.restricted import (NoWitness, RibbonWitness, central_suite, counit_check, distinguished_check,
                            double_condition, double_matrix, dual_integral_check, hopf_ideal_suite,
                            integral_check, integral_elements, pairing_matrix_exponents, restricted_dimension,
                            restricted_instance, ribbon_solve)
from qgb.rootsys import RootSystemError


@pytest.fixture(scope="module")
def rinst():
    return restricted_instance(2, 5, 1, 4)


@pytest.fixture(scope="module")
def sinst():
    return build(2, "specialized", 5, 1, 4)


def passing(recs):
    return recs and all(r.status == "PASS" for r in recs)


def test_dimension():
    assert restricted_dimension(2, 5) == 5 ** 12
    assert restricted_dimension(3, 7) == 7 ** 24
    with pytest.raises(RootSystemError):
        restricted_dimension(1, 5)
    with pytest.raises(ValueError):
        restricted_instance(2, 4, 1, 3)


def test_centrality(sinst):
    recs = central_suite(sinst)
    assert len(recs) == 12 and passing(recs)


def test_lower_powers_are_not_central(sinst):
    x = sinst.E(1, 2) ** 4
    assert not (x * sinst.f(1) - sinst.f(1) * x).is_zero()


def test_hopf_ideal(sinst):
    assert passing(hopf_ideal_suite(sinst))


def test_integrals(rinst):
    assert passing(integral_check(rinst, "left"))
    assert passing(integral_check(rinst, "right"))
    assert passing(counit_check(rinst))
    assert passing(distinguished_check(rinst))


def test_integral_controls(rinst):
    ie = integral_elements(rinst)
    e1 = rinst.e(1)
    assert not (e1 * ie.t).is_zero()                             # t alone is not an integral
    assert not (rinst.w(1) * ie.x - ie.x).is_zero()             # nor is x alone
    assert (e1 * ie.y).is_zero() and counit(ie.y) == 0
    shorter = ie.t * rinst.e(1) ** 3
    assert not (e1 * shorter).is_zero()
    with pytest.raises(ValueError):
        integral_elements(build(2))


def test_double_condition_matrix():
    for n in range(2, 6):
        dc = double_condition(n, 5, 1, 4)
        assert dc.closed_form_ok and dc.from_pairing_ok
    y, z = sympy.symbols("y z")
    assert sympy.expand(double_matrix(2).det()) == 2 * y ** 2 + 2 * z ** 2
    assert double_matrix(3) == pairing_matrix_exponents(3)


def test_double_condition_values():
    dc = double_condition(2, 5, 1, 4)
    assert (dc.det, dc.gcd, dc.holds) == (34, 1, True)
    assert str(dc) == "gcd(34,5)=1: holds"
    fails = double_condition(2, 5, 1, 2)                        # 2 + 8 = 10
    assert fails.det == 10 and not fails.holds


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ribbon_witnesses(n):
    for ell in (3, 5, 7, 9):
        w = ribbon_solve(n, ell)
        assert isinstance(w, RibbonWitness)
        for j, a in enumerate(w.a, start=1):
            assert (2 * a + j * (2 * n - j)) % ell == 0
    for ell in (4, 6, 8):
        assert isinstance(ribbon_solve(n, ell), NoWitness)


def test_ribbon_checks():
    w = ribbon_solve(2, 5, 1, 4)
    assert w.a == (1, 3)
    assert str(w) == "witness a=(1, 3)"
    assert passing(w.checks)


def test_dual_integrals(rinst):
    recs = dual_integral_check(rinst)
    assert passing(recs)


def test_dual_integrals_respect_the_bound(rinst):
    recs = dual_integral_check(rinst, degree_bound=5)
    assert {r.status for r in recs} == {"INCONCLUSIVE"}
