import pytest
from hypothesis import given, settings, strategies as st

from qgb.catalog import STRAIGHTENING, corrected, instantiate, iter_instances, lookup
from qgb.freealg import Element, e, f, w, wp
from qgb.qgroup import (ExtendedVectors, _certify, build, transport_checks, pbw_monomials, power_identity_suite,
                        root_vector, standing_assumptions, tau, tau_elt)
from qgb.rewrite import certify_identity
from qgb.rootsys import RootSystemError

N2, N3 = build(2), build(3)


def test_build_modes_and_errors():
    assert N2.mode == "generic" and N2.alg.ell is None
    assert build(2, "specialized", 5, 1, 4).alg.ell is None     # truncation only in restricted mode
    assert build(2, "restricted", 5, 1, 4).alg.ell == 5
    with pytest.raises(RootSystemError):
        build(1)
    with pytest.raises(ValueError):
        build(2, "restricted")
    with pytest.raises(ValueError):
        build(2, "specialized", 3, 1, 2)
    with pytest.raises(ValueError):
        build(2, "quantum")


def test_validated_build():
    assert build(2, validate=True).validated


def test_root_vector_table():
    assert len(N3.table) == 9
    for entry in N3.table:
        assert N3.elt(entry.expansion) == N3.elt(Element.word(entry.letter))
    x = root_vector(2, 1, 2)
    assert len(x) == 2 and x.grade(2) == (1, 1)


@pytest.mark.parametrize("n", [2, 3])
def test_catalog_at_rank(n):
    inst = build(n)
    recs = [_certify(inst, ident.tag, ident, idx) for ident, idx in iter_instances(STRAIGHTENING, n)]
    assert recs and all(r.status == "PASS" for r in recs)


def test_a_perturbed_identity_fails():
    ident = lookup("3.6.8")
    a, b = instantiate(ident, N3.alg, ident.instances(3)[0])
    assert certify_identity(a, b).status == "PASS"
    assert certify_identity(a, b + b).status == "FAIL"


def test_amended_power_identities():
    for n, inst in ((2, N2), (3, N3)):
        for tag, ident in corrected(4).items():
            for idx in ident.instances(n):
                assert _certify(inst, tag, ident, idx).status == "PASS", (tag, idx)


def test_power_suite_statuses():
    recs = power_identity_suite(N2, 2)
    assert {r.status for r in recs} <= {"PASS", "FAIL"}
    assert any(r.status == "PASS" for r in recs)


def test_transport_formulas():
    recs = transport_checks(N3, 4)
    assert len(recs) == 8
    assert all(r.status == "PASS" for r in recs)


def test_pbw_monomials_restricted_truncation():
    mu = (5, 0)
    assert len(pbw_monomials(N2, mu)) == 1
    assert pbw_monomials(build(2, "restricted", 5, 1, 4), mu) == []


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (3, 2)])
def test_diagonal_extended_symbol_closed_form(n, k):
    X = ExtendedVectors(build(n))
    assert (X(k, 2 * n - k + 1) - X.closed_form_diagonal(k)).is_zero()


letters = st.sampled_from([e(1), e(2), f(1), f(2), w(1), wp(2), w(2, -1)])
words = st.lists(letters, max_size=4).map(lambda ws: Element.word(*ws))


@settings(max_examples=30, deadline=None)
@given(words, words)
def test_tau_is_an_involutive_anti_automorphism(x, y):
    assert tau(tau(x)) == x
    assert tau(x * y) == tau(y) * tau(x)
    a, b = N2.elt(x), N2.elt(y)
    assert tau_elt(a * b) == tau_elt(b) * tau_elt(a)
    assert tau_elt(a) == N2.elt(tau(x))


def test_standing_assumptions():
    assert standing_assumptions(5, 1, 4) == []
    assert standing_assumptions(3, 1, 2)
