import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from qgb.coeff import R, S
from qgb.hopf import (PmTable, Tensor, antipode, coproduct, coproduct_suite, counit, eta_suite, hopf_axioms,
                      iso_family, iso_suite, iso_verify, pairing_suite, skew_primitive_check,
                      skew_primitive_suite, verify_coproduct_formula)
from qgb.qgroup import build
from qgb.restricted import restricted_instance

N2, N3 = build(2), build(3)


def generators(inst):
    out = []
    for i in range(1, inst.n + 1):
        out += [inst.e(i), inst.f(i), inst.w(i), inst.wp(i, -1)]
    return out


def products(inst, max_len=3):
    gens = generators(inst)
    return st.lists(st.sampled_from(range(len(gens))), min_size=1, max_size=max_len).map(
        lambda idx: _prod(inst, [gens[k] for k in idx]))


def _prod(inst, xs):
    out = inst.one()
    for x in xs:
        out = out * x
    return out


@settings(max_examples=25, deadline=None)
@given(products(N2))
def test_hopf_axioms_generic(x):
    assert all(hopf_axioms(x).values())


@settings(max_examples=10, deadline=None)
@given(products(restricted_instance(2, 5, 1, 4)))
def test_hopf_axioms_restricted(x):
    assert all(hopf_axioms(x).values())


@settings(max_examples=20, deadline=None)
@given(products(N2, 2), products(N2, 2))
def test_structure_maps_respect_products(x, y):
    assert coproduct(x * y) == coproduct(x) * coproduct(y)
    assert counit(x * y) == counit(x) * counit(y)
    assert antipode(x * y) == antipode(y) * antipode(x)


def test_simple_coproducts():
    e1, w1 = N2.e(1), N2.w(1)
    assert coproduct(e1) == Tensor.pure(e1, N2.one()) + Tensor.pure(w1, e1)
    assert antipode(e1) == -(N2.w(1, -1) * e1)
    assert counit(e1) == 0


@pytest.mark.parametrize("tag,n", [("4.3.i", 2), ("4.3.i", 3), ("4.3.ii", 3), ("4.6", 2)])
def test_coproduct_formulas_hold(tag, n):
    recs = coproduct_suite(build(n), tag)
    assert recs and all(r.status == "PASS" for r in recs)


def test_power_formulas_away_from_the_short_index():
    recs = coproduct_suite(N3, "4.5") + coproduct_suite(N3, "4.8")
    assert all(r.status == "PASS" for r in recs if "j=3" not in r.params)


def test_printed_simple_power_fails_at_the_short_index():
    assert verify_coproduct_formula(N2, "simple-power", 0, 2, 2).status == "FAIL"
    assert verify_coproduct_formula(N2, "simple-power", 0, 2, 2, reading="indexed").status == "PASS"


def test_short_power_mismatch_is_localized():
    chk = verify_coproduct_formula(N2, "short-power", 1, 2, 3)
    assert chk.strata
    if chk.status == "FAIL":
        assert len(chk.mismatched) == 1


@pytest.mark.parametrize("m,variant", [(2, "standard"), (3, "standard"), (5, "standard"), (4, "primed"), (5, "primed")])
def test_pm_table_is_well_defined(m, variant):
    assert PmTable(m, variant).check_well_defined(6) == []


def test_pm_table_rejects_bad_input():
    with pytest.raises(ValueError):
        PmTable(3, "primed")
    with pytest.raises(ValueError):
        PmTable(3)((1, -1, 0))


@pytest.mark.parametrize("group,n", [("so", 2), ("sl", 2), ("sl", 3)])
def test_hopf_maps(group, n):
    assert all(r.status == "PASS" for r in iso_suite(group, n))


def test_hopf_map_with_wrong_parameters_fails():
    iso = iso_family("sl", 3, 3)
    bad = dataclasses.replace(iso, params=(R, S))
    assert iso_verify(iso).status == "PASS"
    assert iso_verify(bad).status == "FAIL"


def test_skew_primitives():
    inst = restricted_instance(2, 5, 1, 4)
    assert all(r.status == "PASS" for r in skew_primitive_suite(inst))
    assert not skew_primitive_check(inst.e(1), inst.one(), inst.wp(1))


def test_pairing():
    assert all(r.status == "PASS" for r in pairing_suite(N2, 1))


def test_eta_functionals():
    recs = eta_suite(restricted_instance(2, 5, 1, 4))
    assert recs and all(r.status == "PASS" for r in recs)
