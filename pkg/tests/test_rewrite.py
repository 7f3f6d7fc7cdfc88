import pytest
from hypothesis import given, settings, strategies as st

from qgb.coeff import R, S
from qgb.freealg import Element, e, f, parse_expression, w, wp
from qgb.qgroup import build
from qgb.rewrite import (BudgetError, Counterexample, DegreeTooLarge, IdealOracle, Inconclusive,
                         ZeroCertificate, certify_identity, default_budget, expand_generators,
                         ideal_membership_oracle, local_confluence, RewriteRule, RuleSet, normal_form, replay, rewrite_normal_form,
                         serre_relations)

N2 = build(2)


def nf(text, inst=N2):
    return normal_form(parse_expression(text), inst.pbw_rules)


@pytest.mark.parametrize("text,expected", [
    ("e2*e1", "r^-2 e1 e2 - r^-2 E(1,2)"),
    ("e1*E(1,2) - s^2*E(1,2)*e1", "0"),
    ("1", "1"),
    ("w1 w1^-1 W2^-1 W2", "1"),
])
def test_normal_form_examples(text, expected):
    assert str(nf(text)) == expected


def test_cross_relation():
    d = (R ** 2 - S ** 2).inverse()
    assert nf("e1 f1 - f1 e1") == parse_expression("w1 - W1") * d
    assert nf("e1 f2 - f2 e1") == Element()


gen_letters = st.sampled_from([e(1), e(2), f(1), f(2), w(1), wp(2, -1)])
plus_letters = st.sampled_from([e(1), e(2)])


@settings(max_examples=30, deadline=None)
@given(st.lists(gen_letters, max_size=5))
def test_naive_and_structured_engines_agree(word):
    x = Element.word(*word)
    slow, _ = rewrite_normal_form(x, N2.pbw_rules)
    assert slow == normal_form(x, N2.pbw_rules)


@settings(max_examples=25, deadline=None)
@given(st.lists(plus_letters, min_size=1, max_size=6))
def test_normal_form_differs_by_an_ideal_element(word):
    x = Element.word(*word)
    back = expand_generators(normal_form(x, N2.pbw_rules), N2.system)
    assert ideal_membership_oracle(back - x, 2)


@settings(max_examples=15, deadline=None)
@given(st.lists(gen_letters, min_size=1, max_size=5))
def test_trace_replays(word):
    x = Element.word(*word)
    res, tr = normal_form(x, N2.pbw_rules, trace=True)
    assert replay(x, tr, N2.pbw_rules) == res


def test_budget_errors():
    x = parse_expression("e2*e1*e2*e2*e1*e2*e1*e1")
    with pytest.raises(BudgetError):
        rewrite_normal_form(x, N2.pbw_rules, budget=3)
    with pytest.raises(BudgetError):
        # the structured engine memoizes products, so use a word nothing else computes
        normal_form(parse_expression("e4 e3 e2 e1 e4 e3 e2 e1 e4"), build(4).pbw_rules, budget=2)
    res = certify_identity(x, Element(), N2.pbw_rules.without(), budget=2)
    assert isinstance(res, Inconclusive)


def test_default_budget_env(monkeypatch):
    monkeypatch.setenv("QGB_BUDGET", "17")
    assert default_budget() == 17
    monkeypatch.setenv("QGB_BUDGET", "many")
    with pytest.raises(ValueError):
        default_budget()
    monkeypatch.delenv("QGB_BUDGET")
    assert default_budget() == 10 ** 6


def test_certify_outcomes():
    rules = N2.pbw_rules
    lhs = parse_expression("e1*E(1,2)")
    assert isinstance(certify_identity(lhs, parse_expression("s^2*E(1,2)*e1"), rules), ZeroCertificate)
    bad = certify_identity(lhs, parse_expression("r^2*E(1,2)*e1"), rules)
    assert isinstance(bad, Counterexample) and bad.residue
    with pytest.raises(ValueError):
        certify_identity(lhs, lhs)


@pytest.mark.parametrize("n", [2, 3])
def test_rule_sets_are_oriented_and_locally_confluent(n):
    inst = build(n)
    for rules in (inst.generator_rules, inst.pbw_rules):
        assert rules.check_orientation() == []
        assert local_confluence(rules) == []


def test_confluence_detects_a_corrupted_rule():
    rules = N2.generator_rules
    kept = []
    for r in rules:
        if r.lhs == (w(1), e(1)):
            r = RewriteRule(r.lhs, r.rhs * 2, r.source)
        kept.append(r)
    broken = RuleSet(rules.system, rules.mode, kept)
    assert local_confluence(broken)


def test_restricted_rules():
    inst = build(2, "restricted", 5, 1, 4)
    rules = inst.pbw_rules
    assert normal_form(parse_expression("e1^5"), rules) == Element()
    assert str(normal_form(parse_expression("W2^5"), rules)) == "1"
    assert normal_form(parse_expression("e1^4"), rules)


def test_oracle_on_relations():
    system = N2.system
    for _src, rel in serre_relations(system):
        assert ideal_membership_oracle(rel, 2)
    assert not ideal_membership_oracle(parse_expression("e1*e2"), 2)
    with pytest.raises(DegreeTooLarge):
        ideal_membership_oracle(parse_expression("e1^5*e2^4"), 2)
    assert IdealOracle(2, (1, 1)).quotient_dimension() == 2
