import pytest
from hypothesis import given, settings, strategies as st

from qgb.coeff import R, S
from qgb.freealg import (E, Element, ParseError, TensorElement, e, f, format_element, load_element,
                         dump_element, parse_expression, w, wp)

letters = st.sampled_from([e(1), e(2), f(1), f(2), w(1), w(2, -1), wp(1), wp(2, -1),
                           E(1, 2), E(1, 2, True), E(1, 2).__class__("F", 1, 2)])
coefs = st.sampled_from([1, -1, 2, R, S ** -2, R * S ** 3, R - S, 1 / (R + S)])
elements = st.lists(st.tuples(st.lists(letters, max_size=4), coefs), max_size=4).map(
    lambda terms: sum((Element.word(*ws, coef=c) for ws, c in terms), Element()))


@settings(max_examples=80, deadline=None)
@given(elements)
def test_print_parse_round_trip(x):
    assert parse_expression(format_element(x)) == x


@settings(max_examples=40, deadline=None)
@given(elements)
def test_serialization_round_trip(x):
    assert load_element(dump_element(x)) == x


@settings(max_examples=40, deadline=None)
@given(elements, elements, elements)
def test_free_multiplication_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_parse_examples():
    x = parse_expression("e2*e1 - r^-2 E(1,2)")
    assert x == Element.word(e(2), e(1)) - Element.word(E(1, 2), coef=R ** -2)
    assert parse_expression("(e1 + e2)^2") == parse_expression("e1*e1 + e1*e2 + e2*e1 + e2*e2")
    assert parse_expression("W1^-1 w2") == Element.word(wp(1, -1), w(2))


def test_parse_tensor():
    t = parse_expression("e1 ⊗ w1 + 1 ox e1")
    assert isinstance(t, TensorElement)
    assert str(parse_expression(str(t))) == str(t)


@pytest.mark.parametrize("text,pos", [("e1 * * e2", 5), ("E(1,2", 0), ("e1 + ", 5)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse_expression(text)
    assert err.value.pos == pos
    assert "^" in str(err.value)


def test_grading():
    assert parse_expression("e1*E(1,2')").grade(2) == (2, 2)
    assert isinstance(parse_expression("e1 + e2").grade(2), str)
