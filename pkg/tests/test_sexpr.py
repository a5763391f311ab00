import pytest
from hypothesis import given, settings, strategies as st

from combinterp.sexpr import ParseError, Signature, format_formula, parse_formula, read_all
from generators import random_formula
from helpers import SIG, F


def test_sugar_is_restored_on_output():
    assert format_formula(F("(< (succ (succ (succ x))) y)")) == "(< (+ x 3) y)"
    assert format_formula(F("(= (pred x) 2)")) == "(= (- x 1) 2)"
    assert format_formula(F("(not (P (f a)))")) == "(not (P (f a)))"


def test_error_positions():
    with pytest.raises(ParseError) as e:
        read_all("(A\n  (= a b)")
    assert (e.value.line, e.value.col) == (1, 1)
    with pytest.raises(ParseError) as e:
        parse_formula("(= a (f x y))", SIG)
    assert "expects 1 arguments" in str(e.value)


@pytest.mark.parametrize("text", ["(= a (+ x y))", "(< x (- y z))", "(= a (+ x))"])
def test_plus_needs_an_integer(text):
    with pytest.raises(ParseError):
        parse_formula(text, SIG)


def test_idl_needs_enabling_in_plain_signatures():
    sig = Signature()
    sig.declare_const("x")
    with pytest.raises(ParseError):
        parse_formula("(< x 0)", sig)


def test_reserved_prefix_rejected():
    sig = Signature()
    with pytest.raises(ParseError):
        parse_formula("(= _k0 _k0)", sig)


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_print_parse_round_trip(rng):
    phi = random_formula(rng, ["a", "b", "x", "y"])
    assert parse_formula(format_formula(phi), SIG) == phi
