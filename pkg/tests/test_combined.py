import pytest
from hypothesis import given, settings, strategies as st

from combinterp.combined import CombinedChecker, combined_check_sat, eval3, verify_interpolant
from combinterp.core import BudgetExceeded
from generators import random_mixed
from helpers import F, fs
from oracles import find_model, int_values


@pytest.mark.parametrize("lits, sat", [
    (["(= (f x) (f y))", "(< x y)"], True),
    (["(< x y)", "(< y (+ x 2))", "(not (= (f (+ x 1)) (f y)))"], False),
    (["(= (f x) (+ y 1))", "(= (f x) y)"], False),
    (["(or (= x y) (< x y))", "(not (= (f x) (f y)))", "(not (< x y))"], False),
    (["(P x)", "(not (P y))", "(< x (+ y 1))", "(< y (+ x 1))"], False),
    (["(P x)", "(not (P y))", "(< x (+ y 2))"], True),
    (["(not (= (f a) (f b)))", "(not (= (f a) (f c)))", "(not (= (f b) (f c)))",
      "(< 0 a)", "(< a 3)", "(< 0 b)", "(< b 3)", "(< 0 c)", "(< c 3)"], False),
])
def test_examples(lits, sat):
    assert combined_check_sat(fs(*lits)) is sat


def test_eval3():
    f = F("(or (= x y) (< x y))")
    assert eval3(f, {}) is None
    assert eval3(f, {F("(< x y)"): True}) is True
    assert eval3(f, {F("(< x y)"): False, F("(= x y)"): False}) is False


def test_budget():
    lits = fs("(not (= (f a) (f b)))", "(not (= (f a) (f c)))", "(not (= (f b) (f c)))",
              "(< 0 a)", "(< a 3)", "(< 0 b)", "(< b 3)", "(< 0 c)", "(< c 3)")
    with pytest.raises(BudgetExceeded):
        CombinedChecker(budget_nodes=1).check_sat(lits)
    assert CombinedChecker(budget_nodes=1).unsat(lits) is None


def test_verify_interpolant_examples():
    a, b = fs("(< x y)"), fs("(< y x)")
    assert verify_interpolant(a, b, F("(< x y)")).ok
    rep = verify_interpolant(a, b, F("(< x (+ y 5))"))
    assert rep.entailed_by_a and not rep.inconsistent_with_b
    rep = verify_interpolant(fs("(< x a)", "(< a y)"), b, F("(< x a)"))
    assert not rep.shared_symbols and not rep.ok


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_against_brute_force(rng):
    fsets = random_mixed(rng)
    model = find_model(fsets, int_values(5))
    # a model found in the window proves SAT; a SAT verdict without one is
    # left alone since the window may simply be too small
    assert combined_check_sat(fsets) or model is None
