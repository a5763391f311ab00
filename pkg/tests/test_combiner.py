import random
from pathlib import Path

import pytest

from combinterp.combined import combined_check_sat, verify_interpolant
from combinterp.combiner import (
    Budget, CombinerState, ci_interpolate, decide, share, term_share, terminate,
)
from combinterp.core import BOT, EUF, IDL, BudgetExceeded, PreconditionError
from combinterp.problem import parse_file
from generators import random_pair
from helpers import T, fs

CORPUS = Path(__file__).parent / "corpus"


def state(a, b):
    return CombinerState(tuple(fs(*a)), tuple(fs(*b)))


def test_flagship():
    prob = parse_file(CORPUS / "flagship.itp")
    res = ci_interpolate(prob.a, prob.b)
    assert not res.is_sat
    assert set(res.interpolant.formula.constants()) <= {"x", "z"}
    assert verify_interpolant(prob.a, prob.b, res.interpolant.formula).ok
    assert len(res.stats.shares) >= 1 and not res.stats.violations


def test_single_theory_examples():
    res = ci_interpolate(fs("(< x y)"), fs("(< y x)"))
    assert str(res.interpolant) == "(< x y)"
    res = ci_interpolate(fs("(= a x)", "(= a y)"), fs("(not (= x y))"))
    assert str(res.interpolant) == "(= x y)"


def test_sat_instance():
    res = ci_interpolate(fs("(P c)"), fs("(not (Q c))"))
    assert res.is_sat and res.interpolant is None


def test_budget_is_enforced():
    prob = parse_file(CORPUS / "pigeon.itp")
    with pytest.raises(BudgetExceeded):
        ci_interpolate(prob.a, prob.b, Budget(nodes=3))


def test_decide():
    s = state(["(or (= a x) (< a x))", "(P a)"], ["(= b x)"])
    succ = decide("A", s)
    assert len(succ) == 3
    assert all(F in t.a for t in succ for F in s.a)
    closed = decide("A", state(["(and (< a x) (not (< a x)))"], ["(= b x)"]))
    assert [t.a[-1] for t in closed] == [BOT]
    with pytest.raises(PreconditionError):
        decide("B", s)


def test_terminate():
    s, theta = terminate(IDL, state(["(< a x)", "(< x b)"], ["(< b (+ a 2))"]))
    assert BOT in s.b and set(theta.constants()) <= {"a", "b"}
    with pytest.raises(PreconditionError):
        terminate(EUF, state(["(< a x)"], ["(< x b)"]))


def test_share_euf():
    s = state(["(= a x)"], ["(= b x)", "(not (= a1 b))"])
    out = share(EUF, s)
    assert [t.a for t in out] == [tuple(fs("(= x x)"))]
    assert all(t.strict_count < s.strict_count for t in out)


def test_share_idl_introduces_common_constant():
    s = state(["(= a (+ x 1))"], ["(= b (+ x 1))"])
    (t,) = share(IDL, s)
    assert [str(f) for f in t.a] == ["(= a (+ x 1))", "(= _k0 (+ x 1))"]
    assert [str(f) for f in t.b] == ["(= _k0 (+ x 1))"]
    assert t.strict_count < s.strict_count


def test_share_not_applicable():
    with pytest.raises(PreconditionError):
        share(EUF, state(["(< a x)"], ["(< x b)"]))


def test_term_share():
    s = state(["(= a x)", "(< a y)"], ["(= y x)"])
    t = term_share(s, T("a"), T("x"))
    assert t.a == tuple(fs("(< x y)")) and t.strict_count == 0
    with pytest.raises(PreconditionError):
        term_share(s, T("x"), T("a"))
    with pytest.raises(PreconditionError):
        term_share(s, T("a"), T("y"))


def test_agrees_with_checker_on_random_pairs():
    rng = random.Random(5)
    for _ in range(80):
        a, b = random_pair(rng)
        res = ci_interpolate(a, b, seed=1)
        assert res.is_sat == combined_check_sat(a + b)
        if not res.is_sat:
            assert verify_interpolant(a, b, res.interpolant.formula).ok
            assert not res.stats.violations


def test_seed_keeps_result_valid():
    prob = parse_file(CORPUS / "mixed_two_fun.itp")
    for seed in (None, 0, 1, 2):
        res = ci_interpolate(prob.a, prob.b, seed=seed)
        assert verify_interpolant(prob.a, prob.b, res.interpolant.formula).ok
