import random

import pytest
from hypothesis import given, settings, strategies as st

from combinterp.core import BOT, TOP, Eq, Lt, Not, PreconditionError, const, offset, ZERO_TERM
from combinterp.idl import (
    DiffAtom, IDLSolver, idl_check_sat, idl_equality_interpolate, idl_interpolate, idl_normalize,
    idl_qe,
)
from combinterp.theory import check_interpolant, check_witness
from helpers import F, T, fs
from oracles import eval_formula, exists_brute, find_model, int_values

x, y, z = const("x"), const("y"), const("z")


@pytest.mark.parametrize("text, expect", [
    ("(< x y)", DiffAtom(x, y, 0, "<")),
    ("(< (+ x 2) (- y 1))", DiffAtom(x, y, -3, "<")),
    ("(not (< x y))", DiffAtom(y, x, 1, "<")),
    ("(= (+ x 1) y)", DiffAtom(x, y, -1, "=")),
    ("(not (= x y))", DiffAtom(x, y, 0, "!=")),
])
def test_normalize_examples(text, expect):
    assert idl_normalize(F(text)) == [expect]


def test_normalize_trivial():
    assert idl_normalize(F("(< x (+ x 1))")) == TOP
    assert idl_normalize(F("(< x x)")) == BOT
    assert idl_normalize(F("(not (= x x))")) == BOT
    with pytest.raises(PreconditionError):
        idl_normalize(F("(= (f x) y)"))


def test_check_sat_examples():
    r = idl_check_sat(fs("(< x y)", "(< y z)"))
    assert r.sat and r.model["x"] < r.model["y"] < r.model["z"]
    r = idl_check_sat(fs("(< x y)", "(< y z)", "(< z (+ x 1))"))
    assert not r.sat and sum(e.w for e in r.cycle) < 0
    assert not idl_check_sat(fs("(< x (+ y 1))", "(< y (+ x 1))", "(not (= x y))")).sat
    assert idl_check_sat(fs("(< x (+ y 2))", "(< y (+ x 2))", "(not (= x y))")).sat


def _random_lits(rng, names, diseq=True):
    out = []
    for _ in range(rng.randint(1, 5)):
        s = offset(const(rng.choice(names)), rng.randint(-2, 2))
        t = const(rng.choice(names)) if rng.random() < 0.8 else ZERO_TERM
        atom = Lt(s, t) if rng.random() < 0.6 else Eq(s, t)
        neg = rng.random() < 0.3 and (diseq or isinstance(atom, Lt))
        out.append(Not(atom) if neg else atom)
    return out


@given(st.randoms(use_true_random=False))
@settings(max_examples=200, deadline=None)
def test_check_sat_against_oracle(rng):
    names = ["x", "y", "z"][: rng.randint(1, 3)]
    lits = _random_lits(rng, names)
    r = idl_check_sat(lits)
    assert r.sat == (find_model(lits, int_values(10)) is not None)
    if r.sat:
        model = {(n, ()): r.model.get(n, 0) for n in names}
        assert all(eval_formula(f, model) for f in lits)


def test_interpolate_examples():
    theta = idl_interpolate(fs("(< a x)", "(< x b)"), fs("(< b (+ a 2))"))
    assert check_interpolant(IDLSolver().check_sat, fs("(< a x)", "(< x b)"),
                             fs("(< b (+ a 2))"), theta, frozenset({"a", "b"}))
    assert str(idl_interpolate(fs("(< x y)"), fs("(< y x)"))) == "(< x y)"


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_interpolants_random(rng):
    a = _random_lits(rng, ["a1", "s1", "s2"])
    b = _random_lits(rng, ["b1", "s1", "s2"])
    if idl_check_sat(a + b).sat:
        return
    theta = idl_interpolate(a, b)
    common = frozenset({"s1", "s2"})
    assert check_interpolant(IDLSolver().check_sat, a, b, theta, common)


def _qe_env(env):
    return {(k, ()): v for k, v in env.items()}


@pytest.mark.parametrize("lits, witnesses", [
    (["(< y x)", "(< x z)"], ["(+ y 1)"]),
    (["(= x (+ y 2))", "(< x z)"], ["(+ y 2)"]),
    (["(< x z)", "(< x y)"], ["(- z 1)", "(- y 1)"]),
    (["(< y x)", "(< z x)", "(< x 0)"], ["(+ y 1)", "(+ z 1)"]),
])
def test_qe_examples(lits, witnesses):
    res = idl_qe(x, fs(*lits))
    assert [str(t) for t in res.witnesses] == [str(T(w)) for w in witnesses]
    assert all("x" not in f.constants() for _, lits in res.disjuncts for f in lits)


def test_qe_rejects_disequality_on_x():
    with pytest.raises(PreconditionError):
        idl_qe(x, fs("(not (= x y))"))


def test_qe_against_brute_force():
    rng = random.Random(7)
    for _ in range(60):
        free = ["y", "z"][: rng.randint(1, 2)]
        lits = _random_lits(rng, ["x"] + free, diseq=False)
        lits = [f for f in lits if not (isinstance(f, Not) and isinstance(f.arg, Eq))]
        if not lits:
            continue
        phi = idl_qe(x, lits).formula()
        for env, truth in exists_brute("x", free, lambda e: all(
                eval_formula(f, _qe_env(e)) for f in lits), -5, 5, -9, 9):
            assert eval_formula(phi, _qe_env(env)) == truth


def test_equality_witness_example():
    a, b = fs("(< x a)", "(< a (+ x 2))"), fs("(< x b)", "(< b (+ x 2))")
    w = idl_equality_interpolate(a, b, [T("a")], [T("b")])
    assert w.terms == (T("(+ x 1)"),)
    assert check_witness(IDLSolver().check_sat, a, b, w.abar, w.bbar, w)


def test_equality_witness_preconditions():
    with pytest.raises(PreconditionError):
        idl_equality_interpolate(fs("(< a b)", "(< b a)"), [], [T("a")], [T("b")])
    with pytest.raises(PreconditionError):
        idl_equality_interpolate(fs("(< a b)"), [], [], [T("b")])
