import pytest

from combinterp.core import (
    BOT, TOP, Color, Eq, Lt, Not, PApp, app, classify_symbols, conj, const, disj, fun_symbol,
    locality_of, negate, offset, pred, simplify, split_offset, substitute, succ,
)
from helpers import F, T, fs


def test_terms_are_interned():
    assert app(fun_symbol("f", 1), const("x")) is T("(f x)")
    assert const("x") is const("x")


def test_offsets_are_canonical():
    x = const("x")
    assert succ(pred(x)) is x
    assert pred(succ(x)) is x
    assert split_offset(offset(x, 3)) == (x, 3)
    assert T("(+ x 2)") is succ(succ(x))
    assert T("(- (+ x 1) 3)") is pred(pred(x))


def test_equality_is_symmetric():
    assert F("(= a b)") == F("(= b a)")
    assert hash(F("(= a b)")) == hash(F("(= b a)"))
    assert F("(< a b)") != F("(< b a)")


def test_substitute_examples():
    c, t = const("c"), T("(f x)")
    assert substitute(F("(< (succ c) y)"), {c: t}) == F("(< (succ (f x)) y)")
    assert substitute(F("(= a a)"), {const("a"): t}) == Eq(t, t)
    phi = F("(P b)")
    assert substitute(phi, {const("a"): t}) == phi


def test_substitution_with_disjoint_domains_commutes():
    phi = F("(or (= a (f b)) (< b (+ a 1)))")
    s1, s2 = {const("a"): T("(g x)")}, {const("b"): T("y")}
    assert substitute(substitute(phi, s1), s2) == substitute(substitute(phi, s2), s1)


def test_simplify_folds_constants():
    assert simplify(conj([TOP, F("(= a b)")])) == F("(= a b)")
    assert simplify(disj([BOT, BOT])) == BOT
    assert simplify(F("(< x (+ x 1))")) == TOP
    assert simplify(F("(< (+ x 2) x)")) == BOT
    assert simplify(Not(Not(F("(P a)")))) == F("(P a)")
    assert negate(negate(F("(= a b)"))) == F("(= a b)")


def test_coloring_examples():
    a, b = fs("(= a (f x))", "(P x)"), fs("(= b (f x))")
    col = classify_symbols(a, b)
    sym = {s.name: s for s in col}
    assert col[sym["a"]] is Color.A
    assert col[sym["b"]] is Color.B
    assert col[sym["x"]] is Color.COMMON
    assert col[sym["f"]] is Color.COMMON
    assert locality_of(T("(f a)"), col) is Color.A
    assert locality_of(F("(= a b)"), col) is Color.MIXED
    assert locality_of(T("(f x)"), col) is Color.COMMON


def test_coloring_moves_only_toward_common():
    a, b = fs("(= a (f x))"), fs("(= b x)")
    before = classify_symbols(a, b)
    after = classify_symbols(a, b + fs("(= a b)"))
    for s, c in before.items():
        assert after[s] is c or after[s] is Color.COMMON
    assert classify_symbols(a, b) == before


def test_predicate_arity_checked():
    with pytest.raises(ValueError):
        PApp(F("(P a)").sym, ())
    assert isinstance(F("(< a b)"), Lt)
