"""Parsing shortcuts shared by the tests."""

from combinterp.sexpr import Signature, parse_formula, parse_term

SIG = Signature(idl=True)
for _name, _arity in (("f", 1), ("g", 1), ("h", 2)):
    SIG.declare_fun(_name, _arity)
SIG.declare_pred("P", 1)
SIG.declare_pred("Q", 1)
for _c in "a a1 a2 b b1 b2 c d e u v w x y z y1 y2 y3 s1 s2".split():
    SIG.declare_const(_c)


def F(text: str):
    return parse_formula(text, SIG)


def T(text: str):
    return parse_term(text, SIG)


def fs(*texts: str) -> list:
    return [F(t) for t in texts]
