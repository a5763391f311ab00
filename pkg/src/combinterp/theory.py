"""Component-theory interface and the QE-based equality-interpolation adapter."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

from .core import (
    BOT, TOP, And, CombinterpError, Eq, Formula, Not, Or, PreconditionError, Term,
    conj, disj, is_literal, negate, substitute_term,
)


class TheoryError(CombinterpError):
    """A theory plugin returned something that fails its own contract."""


@dataclass
class EqualityWitness:
    """Shared terms ``terms`` with  A ⊨ θ ∨ ā∩v̄≠∅  and  θ ∧ B ⊨ b̄∩v̄≠∅."""

    terms: tuple
    theta: Formula = TOP
    abar: tuple = ()
    bbar: tuple = ()


@dataclass
class QEResult:
    var: object
    disjuncts: list = field(default_factory=list)  # (witness term, tuple of literals)

    @property
    def witnesses(self) -> tuple:
        return tuple(dict.fromkeys(t for t, _ in self.disjuncts))

    def formula(self) -> Formula:
        return disj(conj(lits) for _, lits in self.disjuncts)


class TheorySolver(Protocol):
    theory: str
    convex: bool

    def check_sat(self, lits: Sequence[Formula]) -> bool: ...

    def interpolate(self, a: Sequence[Formula], b: Sequence[Formula]) -> Formula: ...

    def equality_interpolate(self, a: Sequence[Formula], b: Sequence[Formula],
                             abar: Sequence[Term], bbar: Sequence[Term]) -> EqualityWitness: ...


def formula_sat(check_sat: Callable[[Sequence[Formula]], bool], fs: Sequence[Formula]) -> bool:
    """Satisfiability of a set of boolean combinations of theory literals by
    naive case splitting on the first non-literal formula."""
    lits: list[Formula] = []
    deferred: list[Formula] = []
    todo = list(fs)
    while todo:
        f = todo.pop()
        if f == TOP:
            continue
        if f == BOT:
            return False
        if isinstance(f, Not):
            g = f.arg
            if isinstance(g, And):
                todo.append(Or(tuple(negate(x) for x in g.args)))
                continue
            if isinstance(g, Or):
                todo.extend(negate(x) for x in g.args)
                continue
            if isinstance(g, Not):
                todo.append(g.arg)
                continue
        if isinstance(f, And):
            todo.extend(f.args)
            continue
        if isinstance(f, Or):
            deferred.append(f)
            continue
        lits.append(f)
    if not check_sat(lits):
        return False
    if not deferred:
        return True
    known = set(lits)
    for k, f in enumerate(deferred):
        if any(d in known for d in f.args):
            continue
        live = [d for d in f.args if negate(d) not in known]
        rest = lits + deferred[:k] + deferred[k + 1:]
        return any(formula_sat(check_sat, rest + [d]) for d in live)
    return True


def entails(check_sat, premises: Sequence[Formula], phi: Formula) -> bool:
    return not formula_sat(check_sat, list(premises) + [negate(phi)])


def check_interpolant(check_sat, a: Sequence[Formula], b: Sequence[Formula], theta: Formula,
                      common: frozenset | None = None) -> bool:
    """The three interpolant conditions, decided with one theory's solver."""
    if common is not None and not all(n in common for n in theta.constants()):
        return False
    return entails(check_sat, a, theta) and not formula_sat(check_sat, list(b) + [theta])


def distinct_from(xs: Sequence[Term], vs: Sequence[Term]) -> list[Formula]:
    """The literals of  x̄ ∩ v̄ = ∅."""
    return [Not(Eq(x, v)) for x in xs for v in vs if x is not v]


def check_witness(check_sat, a, b, abar, bbar, w: EqualityWitness) -> bool:
    """A ∪ B ⊨ (ā∩v̄≠∅) ∨ (b̄∩v̄≠∅), plus the θ side conditions."""
    lits = list(a) + list(b) + distinct_from(abar, w.terms) + distinct_from(bbar, w.terms)
    if formula_sat(check_sat, lits):
        return False
    return check_interpolant(check_sat, list(a) + distinct_from(abar, w.terms),
                             list(b) + distinct_from(bbar, w.terms), w.theta)


def shrink_witness(check_sat, a, b, abar, bbar, vs):
    """Greedily drop witness terms, then A-side and B-side strict constants,
    while A ∪ B still forces (ā∩v̄≠∅) ∨ (b̄∩v̄≠∅)."""

    def forced(ws, xs, ys):
        lits = list(a) + list(b) + distinct_from(xs, ws) + distinct_from(ys, ws)
        return not formula_sat(check_sat, lits)

    vs, abar, bbar = list(vs), list(abar), list(bbar)
    if not forced(vs, abar, bbar):
        raise TheoryError("witness terms do not cover the forced identification")
    for v in list(vs):
        trial = [w for w in vs if w is not v]
        if trial and forced(trial, abar, bbar):
            vs = trial
    for c in list(abar):
        trial = [x for x in abar if x is not c]
        if forced(vs, trial, bbar):
            abar = trial
    for c in list(bbar):
        trial = [x for x in bbar if x is not c]
        if forced(vs, abar, trial):
            bbar = trial
    return vs, abar, bbar


def _compose(subst: dict, y: Term, t: Term) -> dict:
    out = {k: substitute_term(v, {y: t}) for k, v in subst.items()}
    out[y] = t
    return out


def qe_equality_witness(qe, delta1: Sequence[Formula], delta2: Sequence[Formula],
                        y2: Sequence[Term], split=None, check_sat=None) -> tuple:
    """Witness terms v̄ for  δ1 ∧ δ2 ⊨ ȳ1∩ȳ2 ≠ ∅  obtained by eliminating ȳ2 from δ2.

    ``qe(y, lits)`` returns a :class:`QEResult` over literal tuples.
    ``split(lits, y)`` optionally expands the literals mentioning y that
    the QE procedure does not accept (e.g. disequalities) into a list of
    alternative literal sets; it is applied just before y is eliminated.
    With ``check_sat``, cases and disjuncts inconsistent with δ1 are
    dropped: they contribute no model of δ1 ∧ ∃ȳ2 δ2.
    """
    def alive(lits) -> bool:
        return check_sat is None or check_sat(list(delta1) + list(lits))

    states = {(tuple(delta2), ()): {}} if alive(delta2) else {}
    for y in y2:
        nxt: dict = {}
        for (lits, key), subst in states.items():
            cases = split(list(lits), y) if split else [lits]
            disjuncts = [d for c in cases if c is lits or alive(c) for d in qe(y, c).disjuncts]
            for t, new_lits in disjuncts:
                new_lits = tuple(new_lits)
                sub = _compose(subst, y, t)
                k = (new_lits, tuple(sub[v] for v in sub))
                if k not in nxt and alive(new_lits):
                    nxt[k] = sub
        states = nxt
    if not states:
        raise PreconditionError("quantifier elimination returned no disjunct: ∃ȳ2 δ2 is unsatisfiable")
    out: list[Term] = []
    for subst in states.values():
        out.extend(subst[y] for y in y2)
    return tuple(dict.fromkeys(out))


def is_literal_set(fs: Sequence[Formula]) -> bool:
    return all(is_literal(f) for f in fs)
