"""Purification of mixed literals and elimination of strict free symbols."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

from .core import (
    BOT, IDL, TOP, And, Eq, Formula, FreshNames, Lt, Not, Or, PApp,
    PreconditionError, Symbol, Term, app, conj, formula_constants, implies,
)
from .metaproof import MetaRule


@dataclass(frozen=True)
class Definition:
    const: Term
    term: Term
    side: str  # "A", "B" or "both"


@dataclass
class PurifyResult:
    a: tuple
    b: tuple
    trace: list = field(default_factory=list)
    steps: list = field(default_factory=list)


def home_theory(atom: Formula) -> str | None:
    if isinstance(atom, Lt):
        return IDL
    if isinstance(atom, PApp):
        return atom.sym.theory
    if isinstance(atom, Eq):
        for t in (atom.lhs, atom.rhs):
            if not t.is_constant:
                return t.theory
    return None


class _Renamer:
    def __init__(self, names: FreshNames):
        self.names = names
        self.memo: dict[Term, Term] = {}
        self.sides: dict[Term, set] = {}
        self.order: list[Term] = []

    def name_for(self, t: Term, side: str) -> Term:
        c = self.memo.get(t)
        if c is None:
            c = self.names.fresh()
            self.memo[t] = c
            self.sides[t] = set()
            self.order.append(t)
        self.sides[t].add(side)
        return c

    def term(self, t: Term, home: str | None, side: str) -> Term:
        if t.is_constant:
            return t
        if t.theory != home:
            return self.name_for(self.rebuild(t, side), side)
        return self.rebuild(t, side)

    def rebuild(self, t: Term, side: str) -> Term:
        if not t.args:
            return t
        args = tuple(self.term(a, t.theory, side) for a in t.args)
        if all(x is y for x, y in zip(args, t.args)):
            return t
        return app(t.head, *args)

    def formula(self, f: Formula, side: str) -> Formula:
        if isinstance(f, (Eq, Lt)):
            home = home_theory(f)
            return type(f)(self.term(f.lhs, home, side), self.term(f.rhs, home, side))
        if isinstance(f, PApp):
            home = f.sym.theory
            return PApp(f.sym, tuple(self.term(a, home, side) for a in f.args))
        if isinstance(f, Not):
            return Not(self.formula(f.arg, side))
        if isinstance(f, (And, Or)):
            return type(f)(tuple(self.formula(a, side) for a in f.args))
        return f


def _reject_reserved(fs: Iterable[Formula], prefix: str) -> None:
    for n in formula_constants(fs):
        if n.startswith(prefix):
            raise PreconditionError(f"input uses reserved constant name {n!r}")


def purify(a: Sequence[Formula], b: Sequence[Formula], names: FreshNames | None = None,
           check_reserved: bool = True) -> PurifyResult:
    """Rename alien subterms by fresh constants until every literal is pure.

    Alien terms needed on both sides get one shared constant (Define0); the
    others get a side-local one (Define1/Define2).  ``steps`` lists the
    metarules leading from (A, B) to the purified pair.
    """
    a, b = tuple(a), tuple(b)
    if names is None:
        names = FreshNames()
    if check_reserved:
        _reject_reserved(a + b, names.prefix)
    else:
        names.skip_past(formula_constants(a + b))
    ren = _Renamer(names)
    new_a = [ren.formula(f, "A") for f in a]
    new_b = [ren.formula(f, "B") for f in b]

    trace: list[Definition] = []
    steps: list[MetaRule] = []
    defs_a: list[Formula] = []
    defs_b: list[Formula] = []
    for t in ren.order:
        c = ren.memo[t]
        sides = ren.sides[t]
        if sides == {"A", "B"}:
            side, tag = "both", "Define0"
        elif sides == {"A"}:
            side, tag = "A", "Define1"
        else:
            side, tag = "B", "Define2"
        trace.append(Definition(c, t, side))
        steps.append(MetaRule(tag, const=c, term=t))
        if side in ("A", "both"):
            defs_a.append(Eq(c, t))
        if side in ("B", "both"):
            defs_b.append(Eq(c, t))

    for tag_plus, tag_minus, old, new in (("Redplus1", "Redminus1", a, new_a),
                                          ("Redplus2", "Redminus2", b, new_b)):
        changed = [(o, n) for o, n in zip(old, new) if o != n]
        if changed:
            steps.append(MetaRule(tag_plus, formulas=tuple(n for _, n in changed)))
            steps.append(MetaRule(tag_minus, formulas=tuple(o for o, _ in changed)))

    out_a = tuple(dict.fromkeys(defs_a + new_a))
    out_b = tuple(dict.fromkeys(defs_b + new_b))
    return PurifyResult(out_a, out_b, trace, steps)


def purify_set(fs: Sequence[Formula], names: FreshNames) -> tuple:
    """Purify a single formula set (definitions first)."""
    ren = _Renamer(names)
    new = [ren.formula(f, "A") for f in fs]
    defs = [Eq(ren.memo[t], t) for t in ren.order]
    return tuple(dict.fromkeys(defs + new))


# --------------------------------------------------------------------------
# Strict free symbols: flattening and elimination
# --------------------------------------------------------------------------


def _is_flat_app(t: Term, sigma0: frozenset) -> bool:
    return t.head in sigma0 and all(a.is_constant for a in t.args)


def _mentions(f: Formula, sigma0: frozenset) -> bool:
    for atom in f.atoms():
        if isinstance(atom, PApp) and atom.sym in sigma0:
            return True
        for t in atom.terms():
            if any(s.head in sigma0 for s in t.subterms()):
                return True
    return False


def flatten_sigma0(x: Sequence[Formula], sigma0: Iterable[Symbol],
                   names: FreshNames | None = None) -> list[tuple]:
    """Make ``x`` flat with respect to the free symbols ``sigma0``.

    Returns one formula set per guess of the polarities of Σ0-predicate
    atoms that occur under boolean structure; a single set when no guess is
    needed.  Each set lists the Σ0 literals first.
    """
    sigma0 = frozenset(sigma0)
    for s in sigma0:
        if s.kind == "const" or s.theory == IDL:
            raise PreconditionError(f"{s.name} is not a free function or predicate symbol")
    if names is None:
        names = FreshNames()
        names.skip_past(formula_constants(x))
    memo: dict[Term, Term] = {}
    defs: list[Formula] = []

    def name(t: Term) -> Term:
        args = tuple(flat_term(a) for a in t.args)
        t = app(t.head, *args)
        c = memo.get(t)
        if c is None:
            c = names.fresh()
            memo[t] = c
            defs.append(Eq(t, c))
        return c

    def flat_term(t: Term) -> Term:
        if t.is_constant:
            return t
        if t.head in sigma0:
            return name(t)
        return app(t.head, *(flat_term(a) for a in t.args))

    def flat_args(t: Term) -> Term:
        return app(t.head, *(flat_term(a) for a in t.args))

    guesses: list[PApp] = []
    top_level: list[Formula] = []
    rest: list[Formula] = []

    def inner(f: Formula) -> Formula:
        if isinstance(f, Eq):
            return Eq(flat_term(f.lhs), flat_term(f.rhs))
        if isinstance(f, Lt):
            return Lt(flat_term(f.lhs), flat_term(f.rhs))
        if isinstance(f, PApp):
            p = PApp(f.sym, tuple(flat_term(a) for a in f.args))
            if f.sym in sigma0:
                if p not in guesses:
                    guesses.append(p)
            return p
        if isinstance(f, Not):
            return Not(inner(f.arg))
        if isinstance(f, (And, Or)):
            return type(f)(tuple(inner(a) for a in f.args))
        return f

    for f in x:
        atom = f.arg if isinstance(f, Not) else f
        positive = not isinstance(f, Not)
        if isinstance(atom, PApp) and atom.sym in sigma0:
            p = PApp(atom.sym, tuple(flat_term(a) for a in atom.args))
            top_level.append(p if positive else Not(p))
            continue
        if positive and isinstance(atom, Eq):
            lhs, rhs = atom.lhs, atom.rhs
            if rhs.head in sigma0 and lhs.is_constant:
                lhs, rhs = rhs, lhs
            if lhs.head in sigma0 and rhs.is_constant:
                t = flat_args(lhs)
                if t in memo:
                    rest.append(Eq(memo[t], rhs))
                else:
                    top_level.append(Eq(t, rhs))
                continue
        rest.append(inner(f))

    if not guesses:
        return [tuple(dict.fromkeys(defs + top_level + rest))]
    branches = []
    for signs in product((True, False), repeat=len(guesses)):
        choice = {g: s for g, s in zip(guesses, signs)}
        lits = [g if s else Not(g) for g, s in choice.items()]

        def fix(f: Formula) -> Formula:
            if isinstance(f, PApp) and f in choice:
                return TOP if choice[f] else BOT
            if isinstance(f, Not):
                return Not(fix(f.arg))
            if isinstance(f, (And, Or)):
                return type(f)(tuple(fix(a) for a in f.args))
            return f

        branches.append(tuple(dict.fromkeys(defs + top_level + lits + [fix(f) for f in rest])))
    return branches


def eliminate_symbols(x_flat: Sequence[Formula], sigma0: Iterable[Symbol]) -> tuple:
    """Replace the Σ0 literals of a Σ0-flat set by functionality and
    predicate-consistency clauses over constants."""
    sigma0 = frozenset(sigma0)
    fun_atoms: dict[Symbol, list[tuple[tuple, Term]]] = {}
    pos: dict[Symbol, list[tuple]] = {}
    neg: dict[Symbol, list[tuple]] = {}
    x1: list[Formula] = []
    for f in x_flat:
        if not _mentions(f, sigma0):
            x1.append(f)
            continue
        atom = f.arg if isinstance(f, Not) else f
        if isinstance(atom, PApp) and atom.sym in sigma0 and all(a.is_constant for a in atom.args):
            (neg if isinstance(f, Not) else pos).setdefault(atom.sym, []).append(atom.args)
            continue
        if isinstance(f, Eq):
            lhs, rhs = f.lhs, f.rhs
            if _is_flat_app(rhs, sigma0) and lhs.is_constant:
                lhs, rhs = rhs, lhs
            if _is_flat_app(lhs, sigma0) and rhs.is_constant:
                fun_atoms.setdefault(lhs.head, []).append((lhs.args, rhs))
                continue
        raise PreconditionError(f"{f} is not Σ0-flat")

    clauses: list[Formula] = []

    def premise(args1: tuple, args2: tuple) -> Formula:
        return conj(Eq(p, q) for p, q in zip(args1, args2) if p is not q)

    for entries in fun_atoms.values():
        for (args1, b1), (args2, b2) in combinations(entries, 2):
            if b1 is b2:
                continue
            clauses.append(implies(premise(args1, args2), Eq(b1, b2)))
    for sym, positives in pos.items():
        for args1 in positives:
            for args2 in neg.get(sym, []):
                clauses.append(implies(premise(args1, args2), BOT))
    return tuple(dict.fromkeys(clauses + x1))
