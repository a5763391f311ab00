"""Ground terms, formulas, signatures and A/B locality bookkeeping.

Terms are hash-consed, so structural equality is object identity and
hashing is cheap.  Formulas are small frozen dataclasses; equality atoms
compare symmetrically (``a = b`` and ``b = a`` are the same atom).
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

EUF = "EUF"
IDL = "IDL"
THEORIES = (EUF, IDL)

FRESH_PREFIX = "_k"


class CombinterpError(Exception):
    """Base class for errors raised by this package."""


class UnknownSymbolError(CombinterpError):
    pass


class PreconditionError(CombinterpError):
    """A caller violated the documented precondition of an operation."""


class BudgetExceeded(CombinterpError):
    pass


@dataclass(frozen=True, repr=False)
class Symbol:
    name: str
    kind: str  # "fun", "pred" or "const"
    theory: str | None = None
    arity: int = 0

    def __post_init__(self):
        if self.kind not in ("fun", "pred", "const"):
            raise ValueError(f"bad symbol kind {self.kind!r}")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")
        if self.theory is not None and self.theory not in THEORIES:
            raise ValueError(f"unknown theory {self.theory!r}")

    @property
    def is_free_constant(self) -> bool:
        return self.kind == "const"

    def __repr__(self):
        return self.name


ZERO = Symbol("0", "fun", IDL, 0)
SUCC = Symbol("succ", "fun", IDL, 1)
PRED = Symbol("pred", "fun", IDL, 1)
LESS = Symbol("<", "pred", IDL, 2)


def fun_symbol(name: str, arity: int) -> Symbol:
    return Symbol(name, "fun", EUF, arity)


def pred_symbol(name: str, arity: int) -> Symbol:
    return Symbol(name, "pred", EUF, arity)


def const_symbol(name: str) -> Symbol:
    return Symbol(name, "const")


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------

_INTERN: dict = {}
_INTERN_LOCK = threading.Lock()


class Term:
    """A ground term ``head(args...)``; constants have no arguments.

    Instances are interned: build them with :func:`app`, :func:`const`,
    :func:`offset` and friends, never by mutating.
    """

    __slots__ = ("head", "args", "_str", "_consts", "__weakref__")

    head: Symbol
    args: tuple

    def __new__(cls, head: Symbol, args: tuple = ()):
        key = (head, args)
        t = _INTERN.get(key)
        if t is not None:
            return t
        if len(args) != head.arity:
            raise ValueError(f"{head.name} expects {head.arity} arguments, got {len(args)}")
        with _INTERN_LOCK:
            t = _INTERN.get(key)
            if t is None:
                t = object.__new__(cls)
                object.__setattr__(t, "head", head)
                object.__setattr__(t, "args", args)
                object.__setattr__(t, "_str", None)
                object.__setattr__(t, "_consts", None)
                _INTERN[key] = t
        return t

    def __setattr__(self, key, value):
        raise AttributeError("Term is immutable")

    def __reduce__(self):
        return (Term, (self.head, self.args))

    @property
    def is_constant(self) -> bool:
        return self.head.kind == "const"

    @property
    def theory(self) -> str | None:
        return self.head.theory

    def constants(self) -> tuple[str, ...]:
        """Names of free constants in left-to-right order, without repeats."""
        if self._consts is None:
            if self.is_constant:
                out = (self.head.name,)
            else:
                out = tuple(dict.fromkeys(n for a in self.args for n in a.constants()))
            object.__setattr__(self, "_consts", out)
        return self._consts

    def subterms(self) -> Iterator["Term"]:
        """Post-order traversal (children before parents)."""
        for a in self.args:
            yield from a.subterms()
        yield self

    def __str__(self):
        if self._str is None:
            from .sexpr import format_term

            object.__setattr__(self, "_str", format_term(self))
        return self._str

    def __repr__(self):
        return str(self)

    def __lt__(self, other: "Term"):
        return str(self) < str(other)


def const(name: str) -> Term:
    return Term(const_symbol(name))


def app(head: Symbol, *args: Term) -> Term:
    """Build ``head(args)``, cancelling ``succ(pred(t))`` and ``pred(succ(t))``."""
    if head is SUCC or head == SUCC:
        (t,) = args
        if t.head == PRED:
            return t.args[0]
    elif head is PRED or head == PRED:
        (t,) = args
        if t.head == SUCC:
            return t.args[0]
    return Term(head, tuple(args))


ZERO_TERM = Term(ZERO)


def succ(t: Term) -> Term:
    return app(SUCC, t)


def pred(t: Term) -> Term:
    return app(PRED, t)


def split_offset(t: Term) -> tuple[Term, int]:
    """Strip a succ/pred chain: ``succ(succ(x))`` -> ``(x, 2)``."""
    n = 0
    while t.head == SUCC or t.head == PRED:
        n += 1 if t.head == SUCC else -1
        t = t.args[0]
    return t, n


def offset(t: Term, n: int) -> Term:
    """``succ^n(t)`` for n >= 0, ``pred^-n(t)`` otherwise (canonical)."""
    base, k = split_offset(t)
    k += n
    step = SUCC if k > 0 else PRED
    for _ in range(abs(k)):
        base = Term(step, (base,))
    return base


def numeral(n: int) -> Term:
    return offset(ZERO_TERM, n)


# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------


class Formula:
    __slots__ = ()

    def constants(self) -> tuple[str, ...]:
        cached = getattr(self, "_consts", None)
        if cached is None:
            cached = tuple(dict.fromkeys(n for t in self.terms() for n in t.constants()))
            try:
                object.__setattr__(self, "_consts", cached)
            except AttributeError:
                pass
        return cached

    def terms(self) -> Iterator[Term]:
        return iter(())

    def atoms(self) -> Iterator["Formula"]:
        """Atoms in order of first occurrence (may repeat)."""
        return iter(())

    def __str__(self):
        from .sexpr import format_formula

        return format_formula(self)

    def __repr__(self):
        return str(self)


@dataclass(frozen=True, eq=False, repr=False)
class _Const(Formula):
    value: bool

    def atoms(self):
        return iter(())

    def __eq__(self, other):
        return isinstance(other, _Const) and other.value == self.value

    def __hash__(self):
        return hash(("const", self.value))


TOP = _Const(True)
BOT = _Const(False)


@dataclass(frozen=True, eq=False, repr=False)
class Eq(Formula):
    lhs: Term
    rhs: Term

    def terms(self):
        yield self.lhs
        yield self.rhs

    def atoms(self):
        yield self

    def __eq__(self, other):
        if not isinstance(other, Eq):
            return False
        return (self.lhs is other.lhs and self.rhs is other.rhs) or (
            self.lhs is other.rhs and self.rhs is other.lhs
        )

    def __hash__(self):
        return hash(("=", frozenset((self.lhs, self.rhs))))


@dataclass(frozen=True, repr=False)
class Lt(Formula):
    lhs: Term
    rhs: Term

    def terms(self):
        yield self.lhs
        yield self.rhs

    def atoms(self):
        yield self


@dataclass(frozen=True, repr=False)
class PApp(Formula):
    sym: Symbol
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.sym.arity:
            raise ValueError(f"{self.sym.name} expects {self.sym.arity} arguments")

    def terms(self):
        yield from self.args

    def atoms(self):
        yield self


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def terms(self):
        return self.arg.terms()

    def atoms(self):
        return self.arg.atoms()


@dataclass(frozen=True, repr=False)
class And(Formula):
    args: tuple

    def terms(self):
        for a in self.args:
            yield from a.terms()

    def atoms(self):
        for a in self.args:
            yield from a.atoms()


@dataclass(frozen=True, repr=False)
class Or(Formula):
    args: tuple

    def terms(self):
        for a in self.args:
            yield from a.terms()

    def atoms(self):
        for a in self.args:
            yield from a.atoms()


ATOM_TYPES = (Eq, Lt, PApp)


def is_atom(f: Formula) -> bool:
    return isinstance(f, ATOM_TYPES)


def is_literal(f: Formula) -> bool:
    return is_atom(f) or (isinstance(f, Not) and is_atom(f.arg)) or f is TOP or f is BOT \
        or isinstance(f, _Const)


def atom_of(lit: Formula) -> Formula:
    return lit.arg if isinstance(lit, Not) else lit


def negate(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.arg
    if f == TOP:
        return BOT
    if f == BOT:
        return TOP
    return Not(f)


def conj(fs: Iterable[Formula]) -> Formula:
    """Conjunction with flattening, unit absorption and de-duplication."""
    out: dict = {}
    for f in fs:
        parts = f.args if isinstance(f, And) else (f,)
        for p in parts:
            if p == BOT:
                return BOT
            if p == TOP:
                continue
            out[p] = None
    if not out:
        return TOP
    if len(out) == 1:
        return next(iter(out))
    items = tuple(out)
    if any(negate(p) in out for p in items):
        return BOT
    return And(items)


def disj(fs: Iterable[Formula]) -> Formula:
    out: dict = {}
    for f in fs:
        parts = f.args if isinstance(f, Or) else (f,)
        for p in parts:
            if p == TOP:
                return TOP
            if p == BOT:
                continue
            out[p] = None
    if not out:
        return BOT
    if len(out) == 1:
        return next(iter(out))
    items = tuple(out)
    if any(negate(p) in out for p in items):
        return TOP
    return Or(items)


def implies(premise: Formula, conclusion: Formula) -> Formula:
    return disj([negate(premise), conclusion])


def simplify(f: Formula) -> Formula:
    """Bottom-up constant absorption and flattening (equivalence preserving)."""
    if isinstance(f, And):
        return conj(simplify(a) for a in f.args)
    if isinstance(f, Or):
        return disj(simplify(a) for a in f.args)
    if isinstance(f, Not):
        inner = simplify(f.arg)
        if isinstance(inner, _Const):
            return negate(inner)
        return Not(inner) if not isinstance(inner, Not) else inner.arg
    if isinstance(f, (Eq, Lt)):
        (b1, n1), (b2, n2) = split_offset(f.lhs), split_offset(f.rhs)
        if b1 is b2:
            holds = n1 == n2 if isinstance(f, Eq) else n1 < n2
            return TOP if holds else BOT
    return f


def map_terms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` applying ``fn`` to every top-level term of every atom."""
    if isinstance(f, Eq):
        return Eq(fn(f.lhs), fn(f.rhs))
    if isinstance(f, Lt):
        return Lt(fn(f.lhs), fn(f.rhs))
    if isinstance(f, PApp):
        return PApp(f.sym, tuple(fn(a) for a in f.args))
    if isinstance(f, Not):
        return Not(map_terms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(map_terms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_terms(a, fn) for a in f.args))
    return f


def substitute_term(t: Term, sigma: Mapping[Term, Term]) -> Term:
    hit = sigma.get(t)
    if hit is not None:
        return hit
    if not t.args:
        return t
    new_args = tuple(substitute_term(a, sigma) for a in t.args)
    if all(x is y for x, y in zip(new_args, t.args)):
        return t
    return app(t.head, *new_args)


def substitute(phi: Formula, sigma: Mapping[Term, Term]) -> Formula:
    """Simultaneously replace whole subterms according to ``sigma``."""
    if not sigma:
        return phi
    return map_terms(phi, lambda t: substitute_term(t, sigma))


def formula_constants(fs: Iterable[Formula]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(n for f in fs for n in f.constants()))


def ordered_union(*groups: Iterable) -> tuple:
    return tuple(dict.fromkeys(x for g in groups for x in g))


# --------------------------------------------------------------------------
# Theory classification of literals
# --------------------------------------------------------------------------


def term_theories(t: Term) -> set[str]:
    out = set()
    for s in t.subterms():
        if s.head.theory is not None:
            out.add(s.head.theory)
    return out


def atom_theories(atom: Formula) -> set[str]:
    out = set()
    if isinstance(atom, Lt):
        out.add(IDL)
    elif isinstance(atom, PApp):
        out.add(atom.sym.theory or EUF)
    for t in atom.terms():
        out |= term_theories(t)
    return out


def literal_theory(lit: Formula) -> str | None:
    """The theory a pure literal belongs to; None for constant (dis)equalities."""
    ths = atom_theories(atom_of(lit))
    if len(ths) > 1:
        raise PreconditionError(f"literal {lit} is not pure")
    return next(iter(ths)) if ths else None


def is_const_eq(lit: Formula) -> bool:
    a = atom_of(lit)
    return isinstance(a, Eq) and a.lhs.is_constant and a.rhs.is_constant


# --------------------------------------------------------------------------
# Locality
# --------------------------------------------------------------------------


class Color(str, enum.Enum):
    COMMON = "AB-common"
    A = "A-strict"
    B = "B-strict"
    MIXED = "AB-mixed"

    def __str__(self):
        return self.value


class SymbolColoring(dict):
    """Map from Symbol to Color; theory symbols are always AB-common."""

    def common_constants(self) -> frozenset[str]:
        return frozenset(s.name for s, c in self.items() if s.is_free_constant and c is Color.COMMON)

    def strict(self, side: Color) -> tuple[str, ...]:
        return tuple(s.name for s, c in self.items() if s.is_free_constant and c is side)


def _symbols(fs: Iterable[Formula]) -> Iterator[Symbol]:
    for f in fs:
        for atom in f.atoms():
            if isinstance(atom, PApp):
                yield atom.sym
            elif isinstance(atom, Lt):
                yield LESS
            for t in atom.terms():
                for s in t.subterms():
                    yield s.head


def classify_symbols(a: Iterable[Formula], b: Iterable[Formula]) -> SymbolColoring:
    a_syms = dict.fromkeys(_symbols(a))
    b_syms = dict.fromkeys(_symbols(b))
    coloring = SymbolColoring()
    for s in ordered_union(a_syms, b_syms):
        if not s.is_free_constant:
            coloring[s] = Color.COMMON
        elif s in a_syms and s in b_syms:
            coloring[s] = Color.COMMON
        elif s in a_syms:
            coloring[s] = Color.A
        else:
            coloring[s] = Color.B
    return coloring


def locality_of(e: Term | Formula, coloring: Mapping[Symbol, Color]) -> Color:
    if isinstance(e, Term):
        syms = [s.head for s in e.subterms()]
    else:
        syms = list(_symbols([e]))
    seen_a = seen_b = False
    for s in syms:
        c = coloring.get(s)
        if c is None:
            if not s.is_free_constant:
                # theory symbols are shared by construction
                continue
            raise UnknownSymbolError(f"symbol {s.name!r} is not in the coloring")
        seen_a |= c is Color.A
        seen_b |= c is Color.B
    if seen_a and seen_b:
        return Color.MIXED
    if seen_a:
        return Color.A
    if seen_b:
        return Color.B
    return Color.COMMON


def is_common(e: Term | Formula, common: frozenset[str] | set[str]) -> bool:
    return all(n in common for n in e.constants())


class FreshNames:
    """Counter-based generator of reserved ``_k<n>`` constant names."""

    def __init__(self, start: int = 0, prefix: str = FRESH_PREFIX):
        self.counter = start
        self.prefix = prefix

    def fresh(self) -> Term:
        name = f"{self.prefix}{self.counter}"
        self.counter += 1
        return const(name)

    def skip_past(self, names: Iterable[str]) -> None:
        """Advance the counter beyond any reserved names already in use."""
        for n in names:
            if n.startswith(self.prefix) and n[len(self.prefix):].isdigit():
                self.counter = max(self.counter, int(n[len(self.prefix):]) + 1)
