"""Congruence closure with explanations, interpolation and equality witnesses
for the pure theory of equality with free function and predicate symbols."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .core import (
    BOT, EUF, TOP, Eq, Formula, Not, PApp, PreconditionError, Symbol, Term, app,
    conj, disj, formula_constants, implies, negate,
)
from .theory import EqualityWitness, TheoryError, check_interpolant, formula_sat

TT = Term(Symbol("$tt", "const"))


@lru_cache(maxsize=None)
def _pred_fun(p: Symbol) -> Symbol:
    return Symbol("$" + p.name, "fun", EUF, p.arity)


_PRED_OF: dict[Symbol, Symbol] = {}


def encode_pred(atom: PApp) -> Term:
    f = _pred_fun(atom.sym)
    _PRED_OF[f] = atom.sym
    return app(f, *atom.args)


def _is_pred_term(t: Term) -> bool:
    return t.head in _PRED_OF


def decode_eq(u: Term, w: Term) -> Formula:
    """Turn an equality between internal terms back into a user formula."""
    if u is w:
        return TOP
    if u is TT:
        u, w = w, u
    if w is TT:
        return PApp(_PRED_OF[u.head], u.args)
    if _is_pred_term(u) and _is_pred_term(w):
        p = PApp(_PRED_OF[u.head], u.args)
        q = PApp(_PRED_OF[w.head], w.args)
        return disj([conj([p, q]), conj([negate(p), negate(q)])])
    return Eq(u, w)


@dataclass
class Step:
    """One edge of an explanation path, oriented from ``u`` to ``v``."""

    u: Term
    v: Term
    kind: str  # "input" or "cong"
    color: str = "A"
    args: tuple = ()  # for "cong": one explanation path per argument position


@dataclass
class _Lit:
    lhs: Term
    rhs: Term
    positive: bool
    side: str
    source: Formula


def encode_literal(lit: Formula, side: str) -> _Lit:
    pos = not isinstance(lit, Not)
    atom = lit if pos else lit.arg
    if isinstance(atom, Eq):
        return _Lit(atom.lhs, atom.rhs, pos, side, lit)
    if isinstance(atom, PApp):
        return _Lit(encode_pred(atom), TT, pos, side, lit)
    raise PreconditionError(f"{lit} is not an EUF literal")


class EGraph:
    """Union-find with a congruence table and a proof forest."""

    def __init__(self):
        self.parent: dict[Term, Term] = {}
        self.members: dict[Term, list] = {}
        self.uses: dict[Term, list] = {}
        self.sigtab: dict[tuple, Term] = {}
        self.proof: dict[Term, tuple | None] = {}
        self.pending: list = []
        self.nodes: list[Term] = []

    def find(self, t: Term) -> Term:
        root = t
        while self.parent[root] is not root:
            root = self.parent[root]
        while self.parent[t] is not root:
            self.parent[t], t = root, self.parent[t]
        return root

    def _sig(self, t: Term) -> tuple:
        return (t.head, tuple(self.find(a) for a in t.args))

    def add(self, t: Term) -> Term:
        if t in self.parent:
            return t
        for a in t.args:
            self.add(a)
        self.parent[t] = t
        self.members[t] = [t]
        self.uses[t] = []
        self.proof[t] = None
        self.nodes.append(t)
        if t.args:
            for a in t.args:
                self.uses[self.find(a)].append(t)
            sig = self._sig(t)
            other = self.sigtab.get(sig)
            if other is None:
                self.sigtab[sig] = t
            else:
                self.pending.append((t, other, ("cong",)))
                self._propagate()
        return t

    def merge(self, s: Term, t: Term, label: tuple) -> None:
        self.add(s)
        self.add(t)
        self.pending.append((s, t, label))
        self._propagate()

    def _reroot(self, x: Term) -> None:
        prev, prev_label = None, None
        while x is not None:
            nxt = self.proof[x]
            self.proof[x] = (prev, prev_label) if prev is not None else None
            if nxt is None:
                break
            prev, prev_label = x, nxt[1]
            x = nxt[0]

    def _propagate(self) -> None:
        while self.pending:
            a, b, label = self.pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra is rb:
                continue
            self._reroot(a)
            self.proof[a] = (b, label)
            if len(self.members[ra]) > len(self.members[rb]):
                ra, rb = rb, ra
            self.parent[ra] = rb
            self.members[rb].extend(self.members.pop(ra))
            moved = self.uses.pop(ra)
            for u in moved:
                sig = self._sig(u)
                other = self.sigtab.get(sig)
                if other is None:
                    self.sigtab[sig] = u
                elif self.find(other) is not self.find(u):
                    self.pending.append((u, other, ("cong",)))
            self.uses[rb].extend(moved)

    def same(self, s: Term, t: Term) -> bool:
        return self.find(s) is self.find(t)

    def forest_path(self, a: Term, b: Term) -> list[tuple[Term, Term, tuple]]:
        """Proof-forest edges from ``a`` to ``b`` as (from, to, label)."""
        up_a = [a]
        while self.proof[up_a[-1]] is not None:
            up_a.append(self.proof[up_a[-1]][0])
        index = {x: i for i, x in enumerate(up_a)}
        up_b = [b]
        while up_b[-1] not in index:
            nxt = self.proof[up_b[-1]]
            if nxt is None:
                raise TheoryError(f"{a} and {b} are not connected")
            up_b.append(nxt[0])
        lca = up_b[-1]
        edges = []
        for x in up_a[: index[lca]]:
            y, label = self.proof[x]
            edges.append((x, y, label))
        back = []
        for x in up_b[:-1]:
            y, label = self.proof[x]
            back.append((y, x, label))
        edges.extend(reversed(back))
        return edges


@dataclass
class _Problem:
    graph: EGraph
    lits: list
    conflict: _Lit | None = None
    bottom: str | None = None


def _build(a: Sequence[Formula], b: Sequence[Formula] = ()) -> _Problem:
    g = EGraph()
    g.add(TT)
    lits: list[_Lit] = []
    bottom = None
    for side, fs in (("A", a), ("B", b)):
        for f in fs:
            if f == TOP:
                continue
            if f == BOT:
                bottom = bottom or side
                continue
            lits.append(encode_literal(f, side))
    for i, lit in enumerate(lits):
        g.add(lit.lhs)
        g.add(lit.rhs)
        if lit.positive:
            g.merge(lit.lhs, lit.rhs, ("input", i))
    prob = _Problem(g, lits, bottom=bottom)
    for lit in lits:
        if not lit.positive and g.same(lit.lhs, lit.rhs):
            prob.conflict = lit
            break
    return prob


@dataclass
class SatResult:
    sat: bool
    core: tuple = ()


def euf_check_sat(lits: Sequence[Formula]) -> SatResult:
    """Decide a conjunction of EUF literals; on UNSAT report a core."""
    prob = _build(lits)
    if prob.bottom:
        return SatResult(False, (BOT,))
    if prob.conflict is None:
        return SatResult(True)
    used: dict[int, None] = {}
    seen: set = set()

    def collect(s: Term, t: Term) -> None:
        if (s, t) in seen:
            return
        seen.add((s, t))
        for x, y, label in prob.graph.forest_path(s, t):
            if label[0] == "input":
                used[label[1]] = None
            else:
                for p, q in zip(x.args, y.args):
                    collect(p, q)

    c = prob.conflict
    collect(c.lhs, c.rhs)
    core = tuple(prob.lits[i].source for i in sorted(used)) + (c.source,)
    return SatResult(False, core)


class _Interpolator:
    def __init__(self, prob: _Problem, a_consts: set, b_consts: set):
        self.prob = prob
        self.g = prob.graph
        self.a_consts = a_consts | {"$tt"}
        self.b_consts = b_consts | {"$tt"}
        self.memo: dict = {}

    def local(self, t: Term, side: str) -> bool:
        cs = self.a_consts if side == "A" else self.b_consts
        return all(n in cs for n in t.constants())

    def common(self, t: Term) -> bool:
        return self.local(t, "A") and self.local(t, "B")

    def path(self, s: Term, t: Term) -> list[Step]:
        key = (s, t)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        steps: list[Step] = []
        for x, y, label in self.g.forest_path(s, t):
            if label[0] == "input":
                steps.append(Step(x, y, "input", self.prob.lits[label[1]].side))
            else:
                steps.extend(self._cong(x, y))
        self.memo[key] = steps
        return steps

    def _cong(self, x: Term, y: Term) -> list[Step]:
        argpaths = [self.path(p, q) for p, q in zip(x.args, y.args)]
        for side in ("A", "B"):
            if self.local(x, side) and self.local(y, side):
                return [Step(x, y, "cong", side, tuple(argpaths))]
        # x and y are local to different sides: route through a shared term
        firsts, seconds, mids = [], [], []
        for p, ap in zip(x.args, argpaths):
            k, w = self._first_common(p, ap)
            mids.append(w)
            firsts.append(ap[:k])
            seconds.append(ap[k:])
        m = app(x.head, *mids)
        side_x = "A" if self.local(x, "A") else "B"
        side_y = "A" if self.local(y, "A") else "B"
        return [Step(x, m, "cong", side_x, tuple(firsts)),
                Step(m, y, "cong", side_y, tuple(seconds))]

    def _first_common(self, start: Term, path: list[Step]) -> tuple[int, Term]:
        if self.common(start):
            return 0, start
        for k, st in enumerate(path):
            if self.common(st.v):
                return k + 1, st.v
        raise TheoryError(f"no shared term on an explanation path from {start}")

    def mode_a(self, path: list[Step], premises: list, clauses: list) -> None:
        i = 0
        while i < len(path):
            st = path[i]
            if st.color == "A":
                for p in st.args:
                    self.mode_a(p, premises, clauses)
                i += 1
                continue
            j = i
            while j < len(path) and path[j].color == "B":
                j += 1
            run = path[i:j]
            if run[0].u is not run[-1].v:
                premises.append((run[0].u, run[-1].v))
            self.mode_b(run, clauses)
            i = j

    def mode_b(self, path: list[Step], clauses: list) -> None:
        i = 0
        while i < len(path):
            st = path[i]
            if st.color == "B":
                for p in st.args:
                    self.mode_b(p, clauses)
                i += 1
                continue
            j = i
            while j < len(path) and path[j].color == "A":
                j += 1
            run = path[i:j]
            prem: list = []
            self.mode_a(run, prem, clauses)
            if run[0].u is not run[-1].v:
                clauses.append((tuple(prem), run[0].u, run[-1].v))
            i = j


def _clause_formula(prem, u, w) -> Formula:
    return implies(conj(decode_eq(p, q) for p, q in prem), decode_eq(u, w))


def euf_interpolate(a: Sequence[Formula], b: Sequence[Formula], verify: bool = True) -> Formula:
    """Interpolant of an EUF-unsatisfiable pair of literal sets."""
    prob = _build(a, b)
    if prob.bottom == "A":
        return BOT
    if prob.bottom == "B":
        return TOP
    if prob.conflict is None:
        raise PreconditionError("euf_interpolate: A ∪ B is satisfiable")
    ip = _Interpolator(prob, set(formula_constants(a)), set(formula_constants(b)))
    c = prob.conflict
    path = ip.path(c.lhs, c.rhs)
    clauses: list = []
    if c.side == "A":
        premises: list = []
        ip.mode_a(path, premises, clauses)
        theta = conj([conj(_clause_formula(*cl) for cl in clauses),
                      negate(conj(decode_eq(p, q) for p, q in premises))])
    else:
        ip.mode_b(path, clauses)
        theta = conj(_clause_formula(*cl) for cl in clauses)
    if verify:
        common = frozenset(formula_constants(a)) & frozenset(formula_constants(b))
        if not check_interpolant(_sat, a, b, theta, common):
            raise TheoryError(f"EUF interpolant {theta} failed verification")
    return theta


def _sat(lits: Sequence[Formula]) -> bool:
    return euf_check_sat(lits).sat


def common_representatives(g: EGraph, common: set) -> dict[Term, Term]:
    """For each class, a term built only from shared constants, if one exists."""
    rep: dict[Term, Term] = {}
    for t in g.nodes:
        if t.is_constant and t.head.name in common:
            r = g.find(t)
            if r not in rep or str(t) < str(rep[r]):
                rep[r] = t
    changed = True
    while changed:
        changed = False
        for t in g.nodes:
            if not t.args or _is_pred_term(t):
                continue
            r = g.find(t)
            if r in rep:
                continue
            reps = [rep.get(g.find(x)) for x in t.args]
            if all(x is not None for x in reps):
                rep[r] = app(t.head, *reps)
                changed = True
    return rep


def euf_equality_interpolate(a: Sequence[Formula], b: Sequence[Formula],
                             abar: Sequence[Term], bbar: Sequence[Term]) -> EqualityWitness:
    """Single shared witness term (the theory is convex)."""
    if not abar or not bbar:
        raise PreconditionError("equality interpolation needs strict constants on both sides")
    prob = _build(a, b)
    if prob.bottom or prob.conflict is not None:
        raise PreconditionError("euf_equality_interpolate: A ∪ B is unsatisfiable")
    g = prob.graph
    for t in list(abar) + list(bbar):
        g.add(t)
    pair = next(((x, y) for x in abar for y in bbar if g.same(x, y)), None)
    if pair is None:
        raise PreconditionError("no strict constants are forced equal")
    common = set(formula_constants(a)) & set(formula_constants(b))
    rep = common_representatives(g, common)
    v = rep.get(g.find(pair[0]))
    if v is None:
        raise TheoryError(f"no shared term equals {pair[0]} and {pair[1]}")
    theta = euf_interpolate(list(a) + [Not(Eq(pair[0], v))], list(b) + [Not(Eq(pair[1], v))])
    return EqualityWitness((v,), theta, (pair[0],), (pair[1],))


@dataclass
class EUFSolver:
    theory: str = EUF
    convex: bool = True
    calls: int = 0
    cache: dict = field(default_factory=dict, repr=False)

    def check_sat(self, lits: Sequence[Formula]) -> bool:
        key = frozenset(lits)
        hit = self.cache.get(key)
        if hit is None:
            self.calls += 1
            hit = self.cache[key] = euf_check_sat(list(lits)).sat
        return hit

    def interpolate(self, a, b) -> Formula:
        self.calls += 1
        return euf_interpolate(a, b)

    def equality_interpolate(self, a, b, abar, bbar) -> EqualityWitness:
        self.calls += 1
        return euf_equality_interpolate(a, b, abar, bbar)

    def formula_sat(self, fs) -> bool:
        return formula_sat(self.check_sat, fs)
