"""Integer difference logic over 0, succ, pred and <.

Every atom normalizes to ``lhs ⋈ rhs + n`` with lhs, rhs free constants or 0.
Satisfiability is a negative-cycle search on the constraint graph; negated
equalities are split lazily into ``<`` and ``>`` when the current model
violates them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .core import (
    BOT, IDL, TOP, ZERO_TERM, Eq, Formula, Lt, Not, PreconditionError, Term,
    conj, disj, formula_constants, offset, split_offset, substitute,
)
from .theory import (
    EqualityWitness, QEResult, TheoryError, check_interpolant, distinct_from,
    formula_sat, qe_equality_witness, shrink_witness,
)


@dataclass(frozen=True)
class DiffAtom:
    """``lhs rel rhs + n`` where rel is "<", "=" or "!=" (the last only
    before splitting)."""

    lhs: Term
    rhs: Term
    n: int
    rel: str

    def to_formula(self) -> Formula:
        if self.rel == "<":
            return Lt(self.lhs, offset(self.rhs, self.n))
        eq = Eq(self.lhs, offset(self.rhs, self.n))
        return eq if self.rel == "=" else Not(eq)

    def __str__(self):
        return str(self.to_formula())


def _base(t: Term) -> tuple[Term, int]:
    base, n = split_offset(t)
    if not (base.is_constant or base is ZERO_TERM):
        raise PreconditionError(f"{t} is not an IDL term")
    return base, n


def idl_normalize(lit: Formula) -> list[DiffAtom] | Formula:
    """Normal form of a pure IDL literal: a one-element list, or TOP/BOT."""
    if lit == TOP or lit == BOT:
        return lit
    positive = not isinstance(lit, Not)
    atom = lit.arg if not positive else lit
    if not isinstance(atom, (Eq, Lt)):
        raise PreconditionError(f"{lit} is not an IDL literal")
    (x, i), (y, j) = _base(atom.lhs), _base(atom.rhs)
    if isinstance(atom, Lt):
        if positive:  # x+i < y+j
            d = DiffAtom(x, y, j - i, "<")
        else:  # y+j <= x+i  <=>  y < x + (i-j+1)
            d = DiffAtom(y, x, i - j + 1, "<")
    else:
        d = DiffAtom(x, y, j - i, "=" if positive else "!=")
    if d.lhs is d.rhs:
        holds = {"<": 0 < d.n, "=": d.n == 0, "!=": d.n != 0}[d.rel]
        return TOP if holds else BOT
    return [d]


def normalize_all(lits: Sequence[Formula]) -> list[DiffAtom] | Formula:
    out: list[DiffAtom] = []
    for lit in lits:
        r = idl_normalize(lit)
        if r == BOT:
            return BOT
        if r == TOP:
            continue
        out.extend(r)
    return out


# --------------------------------------------------------------------------
# Constraint graph
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    """dist(dst) <= dist(src) + w."""

    src: Term
    dst: Term
    w: int
    side: str = "A"


def atom_edges(d: DiffAtom, side: str) -> list[Edge]:
    if d.rel == "<":
        return [Edge(d.rhs, d.lhs, d.n - 1, side)]
    if d.rel == "=":
        return [Edge(d.rhs, d.lhs, d.n, side), Edge(d.lhs, d.rhs, -d.n, side)]
    raise PreconditionError("disequalities have no edges")


@dataclass
class GraphResult:
    sat: bool
    model: dict = field(default_factory=dict)
    cycle: list = field(default_factory=list)

    @property
    def weight(self) -> int:
        return sum(e.w for e in self.cycle)


def bellman_ford(edges: Sequence[Edge]) -> GraphResult:
    verts = list(dict.fromkeys([ZERO_TERM] + [v for e in edges for v in (e.src, e.dst)]))
    dist = {v: 0 for v in verts}
    pred: dict[Term, Edge] = {}
    changed_at = None
    for _ in range(len(verts) + 1):
        changed_at = None
        for e in edges:
            if dist[e.src] + e.w < dist[e.dst]:
                dist[e.dst] = dist[e.src] + e.w
                pred[e.dst] = e
                changed_at = e.dst
        if changed_at is None:
            break
    if changed_at is None:
        z = dist[ZERO_TERM]
        return GraphResult(True, {v: dist[v] - z for v in verts})
    v = changed_at
    for _ in range(len(verts)):
        v = pred[v].src
    cycle = []
    u = v
    while True:
        e = pred[u]
        cycle.append(e)
        u = e.src
        if u is v:
            break
    cycle.reverse()
    return GraphResult(False, cycle=cycle)


def _holds(d: DiffAtom, model: dict) -> bool:
    lhs, rhs = model.get(d.lhs, 0), model.get(d.rhs, 0) + d.n
    return {"<": lhs < rhs, "=": lhs == rhs, "!=": lhs != rhs}[d.rel]


def _split(d: DiffAtom) -> tuple[DiffAtom, DiffAtom]:
    # x != y+n  <=>  x < y+n  or  y < x-n
    return DiffAtom(d.lhs, d.rhs, d.n, "<"), DiffAtom(d.rhs, d.lhs, -d.n, "<")


@dataclass
class IDLResult:
    sat: bool
    model: dict = field(default_factory=dict)
    cycle: list = field(default_factory=list)


def _solve(atoms: Sequence[tuple[DiffAtom, str]]) -> IDLResult:
    base = [(d, s) for d, s in atoms if d.rel != "!="]
    diseqs = [(d, s) for d, s in atoms if d.rel == "!="]
    res = bellman_ford([e for d, s in base for e in atom_edges(d, s)])
    if not res.sat:
        return IDLResult(False, cycle=res.cycle)
    for k, (d, s) in enumerate(diseqs):
        if not _holds(d, res.model):
            rest = base + diseqs[:k] + diseqs[k + 1:]
            for alt in _split(d):
                r = _solve(rest + [(alt, s)])
                if r.sat:
                    return r
            return IDLResult(False)
    return IDLResult(True, res.model)


def idl_check_sat(lits: Sequence[Formula]) -> IDLResult:
    """Decide a conjunction of IDL literals; SAT comes with an integer model
    (constant name -> value), UNSAT without disequalities with the cycle."""
    atoms = normalize_all(lits)
    if atoms == BOT:
        return IDLResult(False)
    r = _solve([(d, "A") for d in atoms])
    if r.sat:
        r.model = {k.head.name: v for k, v in r.model.items() if k is not ZERO_TERM}
    return r


def _sat(lits: Sequence[Formula]) -> bool:
    return idl_check_sat(lits).sat


def _summaries(cycle: list[Edge]) -> Formula:
    if all(e.side == "A" for e in cycle):
        return BOT
    if all(e.side == "B" for e in cycle):
        return TOP
    # rotate so the cycle starts with a B edge, then collect maximal A runs
    k = next(i for i, e in enumerate(cycle) if e.side == "B")
    cyc = cycle[k:] + cycle[:k]
    out, i = [], 0
    while i < len(cyc):
        if cyc[i].side == "B":
            i += 1
            continue
        j, w = i, 0
        while j < len(cyc) and cyc[j].side == "A":
            w += cyc[j].w
            j += 1
        u, v = cyc[i].src, cyc[j - 1].dst
        out.append(Lt(v, offset(u, w + 1)))
        i = j
    return conj(out)


def _interp(atoms: list[tuple[DiffAtom, str]]) -> Formula:
    base = [(d, s) for d, s in atoms if d.rel != "!="]
    diseqs = [(d, s) for d, s in atoms if d.rel == "!="]
    res = bellman_ford([e for d, s in base for e in atom_edges(d, s)])
    if not res.sat:
        return _summaries(res.cycle)
    for k, (d, s) in enumerate(diseqs):
        if not _holds(d, res.model):
            rest = base + diseqs[:k] + diseqs[k + 1:]
            parts = [_interp(rest + [(alt, s)]) for alt in _split(d)]
            return disj(parts) if s == "A" else conj(parts)
    raise PreconditionError("idl_interpolate: A ∪ B is satisfiable")


def idl_interpolate(a: Sequence[Formula], b: Sequence[Formula], verify: bool = True) -> Formula:
    """Interpolant of an IDL-unsatisfiable pair of literal sets."""
    na, nb = normalize_all(a), normalize_all(b)
    if na == BOT:
        return BOT
    if nb == BOT:
        return TOP
    theta = _interp([(d, "A") for d in na] + [(d, "B") for d in nb])
    if verify:
        common = frozenset(formula_constants(a)) & frozenset(formula_constants(b))
        if not check_interpolant(_sat, a, b, theta, common):
            raise TheoryError(f"IDL interpolant {theta} failed verification")
    return theta


# --------------------------------------------------------------------------
# Quantifier elimination
# --------------------------------------------------------------------------


def idl_qe(x: Term, lits: Sequence[Formula]) -> QEResult:
    """Eliminate ``x`` from a conjunction of IDL literals.

    Disjunct witnesses: an equality gives its term,
    otherwise one disjunct per lower bound v (x := v+1), or per upper bound u
    when there is no lower bound (x := u-1).
    """
    atoms = normalize_all(lits)
    if atoms == BOT:
        return QEResult(x, [])
    eqs, lows, ups, rest = [], [], [], []
    for d in atoms:
        if d.rel == "!=" and x in (d.lhs, d.rhs):
            raise PreconditionError(f"idl_qe does not accept the disequality {d}")
        if d.lhs is x:
            (eqs if d.rel == "=" else ups).append(offset(d.rhs, d.n))
        elif d.rhs is x:
            (eqs if d.rel == "=" else lows).append(offset(d.lhs, -d.n))
        else:
            rest.append(d.to_formula())
    if eqs:
        cands = eqs[:1]
    elif lows:
        cands = [offset(v, 1) for v in lows]
    elif ups:
        cands = [offset(u, -1) for u in ups]
    else:
        cands = [ZERO_TERM]
    res = QEResult(x)
    for t in dict.fromkeys(cands):
        inst = normalize_all([substitute(f, {x: t}) for f in lits])
        if inst == BOT:
            continue
        res.disjuncts.append((t, tuple(dict.fromkeys(d.to_formula() for d in inst))))
    return res


def split_disequalities(lits: Sequence[Formula], var: Term | None = None) -> list[list[Formula]]:
    """All ways of replacing each negated equality (only those mentioning
    ``var``, when given) by < or >."""
    plain, options = [], []
    for lit in lits:
        r = idl_normalize(lit)
        if isinstance(r, list) and r[0].rel == "!=" and (var is None or var in (r[0].lhs, r[0].rhs)):
            options.append([alt.to_formula() for alt in _split(r[0])])
        else:
            plain.append(lit)
    return [plain + list(choice) for choice in product(*options)]


def idl_equality_interpolate(a: Sequence[Formula], b: Sequence[Formula],
                             abar: Sequence[Term], bbar: Sequence[Term]) -> EqualityWitness:
    if not abar or not bbar:
        raise PreconditionError("equality interpolation needs strict constants on both sides")
    if not idl_check_sat(list(a) + list(b)).sat:
        raise PreconditionError("idl_equality_interpolate: A ∪ B is unsatisfiable")
    vs = qe_equality_witness(idl_qe, a, b, list(dict.fromkeys(bbar)), split=split_disequalities,
                             check_sat=_sat)
    vs, abar, bbar = shrink_witness(_sat, a, b, abar, bbar, vs)
    theta = idl_interpolate(list(a) + distinct_from(abar, vs), list(b) + distinct_from(bbar, vs))
    return EqualityWitness(tuple(vs), theta, tuple(abar), tuple(bbar))


@dataclass
class IDLSolver:
    theory: str = IDL
    convex: bool = False
    calls: int = 0
    cache: dict = field(default_factory=dict, repr=False)

    def check_sat(self, lits: Sequence[Formula]) -> bool:
        key = frozenset(lits)
        hit = self.cache.get(key)
        if hit is None:
            self.calls += 1
            hit = self.cache[key] = idl_check_sat(list(lits)).sat
        return hit

    def interpolate(self, a, b) -> Formula:
        self.calls += 1
        return idl_interpolate(a, b)

    def equality_interpolate(self, a, b, abar, bbar) -> EqualityWitness:
        self.calls += 1
        return idl_equality_interpolate(a, b, abar, bbar)

    def formula_sat(self, fs) -> bool:
        return formula_sat(self.check_sat, fs)
