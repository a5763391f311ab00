"""The combination procedure CI(T1, T2).

Starting from the purified pair, the search expands one open proof node at
a time, trying in order: closing (⊥ present), boolean propagation,
Terminate_i, Share_i and finally a Decide case split.  Every step is
recorded as metarule applications, so the interpolant is read off the
finished tree by :func:`metaproof.extract_interpolant`.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .combined import CombinedChecker, Partition, eval3, unassigned_atoms
from .core import (
    BOT, EUF, IDL, TOP, And, BudgetExceeded, CombinterpError, Eq, Formula, FreshNames, Not,
    PreconditionError, Term, atom_of, const, formula_constants, is_atom, is_common, negate,
    simplify, substitute,
)
from .euf import EUFSolver
from .idl import IDLSolver
from .metaproof import Interpolant, MetaRule, ProofNode, extract_interpolant, premise_labels
from .purify import PurifyResult, purify
from .theory import EqualityWitness, check_witness, distinct_from


class CombinerError(CombinterpError):
    """The search reached a state its own invariants rule out."""


@dataclass
class Budget:
    nodes: int = 100_000
    calls: int = 10_000


@dataclass
class ShareEvent:
    theory: str
    abar: tuple
    bbar: tuple
    terms: tuple
    theta: Formula
    a_lits: tuple
    b_lits: tuple
    contract_ok: bool
    strict_before: int
    strict_after: list = field(default_factory=list)


@dataclass
class Stats:
    nodes: int = 0
    solver_calls: int = 0
    terminates: int = 0
    decides: int = 0
    shares: list = field(default_factory=list)
    term_shares: int = 0
    violations: list = field(default_factory=list)


@dataclass
class SatVerdict:
    """An open branch where no rule applies: A ∪ B is satisfiable."""

    a: tuple
    b: tuple

    def __str__(self):
        return "sat"


@dataclass
class CIResult:
    interpolant: Interpolant | None
    tree: ProofNode
    stats: Stats
    purified: PurifyResult
    sat: SatVerdict | None = None

    @property
    def is_sat(self) -> bool:
        return self.sat is not None


# --------------------------------------------------------------------------
# Views of a node label
# --------------------------------------------------------------------------


def _units(side: Sequence[Formula]) -> dict:
    assign: dict = {}
    for f in side:
        if is_atom(f) or (isinstance(f, Not) and is_atom(f.arg)):
            atom, val = atom_of(f), not isinstance(f, Not)
            if atom in assign and assign[atom] != val:
                return {"conflict": True}
            assign[atom] = val
    return assign


def _literals(side: Sequence[Formula]) -> list[Formula]:
    return [f for f in side if is_atom(f) or (isinstance(f, Not) and is_atom(f.arg))]


@dataclass
class CombinerState:
    """A pair (A, B) of purified formula sets with derived bookkeeping."""

    a: tuple
    b: tuple
    names: FreshNames = field(default_factory=FreshNames)

    @property
    def common(self) -> frozenset:
        return frozenset(formula_constants(self.a)) & frozenset(formula_constants(self.b))

    @property
    def strict_a(self) -> tuple:
        bs = set(formula_constants(self.b))
        return tuple(n for n in formula_constants(self.a) if n not in bs)

    @property
    def strict_b(self) -> tuple:
        as_ = set(formula_constants(self.a))
        return tuple(n for n in formula_constants(self.b) if n not in as_)

    @property
    def strict_count(self) -> int:
        return len(self.strict_a) + len(self.strict_b)

    def partition(self) -> Partition:
        return Partition.of(self.a + self.b)

    def theory_literals(self, theory: str) -> tuple[list, list]:
        part = self.partition()
        ea, ia = part.split(_literals(self.a))
        eb, ib = part.split(_literals(self.b))
        return (ea, eb) if theory == EUF else (ia, ib)

    def has_assignment(self, side: str) -> bool:
        x = self.a if side == "A" else self.b
        units = _units(x)
        return all(p in units for p in _relevant_atoms(x))


def _strict_count(a: tuple, b: tuple) -> int:
    return CombinerState(a, b).strict_count


def _relevant_atoms(x: Sequence[Formula]) -> list[Formula]:
    atoms = dict.fromkeys(p for f in x for p in f.atoms())
    consts = formula_constants(x)
    for i, c in enumerate(consts):
        for d in consts[i + 1:]:
            atoms.setdefault(Eq(const(c), const(d)), None)
    return [p for p in atoms if not (isinstance(p, Eq) and p.lhs is p.rhs)]


# --------------------------------------------------------------------------
# The engine
# --------------------------------------------------------------------------


SAT_BRANCH = "sat"


class _SatFound(Exception):
    def __init__(self, node: ProofNode):
        self.node = node


def _side(node: ProofNode, side: str) -> tuple:
    return node.a if side == "A" else node.b


class Engine:
    def __init__(self, names: FreshNames, budget: Budget | None = None, seed: int | None = None,
                 checker: CombinedChecker | None = None):
        self.names = names
        self.budget = budget or Budget()
        self.rng = random.Random(seed) if seed is not None else None
        self.solvers = {EUF: EUFSolver(), IDL: IDLSolver()}
        self.checker = checker or CombinedChecker()
        self.stats = Stats()

    # -- bookkeeping -------------------------------------------------------

    def _tick(self) -> None:
        self.stats.nodes += 1
        calls = sum(s.calls for s in self.solvers.values())
        self.stats.solver_calls = calls
        if self.stats.nodes > self.budget.nodes:
            raise BudgetExceeded(f"search exceeded {self.budget.nodes} proof nodes")
        if calls > self.budget.calls:
            raise BudgetExceeded(f"search exceeded {self.budget.calls} theory-solver calls")

    def chain(self, node: ProofNode, rule: MetaRule) -> ProofNode:
        node.rule = rule
        ((a, b),) = premise_labels(node)
        child = ProofNode(a, b)
        node.children = [child]
        self._tick()
        return child

    def branch(self, node: ProofNode, rule: MetaRule) -> list[ProofNode]:
        node.rule = rule
        node.children = [ProofNode(a, b) for a, b in premise_labels(node)]
        for _ in node.children:
            self._tick()
        return node.children

    def _order(self, items: list) -> list:
        if self.rng is not None:
            items = list(items)
            self.rng.shuffle(items)
        return items

    # -- propagation ---------------------------------------------------------

    def propagation(self, node: ProofNode) -> MetaRule | None:
        """A Redplus step adding entailed literals, conjuncts or ⊥."""
        for side in ("A", "B"):
            x = _side(node, side)
            tag = "Redplus1" if side == "A" else "Redplus2"
            units = _units(x)
            if units.get("conflict"):
                return MetaRule(tag, (BOT,))
            present = set(x)
            new: list[Formula] = []
            for f in x:
                if is_atom(f) or isinstance(f, Not) and is_atom(f.arg):
                    continue
                if isinstance(f, And):
                    new.extend(g for g in f.args if g not in present)
                    continue
                v = eval3(f, units)
                if v is False:
                    return MetaRule(tag, (BOT,))
                if v is True:
                    continue
                for p in unassigned_atoms(f, units):
                    for value in (False, True):
                        units[p] = value
                        dead = eval3(f, units) is False
                        del units[p]
                        if dead:
                            lit = p if not value else negate(p)
                            if lit not in present:
                                new.append(lit)
                            break
            if new:
                return MetaRule(tag, tuple(dict.fromkeys(new)))
        return None

    # -- Terminate -----------------------------------------------------------

    def try_terminate(self, node: ProofNode) -> Formula | None:
        state = CombinerState(node.a, node.b)
        for th in (EUF, IDL):
            ai, bi = state.theory_literals(th)
            solver = self.solvers[th]
            if not solver.check_sat(ai + bi):
                theta = solver.interpolate(ai, bi)
                if not is_common(theta, state.common):
                    raise CombinerError(f"{th} interpolant {theta} is not AB-common")
                return theta
        return None

    def terminate(self, node: ProofNode, theta: Formula) -> None:
        self.stats.terminates += 1
        node = self.chain(node, MetaRule("Propagate1", (theta,)))
        node = self.chain(node, MetaRule("Redplus2", (BOT,)))
        node.rule = MetaRule("Close2")

    # -- Share ---------------------------------------------------------------

    def find_share(self, node: ProofNode):
        state = CombinerState(node.a, node.b)
        sa, sb = set(state.strict_a), set(state.strict_b)
        for th in (EUF, IDL):
            ai, bi = state.theory_literals(th)
            abar = [const(n) for n in formula_constants(ai) if n in sa]
            bbar = [const(n) for n in formula_constants(bi) if n in sb]
            if not abar or not bbar:
                continue
            solver = self.solvers[th]
            if solver.formula_sat(ai + bi + distinct_from(abar, bbar)):
                continue
            w = solver.equality_interpolate(ai, bi, abar, bbar)
            ok = check_witness(solver.formula_sat, ai, bi, w.abar, w.bbar, w) and all(
                is_common(v, state.common) for v in w.terms)
            if th == EUF and len(w.terms) != 1:
                ok = False
            event = ShareEvent(th, w.abar, w.bbar, w.terms, w.theta, tuple(ai), tuple(bi), ok,
                               state.strict_count)
            self.stats.shares.append(event)
            if not ok:
                raise CombinerError(f"{th} equality witness {w.terms} failed its contract")
            return w, event
        return None

    def share(self, node: ProofNode, w: EqualityWitness, event: ShareEvent) -> list[tuple]:
        """Apply the Share rule; returns (open node, side, strict constant, term) to term-share."""
        a_alts = [(a, v) for a in w.abar for v in w.terms]
        b_alts = [(b, v) for b in w.bbar for v in w.terms]
        a_alts, b_alts = self._order(a_alts), self._order(b_alts)
        disjuncts = [Eq(a, v) for a, v in a_alts]
        if w.theta != BOT:
            disjuncts.append(w.theta)
        kids = self.branch(node, MetaRule("Disjunction1", tuple(disjuncts)))
        out = [(k, "A", a, v) for k, (a, v) in zip(kids, a_alts)]
        if w.theta == BOT:
            return out
        theta_node = self.chain(kids[-1], MetaRule("Propagate1", (w.theta,)))
        if not b_alts:
            theta_node = self.chain(theta_node, MetaRule("Redplus2", (BOT,)))
            theta_node.rule = MetaRule("Close2")
            return out
        bkids = self.branch(theta_node, MetaRule("Disjunction2", tuple(Eq(b, v) for b, v in b_alts)))
        out.extend((k, "B", b, v) for k, (b, v) in zip(bkids, b_alts))
        return out

    # -- Term Sharing --------------------------------------------------------

    def term_share(self, node: ProofNode, side: str, d: Term, t: Term) -> ProofNode:
        x = _side(node, side)
        state = CombinerState(node.a, node.b)
        strict = state.strict_a if side == "A" else state.strict_b
        if not d.is_constant or d.head.name not in strict:
            raise PreconditionError(f"{d} is not a {side}-strict constant")
        if not is_common(t, state.common):
            raise PreconditionError(f"{t} is not AB-common")
        if Eq(d, t) not in x:
            raise PreconditionError(f"{Eq(d, t)} is not on the {side} side")
        before = state.strict_count
        if t.is_constant:
            c = t
        else:
            c = self.names.fresh()
            node = self.chain(node, MetaRule("Define0", const=c, term=t))
            x = _side(node, side)
        name = d.head.name
        touched = [f for f in x if name in f.constants()]
        renamed = [f for f in (simplify(substitute(g, {d: c})) for g in touched) if f != TOP]
        kept = [f for f in x if name not in f.constants()] + renamed
        if c.head.name not in formula_constants(kept):
            # keep c on this side, otherwise it would turn strict on the other one
            renamed.append(Eq(c, c))
        plus, minus = ("Redplus1", "Redminus1") if side == "A" else ("Redplus2", "Redminus2")
        node = self.chain(node, MetaRule(plus, tuple(renamed)))
        node = self.chain(node, MetaRule(minus, tuple(touched)))
        after = _strict_count(node.a, node.b)
        self.stats.term_shares += 1
        if after >= before:
            self.stats.violations.append(f"term sharing {d} kept strict count at {after}")
        return node

    # -- Decide --------------------------------------------------------------

    def decide_atom(self, node: ProofNode) -> tuple[str, Formula] | None:
        for side in ("A", "B"):
            x = _side(node, side)
            units = _units(x)
            for f in x:
                if eval3(f, units) is None:
                    atoms = unassigned_atoms(f, units)
                    if atoms:
                        return side, atoms[0]
        return None

    def decide_pair(self, node: ProofNode):
        """An undecided equality between interface constants of one side,
        preferring atoms from the conflict of the IDL-model arrangement.

        Returns ``SAT_BRANCH`` when that arrangement is accepted by EUF: the
        two theory models then combine, so the branch is satisfiable.
        """
        part = Partition.of(node.a + node.b)
        if len(part.interface) < 2:
            return SAT_BRANCH
        ca, cb = set(formula_constants(node.a)), set(formula_constants(node.b))
        decided = {**_units(node.a), **_units(node.b)}

        def side_of(atom: Formula) -> str | None:
            c, d = atom.constants()
            if c in ca and d in ca:
                return "A"
            if c in cb and d in cb:
                return "B"
            return None

        lits = _literals(node.a) + _literals(node.b)
        euf, idl = part.split(lits)
        inter = part.interface
        mixed = [Eq(const(c), const(d)) for i, c in enumerate(inter) for d in inter[i + 1:]
                 if side_of(Eq(const(c), const(d))) is None]
        found = self.checker.arrangement_culprits(euf, idl, part, decided, mixed)
        if found is None:
            return SAT_BRANCH
        culprits = [(side_of(p), p) for p in found if side_of(p) is not None]
        for side, atom in culprits:
            # an entailed equality closes its negative branch at once
            if not self.solvers[EUF].check_sat(euf + [Not(atom)]) or \
                    not self.solvers[IDL].check_sat(idl + [Not(atom)]):
                return side, atom
        if culprits:
            return culprits[0]
        if self.checker.check_sat(lits):
            return SAT_BRANCH
        for i, c in enumerate(inter):
            for d in inter[i + 1:]:
                atom = Eq(const(c), const(d))
                if atom not in decided and side_of(atom) is not None:
                    return side_of(atom), atom
        return None

    def split(self, node: ProofNode, side: str, atom: Formula) -> list[ProofNode]:
        self.stats.decides += 1
        tag = "Disjunction1" if side == "A" else "Disjunction2"
        return self.branch(node, MetaRule(tag, tuple(self._order([atom, Not(atom)]))))

    # -- main loop -----------------------------------------------------------

    def expand(self, node: ProofNode) -> None:
        while True:
            if BOT in node.a:
                node.rule = MetaRule("Close1")
                return
            if BOT in node.b:
                node.rule = MetaRule("Close2")
                return
            rule = self.propagation(node)
            if rule is not None:
                node = self.chain(node, rule)
                continue
            theta = self.try_terminate(node)
            if theta is not None:
                self.terminate(node, theta)
                return
            found = self.find_share(node)
            if found is not None:
                w, event = found
                for child, side, d, v in self.share(node, w, event):
                    leaf = self.term_share(child, side, d, v)
                    after = _strict_count(leaf.a, leaf.b)
                    event.strict_after.append(after)
                    if after >= event.strict_before:
                        self.stats.violations.append(
                            f"share on {event.theory} did not decrease the strict count")
                    self.expand(leaf)
                return
            pick = self.decide_atom(node)
            if pick is None:
                pick = self.decide_pair(node)
                if pick is SAT_BRANCH:
                    raise _SatFound(node)
            if pick is None:
                raise CombinerError("no rule applies but the branch is unsatisfiable")
            for child in self.split(node, *pick):
                self.expand(child)
            return


def _attach(node: ProofNode, steps: Sequence[MetaRule], engine: Engine) -> ProofNode:
    for r in steps:
        node = engine.chain(node, r)
    return node


def ci_interpolate(a0: Sequence[Formula], b0: Sequence[Formula], budget: Budget | None = None,
                   seed: int | None = None, checker: CombinedChecker | None = None) -> CIResult:
    """Interpolant of an EUF ∪ IDL unsatisfiable pair, or a SAT verdict."""
    a0, b0 = tuple(a0), tuple(b0)
    names = FreshNames()
    pur = purify(a0, b0, names)
    engine = Engine(names, budget, seed, checker)
    root = ProofNode(a0, b0)
    leaf = _attach(root, pur.steps, engine)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20_000))
    try:
        engine.expand(leaf)
    except _SatFound as hit:
        return CIResult(None, root, engine.stats, pur, SatVerdict(hit.node.a, hit.node.b))
    finally:
        sys.setrecursionlimit(old)
    return CIResult(extract_interpolant(root), root, engine.stats, pur)


# --------------------------------------------------------------------------
# Single-step API over states
# --------------------------------------------------------------------------


def _leaves(node: ProofNode) -> list[ProofNode]:
    return [n for n in node.iter_nodes() if not n.children and n.rule is None]


def decide(side: str, state: CombinerState) -> list[CombinerState]:
    """All satisfying assignments of the relevant atoms of one side."""
    x = state.a if side == "A" else state.b
    if state.has_assignment(side):
        raise PreconditionError(f"{side} already contains an assignment")
    atoms = _relevant_atoms(x)
    units = _units(x)
    free = [p for p in atoms if p not in units]
    out: list[tuple] = []

    def walk(i: int, assign: dict) -> None:
        if any(eval3(f, assign) is False for f in x):
            return
        if i == len(free):
            out.append(tuple(p if assign[p] else Not(p) for p in free))
            return
        for v in (True, False):
            walk(i + 1, {**assign, free[i]: v})

    walk(0, dict(units))
    if not out:
        out = [(BOT,)]
    succ = []
    for lits in out:
        nx = tuple(dict.fromkeys(x + lits))
        succ.append(CombinerState(nx, state.b, state.names) if side == "A"
                    else CombinerState(state.a, nx, state.names))
    return succ


def terminate(theory: str, state: CombinerState) -> tuple[CombinerState, Formula]:
    """Apply Terminate_i; returns the closed successor and θ."""
    if BOT in state.a or BOT in state.b:
        raise PreconditionError("⊥ is already present")
    engine = Engine(state.names)
    ai, bi = state.theory_literals(theory)
    solver = engine.solvers[theory]
    if solver.check_sat(ai + bi):
        raise PreconditionError(f"A_{theory} ∪ B_{theory} is satisfiable")
    theta = solver.interpolate(ai, bi)
    return CombinerState(state.a, tuple(dict.fromkeys(state.b + (theta, BOT))), state.names), theta


def share(theory: str, state: CombinerState) -> list[CombinerState]:
    """Apply Share_i followed by Term Sharing on every alternative."""
    engine = Engine(state.names)
    node = ProofNode(state.a, state.b)
    solvers = engine.solvers
    engine.solvers = {theory: solvers[theory], **{k: v for k, v in solvers.items() if k != theory}}
    found = engine.find_share(node)
    if found is None or found[1].theory != theory:
        raise PreconditionError(f"Share_{theory} is not applicable")
    out = []
    for child, side, d, v in engine.share(node, *found):
        leaf = engine.term_share(child, side, d, v)
        out.append(CombinerState(leaf.a, leaf.b, state.names))
    return out


def term_share(state: CombinerState, d: Term, t: Term) -> CombinerState:
    side = "A" if d.head.name in state.strict_a else "B"
    engine = Engine(state.names)
    leaf = engine.term_share(ProofNode(state.a, state.b), side, d, t)
    return CombinerState(leaf.a, leaf.b, state.names)
