"""Satisfiability for EUF ∪ IDL and verification of interpolants.

Nelson-Oppen style: purify, split on boolean structure with three-valued
propagation, check each theory on its literals, and settle the arrangement
of interface constants lazily from the IDL model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .core import (
    BOT, IDL, TOP, And, BudgetExceeded, Eq, Formula, FreshNames, Not, Or,
    atom_of, const, formula_constants, is_atom, is_const_eq, literal_theory, negate,
)
from .euf import EUFSolver, euf_check_sat
from .idl import IDLSolver, idl_check_sat
from .purify import purify_set


def eval3(f: Formula, assign: dict) -> bool | None:
    """Three-valued evaluation under a partial assignment of atoms."""
    if f == TOP:
        return True
    if f == BOT:
        return False
    if isinstance(f, Not):
        v = eval3(f.arg, assign)
        return None if v is None else not v
    if isinstance(f, And):
        unknown = False
        for g in f.args:
            v = eval3(g, assign)
            if v is False:
                return False
            unknown |= v is None
        return None if unknown else True
    if isinstance(f, Or):
        unknown = False
        for g in f.args:
            v = eval3(g, assign)
            if v is True:
                return True
            unknown |= v is None
        return None if unknown else False
    if isinstance(f, Eq) and f.lhs is f.rhs:
        return True
    return assign.get(f)


def unassigned_atoms(f: Formula, assign: dict) -> list[Formula]:
    return [p for p in dict.fromkeys(f.atoms())
            if p not in assign and not (isinstance(p, Eq) and p.lhs is p.rhs)]


def propagate(formulas: Sequence[Formula], assign: dict) -> bool:
    """Unit propagation to a fixpoint; False on a propositional conflict.
    ``assign`` is extended in place."""
    changed = True
    while changed:
        changed = False
        for f in formulas:
            v = eval3(f, assign)
            if v is False:
                return False
            if v is True:
                continue
            for p in unassigned_atoms(f, assign):
                for value in (False, True):
                    assign[p] = value
                    dead = eval3(f, assign) is False
                    del assign[p]
                    if dead:
                        assign[p] = not value
                        changed = True
                        break
                if p in assign:
                    break
            if eval3(f, assign) is False:
                return False
    return True


@lru_cache(maxsize=1 << 16)
def _atom_kind(atom: Formula) -> str | None:
    return "eq" if is_const_eq(atom) else literal_theory(atom)


@dataclass
class Partition:
    """Which theory receives a literal, and the interface constants."""

    idl_consts: frozenset
    interface: tuple

    @staticmethod
    def of(formulas: Iterable[Formula]) -> "Partition":
        idl, euf, eqc = {}, {}, {}
        for f in formulas:
            for atom in f.atoms():
                if is_const_eq(atom):
                    eqc.update(dict.fromkeys(atom.constants()))
                    continue
                th = literal_theory(atom)
                target = idl if th == IDL else euf
                target.update(dict.fromkeys(atom.constants()))
        inter = tuple(sorted(n for n in idl if n in euf or n in eqc))
        return Partition(frozenset(idl), inter)

    def split(self, lits: Sequence[Formula]) -> tuple[list, list]:
        euf, idl = [], []
        for lit in lits:
            if lit == TOP:
                continue
            atom = atom_of(lit)
            kind = _atom_kind(atom)
            if kind == "eq":
                euf.append(lit)
                if all(n in self.idl_consts for n in atom.constants()):
                    idl.append(lit)
            elif kind == IDL:
                idl.append(lit)
            else:
                euf.append(lit)
        return euf, idl


def assignment_literals(assign: dict) -> list[Formula]:
    return [p if v else Not(p) for p, v in assign.items()]


@dataclass
class CombinedChecker:
    """Combined EUF ∪ IDL satisfiability with a per-call node budget."""

    budget_nodes: int = 100_000
    euf: EUFSolver = field(default_factory=EUFSolver)
    idl: IDLSolver = field(default_factory=IDLSolver)
    cache: dict = field(default_factory=dict, repr=False)
    nodes: int = 0

    def check_sat(self, formulas: Sequence[Formula]) -> bool:
        key = frozenset(formulas)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        names = FreshNames()
        names.skip_past(formula_constants(formulas))
        fs = purify_set(list(formulas), names)
        self.nodes = 0
        part = Partition.of(fs)
        assign: dict = {}
        rest = []
        for f in fs:
            if f == TOP:
                continue
            if is_atom(f) or (isinstance(f, Not) and is_atom(f.arg)):
                atom, val = atom_of(f), not isinstance(f, Not)
                if assign.get(atom, val) != val:
                    self.cache[key] = False
                    return False
                assign[atom] = val
            else:
                rest.append(f)
        result = self._search(rest, assign, part)
        self.cache[key] = result
        return result

    def unsat(self, formulas: Sequence[Formula]) -> bool | None:
        try:
            return not self.check_sat(formulas)
        except BudgetExceeded:
            return None

    def theories_sat(self, lits: Sequence[Formula], part: Partition) -> bool:
        euf, idl = part.split(lits)
        return self.euf.check_sat(euf) and self.idl.check_sat(idl)

    def _search(self, formulas: list, assign: dict, part: Partition) -> bool:
        self.nodes += 1
        if self.nodes > self.budget_nodes:
            raise BudgetExceeded(f"combined check exceeded {self.budget_nodes} nodes")
        assign = dict(assign)
        if not propagate(formulas, assign):
            return False
        lits = assignment_literals(assign)
        if not self.theories_sat(lits, part):
            return False
        for f in formulas:
            if eval3(f, assign) is None:
                p = unassigned_atoms(f, assign)[0]
                return any(self._search(formulas, {**assign, p: v}, part) for v in (True, False))
        euf, idl = part.split(lits)
        culprits = self.arrangement_culprits(euf, idl, part, assign)
        if culprits is None:
            return True
        if not culprits:
            return False
        return any(self._search(formulas, {**assign, culprits[0]: v}, part) for v in (True, False))

    def arrangement_culprits(self, euf: list, idl: list, part: Partition, decided,
                             separate: Sequence[Formula] = ()) -> list | None:
        """Try the arrangement of the interface constants induced by an IDL
        model.  None if EUF accepts it; otherwise the undecided arrangement
        atoms in the EUF conflict (empty when IDL itself is unsatisfiable
        or the conflict uses no undecided atom).  The IDL model is taken with
        the equalities in ``separate`` forced false when that is consistent."""
        if not part.interface:
            return None
        res = idl_check_sat(idl + [Not(p) for p in separate]) if separate else None
        if res is None or not res.sat:
            res = idl_check_sat(idl)
        if not res.sat:
            return []
        model = res.model
        extra = []
        inter = part.interface
        for i, a in enumerate(inter):
            for b in inter[i + 1:]:
                eq = Eq(const(a), const(b))
                if eq not in decided:
                    extra.append(eq if model.get(a, 0) == model.get(b, 0) else Not(eq))
        self.euf.calls += 1
        res = euf_check_sat(euf + extra)
        if res.sat:
            return None
        chosen = set(extra)
        return [atom_of(lit) for lit in res.core if lit in chosen]


_DEFAULT = None


def default_checker() -> CombinedChecker:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = CombinedChecker()
    return _DEFAULT


def combined_check_sat(formulas: Sequence[Formula], budget_nodes: int | None = None) -> bool:
    """True iff the formula set is EUF ∪ IDL satisfiable."""
    if budget_nodes is None:
        return default_checker().check_sat(list(formulas))
    return CombinedChecker(budget_nodes).check_sat(list(formulas))


@dataclass
class VerifyReport:
    entailed_by_a: bool | None
    inconsistent_with_b: bool | None
    shared_symbols: bool

    @property
    def ok(self) -> bool:
        return bool(self.entailed_by_a and self.inconsistent_with_b and self.shared_symbols)

    @property
    def indeterminate(self) -> bool:
        return self.entailed_by_a is None or self.inconsistent_with_b is None


def verify_interpolant(a: Sequence[Formula], b: Sequence[Formula], theta: Formula,
                       checker: CombinedChecker | None = None) -> VerifyReport:
    """The three interpolant conditions over EUF ∪ IDL."""
    checker = checker or default_checker()
    common = set(formula_constants(a)) & set(formula_constants(b))
    shared = all(n in common for n in theta.constants())
    first = checker.unsat(list(a) + [negate(theta)])
    second = checker.unsat(list(b) + [theta])
    return VerifyReport(first, second, shared)

