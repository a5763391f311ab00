"""Metarule refutation trees and top-down interpolant extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import (
    BOT, TOP, CombinterpError, Eq, Formula, Term, conj, disj, formula_constants,
    implies, is_common, negate, ordered_union, simplify, substitute,
)

TAGS = (
    "Close1", "Close2", "Propagate1", "Propagate2", "Define0", "Define1", "Define2",
    "Disjunction1", "Disjunction2", "Redplus1", "Redplus2", "Redminus1", "Redminus2",
)


class ProofError(CombinterpError):
    """A proof tree is not a valid interpolating refutation."""


@dataclass(frozen=True)
class MetaRule:
    """A metarule application.

    ``formulas`` holds the rule-specific formula payload: the propagated
    formula, the disjuncts of a case split, or the formulas added/removed by
    a Redplus/Redminus step.  Define rules carry ``const = term``.
    """

    tag: str
    formulas: tuple = ()
    const: Term | None = None
    term: Term | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown metarule {self.tag!r}")
        if self.tag.startswith("Define") and (self.const is None or self.term is None):
            raise ValueError(f"{self.tag} needs a constant and a defining term")

    @property
    def definition(self) -> Formula:
        return Eq(self.const, self.term)

    def payload_str(self) -> str:
        if self.tag.startswith("Define"):
            return str(self.definition)
        if not self.formulas:
            return "()"
        return "(" + " ".join(str(f) for f in self.formulas) + ")"


def add_all(side: tuple, formulas: Iterable[Formula]) -> tuple:
    """Ordered set union; ``true`` is never stored."""
    return ordered_union(side, (f for f in formulas if f != TOP))


def remove_all(side: tuple, formulas: Iterable[Formula]) -> tuple:
    drop = set(formulas)
    return tuple(f for f in side if f not in drop)


class ProofNode:
    """A node labelled by the pair (A, B).

    ``rule`` is None only while the combiner is still expanding the node;
    finished trees have a rule on every node.
    """

    __slots__ = ("a", "b", "rule", "children")

    def __init__(self, a: tuple, b: tuple, rule: MetaRule | None = None, children=None):
        self.a = tuple(a)
        self.b = tuple(b)
        self.rule = rule
        self.children: list[ProofNode] = list(children or [])

    def __repr__(self):
        tag = self.rule.tag if self.rule else "open"
        return f"<ProofNode {tag} |A|={len(self.a)} |B|={len(self.b)}>"

    def iter_nodes(self) -> Iterator["ProofNode"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def size(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def common_constants(self) -> frozenset[str]:
        return frozenset(formula_constants(self.a)) & frozenset(formula_constants(self.b))


def premise_labels(node: ProofNode) -> list[tuple[tuple, tuple]]:
    """The (A, B) labels the rule at ``node`` requires of its children."""
    r, a, b = node.rule, node.a, node.b
    tag = r.tag
    if tag in ("Close1", "Close2"):
        return []
    if tag == "Propagate1":
        return [(a, add_all(b, r.formulas))]
    if tag == "Propagate2":
        return [(add_all(a, r.formulas), b)]
    if tag == "Define0":
        return [(add_all(a, [r.definition]), add_all(b, [r.definition]))]
    if tag == "Define1":
        return [(add_all(a, [r.definition]), b)]
    if tag == "Define2":
        return [(a, add_all(b, [r.definition]))]
    if tag == "Disjunction1":
        return [(add_all(a, [psi]), b) for psi in r.formulas]
    if tag == "Disjunction2":
        return [(a, add_all(b, [psi])) for psi in r.formulas]
    if tag == "Redplus1":
        return [(add_all(a, r.formulas), b)]
    if tag == "Redplus2":
        return [(a, add_all(b, r.formulas))]
    if tag == "Redminus1":
        return [(remove_all(a, r.formulas), b)]
    if tag == "Redminus2":
        return [(a, remove_all(b, r.formulas))]
    raise AssertionError(tag)


def _local(f: Formula, side: tuple) -> bool:
    return set(f.constants()) <= set(formula_constants(side))


def check_node(node: ProofNode, where: str = "root") -> None:
    """Structural validation of one node: provisos that are syntactic,
    child count and child labels."""
    r = node.rule
    if r is None:
        raise ProofError(f"{where}: node has no rule (open branch)")
    tag = r.tag
    if tag == "Close1" and BOT not in node.a:
        raise ProofError(f"{where} (Close1): false is not in A")
    if tag == "Close2" and BOT not in node.b:
        raise ProofError(f"{where} (Close2): false is not in B")
    if tag.startswith("Define"):
        if not r.const.is_constant:
            raise ProofError(f"{where} ({tag}): defined symbol is not a constant")
        name = r.const.head.name
        if name in formula_constants(node.a) or name in formula_constants(node.b):
            raise ProofError(f"{where} ({tag}): constant {name} is not fresh")
        if tag == "Define0" and not is_common(r.term, node.common_constants()):
            raise ProofError(f"{where} (Define0): {r.term} is not AB-common")
        if tag == "Define1" and not _local(r.term, node.a):
            raise ProofError(f"{where} (Define1): {r.term} is not A-local")
        if tag == "Define2" and not _local(r.term, node.b):
            raise ProofError(f"{where} (Define2): {r.term} is not B-local")
    if tag in ("Propagate1", "Propagate2"):
        if len(r.formulas) != 1:
            raise ProofError(f"{where} ({tag}): expects exactly one formula")
        if not is_common(r.formulas[0], node.common_constants()):
            raise ProofError(f"{where} ({tag}): {r.formulas[0]} is not AB-common")
    if tag in ("Disjunction1", "Redplus1"):
        bad = [f for f in r.formulas if not _local(f, node.a)]
        if bad:
            raise ProofError(f"{where} ({tag}): {bad[0]} is not A-local")
    if tag in ("Disjunction2", "Redplus2"):
        bad = [f for f in r.formulas if not _local(f, node.b)]
        if bad:
            raise ProofError(f"{where} ({tag}): {bad[0]} is not B-local")
    expected = premise_labels(node)
    if len(expected) != len(node.children):
        raise ProofError(f"{where} ({tag}): expected {len(expected)} premises, "
                         f"found {len(node.children)}")
    for i, ((ea, eb), child) in enumerate(zip(expected, node.children)):
        if set(ea) != set(child.a) or set(eb) != set(child.b):
            raise ProofError(f"{where}.{i}: label does not match premise of {tag}")


def instruction(rule: MetaRule, premise_interpolants: Sequence[Formula]) -> Formula:
    """Interpolant of the conclusion from the interpolants of the premises."""
    tag = rule.tag
    if tag == "Close1":
        return BOT
    if tag == "Close2":
        return TOP
    if tag in ("Disjunction1", "Disjunction2"):
        if len(premise_interpolants) != len(rule.formulas):
            raise ProofError(f"{tag}: premise count mismatch")
        combine = disj if tag == "Disjunction1" else conj
        return combine(premise_interpolants)
    (phi,) = premise_interpolants
    if tag == "Propagate1":
        return conj([rule.formulas[0], phi])
    if tag == "Propagate2":
        return implies(rule.formulas[0], phi)
    if tag == "Define0":
        return simplify(substitute(phi, {rule.const: rule.term}))
    return phi


@dataclass
class Interpolant:
    formula: Formula
    common: frozenset = field(default_factory=frozenset)

    def __str__(self):
        return str(self.formula)


def extract_interpolant(tree: ProofNode, validate: bool = True) -> Interpolant:
    """Compute the interpolant of the root by applying every node's instruction
    bottom-up (post-order), validating each node on the way."""
    results: dict[int, Formula] = {}
    stack: list[tuple[ProofNode, str, bool]] = [(tree, "root", False)]
    while stack:
        node, where, expanded = stack.pop()
        if not expanded:
            if validate:
                check_node(node, where)
            elif node.rule is None:
                raise ProofError(f"{where}: node has no rule (open branch)")
            stack.append((node, where, True))
            for i, c in enumerate(reversed(node.children)):
                stack.append((c, f"{where}.{len(node.children) - 1 - i}", False))
        else:
            prem = [results.pop(id(c)) for c in node.children]
            results[id(node)] = instruction(node.rule, prem)
    formula = simplify(results[id(tree)])
    common = tree.common_constants()
    if validate and not is_common(formula, common):
        raise ProofError(f"extracted formula {formula} is not AB-common")
    return Interpolant(formula, common)


def node_interpolants(tree: ProofNode) -> dict[int, Formula]:
    """Interpolant for every node, keyed by ``id(node)``."""
    out: dict[int, Formula] = {}
    order = list(tree.iter_nodes())
    for node in reversed(order):
        out[id(node)] = instruction(node.rule, [out[id(c)] for c in node.children])
    return out


def check_local_soundness(node: ProofNode, premise_interpolants: Sequence[Formula], checker):
    """Whether the rule's instruction yields an interpolant of the node label.

    ``checker.unsat(formulas)`` must return True/False, or None when it ran
    out of budget; the result is then None (indeterminate).
    """
    theta = instruction(node.rule, premise_interpolants)
    if not is_common(theta, node.common_constants()):
        return False
    first = checker.unsat(list(node.a) + [negate(theta)])
    if first is False:
        return False
    second = checker.unsat(list(node.b) + [theta])
    if second is False:
        return False
    if first is None or second is None:
        return None
    return True


def format_trace(tree: ProofNode) -> str:
    """One line per node: ``(rule <tag> <payload> (interpolant <formula>))``."""
    interps = node_interpolants(tree)
    lines = []
    stack = [(tree, 0)]
    while stack:
        node, depth = stack.pop()
        theta = simplify(interps[id(node)])
        lines.append("  " * depth + f"(rule {node.rule.tag} {node.rule.payload_str()} "
                     f"(interpolant {theta}))")
        for c in reversed(node.children):
            stack.append((c, depth + 1))
    return "\n".join(lines)
