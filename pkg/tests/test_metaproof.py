import pytest

from combinterp.combined import CombinedChecker
from combinterp.core import BOT, TOP, Eq, const
from combinterp.metaproof import (
    MetaRule, ProofError, ProofNode, check_local_soundness, check_node, extract_interpolant,
    format_trace, instruction, node_interpolants, premise_labels,
)
from helpers import F, T, fs

p, q = F("(< x y)"), F("(= x y)")


@pytest.mark.parametrize("rule, prem, expect", [
    (MetaRule("Close1"), [], BOT),
    (MetaRule("Close2"), [], TOP),
    (MetaRule("Disjunction1", (p, q)), [p, q], F("(or (< x y) (= x y))")),
    (MetaRule("Disjunction2", (p, q)), [p, q], F("(and (< x y) (= x y))")),
    (MetaRule("Propagate1", (p,)), [q], F("(and (< x y) (= x y))")),
    (MetaRule("Propagate2", (p,)), [q], F("(or (not (< x y)) (= x y))")),
    (MetaRule("Redplus1", (p,)), [q], q),
    (MetaRule("Redminus2", (p,)), [q], q),
])
def test_instruction_cases(rule, prem, expect):
    assert instruction(rule, prem) == expect


def test_define0_substitutes_back():
    k = const("_k0")
    rule = MetaRule("Define0", const=k, term=T("(f x)"))
    assert instruction(rule, [Eq(k, T("y"))]) == F("(= (f x) y)")


def test_unknown_tag_and_missing_definition():
    with pytest.raises(ValueError):
        MetaRule("Define9")
    with pytest.raises(ValueError):
        MetaRule("Define1", const=const("_k0"))


def _chain(a, b, rules):
    """Build a linear tree by applying ``rules`` top-down."""
    root = node = ProofNode(a, b)
    for r in rules:
        node.rule = r
        labels = premise_labels(node)
        if not labels:
            break
        child = ProofNode(*labels[0])
        node.children = [child]
        node = child
    return root


def test_small_refutation():
    a, b = fs("(< x y)"), fs("(< y x)")
    tree = _chain(a, b, [MetaRule("Propagate1", (p,)), MetaRule("Redplus2", (BOT,)),
                         MetaRule("Close2")])
    assert extract_interpolant(tree).formula == p
    checker = CombinedChecker()
    interps = node_interpolants(tree)
    for n in tree.iter_nodes():
        assert check_local_soundness(n, [interps[id(c)] for c in n.children], checker)
    lines = format_trace(tree).splitlines()
    assert len(lines) == 3 and lines[0].startswith("(rule Propagate1")


def test_bad_trees_are_rejected():
    a, b = fs("(< x a)"), fs("(< y x)")
    with pytest.raises(ProofError, match="not AB-common"):
        check_node(_chain(a, b, [MetaRule("Propagate1", (F("(< x a)"),))]))
    with pytest.raises(ProofError, match="false is not in B"):
        check_node(ProofNode(a, b, MetaRule("Close2")))
    with pytest.raises(ProofError, match="open branch"):
        extract_interpolant(_chain(a, b, [MetaRule("Redplus1", (F("(< a a)"),))]))
    with pytest.raises(ProofError, match="not fresh"):
        check_node(ProofNode(a, b, MetaRule("Define1", const=const("a"), term=T("(f x)"))))
    bad = ProofNode(a, b, MetaRule("Redplus2", (BOT,)), [ProofNode(a, b)])
    with pytest.raises(ProofError, match="label does not match"):
        check_node(bad)


def test_local_soundness_detects_wrong_instruction():
    a, b = fs("(< x y)"), fs("(< y x)")
    node = ProofNode(a, b, MetaRule("Redplus1", (p,)), [ProofNode(a + [p], b)])
    checker = CombinedChecker()
    assert check_local_soundness(node, [p], checker) is True
    assert check_local_soundness(node, [TOP], checker) is False
