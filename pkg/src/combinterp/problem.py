"""Problem files: declarations followed by the A and B partitions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Formula
from .sexpr import Atom, ParseError, Signature, SList, build_formula, check_name, read_all


@dataclass
class ProblemFile:
    signature: Signature
    a: list = field(default_factory=list)
    b: list = field(default_factory=list)
    idl_declared: bool = False


def _arity(tok, head: Atom) -> int:
    if not isinstance(tok, Atom) or not tok.text.isdigit():
        raise ParseError(f"{head.text} expects a non-negative arity", head.line, head.col)
    return int(tok.text)


def parse(text: str) -> ProblemFile:
    """Parse a problem.  IDL syntax is always available; ``(enable-idl)``
    is accepted for compatibility and recorded."""
    sig = Signature(idl=True)
    prob = ProblemFile(sig)
    seen_parts: set[str] = set()
    for node in read_all(text):
        if not isinstance(node, SList) or not node.items or not isinstance(node.items[0], Atom):
            raise ParseError("expected a declaration or partition", node.line, node.col)
        head, args = node.items[0], node.items[1:]
        cmd = head.text
        if cmd in ("declare-fun", "declare-pred", "declare-const"):
            want = 1 if cmd == "declare-const" else 2
            if len(args) != want or not isinstance(args[0], Atom):
                raise ParseError(f"malformed {cmd}", node.line, node.col)
            name = check_name(args[0])
            if sig.declared(name):
                raise ParseError(f"{name!r} declared twice", args[0].line, args[0].col)
            if cmd == "declare-const":
                sig.declare_const(name)
            elif cmd == "declare-fun":
                sig.declare_fun(name, _arity(args[1], head))
            else:
                sig.declare_pred(name, _arity(args[1], head))
        elif cmd == "enable-idl":
            if args:
                raise ParseError("enable-idl takes no arguments", node.line, node.col)
            prob.idl_declared = True
        elif cmd in ("A", "B"):
            if cmd in seen_parts:
                raise ParseError(f"partition {cmd} given twice", node.line, node.col)
            seen_parts.add(cmd)
            target: list[Formula] = prob.a if cmd == "A" else prob.b
            target.extend(build_formula(f, sig) for f in args)
        else:
            raise ParseError(f"unknown command {cmd!r}", head.line, head.col)
    return prob


def parse_file(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
