"""S-expression reading and printing for problems and interpolants."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import (
    BOT, FRESH_PREFIX, PRED, SUCC, TOP, ZERO_TERM,
    And, CombinterpError, Eq, Formula, Lt, Not, Or, PApp, Symbol, Term,
    app, const_symbol, fun_symbol, offset, pred_symbol, split_offset,
)


class ParseError(CombinterpError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + msg)


@dataclass
class Atom:
    """A bare token with its source position."""

    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s()]+")
_INT = re.compile(r"[+-]?\d+$")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.!?'@$]*$")


def read_all(text: str) -> list:
    """Read every top-level s-expression in ``text``."""
    stack: list[SList] = [SList([], 1, 1)]
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        tok = m.group()
        col = m.start() - line_start + 1
        if tok == "(":
            stack.append(SList([], line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unexpected ')'", line, col)
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].items.append(Atom(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = m.start() + tok.rindex("\n") + 1
    if len(stack) != 1:
        open_ = stack[-1]
        raise ParseError("unclosed '('", open_.line, open_.col)
    return stack[0].items


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------


def format_term(t: Term) -> str:
    base, n = split_offset(t)
    if n != 0:
        if base is ZERO_TERM:
            return str(n)
        inner = format_term(base)
        return f"(+ {inner} {n})" if n > 0 else f"(- {inner} {-n})"
    if not t.args:
        return t.head.name
    return "(" + " ".join([t.head.name] + [format_term(a) for a in t.args]) + ")"


def format_formula(f: Formula) -> str:
    if f == TOP:
        return "true"
    if f == BOT:
        return "false"
    if isinstance(f, Eq):
        return f"(= {format_term(f.lhs)} {format_term(f.rhs)})"
    if isinstance(f, Lt):
        return f"(< {format_term(f.lhs)} {format_term(f.rhs)})"
    if isinstance(f, PApp):
        if not f.args:
            return f.sym.name
        return "(" + " ".join([f.sym.name] + [format_term(a) for a in f.args]) + ")"
    if isinstance(f, Not):
        return f"(not {format_formula(f.arg)})"
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([op] + [format_formula(a) for a in f.args]) + ")"
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Building terms and formulas against a signature
# --------------------------------------------------------------------------


@dataclass
class Signature:
    functions: dict = field(default_factory=dict)
    predicates: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    idl: bool = False

    def declared(self, name: str) -> bool:
        return name in self.functions or name in self.predicates or name in self.constants

    def declare_fun(self, name: str, arity: int) -> Symbol:
        if arity == 0:
            return self.declare_const(name)
        s = fun_symbol(name, arity)
        self.functions[name] = s
        return s

    def declare_pred(self, name: str, arity: int) -> Symbol:
        s = pred_symbol(name, arity)
        self.predicates[name] = s
        return s

    def declare_const(self, name: str) -> Symbol:
        s = const_symbol(name)
        self.constants[name] = s
        return s

    def copy(self) -> "Signature":
        return Signature(dict(self.functions), dict(self.predicates), dict(self.constants), self.idl)


_RESERVED = {"=", "<", "not", "and", "or", "succ", "pred", "+", "-", "true", "false",
             "declare-fun", "declare-pred", "declare-const", "enable-idl", "A", "B"}


def check_name(tok: Atom) -> str:
    name = tok.text
    if not _IDENT.match(name) or name in _RESERVED:
        raise ParseError(f"invalid symbol name {name!r}", tok.line, tok.col)
    if name.startswith(FRESH_PREFIX):
        raise ParseError(f"names starting with {FRESH_PREFIX!r} are reserved", tok.line, tok.col)
    return name


def _need_idl(sig: Signature, node) -> None:
    if not sig.idl:
        raise ParseError("integer difference logic used without (enable-idl)", node.line, node.col)


def build_term(node, sig: Signature) -> Term:
    if isinstance(node, Atom):
        text = node.text
        if _INT.match(text):
            _need_idl(sig, node)
            return offset(ZERO_TERM, int(text))
        if text in sig.constants:
            return Term(sig.constants[text])
        if text in sig.functions:
            raise ParseError(f"function {text!r} used without arguments", node.line, node.col)
        raise ParseError(f"undeclared symbol {text!r}", node.line, node.col)
    if not node.items:
        raise ParseError("empty term", node.line, node.col)
    head = node.items[0]
    if not isinstance(head, Atom):
        raise ParseError("term head must be a symbol", node.line, node.col)
    args = node.items[1:]
    name = head.text
    if name in ("succ", "pred"):
        _need_idl(sig, head)
        if len(args) != 1:
            raise ParseError(f"{name} expects 1 argument", node.line, node.col)
        return app(SUCC if name == "succ" else PRED, build_term(args[0], sig))
    if name in ("+", "-"):
        _need_idl(sig, head)
        if len(args) != 2:
            raise ParseError(f"({name} t n) expects a term and an integer", node.line, node.col)
        num = args[1]
        if not isinstance(num, Atom) or not _INT.match(num.text):
            where = num if isinstance(num, Atom) else node
            raise ParseError(f"({name} t n) needs an integer literal as n", where.line, where.col)
        n = int(num.text)
        return offset(build_term(args[0], sig), n if name == "+" else -n)
    if name in sig.functions:
        sym = sig.functions[name]
        if len(args) != sym.arity:
            raise ParseError(f"{name} expects {sym.arity} arguments, got {len(args)}",
                             node.line, node.col)
        return app(sym, *(build_term(a, sig) for a in args))
    if name in sig.constants:
        raise ParseError(f"constant {name!r} applied to arguments", node.line, node.col)
    if name in sig.predicates:
        raise ParseError(f"predicate {name!r} used as a term", node.line, node.col)
    raise ParseError(f"undeclared function {name!r}", head.line, head.col)


def build_formula(node, sig: Signature) -> Formula:
    if isinstance(node, Atom):
        if node.text == "true":
            return TOP
        if node.text == "false":
            return BOT
        if node.text in sig.predicates:
            sym = sig.predicates[node.text]
            if sym.arity != 0:
                raise ParseError(f"{node.text} expects {sym.arity} arguments", node.line, node.col)
            return PApp(sym, ())
        raise ParseError(f"expected a formula, got {node.text!r}", node.line, node.col)
    if not node.items or not isinstance(node.items[0], Atom):
        raise ParseError("expected a formula", node.line, node.col)
    head, args = node.items[0], node.items[1:]
    op = head.text
    if op == "=":
        if len(args) != 2:
            raise ParseError("= expects 2 arguments", node.line, node.col)
        return Eq(build_term(args[0], sig), build_term(args[1], sig))
    if op == "<":
        _need_idl(sig, head)
        if len(args) != 2:
            raise ParseError("< expects 2 arguments", node.line, node.col)
        return Lt(build_term(args[0], sig), build_term(args[1], sig))
    if op == "not":
        if len(args) != 1:
            raise ParseError("not expects 1 argument", node.line, node.col)
        return Not(build_formula(args[0], sig))
    if op in ("and", "or"):
        parts = tuple(build_formula(a, sig) for a in args)
        if not parts:
            return TOP if op == "and" else BOT
        if len(parts) == 1:
            return parts[0]
        return And(parts) if op == "and" else Or(parts)
    if op in sig.predicates:
        sym = sig.predicates[op]
        if len(args) != sym.arity:
            raise ParseError(f"{op} expects {sym.arity} arguments, got {len(args)}",
                             node.line, node.col)
        return PApp(sym, tuple(build_term(a, sig) for a in args))
    if op in sig.functions or op in sig.constants:
        raise ParseError(f"{op!r} is not a predicate", head.line, head.col)
    raise ParseError(f"undeclared predicate {op!r}", head.line, head.col)


def parse_formula(text: str, sig: Signature) -> Formula:
    nodes = read_all(text)
    if len(nodes) != 1:
        raise ParseError("expected exactly one formula")
    return build_formula(nodes[0], sig)


def parse_term(text: str, sig: Signature) -> Term:
    nodes = read_all(text)
    if len(nodes) != 1:
        raise ParseError("expected exactly one term")
    return build_term(nodes[0], sig)

