"""Quantifier elimination for unit two-variable-per-inequality constraints.

Atoms are ``±i ⋈ n ± j`` over integer variables.  They are kept as linear
expressions ``Σ c·v + k ⋈ 0`` with ⋈ ∈ {<, =}, so substituting a witness
such as ``2 - y`` for x stays exact.  Only elimination is provided; UTVPI is
not a combinable theory here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import PreconditionError
from .theory import QEResult


@dataclass(frozen=True)
class Lin:
    coeffs: tuple = ()  # sorted (name, coefficient) pairs, coefficients non-zero
    const: int = 0

    @staticmethod
    def of(coeffs: Mapping[str, int], const: int = 0) -> "Lin":
        return Lin(tuple(sorted((v, c) for v, c in coeffs.items() if c)), const)

    @staticmethod
    def var(name: str, coef: int = 1) -> "Lin":
        return Lin.of({name: coef})

    def coef(self, name: str) -> int:
        return dict(self.coeffs).get(name, 0)

    def __add__(self, other: "Lin") -> "Lin":
        d = dict(self.coeffs)
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return Lin.of(d, self.const + other.const)

    def scale(self, k: int) -> "Lin":
        return Lin.of({v: c * k for v, c in self.coeffs}, self.const * k)

    def shift(self, n: int) -> "Lin":
        return Lin(self.coeffs, self.const + n)

    def without(self, name: str) -> "Lin":
        return Lin(tuple((v, c) for v, c in self.coeffs if v != name), self.const)

    def substitute(self, name: str, t: "Lin") -> "Lin":
        c = self.coef(name)
        return self.without(name) + t.scale(c) if c else self

    def eval(self, env: Mapping[str, int]) -> int:
        return sum(c * env[v] for v, c in self.coeffs) + self.const

    def variables(self) -> tuple:
        return tuple(v for v, _ in self.coeffs)

    def __str__(self):
        parts = []
        for v, c in self.coeffs:
            parts.append(("" if c == 1 else "-" if c == -1 else f"{c}*") + v)
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class UAtom:
    """``expr ⋈ 0`` with ⋈ ∈ {<, =}."""

    expr: Lin
    rel: str

    def holds(self, env: Mapping[str, int]) -> bool:
        val = self.expr.eval(env)
        return val < 0 if self.rel == "<" else val == 0

    def ground_value(self) -> bool | None:
        if self.expr.coeffs:
            return None
        return self.holds({})

    def __str__(self):
        return f"{self.expr} {self.rel} 0"


def utvpi_atom(s1: int, i: str, rel: str, n: int, s2: int = 0, j: str | None = None) -> UAtom:
    """``s1·i ⋈ n + s2·j`` with ⋈ one of <, =, >."""
    lhs = Lin.var(i, s1)
    rhs = Lin.var(j, s2).shift(n) if j is not None and s2 else Lin((), n)
    if rel == ">":
        return UAtom(rhs + lhs.scale(-1), "<")
    if rel not in ("<", "="):
        raise ValueError(f"bad relation {rel!r}")
    return UAtom(lhs + rhs.scale(-1), rel)


def _fold(atom: UAtom, x: str) -> UAtom | bool:
    """Pre-simplify atoms where x occurs with coefficient ±2 (``±x ⋈ n ± x``)."""
    c = atom.expr.coef(x)
    if abs(c) != 2:
        return atom
    if len(atom.expr.coeffs) != 1:
        raise PreconditionError(f"{atom}: x occurs twice next to another variable")
    k = atom.expr.const
    if atom.rel == "=":
        if k % 2:
            return False
        return UAtom(Lin.of({x: 1}, k // c), "=")
    if c == 2:  # 2x < -k  <=>  x <= floor((-k-1)/2)
        return UAtom(Lin.of({x: 1}, -((-k - 1) // 2) - 1), "<")
    return UAtom(Lin.of({x: -1}, k // 2), "<")  # 2x > k  <=>  x > floor(k/2)


def _instantiate(atoms: Sequence[UAtom], x: str, t: Lin) -> tuple | None:
    out = []
    for a in atoms:
        b = UAtom(a.expr.substitute(x, t), a.rel)
        g = b.ground_value()
        if g is False:
            return None
        if g is None and b not in out:
            out.append(b)
    return tuple(out)


def utvpi_qe(x: str, atoms: Sequence[UAtom]) -> QEResult:
    """∃x ⋀atoms  ≡  ⋁ over the returned disjuncts (witness, atoms[x := witness])."""
    folded = []
    for a in atoms:
        f = _fold(a, x)
        if f is False:
            return QEResult(x, [])
        folded.append(f)
    eqs, lows, ups = [], [], []
    for a in folded:
        c = a.expr.coef(x)
        if c == 0:
            continue
        r = a.expr.without(x)
        if abs(c) != 1:
            raise PreconditionError(f"{a}: coefficient of {x} must be ±1")
        bound = r.scale(-1) if c == 1 else r  # x ⋈ bound, or bound ⋈ x
        if a.rel == "=":
            eqs.append(bound)
        elif c == 1:
            ups.append(bound)
        else:
            lows.append(bound)
    if eqs:
        cands = eqs[:1]
    elif lows:
        cands = [v.shift(1) for v in lows]
    elif ups:
        cands = [u.shift(-1) for u in ups]
    else:
        cands = [Lin()]
    res = QEResult(x)
    for t in dict.fromkeys(cands):
        inst = _instantiate(folded, x, t)
        if inst is not None:
            res.disjuncts.append((t, inst))
    return res


def holds_qe(res: QEResult, env: Mapping[str, int]) -> bool:
    return any(all(a.holds(env) for a in lits) for _, lits in res.disjuncts)
