"""Command line front end: ``interpolate <file> [options]``."""

from __future__ import annotations

import argparse
import sys

from .combined import CombinedChecker, verify_interpolant
from .combiner import Budget, ci_interpolate
from .core import BudgetExceeded, CombinterpError
from .metaproof import format_trace
from .problem import parse
from .sexpr import ParseError

EXIT_UNSAT = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2
EXIT_VERIFY_FAILED = 3
EXIT_SAT = 10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="interpolate", description="Craig interpolants for EUF ∪ IDL problems.")
    p.add_argument("file", help="problem file, or - for standard input")
    p.add_argument("--mode", choices=("interpolate", "check-sat"), default="interpolate")
    p.add_argument("--verify", action="store_true", help="re-check the interpolant")
    p.add_argument("--trace", action="store_true", help="print the proof tree")
    p.add_argument("--seed", type=int, default=None, help="seed for tie-breaking order")
    p.add_argument("--budget-nodes", type=int, default=Budget.nodes)
    p.add_argument("--budget-calls", type=int, default=Budget.calls)
    return p


def _flag(v: bool | None) -> str:
    return "unknown" if v is None else str(bool(v)).lower()


def run(text: str, mode: str = "interpolate", verify: bool = False, trace: bool = False,
        seed: int | None = None, budget: Budget | None = None, out=None) -> int:
    out = out or sys.stdout
    budget = budget or Budget()
    try:
        prob = parse(text)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    checker = CombinedChecker(budget.nodes)
    try:
        if mode == "check-sat":
            sat = checker.check_sat(prob.a + prob.b)
            print("sat" if sat else "unsat", file=out)
            return EXIT_SAT if sat else EXIT_UNSAT
        res = ci_interpolate(prob.a, prob.b, budget, seed, checker)
        if res.is_sat:
            print("sat", file=out)
            return EXIT_SAT
        if trace:
            print(format_trace(res.tree), file=out)
        print(f"(interpolant {res.interpolant})", file=out)
        if verify:
            rep = verify_interpolant(prob.a, prob.b, res.interpolant.formula, checker)
            print(f"(verify (entailed-by-A {_flag(rep.entailed_by_a)})"
                  f" (inconsistent-with-B {_flag(rep.inconsistent_with_b)})"
                  f" (shared-symbols {_flag(rep.shared_symbols)}))", file=out)
            if rep.indeterminate:
                return EXIT_BUDGET
            if not rep.ok:
                return EXIT_VERIFY_FAILED
        return EXIT_UNSAT
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except CombinterpError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.budget_nodes <= 0 or args.budget_calls <= 0:
        print("error: budgets must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return run(text, args.mode, args.verify, args.trace, args.seed,
               Budget(args.budget_nodes, args.budget_calls))


if __name__ == "__main__":
    sys.exit(main())
