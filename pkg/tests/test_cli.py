import io
import os
import subprocess
import sys

import pytest

from combinterp.cli import EXIT_BUDGET, EXIT_ERROR, EXIT_SAT, EXIT_UNSAT, main, run
from combinterp.combiner import Budget
from combinterp.problem import parse
from combinterp.sexpr import ParseError

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")


def _run(text, **kw):
    out = io.StringIO()
    code = run(text, out=out, **kw)
    return code, out.getvalue()


def test_parse_examples():
    prob = parse("(declare-const x)(A (< x (+ x 1)))(B)")
    assert len(prob.a) == 1 and prob.b == []
    with pytest.raises(ParseError):
        parse("(A (= a (f x)))")
    with pytest.raises(ParseError):
        parse("(declare-const x)(declare-const y)(A (= x (+ x y)))")
    with pytest.raises(ParseError):
        parse("(declare-const x)(declare-const x)")
    with pytest.raises(ParseError):
        parse("(A)(A)")


def test_flagship_exit_zero_and_verified():
    text = open(os.path.join(CORPUS, "flagship.itp")).read()
    code, out = _run(text, verify=True)
    assert code == EXIT_UNSAT
    assert out.startswith("(interpolant ")
    assert "(entailed-by-A true) (inconsistent-with-B true) (shared-symbols true)" in out


def test_sat_input():
    code, out = _run("(declare-pred P 1)(declare-pred Q 1)(declare-const c)(A (P c))(B (not (Q c)))")
    assert (code, out) == (EXIT_SAT, "sat\n")


def test_check_sat_mode():
    text = "(declare-const x)(declare-const y)(A (< x y))(B (< y x))"
    assert _run(text, mode="check-sat") == (EXIT_UNSAT, "unsat\n")
    assert _run("(declare-const x)(A (< x 0))(B)", mode="check-sat") == (EXIT_SAT, "sat\n")


def test_malformed_file():
    assert _run("(A (= a")[0] == EXIT_ERROR


def test_budget_exceeded():
    text = open(os.path.join(CORPUS, "nonconvex.itp")).read()
    assert _run(text, budget=Budget(nodes=3))[0] == EXIT_BUDGET


def test_trace_lines():
    text = open(os.path.join(CORPUS, "idl_order.itp")).read()
    code, out = _run(text, trace=True)
    lines = out.splitlines()
    assert code == EXIT_UNSAT
    assert lines[0].startswith("(rule ") and "(interpolant " in lines[0]
    assert lines[-1] == "(interpolant (< x y))"


def test_same_seed_same_output():
    text = open(os.path.join(CORPUS, "mixed_bool_a.itp")).read()
    outs = {_run(text, trace=True, seed=7)[1] for _ in range(3)}
    assert len(outs) == 1


@pytest.mark.parametrize("argv", [[], ["--mode", "bogus", "x.itp"], ["x.itp", "--seed", "q"]])
def test_usage_errors_exit_one(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == EXIT_ERROR


def test_missing_file():
    assert main([os.path.join(CORPUS, "does-not-exist.itp")]) == EXIT_ERROR


def test_console_entry_point():
    path = os.path.join(CORPUS, "flagship.itp")
    proc = subprocess.run([sys.executable, "-m", "combinterp", path, "--verify", "--seed", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("(interpolant ")
