import random

import pytest

from combinterp.core import PreconditionError
from combinterp.utvpi import Lin, UAtom, holds_qe, utvpi_atom, utvpi_qe
from oracles import exists_brute


def test_atom_construction():
    a = utvpi_atom(1, "x", "<", 3, -1, "y")  # x < 3 - y
    assert a.holds({"x": 1, "y": 1}) and not a.holds({"x": 2, "y": 1})
    b = utvpi_atom(-1, "x", ">", 0)  # -x > 0
    assert b.holds({"x": -1}) and not b.holds({"x": 0})
    with pytest.raises(ValueError):
        utvpi_atom(1, "x", "<=", 0)


def test_lin_printing():
    assert str(Lin.of({"x": 1, "y": -1}, 2)) == "x - y + 2"
    assert str(Lin()) == "0"


def test_qe_simple_bounds():
    res = utvpi_qe("x", [utvpi_atom(1, "y", "<", 0, 1, "x"), utvpi_atom(1, "x", "<", 0, -1, "z")])
    # y < x < -z  iff  y + 1 < -z
    for yv in range(-3, 4):
        for zv in range(-3, 4):
            assert holds_qe(res, {"y": yv, "z": zv}) == (yv + 1 < -zv)


def test_qe_coefficient_two_folding():
    # x < 3 - x  iff  2x < 3  iff  x <= 1
    res = utvpi_qe("x", [utvpi_atom(1, "x", "<", 3, -1, "x"), utvpi_atom(1, "y", "<", 0, 1, "x")])
    for yv in range(-4, 4):
        assert holds_qe(res, {"y": yv}) == (yv < 1)
    assert utvpi_qe("x", [utvpi_atom(1, "x", "=", 3, -1, "x")]).disjuncts == []
    assert utvpi_qe("x", [utvpi_atom(1, "x", "=", 4, -1, "x")]).disjuncts != []


def test_qe_rejects_mixed_double_occurrence():
    with pytest.raises(PreconditionError):
        utvpi_qe("x", [UAtom(Lin.of({"x": 2, "y": 1}), "<")])


def random_uatoms(rng, names, n):
    out = []
    for _ in range(n):
        i = rng.choice(names)
        j = rng.choice(names + [None])
        s2 = rng.choice([1, -1]) if j else 0
        out.append(utvpi_atom(rng.choice([1, -1]), i, rng.choice("<=>"), rng.randint(-3, 3), s2, j))
    return out


def test_qe_against_brute_force():
    rng = random.Random(11)
    for _ in range(80):
        free = ["y", "z"][: rng.randint(0, 2)]
        atoms = random_uatoms(rng, ["x"] + free, rng.randint(1, 4))
        res = utvpi_qe("x", atoms)
        for env, truth in exists_brute("x", free, lambda e: all(a.holds(e) for a in atoms),
                                       -5, 5, -9, 9):
            assert holds_qe(res, env) == truth, (atoms, env)
