import numpy as np
import pytest

from procflow.demos import DEMOS, cancel_unitary_pairs, run_demo
from procflow.diagram import box, compose_seq, dagger, identity, trace
from procflow.equality import equal
from procflow.theory import ADJOINT, CONJUGATE, TRANSPOSE, Theory

T = Theory.build(["A"], {"U": (["A"], ["A"]), "V": (["A"], ["A"])})


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demo_succeeds(name):
    r = run_demo(name)
    assert r.ok, "\n".join(r.lines)


def test_cancel_adjacent_pair():
    u, ud = box(T, "U"), box(T, "U", ADJOINT)
    assert equal(cancel_unitary_pairs(compose_seq(ud, u), {"U"}), identity(T, ["A"]))
    assert equal(cancel_unitary_pairs(compose_seq(u, ud), {"U"}), identity(T, ["A"]))


def test_cancel_rotated_pair():
    assert equal(cancel_unitary_pairs(compose_seq(box(T, "U", CONJUGATE), box(T, "U", TRANSPOSE)), {"U"}),
                 identity(T, ["A"]))


def test_cancel_leaves_loop():
    d = cancel_unitary_pairs(trace(compose_seq(box(T, "U", ADJOINT), box(T, "U"))), {"U"})
    assert not d.boxes and d.loops == ("A",)


def test_cancel_respects_declarations():
    d = compose_seq(dagger(box(T, "V")), box(T, "V"))
    assert cancel_unitary_pairs(d, {"U"}) == d
    uu = compose_seq(box(T, "U"), box(T, "U"))
    assert cancel_unitary_pairs(uu, {"U"}) == uu
    mixed = compose_seq(box(T, "V", ADJOINT), box(T, "U"))
    assert cancel_unitary_pairs(mixed, {"U", "V"}) == mixed
