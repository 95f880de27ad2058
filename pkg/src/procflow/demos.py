"""Scripted constructions run by ``procflow demo``.

Each demo builds its diagrams, checks every expected equality, and
returns the narrative lines plus an overall verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagram import (IN, OUT, BoxInstance, Diagram, Port, box, cap, compose_par,
                      compose_seq, compose_seq_all, cup, identity)
from .doubling import double
from .equality import equal
from .quantum import check_broadcast, check_rel_dagger_axiom
from .tensor import Model, evaluate, random_model
from .testing import random_unitary
from .theory import ADJOINT, CONJUGATE, TRANSPOSE, Theory


@dataclass
class DemoResult:
    name: str
    ok: bool = True
    lines: list[str] = field(default_factory=list)

    def check(self, label: str, cond: bool, detail: str = "") -> bool:
        self.ok &= bool(cond)
        self.lines.append(f"  [{'ok' if cond else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
        return bool(cond)

    def say(self, text: str) -> None:
        self.lines.append(text)


def _phys_in(bx: BoxInstance) -> Port:
    # a rotated box is drawn upside down, so its physical input is its effective output
    side = OUT if bx.variant.rotated else IN
    return Port(bx.id, side, 0, bx.generator.dom[0])


def _phys_out(bx: BoxInstance) -> Port:
    side = IN if bx.variant.rotated else OUT
    return Port(bx.id, side, 0, bx.generator.dom[0])


def cancel_unitary_pairs(d: Diagram, unitaries) -> Diagram:
    """Remove adjacent pairs ``u, u†`` of generators declared unitary.

    Only one-wire generators ``A -> A`` qualify.  Adjacency is judged on
    physical ports, as in structural equality, so a pair bent round cups
    and caps still cancels.  A pair closing on itself leaves a loop.
    """
    unitaries = set(unitaries)
    while True:
        pair = _find_inverse_pair(d, unitaries)
        if pair is None:
            return d
        a, b = pair  # b drawn right after a
        p = d.partner[_phys_in(d.boxes[a])]
        q = d.partner[_phys_out(d.boxes[b])]
        dead = {a, b}
        keep = [x for x in d.boxes if x.id not in dead]
        new_id = {x.id: k for k, x in enumerate(keep)}

        def move(port: Port) -> Port:
            return port if port.is_boundary else port._replace(owner=new_id[port.owner])

        wires = [(move(s), move(t)) for s, t in d.wires
                 if s.owner not in dead and t.owner not in dead]
        loops = list(d.loops)
        if p == _phys_out(d.boxes[b]):
            loops.append(p.type)
        else:
            s, t = move(p), move(q)
            wires.append((s, t) if s <= t else (t, s))
        boxes = tuple(BoxInstance(new_id[x.id], x.generator, x.variant) for x in keep)
        d = Diagram(d.theory, boxes, tuple(wires), d.dom, d.cod, tuple(loops))


def _find_inverse_pair(d: Diagram, unitaries):
    for bx in d.boxes:
        g = bx.generator
        if g.name not in unitaries or len(g.dom) != 1 or g.cod != g.dom:
            continue
        nxt = d.partner[_phys_out(bx)]
        if nxt.is_boundary:
            continue
        other = d.boxes[nxt.owner]
        if (other.id != bx.id and other.generator == g and nxt == _phys_in(other)
                and other.variant.daggered != bx.variant.daggered):
            return bx.id, other.id
    return None


def _unitary_model(T: Theory, dim: int, seed: int) -> Model:
    rng = np.random.default_rng(seed)
    return Model(T, {"A": dim}, {"U": random_unitary(dim, rng)})


def teleport(seed: int = 0, tol: float = 1e-9) -> DemoResult:
    r = DemoResult("teleport")
    T = Theory.build(["A"], {"U": (["A"], ["A"])})
    A = ["A"]
    share = compose_par(identity(T, A), cup(T, "A"))
    measure = compose_par(cap(T, "A"), identity(T, A))
    plain = compose_seq(measure, share)
    r.say("Bob shares a cup with Aleks; Aleks joins the input with his half by a cap.")
    r.check("errorless protocol equals the identity wire", equal(plain, identity(T, A)))

    err_input = compose_par(box(T, "U"), identity(T, ["A", "A"]))
    with_error = compose_seq_all(share, err_input, measure)
    corrected = compose_seq(box(T, "U", ADJOINT), with_error)
    r.say("Aleks' cap applies an unknown unitary U; Bob corrects with U†.")
    r.check("corrected protocol deforms to U† ∘ U",
            equal(corrected, compose_seq(box(T, "U", ADJOINT), box(T, "U"))))
    r.check("with U unitary, the corrected protocol equals the identity wire",
            equal(cancel_unitary_pairs(corrected, {"U"}), identity(T, A)))

    err_leg = compose_par(identity(T, A), compose_par(box(T, "U"), identity(T, A)))
    bent = compose_seq_all(share, err_leg, measure)
    bent_fixed = compose_seq(box(T, "U", CONJUGATE), bent)
    r.say("If the error sits on the cup leg instead, Bob receives Uᵀ and corrects with Ū.")
    r.check("bent error deforms to Uᵀ", equal(bent, box(T, "U", TRANSPOSE)))
    r.check("with U unitary, Ū ∘ Uᵀ equals the identity wire",
            equal(cancel_unitary_pairs(bent_fixed, {"U"}), identity(T, A)))

    for dim in (2, 3):
        m = _unitary_model(T, dim, seed + dim)
        eye = np.eye(dim)
        for label, d in (("errorless", plain), ("corrected", corrected), ("bent corrected", bent_fixed)):
            dev = float(np.max(np.abs(evaluate(d, m).matrix() - eye)))
            r.check(f"dim {dim}: {label} protocol is the identity matrix", dev <= tol, f"max dev {dev:.2e}")
    return r


def rel_counterexample() -> DemoResult:
    r = DemoResult("rel-counterexample")
    rep = check_rel_dagger_axiom()
    r.say("Relations on a two-element set, composed over the boolean semiring.")
    r.say(f"R (rows = outputs, columns = inputs):\n{rep.relation.astype(int)}")
    r.say(f"R† ∘ R:\n{rep.composite.astype(int)}")
    r.check("R is not ∘-separable", not rep.relation_separable)
    r.check("R† ∘ R is ∘-separable", rep.composite_separable)
    r.check("so 'f separable iff f† ∘ f separable' fails in Rel", not rep.axiom_holds)
    return r


def copy_theory() -> Theory:
    return Theory.build(["A"], {"copy": (["A"], ["A", "A"])})


def copy_model(dim: int) -> Model:
    t = np.zeros((dim, dim, dim), dtype=complex)
    for i in range(dim):
        t[i, i, i] = 1
    return Model(copy_theory(), {"A": dim}, {"copy": t})


def no_broadcast(tol: float = 1e-9) -> DemoResult:
    r = DemoResult("no-broadcast")
    T = copy_theory()
    delta = double(box(T, "copy"))
    r.say("Candidate broadcaster: the doubled basis copy |i⟩ ↦ |ii⟩.")
    rep2 = check_broadcast(delta, copy_model(2), tol)
    disc = rep2.off_diagonal_discrepancy()
    r.check("dim 2: the candidate fails to broadcast", not rep2.broadcasts,
            f"marginal deviations {rep2.left_deviation:.3g}, {rep2.right_deviation:.3g}")
    r.say(f"  marginal applied to |+⟩⟨+| minus |+⟩⟨+|:\n{np.round(rep2.left_coherence_error.real, 6)}")
    r.check("coherence test input loses its off-diagonal entries", disc >= 0.49, f"discrepancy {disc:.3f}")
    rep1 = check_broadcast(delta, copy_model(1), tol)
    r.check("dim 1: the trivial system broadcasts", rep1.broadcasts)
    return r


PHASES = (0.7, 2.1, 5.5)


def phases(seed: int = 0, tol: float = 1e-9) -> DemoResult:
    r = DemoResult("phases")
    T = Theory.build(["A"], {"f": (["A"], ["A"]), "phase": ([], [])})
    f = box(T, "f")
    pf = compose_par(box(T, "phase"), f)
    r.say("Scale f by a unit-modulus scalar and compare before and after doubling.")
    r.check("e^{iθ}f and f differ structurally", not equal(pf, f))
    for theta in PHASES:
        m = random_model(T, (2, 3), seed, fixed={"phase": np.exp(1j * theta)})
        raw = float(np.max(np.abs(evaluate(pf, m).array - evaluate(f, m).array)))
        dd = float(np.max(np.abs(evaluate(double(pf).base, m).array - evaluate(double(f).base, m).array)))
        r.check(f"θ={theta}: phase visible before doubling", raw > tol, f"{raw:.3g}")
        r.check(f"θ={theta}: double(e^{{iθ}}f) equals double(f)", dd <= tol, f"{dd:.2e}")
    return r


DEMOS = {
    "teleport": teleport,
    "rel-counterexample": rel_counterexample,
    "no-broadcast": no_broadcast,
    "phases": phases,
}


def run_demo(name: str, seed: int = 0) -> DemoResult:
    fn = DEMOS[name]
    return fn(seed=seed) if "seed" in fn.__code__.co_varnames else fn()
