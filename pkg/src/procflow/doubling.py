"""Quantum types by doubling, plus discarding.

A quantum wire of type A is a pair of base wires (conjugate leg, original
leg), kept adjacent.  Doubling a diagram puts its conjugate beside it and
interleaves the legs.  Discarding joins the two legs of a quantum wire
with a cap.

Every quantum process is kept in purified form: a pure base diagram
``pure: qdom -> qcod + env`` whose environment outputs are discarded.
Composition, tensor and dagger work on these purifications directly, so
``purify`` is a lookup.  The doubled base diagram and the positions of
its discard wires are derived on demand.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .diagram import (Diagram, Wire, braid, caps, compose_par, compose_seq, conjugate, cups,
                      dagger, identity, permutation)
from .equality import equal
from .errors import TheoryError, TypeMismatchError
from .theory import Theory, TypeList


def legs(types: Sequence[str]) -> TypeList:
    """Base wires of a list of quantum types: each type twice, side by side."""
    return tuple(t for t in types for _ in range(2))


def _interleave(theory: Theory, types: TypeList) -> Diagram:
    # conj(d) ⊗ d has boundary  rev(types) + types ; bring leg pairs together
    n = len(types)
    perm = []
    for k in range(n):
        perm += [n - 1 - k, n + k]
    return permutation(theory, types[::-1] + types, perm)


def double_base(d: Diagram) -> Diagram:
    """Base diagram of ``double(d)``: conj(d) and d side by side with legs interleaved."""
    T = d.theory
    pair = compose_par(conjugate(d), d)
    into = dagger(_interleave(T, d.dom))
    out = _interleave(T, d.cod)
    return compose_seq(out, compose_seq(pair, into))


@dataclass(frozen=True, repr=False)
class QDiagram:
    """A process on quantum types, stored as its purification."""

    pure: Diagram
    qdom: TypeList
    qcod: TypeList
    env: TypeList = ()

    def __post_init__(self):
        object.__setattr__(self, "qdom", tuple(self.qdom))
        object.__setattr__(self, "qcod", tuple(self.qcod))
        object.__setattr__(self, "env", tuple(self.env))
        if self.pure.dom != self.qdom or self.pure.cod != self.qcod + self.env:
            raise TypeMismatchError("purification must map qdom to qcod + env")

    @property
    def theory(self) -> Theory:
        return self.pure.theory

    @property
    def is_pure(self) -> bool:
        return not self.env

    @cached_property
    def base(self) -> Diagram:
        """The doubled diagram with every environment leg pair capped off."""
        T = self.theory
        doubled = double_base(self.pure)
        discard_env = compose_par(identity(T, legs(self.qcod)), _leg_caps(T, self.env))
        return compose_seq(discard_env, doubled)

    @cached_property
    def discards(self) -> tuple[Wire, ...]:
        """Wires of ``base`` that are discard connections (env pairs that did not close into loops)."""
        doubled = double_base(self.pure)
        k = 2 * len(self.qcod)
        env_ports = {doubled.cod_port(k + j) for j in range(2 * len(self.env))}
        out = []
        for e in range(len(self.env)):
            a = doubled.partner[doubled.cod_port(k + 2 * e)]
            b = doubled.partner[doubled.cod_port(k + 2 * e + 1)]
            if a in env_ports or b in env_ports:
                continue
            out.append((a, b) if a <= b else (b, a))
        return tuple(sorted(out))

    def then(self, *others: QDiagram) -> QDiagram:
        out = self
        for other in others:
            out = q_compose_seq(other, out)
        return out

    def __rshift__(self, other: QDiagram) -> QDiagram:
        return q_compose_seq(other, self)

    def __matmul__(self, other: QDiagram) -> QDiagram:
        return q_compose_par(self, other)

    def dagger(self) -> QDiagram:
        return q_dagger(self)

    def __repr__(self):
        return str(self)

    def __str__(self):
        env = f", env={list(self.env)}" if self.env else ""
        return (f"QDiagram({' ⊗ '.join(self.qdom) or 'I'} => {' ⊗ '.join(self.qcod) or 'I'}"
                f"{env}; pure={self.pure})")


def _leg_caps(T: Theory, types: Sequence[str]) -> Diagram:
    out = identity(T, ())
    for t in types:
        out = compose_par(out, caps(T, (t,)))
    return out


def double(d: Diagram) -> QDiagram:
    return QDiagram(d, d.dom, d.cod, ())


def q_identity(theory: Theory, types: Sequence[str]) -> QDiagram:
    return double(identity(theory, types))


def discard(theory: Theory, types: str | Sequence[str]) -> QDiagram:
    """Discarding effect on one or more quantum wires."""
    types = (types,) if isinstance(types, str) else tuple(types)
    return QDiagram(identity(theory, types), types, (), types)


def maximally_mixed(theory: Theory, types: str | Sequence[str]) -> QDiagram:
    """Adjoint of discarding: the unnormalised maximally mixed state."""
    return q_dagger(discard(theory, types))


def q_compose_seq(g: QDiagram, f: QDiagram) -> QDiagram:
    if f.theory != g.theory:
        raise TheoryError("quantum diagrams belong to different theories")
    if f.qcod != g.qdom:
        bad = next((i for i, (a, b) in enumerate(zip(f.qcod, g.qdom)) if a != b), None)
        raise TypeMismatchError(f"quantum types do not match: {f.qcod} vs {g.qdom}", index=bad)
    T = f.theory
    pure = compose_seq(compose_par(g.pure, identity(T, f.env)), f.pure)
    return QDiagram(pure, f.qdom, g.qcod, g.env + f.env)


def q_compose_par(f: QDiagram, g: QDiagram) -> QDiagram:
    if f.theory != g.theory:
        raise TheoryError("quantum diagrams belong to different theories")
    T = f.theory
    # f.qcod f.env g.qcod g.env  ->  f.qcod g.qcod f.env g.env
    shuffle = compose_par(compose_par(identity(T, f.qcod), braid(T, f.env, g.qcod)),
                          identity(T, g.env))
    pure = compose_seq(shuffle, compose_par(f.pure, g.pure))
    return QDiagram(pure, f.qdom + g.qdom, f.qcod + g.qcod, f.env + g.env)


def q_dagger(f: QDiagram) -> QDiagram:
    """Adjoint; discarded environments come back as halves of cups."""
    T = f.theory
    if not f.env:
        return double(dagger(f.pure))
    # h = (pure† ⊗ id_env) ∘ (id_qcod ⊗ cups(env))
    feed = compose_par(identity(T, f.qcod), cups(T, f.env))
    pure = compose_seq(compose_par(dagger(f.pure), identity(T, f.env)), feed)
    return QDiagram(pure, f.qcod, f.qdom, f.env)


def q_tensor_all(theory: Theory, parts: Sequence[QDiagram]) -> QDiagram:
    out = q_identity(theory, ())
    for p in parts:
        out = q_compose_par(out, p)
    return out


def q_permutation(theory: Theory, types: Sequence[str], perm: Sequence[int]) -> QDiagram:
    return double(permutation(theory, types, perm))


def purify(f: QDiagram) -> tuple[Diagram, TypeList]:
    """Pure process and environment with ``f = (id ⊗ discard(env)) ∘ double(pure)``."""
    return f.pure, f.env


def from_purification(pure: Diagram, env: Sequence[str]) -> QDiagram:
    """Discard the last ``len(env)`` outputs of ``double(pure)``."""
    env = tuple(env)
    if env and pure.cod[len(pure.cod) - len(env):] != env:
        raise TypeMismatchError("environment must be a suffix of the codomain")
    return QDiagram(pure, pure.dom, pure.cod[:len(pure.cod) - len(env)], env)


def q_equal(f: QDiagram, g: QDiagram) -> bool:
    """Structural equality of the doubled base diagrams."""
    return f.qdom == g.qdom and f.qcod == g.qcod and equal(f.base, g.base)


def scaled(d: Diagram, scalar: Diagram) -> Diagram:
    """``scalar · d`` for a closed diagram ``scalar``."""
    if not scalar.is_scalar:
        raise TypeMismatchError("scalar factor must have empty boundary")
    return compose_par(scalar, d)


CANCELLABLE = 1e-12


def phase_between(a, b, tol: float = 1e-9, cancellable: float = CANCELLABLE) -> complex | None:
    """Unit scalar ``λ`` with ``a ≈ λ b`` for two evaluated processes, else None.

    This recovers the phase left undetermined when ``double(f)`` equals
    ``double(g)``.  Entries of ``b`` of modulus at most ``cancellable`` are
    never divided by; if every entry is that small there is no phase to find.
    """
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return None
    k = int(np.argmax(np.abs(b)))
    if abs(b.flat[k]) <= cancellable:
        return None
    lam = a.flat[k] / b.flat[k]
    if abs(abs(lam) - 1) > tol or np.max(np.abs(a - lam * b)) > tol * max(1.0, np.max(np.abs(b))):
        return None
    return complex(lam / abs(lam))
