"""Anchored port-graph diagrams.

A diagram is a set of box occurrences plus a perfect matching on ports.
Boundary ports are anchored: the domain boundary ``dom`` behaves like the
output side of an invisible box at the bottom, the codomain ``cod`` like
the input side of one at the top.  Every port sits in exactly one wire.

Cups and caps are not boxes.  A wire joining two producers (box outputs or
domain ports) is a cap, a wire joining two consumers is a cup.  Composing
diagrams glues boundary ports and fuses the resulting wire chains, so the
snake equations hold by construction; chains that close up on themselves
are recorded in ``loops``.

All diagrams are immutable values.  Box ids are renumbered on every
construction: the first operand's boxes come first.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence

from .errors import InvalidDiagramError, TheoryError, TypeMismatchError
from .theory import ORIGINAL, BoxVariant, Generator, Theory, TypeList

BOUNDARY = -1
IN, OUT = "in", "out"


class Port(NamedTuple):
    """One end of a wire.

    ``owner`` is a box id, or ``BOUNDARY``.  For the boundary, side ``in``
    is the domain and side ``out`` the codomain.
    """

    owner: int
    side: str
    index: int
    type: str

    @property
    def is_boundary(self) -> bool:
        return self.owner == BOUNDARY

    @property
    def is_producer(self) -> bool:
        # box outputs and domain ports feed wires; box inputs and codomain ports consume them
        return (self.side == OUT) != self.is_boundary

    def __str__(self):
        if self.is_boundary:
            return f"{'dom' if self.side == IN else 'cod'}[{self.index}]"
        return f"#{self.owner}.{self.side}[{self.index}]"


Wire = tuple[Port, Port]

PLAIN, CUP, CAP = "plain", "cup", "cap"


def wire_kind(wire: Wire) -> str:
    producers = wire[0].is_producer + wire[1].is_producer
    return (CUP, PLAIN, CAP)[producers]


def _wire(p: Port, q: Port) -> Wire:
    return (p, q) if p <= q else (q, p)


@dataclass(frozen=True)
class BoxInstance:
    id: int
    generator: Generator
    variant: BoxVariant = ORIGINAL

    @property
    def dom(self) -> TypeList:
        return self.variant.effective(self.generator)[0]

    @property
    def cod(self) -> TypeList:
        return self.variant.effective(self.generator)[1]

    @property
    def label(self) -> str:
        suffix = {"original": "", "adjoint": "†", "conjugate": "*", "transpose": "ᵀ"}
        return self.generator.name + suffix[self.variant.name]

    def ports(self) -> Iterator[Port]:
        for i, t in enumerate(self.dom):
            yield Port(self.id, IN, i, t)
        for j, t in enumerate(self.cod):
            yield Port(self.id, OUT, j, t)


@dataclass(frozen=True, repr=False)
class Diagram:
    theory: Theory
    boxes: tuple[BoxInstance, ...]
    wires: tuple[Wire, ...]
    dom: TypeList
    cod: TypeList
    loops: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "dom", tuple(self.dom))
        object.__setattr__(self, "cod", tuple(self.cod))
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "wires", tuple(sorted(_wire(*w) for w in self.wires)))
        object.__setattr__(self, "loops", tuple(sorted(self.loops)))
        validate(self)

    # --- derived structure -------------------------------------------------

    @cached_property
    def partner(self) -> dict[Port, Port]:
        out = {}
        for p, q in self.wires:
            out[p] = q
            out[q] = p
        return out

    @cached_property
    def wire_index(self) -> dict[Port, int]:
        return {p: i for i, w in enumerate(self.wires) for p in w}

    def dom_port(self, i: int) -> Port:
        return Port(BOUNDARY, IN, i, self.dom[i])

    def cod_port(self, j: int) -> Port:
        return Port(BOUNDARY, OUT, j, self.cod[j])

    def boundary_ports(self) -> Iterator[Port]:
        for i in range(len(self.dom)):
            yield self.dom_port(i)
        for j in range(len(self.cod)):
            yield self.cod_port(j)

    def ports(self) -> Iterator[Port]:
        yield from self.boundary_ports()
        for b in self.boxes:
            yield from b.ports()

    def wires_of_kind(self, kind: str) -> list[Wire]:
        return [w for w in self.wires if wire_kind(w) == kind]

    @property
    def is_scalar(self) -> bool:
        return not self.dom and not self.cod

    @property
    def loop_counts(self) -> Counter:
        return Counter(self.loops)

    # --- operator sugar ----------------------------------------------------

    def then(self, *others: Diagram) -> Diagram:
        out = self
        for other in others:
            out = compose_seq(other, out)
        return out

    def __rshift__(self, other: Diagram) -> Diagram:
        return compose_seq(other, self)

    def __matmul__(self, other: Diagram) -> Diagram:
        return compose_par(self, other)

    def dagger(self) -> Diagram:
        return dagger(self)

    def transpose(self) -> Diagram:
        return transpose(self)

    def conjugate(self) -> Diagram:
        return conjugate(self)

    def __repr__(self):
        return str(self)

    def __str__(self):
        boxes = ", ".join(f"#{b.id}:{b.label}" for b in self.boxes) or "-"
        wires = " ".join(f"{p}~{q}" for p, q in self.wires)
        loops = f" loops={list(self.loops)}" if self.loops else ""
        return (f"Diagram({' ⊗ '.join(self.dom) or 'I'} -> {' ⊗ '.join(self.cod) or 'I'};"
                f" boxes: {boxes}; wires: {wires}{loops})")


def validate(d: Diagram) -> None:
    """Raise InvalidDiagramError unless every port lies in exactly one well-typed wire."""
    for i, b in enumerate(d.boxes):
        if b.id != i:
            raise InvalidDiagramError(f"box ids must be 0..n-1 in order, got {b.id} at {i}")
        if d.theory.generators and b.generator != d.theory._by_name.get(b.generator.name):
            raise InvalidDiagramError(f"box {b.label} is not a generator of the theory")
    for t in d.dom + d.cod + d.loops:
        if not d.theory.has_type(t):
            raise InvalidDiagramError(f"type {t!r} is not declared in the theory")
    expected = set(d.ports())
    seen: set[Port] = set()
    for p, q in d.wires:
        if p.type != q.type:
            raise InvalidDiagramError(f"wire {p}~{q} joins types {p.type!r} and {q.type!r}")
        for x in (p, q):
            if x not in expected:
                raise InvalidDiagramError(f"wire endpoint {x} is not a port of the diagram")
            if x in seen:
                raise InvalidDiagramError(f"port {x} lies on two wires")
            seen.add(x)
    missing = expected - seen
    if missing:
        raise InvalidDiagramError(f"unwired ports: {', '.join(map(str, sorted(missing)))}")


# --- constructors ---------------------------------------------------------------


def box(theory: Theory, name: str, variant: BoxVariant = ORIGINAL) -> Diagram:
    gen = theory.generator(name)
    inst = BoxInstance(0, gen, variant)
    dom, cod = inst.dom, inst.cod
    wires = [(Port(BOUNDARY, IN, i, t), Port(0, IN, i, t)) for i, t in enumerate(dom)]
    wires += [(Port(0, OUT, j, t), Port(BOUNDARY, OUT, j, t)) for j, t in enumerate(cod)]
    return Diagram(theory, (inst,), wires, dom, cod)


def permutation(theory: Theory, types: Sequence[str], perm: Sequence[int]) -> Diagram:
    """Wire crossing with ``cod[j] = dom[perm[j]]``."""
    types = theory.check_types(types)
    if sorted(perm) != list(range(len(types))):
        raise ValueError(f"{list(perm)} is not a permutation of {len(types)} wires")
    cod = tuple(types[k] for k in perm)
    wires = [(Port(BOUNDARY, IN, k, types[k]), Port(BOUNDARY, OUT, j, types[k]))
             for j, k in enumerate(perm)]
    return Diagram(theory, (), wires, types, cod)


def identity(theory: Theory, types: Sequence[str] = ()) -> Diagram:
    return permutation(theory, types, range(len(types)))


def braid(theory: Theory, left: Sequence[str], right: Sequence[str]) -> Diagram:
    """Swap the block ``left`` past the block ``right``."""
    n, m = len(left), len(right)
    return permutation(theory, tuple(left) + tuple(right),
                       [n + j for j in range(m)] + list(range(n)))


def swap(theory: Theory, a: str, b: str) -> Diagram:
    return braid(theory, (a,), (b,))


def cups(theory: Theory, types: Sequence[str]) -> Diagram:
    """State on ``types + types`` pairing output k with output n + k."""
    types = theory.check_types(types)
    n = len(types)
    cod = types + types
    wires = [(Port(BOUNDARY, OUT, k, t), Port(BOUNDARY, OUT, n + k, t)) for k, t in enumerate(types)]
    return Diagram(theory, (), wires, (), cod)


def caps(theory: Theory, types: Sequence[str]) -> Diagram:
    return dagger(cups(theory, types))


def cup(theory: Theory, a: str) -> Diagram:
    return cups(theory, (a,))


def cap(theory: Theory, a: str) -> Diagram:
    return caps(theory, (a,))


def empty(theory: Theory) -> Diagram:
    return identity(theory, ())


# --- wire fusion ------------------------------------------------------------------


def _fuse(partner: dict[Hashable, Hashable], glue: dict[Hashable, Hashable],
          final: dict[Hashable, Port]) -> tuple[list[Wire], list[str]]:
    """Follow wire chains through glued ports.

    ``partner`` is the wire matching on keys, ``glue`` a matching on the keys
    that disappear, ``final`` names every surviving key.  Returns the fused
    wires and the types of chains that closed into loops.
    """
    visited = set()
    wires = []
    for start in final:
        if start in visited:
            continue
        visited.add(start)
        cur = partner[start]
        while cur in glue:
            mate = glue[cur]
            visited.update((cur, mate))
            cur = partner[mate]
        visited.add(cur)
        wires.append((final[start], final[cur]))
    loops = []
    for k in glue:
        if k in visited:
            continue
        loops.append(k[1].type)
        cur = k
        while cur not in visited:
            mate = glue[cur]
            visited.update((cur, mate))
            cur = partner[mate]
    return wires, loops


def _shift(p: Port, offset: int) -> Port:
    return p if p.is_boundary else p._replace(owner=p.owner + offset)


def _renumber(boxes: Iterable[BoxInstance], offset: int) -> list[BoxInstance]:
    return [BoxInstance(b.id + offset, b.generator, b.variant) for b in boxes]


def _same_theory(f: Diagram, g: Diagram) -> None:
    if f.theory != g.theory:
        raise TheoryError("diagrams belong to different theories")


def compose_seq(g: Diagram, f: Diagram) -> Diagram:
    """``g ∘ f``: plug the outputs of ``f`` into the inputs of ``g`` in order."""
    _same_theory(f, g)
    if f.cod != g.dom:
        if len(f.cod) != len(g.dom):
            raise TypeMismatchError(
                f"cannot compose: f has {len(f.cod)} outputs but g has {len(g.dom)} inputs")
        k = next(i for i, (a, b) in enumerate(zip(f.cod, g.dom)) if a != b)
        raise TypeMismatchError(
            f"cannot compose: output {k} of f has type {f.cod[k]!r}, input {k} of g has type {g.dom[k]!r}",
            index=k)
    off = len(f.boxes)
    partner, final = {}, {}
    for tag, d, shift in (("f", f, 0), ("g", g, off)):
        for p, q in d.wires:
            kp, kq = (tag, _shift(p, shift)), (tag, _shift(q, shift))
            partner[kp], partner[kq] = kq, kp
    glue = {}
    for k, t in enumerate(f.cod):
        a, b = ("f", Port(BOUNDARY, OUT, k, t)), ("g", Port(BOUNDARY, IN, k, t))
        glue[a], glue[b] = b, a
    for key in partner:
        if key not in glue:
            final[key] = key[1]
    wires, loops = _fuse(partner, glue, final)
    boxes = list(f.boxes) + _renumber(g.boxes, off)
    return Diagram(f.theory, boxes, wires, f.dom, g.cod, f.loops + g.loops + tuple(loops))


def compose_par(f: Diagram, g: Diagram) -> Diagram:
    """``f ⊗ g``: side by side, ``f`` on the left."""
    _same_theory(f, g)
    off = len(f.boxes)
    nd, nc = len(f.dom), len(f.cod)

    def move(p: Port) -> Port:
        if p.is_boundary:
            return p._replace(index=p.index + (nd if p.side == IN else nc))
        return p._replace(owner=p.owner + off)

    wires = list(f.wires) + [(move(p), move(q)) for p, q in g.wires]
    boxes = list(f.boxes) + _renumber(g.boxes, off)
    return Diagram(f.theory, boxes, wires, f.dom + g.dom, f.cod + g.cod, f.loops + g.loops)


def compose_seq_all(first: Diagram, *rest: Diagram) -> Diagram:
    return first.then(*rest)


def tensor_all(theory: Theory, diagrams: Iterable[Diagram]) -> Diagram:
    out = empty(theory)
    for d in diagrams:
        out = compose_par(out, d)
    return out


def partial_trace(d: Diagram, out_index: int, in_index: int) -> Diagram:
    """Feed output ``out_index`` back into input ``in_index``."""
    if not (0 <= out_index < len(d.cod) and 0 <= in_index < len(d.dom)):
        raise IndexError("trace position out of range")
    if d.cod[out_index] != d.dom[in_index]:
        raise TypeMismatchError(
            f"cannot trace output {out_index} ({d.cod[out_index]!r}) "
            f"against input {in_index} ({d.dom[in_index]!r})", index=out_index)
    partner = dict(d.partner)
    a, b = d.cod_port(out_index), d.dom_port(in_index)
    glue = {a: b, b: a}
    final = {}
    for p in partner:
        if p in glue:
            continue
        if p.is_boundary:
            cut = out_index if p.side == OUT else in_index
            final[p] = p._replace(index=p.index - (p.index > cut))
        else:
            final[p] = p
    # _fuse reads the loop type from key[1]; wrap keys so plain ports work
    wrap = lambda p: (None, p)  # noqa: E731
    wires, loops = _fuse({wrap(p): wrap(q) for p, q in partner.items()},
                         {wrap(p): wrap(q) for p, q in glue.items()},
                         {wrap(p): q for p, q in final.items()})
    dom = d.dom[:in_index] + d.dom[in_index + 1:]
    cod = d.cod[:out_index] + d.cod[out_index + 1:]
    return Diagram(d.theory, d.boxes, wires, dom, cod, d.loops + tuple(loops))


def trace(d: Diagram) -> Diagram:
    """Full trace: connect output k to input k for every k."""
    if d.dom != d.cod:
        raise TypeMismatchError("full trace needs dom == cod")
    out = d
    while out.cod:
        out = partial_trace(out, 0, 0)
    return out


# --- reflections ----------------------------------------------------------------


def _reflect(d: Diagram, flip_sides: bool, reverse: bool) -> Diagram:
    boxes = [BoxInstance(b.id, b.generator, b.variant.toggled(adjoint=flip_sides, conjugate=reverse))
             for b in d.boxes]
    lengths = {BOUNDARY: {IN: len(d.dom), OUT: len(d.cod)}}
    for b in d.boxes:
        lengths[b.id] = {IN: len(b.dom), OUT: len(b.cod)}

    def move(p: Port) -> Port:
        side = ({IN: OUT, OUT: IN}[p.side]) if flip_sides else p.side
        index = lengths[p.owner][p.side] - 1 - p.index if reverse else p.index
        return Port(p.owner, side, index, p.type)

    dom, cod = (d.cod, d.dom) if flip_sides else (d.dom, d.cod)
    if reverse:
        dom, cod = dom[::-1], cod[::-1]
    wires = [(move(p), move(q)) for p, q in d.wires]
    return Diagram(d.theory, boxes, wires, dom, cod, d.loops)


def dagger(d: Diagram) -> Diagram:
    """Vertical reflection: boxes become adjoints, dom and cod trade places."""
    return _reflect(d, flip_sides=True, reverse=False)


def conjugate(d: Diagram) -> Diagram:
    """Horizontal reflection: wire orders reverse on both boundaries."""
    return _reflect(d, flip_sides=False, reverse=True)


def transpose(d: Diagram) -> Diagram:
    """Rotation by 180 degrees, i.e. bending every boundary wire round with cups and caps."""
    return _reflect(d, flip_sides=True, reverse=True)


def transpose_by_bending(d: Diagram) -> Diagram:
    """Transpose built literally from cups and caps (same value as ``transpose`` up to ``equal``)."""
    T = d.theory
    n, m = len(d.dom), len(d.cod)
    rdom, rcod = d.dom[::-1], d.cod[::-1]
    # nested cups on the reversed codomain feed d's outputs into caps; the domain comes back out
    state = compose_par(identity(T, rcod), _nested_cups(T, d.dom))
    middle = compose_par(compose_par(identity(T, rcod), d), identity(T, rdom))
    effect = compose_par(_nested_caps(T, rcod), identity(T, rdom))
    return compose_seq(effect, compose_seq(middle, state))


def _nested_cups(theory: Theory, types: Sequence[str]) -> Diagram:
    n = len(types)
    cod = tuple(types) + tuple(types)[::-1]
    wires = [(Port(BOUNDARY, OUT, k, t), Port(BOUNDARY, OUT, 2 * n - 1 - k, t))
             for k, t in enumerate(types)]
    return Diagram(theory, (), wires, (), cod)


def _nested_caps(theory: Theory, types: Sequence[str]) -> Diagram:
    # types are listed as they appear on the left half; the right half mirrors them
    return dagger(_nested_cups(theory, types))
