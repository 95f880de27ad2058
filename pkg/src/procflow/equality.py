"""Structural equality of diagrams via canonical forms.

Two diagrams are equal when one deforms into the other: same boundary,
same boxes, same connectivity, same loops.  Deformation includes sliding
boxes round cups and caps, so a transposed box counts as the original box
with its wires bent.  To see this, each box port is first mapped to its
*physical* port: f and fᵀ are both drawn as f, f† and f̄ both as f†, and
the rotation only changes which physical port an effective port names.

The canonical form is the lexicographically least encoding of the
diagram over all box orderings compatible with iterated colour
refinement, found by individualise-and-refine backtracking.

Byte layout of ``CanonicalForm.data`` (all integers unsigned big-endian
32 bit, strings as length-prefixed UTF-8):

    b"PFCF" version=1
    n_dom, dom type names; n_cod, cod type names
    n_boxes, per box in canonical order: generator name, daggered flag
    n_loops, loop type names (sorted)
    n_wires, per wire in sorted order: two port ids, each (owner, side, index)

where owner 0 is the boundary and owner k+1 the k-th canonical box, side
0 is a box input (or the domain), side 1 a box output (or the codomain).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .diagram import BOUNDARY, IN, Diagram, Port
from .errors import TheoryError

Code = tuple[int, int, int]


@dataclass(frozen=True)
class CanonicalForm:
    data: bytes

    def hex(self) -> str:
        return self.data.hex()


def physical_port(d: Diagram, p: Port) -> tuple[int, int, int]:
    """(owner, side, index) of ``p`` on the box as physically drawn."""
    side = 0 if p.side == IN else 1
    if p.is_boundary or not d.boxes[p.owner].variant.rotated:
        return (p.owner, side, p.index)
    b = d.boxes[p.owner]
    # a rotated box: effective outputs are physical inputs in reverse, and vice versa
    n_phys_in = len(b.cod)
    n_phys_out = len(b.dom)
    if side == 1:
        return (p.owner, 0, n_phys_in - 1 - p.index)
    return (p.owner, 1, n_phys_out - 1 - p.index)


def physical_graph(d: Diagram):
    """Box labels and wires between physical ports; the common input of all equality checks."""
    labels = [(b.generator.name, b.variant.daggered) for b in d.boxes]
    wires = [(physical_port(d, p), physical_port(d, q)) for p, q in d.wires]
    return labels, wires


def _encode(d: Diagram, labels, wires, order: list[int]):
    rank = {b: k for k, b in enumerate(order)}

    def code(port) -> Code:
        owner, side, index = port
        return (0 if owner == BOUNDARY else rank[owner] + 1, side, index)

    enc_wires = sorted(tuple(sorted((code(p), code(q)))) for p, q in wires)
    return (tuple(labels[b] for b in order), tuple(enc_wires))


def _refine(n: int, colour: list[int], nbrs) -> list[int]:
    while True:
        sigs = []
        for b in range(n):
            local = sorted((ps, pi, kind, colour[o] if kind == 1 else o, qs, qi)
                           for ps, pi, kind, o, qs, qi in nbrs[b])
            sigs.append((colour[b], tuple(local)))
        ranks = {s: k for k, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colour)):
            return new
        colour = new


def _neighbourhoods(n: int, wires):
    # per box: (my side, my index, kind, other, other side, other index)
    # kind 0 = boundary (other is the boundary side), 1 = another box, 2 = itself
    nbrs = [[] for _ in range(n)]
    for p, q in wires:
        for a, b in ((p, q), (q, p)):
            if a[0] == BOUNDARY:
                continue
            if b[0] == BOUNDARY:
                nbrs[a[0]].append((a[1], a[2], 0, b[1], b[1], b[2]))
            elif b[0] == a[0]:
                nbrs[a[0]].append((a[1], a[2], 2, 0, b[1], b[2]))
            else:
                nbrs[a[0]].append((a[1], a[2], 1, b[0], b[1], b[2]))
    return nbrs


def canonical_encoding(d: Diagram):
    labels, wires = physical_graph(d)
    n = len(labels)
    label_rank = {lab: k for k, lab in enumerate(sorted(set(labels)))}
    nbrs = _neighbourhoods(n, wires)
    best = None

    def search(colour: list[int]):
        nonlocal best
        colour = _refine(n, colour, nbrs)
        cells: dict[int, list[int]] = {}
        for b, c in enumerate(colour):
            cells.setdefault(c, []).append(b)
        split = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
        if split is None:
            enc = _encode(d, labels, wires, sorted(range(n), key=colour.__getitem__))
            if best is None or enc < best:
                best = enc
            return
        for v in cells[split]:
            search([2 * c + (0 if b == v else 1) for b, c in enumerate(colour)])

    search([label_rank[lab] for lab in labels])
    if best is None:
        best = ((), ())
    return (d.dom, d.cod, best[0], d.loops, best[1])


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack(">I", len(raw)) + raw


def _pack_strs(xs) -> bytes:
    return struct.pack(">I", len(xs)) + b"".join(_pack_str(x) for x in xs)


def canonical_form(d: Diagram) -> CanonicalForm:
    dom, cod, labels, loops, wires = canonical_encoding(d)
    out = [b"PFCF", struct.pack(">I", 1), _pack_strs(dom), _pack_strs(cod),
           struct.pack(">I", len(labels))]
    for name, daggered in labels:
        out.append(_pack_str(name) + struct.pack(">I", int(daggered)))
    out.append(_pack_strs(loops))
    out.append(struct.pack(">I", len(wires)))
    for p, q in wires:
        out.append(struct.pack(">6I", *p, *q))
    return CanonicalForm(b"".join(out))


def equal(d1: Diagram, d2: Diagram) -> bool:
    """Deformation equality."""
    if d1.theory != d2.theory:
        raise TheoryError("cannot compare diagrams from different theories")
    if d1.dom != d2.dom or d1.cod != d2.cod or d1.loops != d2.loops:
        return False
    if len(d1.boxes) != len(d2.boxes) or len(d1.wires) != len(d2.wires):
        return False
    return canonical_form(d1) == canonical_form(d2)
