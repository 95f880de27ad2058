"""Circuit recognition and layering.

A diagram is a circuit when it has no cup or cap wires, no closed loops,
and its box graph (an edge from u to v whenever an output of u feeds an
input of v) has no directed cycle.  Circuits can be rebuilt from ∘ and ⊗
of boxes, identities and swaps; ``layer_decompose`` produces that build.
"""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .diagram import (BOUNDARY, CAP, CUP, IN, OUT, Diagram, Port, box, compose_seq, identity,
                      swap, tensor_all, wire_kind)
from .errors import NotACircuitError


def box_graph(d: Diagram) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(b.id for b in d.boxes)
    for p, q in d.wires:
        if p.is_boundary or q.is_boundary or wire_kind((p, q)) != "plain":
            continue
        src, dst = (p, q) if p.side == OUT else (q, p)
        g.add_edge(src.owner, dst.owner)
    return g


def directed_cycles(d: Diagram) -> list[list[int]]:
    """Elementary directed cycles of the box graph, each as a list of box ids."""
    cycles = [_rotate_min(c) for c in nx.simple_cycles(box_graph(d))]
    return sorted(cycles, key=lambda c: (len(c), c))


def _rotate_min(cycle: list[int]) -> list[int]:
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def _topological_order(d: Diagram) -> list[int] | None:
    # Kahn's algorithm, smallest ready id first; None when a cycle blocks progress
    succ: dict[int, set[int]] = {b.id: set() for b in d.boxes}
    indeg = {b.id: 0 for b in d.boxes}
    for p, q in d.wires:
        if p.is_boundary or q.is_boundary or wire_kind((p, q)) != "plain":
            continue
        src, dst = (p, q) if p.side == OUT else (q, p)
        if dst.owner not in succ[src.owner]:
            succ[src.owner].add(dst.owner)
            indeg[dst.owner] += 1
    ready = sorted(b for b, k in indeg.items() if k == 0)
    order = []
    while ready:
        b = ready.pop(0)
        order.append(b)
        for c in sorted(succ[b]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    return order if len(order) == len(d.boxes) else None


def bent_wires(d: Diagram):
    return [w for w in d.wires if wire_kind(w) in (CUP, CAP)]


def is_circuit(d: Diagram) -> bool:
    return not d.loops and not bent_wires(d) and _topological_order(d) is not None


# --- layering ----------------------------------------------------------------------


@dataclass(frozen=True, repr=False)
class Cell:
    """One slot of a layer: a single box, an identity on some wires, or a swap."""

    kind: str  # "box" | "identity" | "swap"
    diagram: Diagram
    box_id: int | None = None

    def __repr__(self):
        return str(self)

    def __str__(self):
        if self.kind == "box":
            return self.diagram.boxes[0].label
        if self.kind == "swap":
            return "swap"
        return "id(" + ",".join(self.diagram.dom) + ")"


Layer = tuple[Cell, ...]


def layer_decompose(d: Diagram) -> list[Layer]:
    """Split a circuit into layers of box, identity and swap cells.

    Boxes are grouped by depth in the box graph, lowest id first within a
    depth.  Wires are permuted between box layers by odd-even transposition
    sort, each pass being one layer of swap cells.
    """
    if d.loops or bent_wires(d):
        raise NotACircuitError("diagram has cup/cap wires or loops", bent_wires=bent_wires(d),
                               loops=d.loops)
    order = _topological_order(d)
    if order is None:
        raise NotACircuitError("diagram has a directed cycle", cycles=directed_cycles(d))
    T = d.theory
    depth: dict[int, int] = {}
    for b in order:
        preds = [d.partner[p].owner for p in d.boxes[b].ports()
                 if p.side == IN and not d.partner[p].is_boundary]
        depth[b] = 1 + max((depth[a] for a in preds), default=-1)
    by_depth: dict[int, list[int]] = {}
    for b in order:
        by_depth.setdefault(depth[b], []).append(b)

    layers: list[Layer] = []
    current: list[Port] = [d.dom_port(i) for i in range(len(d.dom))]
    for level in sorted(by_depth):
        group = sorted(by_depth[level])
        needs = {b: [d.partner[Port(b, IN, i, t)] for i, t in enumerate(d.boxes[b].dom)]
                 for b in group}
        owner_of = {p: b for b, ps in needs.items() for p in ps}
        # each box's inputs are gathered where its first input currently sits
        target: list[Port | int] = []
        placed = set()
        for p in current:
            b = owner_of.get(p)
            if b is None:
                target.append(p)
            elif b not in placed:
                placed.add(b)
                target.append(b)
        target += [b for b in group if b not in placed]  # boxes without inputs go rightmost
        flat = [q for item in target for q in (needs[item] if isinstance(item, int) else [item])]
        layers += _permutation_layers(T, current, flat)
        cells: list[Cell] = []
        nxt: list[Port] = []
        run: list[str] = []
        for item in target:
            if isinstance(item, int):
                if run:
                    cells.append(Cell("identity", identity(T, run)))
                    run = []
                inst = d.boxes[item]
                cells.append(Cell("box", box(T, inst.generator.name, inst.variant), item))
                nxt += [Port(item, OUT, j, t) for j, t in enumerate(inst.cod)]
            else:
                run.append(item.type)
                nxt.append(item)
        if run:
            cells.append(Cell("identity", identity(T, run)))
        layers.append(tuple(cells))
        current = nxt
    final = [d.partner[d.cod_port(j)] for j in range(len(d.cod))]
    layers += _permutation_layers(T, current, final)
    return layers


def _permutation_layers(T, current: list[Port], target: list[Port]) -> list[Layer]:
    key = {p: i for i, p in enumerate(target)}
    seq = [key[p] for p in current]
    types = [p.type for p in current]
    layers = []
    parity = 0
    clean_passes = 0
    while clean_passes < 2:
        swaps = [i for i in range(parity, len(seq) - 1, 2) if seq[i] > seq[i + 1]]
        if swaps:
            clean_passes = 0
            layers.append(_swap_layer(T, types, swaps))
            for i in swaps:
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
                types[i], types[i + 1] = types[i + 1], types[i]
        else:
            clean_passes += 1
        parity ^= 1
    return layers


def _swap_layer(T, types: list[str], swaps: list[int]) -> Layer:
    cells: list[Cell] = []
    run: list[str] = []
    i = 0
    swaps = set(swaps)
    while i < len(types):
        if i in swaps:
            if run:
                cells.append(Cell("identity", identity(T, run)))
                run = []
            cells.append(Cell("swap", swap(T, types[i], types[i + 1])))
            i += 2
        else:
            run.append(types[i])
            i += 1
    if run:
        cells.append(Cell("identity", identity(T, run)))
    return tuple(cells)


def recompose(layers: list[Layer], dom, theory) -> Diagram:
    """Inverse of ``layer_decompose``: ∘ over layers of ⊗ over cells."""
    out = identity(theory, dom)
    for layer in layers:
        out = compose_seq(tensor_all(theory, (c.diagram for c in layer)), out)
    return out


def render_layers(layers: list[Layer]) -> str:
    return "\n".join(f"{k}: " + " | ".join(map(str, layer)) for k, layer in enumerate(layers))
