"""JSON file format, schema ``procflow/v1``.

A document looks like::

    {
      "schema": "procflow/v1",
      "theory": {"types": ["A"], "generators": {"f": {"dom": ["A"], "cod": ["A"]}}},
      "diagram": {"op": "compose", "args": [{"op": "box", "name": "f"}, ...]},
      "diagrams": {"rho": {...}, "phiA": {...}},
      "model": {"semiring": "complex", "dims": {"A": 2}, "tensors": {"f": [[[1, 0], [0, 0]], ...]}}
    }

``diagram`` and ``diagrams`` are both optional; ``diagram`` is stored under
the name ``main``.  Expression nodes, all with an ``op`` key:

    box        name, variant (original | adjoint | conjugate | transpose)
    id         types
    swap       types (exactly two)
    permutation  types, perm  (output j is input perm[j])
    cup, cap   type
    compose    args, applied left to right (args[0] first)
    tensor     args, left to right
    dagger, transpose, conjugate   arg
    trace      arg, out, in   (omit out/in to trace every wire)
    double     arg
    discard    types
    purified   arg, env   (discard the trailing env outputs of double(arg))
    ref        name   (another entry of "diagrams")
    graph      dom, cod, boxes [{name, variant}], wires [[[owner, side, index], ...]], loops

Quantum nodes (double, discard, purified) give quantum diagrams; compose,
tensor and dagger work on either kind but cannot mix them.

Model tensors are nested lists with axes cod then dom.  Complex entries
are ``[re, im]`` pairs (a plain number is read as real); boolean entries
are ``true``/``false`` or 0/1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .diagram import (BOUNDARY, IN, OUT, BoxInstance, Diagram, Port, box, cap, compose_par,
                      compose_seq, conjugate, cup, dagger, identity, partial_trace,
                      permutation, swap, trace, transpose)
from .doubling import (QDiagram, discard, double, from_purification, q_compose_par,
                       q_compose_seq, q_dagger)
from .errors import ParseError, TypeMismatchError
from .tensor import SEMIRINGS, Model
from .theory import BoxVariant, Theory

SCHEMA = "procflow/v1"

AnyDiagram = Union[Diagram, QDiagram]


@dataclass
class Document:
    theory: Theory
    diagrams: dict[str, AnyDiagram] = field(default_factory=dict)
    model: Model | None = None

    @property
    def main(self) -> AnyDiagram:
        if "main" in self.diagrams:
            return self.diagrams["main"]
        if len(self.diagrams) == 1:
            return next(iter(self.diagrams.values()))
        raise ParseError("document has no 'diagram' entry")


# --- parsing ---------------------------------------------------------------------------


def _need(obj: dict, key: str, path: str, kind=None):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path=path)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", path=path)
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"field {key!r} has the wrong JSON type", path=f"{path}.{key}")
    return value


def _types(value, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(t, str) for t in value):
        raise ParseError("expected a list of type names", path=path)
    return tuple(value)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", path=path)
    return value


def parse_theory(obj: Any, path: str = "theory") -> Theory:
    types = _types(_need(obj, "types", path), f"{path}.types")
    gens = _need(obj, "generators", path, dict)
    spec = {}
    for name, g in gens.items():
        p = f"{path}.generators.{name}"
        spec[name] = (_types(_need(g, "dom", p), p + ".dom"), _types(_need(g, "cod", p), p + ".cod"))
    return Theory.build(types, spec)


class _Parser:
    def __init__(self, theory: Theory, raw: dict[str, Any]):
        self.T = theory
        self.raw = raw
        self.done: dict[str, AnyDiagram] = {}
        self.active: set[str] = set()

    def named(self, name: str, path: str) -> AnyDiagram:
        if name in self.done:
            return self.done[name]
        if name not in self.raw:
            raise ParseError(f"unknown diagram reference {name!r}", path=path)
        if name in self.active:
            raise ParseError(f"cyclic diagram reference {name!r}", path=path)
        self.active.add(name)
        self.done[name] = self.expr(self.raw[name], f"diagrams.{name}")
        self.active.discard(name)
        return self.done[name]

    def _args(self, node, path) -> list[AnyDiagram]:
        args = _need(node, "args", path, list)
        return [self.expr(a, f"{path}.args[{i}]") for i, a in enumerate(args)]

    def _arg(self, node, path) -> AnyDiagram:
        return self.expr(_need(node, "arg", path), path + ".arg")

    def expr(self, node: Any, path: str) -> AnyDiagram:
        T = self.T
        op = _need(node, "op", path, str)
        if op == "box":
            variant = node.get("variant", "original")
            try:
                v = BoxVariant.parse(variant)
            except (ValueError, TypeError):
                raise ParseError(f"unknown box variant {variant!r}", path=path) from None
            return box(T, _need(node, "name", path, str), v)
        if op == "id":
            return identity(T, _types(_need(node, "types", path), path + ".types"))
        if op == "swap":
            ts = _types(_need(node, "types", path), path + ".types")
            if len(ts) != 2:
                raise ParseError("swap takes exactly two types", path=path)
            return swap(T, *ts)
        if op == "permutation":
            ts = _types(_need(node, "types", path), path + ".types")
            perm = [_int(x, path + ".perm") for x in _need(node, "perm", path, list)]
            return permutation(T, ts, perm)
        if op in ("cup", "cap"):
            t = _need(node, "type", path, str)
            return cup(T, t) if op == "cup" else cap(T, t)
        if op == "compose":
            parts = self._args(node, path)
            if not parts:
                raise ParseError("compose needs at least one argument", path=path)
            out = parts[0]
            for k, nxt in enumerate(parts[1:], 1):
                out = self._seq(nxt, out, f"{path}.args[{k}]")
            return out
        if op == "tensor":
            parts = self._args(node, path)
            if not parts:
                return identity(T, ())
            out = parts[0]
            for k, nxt in enumerate(parts[1:], 1):
                self._same_kind(out, nxt, f"{path}.args[{k}]")
                out = q_compose_par(out, nxt) if isinstance(out, QDiagram) else compose_par(out, nxt)
            return out
        if op == "dagger":
            d = self._arg(node, path)
            return q_dagger(d) if isinstance(d, QDiagram) else dagger(d)
        if op in ("transpose", "conjugate", "trace"):
            d = self._base(self._arg(node, path), op, path)
            if op == "transpose":
                return transpose(d)
            if op == "conjugate":
                return conjugate(d)
            if "out" in node or "in" in node:
                return partial_trace(d, _int(_need(node, "out", path), path + ".out"),
                                     _int(_need(node, "in", path), path + ".in"))
            return trace(d)
        if op == "double":
            return double(self._base(self._arg(node, path), op, path))
        if op == "discard":
            return discard(T, _types(_need(node, "types", path), path + ".types"))
        if op == "purified":
            d = self._base(self._arg(node, path), op, path)
            return from_purification(d, _types(_need(node, "env", path), path + ".env"))
        if op == "ref":
            return self.named(_need(node, "name", path, str), path)
        if op == "graph":
            return self._graph(node, path)
        raise ParseError(f"unknown operator {op!r}", path=path)

    def _same_kind(self, a, b, path):
        if isinstance(a, QDiagram) != isinstance(b, QDiagram):
            raise TypeMismatchError(f"cannot combine a quantum and a base diagram ({path})")

    def _seq(self, g, f, path):
        self._same_kind(f, g, path)
        return q_compose_seq(g, f) if isinstance(f, QDiagram) else compose_seq(g, f)

    def _base(self, d, op, path) -> Diagram:
        if isinstance(d, QDiagram):
            raise TypeMismatchError(f"{op} needs a base diagram, got a quantum one ({path})")
        return d

    def _graph(self, node, path) -> Diagram:
        T = self.T
        dom = _types(_need(node, "dom", path), path + ".dom")
        cod = _types(_need(node, "cod", path), path + ".cod")
        loops = _types(node.get("loops", []), path + ".loops")
        boxes = []
        for i, b in enumerate(_need(node, "boxes", path, list)):
            p = f"{path}.boxes[{i}]"
            try:
                v = BoxVariant.parse(b.get("variant", "original"))
            except (ValueError, TypeError, AttributeError):
                raise ParseError("bad box variant", path=p) from None
            boxes.append(BoxInstance(i, T.generator(_need(b, "name", p, str)), v))

        def port(raw, p) -> Port:
            if not (isinstance(raw, list) and len(raw) == 3):
                raise ParseError("a port is [owner, side, index]", path=p)
            owner, side, index = _int(raw[0], p), raw[1], _int(raw[2], p)
            if side not in (IN, OUT):
                raise ParseError(f"port side must be {IN!r} or {OUT!r}", path=p)
            if owner == BOUNDARY:
                types = dom if side == IN else cod
            elif 0 <= owner < len(boxes):
                types = boxes[owner].dom if side == IN else boxes[owner].cod
            else:
                raise ParseError(f"no box {owner}", path=p)
            if not 0 <= index < len(types):
                raise ParseError(f"port index {index} out of range", path=p)
            return Port(owner, side, index, types[index])

        wires = []
        for i, w in enumerate(_need(node, "wires", path, list)):
            p = f"{path}.wires[{i}]"
            if not (isinstance(w, list) and len(w) == 2):
                raise ParseError("a wire is a pair of ports", path=p)
            a, b = port(w[0], p), port(w[1], p)
            wires.append((a, b) if a <= b else (b, a))
        return Diagram(T, tuple(boxes), tuple(wires), dom, cod, loops)


def _complex_array(raw, shape: tuple[int, ...], path: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (ValueError, TypeError):
        raise ParseError("tensor entries must be numbers or [re, im] pairs", path=path) from None
    if arr.shape == shape + (2,):
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.shape == shape:
        return arr.astype(complex)
    raise ParseError(f"tensor has shape {arr.shape}, expected {shape} of [re, im] pairs", path=path)


def parse_model(obj: Any, theory: Theory, path: str = "model") -> Model:
    name = obj.get("semiring", "complex") if isinstance(obj, dict) else None
    if name not in SEMIRINGS:
        raise ParseError(f"unknown semiring {name!r}", path=path)
    semiring = SEMIRINGS[name]
    dims = _need(obj, "dims", path, dict)
    for t, d in dims.items():
        _int(d, f"{path}.dims.{t}")
    tensors = _need(obj, "tensors", path, dict)
    arrays = {}
    for g, raw in tensors.items():
        p = f"{path}.tensors.{g}"
        gen = theory.generator(g)
        try:
            shape = tuple(int(dims[t]) for t in gen.cod + gen.dom)
        except KeyError as e:
            raise ParseError(f"no dimension for type {e.args[0]!r}", path=path) from None
        if semiring.name == "boolean":
            arr = np.asarray(raw)
            if arr.shape != shape or arr.dtype.kind not in "bi":
                raise ParseError(f"boolean tensor must have shape {shape}", path=p)
            arrays[g] = arr.astype(bool)
        else:
            arrays[g] = _complex_array(raw, shape, p)
    return Model(theory, dims, arrays, semiring)


def parse_document(text: str) -> Document:
    """Parse and type-check a document.

    Raises ParseError for malformed JSON or schema violations, and the
    library's type errors (TypeMismatchError, TheoryError, ...) when the
    expression tree does not type-check.  Model problems raise ModelError.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object", path="$")
    schema = obj.get("schema")
    if schema != SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", path="schema")
    theory = parse_theory(_need(obj, "theory", "$"))
    raw = dict(obj.get("diagrams") or {})
    if "diagram" in obj:
        raw["main"] = obj["diagram"]
    parser = _Parser(theory, raw)
    diagrams = {name: parser.named(name, "$") for name in raw}
    model = parse_model(obj["model"], theory) if obj.get("model") is not None else None
    return Document(theory, diagrams, model)


def load(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


# --- writing --------------------------------------------------------------------------


def theory_to_json(T: Theory) -> dict:
    return {"types": list(T.types),
            "generators": {g.name: {"dom": list(g.dom), "cod": list(g.cod)}
                           for g in T.generators}}


def diagram_to_json(d: AnyDiagram) -> dict:
    """Expression node for ``d``: a raw graph, wrapped in ``purified`` for quantum diagrams."""
    if isinstance(d, QDiagram):
        return {"op": "purified", "arg": diagram_to_json(d.pure), "env": list(d.env)}
    return {
        "op": "graph",
        "dom": list(d.dom),
        "cod": list(d.cod),
        "boxes": [{"name": b.generator.name, "variant": b.variant.name} for b in d.boxes],
        "wires": [[[p.owner, p.side, p.index], [q.owner, q.side, q.index]] for p, q in d.wires],
        "loops": list(d.loops),
    }


def array_to_json(arr: np.ndarray, semiring_name: str = "complex"):
    arr = np.asarray(arr)
    if semiring_name == "boolean":
        return arr.astype(bool).tolist()
    arr = arr.astype(complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def model_to_json(m: Model) -> dict:
    return {"semiring": m.semiring.name,
            "dims": {t: int(m.dims[t]) for t in m.theory.types},
            "tensors": {g: array_to_json(a, m.semiring.name) for g, a in m.tensors.items()}}


def document_to_json(doc: Document) -> dict:
    out: dict[str, Any] = {"schema": SCHEMA, "theory": theory_to_json(doc.theory)}
    if list(doc.diagrams) == ["main"]:
        out["diagram"] = diagram_to_json(doc.diagrams["main"])
    elif doc.diagrams:
        out["diagrams"] = {k: diagram_to_json(v) for k, v in doc.diagrams.items()}
    if doc.model is not None:
        out["model"] = model_to_json(doc.model)
    return out


def dumps(doc: Document, indent: int | None = 2) -> str:
    return json.dumps(document_to_json(doc), indent=indent, ensure_ascii=False)


def dump_diagram(d: AnyDiagram, model: Model | None = None) -> str:
    theory = d.theory
    return dumps(Document(theory, {"main": d}, model))


__all__ = ["SCHEMA", "Document", "parse_document", "parse_theory", "parse_model", "load",
           "diagram_to_json", "model_to_json", "document_to_json", "dumps", "dump_diagram",
           "array_to_json", "theory_to_json"]
