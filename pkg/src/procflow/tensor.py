"""Tensor-network semantics of diagrams over a semiring with involution.

Two semirings ship: ``COMPLEX`` (finite-dimensional Hilbert spaces, the
cup being Σᵢ|ii⟩ in the computational basis) and ``BOOLEAN`` (relations,
where + is "or", × is "and" and the involution is trivial).

A generator's tensor has axes ``cod + dom``.  Evaluating a diagram gives a
tensor with axes ordered by codomain then domain position, so its matrix
(row-major reshape) composes by matrix product and tensors by Kronecker
product.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .diagram import BOUNDARY, IN, OUT, BoxInstance, Diagram
from .errors import ModelError, TheoryError, TypeMismatchError
from .theory import Theory


@dataclass(frozen=True)
class Semiring:
    name: str
    dtype: type
    zero: object
    one: object
    conj: Callable[[np.ndarray], np.ndarray]

    def add(self, a, b):
        return np.logical_or(a, b) if self.dtype is np.bool_ else np.add(a, b)

    def mul(self, a, b):
        return np.logical_and(a, b) if self.dtype is np.bool_ else np.multiply(a, b)

    def asarray(self, x) -> np.ndarray:
        return np.asarray(x, dtype=self.dtype)

    def einsum(self, *operands):
        # numpy's bool einsum already sums with "or" and multiplies with "and"
        return np.einsum(*operands)

    def from_count(self, n: int):
        return self.asarray(n > 0 if self.dtype is np.bool_ else n)

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        if self.dtype is np.bool_:
            return float(np.any(a != b))
        return float(np.max(np.abs(a - b), initial=0.0))


COMPLEX = Semiring("complex", np.complex128, 0j, 1 + 0j, np.conj)
BOOLEAN = Semiring("boolean", np.bool_, False, True, lambda a: a)
SEMIRINGS = {s.name: s for s in (COMPLEX, BOOLEAN)}


@dataclass(frozen=True, eq=False)
class Tensor:
    """Dense array whose first ``n_cod`` axes are outputs and the rest inputs."""

    array: np.ndarray
    n_cod: int
    semiring: Semiring = COMPLEX

    @property
    def shape(self) -> tuple[int, ...]:
        return self.array.shape

    @property
    def cod_shape(self) -> tuple[int, ...]:
        return self.array.shape[:self.n_cod]

    @property
    def dom_shape(self) -> tuple[int, ...]:
        return self.array.shape[self.n_cod:]

    @property
    def axis_roles(self) -> tuple[tuple[str, int], ...]:
        n_dom = self.array.ndim - self.n_cod
        return tuple(("cod", j) for j in range(self.n_cod)) + tuple(("dom", i) for i in range(n_dom))

    @property
    def is_scalar(self) -> bool:
        return self.array.ndim == 0

    def matrix(self) -> np.ndarray:
        return self.array.reshape(math.prod(self.cod_shape), math.prod(self.dom_shape))

    def scalar(self):
        if not self.is_scalar:
            raise ValueError(f"tensor of shape {self.shape} is not a scalar")
        return self.array[()]

    def __repr__(self):
        return f"Tensor(shape={self.shape}, n_cod={self.n_cod}, semiring={self.semiring.name})"


# --- models ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Model:
    """Dimensions for atomic types and tensors for generators."""

    theory: Theory
    dims: Mapping[str, int]
    tensors: Mapping[str, np.ndarray]
    semiring: Semiring = COMPLEX
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", dict(self.dims))
        tensors = {k: self.semiring.asarray(v) for k, v in dict(self.tensors).items()}
        object.__setattr__(self, "tensors", tensors)
        for t in self.theory.types:
            d = self.dims.get(t)
            if not isinstance(d, (int, np.integer)) or d < 1:
                raise ModelError(f"type {t!r} needs a positive integer dimension, got {d!r}")
        for g in self.theory.generators:
            if g.name not in tensors:
                raise ModelError(f"no tensor for generator {g.name!r}")
            want = self.shape(g.cod + g.dom)
            if tensors[g.name].shape != want:
                raise ModelError(f"tensor for {g.name!r} has shape {tensors[g.name].shape}, "
                                 f"expected {want} (cod dims then dom dims)")
        for name in tensors:
            self.theory.generator(name)

    def shape(self, types: Sequence[str]) -> tuple[int, ...]:
        return tuple(int(self.dims[t]) for t in types)

    def dim(self, types: Sequence[str]) -> int:
        return math.prod(self.shape(types))

    def with_tensor(self, name: str, array) -> Model:
        tensors = dict(self.tensors)
        tensors[name] = array
        return Model(self.theory, self.dims, tensors, self.semiring, self.seed)

    def box_tensor(self, inst: BoxInstance) -> np.ndarray:
        """Tensor of one box occurrence, axes ordered by its effective cod then dom."""
        t = self.tensors[inst.generator.name]
        m, n = len(inst.generator.cod), len(inst.generator.dom)
        cod_axes, dom_axes = list(range(m)), list(range(m, m + n))
        if inst.variant.adjoint:
            cod_axes, dom_axes = dom_axes, cod_axes
        if inst.variant.conjugate:
            cod_axes, dom_axes = cod_axes[::-1], dom_axes[::-1]
        t = np.transpose(t, cod_axes + dom_axes)
        if inst.variant.daggered:
            t = self.semiring.conj(t)
        return t


def random_model(theory: Theory, dim_bounds: tuple[int, int] = (1, 4), seed: int = 0,
                 fixed: Mapping[str, object] | None = None,
                 dims: Mapping[str, int] | None = None) -> Model:
    """Model with uniform dimensions in ``dim_bounds`` and complex Gaussian entries.

    ``dims`` pins some dimensions; ``fixed`` pins some generator tensors
    (their shapes must agree with the drawn dimensions).
    """
    lo, hi = dim_bounds
    if lo < 1 or hi < lo:
        raise ValueError(f"empty or invalid dimension range [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    chosen = {t: int(rng.integers(lo, hi + 1)) for t in theory.types}
    chosen.update(dims or {})
    tensors = {}
    for g in theory.generators:
        shape = tuple(chosen[t] for t in g.cod + g.dom)
        tensors[g.name] = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    for name, arr in (fixed or {}).items():
        tensors[name] = np.asarray(arr, dtype=complex)
    return Model(theory, chosen, tensors, COMPLEX, seed)


# --- contraction ---------------------------------------------------------------


def contract(operands: list[tuple[np.ndarray, list[int]]], output: list[int],
             semiring: Semiring = COMPLEX, order: str = "greedy") -> np.ndarray:
    """Contract a labelled tensor network.

    Labels are wire ids.  ``order`` is ``"greedy"`` (cheapest intermediate
    first, ties to the smallest shared wire id) or ``"left"`` (fold from the
    left).  A label may repeat within one operand, which takes a diagonal.
    """
    ops = [(semiring.asarray(a), list(ls)) for a, ls in operands]
    dims: dict[int, int] = {}
    for a, ls in ops:
        for ax, lab in zip(a.shape, ls):
            dims[lab] = ax
    if not ops:
        return semiring.asarray(semiring.one)

    def remaining(exclude: set[int]) -> set[int]:
        keep = set(output)
        for k, (_, ls) in enumerate(ops):
            if k not in exclude:
                keep.update(ls)
        return keep

    def merge(i: int, j: int):
        (a, la), (b, lb) = ops[i], ops[j]
        keep = remaining({i, j})
        out = [lab for lab in dict.fromkeys(la + lb) if lab in keep]
        return _einsum(semiring, [(a, la), (b, lb)], out), out

    # sum out labels private to one operand before pairing
    for k, (a, ls) in enumerate(ops):
        keep = remaining({k})
        out = [lab for lab in dict.fromkeys(ls) if lab in keep]
        if out != ls:
            ops[k] = (_einsum(semiring, [(a, ls)], out), out)

    while len(ops) > 1:
        if order == "left":
            i, j = 0, 1
        elif order == "greedy":
            i, j = _greedy_pair(ops, dims, output)
        else:
            raise ValueError(f"unknown contraction order {order!r}")
        merged = merge(i, j)
        ops = [op for k, op in enumerate(ops) if k not in (i, j)]
        ops.insert(0 if order == "left" else len(ops), merged)
    a, ls = ops[0]
    return _einsum(semiring, [(a, ls)], list(output))


def _greedy_pair(ops, dims, output) -> tuple[int, int]:
    best = None
    n = len(ops)
    counts: dict[int, int] = {}
    for _, ls in ops:
        for lab in set(ls):
            counts[lab] = counts.get(lab, 0) + 1
    outset = set(output)
    for i, j in itertools.combinations(range(n), 2):
        li, lj = set(ops[i][1]), set(ops[j][1])
        shared = li & lj
        union = li | lj
        result = [lab for lab in union
                  if lab in outset or counts[lab] > (lab in li) + (lab in lj)]
        cost = math.prod(dims[lab] for lab in result)
        key = (0 if shared else 1, cost, min(shared) if shared else math.inf, i, j)
        if best is None or key < best[0]:
            best = (key, (i, j))
    return best[1]


def _einsum(semiring: Semiring, operands, out: list[int]) -> np.ndarray:
    # einsum sublists only accept labels below 52, so relabel locally
    local: dict[int, int] = {}
    args = []
    for a, ls in operands:
        args += [a, [local.setdefault(lab, len(local)) for lab in ls]]
    args.append([local[lab] for lab in out])
    return semiring.asarray(semiring.einsum(*args))


def evaluate(d: Diagram, m: Model, order: str = "greedy") -> Tensor:
    """Interpret ``d`` in ``m`` by contracting box tensors along wires."""
    if d.theory != m.theory:
        raise TheoryError("diagram and model belong to different theories")
    sr = m.semiring
    n_wires = len(d.wires)
    operands = []
    label_of: dict = {}
    fresh = itertools.count(n_wires)
    for w, (p, q) in enumerate(d.wires):
        if p.is_boundary and q.is_boundary:
            # wire straight across the diagram: an explicit identity matrix
            a, b = next(fresh), next(fresh)
            label_of[p], label_of[q] = a, b
            operands.append((sr.asarray(np.eye(m.dims[p.type], dtype=sr.dtype)), [a, b]))
        else:
            label_of[p] = label_of[q] = w
    for inst in d.boxes:
        labels = [label_of[p] for p in inst.ports() if p.side == OUT]
        labels += [label_of[p] for p in inst.ports() if p.side == IN]
        operands.append((m.box_tensor(inst), labels))
    output = [label_of[d.cod_port(j)] for j in range(len(d.cod))]
    output += [label_of[d.dom_port(i)] for i in range(len(d.dom))]
    arr = contract(operands, output, sr, order)
    loop_factor = 1
    for t in d.loops:
        loop_factor *= m.dims[t]
    if d.loops:
        arr = sr.mul(arr, sr.from_count(loop_factor))
    return Tensor(sr.asarray(arr), len(d.cod), sr)


def numeric_equal(t1: Tensor, t2: Tensor, tol: float = 1e-9) -> bool:
    if t1.shape != t2.shape or t1.n_cod != t2.n_cod:
        return False
    return t1.semiring.distance(t1.array, t2.array) <= tol


@dataclass(frozen=True)
class Verdict:
    """Outcome of randomized semantic comparison.

    ``equivalent`` only means no sampled model told the diagrams apart; it is
    evidence, not proof.
    """

    equivalent: bool
    trials: int
    witness_seed: int | None = None
    deviation: float = 0.0

    def __str__(self):
        if self.equivalent:
            return f"equivalent-with-confidence ({self.trials} models)"
        return f"distinguished-by-model (seed {self.witness_seed}, deviation {self.deviation:.3g})"


def prob_equiv(d1: Diagram, d2: Diagram, trials: int = 20, seed: int = 0, tol: float = 1e-9,
               dim_bounds: tuple[int, int] = (2, 4),
               fixed: Mapping[str, object] | None = None) -> Verdict:
    """Compare two diagrams in ``trials`` random models seeded ``seed, seed+1, ...``."""
    if d1.theory != d2.theory:
        raise TheoryError("diagrams belong to different theories")
    if d1.dom != d2.dom or d1.cod != d2.cod:
        raise TypeMismatchError("diagrams have different boundaries")
    if trials < 1:
        raise ValueError("trials must be positive")
    for k in range(trials):
        s = seed + k
        m = random_model(d1.theory, dim_bounds, s, fixed=fixed)
        a, b = evaluate(d1, m), evaluate(d2, m)
        dev = COMPLEX.distance(a.array, b.array)
        if dev > tol:
            return Verdict(False, k + 1, s, dev)
    return Verdict(True, trials)


def relation_tensor(pairs, dom_dim: int, cod_dim: int) -> np.ndarray:
    """Boolean matrix of a relation R ⊆ dom × cod, indexed [b, a] for (a, b) ∈ R."""
    out = np.zeros((cod_dim, dom_dim), dtype=bool)
    for a, b in pairs:
        out[b, a] = True
    return out
