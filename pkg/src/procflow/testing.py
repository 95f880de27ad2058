"""Random diagrams, unitaries and channels for property tests and demos."""
from __future__ import annotations

import numpy as np

from .diagram import (Diagram, box, cap, compose_par, compose_seq, cup, dagger, identity,
                      partial_trace, swap, transpose)
from .theory import VARIANTS, Theory


def default_theory() -> Theory:
    """Two wire types and a spread of box shapes, including states, effects and a scalar."""
    return Theory.build(["A", "B"], {
        "f": (["A"], ["A"]),
        "g": (["A", "B"], ["A"]),
        "h": (["A"], ["A", "B"]),
        "k": (["B"], ["A"]),
        "m": (["A", "A"], ["A", "B"]),
        "s": ([], ["A"]),
        "e": (["B"], []),
        "lam": ([], []),
    })


def _around(T: Theory, left, d: Diagram, right) -> Diagram:
    return compose_par(compose_par(identity(T, left), d), identity(T, right))


def random_diagram(theory: Theory, rng: np.random.Generator, steps: int = 6, dom=None,
                   bent: bool = True, traces: bool = True, variants: bool = True,
                   max_width: int = 5) -> Diagram:
    """Grow a diagram by stacking random layers on top of ``dom``.

    With ``bent=False`` and ``traces=False`` the result is always a circuit.
    A given ``dom`` is kept: only input-free pieces are placed alongside,
    and no traces or final reflection are applied.
    """
    T = theory
    fixed = dom is not None
    traces = traces and not fixed
    if dom is None:
        dom = [str(rng.choice(T.types)) for _ in range(int(rng.integers(0, 3)))]
    d = identity(T, dom)
    gens = list(T.generators)
    for _ in range(steps):
        cod = list(d.cod)
        actions = ["box", "box", "box", "swap"]
        if bent:
            actions += ["cup", "cap"]
        if traces:
            actions += ["trace"]
        action = str(rng.choice(actions))
        if action == "box":
            g = gens[int(rng.integers(len(gens)))]
            v = VARIANTS[int(rng.integers(4))] if variants else VARIANTS[0]
            piece = box(T, g.name, v)
            spots = [i for i in range(len(cod) - len(piece.dom) + 1)
                     if tuple(cod[i:i + len(piece.dom)]) == piece.dom]
            if spots and len(cod) - len(piece.dom) + len(piece.cod) <= max_width:
                i = spots[int(rng.integers(len(spots)))]
                d = compose_seq(_around(T, cod[:i], piece, cod[i + len(piece.dom):]), d)
            elif len(cod) + len(piece.cod) <= max_width and not (fixed and piece.dom):
                d = compose_par(d, piece) if rng.random() < 0.5 else compose_par(piece, d)
        elif action == "swap" and len(cod) >= 2:
            i = int(rng.integers(len(cod) - 1))
            d = compose_seq(_around(T, cod[:i], swap(T, cod[i], cod[i + 1]), cod[i + 2:]), d)
        elif action == "cup" and len(cod) + 2 <= max_width:
            t = str(rng.choice(T.types))
            i = int(rng.integers(len(cod) + 1))
            d = compose_seq(_around(T, cod[:i], cup(T, t), cod[i:]), d)
        elif action == "cap":
            spots = [i for i in range(len(cod) - 1) if cod[i] == cod[i + 1]]
            if spots:
                i = spots[int(rng.integers(len(spots)))]
                d = compose_seq(_around(T, cod[:i], cap(T, cod[i]), cod[i + 2:]), d)
        elif action == "trace":
            pairs = [(o, i) for o, a in enumerate(d.cod) for i, b in enumerate(d.dom) if a == b]
            if pairs:
                o, i = pairs[int(rng.integers(len(pairs)))]
                d = partial_trace(d, o, i)
    if bent and not fixed and rng.random() < 0.2:
        d = transpose(d) if rng.random() < 0.5 else dagger(d)
    return d


def random_circuit(theory: Theory, rng: np.random.Generator, steps: int = 6, dom=None) -> Diagram:
    return random_diagram(theory, rng, steps, dom, bent=False, traces=False)


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish isometry ``cols -> rows`` from a QR decomposition."""
    if rows < cols:
        raise ValueError("an isometry cannot have fewer rows than columns")
    q, r = np.linalg.qr(random_complex(rng, rows, cols))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return random_isometry(d, d, rng)


def random_kraus(din: int, dout: int, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``n`` Kraus operators ``din -> dout`` with Σ K†K = I."""
    V = random_isometry(dout * n, din, rng) if dout * n >= din else None
    if V is None:
        raise ValueError("need dout * n >= din for a trace-preserving Kraus set")
    return [V.reshape(dout, n, din)[:, i, :] for i in range(n)]


def stinespring_tensor(kraus: list[np.ndarray]) -> np.ndarray:
    """Tensor for a generator ``A -> B ⊗ E`` (axes b, e, a) realising a Kraus set."""
    return np.stack(kraus, axis=1)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = random_complex(rng, d, rank or d)
    rho = g @ g.conj().T
    return rho / np.trace(rho)
