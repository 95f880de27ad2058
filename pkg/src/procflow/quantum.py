"""Numerical checks of quantum-theoretic properties of doubled diagrams.

Conventions.  A doubled wire carries legs (conjugate, original).  For a
density matrix ρ the doubled state tensor at legs (ā, a) is ρ[a, ā], so
``superoperator`` is the column-stacking superoperator Σ conj(K) ⊗ K.
Choi matrices are indexed [(a, b), (a', b')] with the input system first
and use the unnormalised cup Σᵢ|ii⟩.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagram import Diagram, box, compose_seq, cups, dagger
from .doubling import (QDiagram, discard, double, q_compose_par, q_compose_seq, q_identity,
                       q_permutation)
from .errors import ArityError, NonCausalError, NotCompletelyPositiveError
from .tensor import BOOLEAN, Model, Tensor, evaluate, relation_tensor
from .theory import Theory

# --- channel representations ------------------------------------------------------


def channel_tensor(f: QDiagram, m: Model) -> Tensor:
    """Tensor of the doubled base diagram; legs come in (conjugate, original) pairs."""
    return evaluate(f.base, m)


def _legs_split(arr: np.ndarray, n_cod_q: int, n_dom_q: int) -> np.ndarray:
    # axes c0 o0 c1 o1 ... | dom legs  ->  conj legs, orig legs | dom conj legs, dom orig legs
    cod = list(range(2 * n_cod_q))
    dom = [2 * n_cod_q + k for k in range(2 * n_dom_q)]
    order = cod[0::2] + cod[1::2] + dom[0::2] + dom[1::2]
    return np.transpose(arr, order)


def superoperator(f: QDiagram, m: Model) -> np.ndarray:
    """Column-stacking superoperator, shape (dim(qcod)², dim(qdom)²)."""
    t = channel_tensor(f, m)
    arr = _legs_split(t.array, len(f.qcod), len(f.qdom))
    dout, din = m.dim(f.qcod), m.dim(f.qdom)
    return arr.reshape(dout * dout, din * din)


def apply_channel(f: QDiagram, m: Model, rho: np.ndarray) -> np.ndarray:
    s = superoperator(f, m)
    dout = m.dim(f.qcod)
    vec = np.asarray(rho).T.reshape(-1)
    return (s @ vec).reshape(dout, dout).T


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    matrix: np.ndarray
    dim_in: int
    dim_out: int

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(_hermitian_part(self.matrix)).min())


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: tuple[np.ndarray, ...]
    dim_in: int
    dim_out: int

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.operators)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.operators)

    def __len__(self):
        return len(self.operators)


def choi(f: QDiagram, m: Model) -> ChoiMatrix:
    """Process-state duality: feed half of a doubled cup through ``f``."""
    if not f.qdom and not f.qcod:
        raise ArityError("a scalar has no Choi matrix")
    T = f.theory
    state = q_compose_seq(q_compose_par(q_identity(T, f.qdom), f), double(cups(T, f.qdom)))
    t = channel_tensor(state, m)
    n = len(state.qcod)
    arr = np.transpose(t.array, list(range(1, 2 * n, 2)) + list(range(0, 2 * n, 2)))
    din, dout = m.dim(f.qdom), m.dim(f.qcod)
    return ChoiMatrix(arr.reshape(din * dout, din * dout), din, dout)


def choi_of_kraus(kraus: KrausSet | Sequence[np.ndarray]) -> ChoiMatrix:
    ops = kraus.operators if isinstance(kraus, KrausSet) else tuple(kraus)
    dout, din = ops[0].shape
    vecs = [k.T.reshape(-1) for k in ops]  # (I ⊗ K)|Φ⟩ indexed [a, b]
    mat = sum(np.outer(v, v.conj()) for v in vecs)
    return ChoiMatrix(mat, din, dout)


def _hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def kraus_from_choi(c: ChoiMatrix, cutoff: float = 1e-10) -> KrausSet:
    """Kraus operators from the spectral decomposition of a Choi matrix.

    Eigenvalues are taken in descending order and each eigenvector's phase
    is fixed so its largest-magnitude entry is real positive.
    """
    if not c.is_hermitian(1e-9):
        raise ValueError("Choi matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(_hermitian_part(c.matrix))
    if vals.min() < -cutoff:
        raise NotCompletelyPositiveError(
            f"Choi matrix has eigenvalue {vals.min():.3g}; the map is not completely positive",
            float(vals.min()))
    ops = []
    for k in np.argsort(-vals, kind="stable"):
        if vals[k] <= cutoff:
            continue
        v = _fix_phase(vecs[:, k])
        ops.append(math.sqrt(vals[k]) * v.reshape(c.dim_in, c.dim_out).T)
    if not ops:
        ops.append(np.zeros((c.dim_out, c.dim_in), dtype=complex))
    return KrausSet(tuple(ops), c.dim_in, c.dim_out)


@dataclass(frozen=True, eq=False)
class Dilation:
    """``V: A -> B ⊗ E`` with ``V[(b, i), a] = Kᵢ[b, a]``."""

    V: np.ndarray
    env_dim: int
    kraus: KrausSet
    isometry_error: float
    reconstruction_error: float


def stinespring(f: QDiagram, m: Model, cutoff: float = 1e-10, tol: float = 1e-9) -> Dilation:
    if not is_causal(f, m, tol):
        raise NonCausalError("Stinespring dilation needs a causal process")
    c = choi(f, m)
    kraus = kraus_from_choi(c, cutoff)
    r = len(kraus)
    V = np.stack(kraus.operators, axis=1).reshape(c.dim_out * r, c.dim_in)
    iso_err = float(np.max(np.abs(V.conj().T @ V - np.eye(c.dim_in))))
    # discard the environment of V ρ V† on every matrix unit, compare with the channel
    s = superoperator(f, m)
    err = 0.0
    for a, b in itertools.product(range(c.dim_in), repeat=2):
        rho = np.zeros((c.dim_in, c.dim_in), dtype=complex)
        rho[a, b] = 1
        big = (V @ rho @ V.conj().T).reshape(c.dim_out, r, c.dim_out, r)
        out = np.einsum("bici->bc", big)
        want = (s @ rho.T.reshape(-1)).reshape(c.dim_out, c.dim_out).T
        err = max(err, float(np.max(np.abs(out - want))))
    return Dilation(V, r, kraus, iso_err, err)


# --- causality and isometries ------------------------------------------------------


def causality_deviation(f: QDiagram, m: Model) -> float:
    T = f.theory
    lhs = q_compose_seq(discard(T, f.qcod), f)
    rhs = discard(T, f.qdom)
    a, b = evaluate(lhs.base, m), evaluate(rhs.base, m)
    return float(np.max(np.abs(a.array - b.array), initial=0.0))


def is_causal(f: QDiagram, m: Model, tol: float = 1e-9) -> bool:
    """Discarding every output equals discarding every input."""
    return causality_deviation(f, m) <= tol


def is_discard(effect: QDiagram, m: Model, tol: float = 1e-9) -> bool:
    if effect.qcod:
        raise ArityError("expected an effect (no quantum outputs)")
    a = channel_tensor(effect, m).array
    b = channel_tensor(discard(effect.theory, effect.qdom), m).array
    return float(np.max(np.abs(a - b), initial=0.0)) <= tol


def is_isometry(f: Diagram, m: Model, tol: float = 1e-9) -> bool:
    F = evaluate(f, m).matrix()
    rows, cols = F.shape
    if rows < cols:
        return False
    return bool(np.max(np.abs(F.conj().T @ F - np.eye(cols)), initial=0.0) <= tol)


def is_unitary(f: Diagram, m: Model, tol: float = 1e-9) -> bool:
    F = evaluate(f, m).matrix()
    if F.shape[0] != F.shape[1]:
        return False
    return is_isometry(f, m, tol) and bool(
        np.max(np.abs(F @ F.conj().T - np.eye(F.shape[0])), initial=0.0) <= tol)


@dataclass(frozen=True)
class PureCausalReport:
    causal: bool
    isometry: bool

    @property
    def consistent(self) -> bool:
        return self.causal == self.isometry


def check_theorem_pure_causal(f: Diagram, m: Model, tol: float = 1e-9) -> PureCausalReport:
    """Pure ``double(f)`` is causal exactly when ``f`` is an isometry."""
    return PureCausalReport(is_causal(double(f), m, tol), is_isometry(f, m, tol))


def born(psi: Diagram, effect: Diagram, m: Model) -> complex:
    """Probability-like scalar of a doubled state meeting a doubled effect."""
    q = q_compose_seq(double(effect), double(psi))
    return complex(evaluate(q.base, m).scalar())


# --- bipartite states ----------------------------------------------------------------


def reduced_state(rho: np.ndarray, dims: tuple[int, int], side: str = "left") -> np.ndarray:
    """Partial trace of a state on A ⊗ B, keeping ``side`` ("left" = A)."""
    rho = np.asarray(rho)
    da, db = dims
    if rho.shape != (da * db, da * db):
        raise ValueError(f"expected a {da * db}x{da * db} matrix, got {rho.shape}")
    r = rho.reshape(da, db, da, db)
    if side == "left":
        return np.einsum("ajbj->ab", r)
    if side == "right":
        return np.einsum("iaib->ab", r)
    raise ValueError("side must be 'left' or 'right'")


def purity_defect(rho: np.ndarray) -> float:
    """Second-largest over largest eigenvalue magnitude; 0 for rank one."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("purity_defect needs a square matrix")
    mags = np.sort(np.abs(np.linalg.eigvalsh(_hermitian_part(rho))))[::-1]
    if len(mags) < 2:
        return 0.0
    if mags[0] == 0:
        raise ValueError("zero matrix has no defined purity")
    return float(mags[1] / mags[0])


def split_if_pure_marginal(rho: np.ndarray, dims: tuple[int, int], tol: float = 1e-9):
    """Factor ρ as ρ_A ⊗ |φ⟩⟨φ| when its B-marginal is pure, else return None."""
    rho = np.asarray(rho)
    rho_b = reduced_state(rho, dims, "right")
    if purity_defect(rho_b) > tol:
        return None
    vals, vecs = np.linalg.eigh(_hermitian_part(rho_b))
    phi = _fix_phase(vecs[:, int(np.argmax(np.abs(vals)))])
    rho_a = reduced_state(rho, dims, "left")
    residual = np.max(np.abs(rho - np.kron(rho_a, np.outer(phi, phi.conj()))))
    if residual > 1e-8:
        return None
    return rho_a, phi


# --- broadcasting --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BroadcastReport:
    left_marginal_ok: bool
    right_marginal_ok: bool
    left_deviation: float
    right_deviation: float
    # marginal applied to |+⟩⟨+| minus |+⟩⟨+|, for each side
    left_coherence_error: np.ndarray = field(repr=False, default=None)
    right_coherence_error: np.ndarray = field(repr=False, default=None)

    @property
    def broadcasts(self) -> bool:
        return self.left_marginal_ok and self.right_marginal_ok

    def off_diagonal_discrepancy(self) -> float:
        worst = 0.0
        for err in (self.left_coherence_error, self.right_coherence_error):
            off = err - np.diag(np.diag(err))
            worst = max(worst, float(np.max(np.abs(off), initial=0.0)))
        return worst


def check_broadcast(delta: QDiagram, m: Model, tol: float = 1e-9) -> BroadcastReport:
    """Does discarding either output of ``delta`` leave the identity channel?"""
    if len(delta.qdom) != 1 or len(delta.qcod) != 2 or set(delta.qcod) != set(delta.qdom):
        raise ArityError("a broadcasting candidate maps one quantum wire A to A ⊗ A")
    T = delta.theory
    (a,) = delta.qdom
    ident = superoperator(q_identity(T, [a]), m)
    keep_left = q_compose_seq(q_compose_par(q_identity(T, [a]), discard(T, a)), delta)
    keep_right = q_compose_seq(q_compose_par(discard(T, a), q_identity(T, [a])), delta)
    d = m.dims[a]
    plus = np.full((d, d), 1 / d, dtype=complex)
    devs, errs = [], []
    for marginal in (keep_left, keep_right):
        devs.append(float(np.max(np.abs(superoperator(marginal, m) - ident))))
        errs.append(apply_channel(marginal, m, plus) - plus)
    return BroadcastReport(devs[0] <= tol, devs[1] <= tol, devs[0], devs[1], errs[0], errs[1])


# --- no-signalling -------------------------------------------------------------------


@dataclass(frozen=True)
class NoSignallingReport:
    ok: bool
    deviation: float

    def __bool__(self):
        return self.ok


def check_no_signalling(rho: QDiagram, phiA: QDiagram, phiB: QDiagram, m: Model,
                        tol: float = 1e-8, require_causal: bool = True) -> NoSignallingReport:
    """Aleks' input must factor out of Bob's view once Aleks' outputs are discarded.

    ``rho`` is a state on [A, B]; ``phiA`` takes [A] + Aleks' local inputs,
    ``phiB`` takes [B] + Bob's local inputs.
    """
    T = rho.theory
    if rho.qdom or len(rho.qcod) != 2:
        raise ArityError("rho must be a state on two quantum wires")
    sa, sb = rho.qcod
    if not phiA.qdom or phiA.qdom[0] != sa or not phiB.qdom or phiB.qdom[0] != sb:
        raise ArityError("phiA and phiB must take the shared systems as their first input")
    if require_causal:
        for name, phi in (("phiA", phiA), ("phiB", phiB)):
            if not is_causal(phi, m, 1e-9):
                raise NonCausalError(f"{name} is not causal")
    xa, xb = phiA.qdom[1:], phiB.qdom[1:]
    # [A, B] + xa + xb  ->  [A] + xa + [B] + xb
    na = len(xa)
    perm = [0] + [2 + k for k in range(na)] + [1] + [2 + na + k for k in range(len(xb))]
    prepared = q_compose_seq(q_permutation(T, (sa, sb) + xa + xb, perm),
                             q_compose_par(rho, q_identity(T, xa + xb)))
    composite = q_compose_seq(q_compose_par(phiA, phiB), prepared)
    seen_by_bob = q_compose_seq(q_compose_par(discard(T, phiA.qcod), q_identity(T, phiB.qcod)),
                                composite)
    rho_b = q_compose_seq(q_compose_par(discard(T, sa), q_identity(T, [sb])), rho)
    bob = q_compose_seq(phiB, q_compose_par(rho_b, q_identity(T, xb)))
    factored = q_compose_par(discard(T, xa), bob)
    a = channel_tensor(seen_by_bob, m).array
    b = channel_tensor(factored, m).array
    dev = float(np.max(np.abs(a - b), initial=0.0))
    return NoSignallingReport(dev <= tol, dev)


# --- relations -----------------------------------------------------------------------


def boolean_separable(M: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Exhaustively look for boolean vectors with M = ψ φᵀ; return them or None."""
    M = np.asarray(M, dtype=bool)
    rows, cols = M.shape
    for psi in itertools.product((False, True), repeat=rows):
        for phi in itertools.product((False, True), repeat=cols):
            if np.array_equal(np.outer(psi, phi), M):
                return np.array(psi), np.array(phi)
    return None


@dataclass(frozen=True, eq=False)
class RelDaggerReport:
    relation: np.ndarray
    composite: np.ndarray
    relation_separable: bool
    composite_separable: bool

    @property
    def axiom_holds(self) -> bool:
        return self.relation_separable == self.composite_separable


REL_COUNTEREXAMPLE = ((0, 0), (0, 1), (1, 1))


def rel_theory() -> Theory:
    return Theory.build(["X"], {"R": (["X"], ["X"])})


def check_rel_dagger_axiom(pairs=REL_COUNTEREXAMPLE, size: int = 2) -> RelDaggerReport:
    """Test the reflection axiom (f separable iff f†∘f separable) on a relation."""
    T = rel_theory()
    m = Model(T, {"X": size}, {"R": relation_tensor(pairs, size, size)}, BOOLEAN)
    r = box(T, "R")
    R = evaluate(r, m).matrix()
    RdR = evaluate(compose_seq(dagger(r), r), m).matrix()
    return RelDaggerReport(R, RdR, boolean_separable(R) is not None,
                           boolean_separable(RdR) is not None)
