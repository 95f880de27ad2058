"""Process theories as port graphs.

Diagrams are built from generator boxes, identities, swaps, cups and caps,
compared up to deformation, evaluated as tensor networks, and doubled
into quantum processes for causality and channel analysis.
"""
from .circuits import (Cell, bent_wires, directed_cycles, is_circuit, layer_decompose, recompose,
                       render_layers)
from .diagram import (BOUNDARY, Diagram, Port, box, braid, cap, caps, compose_par, compose_seq,
                      compose_seq_all, conjugate, cup, cups, dagger, empty, identity, partial_trace,
                      permutation, swap, tensor_all, trace, transpose, transpose_by_bending,
                      wire_kind)
from .doubling import (CANCELLABLE, QDiagram, discard, double, from_purification, maximally_mixed,
                       phase_between, purify, q_compose_par, q_compose_seq, q_dagger, q_equal,
                       q_identity, q_permutation, q_tensor_all)
from .equality import CanonicalForm, canonical_form, equal
from .errors import (ArityError, InvalidDiagramError, ModelError, NonCausalError,
                     NotACircuitError, NotCompletelyPositiveError, ParseError, ProcflowError,
                     TheoryError, TypeMismatchError, UnknownGeneratorError)
from .quantum import (ChoiMatrix, Dilation, KrausSet, apply_channel, born, check_broadcast,
                      check_no_signalling, check_rel_dagger_axiom, check_theorem_pure_causal, choi,
                      choi_of_kraus, is_causal, is_discard, is_isometry, is_unitary,
                      kraus_from_choi, reduced_state, split_if_pure_marginal, stinespring,
                      superoperator)
from .tensor import (BOOLEAN, COMPLEX, Model, Semiring, Tensor, Verdict, evaluate, numeric_equal,
                     prob_equiv, random_model)
from .theory import ADJOINT, CONJUGATE, ORIGINAL, TRANSPOSE, BoxVariant, Generator, Theory

__version__ = "0.1.0"
