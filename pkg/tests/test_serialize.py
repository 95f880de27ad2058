import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from procflow.diagram import box, cap, compose_par, compose_seq, cup, identity
from procflow.doubling import discard, double, from_purification, q_equal
from procflow.equality import equal
from procflow.errors import ModelError, ParseError, TheoryError, TypeMismatchError
from procflow.serialize import Document, dump_diagram, dumps, parse_document
from procflow.tensor import evaluate, random_model
from procflow.testing import default_theory, random_diagram

seeds = st.integers(0, 2**32 - 1)

THEORY = {"types": ["A", "B"], "generators": {"f": {"dom": ["A"], "cod": ["B"]},
                                              "g": {"dom": ["B"], "cod": ["A"]}}}


def doc(diagram, **extra):
    return json.dumps({"schema": "procflow/v1", "theory": THEORY, "diagram": diagram, **extra})


def test_compose_order_is_application_order():
    d = parse_document(doc({"op": "compose", "args": [{"op": "box", "name": "f"},
                                                      {"op": "box", "name": "g"}]})).main
    T = d.theory
    assert equal(d, compose_seq(box(T, "g"), box(T, "f")))


def test_every_operator_parses():
    nodes = [
        {"op": "id", "types": ["A"]},
        {"op": "swap", "types": ["A", "B"]},
        {"op": "permutation", "types": ["A", "B"], "perm": [1, 0]},
        {"op": "cup", "type": "A"},
        {"op": "cap", "type": "A"},
        {"op": "tensor", "args": [{"op": "box", "name": "f"}, {"op": "box", "name": "g"}]},
        {"op": "dagger", "arg": {"op": "box", "name": "f"}},
        {"op": "transpose", "arg": {"op": "box", "name": "f"}},
        {"op": "conjugate", "arg": {"op": "box", "name": "f", "variant": "adjoint"}},
        {"op": "trace", "arg": {"op": "id", "types": ["A"]}},
        {"op": "trace", "arg": {"op": "swap", "types": ["A", "A"]}, "out": 0, "in": 1},
        {"op": "double", "arg": {"op": "box", "name": "f"}},
        {"op": "discard", "types": ["A", "B"]},
        {"op": "purified", "arg": {"op": "tensor", "args": [{"op": "id", "types": ["A"]},
                                                              {"op": "box", "name": "f"}]},
         "env": ["B"]},
    ]
    for n in nodes:
        parse_document(doc(n))


def test_named_diagrams_and_refs():
    text = json.dumps({"schema": "procflow/v1", "theory": THEORY, "diagrams": {
        "a": {"op": "box", "name": "f"},
        "b": {"op": "compose", "args": [{"op": "ref", "name": "a"}, {"op": "box", "name": "g"}]}}})
    d = parse_document(text)
    assert set(d.diagrams) == {"a", "b"}
    bad = json.dumps({"schema": "procflow/v1", "theory": THEORY,
                      "diagrams": {"a": {"op": "ref", "name": "a"}}})
    with pytest.raises(ParseError):
        parse_document(bad)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_document('{\n  "schema": "procflow/v1",\n  "theory": }')
    assert (err.value.line, err.value.column) == (3, 13)  # the stray brace


@pytest.mark.parametrize("text", [
    '[]',
    '{"schema": "procflow/v2", "theory": {"types": [], "generators": {}}}',
    '{"schema": "procflow/v1"}',
    json.dumps({"schema": "procflow/v1", "theory": THEORY, "diagram": {"op": "frobnicate"}}),
    json.dumps({"schema": "procflow/v1", "theory": THEORY, "diagram": {"op": "box"}}),
    json.dumps({"schema": "procflow/v1", "theory": THEORY,
                "diagram": {"op": "box", "name": "f", "variant": "sideways"}}),
])
def test_schema_errors(text):
    with pytest.raises(ParseError):
        parse_document(text)


def test_type_errors():
    with pytest.raises(TypeMismatchError):
        parse_document(doc({"op": "compose", "args": [{"op": "box", "name": "f"},
                                                      {"op": "box", "name": "f"}]}))
    with pytest.raises(TheoryError):
        parse_document(doc({"op": "box", "name": "h"}))
    with pytest.raises(TypeMismatchError):
        parse_document(doc({"op": "tensor", "args": [{"op": "double", "arg": {"op": "id", "types": ["A"]}},
                                                     {"op": "id", "types": ["A"]}]}))
    with pytest.raises(TypeMismatchError):
        parse_document(doc({"op": "transpose", "arg": {"op": "discard", "types": ["A"]}}))


def test_model_parsing():
    model = {"dims": {"A": 2, "B": 1},
             "tensors": {"f": [[[1, 0], [0, 2]]], "g": [[3], [4]]}}
    d = parse_document(doc({"op": "box", "name": "f"}, model=model))
    assert np.array_equal(d.model.tensors["f"], [[1, 2j]])
    assert np.array_equal(d.model.tensors["g"], [[3], [4]])
    with pytest.raises(ParseError):
        parse_document(doc({"op": "box", "name": "f"},
                           model={"dims": {"A": 2, "B": 1}, "tensors": {"f": [1, 2, 3]}}))
    with pytest.raises(ModelError):
        parse_document(doc({"op": "box", "name": "f"},
                           model={"dims": {"A": 2, "B": 1}, "tensors": {"f": [[1, 2]]}}))


def test_boolean_model():
    text = json.dumps({"schema": "procflow/v1",
                       "theory": {"types": ["X"], "generators": {"R": {"dom": ["X"], "cod": ["X"]}}},
                       "diagram": {"op": "box", "name": "R"},
                       "model": {"semiring": "boolean", "dims": {"X": 2},
                                 "tensors": {"R": [[True, False], [True, True]]}}})
    d = parse_document(text)
    assert evaluate(d.main, d.model).array.dtype == bool


@given(seeds)
def test_round_trip_diagrams(seed):
    T = default_theory()
    d = random_diagram(T, np.random.default_rng(seed), 6)
    again = parse_document(dump_diagram(d)).main
    assert equal(again, d)


@given(seeds)
def test_round_trip_quantum(seed):
    rng = np.random.default_rng(seed)
    T = default_theory()
    f = random_diagram(T, rng, 4)
    k = int(rng.integers(0, len(f.cod) + 1))
    q = from_purification(f, f.cod[len(f.cod) - k:])
    assert q_equal(parse_document(dump_diagram(q)).main, q)


@given(seeds)
def test_round_trip_model(seed):
    T = default_theory()
    m = random_model(T, (1, 3), seed)
    d = random_diagram(T, np.random.default_rng(seed), 4)
    back = parse_document(dumps(Document(T, {"main": d}, m)))
    assert back.model.dims == m.dims
    assert np.allclose(evaluate(back.main, back.model).array, evaluate(d, m).array, atol=0)
