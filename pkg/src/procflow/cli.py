"""Command-line front end.

    procflow eval FILE [--model PATH|random:SEED] [--dims A=2,...] [--json]
    procflow eq FILE1 FILE2 [--mode structural|numeric] [--trials N] [--seed S]
    procflow analyze FILE --check causal|isometry|unitary|stinespring|broadcast|nosignal
    procflow demo teleport|rel-counterexample|no-broadcast|phases|all

Exit codes: 0 ok / equal / pass, 1 distinct / fail, 2 parse error,
3 type error, 4 model or theory mismatch.  The default seed is 0, or
$PROCFLOW_SEED when set; ``--seed`` wins over both.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import demos
from .diagram import Diagram
from .doubling import QDiagram, double, q_equal
from .equality import equal
from .errors import (ArityError, InvalidDiagramError, ModelError, NonCausalError, ParseError,
                     TheoryError, TypeMismatchError)
from .quantum import (check_broadcast, check_no_signalling, causality_deviation, stinespring)
from .serialize import Document, array_to_json, load
from .tensor import Model, evaluate, prob_equiv, random_model

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_TYPE, EXIT_MODEL = 0, 1, 2, 3, 4


class Mismatch(Exception):
    """Theories or models that do not belong together (exit 4)."""


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("PROCFLOW_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"PROCFLOW_SEED must be an integer, got {env!r}") from None
    return 0


def _parse_dims(text: str | None) -> dict[str, int]:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        name, _, value = item.partition("=")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise ParseError(f"bad --dims entry {item!r}, expected TYPE=INT") from None
    return out


def resolve_model(doc: Document, source: str | None, seed: int, dims: dict[str, int]) -> Model:
    """The model named by ``--model``, else the file's own model, else a random one."""
    if source is None and doc.model is not None and not dims:
        return doc.model
    if source is None or source.startswith("random"):
        if source and source != "random":
            head, _, tail = source.partition(":")
            try:
                seed = int(tail)
            except ValueError:
                raise ParseError(f"bad model source {source!r}, expected random:SEED") from None
        unknown = set(dims) - set(doc.theory.types)
        if unknown:
            raise Mismatch(f"--dims names undeclared types {sorted(unknown)}")
        return random_model(doc.theory, (2, 4), seed, dims=dims)
    other = load(source)
    if other.model is None:
        raise Mismatch(f"{source} has no model section")
    if other.theory != doc.theory:
        raise Mismatch(f"model file {source} declares a different theory")
    return other.model


def _complex_text(arr: np.ndarray, tol: float) -> str:
    arr = np.asarray(arr)
    if arr.dtype == bool:
        return np.array2string(arr.astype(int))
    if np.all(np.abs(arr.imag) <= tol):
        arr = arr.real
    return np.array2string(np.where(np.abs(arr) <= tol, 0, arr), precision=6, suppress_small=True)


def _emit(report: dict[str, Any], as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, default=_json_default))
        return
    for key, value in report.items():
        if isinstance(value, np.ndarray):
            print(f"{key}:\n{_complex_text(value, 1e-12)}")
        else:
            print(f"{key}: {value}")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return array_to_json(obj, "boolean" if obj.dtype == bool else "complex")
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# --- commands -----------------------------------------------------------------------


def cmd_eval(args) -> int:
    doc = load(args.file)
    d = doc.main
    m = resolve_model(doc, args.model, resolve_seed(args.seed), _parse_dims(args.dims))
    base = d.base if isinstance(d, QDiagram) else d
    t = evaluate(base, m)
    report: dict[str, Any] = {
        "dom": list(base.dom),
        "cod": list(base.cod),
        "shape": list(t.shape),
        "loops": len(base.loops),
        "semiring": m.semiring.name,
    }
    if t.is_scalar:
        v = t.array.item()
        report["value"] = (bool(v) if m.semiring.name == "boolean" else
                           (v.real if abs(v.imag) <= args.tol else [v.real, v.imag]))
    report["entries"] = t.array
    if not args.json and t.is_scalar:
        report.pop("entries")
    _emit(report, args.json)
    return EXIT_OK


def _pair(args):
    a, b = load(args.file1), load(args.file2)
    if a.theory != b.theory:
        raise Mismatch("the two files declare different theories")
    d1, d2 = a.main, b.main
    if isinstance(d1, QDiagram) != isinstance(d2, QDiagram):
        raise TypeMismatchError("cannot compare a quantum diagram with a base diagram")
    return d1, d2


def cmd_eq(args) -> int:
    d1, d2 = _pair(args)
    report: dict[str, Any] = {"mode": args.mode}
    if args.mode == "structural":
        same = q_equal(d1, d2) if isinstance(d1, QDiagram) else equal(d1, d2)
    else:
        b1 = d1.base if isinstance(d1, QDiagram) else d1
        b2 = d2.base if isinstance(d2, QDiagram) else d2
        if b1.dom != b2.dom or b1.cod != b2.cod:
            same = False
            report["reason"] = "different boundaries"
        else:
            v = prob_equiv(b1, b2, trials=args.trials, seed=resolve_seed(args.seed), tol=args.tol)
            same = v.equivalent
            report["trials"] = v.trials
            if not same:
                report["witness_seed"] = v.witness_seed
                report["deviation"] = v.deviation
    report["verdict"] = "equal" if same else "distinct"
    _emit(report, args.json)
    return EXIT_OK if same else EXIT_FAIL


def _quantum(d) -> QDiagram:
    return d if isinstance(d, QDiagram) else double(d)


def _pure(d) -> Diagram:
    if isinstance(d, QDiagram):
        if not d.is_pure:
            raise ArityError("isometry checks need a pure process, this one discards an environment")
        return d.pure
    return d


def _violations(err: np.ndarray, tol: float) -> list[list]:
    idx = np.argwhere(np.abs(err) > tol)
    return [[int(i), int(j), float(err[i, j].real), float(err[i, j].imag)] for i, j in idx]


def cmd_analyze(args) -> int:
    doc = load(args.file)
    m = resolve_model(doc, args.model, resolve_seed(args.seed), _parse_dims(args.dims))
    tol = args.tol
    check = args.check
    report: dict[str, Any] = {"check": check}
    ok = False
    if check == "causal":
        dev = causality_deviation(_quantum(doc.main), m)
        ok = dev <= tol
        report["deviation"] = dev
    elif check in ("isometry", "unitary"):
        M = evaluate(_pure(doc.main), m).matrix()
        dev = float(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[1])), initial=0.0))
        report["isometry_deviation"] = dev
        ok = dev <= tol
        if check == "unitary":
            co = float(np.max(np.abs(M @ M.conj().T - np.eye(M.shape[0])), initial=0.0))
            report["coisometry_deviation"] = co
            ok = ok and M.shape[0] == M.shape[1] and co <= tol
    elif check == "stinespring":
        try:
            dil = stinespring(_quantum(doc.main), m, tol=tol)
        except NonCausalError as e:
            report["status"] = "fail"
            report["reason"] = f"precondition: {e}"
            _emit(report, args.json)
            return EXIT_FAIL
        report["env_dim"] = dil.env_dim
        report["isometry_error"] = dil.isometry_error
        report["reconstruction_error"] = dil.reconstruction_error
        report["V"] = dil.V
        ok = dil.isometry_error <= max(tol, 1e-9) and dil.reconstruction_error <= max(tol, 1e-8)
    elif check == "broadcast":
        rep = check_broadcast(_quantum(doc.main), m, tol)
        ok = rep.broadcasts
        report["left_deviation"] = rep.left_deviation
        report["right_deviation"] = rep.right_deviation
        report["off_diagonal_discrepancy"] = rep.off_diagonal_discrepancy()
        report["left_violations"] = _violations(rep.left_coherence_error, tol)
        report["right_violations"] = _violations(rep.right_coherence_error, tol)
    elif check == "nosignal":
        missing = [k for k in ("rho", "phiA", "phiB") if k not in doc.diagrams]
        if missing:
            raise ArityError(f"nosignal needs diagrams named rho, phiA, phiB; missing {missing}")
        try:
            rep = check_no_signalling(*(_quantum(doc.diagrams[k]) for k in ("rho", "phiA", "phiB")),
                                      m, tol=max(tol, 1e-8))
        except NonCausalError as e:
            report["status"] = "fail"
            report["reason"] = f"precondition: {e}"
            _emit(report, args.json)
            return EXIT_FAIL
        ok = rep.ok
        report["deviation"] = rep.deviation
    report = {"check": check, "status": "pass" if ok else "fail", **report}
    _emit(report, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_demo(args) -> int:
    names = list(demos.DEMOS) if args.name == "all" else [args.name]
    ok = True
    for name in names:
        r = demos.run_demo(name, seed=resolve_seed(args.seed))
        print(f"== {name}")
        print("\n".join(r.lines))
        print(f"-> {'success' if r.ok else 'FAILURE'}")
        ok &= r.ok
    return EXIT_OK if ok else EXIT_FAIL


# --- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="procflow", description="Evaluate and compare process diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=True):
        sp.add_argument("--seed", type=int, default=None, help="random seed (default $PROCFLOW_SEED or 0)")
        sp.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if model:
            sp.add_argument("--model", default=None, help="model file, or random:SEED")
            sp.add_argument("--dims", default=None, help="pin random-model dimensions, e.g. A=2,B=3")

    ev = sub.add_parser("eval", help="evaluate a diagram to a tensor")
    ev.add_argument("file")
    common(ev)
    ev.set_defaults(func=cmd_eval)

    eq = sub.add_parser("eq", help="compare two diagrams")
    eq.add_argument("file1")
    eq.add_argument("file2")
    eq.add_argument("--mode", choices=["structural", "numeric"], default="structural")
    eq.add_argument("--trials", type=int, default=20)
    common(eq, model=False)
    eq.set_defaults(func=cmd_eq)

    an = sub.add_parser("analyze", help="run a quantum analysis")
    an.add_argument("file")
    an.add_argument("--check", required=True,
                    choices=["causal", "isometry", "unitary", "stinespring", "broadcast", "nosignal"])
    common(an)
    an.set_defaults(func=cmd_analyze)

    de = sub.add_parser("demo", help="run a scripted demonstration")
    de.add_argument("name", choices=[*demos.DEMOS, "all"])
    de.add_argument("--seed", type=int, default=None)
    de.set_defaults(func=cmd_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"parse error: cannot read {e.filename}: {e.strerror}", file=sys.stderr)
        return EXIT_PARSE
    except (Mismatch, ModelError) as e:
        print(f"model or theory mismatch: {e}", file=sys.stderr)
        return EXIT_MODEL
    except (TypeMismatchError, TheoryError, InvalidDiagramError, ArityError) as e:
        print(f"type error: {e}", file=sys.stderr)
        return EXIT_TYPE


if __name__ == "__main__":
    sys.exit(main())
