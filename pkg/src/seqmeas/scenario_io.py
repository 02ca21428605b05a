"""JSON scenario documents and canonical rendering of labels and numbers.

Document layout::

    {
      "dim_a": 2, "dim_b": 2,
      "initial": [[re, im], ...],            # length dim_a*dim_b, A slow
      "steps": [
        {"model": "separate" | "functional" | "skip",
         "observable": {"kind": "pauli_pair", "theta": r, "phi": r}
                     | {"kind": "custom", "joint": [{"a": .., "b": ..,
                        "vector": [[re, im], ...]}, ...]},
         "f": "product" | {"table": [{"a": .., "b": .., "value": ..}, ...]}}
      ]
    }

Structural problems raise ScenarioParseError with the offending key path;
documents that parse but violate a numeric invariant raise the matching
domain error, also tagged with the key path.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from .errors import ScenarioParseError, SeqmeasError
from .hilbert import StateVector
from .measurement import (
    Label,
    MeasurementStep,
    Model,
    OutcomeSequence,
    Scenario,
)
from .observables import (
    CommutingPair,
    JointVector,
    pair_from_locals,
    pauli_direction,
    table_function,
)


def format_float(x: float) -> str:
    """Canonical 12-significant-digit rendering."""
    s = "%.12g" % float(x)
    return "0" if s == "-0" else s


def format_label(label: Label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(format_float(v) for v in label) + ")"
    return format_float(label)


def format_sequence(seq: OutcomeSequence) -> str:
    return ";".join(format_label(label) for label in seq)


def label_to_json(label: Label):
    if isinstance(label, tuple):
        return [float(v) for v in label]
    return float(label)


def _complex_to_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _fail(path: str, reason: str):
    raise ScenarioParseError(f"{path}: {reason}")


def _get(doc: dict, key: str, path: str):
    if key not in doc:
        _fail(path, f"missing key {key!r}")
    return doc[key]


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _as_positive_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        _fail(path, f"expected a positive integer, got {value!r}")
    return value


def _as_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected a list, got {type(value).__name__}")
    return value


def _parse_complex(value, path: str) -> complex:
    pair = _as_list(value, path)
    if len(pair) != 2:
        _fail(path, f"expected [re, im], got {len(pair)} entries")
    return complex(_as_number(pair[0], f"{path}[0]"), _as_number(pair[1], f"{path}[1]"))


@contextmanager
def _domain(path: str):
    """Re-raise a domain error with the document location prepended."""
    try:
        yield
    except ScenarioParseError:
        raise
    except SeqmeasError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def _parse_state(value, path: str, expected_dim: int) -> StateVector:
    rows = _as_list(value, path)
    if len(rows) != expected_dim:
        _fail(path, f"expected {expected_dim} amplitudes, got {len(rows)}")
    amps = [_parse_complex(row, f"{path}[{i}]") for i, row in enumerate(rows)]
    with _domain(path):
        return StateVector(amps)


def _parse_observable(value, path: str, dim_a: int, dim_b: int) -> CommutingPair:
    doc = _as_mapping(value, path)
    kind = _get(doc, "kind", path)
    if kind == "pauli_pair":
        if (dim_a, dim_b) != (2, 2):
            _fail(path, "pauli_pair requires dim_a = dim_b = 2")
        theta = _as_number(_get(doc, "theta", path), f"{path}.theta")
        phi = _as_number(_get(doc, "phi", path), f"{path}.phi")
        with _domain(path):
            return pair_from_locals(pauli_direction(theta), pauli_direction(phi))
    if kind == "custom":
        rows = _as_list(_get(doc, "joint", path), f"{path}.joint")
        joint = []
        for i, row in enumerate(rows):
            rpath = f"{path}.joint[{i}]"
            entry = _as_mapping(row, rpath)
            a = _as_number(_get(entry, "a", rpath), f"{rpath}.a")
            b = _as_number(_get(entry, "b", rpath), f"{rpath}.b")
            vector = _parse_state(
                _get(entry, "vector", rpath), f"{rpath}.vector", dim_a * dim_b
            )
            joint.append(JointVector(a, b, vector))
        with _domain(f"{path}.joint"):
            return CommutingPair(tuple(joint))
    _fail(f"{path}.kind", f"unknown observable kind {kind!r}")


def _parse_f(value, path: str):
    if value == "product":
        return "product"
    doc = _as_mapping(value, path)
    rows = _as_list(_get(doc, "table", path), f"{path}.table")
    table = []
    for i, row in enumerate(rows):
        rpath = f"{path}.table[{i}]"
        entry = _as_mapping(row, rpath)
        table.append(
            (
                _as_number(_get(entry, "a", rpath), f"{rpath}.a"),
                _as_number(_get(entry, "b", rpath), f"{rpath}.b"),
                _as_number(_get(entry, "value", rpath), f"{rpath}.value"),
            )
        )
    return table_function(table)


def _parse_step(value, path: str, dim_a: int, dim_b: int) -> MeasurementStep:
    doc = _as_mapping(value, path)
    model = _get(doc, "model", path)
    if model not in (m.value for m in Model):
        _fail(f"{path}.model", f"unknown model {model!r}")
    model = Model(model)
    if model is Model.SKIP:
        if "observable" in doc or "f" in doc:
            _fail(path, "skip steps take no observable and no f")
        return MeasurementStep(Model.SKIP)
    pair = _parse_observable(_get(doc, "observable", path), f"{path}.observable",
                             dim_a, dim_b)
    if model is Model.SEPARATE:
        if "f" in doc:
            _fail(path, "separate steps take no f")
        with _domain(path):
            return MeasurementStep(Model.SEPARATE, pair)
    if "f" not in doc:
        _fail(path, "functional steps need an f")
    f = _parse_f(doc["f"], f"{path}.f")
    with _domain(path):
        return MeasurementStep(Model.FUNCTIONAL, pair, f)


def scenario_from_dict(doc: Any) -> Scenario:
    """Build a Scenario from a parsed JSON document."""
    top = _as_mapping(doc, "$")
    dim_a = _as_positive_int(_get(top, "dim_a", "$"), "$.dim_a")
    dim_b = _as_positive_int(_get(top, "dim_b", "$"), "$.dim_b")
    initial = _parse_state(_get(top, "initial", "$"), "$.initial", dim_a * dim_b)
    rows = _as_list(_get(top, "steps", "$"), "$.steps")
    if not rows:
        _fail("$.steps", "scenario needs at least one step")
    steps = [
        _parse_step(row, f"$.steps[{i}]", dim_a, dim_b) for i, row in enumerate(rows)
    ]
    with _domain("$"):
        return Scenario(initial, tuple(steps))


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def _step_to_dict(step: MeasurementStep) -> dict:
    if step.model is Model.SKIP:
        return {"model": "skip"}
    joint = [
        {"a": jv.a, "b": jv.b, "vector": [_complex_to_json(z) for z in jv.vector.amps]}
        for jv in step.pair.joint
    ]
    out = {"model": step.model.value,
           "observable": {"kind": "custom", "joint": joint}}
    if step.model is Model.FUNCTIONAL:
        if step.f == "product":
            out["f"] = "product"
        else:
            # arbitrary callables are frozen into a table over the joint pairs
            out["f"] = {
                "table": [
                    {"a": jv.a, "b": jv.b, "value": fv}
                    for jv, fv in zip(step.pair.joint, step.fobs.fvalues)
                ]
            }
    return out


def scenario_to_dict(
    scn: Scenario, dim_a: int | None = None, dim_b: int | None = None
) -> dict:
    """Serialize a Scenario to the document layout.

    The (dim_a, dim_b) factorization is presentation metadata; when not
    given, the whole space is written as particle A with a trivial B.
    """
    if dim_a is None or dim_b is None:
        dim_a, dim_b = scn.dim, 1
    if dim_a * dim_b != scn.dim:
        raise ScenarioParseError(
            f"dim_a*dim_b = {dim_a * dim_b} does not match dimension {scn.dim}"
        )
    return {
        "dim_a": dim_a,
        "dim_b": dim_b,
        "initial": [_complex_to_json(z) for z in scn.initial.amps],
        "steps": [_step_to_dict(step) for step in scn.steps],
    }


def dump_scenario(scn: Scenario, path: str | Path, **dims) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scn, **dims), indent=2) + "\n")
