"""Model files: operators, states and context seeds in versioned JSON.

Complex entries are written ``[re, im]``; a bare number is read as real. A
model may carry a ``classical`` block describing a finite classical system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .contexts import DEFAULT_BLOCK_CAP, ContextPoset, context_from_commuting, generate_poset
from .errors import DaseinizerError, ModelError, UnknownName
from .operators import DensityMatrix, SelfAdjointOperator, State, StateVector
from .tolerance import tolerance
from .truth import ClassicalModel

SCHEMA_VERSION = 1

_number = {"type": "number"}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_VECTOR = {"type": "array", "items": _complex, "minItems": 1}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 1}

MODEL_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["schemaVersion", "dim"],
    "additionalProperties": False,
    "properties": {
        "schemaVersion": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "operators": {"type": "object", "additionalProperties": _MATRIX},
        "states": {"type": "object", "additionalProperties": _VECTOR},
        "densities": {"type": "object", "additionalProperties": _MATRIX},
        "contexts": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "blockCap": {"type": "integer", "minimum": 1},
                "downClose": {"type": "boolean"},
            },
        },
        "classical": {
            "type": "object",
            "required": ["states", "quantities"],
            "additionalProperties": False,
            "properties": {
                "states": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "quantities": {
                    "type": "object",
                    "additionalProperties": {"type": "object", "additionalProperties": _number},
                },
            },
        },
    },
}

BUNDLED = ("model-d2", "model-d3", "model-cabello4", "model-classical10")


def _matrix(data, what: str, dim: int) -> np.ndarray:
    m = np.array([[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row] for row in data])
    if m.shape != (dim, dim):
        raise ModelError(f"{what} has shape {m.shape}, expected ({dim}, {dim})")
    return m


def _vector_of(data, what: str, dim: int) -> np.ndarray:
    v = np.array([complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in data])
    if v.shape != (dim,):
        raise ModelError(f"{what} has length {v.shape[0]}, expected {dim}")
    return v


@dataclass
class Model:
    name: str
    dim: int
    operators: dict[str, SelfAdjointOperator]
    states: dict[str, State]
    seeds: list[list[str]]
    tolerance: float | None = None
    block_cap: int = DEFAULT_BLOCK_CAP
    down_close: bool = True
    classical: ClassicalModel | None = None
    _poset: ContextPoset | None = field(default=None, repr=False)

    def operator(self, name: str) -> SelfAdjointOperator:
        try:
            return self.operators[name]
        except KeyError:
            raise UnknownName(f"unknown operator {name!r}; defined: {', '.join(sorted(self.operators)) or 'none'}") from None

    def state(self, name: str) -> State:
        try:
            return self.states[name]
        except KeyError:
            raise UnknownName(f"unknown state {name!r}; defined: {', '.join(sorted(self.states)) or 'none'}") from None

    def poset(self) -> ContextPoset:
        if self._poset is None:
            if not self.seeds:
                raise ModelError(f"model {self.name!r} declares no context seeds")
            seeds = [
                context_from_commuting({n: self.operator(n) for n in names}, "+".join(names))
                for names in self.seeds
            ]
            self._poset = generate_poset(seeds, down_close=self.down_close, block_cap=self.block_cap)
        return self._poset


def parse_model(data: dict, name: str = "model") -> Model:
    try:
        jsonschema.validate(data, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ModelError(f"{name}: schema violation at {where}: {exc.message}") from None
    dim = data["dim"]
    opts = data.get("options", {})
    tol = opts.get("tolerance")

    def build():
        ops = {}
        for k, m in sorted(data.get("operators", {}).items()):
            ops[k] = SelfAdjointOperator(_matrix(m, f"operator {k!r}", dim))
        states: dict[str, State] = {}
        for k, v in sorted(data.get("states", {}).items()):
            states[k] = StateVector(_vector_of(v, f"state {k!r}", dim), normalise=True)
        for k, m in sorted(data.get("densities", {}).items()):
            if k in states:
                raise ModelError(f"{name}: name {k!r} is used for both a state and a density")
            states[k] = DensityMatrix(_matrix(m, f"density {k!r}", dim))
        return ops, states

    try:
        if tol is not None:
            with tolerance(tol):
                ops, states = build()
        else:
            ops, states = build()
    except ModelError:
        raise
    except DaseinizerError as exc:
        raise ModelError(f"{name}: {exc}") from None
    seeds = [list(s) for s in data.get("contexts", [])]
    for s in seeds:
        for n in s:
            if n not in ops:
                raise ModelError(f"{name}: context seed refers to undefined operator {n!r}")
    classical = None
    if "classical" in data:
        c = data["classical"]
        classical = ClassicalModel(tuple(c["states"]), {k: dict(v) for k, v in c["quantities"].items()})
    return Model(
        name=data.get("name", name),
        dim=dim,
        operators=ops,
        states=states,
        seeds=seeds,
        tolerance=tol,
        block_cap=opts.get("blockCap", DEFAULT_BLOCK_CAP),
        down_close=opts.get("downClose", True),
        classical=classical,
    )


def load_model(ref: str | Path) -> Model:
    """Load a model from a path, or a bundled model by name (``model-d3`` or ``model-d3.json``)."""
    path = Path(ref)
    if path.exists():
        text = path.read_text()
        name = path.stem
    else:
        stem = path.name[:-5] if path.name.endswith(".json") else path.name
        if stem not in BUNDLED:
            raise ModelError(f"no model file {str(ref)!r}; bundled models: {', '.join(BUNDLED)}")
        text = resources.files("daseinizer").joinpath("data").joinpath(f"{stem}.json").read_text()
        name = stem
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{name}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_model(data, name)
