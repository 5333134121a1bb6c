"""DOT and JSON renderings of posets, sub-objects, truth objects and truth values.

All output is deterministic: keys sorted, numbers rounded to the canonical
key precision, contexts in poset order.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .contexts import ContextPoset
from .presheaf import GlobalOmegaElement, Sieve
from .subobjects import ClopenSubobject
from .tolerance import KEY_DECIMALS
from .truth import TruthObject

SCHEMA_VERSION = 1


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(poset: ContextPoset, highlight: Sieve | None = None, title: str = "contexts") -> str:
    """Hasse diagram with the maximal contexts at the top.

    Edges run from a subalgebra up to its cover; ``rankdir=BT`` then puts the
    coarse contexts at the bottom. Members of ``highlight`` are filled.
    """
    lines = [f"digraph {_quote(title)} {{", "  rankdir=BT;", '  node [shape=box, fontname="Helvetica"];']
    members = highlight.members if highlight is not None else frozenset()
    for i, v in enumerate(poset):
        attrs = [f"label={_quote(v.label)}"]
        if i in members:
            attrs.append('style=filled, fillcolor="lightblue"')
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for j, i in poset.hasse_edges():
        lines.append(f"  n{j} -> n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _entry(z: complex) -> list[float]:
    re, im = round(float(z.real), KEY_DECIMALS), round(float(z.imag), KEY_DECIMALS)
    return [re + 0.0, im + 0.0]  # folds -0.0 into 0.0


def matrix_json(m: np.ndarray) -> list[list[list[float]]]:
    return [[_entry(z) for z in row] for row in m]


def poset_json(poset: ContextPoset) -> dict[str, Any]:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "dim": poset.dim,
        "contexts": [
            {"label": v.label, "minimals": [matrix_json(q.matrix) for q in v.minimals]}
            for v in poset
        ],
        "hasse": [[poset.label(j), poset.label(i)] for j, i in poset.hasse_edges()],
        "restrictions": [
            {"from": poset.label(i), "to": poset.label(j), "parents": list(poset.parent_map(j, i))}
            for j, i in poset.edges()
        ],
    }


def subobject_json(s: ClopenSubobject) -> dict[str, Any]:
    return {"schemaVersion": SCHEMA_VERSION, "subobject": s.as_dict()}


def omega_json(value: GlobalOmegaElement) -> dict[str, Any]:
    return {"schemaVersion": SCHEMA_VERSION, "truthValue": value.as_dict()}


def truth_object_json(t: TruthObject) -> dict[str, Any]:
    return {"schemaVersion": SCHEMA_VERSION, "truthObject": t.as_dict()}


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
