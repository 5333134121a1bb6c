"""Regenerate the bundled model files under src/daseinizer/data."""

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "daseinizer" / "data"

CABELLO = [
    ["0001", "0010", "1100", "1-100"],
    ["0001", "0100", "1010", "10-10"],
    ["1-11-1", "1-1-11", "1100", "0011"],
    ["1-11-1", "1111", "10-10", "010-1"],
    ["0010", "0100", "1001", "100-1"],
    ["1-1-11", "1111", "100-1", "01-10"],
    ["11-11", "111-1", "1-100", "0011"],
    ["11-11", "-1111", "1010", "010-1"],
    ["111-1", "-1111", "1001", "01-10"],
]


def vec(code):
    out, sign = [], 1
    for ch in code:
        if ch == "-":
            sign = -1
            continue
        out.append(sign * int(ch))
        sign = 1
    return np.array(out, dtype=float)


def real_matrix(m):
    return [[round(float(x), 12) + 0.0 for x in row] for row in np.real(m)]


def observable(vectors):
    m = np.zeros((len(vectors[0]),) * 2)
    for k, v in enumerate(vectors):
        m += k * np.outer(v, v) / v.dot(v)
    return m


def write(name, data):
    (OUT / f"{name}.json").write_text(json.dumps(data, indent=2) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("model-d2", {
        "schemaVersion": 1,
        "name": "qubit",
        "description": "Spin-1/2 with the two contexts generated by sigma_z and sigma_x.",
        "dim": 2,
        "operators": {"Z": [[1, 0], [0, -1]], "X": [[0, 1], [1, 0]]},
        "states": {"up": [1, 0], "plus": [1, 1], "i": [1, [0, 1]]},
        "densities": {"mixed": [[0.5, 0], [0, 0.5]]},
        "contexts": [["Z"], ["X"]],
    })
    write("model-d3", {
        "schemaVersion": 1,
        "name": "diagonal qutrit",
        "description": "A = diag(0,1,2) and its coarsenings; P projects onto (1,1,0)/sqrt2.",
        "dim": 3,
        "operators": {
            "A": [[0, 0, 0], [0, 1, 0], [0, 0, 2]],
            "P": [[0.5, 0.5, 0], [0.5, 0.5, 0], [0, 0, 0]],
        },
        "states": {"psi1": [1, 0, 0], "psi2": [1, 1, 0], "psi3": [0, 0, 1]},
        "densities": {
            "rho1": [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0]],
            "rho2": [[0.3, 0, 0], [0, 0.7, 0], [0, 0, 0]],
        },
        "contexts": [["A"]],
    })
    ops = {}
    for k, basis in enumerate(CABELLO, start=1):
        vs = [vec(c) for c in basis]
        g = np.array([[a.dot(b) for b in vs] for a in vs])
        assert np.allclose(g, np.diag(np.diag(g))), basis
        ops[f"B{k}"] = real_matrix(observable(vs))
    write("model-cabello4", {
        "schemaVersion": 1,
        "name": "Cabello 18 vectors",
        "description": "Nine orthogonal bases of R^4 built from 18 rays, each ray in exactly two bases.",
        "dim": 4,
        "operators": ops,
        "states": {"e1": [1, 0, 0, 0], "up": [1, 1, 1, 1]},
        "contexts": [[f"B{k}"] for k in range(1, 10)],
    })
    write("model-classical10", {
        "schemaVersion": 1,
        "name": "ten-state classical system",
        "description": "Classical states s0..s9 with A(s_k) = k, mirrored by a diagonal quantum A.",
        "dim": 10,
        "operators": {"A": real_matrix(np.diag(np.arange(10.0)))},
        "states": {f"psi{k}": [1 if j == k else 0 for j in range(10)] for k in range(10)},
        "contexts": [["A"]],
        "options": {"downClose": False},
        "classical": {
            "states": [f"s{k}" for k in range(10)],
            "quantities": {"A": {f"s{k}": k for k in range(10)}, "parity": {f"s{k}": k % 2 for k in range(10)}},
        },
    })


if __name__ == "__main__":
    main()
