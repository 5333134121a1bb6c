"""Brute-force reference computations, kept independent of the fast paths.

Each function here recomputes a quantity straight from its definition with
only matrices and plain loops, so the tests can compare two routes.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .contexts import Context
from .operators import Projector, proj_leq
from .presheaf import Presheaf


def outer_by_search(p: Projector, v: Context) -> Projector:
    """Smallest element of P(V) above P, by scanning all 2^k elements."""
    above = [v.projector(a) for a in v.lattice() if proj_leq(p, v.projector(a))]
    best = min(above, key=lambda q: q.rank)
    assert all(proj_leq(best, q) for q in above), "upper bounds have no least element"
    return best


def inner_by_search(p: Projector, v: Context) -> Projector:
    """Largest element of P(V) below P, by scanning all 2^k elements."""
    below = [v.projector(a) for a in v.lattice() if proj_leq(v.projector(a), p)]
    best = max(below, key=lambda q: q.rank)
    assert all(proj_leq(q, best) for q in below), "lower bounds have no greatest element"
    return best


def count_sections_by_product(presheaf: Presheaf) -> int:
    """Global sections by enumerating the full product of stalks (small posets only)."""
    p = presheaf.poset
    stalks = [list(presheaf.stalk(i)) for i in range(len(p))]
    edges = p.edges()
    count = 0
    for choice in product(*stalks):
        if all(presheaf.restrict(j, i, choice[i]) == choice[j] for j, i in edges):
            count += 1
    return count


def _ray_key(v: np.ndarray) -> tuple:
    v = np.asarray(v, dtype=complex)
    k = int(np.flatnonzero(np.abs(v) > 1e-9)[0])
    v = v / v[k]
    v = v / np.linalg.norm(v)
    return tuple(np.round(np.concatenate([v.real, v.imag]), 6))


def ks_colourings(bases: Sequence[Sequence[Iterable[float]]]) -> int:
    """Number of value assignments that mark exactly one vector per basis, with
    each ray marked consistently across all bases containing it."""
    keyed = [[_ray_key(np.array(list(v), dtype=float)) for v in b] for b in bases]
    count = 0
    for picks in product(*[range(len(b)) for b in keyed]):
        marked = {keyed[k][i] for k, i in enumerate(picks)}
        if all(sum(1 for r in b if r in marked) == 1 for b in keyed):
            count += 1
    return count


def ks_parity_obstruction(bases: Sequence[Sequence[Iterable[float]]]) -> bool:
    """The counting argument: if every ray lies in an even number of bases and the
    number of bases is odd, no colouring can exist."""
    keyed = [[_ray_key(np.array(list(v), dtype=float)) for v in b] for b in bases]
    multiplicity: dict[tuple, int] = {}
    for b in keyed:
        for r in b:
            multiplicity[r] = multiplicity.get(r, 0) + 1
    return len(bases) % 2 == 1 and all(m % 2 == 0 for m in multiplicity.values())
