"""Seeded random operators, states, contexts, Borel sets and sub-objects for tests and sweeps."""

from __future__ import annotations

import numpy as np

from .borel import BorelSet, Interval
from .contexts import Context, ContextPoset
from .operators import DensityMatrix, Projector, SelfAdjointOperator, StateVector
from .subobjects import ClopenSubobject, restrict_image


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(dim: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_projector(dim: int, rng, rank: int | None = None) -> Projector:
    """Haar-random projector; the rank is drawn from 1..dim-1 unless given."""
    rng = rng_from(rng)
    if rank is None:
        rank = int(rng.integers(1, dim))
    u = random_unitary(dim, rng)
    return Projector.from_basis(u[:, :rank], dim)


def random_state(dim: int, rng) -> StateVector:
    rng = rng_from(rng)
    return StateVector(random_unitary(dim, rng)[:, 0])


def random_density(dim: int, rng, rank: int | None = None) -> DensityMatrix:
    rng = rng_from(rng)
    rank = dim if rank is None else rank
    u = random_unitary(dim, rng)[:, :rank]
    w = rng.dirichlet(np.ones(rank))
    m = (u * w) @ u.conj().T
    return DensityMatrix((m + m.conj().T) / 2)


def random_hermitian(dim: int, rng, levels: int | None = None) -> SelfAdjointOperator:
    """``U diag(v) U^dagger`` with integer eigenvalues in ``0..levels-1`` (degeneracy likely)."""
    rng = rng_from(rng)
    levels = dim if levels is None else levels
    u = random_unitary(dim, rng)
    values = rng.integers(0, levels, size=dim).astype(float)
    m = (u * values) @ u.conj().T
    return SelfAdjointOperator((m + m.conj().T) / 2)


def random_basis_context(dim: int, rng, label: str = "") -> Context:
    u = random_unitary(dim, rng)
    return Context([Projector.from_basis(u[:, [k]], dim) for k in range(dim)], label)


def random_borel(rng, lo: float = -1.0, hi: float = 3.0, pieces: int | None = None) -> BorelSet:
    """A union of up to three intervals with random endpoint openness.

    Endpoints are drawn on a half-integer grid so that they regularly land on
    integer eigenvalues and exercise the endpoint semantics.
    """
    rng = rng_from(rng)
    pieces = int(rng.integers(1, 4)) if pieces is None else pieces
    grid = np.arange(lo, hi + 0.25, 0.5)
    out = []
    for _ in range(pieces):
        a, b = sorted(rng.choice(grid, size=2))
        out.append(Interval(float(a), float(b), bool(rng.integers(2)), bool(rng.integers(2))))
    return BorelSet(tuple(out))


def random_subobject(poset: ContextPoset, rng, density: float = 0.5) -> ClopenSubobject:
    """A random clopen sub-object: contexts filled largest first, each component a
    random superset of the images forced from above."""
    rng = rng_from(rng)
    comps: dict[int, frozenset] = {}
    for j in range(len(poset)):
        need = set()
        for i in comps:
            if i != j and poset.leq(j, i):
                need |= restrict_image(poset, comps[i], j, i)
        extra = {k for k in range(poset[j].size) if rng.random() < density}
        comps[j] = frozenset(need | extra)
    return ClopenSubobject(poset, tuple(comps[j] for j in range(len(poset))))
