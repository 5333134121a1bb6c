"""Contexts (abelian subalgebras of B(H)) and finite posets of them.

A context is stored as its partition of the identity into minimal
projectors; its projection lattice P(V) is the set of sums of minimals, which
the rest of the package encodes as frozensets of minimal indices ("patterns").
Inclusion of algebras V' <= V is refinement of partitions in the opposite
direction: every minimal of V' is a sum of minimals of V.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    DimensionMismatch,
    InvariantError,
    NonCommutingError,
    NotInAlgebra,
    UnknownName,
)
from .operators import (
    Projector,
    SelfAdjointOperator,
    commutator_norm,
    max_norm,
    spectral_decompose,
)
from .tolerance import KEY_DECIMALS, get_eps

DEFAULT_BLOCK_CAP = 6

Pattern = frozenset  # of minimal indices


def _round(x: float) -> float:
    return round(x, KEY_DECIMALS) + 0.0


def projector_key(p: Projector) -> tuple:
    return tuple(_round(z) for c in p.matrix.reshape(-1) for z in (c.real, c.imag))


class Context:
    """A finite partition of the identity into mutually orthogonal projectors."""

    def __init__(self, minimals: Iterable[Projector], label: str = ""):
        ms = list(minimals)
        if len(ms) < 2:
            raise InvariantError("a context needs at least two minimal projectors (trivial algebra excluded)")
        dim = ms[0].dim
        eps = get_eps()
        for m in ms:
            if m.dim != dim:
                raise DimensionMismatch("minimal projectors of a context must share a dimension")
            if m.is_zero():
                raise InvariantError("minimal projectors must be non-zero")
        for a, b in combinations(ms, 2):
            if max_norm(a.matrix @ b.matrix) > eps:
                raise InvariantError("minimal projectors are not mutually orthogonal")
        total = sum(m.matrix for m in ms)
        if max_norm(total - np.eye(dim)) > eps:
            raise InvariantError("minimal projectors do not sum to the identity")
        keyed = sorted(((projector_key(m), m) for m in ms), key=lambda t: t[0], reverse=True)
        self.minimals: tuple[Projector, ...] = tuple(m for _, m in keyed)
        self.key = tuple(k for k, _ in keyed)
        self.label = label

    @property
    def dim(self) -> int:
        return self.minimals[0].dim

    @property
    def size(self) -> int:
        return len(self.minimals)

    def __len__(self) -> int:
        return len(self.minimals)

    def __eq__(self, other):
        if not isinstance(other, Context):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Context({self.label or '?'}, dim={self.dim}, minimals={self.size})"

    def relabel(self, label: str) -> "Context":
        return Context(self.minimals, label)

    @cached_property
    def ranks(self) -> tuple[int, ...]:
        return tuple(m.rank for m in self.minimals)

    @cached_property
    def _stack(self) -> np.ndarray:
        return np.stack([m.matrix for m in self.minimals])

    def full(self) -> Pattern:
        return frozenset(range(self.size))

    def projector(self, pattern: Iterable[int]) -> Projector:
        """The element of P(V) that is the sum of the selected minimals."""
        idx = sorted(pattern)
        if not idx:
            return Projector.zero(self.dim)
        return Projector(self._stack[idx].sum(axis=0), check=False)

    def lattice(self) -> list[Pattern]:
        """All elements of P(V), as patterns, in a fixed order (by size, then lexicographic)."""
        out = []
        for r in range(self.size + 1):
            out.extend(frozenset(c) for c in combinations(range(self.size), r))
        return out

    def pattern_of(self, alpha: Projector) -> Pattern:
        """Inverse of :meth:`projector`; raises :class:`NotInAlgebra` for ``alpha`` outside P(V)."""
        if alpha.dim != self.dim:
            raise DimensionMismatch(f"dimension mismatch: {alpha.dim} vs {self.dim}")
        eps = get_eps()
        pattern = frozenset(
            i for i, q in enumerate(self.minimals)
            if max_norm(alpha.matrix @ q.matrix - q.matrix) <= eps
        )
        if max_norm(self.projector(pattern).matrix - alpha.matrix) > eps:
            raise NotInAlgebra(f"projector is not a sum of minimal projectors of context {self.label!r}")
        return pattern

    def contains(self, alpha: Projector) -> bool:
        try:
            self.pattern_of(alpha)
        except NotInAlgebra:
            return False
        return True


def context_from_commuting(ops, label: str = "") -> Context:
    """The context generated by a commuting family of self-adjoint operators.

    ``ops`` is a sequence of operators or a mapping from names to operators;
    the names are used when reporting a non-commuting pair. The minimals are
    the non-empty intersections of eigenspaces across the family.
    """
    if isinstance(ops, Mapping):
        named = list(ops.items())
    else:
        named = [(str(i), op) for i, op in enumerate(ops)]
    if not named:
        raise InvariantError("at least one operator is needed to generate a context")
    dim = named[0][1].dim
    for name, op in named:
        if op.dim != dim:
            raise DimensionMismatch(f"operator {name!r} has dimension {op.dim}, expected {dim}")
    eps = get_eps()
    for (na, a), (nb, b) in combinations(named, 2):
        norm = commutator_norm(a, b)
        if norm > eps:
            raise NonCommutingError(na, nb, norm)
    blocks = [np.eye(dim, dtype=complex)]
    for _, op in named:
        refined = []
        for block in blocks:
            for _, e in spectral_decompose(op):
                prod = block @ e.matrix
                if np.real(np.trace(prod)) > 0.5:
                    refined.append((prod + prod.conj().T) / 2)
        blocks = refined
    if len(blocks) < 2:
        raise InvariantError("operators generate the trivial algebra C*1, which is not a context")
    return Context([Projector(b) for b in blocks], label)


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items``; blocks keep the input order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _block_label(parent: str, blocks: list[list[int]]) -> str:
    inner = "|".join("+".join(str(i + 1) for i in b) for b in blocks)
    return f"{parent}[{inner}]"


def coarsenings(v: Context, block_cap: int = DEFAULT_BLOCK_CAP) -> list[Context]:
    """All proper non-trivial subalgebras of ``v``: one per set partition into >= 2 blocks."""
    if v.size > block_cap:
        raise CapExceeded(
            f"context {v.label!r} has {v.size} minimals, above the block cap {block_cap}; "
            "raise the cap to enumerate its coarsenings",
            bound=v.size,
        )
    out = []
    for part in set_partitions(list(range(v.size))):
        if len(part) < 2 or len(part) == v.size:
            continue
        blocks = sorted(sorted(b) for b in part)
        out.append(Context([v.projector(b) for b in blocks], _block_label(v.label, blocks)))
    out.sort(key=lambda c: c.key, reverse=True)
    out.sort(key=lambda c: -c.size)
    return out


def restriction_map(vp: Context, v: Context) -> tuple[int, ...] | None:
    """For ``vp <= v``, the index of the minimal of ``vp`` above each minimal of ``v``.

    Returns None when ``vp`` is not a subalgebra of ``v``.
    """
    if vp.dim != v.dim:
        raise DimensionMismatch(f"dimension mismatch: {vp.dim} vs {v.dim}")
    if vp.size > v.size:
        return None
    # tr(Q Q') equals rank(Q) exactly when Q <= Q'; this finds candidate parents cheaply
    overlap = np.real(np.einsum("bij,aji->ba", v._stack, vp._stack))
    ranks = np.array(v.ranks, dtype=float)
    parents = []
    for b in range(v.size):
        hits = np.flatnonzero(np.abs(overlap[b] - ranks[b]) < 1e-6)
        if len(hits) != 1:
            return None
        parents.append(int(hits[0]))
    eps = get_eps()
    for a in range(vp.size):
        children = [b for b, p in enumerate(parents) if p == a]
        if not children:
            return None
        if max_norm(v._stack[children].sum(axis=0) - vp.minimals[a].matrix) > eps:
            return None
    return tuple(parents)


def refines(vp: Context, v: Context) -> bool:
    """True iff ``vp`` is a subalgebra of ``v`` (every minimal of ``vp`` is a sum of minimals of ``v``)."""
    return restriction_map(vp, v) is not None


class ContextPoset:
    """A finite poset of contexts ordered by subalgebra inclusion.

    Contexts are deduplicated by their canonical key and stored in a canonical
    order (larger algebras first), so that integer indices are stable.
    """

    def __init__(self, contexts: Iterable[Context]):
        unique: dict[tuple, Context] = {}
        for c in contexts:
            unique.setdefault(c.key, c)
        if not unique:
            raise InvariantError("a context poset needs at least one context")
        dims = {c.dim for c in unique.values()}
        if len(dims) != 1:
            raise DimensionMismatch(f"contexts have inconsistent dimensions {sorted(dims)}")
        ordered = sorted(unique.values(), key=lambda c: c.key, reverse=True)
        ordered.sort(key=lambda c: -c.size)
        self.contexts: tuple[Context, ...] = tuple(ordered)
        self._index = {c.key: i for i, c in enumerate(self.contexts)}
        self._labels: dict[str, int] = {}
        for i, c in enumerate(self.contexts):
            if c.label:
                self._labels.setdefault(c.label, i)
        n = len(self.contexts)
        self._parents: dict[tuple[int, int], tuple[int, ...]] = {}
        below = [set() for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i == j:
                    pm = tuple(range(self.contexts[i].size))
                else:
                    pm = restriction_map(self.contexts[j], self.contexts[i])
                if pm is not None:
                    self._parents[(j, i)] = pm
                    below[i].add(j)
        self._below = tuple(frozenset(b) for b in below)
        self._above = tuple(frozenset(i for i in range(n) if j in self._below[i]) for j in range(n))

    @property
    def dim(self) -> int:
        return self.contexts[0].dim

    def __len__(self) -> int:
        return len(self.contexts)

    def __iter__(self):
        return iter(self.contexts)

    def __getitem__(self, i: int) -> Context:
        return self.contexts[i]

    def __repr__(self):
        return f"ContextPoset({len(self)} contexts, dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, ContextPoset):
            return NotImplemented
        return self is other or [c.key for c in self.contexts] == [c.key for c in other.contexts]

    def __hash__(self):
        return hash(tuple(c.key for c in self.contexts))

    @property
    def labels(self) -> list[str]:
        return [c.label or f"V{i}" for i, c in enumerate(self.contexts)]

    def label(self, i: int) -> str:
        return self.contexts[i].label or f"V{i}"

    def index(self, ref) -> int:
        """Index of a context given by index, label or Context."""
        if isinstance(ref, int):
            if not 0 <= ref < len(self):
                raise UnknownName(f"context index {ref} out of range")
            return ref
        if isinstance(ref, Context):
            try:
                return self._index[ref.key]
            except KeyError:
                raise UnknownName(f"context {ref.label!r} is not in the poset") from None
        if ref in self._labels:
            return self._labels[ref]
        raise UnknownName(f"unknown context label {ref!r}; known: {', '.join(self.labels)}")

    def find(self, context: Context) -> int | None:
        return self._index.get(context.key)

    def below(self, i: int) -> frozenset[int]:
        """Indices of the down-set of context ``i`` (including ``i``)."""
        return self._below[i]

    def above(self, j: int) -> frozenset[int]:
        return self._above[j]

    def leq(self, j: int, i: int) -> bool:
        """True iff context ``j`` is a subalgebra of context ``i``."""
        return j in self._below[i]

    def parent_map(self, j: int, i: int) -> tuple[int, ...]:
        """Restriction of minimals from stage ``i`` down to stage ``j``."""
        try:
            return self._parents[(j, i)]
        except KeyError:
            raise InvariantError(f"{self.label(j)} is not a subalgebra of {self.label(i)}") from None

    def edges(self) -> list[tuple[int, int]]:
        """All pairs ``(j, i)`` with ``j`` strictly below ``i``."""
        return sorted((j, i) for (j, i) in self._parents if j != i)

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Covering pairs ``(j, i)``: ``j < i`` with nothing strictly between."""
        out = []
        for j, i in self.edges():
            between = (self._below[i] & self._above[j]) - {i, j}
            if not between:
                out.append((j, i))
        return out

    def maximal(self) -> list[int]:
        return [i for i in range(len(self)) if self._above[i] == {i}]

    def is_down_closed(self, block_cap: int = DEFAULT_BLOCK_CAP) -> bool:
        for i, c in enumerate(self.contexts):
            for w in coarsenings(c, block_cap):
                j = self.find(w)
                if j is None or j not in self._below[i]:
                    return False
        return True

    def restrict_to(self, i: int) -> "ContextPoset":
        """The principal down-set of context ``i`` as a poset in its own right."""
        return ContextPoset(self.contexts[j] for j in sorted(self._below[i]))


def generate_poset(
    seeds: Sequence[Context],
    down_close: bool = True,
    block_cap: int = DEFAULT_BLOCK_CAP,
) -> ContextPoset:
    """Build a poset from seed contexts, optionally closed under coarsening.

    Seeds keep their labels; a coarsening is labelled after the first seed
    producing it, e.g. ``D3[1+2|3]``.
    """
    if not seeds:
        raise InvariantError("at least one seed context is required")
    dims = {s.dim for s in seeds}
    if len(dims) != 1:
        raise DimensionMismatch(f"seed contexts have inconsistent dimensions {sorted(dims)}")
    named = [s if s.label else s.relabel(f"V{k + 1}") for k, s in enumerate(seeds)]
    collected: dict[tuple, Context] = {}
    for s in named:
        collected.setdefault(s.key, s)
    if down_close:
        for s in named:
            for w in coarsenings(s, block_cap):
                collected.setdefault(w.key, w)
    return ContextPoset(collected.values())


def diagonal_context(dim: int, label: str = "") -> Context:
    return Context([Projector.basis_vector(dim, i) for i in range(dim)], label or f"D{dim}")


def basis_context(vectors, label: str = "") -> Context:
    """Context whose minimals project onto the given (orthogonal) vectors."""
    return Context([Projector.onto(v) for v in vectors], label)
