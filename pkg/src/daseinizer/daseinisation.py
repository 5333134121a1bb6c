"""Outer and inner daseinisation, the presheaves G and H, and their global elements.

The outer daseinisation of P at V is the smallest element of P(V) above P.
Because P(V) is generated by the minimals of V, it is the sum of exactly those
minimals that are not orthogonal to P; dually the inner daseinisation is the
sum of the minimals lying under P. Both rules are O(k) in the number of
minimals instead of a search over all 2^k elements of P(V).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .contexts import Context, ContextPoset, Pattern
from .errors import DimensionMismatch, InvariantError, PosetMismatch
from .operators import Projector, max_norm, proj_eq, proj_meet
from .presheaf import CheckResult, Presheaf, check_natural
from .tolerance import get_eps

Flavor = Literal["outer", "inner"]

_cache: dict[tuple, Pattern] = {}
_cache_lock = threading.Lock()
_CACHE_LIMIT = 200_000


def _support(p: Projector, v: Context, kind: str) -> Pattern:
    if p.dim != v.dim:
        raise DimensionMismatch(f"dimension mismatch: projector {p.dim} vs context {v.dim}")
    key = (kind, p.matrix.tobytes(), v.key, get_eps())
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    eps = get_eps()
    m = p.matrix
    if kind == "outer":
        pattern = frozenset(i for i, q in enumerate(v.minimals) if max_norm(q.matrix @ m) > eps)
    else:
        pattern = frozenset(
            i for i, q in enumerate(v.minimals) if max_norm(m @ q.matrix - q.matrix) <= eps
        )
    with _cache_lock:
        if len(_cache) >= _CACHE_LIMIT:
            _cache.clear()
        _cache[key] = pattern
    return pattern


def outer_support(p: Projector, v: Context) -> Pattern:
    """Pattern of the outer daseinisation: minimals of ``v`` with ``Q P != 0``."""
    return _support(p, v, "outer")


def inner_support(p: Projector, v: Context) -> Pattern:
    """Pattern of the inner daseinisation: minimals of ``v`` with ``Q <= P``."""
    return _support(p, v, "inner")


def outer_at(p: Projector, v: Context) -> Projector:
    return v.projector(outer_support(p, v))


def inner_at(p: Projector, v: Context) -> Projector:
    return v.projector(inner_support(p, v))


def outer_restrict(poset: ContextPoset, j: int, i: int, alpha: Pattern) -> Pattern:
    """G's restriction: outer daseinisation of an element of P(V_i) into V_j."""
    parents = poset.parent_map(j, i)
    return frozenset(parents[b] for b in alpha)


def inner_restrict(poset: ContextPoset, j: int, i: int, alpha: Pattern) -> Pattern:
    """H's restriction: inner daseinisation of an element of P(V_i) into V_j."""
    parents = poset.parent_map(j, i)
    covered = set(range(poset[j].size))
    for b, a in enumerate(parents):
        if b not in alpha:
            covered.discard(a)
    return frozenset(covered)


class OuterPresheaf(Presheaf):
    """G: the projection lattice at each stage, restricted by outer daseinisation."""

    flavor = "outer"

    def stalk(self, i):
        return self.poset[i].lattice()

    def restrict(self, j, i, x):
        return outer_restrict(self.poset, j, i, x)


class InnerPresheaf(Presheaf):
    """H: as G, but restricted by inner daseinisation."""

    flavor = "inner"

    def stalk(self, i):
        return self.poset[i].lattice()

    def restrict(self, j, i, x):
        return inner_restrict(self.poset, j, i, x)


def _restrictor(flavor: str):
    return outer_restrict if flavor == "outer" else inner_restrict


@dataclass(frozen=True)
class GlobalElement:
    """A global element of G (``flavor="outer"``) or of H (``flavor="inner"``)."""

    poset: ContextPoset = field(compare=False, repr=False)
    components: tuple[Pattern, ...]
    flavor: str = "outer"

    def __post_init__(self):
        p = self.poset
        comps = tuple(frozenset(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != len(p):
            raise InvariantError("a global element needs one component per context")
        for i, c in enumerate(comps):
            if not c <= p[i].full():
                raise InvariantError(f"component at {p.label(i)} is not in P(V)")
        restrict = _restrictor(self.flavor)
        for j, i in p.edges():
            if restrict(p, j, i, comps[i]) != comps[j]:
                raise InvariantError(
                    f"not a global element: restriction from {p.label(i)} to {p.label(j)} "
                    "does not match the component there"
                )

    def __getitem__(self, i) -> Pattern:
        return self.components[i]

    def projector(self, i: int) -> Projector:
        return self.poset[i].projector(self.components[i])

    def reconstruct(self) -> Projector:
        """Meet of all components; gives back P when some context contains P."""
        out = self.projector(0)
        for i in range(1, len(self.poset)):
            out = proj_meet(out, self.projector(i))
        return out

    def as_hyper(self) -> "HyperElement":
        if self.flavor != "outer":
            raise InvariantError("only global elements of G are hyper-elements of G")
        return HyperElement(self.poset, self.components)

    def as_dict(self) -> dict[str, list[int]]:
        return {self.poset.label(i): sorted(c) for i, c in enumerate(self.components)}


@dataclass(frozen=True)
class HyperElement:
    """Stage-wise elements of G whose restrictions lie below the next component."""

    poset: ContextPoset = field(compare=False, repr=False)
    components: tuple[Pattern, ...]

    def __post_init__(self):
        p = self.poset
        comps = tuple(frozenset(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != len(p):
            raise InvariantError("a hyper-element needs one component per context")
        for j, i in p.edges():
            if not outer_restrict(p, j, i, comps[i]) <= comps[j]:
                raise InvariantError(
                    f"not a hyper-element: component at {p.label(j)} does not dominate "
                    f"the restriction from {p.label(i)}"
                )

    def __getitem__(self, i) -> Pattern:
        return self.components[i]

    def is_global(self) -> bool:
        p = self.poset
        return all(outer_restrict(p, j, i, self.components[i]) == self.components[j] for j, i in p.edges())


def daseinise_global(p: Projector, poset: ContextPoset, flavor: Flavor = "outer") -> GlobalElement:
    support = outer_support if flavor == "outer" else inner_support
    return GlobalElement(poset, tuple(support(p, v) for v in poset), flavor)


def _check_pair(a, b) -> None:
    if a.poset is not b.poset and a.poset != b.poset:
        raise PosetMismatch("elements live over different context posets")
    if getattr(a, "flavor", "outer") != getattr(b, "flavor", "outer"):
        raise PosetMismatch("cannot combine elements of G and H")


def global_leq(g1: GlobalElement, g2: GlobalElement) -> bool:
    _check_pair(g1, g2)
    return all(a <= b for a, b in zip(g1.components, g2.components))


def global_join(g1: GlobalElement, g2: GlobalElement) -> GlobalElement:
    """Stage-wise join; the constructor certifies the result is again global."""
    _check_pair(g1, g2)
    return GlobalElement(g1.poset, tuple(a | b for a, b in zip(g1.components, g2.components)), g1.flavor)


def global_order_join(g1: GlobalElement, g2: GlobalElement) -> tuple[bool, GlobalElement]:
    return global_leq(g1, g2), global_join(g1, g2)


def componentwise_meet(g1, g2) -> HyperElement:
    """Stage-wise meet of two elements of G; in general only a hyper-element."""
    _check_pair(g1, g2)
    return HyperElement(g1.poset, tuple(a & b for a, b in zip(g1.components, g2.components)))


def hyper_ops(h1: HyperElement, h2: HyperElement) -> tuple[HyperElement, HyperElement]:
    """Stage-wise (meet, join) of two hyper-elements."""
    _check_pair(h1, h2)
    meet = HyperElement(h1.poset, tuple(a & b for a, b in zip(h1.components, h2.components)))
    join = HyperElement(h1.poset, tuple(a | b for a, b in zip(h1.components, h2.components)))
    return meet, join


def negation_family(poset: ContextPoset) -> dict[int, callable]:
    """The stage-wise complement alpha -> 1 - alpha, as a family of maps G -> H."""
    return {i: (lambda a, full=poset[i].full(): full - a) for i in range(len(poset))}


def negation_check(p: Projector, poset: ContextPoset) -> CheckResult:
    """Verify ``outer(1-P)_V == 1 - inner(P)_V`` at every stage and that
    complementation is a natural isomorphism G -> H.

    The two sides at each stage are computed from independent support rules.
    """
    one_minus = p.complement()
    eye = np.eye(p.dim)
    for v in poset:
        lhs = outer_at(one_minus, v)
        rhs = Projector(eye - inner_at(p, v).matrix, check=False)
        if not proj_eq(lhs, rhs):
            return CheckResult(False, ("stage", v.label))
    family = negation_family(poset)
    natural = check_natural(family, OuterPresheaf(poset), InnerPresheaf(poset))
    if not natural:
        return CheckResult(False, ("naturality", natural.witness))
    for i, v in enumerate(poset):
        lattice = v.lattice()
        image = {family[i](a) for a in lattice}
        if len(image) != len(lattice) or image != set(lattice):
            return CheckResult(False, ("bijection", v.label))
    return CheckResult(True)
