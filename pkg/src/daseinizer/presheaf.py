"""Presheaves over a finite context poset.

Contains the spectral presheaf, sieves and the subobject classifier with its
Heyting operations, exhaustive global-section search, and a naturality check
for stage-wise families of maps between presheaves.

Stalks here are finite, so the spectral topology is discrete. The interior
operator that the clopen constructions need is therefore the identity; it is
kept as :func:`interior` so the call sites read like the general definitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .contexts import Context, ContextPoset
from .errors import CapExceeded, InvariantError, PosetMismatch
from .operators import Projector, max_norm
from .tolerance import get_eps

DEFAULT_SEARCH_CAP = 10_000_000


class CheckResult(NamedTuple):
    ok: bool
    witness: Any = None

    def __bool__(self):
        return self.ok


def interior(subset: frozenset, context: Context) -> frozenset:
    """Interior in the spectral topology of a stalk; the identity on finite, discrete stalks."""
    return subset


def _same_poset(a: ContextPoset, b: ContextPoset) -> None:
    if a is not b and a != b:
        raise PosetMismatch("operands live over different context posets")


class Presheaf:
    """A contravariant functor from a context poset to finite sets.

    Subclasses supply :meth:`stalk` and :meth:`restrict`; ``restrict(j, i, x)``
    sends ``x`` in the stalk at ``i`` to the stalk at ``j`` for ``j <= i``.
    """

    def __init__(self, poset: ContextPoset):
        self.poset = poset

    def stalk(self, i: int) -> Sequence[Hashable]:
        raise NotImplementedError

    def restrict(self, j: int, i: int, x):
        raise NotImplementedError

    def check_functorial(self) -> CheckResult:
        p = self.poset
        for i in range(len(p)):
            for x in self.stalk(i):
                if self.restrict(i, i, x) != x:
                    return CheckResult(False, ("identity", i, x))
                for j in p.below(i):
                    y = self.restrict(j, i, x)
                    for k in p.below(j):
                        if self.restrict(k, i, x) != self.restrict(k, j, y):
                            return CheckResult(False, ("composition", k, j, i, x))
        return CheckResult(True)


class FunctionPresheaf(Presheaf):
    """A presheaf given by explicit stalks and a restriction function."""

    def __init__(self, poset, stalks: Mapping[int, Sequence], restrict: Callable):
        super().__init__(poset)
        self._stalks = stalks
        self._restrict = restrict

    def stalk(self, i):
        return self._stalks[i]

    def restrict(self, j, i, x):
        return self._restrict(j, i, x)


# -- the spectral presheaf ---------------------------------------------------


@dataclass(frozen=True)
class SpectralElement:
    """A point of the Gel'fand spectrum of a context.

    In finite dimension each multiplicative functional is evaluation at one
    minimal projector: ``value(alpha)`` is 1 iff that minimal lies under alpha.
    """

    context: Context
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.context.size:
            raise InvariantError(f"spectral index {self.index} out of range for {self.context!r}")

    @property
    def minimal(self) -> Projector:
        return self.context.minimals[self.index]

    def value(self, alpha: Projector) -> int:
        q = self.minimal.matrix
        return int(max_norm(alpha.matrix @ q - q) <= get_eps())

    def __str__(self):
        return f"lambda[{self.context.label}:{self.index + 1}]"


class SpectralPresheaf(Presheaf):
    """Sigma: the Gel'fand spectrum at each stage, with restriction of functionals."""

    def __init__(self, poset: ContextPoset):
        super().__init__(poset)
        self._stalks = tuple(
            tuple(SpectralElement(c, k) for k in range(c.size)) for c in poset.contexts
        )

    def stalk(self, i):
        return self._stalks[i]

    def restrict(self, j, i, x: SpectralElement) -> SpectralElement:
        return self._stalks[j][self.poset.parent_map(j, i)[x.index]]


def spectral_presheaf(poset: ContextPoset) -> SpectralPresheaf:
    return SpectralPresheaf(poset)


# -- global sections ---------------------------------------------------------


@dataclass(frozen=True)
class GlobalSection:
    poset: ContextPoset = field(compare=False, repr=False)
    elements: tuple

    def __getitem__(self, i):
        return self.elements[i]

    def as_dict(self) -> dict[str, Any]:
        return {self.poset.label(i): _plain(x) for i, x in enumerate(self.elements)}


def _plain(x):
    if isinstance(x, SpectralElement):
        return x.index
    if isinstance(x, frozenset):
        return sorted(x)
    return x


def global_sections(presheaf: Presheaf, cap: int = DEFAULT_SEARCH_CAP) -> list[GlobalSection]:
    """Every compatible family of stalk elements, in a canonical order.

    Backtracking visits contexts largest first; choosing an element at a
    context fixes its whole down-set by restriction, so only contexts that are
    still unassigned branch. An empty result certifies that no global section
    exists over this poset.
    """
    p = presheaf.poset
    n = len(p)
    order = list(range(n))  # the poset order is already largest-first
    assigned: list[Any] = [None] * n
    found: list[GlobalSection] = []
    nodes = 0

    def bound() -> int:
        b = 1
        for i in p.maximal():
            b *= max(1, len(presheaf.stalk(i)))
        return b

    def place(i, x, trail) -> bool:
        for j in sorted(p.below(i)):
            y = x if j == i else presheaf.restrict(j, i, x)
            if assigned[j] is None:
                assigned[j] = y
                trail.append(j)
            elif assigned[j] != y:
                return False
        return True

    def search(pos: int) -> None:
        nonlocal nodes
        while pos < n and assigned[order[pos]] is not None:
            pos += 1
        if pos == n:
            found.append(GlobalSection(p, tuple(assigned)))
            return
        i = order[pos]
        for x in presheaf.stalk(i):
            nodes += 1
            if nodes > cap:
                raise CapExceeded(
                    f"global-section search exceeded {cap} nodes (search space bounded by {bound()})",
                    bound=bound(),
                )
            trail: list[int] = []
            if place(i, x, trail):
                search(pos + 1)
            for j in trail:
                assigned[j] = None

    search(0)
    for s in found:
        for j, i in p.edges():
            if presheaf.restrict(j, i, s.elements[i]) != s.elements[j]:
                raise InvariantError("internal error: emitted section is not compatible")
    return found


# -- sieves and the subobject classifier --------------------------------------


@dataclass(frozen=True)
class Sieve:
    """A down-closed set of contexts below ``base``; an element of Omega at ``base``."""

    poset: ContextPoset = field(compare=False, repr=False)
    base: int
    members: frozenset

    def __post_init__(self):
        members = frozenset(self.members)
        object.__setattr__(self, "members", members)
        down = self.poset.below(self.base)
        if not members <= down:
            raise InvariantError("sieve members must lie below the base context")
        for m in members:
            if not self.poset.below(m) <= members:
                raise InvariantError(
                    f"not a sieve: {self.poset.label(m)} is a member but not all of its subalgebras are"
                )

    def is_total(self) -> bool:
        return self.members == self.poset.below(self.base)

    def is_empty(self) -> bool:
        return not self.members

    def labels(self) -> list[str]:
        return sorted(self.poset.label(m) for m in self.members)

    def __contains__(self, i):
        return i in self.members

    def __le__(self, other: "Sieve"):
        _check_base(self, other)
        return self.members <= other.members

    def __str__(self):
        return "{" + ", ".join(self.labels()) + "}"


def _check_base(a: Sieve, b: Sieve) -> None:
    _same_poset(a.poset, b.poset)
    if a.base != b.base:
        raise PosetMismatch("sieves are on different base contexts")


def sieve_top(poset: ContextPoset, base: int) -> Sieve:
    return Sieve(poset, base, poset.below(base))


def sieve_bottom(poset: ContextPoset, base: int) -> Sieve:
    return Sieve(poset, base, frozenset())


def sieve_meet(a: Sieve, b: Sieve) -> Sieve:
    _check_base(a, b)
    return Sieve(a.poset, a.base, a.members & b.members)


def sieve_join(a: Sieve, b: Sieve) -> Sieve:
    _check_base(a, b)
    return Sieve(a.poset, a.base, a.members | b.members)


def sieve_implies(a: Sieve, b: Sieve) -> Sieve:
    """Largest sieve whose meet with ``a`` lies in ``b``."""
    _check_base(a, b)
    p = a.poset
    members = frozenset(
        v for v in p.below(a.base)
        if all(w not in a.members or w in b.members for w in p.below(v))
    )
    return Sieve(p, a.base, members)


def sieve_neg(a: Sieve) -> Sieve:
    return sieve_implies(a, sieve_bottom(a.poset, a.base))


def sieve_restrict(s: Sieve, j: int) -> Sieve:
    """Omega's restriction map: pull a sieve on ``s.base`` back to the stage ``j``."""
    p = s.poset
    if not p.leq(j, s.base):
        raise InvariantError(f"{p.label(j)} is not below {p.label(s.base)}")
    return Sieve(p, j, s.members & p.below(j))


def all_sieves(poset: ContextPoset, base: int) -> list[Sieve]:
    """Every sieve on ``base`` (brute force over subsets of the down-set)."""
    down = sorted(poset.below(base))
    out = []
    for r in range(len(down) + 1):
        for combo in combinations(down, r):
            members = frozenset(combo)
            if all(poset.below(m) <= members for m in members):
                out.append(Sieve(poset, base, members))
    return out


class OmegaPresheaf(Presheaf):
    """The subobject classifier: sieves at each stage, restricted by intersection."""

    def __init__(self, poset: ContextPoset):
        super().__init__(poset)
        self._stalks: dict[int, list[Sieve]] = {}

    def stalk(self, i):
        if i not in self._stalks:
            self._stalks[i] = all_sieves(self.poset, i)
        return self._stalks[i]

    def restrict(self, j, i, x: Sieve) -> Sieve:
        return sieve_restrict(x, j)


@dataclass(frozen=True)
class GlobalOmegaElement:
    """A truth value: one sieve per context, satisfying the matching condition."""

    poset: ContextPoset = field(compare=False, repr=False)
    sieves: tuple[Sieve, ...]

    def __post_init__(self):
        p = self.poset
        if len(self.sieves) != len(p):
            raise InvariantError("a global element of Omega needs one sieve per context")
        for i, s in enumerate(self.sieves):
            if s.base != i:
                raise InvariantError(f"sieve at {p.label(i)} has the wrong base")
        for j, i in p.edges():
            if self.sieves[i].members & p.below(j) != self.sieves[j].members:
                raise InvariantError(
                    f"matching condition fails between {p.label(i)} and {p.label(j)}"
                )

    @classmethod
    def from_members(cls, poset: ContextPoset, members: Iterable[Iterable[int]]) -> "GlobalOmegaElement":
        return cls(poset, tuple(Sieve(poset, i, frozenset(m)) for i, m in enumerate(members)))

    @classmethod
    def top(cls, poset: ContextPoset) -> "GlobalOmegaElement":
        return cls.from_members(poset, (poset.below(i) for i in range(len(poset))))

    @classmethod
    def bottom(cls, poset: ContextPoset) -> "GlobalOmegaElement":
        return cls.from_members(poset, (() for _ in range(len(poset))))

    def __getitem__(self, i) -> Sieve:
        return self.sieves[i]

    def is_true(self) -> bool:
        return all(s.is_total() for s in self.sieves)

    def is_false(self) -> bool:
        return all(s.is_empty() for s in self.sieves)

    def as_dict(self) -> dict[str, list[str]]:
        return {self.poset.label(i): s.labels() for i, s in enumerate(self.sieves)}


# -- natural transformations ---------------------------------------------------


def check_natural(family: Mapping[int, Callable], source: Presheaf, target: Presheaf) -> CheckResult:
    """Check that a stage-wise family of maps ``source -> target`` is natural.

    Every square ``target.restrict . t_i == t_j . source.restrict`` is compared
    exactly on every element of every source stalk; the first failure is
    returned as the witness ``(j, i, x, via_target, via_source)``.
    """
    _same_poset(source.poset, target.poset)
    p = source.poset
    for i in range(len(p)):
        t_i = family[i]
        for x in source.stalk(i):
            tx = t_i(x)
            for j in sorted(p.below(i)):
                lhs = target.restrict(j, i, tx)
                rhs = family[j](source.restrict(j, i, x))
                if lhs != rhs:
                    return CheckResult(False, (j, i, x, lhs, rhs))
    return CheckResult(True)
