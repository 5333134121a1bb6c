"""Clopen sub-objects of the spectral presheaf and their Heyting algebra.

A sub-object is stored as one frozenset of spectral indices per context; the
index ``k`` at stage ``V`` stands for the functional that is 1 on the k-th
minimal of V. Under the Gel'fand correspondence S_alpha is then literally the
pattern of alpha, so P(V) and the clopen subsets of the stalk share an encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .contexts import Context, ContextPoset, Pattern
from .daseinisation import outer_restrict, outer_support
from .errors import InvariantError, NotInAlgebra, PosetMismatch
from .operators import Projector
from .presheaf import (
    Presheaf,
    Sieve,
    SpectralElement,
    SpectralPresheaf,
    OmegaPresheaf,
    CheckResult,
    check_natural,
    interior,
)


def restrict_image(poset: ContextPoset, subset: Iterable[int], j: int, i: int) -> frozenset:
    """The image ``{lambda|_{V_j} : lambda in subset}`` of a subset of the stalk at ``i``."""
    parents = poset.parent_map(j, i)
    return frozenset(parents[b] for b in subset)


def _check_functorial(poset: ContextPoset, comps: Mapping[int, frozenset], indices) -> None:
    for j, i in poset.edges():
        if i in indices and j in indices:
            if not restrict_image(poset, comps[i], j, i) <= comps[j]:
                raise InvariantError(
                    f"not a sub-object: restriction from {poset.label(i)} leaves "
                    f"the component at {poset.label(j)}"
                )


@dataclass(frozen=True)
class ClopenSubobject:
    poset: ContextPoset = field(compare=False, repr=False)
    components: tuple[frozenset, ...]

    def __post_init__(self):
        p = self.poset
        comps = tuple(frozenset(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != len(p):
            raise InvariantError("a sub-object needs one component per context")
        for i, c in enumerate(comps):
            if not c <= p[i].full():
                raise InvariantError(f"component at {p.label(i)} is not a subset of the stalk")
            # every subset of a finite discrete stalk is clopen
            if interior(c, p[i]) != c:
                raise InvariantError(f"component at {p.label(i)} is not clopen")
        _check_functorial(p, dict(enumerate(comps)), range(len(p)))

    @classmethod
    def top(cls, poset: ContextPoset) -> "ClopenSubobject":
        return cls(poset, tuple(c.full() for c in poset))

    @classmethod
    def bottom(cls, poset: ContextPoset) -> "ClopenSubobject":
        return cls(poset, tuple(frozenset() for _ in poset))

    def __getitem__(self, i) -> frozenset:
        return self.components[i]

    def __le__(self, other: "ClopenSubobject") -> bool:
        _same(self, other)
        return all(a <= b for a, b in zip(self.components, other.components))

    def __and__(self, other):
        return sub_meet(self, other)

    def __or__(self, other):
        return sub_join(self, other)

    def __invert__(self):
        return sub_neg(self)

    def elements(self, i: int) -> list[SpectralElement]:
        return [SpectralElement(self.poset[i], k) for k in sorted(self.components[i])]

    def is_surjective_at(self, j: int, i: int) -> bool:
        """Whether restriction maps the component at ``i`` onto the one at ``j``."""
        return restrict_image(self.poset, self.components[i], j, i) == self.components[j]

    def as_dict(self) -> dict[str, list[int]]:
        return {self.poset.label(i): sorted(c) for i, c in enumerate(self.components)}


def _same(a: ClopenSubobject, b: ClopenSubobject) -> None:
    if a.poset is not b.poset and a.poset != b.poset:
        raise PosetMismatch("sub-objects live over different context posets")


# -- P(V) versus clopen subsets of the stalk -----------------------------------


def projector_to_clopen(alpha: Projector, v: Context) -> frozenset:
    """S_alpha: the functionals taking value 1 on ``alpha``."""
    v.pattern_of(alpha)  # raises NotInAlgebra outside P(V)
    return frozenset(lam.index for lam in (SpectralElement(v, k) for k in range(v.size)) if lam.value(alpha) == 1)


def clopen_to_projector(subset: Iterable[int], v: Context) -> Projector:
    subset = frozenset(subset)
    if not subset <= v.full():
        raise NotInAlgebra(f"subset {sorted(subset)} is not inside the stalk of {v.label!r}")
    return v.projector(subset)


projector_clopen_iso = projector_to_clopen


# -- daseinisation into Sub_cl(Sigma) ------------------------------------------


def daseinise_subobject(p: Projector, poset: ContextPoset) -> ClopenSubobject:
    """The clopen sub-object V -> S_{outer(P)_V}."""
    return ClopenSubobject(poset, tuple(outer_support(p, v) for v in poset))


# -- Heyting operations ----------------------------------------------------------


def sub_meet(s: ClopenSubobject, t: ClopenSubobject) -> ClopenSubobject:
    _same(s, t)
    return ClopenSubobject(s.poset, tuple(a & b for a, b in zip(s.components, t.components)))


def sub_join(s: ClopenSubobject, t: ClopenSubobject) -> ClopenSubobject:
    _same(s, t)
    return ClopenSubobject(s.poset, tuple(a | b for a, b in zip(s.components, t.components)))


def sub_lattice(s: ClopenSubobject, t: ClopenSubobject):
    """(join, meet, top, bottom) for a pair of sub-objects over the same poset."""
    _same(s, t)
    return sub_join(s, t), sub_meet(s, t), ClopenSubobject.top(s.poset), ClopenSubobject.bottom(s.poset)


def sub_implies(s: ClopenSubobject, t: ClopenSubobject) -> ClopenSubobject:
    """Relative pseudo-complement: lambda survives iff every restriction in S is also in T."""
    _same(s, t)
    p = s.poset
    comps = []
    for i, v in enumerate(p):
        keep = set()
        for lam in range(v.size):
            ok = True
            for j in p.below(i):
                mu = p.parent_map(j, i)[lam]
                if mu in s.components[j] and mu not in t.components[j]:
                    ok = False
                    break
            if ok:
                keep.add(lam)
        comps.append(interior(frozenset(keep), v))
    return ClopenSubobject(p, tuple(comps))


def sub_neg(s: ClopenSubobject) -> ClopenSubobject:
    """Interior of the intersection, over all V' <= V, of the preimages of the complements."""
    p = s.poset
    comps = []
    for i, v in enumerate(p):
        acc = v.full()
        for j in p.below(i):
            parents = p.parent_map(j, i)
            complement = p[j].full() - s.components[j]
            acc = acc & frozenset(lam for lam in range(v.size) if parents[lam] in complement)
        comps.append(interior(acc, v))
    return ClopenSubobject(p, tuple(comps))


# -- characteristic arrows -------------------------------------------------------


class CharacteristicArrow:
    """chi_S : Sigma -> Omega, sending lambda at V to the sieve of stages where it stays in S."""

    def __init__(self, subobject: ClopenSubobject):
        self.subobject = subobject
        self.poset = subobject.poset

    def at(self, i: int, lam) -> Sieve:
        k = lam.index if isinstance(lam, SpectralElement) else int(lam)
        p = self.poset
        members = frozenset(j for j in p.below(i) if p.parent_map(j, i)[k] in self.subobject.components[j])
        return Sieve(p, i, members)

    def family(self) -> dict[int, callable]:
        return {i: (lambda lam, i=i: self.at(i, lam)) for i in range(len(self.poset))}

    def preimage_of_top(self, i: int) -> frozenset:
        return frozenset(k for k in range(self.poset[i].size) if self.at(i, k).is_total())

    def check(self) -> CheckResult:
        """Naturality against Omega, and that chi^{-1}(top) recovers each component."""
        natural = check_natural(self.family(), SpectralPresheaf(self.poset), OmegaPresheaf(self.poset))
        if not natural:
            return natural
        for i in range(len(self.poset)):
            if self.preimage_of_top(i) != self.subobject.components[i]:
                return CheckResult(False, ("preimage", self.poset.label(i)))
        return CheckResult(True)


def characteristic_arrow(s: ClopenSubobject) -> CharacteristicArrow:
    return CharacteristicArrow(s)


# -- enumeration -----------------------------------------------------------------


def _supersets(base: frozenset, universe: frozenset) -> Iterator[frozenset]:
    free = sorted(universe - base)
    for r in range(len(free) + 1):
        for extra in combinations(free, r):
            yield base | frozenset(extra)


def enumerate_components(poset: ContextPoset, indices: Iterable[int] | None = None) -> Iterator[dict[int, frozenset]]:
    """All functorial families of subsets over a down-closed set of contexts.

    Contexts are filled largest first; each component ranges over supersets of
    the images forced by the components already chosen above it.
    """
    idx = sorted(range(len(poset)) if indices is None else set(indices))
    chosen: dict[int, frozenset] = {}

    def rec(pos: int):
        if pos == len(idx):
            yield dict(chosen)
            return
        j = idx[pos]
        need = frozenset()
        for i in chosen:
            if poset.leq(j, i) and i != j:
                need = need | restrict_image(poset, chosen[i], j, i)
        for s in _supersets(need, poset[j].full()):
            chosen[j] = s
            yield from rec(pos + 1)
        del chosen[j]

    yield from rec(0)


def all_subobjects(poset: ContextPoset) -> list[ClopenSubobject]:
    n = len(poset)
    return [ClopenSubobject(poset, tuple(c[i] for i in range(n))) for c in enumerate_components(poset)]


# -- the power object P_cl(Sigma) and the monic iota : G -> P_cl(Sigma) ----------------


@dataclass(frozen=True)
class PowerObjectElement:
    """An element of P_cl(Sigma) at ``stage``: a clopen sub-object of Sigma over the down-set."""

    poset: ContextPoset = field(compare=False, repr=False)
    stage: int
    components: tuple[tuple[int, frozenset], ...]

    def __post_init__(self):
        comps = tuple(sorted((int(j), frozenset(s)) for j, s in dict(self.components).items()))
        object.__setattr__(self, "components", comps)
        down = self.poset.below(self.stage)
        if {j for j, _ in comps} != set(down):
            raise InvariantError("power-object element must have one component per context below its stage")
        _check_functorial(self.poset, dict(comps), down)

    def component(self, j: int) -> frozenset:
        return dict(self.components)[j]

    def evaluate(self, j: int, lam) -> Sieve:
        """The natural family sigma at stage ``j``: the characteristic sieve of ``lam``."""
        k = lam.index if isinstance(lam, SpectralElement) else int(lam)
        p = self.poset
        comps = dict(self.components)
        return Sieve(p, j, frozenset(m for m in p.below(j) if p.parent_map(m, j)[k] in comps[m]))

    def restrict(self, j: int) -> "PowerObjectElement":
        down = self.poset.below(j)
        return PowerObjectElement(self.poset, j, tuple((m, s) for m, s in self.components if m in down))

    def to_subobject(self) -> ClopenSubobject:
        """The same data as a sub-object over the principal down-set viewed as its own poset."""
        sub = self.poset.restrict_to(self.stage)
        comps = dict(self.components)
        return ClopenSubobject(sub, tuple(comps[self.poset.find(c)] for c in sub))


class PowerObjectPresheaf(Presheaf):
    """P_cl(Sigma): at V, all clopen sub-objects of Sigma restricted to the down-set of V."""

    def __init__(self, poset: ContextPoset):
        super().__init__(poset)
        self._stalks: dict[int, list[PowerObjectElement]] = {}

    def stalk(self, i):
        if i not in self._stalks:
            down = self.poset.below(i)
            self._stalks[i] = [
                PowerObjectElement(self.poset, i, tuple(c.items()))
                for c in enumerate_components(self.poset, down)
            ]
        return self._stalks[i]

    def restrict(self, j, i, x: PowerObjectElement) -> PowerObjectElement:
        return x.restrict(j)


def iota(poset: ContextPoset, i: int, alpha: Pattern, lam) -> Sieve:
    """iota_V(alpha, lambda) = {V' <= V : lambda|V' in S_{G-restriction of alpha to V'}}."""
    k = lam.index if isinstance(lam, SpectralElement) else int(lam)
    alpha = frozenset(alpha)
    if not alpha <= poset[i].full():
        raise NotInAlgebra(f"pattern {sorted(alpha)} is not an element of P({poset.label(i)})")
    members = frozenset(
        j for j in poset.below(i)
        if poset.parent_map(j, i)[k] in outer_restrict(poset, j, i, alpha)
    )
    return Sieve(poset, i, members)


def iota_stage(poset: ContextPoset, i: int, alpha: Pattern) -> PowerObjectElement:
    """Power transpose of iota at stage ``i``: the element of P_cl(Sigma)_V named by ``alpha``.

    The natural family is sigma_{V1}(lambda) = iota_{V1}(alpha restricted to V1, lambda);
    its component at V1 is the preimage of the total sieve.
    """
    comps = []
    for j in sorted(poset.below(i)):
        beta = outer_restrict(poset, j, i, alpha)
        top = frozenset(
            k for k in range(poset[j].size) if iota(poset, j, beta, k).is_total()
        )
        comps.append((j, top))
    return PowerObjectElement(poset, i, tuple(comps))


def iota_family(poset: ContextPoset) -> dict[int, callable]:
    return {i: (lambda a, i=i: iota_stage(poset, i, a)) for i in range(len(poset))}


def check_iota(poset: ContextPoset) -> CheckResult:
    """Naturality of the transpose G -> P_cl(Sigma) and injectivity at every stage."""
    from .daseinisation import OuterPresheaf

    family = iota_family(poset)
    natural = check_natural(family, OuterPresheaf(poset), PowerObjectPresheaf(poset))
    if not natural:
        return CheckResult(False, ("naturality", natural.witness))
    for i, v in enumerate(poset):
        images = [family[i](a) for a in v.lattice()]
        if len(set(images)) != len(images):
            return CheckResult(False, ("injectivity", v.label))
    return CheckResult(True)
