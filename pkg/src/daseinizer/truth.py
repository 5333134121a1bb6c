"""Truth objects, the membership valuation and sieve-valued truth values.

Also holds the classical reference model, where a truth value is just 0 or 1
and the truth object of a microstate s is the family of subsets containing s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Union

import numpy as np

from .borel import BorelSet
from .contexts import ContextPoset, Pattern
from .daseinisation import GlobalElement, daseinise_global, outer_at, outer_restrict
from .errors import DimensionMismatch, InvariantError, PosetMismatch, UnknownName
from .operators import DensityMatrix, Projector, SelfAdjointOperator, State, StateVector, is_certain, spectral_projector
from .presheaf import GlobalOmegaElement, Sieve
from .subobjects import ClopenSubobject


def _minimal_patterns(patterns: Iterable[Pattern]) -> tuple[Pattern, ...]:
    pats = set(patterns)
    mins = [a for a in pats if not any(b < a for b in pats)]
    return tuple(sorted(mins, key=lambda a: (len(a), sorted(a))))


@dataclass(frozen=True)
class TruthObject:
    """Per stage, the minimal elements of an up-set T_V of P(V)."""

    poset: ContextPoset = field(compare=False, repr=False)
    minimal: tuple[tuple[Pattern, ...], ...]

    def __post_init__(self):
        p = self.poset
        mins = tuple(_minimal_patterns(m) for m in self.minimal)
        object.__setattr__(self, "minimal", mins)
        if len(mins) != len(p):
            raise InvariantError("a truth object needs one component per context")
        for i, m in enumerate(mins):
            if not m:
                raise InvariantError(f"truth object is empty at {p.label(i)} (1 must belong to it)")
        for j, i in p.edges():
            # the up-set at i must restrict into the up-set at j; minimal elements suffice
            for a in mins[i]:
                if not self.contains(j, outer_restrict(p, j, i, a)):
                    raise InvariantError(
                        f"truth object is not a sub-presheaf of G on {p.label(j)} <= {p.label(i)}"
                    )

    def contains(self, i: int, alpha: Pattern) -> bool:
        alpha = frozenset(alpha)
        return any(m <= alpha for m in self.minimal[i])

    def stage(self, i: int) -> list[Pattern]:
        """The full up-set T_V, reconstructed from its minimal elements."""
        return [a for a in self.poset[i].lattice() if self.contains(i, a)]

    def least(self, i: int) -> Pattern:
        if len(self.minimal[i]) != 1:
            raise InvariantError(f"truth object has no least element at {self.poset.label(i)}")
        return self.minimal[i][0]

    def as_dict(self) -> dict[str, list[list[int]]]:
        return {self.poset.label(i): [sorted(a) for a in m] for i, m in enumerate(self.minimal)}


def _check_dim(state: State, poset: ContextPoset) -> None:
    if state.dim != poset.dim:
        raise DimensionMismatch(f"dimension mismatch: state {state.dim} vs contexts {poset.dim}")


def _scan(poset: ContextPoset, test: Callable[[Projector], bool]) -> TruthObject:
    mins = []
    for v in poset:
        mins.append(_minimal_patterns(a for a in v.lattice() if test(v.projector(a))))
    return TruthObject(poset, tuple(mins))


def truth_object_pure(psi: StateVector, poset: ContextPoset) -> TruthObject:
    """T^psi_V = {alpha in P(V) : |alpha psi - psi| <= eps}."""
    _check_dim(psi, poset)
    return _scan(poset, lambda a: is_certain(a, psi))


def truth_object_density(rho: DensityMatrix, poset: ContextPoset) -> TruthObject:
    """T^rho_V = {alpha in P(V) : tr(rho alpha) >= 1 - eps}."""
    _check_dim(rho, poset)
    return _scan(poset, lambda a: is_certain(a, rho))


def truth_object(state: State, poset: ContextPoset) -> TruthObject:
    if isinstance(state, StateVector):
        return truth_object_pure(state, poset)
    return truth_object_density(state, poset)


def _components(k: Union[GlobalElement, ClopenSubobject]) -> tuple[Pattern, ...]:
    if isinstance(k, GlobalElement) and k.flavor != "outer":
        raise InvariantError("membership valuation needs a global element of G")
    return k.components


def membership_valuation(k: Union[GlobalElement, ClopenSubobject], t: TruthObject) -> GlobalOmegaElement:
    """At each V, the sieve of V' <= V at which K_{V'} belongs to T_{V'}."""
    if k.poset is not t.poset and k.poset != t.poset:
        raise PosetMismatch("proposition and truth object live over different context posets")
    p = t.poset
    comps = _components(k)
    sieves = []
    for i in range(len(p)):
        members = frozenset(j for j in p.below(i) if t.contains(j, comps[j]))
        sieves.append(Sieve(p, i, members))
    return GlobalOmegaElement(p, tuple(sieves))


def direct_truth_value(p: Projector, state: State, poset: ContextPoset) -> GlobalOmegaElement:
    """The same value from expectations: V' is in the sieve iff <delta(P)_{V'}> = 1."""
    _check_dim(state, poset)
    certain = [is_certain(outer_at(p, v), state) for v in poset]
    return GlobalOmegaElement(
        poset, tuple(Sieve(poset, i, frozenset(j for j in poset.below(i) if certain[j])) for i in range(len(poset)))
    )


def truth_value_proposition(
    a: SelfAdjointOperator, delta: BorelSet, state: State, poset: ContextPoset, *, cross_check: bool = True
) -> GlobalOmegaElement:
    """Truth value of "A in delta" in ``state``, via the truth object.

    With ``cross_check`` the result is compared against :func:`direct_truth_value`.
    """
    e = spectral_projector(a, delta)
    value = membership_valuation(daseinise_global(e, poset), truth_object(state, poset))
    if cross_check:
        direct = direct_truth_value(e, state, poset)
        if value != direct:
            raise InvariantError("truth-object route and expectation route disagree")
    return value


# -- classical reference -------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalModel:
    """A finite classical state space with named real-valued quantities."""

    states: tuple
    quantities: Mapping[str, Mapping] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        for name, f in self.quantities.items():
            missing = [s for s in self.states if s not in f]
            if missing:
                raise InvariantError(f"quantity {name!r} is undefined on states {missing}")

    def quantity(self, name: str) -> Mapping:
        try:
            return self.quantities[name]
        except KeyError:
            raise UnknownName(f"unknown quantity {name!r}; known: {sorted(self.quantities)}") from None

    def preimage(self, name: str, delta: BorelSet) -> frozenset:
        f = self.quantity(name)
        return frozenset(s for s in self.states if delta.contains(float(f[s])))


def classical_truth_object(model: ClassicalModel, s) -> Callable[[frozenset], bool]:
    """T^s = {K : s in K}, given as its membership predicate."""
    if s not in model.states:
        raise UnknownName(f"unknown state {s!r}")
    return lambda k: s in k


def classical_truth(model: ClassicalModel, name: str, delta: BorelSet, *, state=None, truth=None) -> int:
    """[A in delta] as 0 or 1, from a microstate or from a truth object."""
    if (state is None) == (truth is None):
        raise InvariantError("give exactly one of state= or truth=")
    k = model.preimage(name, delta)
    if state is not None:
        if state not in model.states:
            raise UnknownName(f"unknown state {state!r}")
        return int(delta.contains(float(model.quantity(name)[state])))
    contains = truth if callable(truth) else (lambda x: x in truth)
    return int(bool(contains(k)))
