"""Exhaustive and sampled checks of the Heyting-algebra laws on a finite carrier.

The operations are evaluated once per pair into id tables, so that sweeping
all triples costs only table lookups.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Sequence

import numpy as np


@dataclass
class LawReport:
    size: int
    triples: int = 0
    failures: dict[str, list] = field(default_factory=dict)
    excluded_middle_failures: list = field(default_factory=list)

    def fail(self, law: str, witness) -> None:
        self.failures.setdefault(law, [])
        if len(self.failures[law]) < 5:
            self.failures[law].append(witness)

    @property
    def ok(self) -> bool:
        return not self.failures


class HeytingTables:
    def __init__(self, elements: Sequence[Hashable], meet: Callable, join: Callable, implies: Callable,
                 neg: Callable, leq: Callable, top, bottom):
        self.elements = list(elements)
        ids = {x: k for k, x in enumerate(self.elements)}
        if len(ids) != len(self.elements):
            raise ValueError("carrier contains duplicates")
        n = len(self.elements)
        self.ids = ids

        def lookup(x):
            if x not in ids:
                raise ValueError("operation left the carrier")
            return ids[x]

        self.meet = np.empty((n, n), dtype=np.int32)
        self.join = np.empty((n, n), dtype=np.int32)
        self.implies = np.empty((n, n), dtype=np.int32)
        self.leq = np.empty((n, n), dtype=bool)
        for a, b in product(range(n), repeat=2):
            x, y = self.elements[a], self.elements[b]
            self.meet[a, b] = lookup(meet(x, y))
            self.join[a, b] = lookup(join(x, y))
            self.implies[a, b] = lookup(implies(x, y))
            self.leq[a, b] = bool(leq(x, y))
        self.neg = np.array([lookup(neg(x)) for x in self.elements], dtype=np.int32)
        self.top = lookup(top)
        self.bottom = lookup(bottom)


def check_laws(t: HeytingTables, triples=None) -> LawReport:
    """Check the laws over all triples (default) or over the given id triples."""
    n = len(t.elements)
    rep = LawReport(n)
    M, J, I, L, N = t.meet, t.join, t.implies, t.leq, t.neg
    for a in range(n):
        if M[a, t.top] != a:
            rep.fail("meet with top", a)
        if J[a, t.bottom] != a:
            rep.fail("join with bottom", a)
        if I[a, a] != t.top:
            rep.fail("self implication", a)
        if M[a, N[a]] != t.bottom:
            rep.fail("non-contradiction", a)
        if not L[a, N[N[a]]]:
            rep.fail("double negation", a)
        if N[a] != I[a, t.bottom]:
            rep.fail("negation is implication to bottom", a)
        if J[a, N[a]] != t.top:
            rep.excluded_middle_failures.append(a)
        for b in range(n):
            if L[a, b] != (M[a, b] == a):
                rep.fail("order agrees with meet", (a, b))
    if triples is None:
        a = np.arange(n)
        for s in range(n):
            # vectorise over (t, u) for a fixed s
            tt, uu = np.meshgrid(a, a, indexing="ij")
            lhs = L[M[s, tt], uu]
            rhs = L[s, I[tt, uu]]
            bad = np.argwhere(lhs != rhs)
            for x, y in bad[:5]:
                rep.fail("adjunction", (s, int(x), int(y)))
            d1 = M[s, J[tt, uu]]
            d2 = J[M[s, tt], M[s, uu]]
            bad = np.argwhere(d1 != d2)
            for x, y in bad[:5]:
                rep.fail("distributivity", (s, int(x), int(y)))
        rep.triples = n ** 3
    else:
        count = 0
        for s, x, y in triples:
            count += 1
            if L[M[s, x], y] != L[s, I[x, y]]:
                rep.fail("adjunction", (s, x, y))
            if M[s, J[x, y]] != J[M[s, x], M[s, y]]:
                rep.fail("distributivity", (s, x, y))
        rep.triples = count
    return rep
