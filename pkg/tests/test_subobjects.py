from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from daseinizer.contexts import Context, context_from_commuting, diagonal_context, generate_poset
from daseinizer.daseinisation import outer_support
from daseinizer.errors import InvariantError, NotInAlgebra, PosetMismatch
from daseinizer.heyting import HeytingTables, check_laws
from daseinizer.operators import Projector, proj_eq, proj_join, proj_meet
from daseinizer.oracles import outer_by_search
from daseinizer.presheaf import SpectralElement
from daseinizer.sampling import random_basis_context, random_projector, random_subobject
from daseinizer.subobjects import (
    ClopenSubobject,
    PowerObjectPresheaf,
    all_subobjects,
    characteristic_arrow,
    check_iota,
    clopen_to_projector,
    daseinise_subobject,
    iota,
    iota_stage,
    projector_clopen_iso,
    projector_to_clopen,
    restrict_image,
    sub_implies,
    sub_join,
    sub_lattice,
    sub_meet,
    sub_neg,
)

E = [Projector.basis_vector(3, k) for k in range(3)]


def idx(v, proj):
    """Index of the minimal of ``v`` equal to ``proj``."""
    return next(k for k, m in enumerate(v.minimals) if proj_eq(m, proj))


@pytest.fixture
def two_level():
    c23 = Context([E[0], Projector.diag([0, 1, 1])], "C23")
    return generate_poset([diagonal_context(3), c23], down_close=False)


def test_iso_examples(d3):
    v = d3[0]
    assert projector_clopen_iso(Projector.identity(3), v) == v.full()
    assert projector_to_clopen(Projector.diag([1, 1, 0]), v) == frozenset({idx(v, E[0]), idx(v, E[1])})
    for a in v.lattice():
        alpha = v.projector(a)
        # the subset is found by evaluating each functional; compare with a minimal-by-minimal <= test
        by_order = frozenset(k for k, q in enumerate(v.minimals) if np.max(np.abs(alpha.matrix @ q.matrix - q.matrix)) < 1e-9)
        s = projector_to_clopen(alpha, v)
        assert s == by_order
        assert clopen_to_projector(s, v) == alpha
    with pytest.raises(NotInAlgebra):
        projector_to_clopen(Projector.onto([1, 1, 0]), v)


def test_iso_is_lattice_homomorphism(tilted):
    for v in tilted:
        for a, b in product(v.lattice(), repeat=2):
            pa, pb = v.projector(a), v.projector(b)
            assert projector_to_clopen(proj_meet(pa, pb), v) == a & b
            assert projector_to_clopen(proj_join(pa, pb), v) == a | b


def test_daseinise_units(d3):
    assert daseinise_subobject(Projector.identity(3), d3) == ClopenSubobject.top(d3)
    assert daseinise_subobject(Projector.zero(3), d3) == ClopenSubobject.bottom(d3)


def test_daseinise_tilted_ray(d3, p110):
    s = daseinise_subobject(p110, d3)
    d = d3[0]
    assert s[0] == {idx(d, E[0]), idx(d, E[1])}
    c12 = d3.index("D3[1+2|3]")
    assert s[c12] == {idx(d3[c12], Projector.diag([1, 1, 0]))}
    assert s[d3.index("D3[1|2+3]")] == d3[d3.index("D3[1|2+3]")].full()
    assert s[d3.index("D3[1+3|2]")] == d3[d3.index("D3[1+3|2]")].full()
    # brute-force cross-check of every component
    for i, v in enumerate(d3):
        assert s[i] == projector_to_clopen(outer_by_search(p110, v), v)


def test_construction_rejects_non_functorial(two_level):
    with pytest.raises(InvariantError):
        ClopenSubobject(two_level, (frozenset({1}), frozenset()))


def test_lattice_examples(two_level, d3):
    s = ClopenSubobject(two_level, (frozenset({idx(two_level[0], E[0])}), frozenset({idx(two_level[1], E[0])})))
    join, meet, top, bottom = sub_lattice(s, ClopenSubobject.top(two_level))
    assert meet == s and join == top
    assert sub_meet(s, top) == s
    # brute force over the 2-context poset: some sub-object violates excluded middle
    witnesses = [t for t in all_subobjects(two_level) if sub_join(t, sub_neg(t)) != top]
    assert witnesses


def test_negation_example(two_level):
    d, c = two_level[0], two_level[1]
    s = ClopenSubobject(two_level, (frozenset({idx(d, E[0])}), frozenset({idx(c, E[0])})))
    n = sub_neg(s)
    assert n[0] == {idx(d, E[1]), idx(d, E[2])}
    assert n[1] == {idx(c, Projector.diag([0, 1, 1]))}
    assert sub_implies(s, s) == ClopenSubobject.top(two_level)


def test_poset_mismatch(two_level, d3):
    with pytest.raises(PosetMismatch):
        sub_meet(ClopenSubobject.top(two_level), ClopenSubobject.top(d3))


@pytest.mark.parametrize("name", ["d3", "qubit-antichain", "two"])
def test_heyting_laws_exhaustive(name, d3):
    if name == "d3":
        poset = d3
    elif name == "two":
        poset = generate_poset([diagonal_context(3), Context([E[0], Projector.diag([0, 1, 1])])], down_close=False)
    else:
        poset = generate_poset([diagonal_context(2), context_from_commuting([Projector.onto([1, 1])])])
    subs = all_subobjects(poset)
    t = HeytingTables(subs, sub_meet, sub_join, sub_implies, sub_neg, lambda a, b: a <= b,
                      ClopenSubobject.top(poset), ClopenSubobject.bottom(poset))
    rep = check_laws(t)
    assert rep.ok, rep.failures
    assert rep.excluded_middle_failures or name == "qubit-antichain"


def test_subobject_count_d3(d3):
    subs = all_subobjects(d3)
    # oracle: brute-force every family of subsets and keep the functorial ones
    count = 0
    stalks = [list(range(v.size)) for v in d3]
    subsets = [[frozenset(k for k in range(len(s)) if m >> k & 1) for m in range(2 ** len(s))] for s in stalks]
    for fam in product(*subsets):
        if all(restrict_image(d3, fam[i], j, i) <= fam[j] for j, i in d3.edges()):
            count += 1
    assert len(subs) == count == 95


def test_implies_is_largest_solution(d3):
    subs = all_subobjects(d3)
    rng = np.random.default_rng(1)
    for _ in range(40):
        s, t = (subs[k] for k in rng.integers(len(subs), size=2))
        candidates = [u for u in subs if sub_meet(u, s) <= t]
        best = sub_implies(s, t)
        assert best in candidates and all(u <= best for u in candidates)


def test_characteristic_arrow_examples(two_level):
    top = characteristic_arrow(ClopenSubobject.top(two_level))
    bottom = characteristic_arrow(ClopenSubobject.bottom(two_level))
    for i, v in enumerate(two_level):
        for k in range(v.size):
            assert top.at(i, k).is_total()
            assert bottom.at(i, k).is_empty()
    d, c = two_level[0], two_level[1]
    s = ClopenSubobject(two_level, (frozenset({idx(d, E[0])}), frozenset({idx(c, E[0])})))
    chi = characteristic_arrow(s)
    assert chi.at(0, SpectralElement(d, idx(d, E[1]))).is_empty()
    assert chi.at(0, idx(d, E[0])).is_total()
    assert chi.check()


def test_restrict_image_examples(d3, p110):
    s = daseinise_subobject(p110, d3)
    c12 = d3.index("D3[1+2|3]")
    assert restrict_image(d3, s[0], c12, 0) == s[c12]
    assert restrict_image(d3, d3[0].full(), c12, 0) == d3[c12].full()


def test_hand_built_subobject_is_not_optimal(d3):
    c12 = d3.index("D3[1+2|3]")
    comps = [frozenset()] * len(d3)
    comps[0] = frozenset({0})
    comps[c12] = d3[c12].full()
    for j in (d3.index("D3[1+3|2]"), d3.index("D3[1|2+3]")):
        comps[j] = restrict_image(d3, comps[0], j, 0)
    s = ClopenSubobject(d3, tuple(comps))
    assert restrict_image(d3, s[0], c12, 0) < s[c12]
    assert not s.is_surjective_at(c12, 0)


@given(st.integers(3, 4), st.integers(0, 10_000))
def test_daseinised_components_restrict_onto(dim, seed):
    rng = np.random.default_rng(seed)
    poset = generate_poset([random_basis_context(dim, rng), diagonal_context(dim)])
    s = daseinise_subobject(random_projector(dim, rng), poset)
    for j, i in poset.edges():
        assert restrict_image(poset, s[i], j, i) == s[j]


@given(st.integers(0, 10_000))
def test_random_subobjects_are_closed_under_operations(seed):
    poset = generate_poset([diagonal_context(3), random_basis_context(3, seed)])
    rng = np.random.default_rng(seed)
    s, t = random_subobject(poset, rng), random_subobject(poset, rng)
    for r in (sub_meet(s, t), sub_join(s, t), sub_implies(s, t), sub_neg(s)):
        assert isinstance(r, ClopenSubobject)
    assert sub_meet(s, sub_neg(s)) == ClopenSubobject.bottom(poset)
    assert s <= sub_neg(sub_neg(s))


def test_iota_examples(d3):
    v = d3[0]
    for a in v.lattice():
        for k in a:
            assert iota(d3, 0, a, k).is_total()
    p = Projector.onto([1, 1])
    single = generate_poset([context_from_commuting([p])])
    w = single[0]
    pa = frozenset({idx(w, p)})
    other = idx(w, p.complement())
    assert iota(single, 0, pa, other).is_empty()
    with pytest.raises(NotInAlgebra):
        iota(d3, 1, frozenset({0, 1, 2}), 0)


def test_iota_stage_injective_on_d3(d3):
    images = {iota_stage(d3, 0, a) for a in d3[0].lattice()}
    assert len(images) == 8
    assert check_iota(d3)


def test_iota_components_are_daseinised_subsets(tilted):
    # the element named by alpha has the stage-wise restrictions of alpha as components
    from daseinizer.daseinisation import outer_restrict

    for i, v in enumerate(tilted):
        for a in v.lattice():
            x = iota_stage(tilted, i, a)
            for j in tilted.below(i):
                assert x.component(j) == outer_restrict(tilted, j, i, a)


def test_power_object_global_elements_match_local_subobjects(tilted):
    po = PowerObjectPresheaf(tilted)
    for i in range(len(tilted)):
        local = tilted.restrict_to(i)
        stalk = po.stalk(i)
        assert len(stalk) == len(all_subobjects(local))
        assert len({x.to_subobject() for x in stalk}) == len(stalk)
    assert po.check_functorial()


def test_power_object_evaluation_is_characteristic(d3, p110):
    s = daseinise_subobject(p110, d3)
    x = iota_stage(d3, 0, s[0])
    chi = characteristic_arrow(s)
    for j in d3.below(0):
        for k in range(d3[j].size):
            assert x.evaluate(j, k) == chi.at(j, k)
