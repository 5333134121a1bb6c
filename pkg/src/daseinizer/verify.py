"""The invariant suite run by ``daseinizer verify``.

Each check returns a :class:`Check`; informational entries carry ``ok=None``.
The suite is deterministic: sampling uses a fixed seed and every loop runs in
poset order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from . import oracles
from .borel import BorelSet
from .contexts import ContextPoset
from .daseinisation import (
    InnerPresheaf,
    OuterPresheaf,
    componentwise_meet,
    daseinise_global,
    inner_at,
    negation_check,
    outer_at,
)
from .heyting import HeytingTables, check_laws
from .models import Model
from .operators import DensityMatrix, Projector, StateVector, proj_eq, proj_join, proj_meet, spectral_decompose
from .presheaf import (
    CheckResult,
    OmegaPresheaf,
    all_sieves,
    global_sections,
    sieve_bottom,
    sieve_implies,
    sieve_join,
    sieve_meet,
    sieve_neg,
    sieve_top,
    spectral_presheaf,
)
from .sampling import random_subobject
from .subobjects import (
    ClopenSubobject,
    characteristic_arrow,
    check_iota,
    clopen_to_projector,
    daseinise_subobject,
    enumerate_components,
    projector_to_clopen,
    restrict_image,
    sub_implies,
    sub_join,
    sub_meet,
    sub_neg,
)
from .truth import (
    classical_truth,
    classical_truth_object,
    direct_truth_value,
    membership_valuation,
    truth_object,
)

EXHAUSTIVE_LIMIT = 400
SAMPLED_TRIPLES = 1000
MAX_TEST_PROJECTORS = 24
MAX_LATTICE_PAIRS = 500


@dataclass
class Check:
    name: str
    ok: bool | None
    detail: str = ""


def _result(name: str, res: CheckResult | bool, detail: str = "") -> Check:
    ok = bool(res)
    if not ok and isinstance(res, CheckResult) and res.witness is not None:
        detail = f"witness {res.witness!r}"
    return Check(name, ok, detail)


def test_projectors(model: Model) -> list[Projector]:
    """Eigenprojectors of the model operators and rays of its pure states, deduplicated."""
    out: list[Projector] = []

    def add(p: Projector):
        if not p.is_zero() and not any(proj_eq(p, q) for q in out):
            out.append(p)

    for name in sorted(model.operators):
        for _, e in spectral_decompose(model.operators[name]):
            add(e)
    for name in sorted(model.states):
        s = model.states[name]
        if isinstance(s, StateVector):
            add(s.projector())
    return out[:MAX_TEST_PROJECTORS]


def _support(rho: DensityMatrix) -> Projector:
    parts = spectral_decompose(rho.matrix)
    m = sum(e.matrix for lam, e in parts if lam > 1e-9)
    return Projector(m, check=False)


def _all_or_sample(poset: ContextPoset, limit: int):
    gen = enumerate_components(poset)
    out = []
    for comps in gen:
        out.append(ClopenSubobject(poset, tuple(comps[i] for i in range(len(poset)))))
        if len(out) > limit:
            return None
    return out


def run_suite(model: Model, seed: int = 0) -> list[Check]:
    poset = model.poset()
    projs = test_projectors(model)
    checks: list[Check] = []
    add = checks.append

    for label, ps in (
        ("spectral presheaf is a functor", spectral_presheaf(poset)),
        ("outer presheaf is a functor", OuterPresheaf(poset)),
        ("inner presheaf is a functor", InnerPresheaf(poset)),
    ):
        add(_result(label, ps.check_functorial()))

    # outer and inner daseinisation against a brute-force lattice scan
    bad = None
    for k, p in enumerate(projs):
        for v in poset:
            if not proj_eq(outer_at(p, v), oracles.outer_by_search(p, v)):
                bad = ("outer", k, v.label)
            elif not proj_eq(inner_at(p, v), oracles.inner_by_search(p, v)):
                bad = ("inner", k, v.label)
            if bad:
                break
        if bad:
            break
    add(Check("daseinisation matches brute-force search", bad is None, f"witness {bad!r}" if bad else f"{len(projs)} projectors"))

    bad = None
    for v in poset:
        lat = v.lattice()
        for a in lat:
            alpha = v.projector(a)
            if clopen_to_projector(projector_to_clopen(alpha, v), v) != alpha:
                bad = ("round trip", v.label, sorted(a))
        pairs = list(combinations(lat, 2))
        if len(pairs) > MAX_LATTICE_PAIRS:
            rng = np.random.default_rng(seed)
            pairs = [pairs[k] for k in sorted(rng.choice(len(pairs), MAX_LATTICE_PAIRS, replace=False))]
        for a, b in pairs:
            pa, pb = v.projector(a), v.projector(b)
            if projector_to_clopen(proj_meet(pa, pb), v) != projector_to_clopen(pa, v) & projector_to_clopen(pb, v):
                bad = ("meet", v.label)
            if projector_to_clopen(proj_join(pa, pb), v) != projector_to_clopen(pa, v) | projector_to_clopen(pb, v):
                bad = ("join", v.label)
        if bad:
            break
    add(Check("projections of a context match clopen subsets of its spectrum", bad is None, f"witness {bad!r}" if bad else ""))

    # reconstruction and injectivity for projectors that some context contains
    inside = [p for p in projs if any(v.contains(p) for v in poset)]
    bad = None
    subs = []
    for k, p in enumerate(inside):
        g = daseinise_global(p, poset)
        if not proj_eq(g.reconstruct(), p):
            bad = ("reconstruct", k)
            break
        subs.append(daseinise_subobject(p, poset))
    if bad is None and len(set(subs)) != len(subs):
        bad = ("collision",)
    add(Check("daseinisation is injective", bad is None, f"witness {bad!r}" if bad else f"{len(inside)} projectors"))

    bad_join = bad_meet = None
    for a, b in combinations(range(len(projs)), 2):
        p, q = projs[a], projs[b]
        dp, dq = daseinise_subobject(p, poset), daseinise_subobject(q, poset)
        if daseinise_subobject(proj_join(p, q), poset) != sub_join(dp, dq):
            bad_join = bad_join or (a, b)
        if not daseinise_subobject(proj_meet(p, q), poset) <= sub_meet(dp, dq):
            bad_meet = bad_meet or (a, b)
    add(Check("daseinisation preserves joins", bad_join is None, f"witness {bad_join!r}" if bad_join else ""))
    add(Check("daseinisation of a meet lies below the meet", bad_meet is None, f"witness {bad_meet!r}" if bad_meet else ""))

    bad = None
    for k, p in enumerate(projs):
        res = negation_check(p, poset)
        if not res:
            bad = (k, res.witness)
            break
    add(Check("outer daseinisation of 1-P is the complement of inner daseinisation of P", bad is None, f"witness {bad!r}" if bad else ""))

    bad = None
    for k, p in enumerate(projs):
        s = daseinise_subobject(p, poset)
        for j, i in poset.edges():
            if restrict_image(poset, s[i], j, i) != s[j]:
                bad = (k, poset.label(i), poset.label(j))
                break
        if bad:
            break
    add(Check("daseinised sub-objects restrict surjectively", bad is None, f"witness {bad!r}" if bad else ""))

    carrier = _all_or_sample(poset, EXHAUSTIVE_LIMIT)
    if carrier is not None:
        tables = HeytingTables(
            carrier, sub_meet, sub_join, sub_implies, sub_neg, lambda x, y: x <= y,
            ClopenSubobject.top(poset), ClopenSubobject.bottom(poset),
        )
        rep = check_laws(tables)
        detail = f"{len(carrier)} sub-objects, {rep.triples} triples, {len(rep.excluded_middle_failures)} without excluded middle"
        add(Check("clopen sub-objects form a Heyting algebra", rep.ok, detail if rep.ok else repr(rep.failures)))
    else:
        add(_sampled_heyting(poset, seed))

    bad = None
    for i in range(len(poset)):
        sv = all_sieves(poset, i)
        if len(sv) > EXHAUSTIVE_LIMIT:
            continue
        tables = HeytingTables(sv, sieve_meet, sieve_join, sieve_implies, sieve_neg, lambda x, y: x <= y,
                               sieve_top(poset, i), sieve_bottom(poset, i))
        rep = check_laws(tables)
        if not rep.ok:
            bad = (poset.label(i), rep.failures)
            break
    add(Check("sieves at each context form a Heyting algebra", bad is None, f"witness {bad!r}" if bad else ""))

    bad = None
    for k, p in enumerate(projs):
        res = characteristic_arrow(daseinise_subobject(p, poset)).check()
        if not res:
            bad = (k, res.witness)
            break
    add(Check("characteristic arrows are natural and classify their sub-objects", bad is None, f"witness {bad!r}" if bad else ""))

    add(_result("iota into the power object is natural and injective", check_iota(poset)))

    bad = None
    for name in sorted(model.states):
        s = model.states[name]
        t = truth_object(s, poset)
        support = s.projector() if isinstance(s, StateVector) else _support(s)
        for i, v in enumerate(poset):
            if v.projector(t.least(i)) != outer_at(support, v):
                bad = (name, v.label)
                break
        if bad:
            break
    add(Check("truth objects have the daseinised state as least element", bad is None, f"witness {bad!r}" if bad else f"{len(model.states)} states"))

    bad = None
    count = 0
    for name in sorted(model.states):
        s = model.states[name]
        t = truth_object(s, poset)
        for p in projs:
            count += 1
            if membership_valuation(daseinise_global(p, poset), t) != direct_truth_value(p, s, poset):
                bad = (name,)
                break
        if bad:
            break
    add(Check("truth values agree by truth object and by expectation", bad is None, f"witness {bad!r}" if bad else f"{count} evaluations"))

    if model.classical is not None:
        add(_classical_check(model))

    try:
        n = len(global_sections(spectral_presheaf(poset)))
        add(Check("global sections of the spectral presheaf", None, str(n)))
    except Exception as exc:  # cap exceedance is informative here, not a failure
        add(Check("global sections of the spectral presheaf", None, f"not counted: {exc}"))
    return checks


def _sampled_heyting(poset: ContextPoset, seed: int) -> Check:
    rng = np.random.default_rng(seed)
    bottom = ClopenSubobject.bottom(poset)
    for n in range(SAMPLED_TRIPLES):
        s, t, u = (random_subobject(poset, rng) for _ in range(3))
        if (sub_meet(s, t) <= u) != (s <= sub_implies(t, u)):
            return Check("clopen sub-objects form a Heyting algebra", False, f"adjunction fails at sample {n}")
        if sub_meet(s, sub_join(t, u)) != sub_join(sub_meet(s, t), sub_meet(s, u)):
            return Check("clopen sub-objects form a Heyting algebra", False, f"distributivity fails at sample {n}")
        if sub_meet(s, sub_neg(s)) != bottom or not s <= sub_neg(sub_neg(s)):
            return Check("clopen sub-objects form a Heyting algebra", False, f"negation law fails at sample {n}")
    return Check("clopen sub-objects form a Heyting algebra", True, f"{SAMPLED_TRIPLES} sampled triples")


def _classical_check(model: Model) -> Check:
    c = model.classical
    rng = np.random.default_rng(0)
    from .sampling import random_borel

    sets = [BorelSet.empty(), BorelSet.real_line()] + [random_borel(rng, -1, 10) for _ in range(18)]
    for name in sorted(c.quantities):
        for d in sets:
            for s in c.states:
                a = classical_truth(c, name, d, state=s)
                b = classical_truth(c, name, d, truth=classical_truth_object(c, s))
                if a != b:
                    return Check("classical truth by state and by truth object agree", False, f"witness {(name, str(d), s)!r}")
    return Check("classical truth by state and by truth object agree", True, f"{len(sets)} sets")


def format_report(checks: list[Check]) -> str:
    lines = []
    for c in checks:
        tag = "INFO" if c.ok is None else ("PASS" if c.ok else "FAIL")
        lines.append(f"{tag}  {c.name}" + (f": {c.detail}" if c.detail else ""))
    failed = sum(1 for c in checks if c.ok is False)
    passed = sum(1 for c in checks if c.ok)
    lines.append(f"{passed} passed, {failed} failed")
    return "\n".join(lines) + "\n"
