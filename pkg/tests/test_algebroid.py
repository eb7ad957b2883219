import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from mhalgebroid.algebroid import HopfAlgebroid, verify_axioms
from mhalgebroid.exactlin import Q
from mhalgebroid.groupoid_models import (FiniteGroupoid, build_groupoid_algebroid, closed_form_antipode,
                                         closed_form_counits)
from mhalgebroid.registry import GROUPS

SMALL = {
    "point": lambda: FiniteGroupoid.cyclic(1),
    "Z2": lambda: FiniteGroupoid.cyclic(2),
    "Z3": lambda: FiniteGroupoid.cyclic(3),
    "pair2": lambda: FiniteGroupoid.pair(2),
    "Z2+pair2": lambda: FiniteGroupoid.disjoint_union(FiniteGroupoid.cyclic(2), FiniteGroupoid.pair(2)),
}
TAGS = ("ool", "oor", "oob", "ooc", "ooB", "ooC")


@pytest.fixture(scope="module", params=sorted(SMALL))
def built(request):
    G = SMALL[request.param]()
    H = build_groupoid_algebroid(G)
    return G, H, verify_axioms(H)


def test_every_axiom_holds(built):
    _, _, rep = built
    assert rep.all_passed, rep.failures()
    assert rep.summary["regular"] is True
    assert [c.name for c in rep.checks] == list(GROUPS["hopf-algebroid"])


def test_counits_and_antipode_match_closed_forms(built):
    G, H, _ = built
    assert H.counits() == closed_form_counits(G)
    assert H.antipode() == closed_form_antipode(G)


def test_balanced_tensor_dimensions(built):
    # in a groupoid |s^-1(x)| = |t^-1(x)|, so every balanced square has sum_x |t^-1(x)|^2 elements
    G, H, _ = built
    expected = sum(sum(1 for g in G.arrows if G.tgt[g] == x) ** 2 for x in G.units)
    for tag in TAGS:
        assert H.quot(tag).dim == expected, tag


def test_z3_antipode_inverts():
    G = FiniteGroupoid.cyclic(3)
    S = build_groupoid_algebroid(G).antipode()
    # delta_g -> delta_{g^-1}: columns are permutation vectors
    assert S.column(1) == [0, 0, 1] and S.column(2) == [0, 1, 0]


def test_regular_flag_fails_on_nonregular_comultiplication():
    # Delta(f) = f (x) 1 is multiplicative but its canonical maps are not bijective
    H = build_groupoid_algebroid(FiniteGroupoid.cyclic(2))
    one = H.unit
    D = [{(i, j): c for j, c in enumerate(one) if c != 0} for i in range(H.n)]
    rep = verify_axioms(HopfAlgebroid(dataclasses.replace(H.data, D_B=D, D_C=[dict(t) for t in D])))
    assert not rep.all_passed
    assert rep.summary["regular"] is False


@settings(max_examples=15)
@given(st.integers(0, 1), st.integers(0, 3), st.sampled_from([Q(1), Q(-1), Q(1, 2)]))
def test_single_comultiplication_corruption_is_detected(a, k, by):
    H = build_groupoid_algebroid(FiniteGroupoid.cyclic(2))
    D = [dict(t) for t in H.data.D_C]
    keys = [(i, j) for i in range(2) for j in range(2)]
    key = keys[k]
    D[a][key] = D[a].get(key, 0) + by
    if D[a][key] == 0:
        del D[a][key]
    rep = verify_axioms(HopfAlgebroid(dataclasses.replace(H.data, D_C=D)))
    assert not rep.all_passed
    assert all(c.group == "hopf-algebroid" for c in rep.failures())


@settings(max_examples=6)
@given(st.lists(st.sampled_from(["c1", "c2", "c3", "p2"]), min_size=1, max_size=2))
def test_random_disjoint_unions_are_regular(parts):
    make = {"c1": lambda: FiniteGroupoid.cyclic(1), "c2": lambda: FiniteGroupoid.cyclic(2),
            "c3": lambda: FiniteGroupoid.cyclic(3), "p2": lambda: FiniteGroupoid.pair(2)}
    G = make[parts[0]]()
    for p in parts[1:]:
        G = FiniteGroupoid.disjoint_union(G, make[p]())
    rep = verify_axioms(build_groupoid_algebroid(G))
    assert rep.all_passed, rep.failures()


def test_report_json_shape(built):
    _, _, rep = built
    d = rep.to_json()
    assert set(d) == {"checks", "summary"}
    assert all(set(c) == {"name", "pass", "witness"} for c in d["checks"])
