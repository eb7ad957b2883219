import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import read_doc
from mhalgebroid.exactlin import Q
from mhalgebroid.groupoid_models import (FiniteGroupoid, GroupoidError, UnitMeasure, convolution_algebra,
                                         groupoid_comult, groupoid_from_json, modular_function)


def brute_convolution(G, f, g):
    out = {k: Q(0) for k in G.arrows}
    for a, b in itertools.product(G.arrows, repeat=2):
        if G.src[a] == G.tgt[b]:
            out[G.mul(a, b)] += f[a] * g[b]
    return [out[k] for k in G.arrows]


GROUPOIDS = [FiniteGroupoid.cyclic(3), FiniteGroupoid.pair(3),
             FiniteGroupoid.disjoint_union(FiniteGroupoid.cyclic(2), FiniteGroupoid.pair(2))]


@pytest.mark.parametrize("G", GROUPOIDS, ids=lambda G: G.name)
@given(data=st.data())
def test_convolution_against_brute_force(G, data):
    vals = st.lists(st.integers(-3, 3).map(Q), min_size=len(G.arrows), max_size=len(G.arrows))
    f, g = data.draw(vals), data.draw(vals)
    A = convolution_algebra(G, UnitMeasure.uniform(G))
    assert A.mul(f, g) == brute_convolution(G, dict(zip(G.arrows, f)), dict(zip(G.arrows, g)))


@pytest.mark.parametrize("G", GROUPOIDS, ids=lambda G: G.name)
def test_comultiplication_splits_over_composable_pairs(G):
    D = groupoid_comult(G)
    idx = G.index
    for k in G.arrows:
        expected = {(idx[a], idx[b]) for a, b in itertools.product(G.arrows, repeat=2)
                    if G.src[a] == G.tgt[b] and G.mul(a, b) == k}
        assert set(D[idx[k]]) == expected
        assert all(c == 1 for c in D[idx[k]].values())


def test_modular_function_cocycle():
    G = FiniteGroupoid.pair(3)
    mu = UnitMeasure({"1": Q(1), "2": Q(2), "3": Q(5)})
    d = dict(zip(G.arrows, modular_function(G, mu)))
    for a, b in itertools.product(G.arrows, repeat=2):
        if G.composable(a, b):
            assert d[G.mul(a, b)] == d[a] * d[b]


def test_json_roundtrip():
    G = FiniteGroupoid.pair(3)
    H, _ = groupoid_from_json(G.to_json(), "again")
    assert H.arrows == G.arrows and H.compose == G.compose and H.inverse == G.inverse


def test_fixture_measure_as_dict_or_list():
    d = read_doc("pair3")["payload"]
    G, mu = groupoid_from_json(d)
    G2, mu2 = groupoid_from_json(dict(d, measure=["1", "2", "3"]))
    assert mu.weights == mu2.weights


@pytest.mark.parametrize("broken,match", [
    ({"units": ["x"], "arrows": [{"id": "g", "src": "x", "tgt": "x"}], "compose": [["g", "g", "x"]]},
     "no inverse"),
    ({"units": ["x"], "arrows": [{"id": "g", "src": "x", "tgt": "y"}]}, "outside the unit space"),
    ({"units": ["x"], "arrows": [{"id": "g", "src": "x", "tgt": "x"}], "inverse": [["g", "g"]]}, "missing"),
    ({"units": ["x"], "measure": {"x": "-1"}}, "strictly positive"),
    ({"arrows": []}, "malformed"),
])
def test_bad_groupoids_are_rejected(broken, match):
    with pytest.raises(GroupoidError, match=match):
        groupoid_from_json(broken)


def test_non_positive_measure_allowed_when_asked():
    G, mu = groupoid_from_json({"units": ["x"], "measure": {"x": "-1"}}, positive=False)
    assert mu.nonpositive(G)
