"""Integrals and modular data on groupoids, against direct fibre sums."""
import pytest
from hypothesis import given, settings, strategies as st

from mhalgebroid.algebra import Functional
from mhalgebroid.exactlin import Q
from mhalgebroid.groupoid_models import FiniteGroupoid, UnitMeasure, groupoid_base_weight, verify_groupoid
from mhalgebroid.integration import verify_integration


def fibre_sum_phi(G, mu):
    # phi(f) = sum over x of mu(x) times the sum of f over arrows ending at x
    return [sum((mu[x] for x in G.units if G.tgt[g] == x), Q(0)) for g in G.arrows]


def fibre_sum_psi(G, mu):
    return [sum((mu[x] for x in G.units if G.src[g] == x), Q(0)) for g in G.arrows]


def run(G, weights):
    mu = UnitMeasure(dict(zip(G.units, map(Q, weights))))
    rep, model, _ = verify_groupoid(G, mu, dual=False)
    return rep, model, mu


@pytest.fixture(scope="module")
def pair2_12():
    return run(FiniteGroupoid.pair(2), [1, 2])


def test_pair2_weighted_is_measured(pair2_12):
    rep, model, _ = pair2_12
    assert rep.all_passed, rep.failures()
    assert model.measured is not None


def test_modular_element_on_arrow_1_to_2(pair2_12):
    _, model, mu = pair2_12
    G = model.G
    g = next(a for a in G.arrows if G.src[a] == "1" and G.tgt[a] == "2")
    d = model.measured.modular.delta_vec
    assert d[G.index[g]] == Q(1, 2)
    # Radon-Nikodym quotient of the two fibre sums, arrow by arrow
    phi, psi = fibre_sum_phi(G, mu), fibre_sum_psi(G, mu)
    assert list(d) == [p / q for p, q in zip(psi, phi)]


def test_integrals_match_fibre_sums(pair2_12):
    _, model, mu = pair2_12
    M = model.measured
    assert list(M.phi.functional.coefficients) == fibre_sum_phi(model.G, mu)
    assert list(M.psi.functional.coefficients) == fibre_sum_psi(model.G, mu)
    assert M.phi.full and M.phi.faithful and M.psi.full and M.psi.faithful


def test_integral_space_has_base_dimension(pair2_12):
    _, model, _ = pair2_12
    I = model.measured.integ
    assert I.integral_space("left").dim == model.H.B.dim == 2
    assert I.integral_space("right").dim == model.H.C.dim == 2


def test_commutative_total_algebra_has_trivial_sigma(pair2_12):
    _, model, _ = pair2_12
    md = model.measured.modular
    assert md.sigma_phi.rank() == 4
    assert all(md.sigma_phi.apply(model.H.A.e(i)) == model.H.A.e(i) for i in range(4))


@settings(max_examples=8)
@given(st.lists(st.integers(1, 9), min_size=2, max_size=2))
def test_random_measures_on_pair2(weights):
    G = FiniteGroupoid.pair(2)
    rep, model, mu = run(G, weights)
    assert rep.all_passed, rep.failures()
    d = model.measured.modular.delta_vec
    assert list(d) == [mu[G.src[g]] / mu[G.tgt[g]] for g in G.arrows]


def test_zero_weight_is_not_a_base_weight():
    rep, model, _ = run(FiniteGroupoid.pair(2), [1, 0])
    assert not rep.passed("base-weight")
    assert model.measured is None


def test_wrong_phi_is_rejected():
    G = FiniteGroupoid.cyclic(2)
    _, model, _ = run(G, [1])
    H = model.H
    # counting on the non-identity arrow only: not invariant
    bad = Functional(H.A, (Q(0), Q(1)))
    rep, M = verify_integration(H, groupoid_base_weight(G, UnitMeasure.uniform(G)), phi=bad)
    assert M is None
    assert not rep.all_passed


def test_integration_without_supplied_integrals_finds_them():
    G = FiniteGroupoid.cyclic(3)
    _, model, _ = run(G, [1])
    rep, M = verify_integration(model.H, groupoid_base_weight(G, UnitMeasure.uniform(G)))
    assert rep.all_passed, rep.failures()
    # a group: the left integral is a multiple of the counit of the dual, i.e. the sum of all values
    c = M.phi.functional.coefficients
    assert c[0] != 0 and all(x == c[0] for x in c)
