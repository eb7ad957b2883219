import pytest

from conftest import GROUPOID_FIXTURES, model, pipeline
from mhalgebroid.cli import dual_json
from mhalgebroid.exactlin import Q
from mhalgebroid.registry import GROUPS


def products(DM):
    A = DM.algebra.hatA
    return {(i, j): A.mul(A.e(i), A.e(j)) for i in range(A.n) for j in range(A.n)}


def test_z2_dual_is_the_group_algebra():
    res = pipeline("z2_group")
    P = products(res.dual)
    # omega_e is the unit, omega_g squares to it
    assert P[(0, 0)] == [1, 0] and P[(0, 1)] == [0, 1] and P[(1, 0)] == [0, 1] and P[(1, 1)] == [1, 0]


def test_pair2_dual_is_a_matrix_algebra():
    res = pipeline("pair2")
    A = res.dual.algebra.hatA
    assert A.n == 4
    # 2x2 matrices: centre is one dimensional
    centre = [i for i in range(4) if all(A.mul(A.e(i), A.e(j)) == A.mul(A.e(j), A.e(i)) for j in range(4))]
    unit = A.unit()
    assert unit is not None
    nonscalar_central = [i for i in centre if A.e(i) != unit]
    assert len(nonscalar_central) <= 1
    # it is not commutative
    assert any(A.mul(A.e(i), A.e(j)) != A.mul(A.e(j), A.e(i)) for i in range(4) for j in range(4))


@pytest.mark.parametrize("name", GROUPOID_FIXTURES)
def test_duality_checks_pass(name):
    res = pipeline(name)
    names = {c.name for c in res.report.checks if c.group == "duality"}
    assert names == set(GROUPS["duality"])
    assert all(c.passed for c in res.report.checks if c.group == "duality"), res.report.failures()


@pytest.mark.parametrize("name", GROUPOID_FIXTURES)
def test_bidual_preserves_integrals(name):
    res = pipeline(name)
    cert = res.bidual
    M = res.measured
    iso = cert.iso
    phi2 = cert.bidual.hat_phi.functional
    psi2 = cert.bidual.hat_psi.functional
    A = M.integ.H.A
    for a in range(A.n):
        img = iso.column(a)
        assert phi2(img) == M.phi.functional(A.e(a))
        assert psi2(img) == M.psi.functional(A.e(a))


@pytest.mark.parametrize("name", ["pair2_weighted", "z2_pair2"])
def test_dual_integrals_are_the_counit(name):
    # with omega_g = delta_g . phi, both dual integrals integrate over the units against mu
    res = pipeline(name)
    DM, G, mu = res.dual, res.source.G, res.source.mu
    eps = [mu[g] if g in G.units else Q(0) for g in G.arrows]
    hatA = DM.algebra.hatA
    assert [DM.hat_phi.functional(hatA.e(i)) for i in range(hatA.n)] == eps
    assert [DM.hat_psi.functional(hatA.e(i)) for i in range(hatA.n)] == eps


def test_dual_dump_is_deterministic():
    a = dual_json(model("pair2_weighted"), pipeline("pair2_weighted"))
    b = dual_json(model("pair2_weighted"), pipeline("pair2_weighted"))
    assert a == b
    assert a["canonical_ranks"] == {"T_lambda": 8, "T_rho": 8, "lT": 8, "rT": 8}
