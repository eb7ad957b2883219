"""The ten acceptance criteria, one test each.

Each test records a PASS/FAIL line that the terminal summary prints at the end
of the run (see conftest.py); with -s the lines also appear inline.
"""
import functools
import random
import time

import pytest

import mutants
from conftest import ALL_FIXTURES, CROSSED_FIXTURES, GROUPOID_FIXTURES, model, pipeline
from mhalgebroid.algebra import basis_vec, elementary, is_faithful, tensor_sub
from mhalgebroid.algebroid import verify_axioms
from mhalgebroid.crossed_models import build_crossed_product
from mhalgebroid.exactlin import Gaussian, Matrix, Q
from mhalgebroid.groupoid_models import (UnitMeasure, build_groupoid_algebroid, convolution_algebra,
                                         verify_groupoid)
from mhalgebroid.registry import GROUPS

CRITERIA = []  # (number, title, passed, note), read by conftest.pytest_terminal_summary
AXIOM_FIXTURES = ["trivial", "z2_group", "z3_group", "pair2", "pair3", "z2_pair2", "swap_crossed"]


def criterion(number, title):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                note = fn(*args, **kwargs) or ""
            except BaseException as ex:
                CRITERIA.append((number, title, False, f"{type(ex).__name__}: {str(ex).splitlines()[0] if str(ex) else ''}"))
                print(f"criterion {number:2d} FAIL  {title}")
                raise
            CRITERIA.append((number, title, True, note))
            print(f"criterion {number:2d} PASS  {title}  {note}")
        return wrapper
    return deco


def algebroid_of(name):
    m = model(name)
    if m.kind == "groupoid":
        return build_groupoid_algebroid(m.built["G"])
    return build_crossed_product(m.built["H"], m.built["D"])[0]


def counit_functional(M):
    I, H = M.integ, M.integ.H
    return lambda a: I.muB(H.eps_B(a))


# 1 -------------------------------------------------------------------------


@criterion(1, "axiom suite on the fixture set")
def test_c01_axiom_suite():
    t0 = time.perf_counter()
    bad = {}
    for name in AXIOM_FIXTURES:
        rep = verify_axioms(algebroid_of(name))
        hopf = [c for c in rep.checks if c.group == "hopf-algebroid"]
        core = [c for c in hopf if not c.name.startswith("star-") and c.name != "involutions"]
        assert len(core) == len(GROUPS["hopf-algebroid"]) - 3
        if not all(c.passed for c in hopf):
            bad[name] = [c.name for c in hopf if not c.passed]
    elapsed = time.perf_counter() - t0
    assert not bad, bad
    assert elapsed < 5.0, f"{elapsed:.2f}s"
    return f"{len(AXIOM_FIXTURES)} fixtures in {elapsed:.2f}s"


# 2 -------------------------------------------------------------------------


def measure_choices(G):
    m = len(G.units)
    out = [("uniform", [1] * m)]
    if m == 2:
        out.append(("(1,2)", [1, 2]))
    if m == 3:
        out.append(("(1,2,3)", [1, 2, 3]))
    return out


@criterion(2, "integral uniqueness: dim = dim B and x -> x.phi bijective")
def test_c02_integral_uniqueness():
    runs = 0
    for name in GROUPOID_FIXTURES:
        G = model(name).built["G"]
        for label, w in measure_choices(G):
            _, gm, _ = verify_groupoid(G, UnitMeasure(dict(zip(G.units, map(Q, w)))), dual=False)
            M = gm.measured
            assert M is not None, (name, label)
            _check_uniqueness(M, (name, label))
            runs += 1
    for name in CROSSED_FIXTURES:
        _check_uniqueness(pipeline(name).measured, (name, "uniform"))
        runs += 1
    return f"{runs} fixture/measure pairs"


def _check_uniqueness(M, tag):
    I, H = M.integ, M.integ.H
    left = I.integral_space("left")
    assert left.dim == H.B.dim, tag
    images = [list(M.phi.functional.left_by(x).coefficients) for x in H.B.vectors]
    assert Matrix(images, H.n).rank() == H.B.dim, tag
    assert all(left.contains(v) for v in images), tag


# 3 -------------------------------------------------------------------------


@criterion(3, "modular data: sigma|_C = S^2, S(delta_dag) = delta^-1, eps.delta = eps, Delta(delta)")
def test_c03_modular_data():
    for name in ALL_FIXTURES:
        res = pipeline(name)
        M = res.measured
        H, A = M.integ.H, M.integ.H.A
        md = M.modular
        d, dd = md.delta_vec, md.delta_dag_vec
        for y in H.C.vectors:
            assert md.sigma_phi.apply(y) == H.S(H.S(y)), name
        assert A.mul(H.S(dd), d) == H.unit and A.mul(d, H.S(dd)) == H.unit, name
        eps = counit_functional(M)
        for a in range(H.n):
            assert eps(A.mul(d, A.e(a))) == eps(A.e(a)), name
        assert H.quot("ool").is_zero(tensor_sub(H.lift_DB(d), elementary(dd, d))), name
        assert H.quot("oor").is_zero(tensor_sub(H.lift_DC(d), elementary(d, d))), name
        assert res.report.passed("modular-automorphism") and res.report.passed("modular-element-second"), name
    # oracle: the quotient of the two fibre sums on the arrow 1 -> 2
    res = pipeline("pair2_weighted")
    G, mu = res.source.G, res.source.mu
    g = next(a for a in G.arrows if G.src[a] == "1" and G.tgt[a] == "2")
    ratio = mu[G.src[g]] / mu[G.tgt[g]]
    assert ratio == Q(1, 2)
    assert res.measured.modular.delta_vec[G.index[g]] == ratio
    return "delta(1->2) = 1/2"


# 4 -------------------------------------------------------------------------


def _brute_convolution(G, i, j):
    a, b = G.arrows[i], G.arrows[j]
    out = [Q(0)] * len(G.arrows)
    if G.src[a] == G.tgt[b]:
        out[G.index[G.mul(a, b)]] = Q(1)
    return out


@criterion(4, "groupoid duality against the enumerated convolution algebra")
def test_c04_groupoid_duality():
    for name in GROUPOID_FIXTURES:
        res = pipeline(name)
        G, mu, DM = res.source.G, res.source.mu, res.dual
        n, idx = len(G.arrows), G.index
        hatA = DM.algebra.hatA
        for i in range(n):
            for j in range(n):
                assert hatA.mul(hatA.e(i), hatA.e(j)) == _brute_convolution(G, i, j), name
        delta = {g: mu[G.src[g]] / mu[G.tgt[g]] for g in G.arrows}
        S = DM.dual_algebroid.antipode()
        for g in G.arrows:
            # S^(f)(k) = f(k^-1) delta(k), so delta_g goes to delta(g^-1) delta_{g^-1}
            gi = G.inverse[g]
            assert S.column(idx[g]) == [delta[gi] if k == gi else Q(0) for k in G.arrows], name
        eps = [mu[g] if g in G.units else Q(0) for g in G.arrows]
        assert [DM.hat_phi.functional(hatA.e(i)) for i in range(n)] == eps, name
        assert [DM.hat_psi.functional(hatA.e(i)) for i in range(n)] == eps, name
        sig = DM.measured.modular.sigma_phi
        assert sig == Matrix([[1 / delta[g] if g == h else Q(0) for h in G.arrows] for g in G.arrows], n), name
        assert convolution_algebra(G, mu).star == hatA.star, name
        assert res.report.passed("groupoid-dual"), name
    return f"{len(GROUPOID_FIXTURES)} groupoids"


# 5 -------------------------------------------------------------------------


@criterion(5, "crossed-product duality on the Z/2 swap model")
def test_c05_crossed_duality():
    res = pipeline("swap_crossed")
    assert res.measured.integ.H.n == 8
    assert res.dual.algebra.n == 8
    c = res.report.get("coupled-dual")
    assert c is not None and c.passed, c
    return c.witness


# 6 -------------------------------------------------------------------------


@criterion(6, "biduality certified with phi^^ = phi and psi^^ = psi, < 10 s per fixture")
def test_c06_biduality():
    from mhalgebroid.duality import bidual_isomorphism
    worst = 0.0
    for name in ALL_FIXTURES:
        res = pipeline(name)
        assert res.report.passed("biduality"), name
        M, DM = res.measured, res.dual
        t0 = time.perf_counter()
        cert = bidual_isomorphism(M, DM)
        worst = max(worst, time.perf_counter() - t0)
        assert cert.report.all_passed, (name, cert.report.failures())
        A = M.integ.H.A
        assert cert.iso.rank() == A.n
        for a in range(A.n):
            img = cert.iso.column(a)
            assert cert.bidual.hat_phi.functional(img) == M.phi.functional(A.e(a)), name
            assert cert.bidual.hat_psi.functional(img) == M.psi.functional(A.e(a)), name
    assert worst < 10.0
    return f"slowest certificate {worst:.2f}s"


# 7 -------------------------------------------------------------------------


@criterion(7, "duality of multipliers and Delta at 1, delta, delta_dag")
def test_c07_multipliers():
    for name in ALL_FIXTURES:
        rep = pipeline(name).report
        assert rep.passed("dual-multipliers") and rep.passed("mult-comult"), name
    # independent oracle on groupoids: (w_g w_h)(c) = [s(g) = t(h)] mu(t(g)) c(gh)
    for name in GROUPOID_FIXTURES:
        res = pipeline(name)
        G, mu, D = res.source.G, res.source.mu, res.dual.algebra
        md = res.measured.modular
        n = len(G.arrows)
        for c in (D.H.unit, md.delta_vec, md.delta_dag_vec):
            for i, g in enumerate(G.arrows):
                for j, h in enumerate(G.arrows):
                    lhs = D.functional(D.hatA.mul(basis_vec(n, i), basis_vec(n, j)))(c)
                    rhs = mu[G.tgt[g]] * c[G.index[G.mul(g, h)]] if G.composable(g, h) else Q(0)
                    assert lhs == rhs, (name, g, h)
    return ""


# 8 -------------------------------------------------------------------------


@criterion(8, "full integrals are faithful")
def test_c08_full_implies_faithful():
    rng = random.Random(8)
    seen = 0
    for name in ALL_FIXTURES:
        res = pipeline(name)
        assert res.report.passed("integrals-faithful"), name
        M = res.measured
        I, H = M.integ, M.integ.H
        for _ in range(6):
            coeffs = [Q(rng.randint(-2, 2)) for _ in range(H.B.dim)]
            x = [sum((c * v[k] for c, v in zip(coeffs, H.B.vectors)), Q(0)) for k in range(H.n)]
            omega = M.phi.functional.left_by(x)
            af = I.factorize(omega)
            assert af is not None
            if I.is_full(af, "left"):
                seen += 1
                assert is_faithful(omega), name
    assert seen > 0
    return f"{seen} sampled full left integrals, all faithful"


# 9 -------------------------------------------------------------------------


@criterion(9, "mutation sensitivity")
def test_c09_mutation_sensitivity():
    notes = []
    for label, make in mutants.MUTANTS.items():
        rep, group = make()
        failing = rep.failures()
        assert failing, label
        assert failing[0].group == group, (label, failing[0].name)
        notes.append(f"{label} -> {failing[0].name}")
    return "; ".join(notes)


# 10 ------------------------------------------------------------------------


@criterion(10, "*-structure over Q(i) on the Z/2 groupoid")
def test_c10_star_structure():
    res = pipeline("z2_group", "Qi")
    assert res.report.passed("dual-involution") and res.report.passed("dual-positivity")
    DM = res.dual
    D, hatA = DM.algebra, DM.algebra.hatA
    A = D.H.A
    phi, psi_hat = res.measured.phi.functional, DM.hat_psi.functional
    rng = random.Random(10)
    samples = [A.e(i) for i in range(A.n)]
    samples += [[Gaussian(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(A.n)] for _ in range(20)]
    for a in samples:
        w = D.coords(phi.left_by(a))
        assert psi_hat(hatA.mul(hatA.star_vec(w), w)) == phi(A.mul(A.star_vec(a), a))
    return f"{len(samples)} elements"


@pytest.fixture(autouse=True, scope="module")
def _fixtures_exist():
    for name in ALL_FIXTURES:
        model(name)
