import dataclasses

import pytest

from conftest import pipeline
from mhalgebroid.crossed_models import (CrossedModelError, build_crossed_product, cyclic_table, function_hopf,
                                        grading_model, group_hopf, hopf_defect, swap_action_model,
                                        trivial_action_model, verify_crossed)
from mhalgebroid.exactlin import Matrix, Q
from mhalgebroid.registry import GROUPS


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("make", [group_hopf, function_hopf], ids=["kG", "C(G)"])
def test_finite_hopf_algebras(make, n):
    els, tab = cyclic_table(n)
    Hf = make(els, tab)
    assert hopf_defect(Hf) is None
    assert Hf.n == n


def test_bad_group_table():
    with pytest.raises(CrossedModelError, match="identity"):
        group_hopf(["a", "b"], [[1, 0], [0, 1]])
    with pytest.raises(CrossedModelError, match="no entry"):
        group_hopf(["e", "g"], [[0, 1]])


def test_swap_crossed_product_dimensions():
    Hf, D = swap_action_model()
    H, cp = build_crossed_product(Hf, D)
    assert H.n == 8 and H.B.dim == 2 and H.C.dim == 2


def test_swap_model_full_pipeline():
    res = pipeline("swap_crossed")
    rep = res.report
    assert rep.all_passed, rep.failures()
    assert {c.name for c in rep.checks if c.group == "examples"} == set(GROUPS["examples"]) - {
        "groupoid-hopf", "groupoid-measured", "groupoid-dual"}


@pytest.mark.parametrize("make", [lambda: trivial_action_model((1, 2)), grading_model],
                         ids=["trivial(1,2)", "grading"])
def test_other_coupled_models(make):
    rep, model, _ = verify_crossed(*make(), dual=False)
    assert rep.all_passed, rep.failures()
    assert model.measured is not None


def test_swap_weights_must_be_invariant():
    # the swap forces mu_B(p1) = mu_B(p2)
    rep, model, _ = verify_crossed(*swap_action_model((1, 2)), dual=False)
    assert not rep.passed("coupled-invariance")
    assert model is None


def test_non_multiplicative_action_is_caught():
    Hf, D = swap_action_model()
    bad = Matrix([[Q(1), Q(1)], [Q(0), Q(0)]], 2)
    rep, _, _ = verify_crossed(Hf, dataclasses.replace(D, left_action=[D.left_action[0], bad]), dual=False)
    assert not rep.passed("coupled-action")
