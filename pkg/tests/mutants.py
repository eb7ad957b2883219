"""Seeded single-constant corruptions of known-good models.

Each builder returns (report, expected_group): the report of the corrupted
model and the registry group whose checks are responsible for catching it.
"""
import dataclasses
import random

from mhalgebroid.algebroid import HopfAlgebroid, verify_axioms
from mhalgebroid.crossed_models import swap_action_model, verify_crossed
from mhalgebroid.exactlin import Matrix, Q
from mhalgebroid.groupoid_models import FiniteGroupoid, UnitMeasure, build_groupoid_algebroid, verify_groupoid

SEED = 20261014


def _bump(M: Matrix, i: int, j: int, by=Q(1)) -> Matrix:
    rows = [list(r) for r in M.rows]
    rows[i][j] += by
    return Matrix(rows, M.ncols)


def comultiplication(seed=SEED):
    rng = random.Random(seed)
    H = build_groupoid_algebroid(FiniteGroupoid.cyclic(2))
    D_B = [dict(t) for t in H.data.D_B]
    a = rng.randrange(len(D_B))
    key = rng.choice(sorted(D_B[a]))
    D_B[a][key] += Q(1)
    return verify_axioms(HopfAlgebroid(dataclasses.replace(H.data, D_B=D_B))), "hopf-algebroid"


def antipode(seed=SEED):
    rng = random.Random(seed + 1)
    H = build_groupoid_algebroid(FiniteGroupoid.pair(2))
    S = H.antipode()
    i, j = rng.randrange(S.nrows), rng.randrange(S.ncols)
    return verify_axioms(HopfAlgebroid(dataclasses.replace(H.data, antipode=_bump(S, i, j)))), "hopf-algebroid"


def measure_positivity(seed=SEED):
    rng = random.Random(seed + 2)
    G = FiniteGroupoid.pair(2)
    w = {u: Q(1) for u in G.units}
    w[rng.choice(G.units)] = Q(-1)
    rep, _, _ = verify_groupoid(G, UnitMeasure(w), dual=False)
    return rep, "integration"


def action_compatibility(seed=SEED):
    rng = random.Random(seed + 3)
    Hf, D = swap_action_model()
    right = list(D.right_action)
    h = rng.randrange(1, len(right))  # leave the unit's action alone
    right[h] = _bump(right[h], rng.randrange(2), rng.randrange(2))
    rep, _, _ = verify_crossed(Hf, dataclasses.replace(D, right_action=right), dual=False)
    return rep, "examples"


def involution(seed=SEED):
    rng = random.Random(seed + 4)
    H = build_groupoid_algebroid(FiniteGroupoid.cyclic(2))
    A = H.A
    star = _bump(A.star, rng.randrange(A.n), rng.randrange(A.n))
    A2 = type(A)(list(A.labels), {k: dict(v) for k, v in A.table.items()}, star, A.name)
    return verify_axioms(HopfAlgebroid(dataclasses.replace(H.data, A=A2))), "hopf-algebroid"


MUTANTS = {
    "comultiplication": comultiplication,
    "antipode": antipode,
    "measure positivity": measure_positivity,
    "action compatibility": action_compatibility,
    "involution": involution,
}
