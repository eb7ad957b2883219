import pytest
from hypothesis import given, strategies as st

from mhalgebroid.algebra import (Functional, StructureAlgebra, check_algebra_health, elementary,
                                 modular_automorphism_of, multiplier_algebra)
from mhalgebroid.exactlin import Matrix, Q

small = st.integers(-4, 4).map(Q)
positive = st.integers(1, 6).map(Q)


def matrix_units(n):
    """M_n with basis e_ij at index i*n + j."""
    mult = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                mult[(i * n + j, j * n + k)] = {i * n + k: Q(1)}
    star = Matrix([[Q(int(r == j * n + i)) for i in range(n) for j in range(n)] for r in range(n * n)], n * n)
    return StructureAlgebra([f"e{i}{j}" for i in range(n) for j in range(n)], mult, star, f"M{n}")


def cyclic_algebra(n):
    return StructureAlgebra([f"g{i}" for i in range(n)],
                            {(i, j): {(i + j) % n: Q(1)} for i in range(n) for j in range(n)}, name=f"kZ{n}")


def vec(n):
    return st.lists(small, min_size=n, max_size=n)


M2 = matrix_units(2)


@pytest.mark.parametrize("A", [M2, matrix_units(3), cyclic_algebra(3)], ids=lambda A: A.name)
def test_structure_is_healthy(A):
    assert A.associativity_defect() is None
    h = check_algebra_health(A)
    assert h.unital and h.nondegenerate and h.idempotent
    assert A.star is None or A.star_defect() is None


@given(vec(4), vec(4), vec(4))
def test_associative_on_elements(a, b, c):
    assert M2.mul(M2.mul(a, b), c) == M2.mul(a, M2.mul(b, c))


@given(vec(4), vec(4))
def test_star_antimultiplicative(a, b):
    assert M2.star_vec(M2.mul(a, b)) == M2.mul(M2.star_vec(b), M2.star_vec(a))


def test_unit_of_matrix_units():
    assert M2.unit() == [1, 0, 0, 1]


@pytest.mark.parametrize("A", [M2, cyclic_algebra(2)], ids=lambda A: A.name)
def test_multiplier_algebra_of_unital_algebra_is_itself(A):
    M = multiplier_algebra(A)
    assert M.is_isomorphism
    assert M.algebra.n == A.n


def test_nonunital_algebra_is_flagged():
    # one nilpotent generator: every product vanishes
    A = StructureAlgebra(["n"], {}, name="nil")
    assert not check_algebra_health(A).nondegenerate
    with pytest.raises(ValueError):
        multiplier_algebra(A)


@given(positive, positive, vec(4), vec(4))
def test_modular_automorphism_of_weighted_trace(k1, k2, a, b):
    # w(x) = tr(K x) with K = diag(k1, k2); then w(ab) = w(b sigma(a)) with sigma(a) = K a K^-1
    w = Functional(M2, (k1, Q(0), Q(0), k2))
    sigma = modular_automorphism_of(w)
    assert sigma is not None
    assert w(M2.mul(a, b)) == w(M2.mul(b, sigma.apply(a)))
    K, Kinv = [k1, 0, 0, k2], [1 / k1, 0, 0, 1 / k2]
    assert sigma.apply(a) == M2.mul_many(K, a, Kinv)


@given(vec(4), vec(4), vec(4))
def test_functional_actions(w, a, b):
    f = Functional(M2, tuple(w))
    # (a.f)(b) = f(b a) and (f.a)(b) = f(a b)
    assert f.left_by(a)(b) == f(M2.mul(b, a))
    assert f.right_by(a)(b) == f(M2.mul(a, b))


@given(vec(4), vec(4), vec(4))
def test_tensor_leg_multiplication(a, b, c):
    t = elementary(a, b)
    assert M2.lmul_leg(t, 0, c) == elementary(M2.mul(c, a), b)
    assert M2.rmul_leg(t, 1, c) == elementary(a, M2.mul(b, c))


def test_json_roundtrip():
    d = M2.to_json()
    B = StructureAlgebra.from_json(d, "M2")
    assert B.to_json() == d
