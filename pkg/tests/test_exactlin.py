from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mhalgebroid.exactlin import (Gaussian, LabeledSpace, Matrix, Q, QuotientSpace, Subspace, format_scalar,
                                  parse_scalar, solve_sparse, sparse_rank)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=6).map(Q)
gaussians = st.builds(Gaussian, rationals, rationals)


def matrices(n, m):
    return st.lists(st.lists(rationals, min_size=m, max_size=m), min_size=n, max_size=n).map(lambda r: Matrix(r, m))


@given(rationals)
def test_scalar_roundtrip(q):
    assert parse_scalar(format_scalar(q)) == q


@given(gaussians)
def test_gaussian_roundtrip(z):
    assert parse_scalar(format_scalar(z)) == z


@pytest.mark.parametrize("text,val", [("3/4", Q(3, 4)), ("-2", Q(-2)), ("i", Gaussian(0, 1)),
                                      ("1/2-3*i", Gaussian(Q(1, 2), -3)), ("-i", Gaussian(0, -1))])
def test_parse_examples(text, val):
    assert parse_scalar(text) == val


def test_parse_rejects_bool_and_float():
    with pytest.raises(TypeError):
        parse_scalar(True)
    with pytest.raises(TypeError):
        parse_scalar(0.5)


@given(gaussians, gaussians, gaussians)
def test_gaussian_field(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b != 0:
        assert (a / b) * b == a
    assert (a * b).conj() == a.conj() * b.conj()


def test_fraction_inputs_are_converted():
    assert parse_scalar(Fraction(1, 3)) * 3 == 1


@given(matrices(3, 3))
def test_inverse_or_singular(M):
    if M.rank() == 3:
        assert M @ M.inverse() == Matrix.identity(3)
    else:
        assert M.kernel()
        for k in M.kernel():
            assert all(x == 0 for x in M.apply(k))


@given(matrices(3, 4), st.lists(rationals, min_size=3, max_size=3))
def test_solve_is_consistent(M, b):
    x, ker = M.solve(b)
    if x is not None:
        assert M.apply(x) == b
    assert len(ker) == 4 - M.rank()


@given(matrices(4, 3))
def test_rank_nullity(M):
    assert M.rank() + len(M.kernel()) == 3
    assert M.rank() == M.T.rank()


@given(matrices(3, 4))
def test_sparse_solver_agrees_with_dense(M):
    rows = [({j: c for j, c in enumerate(r) if c != 0}, Q(1)) for r in M.rows]
    sol = solve_sparse(rows, 4)
    x, ker = M.solve([Q(1)] * 3)
    assert (sol.particular is None) == (x is None)
    assert len(sol.kernel) == len(ker)
    if sol.particular is not None:
        assert M.apply(sol.particular) == [Q(1)] * 3
    assert sparse_rank({j: c for j, c in enumerate(r) if c != 0} for r in M.rows) == M.rank()


@given(st.lists(st.lists(rationals, min_size=4, max_size=4), max_size=4))
def test_quotient_dimension(rels):
    keys = list(range(4))
    q = QuotientSpace(keys, [{k: c for k, c in enumerate(r) if c != 0} for r in rels])
    rank = Matrix(rels, 4).rank() if rels else 0
    assert q.dim + rank == 4
    for r in rels:
        assert q.is_zero({k: c for k, c in enumerate(r) if c != 0})
    # the section lifts coordinates back to themselves
    for i in range(q.dim):
        coords = [Q(int(i == j)) for j in range(q.dim)]
        assert q.project(q.lift(coords)) == coords


def test_subspace_equality_is_basis_free():
    V = LabeledSpace.standard(3)
    a = Subspace.span(V, [[1, 1, 0], [0, 1, 1]])
    b = Subspace.span(V, [[1, 2, 1], [1, 0, -1]])
    assert a == b and a.dim == 2
    assert not a.contains([1, 0, 0])
