from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import dense_feasible, dense_nullspace, dense_rank
from orbitconn import exact_linalg as xl
from orbitconn.exact_linalg import DimensionMismatch, Infeasible, MatrixQ, inverse, nullspace, rank, solve_affine

F = Fraction


def _residual_zero(A, x, b):
    return all(r == bb for r, bb in zip(A.matvec(x), b))


def _check_certificate(A, b, sol):
    y = sol.vector()
    assert all(v == 0 for v in A.rmatvec(y))
    assert sum(yi * F(bi) for yi, bi in zip(y, b)) != 0


def test_rank_trivial(each_backend):
    assert rank(MatrixQ.identity(2)) == 2
    assert rank(MatrixQ.zeros(2, 2)) == 0


def test_solve_identity(each_backend):
    b = [F(3, 7), F(-2)]
    sol = solve_affine(MatrixQ.identity(2), b)
    assert sol.feasible
    assert list(sol.particular) == b
    assert sol.nullspace_basis == ()


def test_solve_zero_infeasible(each_backend):
    sol = solve_affine(MatrixQ.from_dense([[0]]), [1])
    assert isinstance(sol, Infeasible)
    assert sol.vector() == [F(1)]


def test_one_equation_two_unknowns(each_backend):
    sol = solve_affine(MatrixQ.from_dense([[1, 1]]), [2])
    assert sol.particular == (F(2), F(0))
    # one free column; the basis vector is unit on it
    assert sol.nullspace_basis == ((F(-1), F(1)),)


def test_nullspace_trivial(each_backend):
    assert nullspace(MatrixQ.identity(3)) == []
    assert len(nullspace(MatrixQ.zeros(1, 3))) == 3


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_affine(MatrixQ.identity(2), [1])


def test_inverse():
    A = MatrixQ.from_dense([[2, 1], [F(1, 2), 3]])
    assert A @ inverse(A) == MatrixQ.identity(2)


def test_fraction_rows_cleared():
    A = MatrixQ.from_dense([[F(1, 3), F(2, 5)], [F(2, 3), F(4, 5)]])
    assert rank(A) == 1
    sol = solve_affine(A, [F(1, 15), F(2, 15)])
    assert _residual_zero(A, sol.particular, [F(1, 15), F(2, 15)])


def test_int64_overflow_falls_back():
    big = 2**62
    A = MatrixQ.from_dense([[big, 3, 1], [5, big, 7], [11, 13, big]])
    assert rank(A) == dense_rank(A.to_dense())
    with xl.use_backend("python"):
        ref = solve_affine(A, [1, 2, 3])
    assert solve_affine(A, [1, 2, 3]) == ref


def test_unknown_backend():
    with pytest.raises(ValueError):
        with xl.use_backend("fortran"):
            pass


small = st.integers(-4, 4)


@st.composite
def systems(draw):
    m = draw(st.integers(1, 7))
    n = draw(st.integers(1, 7))
    dens = draw(st.sampled_from([0.3, 0.6, 1.0]))
    rows = []
    for _ in range(m):
        rows.append([F(draw(small), draw(st.integers(1, 3))) if draw(st.floats(0, 1)) < dens else F(0) for _ in range(n)])
    # sometimes plant dependent rows
    if m > 1 and draw(st.booleans()):
        c = F(draw(small))
        rows[-1] = [c * x + y for x, y in zip(rows[0], rows[1 % m])]
    b = [F(draw(small)) for _ in range(m)]
    return rows, b


@settings(max_examples=150, deadline=None)
@given(systems())
def test_invariants_against_oracle(sys_):
    rows, b = sys_
    A = MatrixQ.from_dense(rows)
    for name in xl.available_backends():
        with xl.use_backend(name):
            r = rank(A)
            ns = nullspace(A)
            sol = solve_affine(A, b)
        assert r == dense_rank(rows)
        assert r + len(ns) == A.ncols
        for v in ns:
            assert all(x == 0 for x in A.matvec(v))
        assert sol.feasible == dense_feasible(rows, b)
        if sol.feasible:
            assert _residual_zero(A, sol.particular, b)
            assert sol.dim == A.ncols - r
        else:
            _check_certificate(A, b, sol)
        # same nullspace as the oracle: both are one vector per free column, unit there
        assert [list(v) for v in ns] == dense_nullspace(rows, A.ncols)


@settings(max_examples=60, deadline=None)
@given(systems())
def test_backends_agree(sys_):
    rows, b = sys_
    A = MatrixQ.from_dense(rows)
    out = []
    for name in xl.available_backends():
        with xl.use_backend(name):
            out.append((rank(A), nullspace(A), solve_affine(A, b)))
    assert all(o == out[0] for o in out)


@settings(max_examples=80, deadline=None)
@given(systems())
def test_scalars_normalized(sys_):
    rows, b = sys_
    sol = solve_affine(MatrixQ.from_dense(rows), b)
    vals = list(sol.particular) + [x for v in sol.nullspace_basis for x in v] if sol.feasible else list(sol.certificate.values())
    for x in vals:
        assert isinstance(x, Fraction)
        assert x.denominator > 0


def test_matrix_helpers():
    A = MatrixQ.from_dense([[1, 0, 2], [0, 0, 3]])
    assert A.shape == (2, 3)
    assert A.nnz() == 3
    assert A.transpose().to_dense() == [[1, 0], [0, 0], [2, 3]]
    assert A.rmatvec([1, 1]) == [1, 0, 5]
    assert MatrixQ.from_entries(2, 3, A.entries) == A
