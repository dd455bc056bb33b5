import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gen import field, rand_tuple
from stariso.errors import ParseError
from stariso.exactla import (Mat, MatTuple, Subspace, bmm, format_tuple, parse_tuple, rref, solution_space,
                             solve_linear, transpose, tuple_image, tuple_kernel)
from stariso.ffield import FieldCtx


def M(ctx, rows):
    return Mat.from_ints(ctx, rows)


def test_rref_examples():
    F5 = FieldCtx(5)
    A = M(F5, [[1, 2], [2, 4]])
    R, r, piv, T = rref(A)
    assert r == 1 and piv == [0] and T @ A == R
    R, r, piv, T = rref(Mat.identity(F5, 3))
    assert r == 3 and T == Mat.identity(F5, 3)
    assert rref(Mat.zeros(F5, 2, 3))[1] == 0


@given(st.sampled_from([3, 5, 9, 25]), st.integers(1, 5), st.integers(1, 5), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_rref_transform_property(q, r, c, seed):
    ctx = field(q, seed)
    A = Mat.random(ctx, r, c)
    R, rank, piv, T = rref(A)
    assert T.is_invertible() and T @ A == R
    assert rank == len(piv) == A.rank()
    for i, j in enumerate(piv):
        col = R.a[:, j]
        assert (col[i] == ctx.ones()).all() and not np.delete(col, i, axis=0).any()


@given(st.sampled_from([3, 5, 7, 9]), st.integers(1, 5), st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_inverse_and_det(q, n, seed):
    ctx = field(q, seed)
    A = Mat.random(ctx, n)
    assert A.det().is_zero() == (not A.is_invertible())
    if A.is_invertible():
        assert A @ A.inv() == Mat.identity(ctx, n)
        B = Mat.random(ctx, n)
        assert (A @ B).det() == A.det() * B.det()


def test_solve_linear_examples():
    F5 = FieldCtx(5)
    x0, ker = solve_linear(M(F5, [[1, 2]]), [1])
    assert (M(F5, [[1, 2]]) @ x0).to_lists() == [["1"]]
    assert ker.dim == 1 and ker.contains(F5.const(np.array([3, 1])))
    x0, ker = solve_linear(M(F5, [[1, 2], [0, 1]]), [0, 0])
    assert x0.is_zero() and ker.dim == 0
    assert solve_linear(M(F5, [[0]]), [1]) is None


def test_kernel_and_image_examples():
    F5 = FieldCtx(5)
    B = MatTuple(F5, [Mat.identity(F5, 2)])
    assert tuple_kernel(B).dim == 0 and tuple_image(B).dim == 2
    B = MatTuple(F5, [M(F5, [[0, 1], [0, 0]])])
    e1 = F5.const(np.array([1, 0]))
    assert tuple_kernel(B).dim == 1 and tuple_kernel(B).contains(e1)
    assert tuple_image(B).dim == 1 and tuple_image(B).contains(e1)
    B = MatTuple(F5, [Mat.zeros(F5, 2, 2)] * 2)
    assert tuple_kernel(B).dim == 2 and tuple_image(B).dim == 0


def test_solution_space_examples():
    F5 = FieldCtx(5)
    I = Mat.identity(F5, 2).a
    S = solution_space(F5, (2, 2), lambda X: bmm(F5, X, I[None]) - bmm(F5, I[None], X))
    assert S.dim == 4
    E12 = M(F5, [[0, 1], [0, 0]]).a
    S = solution_space(F5, (2, 2), lambda X: F5.sub(bmm(F5, X, E12[None]), bmm(F5, E12[None], X)))
    assert S == Subspace(F5, np.stack([I, E12]), (2, 2))
    S = solution_space(F5, (3, 3), lambda X: F5.add(X, transpose(X)))
    assert S.dim == 3


@given(st.sampled_from([3, 5, 9]), st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_subspace_echelon_is_canonical(q, seed):
    ctx = field(q, seed)
    vecs = ctx.random((4, 6))
    S = Subspace(ctx, vecs)
    # any spanning set in a different order gives a literally equal echelon basis
    mix = Mat.random_invertible(ctx, 4)
    T = Subspace(ctx, (mix @ Mat(ctx, vecs)).a)
    assert S == T and np.array_equal(S.basis, T.basis)
    U = Subspace(ctx, ctx.random((3, 6)))
    inter = S.intersect(U)
    assert (S + U).dim + inter.dim == S.dim + U.dim


@pytest.mark.parametrize("q", [5, 9])
def test_tuple_text_and_json_round_trip(q):
    ctx = field(q, 1)
    B = rand_tuple(ctx, 3, [1, -1])
    text = format_tuple(B)
    assert text.splitlines()[0].split()[1:] == ["3", "2", "1,-1"]
    C = parse_tuple(text, ctx)
    assert C == B and list(C.sig) == [1, -1]
    obj = {"field": ctx.spec(), "n": 3, "sig": [1, -1],
           "mats": [[[[int(x) for x in e] for e in row] for row in Mt] for Mt in B.a]}
    assert parse_tuple(json.dumps(obj), ctx) == B


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_tuple("5 2 1 1\n0 1\n")
    with pytest.raises(ParseError):
        parse_tuple("5 2 1\n0 1\n1 0\n")
    with pytest.raises(ParseError):
        parse_tuple("9 1 1 1\n1\n")  # non-prime size needs an explicit field


def test_congruence_and_eps_symmetry():
    ctx = field(7, 2)
    B = rand_tuple(ctx, 4, [1, -1, 1])
    assert B.is_eps_symmetric()
    F = Mat.random_invertible(ctx, 4)
    C = B.congruence(F)
    assert C.is_eps_symmetric()
    assert C[1] == F.T @ B[1] @ F
