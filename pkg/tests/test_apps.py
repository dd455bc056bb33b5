import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gen import eps_form
from stariso.apps import (CayleyTable, QuadraticForm, baer_reduce, elementary_abelian, heisenberg, iqf1s,
                          pgroup_iso, pseudo_isometry, span_equal, substitute_check, wreath_cyclic)
from stariso.errors import BudgetExceeded, NotClassTwo, NotExponentP, NotPGroup, ParseError
from stariso.exactla import Mat, MatTuple
from stariso.ffield import FieldCtx

F5, F7 = FieldCtx(5), FieldCtx(7)


def test_parse_and_gram():
    f = QuadraticForm.parse("x1^2 + 4*x1*x2 + x2^2", F5)
    assert f.gram == Mat.from_ints(F5, [[1, 2], [2, 1]])
    g = QuadraticForm.parse(" x2^2+x1 ^2 + 4 * x2*x1", F5)
    assert g == f
    with pytest.raises(ParseError):
        QuadraticForm.parse("x1^3", F5)
    with pytest.raises(ParseError):
        QuadraticForm.parse("x3^2", F5, n=2)


@given(n=st.integers(1, 5), seed=st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_round_trip(n, seed):
    ctx = FieldCtx(7, seed=seed)
    G = eps_form(ctx, n, 1)
    f = QuadraticForm.from_gram(G)
    assert f.gram == G
    again = QuadraticForm.parse(f.format(), ctx, n)
    assert again == f and again.format() == f.format()
    # Gram(f^A) = A^t G A, checked by substitution
    A = Mat.random(ctx, n)
    fa = QuadraticForm.from_gram(A.T @ G @ A)
    assert substitute_check([f], [fa], A)


def test_iqf1s_examples():
    f = [QuadraticForm.parse("x1^2", F5)]
    A = iqf1s(f, [QuadraticForm.parse("4*x1^2", F5)])
    assert A.to_lists()[0][0] in ("2", "3")
    g = [QuadraticForm.parse("x1^2 + 2*x2^2", F5)]
    assert iqf1s(g, g) is not None
    assert iqf1s([QuadraticForm.parse("x1^2", F5)], [QuadraticForm.parse("2*x1^2", F5)]) is None


@given(n=st.integers(1, 4), m=st.integers(1, 3), seed=st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_iqf1s_planted(n, m, seed):
    ctx = FieldCtx(7, seed=seed)
    f = [QuadraticForm.from_gram(eps_form(ctx, n, 1)) for _ in range(m)]
    A = Mat.random_invertible(ctx, n)
    g = [QuadraticForm.from_gram(A.T @ h.gram @ A) for h in f]
    X = iqf1s(f, g)
    assert X is not None and substitute_check(f, g, X)


def test_pseudo_isometry_examples():
    J = Mat.from_ints(F5, [[0, 1], [4, 0]])
    B = MatTuple(F5, [J], [-1])
    X, T = pseudo_isometry(B, B)
    assert span_equal(B.congruence(X), B)
    C = MatTuple(F5, [J.scale(F5.el(2))], [-1])
    X, T = pseudo_isometry(B, C)
    assert span_equal(B.congruence(X), C)
    assert pseudo_isometry(B, MatTuple(F5, [Mat.zeros(F5, 2, 2)], [-1])) is None


def test_pseudo_isometry_needs_basis_change():
    # (S1, S2) vs (S2, S1): no isometry, but swapping the basis works
    ctx = FieldCtx(5, seed=2)
    S1, S2 = Mat.diag(ctx, [1, 1]), Mat.diag(ctx, [1, 2])
    B, C = MatTuple(ctx, [S1, S2], [1, 1]), MatTuple(ctx, [S2, S1], [1, 1])
    from stariso.isometry import isometry_test
    assert isometry_test(B, C) is None
    X, T = pseudo_isometry(B, C)
    assert span_equal(B.congruence(X), C)


def test_pseudo_isometry_budget():
    ctx = FieldCtx(7)
    B = MatTuple(ctx, [eps_form(ctx, 2, 1) for _ in range(2)], [1, 1])
    with pytest.raises(BudgetExceeded):
        pseudo_isometry(B, B)


def test_cayley_parsing_and_checks():
    H = heisenberg(3)
    assert CayleyTable.parse(H.format(), strict=True).table.tolist() == H.table.tolist()
    with pytest.raises(ParseError):
        CayleyTable.parse("2 0\n0 1\n1 1\n")
    with pytest.raises(ParseError):
        CayleyTable.parse("3 0\n0 1\n1 0\n")
    # a Latin square that is not associative
    bad = np.array([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    with pytest.raises(ParseError):
        CayleyTable(bad, 0, strict=True)


def test_baer_examples():
    P = baer_reduce(heisenberg(3), 3)
    assert (P.n, P.m) == (2, 1)
    b = P.b[0]
    assert b.T == -b and not b.is_zero()
    P = baer_reduce(elementary_abelian(3, 3), 3)
    assert (P.n, P.m) == (3, 0)
    with pytest.raises(NotClassTwo):
        baer_reduce(wreath_cyclic(3), 3)
    with pytest.raises(NotPGroup):
        baer_reduce(elementary_abelian(5, 1), 3)
    idx = np.arange(27)
    a, c = idx // 3, idx % 3
    z9z3 = ((a[:, None] + a[None]) % 9) * 3 + (c[:, None] + c[None]) % 3
    with pytest.raises(NotExponentP):
        baer_reduce(CayleyTable(z9z3), 3)


@pytest.mark.parametrize("p", [3, 5])
def test_baer_bilinear_on_heisenberg(p):
    G = heisenberg(p)
    P = baer_reduce(G, p)
    b = P.b[0]
    # skew with zero diagonal, and bilinear on random coordinate vectors
    assert not np.diagonal(b.a, axis1=0, axis2=1).any()
    rng = np.random.default_rng(p)
    for _ in range(5):
        x, y, z = (rng.integers(0, p, 2) for _ in range(3))
        f = lambda u, v: int(u @ b.a[..., 0] @ v) % p
        assert f(x + y, z) == (f(x, z) + f(y, z)) % p


def test_pgroup_iso_examples():
    H = heisenberg(3)
    assert pgroup_iso(H, H, 3)
    perm = np.random.default_rng(7).permutation(27)
    assert pgroup_iso(H, H.relabel(perm), 3)
    assert not pgroup_iso(H, elementary_abelian(3, 3), 3)
    E = elementary_abelian(3, 3)
    assert pgroup_iso(E, E.relabel(perm), 3)
