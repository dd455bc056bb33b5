import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gen import eps_form, field, rand_sig
from oracles import any_invertible
from stariso.exactla import Mat, MatTuple, Subspace, transpose
from stariso.ffield import FieldCtx
from stariso.symmetrize import (dim_precheck, lovasz_flip, pit_witness, sym_space, symmetrize,
                                verify_symmetrizer)

F7 = FieldCtx(7)


def M(ctx, rows):
    return Mat.from_ints(ctx, rows)


def test_dim_precheck_examples():
    assert dim_precheck(MatTuple(F7, [Mat.identity(F7, 2)]))
    assert dim_precheck(MatTuple(F7, [M(F7, [[0, 1], [0, 0]])]))
    # (E12, E13): common kernel span{e1}, joint image span{e1}, and 1 + 1 != 3
    B = MatTuple(F7, [M(F7, [[0, 1, 0], [0, 0, 0], [0, 0, 0]]), M(F7, [[0, 0, 1], [0, 0, 0], [0, 0, 0]])])
    assert not dim_precheck(B)
    assert symmetrize(B, [1, 1]) is None


def test_sym_space_examples():
    I2 = MatTuple(F7, [Mat.identity(F7, 2)])
    assert sym_space(I2, [-1]).L.dim == 1
    assert sym_space(I2, [1]).L.dim == 3
    S = MatTuple(F7, [eps_form(F7, 3, 1)], [1])
    assert sym_space(S).L.contains(Mat.identity(F7, 3).a)


def test_symmetrize_examples():
    w = symmetrize(MatTuple(F7, [Mat.identity(F7, 2)]), [-1])
    assert w is not None and w.E.T == -w.E and w.E.is_invertible()
    assert symmetrize(MatTuple(F7, [Mat.identity(F7, 3)]), [-1]) is None


def test_planted_f17():
    ctx = FieldCtx(17, seed=3)
    S = eps_form(ctx, 4, 1)
    A, D = Mat.random_invertible(ctx, 4), Mat.random_invertible(ctx, 4)
    B = MatTuple(ctx, [A @ S @ D])
    w = symmetrize(B, [1])
    assert w is not None and verify_symmetrizer(B, [1], w)


@given(q=st.sampled_from([3, 5, 7, 9, 11, 13, 17]), n=st.integers(1, 4), m=st.integers(1, 3),
       seed=st.integers(0, 10 ** 6))
@settings(max_examples=50, deadline=None)
def test_planted_symmetrizable(q, n, m, seed):
    ctx = field(q, seed)
    sig = rand_sig(np.random.default_rng(seed), m)
    S = [eps_form(ctx, n, e) for e in sig]
    A, D = Mat.random_invertible(ctx, n), Mat.random_invertible(ctx, n)
    B = MatTuple(ctx, S).left_right(A, D)
    w = symmetrize(B, sig)
    assert w is not None and verify_symmetrizer(B, sig, w)
    # each accepted step strictly grows R_Z + Rad
    assert all(a < b for a, b in zip(w.dims, w.dims[1:]))


def _L_oracle(B, sig, p):
    """Basis of {Z : Z B_i = eps_i B_i^t Z^t} from a direct integer nullspace computation."""
    n = B.shape[1]
    rows = []
    for i, e in enumerate(sig):
        for r in range(n):
            for c in range(n):
                row = np.zeros((n, n), dtype=np.int64)
                # (Z B)_rc = sum_k Z_rk B_kc ; (B^t Z^t)_rc = sum_k B_kr Z_ck
                row[r, :] += B[i][:, c]
                row[c, :] -= e * B[i][:, r]
                rows.append(row.ravel() % p)
    A = np.array(rows, dtype=np.int64) % p
    # nullspace via Gaussian elimination mod p
    A = A.copy()
    piv, r = [], 0
    for c in range(n * n):
        nz = np.flatnonzero(A[r:, c]) if r < len(A) else []
        if len(nz) == 0:
            continue
        A[[r, r + nz[0]]] = A[[r + nz[0], r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        for i in range(len(A)):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        piv.append(c)
        r += 1
        if r == len(A):
            break
    free = [c for c in range(n * n) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(n * n, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = -A[i, f] % p
        basis.append(v.reshape(n, n))
    return np.array(basis, dtype=np.int64).reshape(-1, n, n)


@pytest.mark.parametrize("seed", range(20))
def test_random_tuples_against_brute_force(seed):
    p = [3, 5][seed % 2]
    ctx = FieldCtx(p, seed=seed)
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 4)), int(rng.integers(1, 3))
    sig = rand_sig(rng, m)
    if seed % 3 == 0:  # half planted, half random
        B = MatTuple(ctx, [eps_form(ctx, n, e) for e in sig]).left_right(Mat.random_invertible(ctx, n),
                                                                          Mat.random_invertible(ctx, n))
    else:
        B = MatTuple(ctx, [Mat.random(ctx, n) for _ in sig])
    L = _L_oracle(B.a[..., 0], sig, p)
    truth = any_invertible(L, p)
    w = symmetrize(B, sig)
    assert (w is not None) == truth
    if w is not None:
        assert verify_symmetrizer(B, sig, w)


def test_lovasz_flip_examples():
    J = M(F7, [[0, 1], [6, 0]])
    B1 = Mat(F7, np.stack([J.a[:, 0], F7.zeros((2,))], axis=1))
    B2 = Mat(F7, np.stack([J.a[:, 1], F7.zeros((2,))], axis=1))
    out = lovasz_flip([B1, B2])
    assert out[0] == J and out[1].is_zero()
    Z = [Mat.zeros(F7, 3, 3)] * 3
    assert all(x.is_zero() for x in lovasz_flip(Z))
    Rs = [Mat.random(F7, 3) for _ in range(3)]
    assert lovasz_flip(list(lovasz_flip(Rs))) == MatTuple(F7, Rs)


def test_pit_witness_examples():
    J = M(F7, [[0, 1], [6, 0]])
    rep = pit_witness([J])
    assert rep.skew_subspace is not None
    rep = pit_witness([Mat.identity(F7, 3)])
    assert rep.skew_subspace is None and rep.skew_induced is None


@pytest.mark.parametrize("n", [3, 4])
def test_pit_planted_families(n):
    ctx = FieldCtx(11, seed=n)
    for _ in range(3):
        A, D = Mat.random_invertible(ctx, n), Mat.random_invertible(ctx, n)
        skews = [eps_form(ctx, n, -1) for _ in range(2)]
        rep = pit_witness(list(MatTuple(ctx, skews).left_right(A, D)))
        assert rep.skew_subspace is not None
        Cs = [eps_form(ctx, n, -1) for _ in range(n)]
        rep = pit_witness(list(lovasz_flip(Cs).left_right(A, D)))
        assert rep.skew_induced is not None
