"""eps-symmetrization of arbitrary matrix tuples and the two singularity witnesses.

A tuple B is eps-symmetrizable when some invertible E makes every E B_i
eps_i-symmetric; such E are exactly the invertible elements of
L(B) = {Z : Z B_i = eps_i B_i^t Z^t}.  The search grows the right ideal
R_Z = Z L(eps B^t) Adj inside the adjoint algebra and stops at a full-rank Z.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .algstruct import radical, scalar_set
from .errors import FieldTooSmall, ShapeMismatch
from .exactla import (Mat, MatTuple, Subspace, batch_rank, bmm, combine, rank_arr, solution_space, transpose,
                      tuple_image, tuple_kernel)
from .staralg import adjoint_pairs
from .algstruct import AlgebraRep


@dataclass
class SymSpace:
    L: Subspace  # L^eps(B)
    Lt: Subspace  # L^eps(eps B^t)
    adj: AlgebraRep  # transposes of the D-projection of Adj(B)
    rad: Subspace  # radical of adj, as a matrix subspace


@dataclass
class SymWitness:
    E: Mat
    A: Mat
    D: Mat
    dims: List[int] = field(default_factory=list)  # dim(R_Z + Rad) after each accepted step


def dim_precheck(B: MatTuple) -> bool:
    """dim ker + dim im = n (necessary for symmetrizability)."""
    return tuple_kernel(B).dim + tuple_image(B).dim == B.n


def _L_space(B: MatTuple, sig: Sequence[int]) -> Subspace:
    ctx, n = B.ctx, B.n
    s = ctx.const(np.array(sig, dtype=np.int64))[None, :, None, None, :]

    def fn(Z):
        ZB = bmm(ctx, Z[:, None], B.a[None])
        BtZt = bmm(ctx, transpose(B.a)[None], transpose(Z)[:, None])
        return ctx.sub(ZB, ctx.mul(BtZt, s))

    return solution_space(ctx, (n, n), fn)


def sym_space(B: MatTuple, sig: Optional[Sequence[int]] = None) -> SymSpace:
    ctx = B.ctx
    sig = tuple(sig if sig is not None else B.sig)
    L = _L_space(B, sig)
    s = ctx.const(np.array(sig, dtype=np.int64))[:, None, None, :]
    Bt = MatTuple(ctx, ctx.mul(transpose(B.a), s), n=B.n)
    Lt = _L_space(Bt, sig)
    pairs = adjoint_pairs(B).arrays()
    adj = AlgebraRep(ctx, transpose(pairs[:, 0]), unital=True)
    rad = radical(adj)
    rad_m = Subspace(ctx, adj.elem(rad.basis), (B.n, B.n)) if rad.dim else Subspace.zero(ctx, (B.n, B.n))
    return SymSpace(L, Lt, adj, rad_m)


def _restrict(B: MatTuple):
    """(core, A, D) with A B_i D = diag(core_i, 0) and core non-degenerate."""
    ctx, n = B.ctx, B.n
    K = tuple_kernel(B)
    Im = tuple_image(B)
    d = K.dim
    comp = [j for j in range(n) if j not in set(K.pivots)]
    D = ctx.zeros((n, n))
    D[comp, np.arange(n - d)] = ctx.ones()
    if d:
        D[:, n - d:] = transpose(K.basis)
    icomp = [j for j in range(n) if j not in set(Im.pivots)]
    P = ctx.zeros((n, n))
    P[:, : Im.dim] = transpose(Im.basis)
    P[icomp, Im.dim + np.arange(len(icomp))] = ctx.ones()
    A = Mat(ctx, P).inv()
    D = Mat(ctx, D)
    core = B.left_right(A, D)
    r = n - d
    return MatTuple(ctx, core.a[:, :r, :r], B.sig, n=r), A, D


def symmetrize(B: MatTuple, sig: Optional[Sequence[int]] = None, budget: int = 200_000) -> Optional[SymWitness]:
    """Invertible (A, D) with A B_i D eps_i-symmetric, or None."""
    ctx, n = B.ctx, B.n
    sig = tuple(sig if sig is not None else (B.sig or [1] * B.m))
    if len(sig) != B.m:
        raise ShapeMismatch("signature length must equal m")
    B = B.with_sig(sig)
    if not dim_precheck(B):
        return None
    core, A0, D0 = _restrict(B)
    r = core.n
    if r == 0:
        Ec = Mat.identity(ctx, 0)
        dims: List[int] = []
    else:
        res = _symmetrize_core(core, sig, budget)
        if res is None:
            return None
        Ec, dims = res
    # A B D = diag(Ec core, 0), eps-symmetric
    Etot = Mat(ctx, np.eye(n, dtype=np.int64)[:, :, None] * ctx.ones())
    Etot.a[:r, :r] = Ec.a
    A = Etot @ A0
    D = D0
    E = D.T.inv() @ A
    return SymWitness(E, A, D, dims)


def _symmetrize_core(B: MatTuple, sig, budget: int):
    ctx, n = B.ctx, B.n
    ss = sym_space(B, sig)
    if ss.L.dim == 0:
        return None
    Ls = ss.L.arrays()
    # M = span{W G}: R_Z = Z M for every Z
    W, G = ss.Lt.arrays(), ss.adj.basis
    if len(W):
        WG = bmm(ctx, W[:, None], G[None]).reshape(-1, n, n, ctx.k)
        M = Subspace(ctx, WG, (n, n)).arrays()
    else:
        M = ctx.zeros((0, n, n))
    radb = ss.rad.basis  # (r, n*n, k)

    def score(Zs):
        # dim(Z M + Rad) for a batch of Z
        if len(M) == 0:
            return np.zeros(len(Zs), dtype=np.int64) + ss.rad.dim
        R = bmm(ctx, Zs[:, None], M[None]).reshape(len(Zs), len(M), n * n, ctx.k)
        if len(radb):
            R = np.concatenate([R, np.broadcast_to(radb, (len(Zs),) + radb.shape)], axis=1)
        return batch_rank(ctx, R)

    small = ctx.q <= n * n
    scalars = ctx.all_elements() if small else scalar_set(ctx, n)
    Z = Ls[0]
    cur = int(score(Z[None])[0])
    dims = [cur]
    while rank_arr(ctx, Z) < n:
        lamZ = ctx.mul(Z[None], scalars[:, None, None, :])
        cands = ctx.add(lamZ[None], Ls[:, None]).reshape(-1, n, n, ctx.k)
        sc = score(cands)
        better = np.flatnonzero(sc > cur)
        if better.size == 0:
            break
        Z = cands[better[0]]
        cur = int(sc[better[0]])
        dims.append(cur)
    if rank_arr(ctx, Z) == n:
        return Mat(ctx, Z), dims
    if not small:
        return None
    # small field: the scan is not a proof of absence, so settle it exhaustively
    if ctx.q ** ss.L.dim > budget:
        raise FieldTooSmall(f"q={ctx.q} <= n^2={n * n} and dim L={ss.L.dim} is beyond the exhaustive budget")
    total = ctx.q ** ss.L.dim
    for lo in range(1, total, 4096):
        codes = np.arange(lo, min(total, lo + 4096))
        digits = np.stack([(codes // ctx.q ** i) % ctx.q for i in range(ss.L.dim)], axis=1)
        cand = combine(ctx, ctx.decode(digits), Ls)
        ok = np.flatnonzero(batch_rank(ctx, cand) == n)
        if ok.size:
            return Mat(ctx, cand[ok[0]]), dims
    return None


def lovasz_flip(mats: Sequence[Mat]) -> MatTuple:
    """Column transpose: column j of the i-th output is column i of the j-th input."""
    mats = list(mats)
    if not mats:
        raise ShapeMismatch("need n matrices of size n")
    ctx = mats[0].ctx
    n = mats[0].rows
    if len(mats) != n or any(M.shape != (n, n) for M in mats):
        raise ShapeMismatch("need exactly n matrices of size n x n")
    a = np.stack([M.a for M in mats])  # [j, r, i]
    return MatTuple(ctx, a.transpose(2, 1, 0, 3), n=n)


@dataclass
class PitReport:
    skew_subspace: Optional[SymWitness]
    skew_induced: Optional[SymWitness]


def pit_witness(basis: Sequence[Mat], budget: int = 200_000) -> PitReport:
    """Recognize equivalence to a skew subspace, and to a skew-symmetric induced space."""
    basis = list(basis)
    ctx = basis[0].ctx
    n = basis[0].rows
    B = MatTuple(ctx, basis)
    case1 = symmetrize(B, [-1] * B.m, budget)
    case2 = None
    if B.m == n:
        F = lovasz_flip(basis)
        case2 = symmetrize(F, [-1] * n, budget)
    return PitReport(case1, case2)


def verify_symmetrizer(B: MatTuple, sig: Sequence[int], w: SymWitness) -> bool:
    ctx = B.ctx
    if not (w.A.is_invertible() and w.D.is_invertible() and w.E.is_invertible()):
        return False
    s = ctx.const(np.array(sig, dtype=np.int64))[:, None, None, :]
    AB = B.left_right(w.A, w.D).a
    EB = bmm(ctx, w.E.a[None], B.a)
    return bool(np.array_equal(transpose(AB), ctx.mul(AB, s)) and np.array_equal(transpose(EB), ctx.mul(EB, s)))
