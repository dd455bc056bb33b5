"""Structure of matrix algebras over F_q.

Algebras are handled in two shapes: AlgebraRep (a concrete span of n x n
matrices, kept in echelon form so coordinates are read off pivot entries)
and StructAlg (structure constants only, used for quotients).  On top of
that: closure of generators, idempotents, the Jacobson radical, an explicit
Wedderburn decomposition, and module isomorphism / equivalence of tuples.
"""
from __future__ import annotations

import itertools
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceeded, FieldTooSmall, InternalError, ShapeMismatch
from .exactla import (Mat, MatTuple, Subspace, batch_rank, bmm, combine, identity_arr, inverse_arr,
                      nullspace_arr, rank_arr, rref_arr, solution_space, transpose)
from .ffield import Embedding, Fel, FieldCtx, Poly, extension, factor, poly_inverse_mod, roots


# ---------------------------------------------------------------------------
# algebra containers


class StructAlg:
    """Algebra given by structure constants: e_i e_j = sum_l c[i, j, l] e_l."""

    def __init__(self, ctx: FieldCtx, c: np.ndarray, one: Optional[np.ndarray] = None):
        self.ctx = ctx
        self.c = np.asarray(c, dtype=np.int64)
        self.dim = self.c.shape[0]
        self.one = one

    def left_mats(self, x: np.ndarray) -> np.ndarray:
        """Matrices of y -> x y for a batch x (N, d, k); result (N, d, d, k)."""
        d, k = self.dim, self.ctx.k
        x = np.asarray(x).reshape(-1, 1, d, k)
        if d == 0:
            return self.ctx.zeros((x.shape[0], 0, 0))
        t = bmm(self.ctx, x, self.c.reshape(d, d * d, k))  # (N, 1, d*d, k) indexed [j, l]
        return transpose(t.reshape(-1, d, d, k))

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        y = np.asarray(y)
        single = x.ndim == 2 and y.ndim == 2
        x2 = x.reshape(-1, self.dim, self.ctx.k)
        y2 = y.reshape(-1, self.dim, self.ctx.k)
        L = self.left_mats(x2)
        out = bmm(self.ctx, L, y2[:, :, None, :])[:, :, 0, :]
        return out[0] if single else out

    def basis_elements(self) -> np.ndarray:
        return identity_arr(self.ctx, self.dim)

    def regular_rep(self) -> np.ndarray:
        """Faithful matrices for the basis: left-regular, on the unitalization if needed."""
        L = self.left_mats(self.basis_elements())
        if self.one is not None:
            return L
        d = self.dim
        out = self.ctx.zeros((d, d + 1, d + 1))
        out[:, 1:, 0] = self.basis_elements()
        out[:, 1:, 1:] = L
        return out


class AlgebraRep:
    """A product-closed span of n x n matrices (echelonized basis)."""

    def __init__(self, ctx: FieldCtx, mats: np.ndarray, unital: bool = True):
        self.ctx = ctx
        mats = np.asarray(mats, dtype=np.int64)
        self.n = mats.shape[1]
        self.space = Subspace(ctx, mats, (self.n, self.n))
        self.basis = self.space.arrays()
        self.unital = unital
        self._struct: Optional[StructAlg] = None

    @property
    def dim(self) -> int:
        return self.space.dim

    def coords(self, X) -> np.ndarray:
        if isinstance(X, Mat):
            X = X.a
        X = np.asarray(X)
        lead = X.shape[:-3]
        flat = X.reshape(-1, self.n * self.n, self.ctx.k)[:, self.space.pivots]
        return flat.reshape(lead + (self.dim, self.ctx.k))

    def elem(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        lead = x.shape[:-2]
        out = combine(self.ctx, x.reshape(-1, self.dim, self.ctx.k), self.basis)
        return out.reshape(lead + (self.n, self.n, self.ctx.k))

    def mat(self, x: np.ndarray) -> Mat:
        return Mat(self.ctx, self.elem(x))

    def contains(self, X) -> bool:
        return self.space.contains(X)

    @property
    def struct(self) -> StructAlg:
        if self._struct is None:
            B = self.basis
            prods = bmm(self.ctx, B[:, None], B[None, :])
            c = self.coords(prods)
            one = self.coords(identity_arr(self.ctx, self.n)) if self.unital else None
            self._struct = StructAlg(self.ctx, c, one)
        return self._struct

    def is_closed(self) -> bool:
        B = self.basis
        prods = bmm(self.ctx, B[:, None], B[None, :]).reshape(-1, self.n, self.n, self.ctx.k)
        return not self.space.reduce(prods).any()


def close_algebra(generators: Sequence[Mat], unital: bool = True, ctx: Optional[FieldCtx] = None,
                  n: Optional[int] = None) -> AlgebraRep:
    """Smallest product-closed subspace containing the generators (and I if unital)."""
    gens = [g.a for g in generators]
    if gens:
        ctx = generators[0].ctx
        n = gens[0].shape[0]
    if ctx is None or n is None:
        raise ShapeMismatch("need ctx and n for an empty generator list")
    vecs = list(gens)
    if unital:
        vecs.append(identity_arr(ctx, n))
    if not vecs:
        return AlgebraRep(ctx, ctx.zeros((0, n, n)), unital)
    G = np.stack(gens) if gens else ctx.zeros((0, n, n))
    space = Subspace(ctx, np.stack(vecs), (n, n))
    while True:
        B = space.arrays()
        prods = bmm(ctx, B[:, None], G[None, :]).reshape(-1, n, n, ctx.k) if len(G) else B[:0]
        new = space + Subspace(ctx, prods, (n, n)) if len(prods) else space
        if new.dim == space.dim:
            break
        space = new
    return AlgebraRep(ctx, space.arrays(), unital)


# ---------------------------------------------------------------------------
# polynomials of algebra elements


def _powers(A: StructAlg, x: np.ndarray, unit: np.ndarray, count: int) -> np.ndarray:
    out = [unit]
    L = A.left_mats(x)[0]
    cur = unit
    for _ in range(count - 1):
        cur = bmm(A.ctx, L, cur[:, None, :])[:, 0, :]
        out.append(cur)
    return np.stack(out)


def minpoly(A: StructAlg, x: np.ndarray, unit: Optional[np.ndarray] = None,
            bound: Optional[int] = None) -> Poly:
    """Minimal polynomial of x in the unital (sub)algebra with the given unit."""
    ctx = A.ctx
    unit = A.one if unit is None else unit
    bound = A.dim if bound is None else bound
    P = _powers(A, x, unit, bound + 2)  # (bound+2, d, k)
    M = P.transpose(1, 0, 2)
    R, piv = rref_arr(ctx, M)
    t = next(i for i in range(P.shape[0]) if i not in set(piv))
    coeffs = ctx.zeros((t + 1,))
    for i, c in enumerate(piv):
        if c < t:
            coeffs[c] = ctx.neg(R[i, t])
    coeffs[t] = ctx.ones()
    return Poly(ctx, coeffs)


def poly_eval(A: StructAlg, f: Poly, x: np.ndarray, unit: np.ndarray) -> np.ndarray:
    if f.is_zero():
        return A.ctx.zeros((A.dim,))
    P = _powers(A, x, unit, f.deg + 1)
    return combine(A.ctx, f.c[None], P)[0]


def _crt_idempotents(A: StructAlg, x: np.ndarray, unit: np.ndarray, f: Poly) -> List[np.ndarray]:
    """Idempotents u_j(x) for the primary factors of f = minpoly(x)."""
    parts = factor(f)
    out = []
    for g, m in parts:
        gm = g ** m
        h = f // gm
        s = poly_inverse_mod(h % gm, gm) if h.deg > 0 else Poly.one(A.ctx)
        u = (s * h) % f
        out.append(poly_eval(A, u, x, unit))
    return out


def idempotent_from(A, y) -> Optional[np.ndarray]:
    """Idempotent e with e x = x for x = y^dim, or None if y is nilpotent.

    A may be an AlgebraRep (y a matrix / Mat, result a matrix) or a StructAlg
    (y and the result in coordinates).
    """
    concrete = isinstance(A, AlgebraRep)
    S = A.struct if concrete else A
    ctx = S.ctx
    yc = A.coords(y) if concrete else np.asarray(y)
    N = max(S.dim, 1)
    L = S.left_mats(yc)[0]
    x = yc
    for _ in range(N - 1):
        x = bmm(ctx, L, x[:, None, :])[:, 0, :]
    if not x.any():
        return None
    # powers x, x^2, ..., x^N span the subalgebra generated by x
    Lx = S.left_mats(x)[0]
    pw = [x]
    for _ in range(N - 1):
        pw.append(bmm(ctx, Lx, pw[-1][:, None, :])[:, 0, :])
    P = np.stack(pw)  # (N, d, k)
    # find c with (sum c_i x^i) x = x, i.e. sum c_i x^{i+1} = x
    Q = np.stack([bmm(ctx, Lx, v[:, None, :])[:, 0, :] for v in P])  # x^{i+1}
    aug = np.concatenate([Q.transpose(1, 0, 2), x[:, None, :]], axis=1)
    R, piv = rref_arr(ctx, aug, ncols=N)
    if R[len(piv):, N].any():
        raise InternalError("idempotent system inconsistent for a non-nilpotent element")
    c = ctx.zeros((N,))
    for i, col in enumerate(piv):
        c[col] = R[i, N]
    e = combine(ctx, c[None], P)[0]
    return A.elem(e) if concrete else e


# ---------------------------------------------------------------------------
# radical


def _fp_expand(ctx: FieldCtx, M: np.ndarray) -> np.ndarray:
    """Matrices over F_q (..., n, n, k) -> their F_p forms (..., nk, nk)."""
    k = ctx.k
    if k == 1:
        return M[..., 0]
    big = np.einsum("...rcj,jil->...rlci", M, ctx._T) % ctx.p
    n = M.shape[-2]
    return big.reshape(M.shape[:-3] + (n * k, n * k))


def _int_matpow(X: np.ndarray, e: int, mod: int) -> np.ndarray:
    res = None
    base = X % mod
    while e > 0:
        if e & 1:
            res = base if res is None else (res @ base) % mod
        e >>= 1
        if e:
            base = (base @ base) % mod
    return res


def _radical_fp_coeffs(ctx: FieldCtx, mats: np.ndarray) -> np.ndarray:
    """Radical of the F_p-span of {x^t b_j}, as coefficient rows indexed (j, t)."""
    p, k = ctx.p, ctx.k
    N = mats.shape[0]
    if N == 0:
        return np.zeros((0, 0), dtype=np.int64)
    xt = ctx.decode(p ** np.arange(k))  # x^t, t < k
    scaled = ctx.mul(mats[:, None], xt[None, :, None, None, :])  # (N, k, n, n, k)
    P = _fp_expand(ctx, scaled).reshape(N * k, -1, scaled.shape[-2] * k)  # (Nk, nb, nb)
    nb = P.shape[-1]
    Fp = FieldCtx(p)
    levels = 0
    while p ** (levels + 1) <= nb:
        levels += 1
    # test elements: the basis plus the identity (covers non-unital spans)
    Pt = np.concatenate([P, np.eye(nb, dtype=np.int64)[None]])
    coef = np.eye(N * k, dtype=np.int64)
    chunk = max(1, int(4_000_000 // max(1, N * k * nb * nb)))
    for i in range(levels + 1):
        if coef.shape[0] == 0:
            break
        mod = p ** (i + 1)
        Imats = np.tensordot(coef, P, axes=(1, 0)) % p  # (r, nb, nb)
        G = np.zeros((coef.shape[0], Pt.shape[0]), dtype=np.int64)
        for s in range(0, coef.shape[0], chunk):
            prods = (Imats[s:s + chunk, None] @ Pt[None]) % p
            pw = _int_matpow(prods, p ** i, mod) if i else prods
            tr = np.trace(pw, axis1=-2, axis2=-1) % mod
            if i and (tr % p ** i).any():
                raise InternalError("trace layer not divisible; radical chain broken")
            G[s:s + chunk] = (tr // p ** i) % p
        left = nullspace_arr(Fp, G.T[:, :, None])[..., 0]  # u with u G = 0
        coef = (left @ coef) % p
    return coef


def radical(A) -> Subspace:
    """Jacobson radical in the coordinates of A (AlgebraRep or StructAlg)."""
    if isinstance(A, AlgebraRep):
        ctx, mats, N = A.ctx, A.basis, A.dim
    else:
        ctx, mats, N = A.ctx, A.regular_rep(), A.dim
    coef = _radical_fp_coeffs(ctx, mats)
    vecs = coef.reshape(-1, N, ctx.k) if coef.size else ctx.zeros((0, N))
    return Subspace(ctx, vecs, (N,))


# ---------------------------------------------------------------------------
# Wedderburn decomposition


def _fp_inverse(M: np.ndarray, p: int) -> np.ndarray:
    Fp = FieldCtx(p)
    r = inverse_arr(Fp, M[:, :, None] % p)
    if r is None:
        raise InternalError("expected an invertible F_p matrix")
    return r[..., 0]


class SimpleSummand:
    """One simple summand of the semisimple quotient, with an explicit iso to M(n, L)."""

    def __init__(self, ctx: FieldCtx, L: FieldCtx, emb: Embedding, n: int, d: int, e: np.ndarray,
                 zgen: np.ndarray, beta: np.ndarray, Phi: np.ndarray, Phiinv: np.ndarray, dQ: int):
        self.ctx, self.L, self.emb = ctx, L, emb
        self.n, self.d = n, d
        self.e, self.zgen, self.beta = e, zgen, beta
        self.Phi, self.Phiinv, self.dQ = Phi, Phiinv, dQ

    @property
    def q(self) -> int:
        return self.L.q

    def phi(self, x: np.ndarray) -> np.ndarray:
        """Quotient coordinates (..., dQ, k) -> matrices over L (..., n, n, K)."""
        x = np.asarray(x)
        lead = x.shape[:-2]
        flat = x.reshape(-1, self.dQ * self.ctx.k)
        out = (flat @ self.Phi) % self.ctx.p
        return out.reshape(lead + (self.n, self.n, self.L.k))

    def phi_inv(self, M: np.ndarray) -> np.ndarray:
        M = np.asarray(M)
        lead = M.shape[:-3]
        flat = M.reshape(-1, self.n * self.n * self.L.k)
        out = (flat @ self.Phiinv) % self.ctx.p
        return out.reshape(lead + (self.dQ, self.ctx.k))


class StructureData:
    """Radical, quotient, simple summands, projection and lift."""

    def __init__(self, A, rad: Subspace, Q: StructAlg, nonpiv: List[int], summands: List[SimpleSummand]):
        self.alg = A
        self.radical = rad
        self.Q = Q
        self.nonpiv = nonpiv
        self.summands = summands

    @property
    def ctx(self) -> FieldCtx:
        return self.Q.ctx

    def to_quotient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        lead = x.shape[:-2]
        red = self.radical.reduce(x.reshape(-1, x.shape[-2], x.shape[-1]))
        return red[:, self.nonpiv].reshape(lead + (len(self.nonpiv), self.ctx.k))

    def from_quotient(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        N = self.radical.ambient
        out = np.zeros(y.shape[:-2] + (N, self.ctx.k), dtype=np.int64)
        out[..., self.nonpiv, :] = y
        return out

    def proj(self, x: np.ndarray) -> List[np.ndarray]:
        y = self.to_quotient(x)
        return [s.phi(y) for s in self.summands]

    def lift(self, mats: Sequence[np.ndarray]) -> np.ndarray:
        ctx = self.ctx
        y = ctx.zeros((self.Q.dim,))
        for s, M in zip(self.summands, mats):
            y = ctx.add(y, s.phi_inv(M))
        return self.from_quotient(y)

    def dim_identity(self) -> Tuple[int, int]:
        lhs = sum(s.n * s.n * s.d for s in self.summands) + self.radical.dim
        return lhs, self.radical.ambient

    def signature(self) -> List[Tuple[int, int]]:
        return [(s.n, s.q) for s in self.summands]


def quotient(A: StructAlg, rad: Subspace) -> Tuple[StructAlg, List[int]]:
    ctx = A.ctx
    nonpiv = [j for j in range(A.dim) if j not in set(rad.pivots)]
    d = len(nonpiv)
    E = ctx.zeros((d, A.dim))
    E[np.arange(d), nonpiv] = ctx.ones()
    prods = A.mul(np.repeat(E, d, axis=0), np.tile(E, (d, 1, 1))) if d else E
    red = rad.reduce(prods)[:, nonpiv] if d else prods
    c = red.reshape(d, d, d, ctx.k)
    one = None
    if A.one is not None:
        one = rad.reduce(A.one)[0, nonpiv]
    return StructAlg(ctx, c, one), nonpiv


def center(A: StructAlg) -> Subspace:
    ctx, d = A.ctx, A.dim
    # z e_b - e_b z = sum_i z_i (c[i,b,:] - c[b,i,:])
    diff = ctx.sub(A.c, A.c.transpose(1, 0, 2, 3))  # [i, b, l]
    M = diff.transpose(1, 2, 0, 3).reshape(d * d, d, ctx.k)
    return Subspace(ctx, nullspace_arr(ctx, M), (d,))


def _span_products(A: StructAlg, left: np.ndarray, right: np.ndarray) -> Subspace:
    a = np.repeat(left, len(right), axis=0)
    b = np.tile(right, (len(left), 1, 1))
    return Subspace(A.ctx, A.mul(a, b), (A.dim,))


def _random_in(ctx: FieldCtx, S: Subspace) -> np.ndarray:
    return combine(ctx, ctx.random((1, S.dim)), S.basis)[0]


def _central_idempotents(Q: StructAlg, Z: Subspace, budget: int) -> List[Tuple[np.ndarray, np.ndarray, Poly]]:
    """Primitive central idempotents with a field generator of each e Z."""
    ctx = Q.ctx
    todo = [Q.one]
    done = []
    while todo:
        e = todo.pop()
        Ze = Subspace(ctx, Q.mul(Z.basis, np.broadcast_to(e, Z.basis.shape)), (Q.dim,))
        for _ in range(budget):
            z = _random_in(ctx, Ze)
            f = minpoly(Q, z, e, Ze.dim)
            parts = factor(f)
            if len(parts) > 1:
                todo.extend(_crt_idempotents(Q, z, e, f))
                break
            if f.deg == Ze.dim and parts[0][1] == 1:
                done.append((e, z, f))
                break
        else:
            raise BudgetExceeded("central idempotent splitting exceeded its retry budget")
    return done


def _corner_dim(Q: StructAlg, f: np.ndarray, S: Subspace) -> int:
    left = Q.mul(np.broadcast_to(f, S.basis.shape), S.basis)
    both = Q.mul(left, np.broadcast_to(f, S.basis.shape))
    return Subspace(Q.ctx, both, (Q.dim,)).dim


def _primitive_idempotent(Q: StructAlg, e: np.ndarray, S: Subspace, d: int, budget: int) -> np.ndarray:
    ctx = Q.ctx
    f = e
    dim = _corner_dim(Q, f, S)
    while dim > d:
        for _ in range(budget):
            y = Q.mul(Q.mul(f, _random_in(ctx, S)), f)
            mp = minpoly(Q, y, f, dim)
            parts = factor(mp)
            if len(parts) > 1:
                f2 = _crt_idempotents(Q, y, f, mp)[0]
                dim2 = _corner_dim(Q, f2, S)
                if 0 < dim2 < dim:
                    f, dim = f2, dim2
                    break
        else:
            raise BudgetExceeded("primitive idempotent search exceeded its retry budget")
    return f


def _base_matrix(ctx: FieldCtx, L: FieldCtx, emb: Embedding, beta: np.ndarray, d: int) -> np.ndarray:
    """F_p matrix with rows emb(x^t) beta^a, row index a*k + t."""
    xt = ctx.decode(ctx.p ** np.arange(ctx.k))
    ex = emb(xt)  # (k, K)
    bp = [L.ones()]
    for _ in range(1, d):
        bp.append(L.mul(bp[-1], beta))
    rows = [L.mul(ex[t], bp[a]) for a in range(d) for t in range(ctx.k)]
    return np.stack(rows)


def _build_summand(Q: StructAlg, e: np.ndarray, zgen: np.ndarray, g: Poly, budget: int) -> SimpleSummand:
    ctx = Q.ctx
    p, k = ctx.p, ctx.k
    dd = g.deg
    Sspace = Subspace(ctx, Q.mul(np.broadcast_to(e, (Q.dim, Q.dim, k)), Q.basis_elements()), (Q.dim,))
    ds = Sspace.dim
    n = math.isqrt(ds // dd)
    if n * n * dd != ds:
        raise InternalError(f"summand dimension {ds} is not n^2 * {dd}")
    # field of the center
    if dd == 1:
        L, emb = ctx, Embedding.identity(ctx)
        beta = ctx.neg(g.c[0])
    else:
        L, emb = extension(ctx, dd)
        gL = Poly(L, emb(g.c))
        rs = roots(gL)
        if not rs:
            raise InternalError("center polynomial has no root in its splitting field")
        beta = rs[0].v
    Bmat = _base_matrix(ctx, L, emb, beta, dd)
    # minimal left ideal V = S f and an L-basis of it
    f = _primitive_idempotent(Q, e, Sspace, dd, budget)
    V = Subspace(ctx, Q.mul(Sspace.basis, np.broadcast_to(f, Sspace.basis.shape)), (Q.dim,))
    if V.dim != n * dd:
        raise InternalError("minimal left ideal has the wrong dimension")
    zp = _powers(Q, zgen, e, dd)  # z^a, a < dd
    chosen: List[np.ndarray] = []
    span = Subspace.zero(ctx, (Q.dim,))
    for v in V.basis:
        if len(chosen) == n:
            break
        if not span.contains(v):
            chosen.append(v)
            span = Subspace(ctx, np.concatenate([span.basis, Q.mul(zp, np.broadcast_to(v, zp.shape))]), (Q.dim,))
    if len(chosen) != n:
        raise InternalError("could not find an L-basis of the left ideal")
    W = np.stack([Q.mul(zp[a], v) for v in chosen for a in range(dd)])  # index l*dd + a
    # rows of W at pivot columns form an invertible square block
    _, pivc = rref_arr(ctx, W)
    if len(pivc) != n * dd:
        raise InternalError("left ideal basis is dependent")
    Winv = inverse_arr(ctx, W[:, pivc])
    # action of every basis element of Q on the chosen vectors
    Vm = np.stack(chosen)  # (n, dQ, k)
    U = bmm(ctx, Vm[None], Q.c)  # (dQ, n, dQ, k): e_j v_l
    coef = bmm(ctx, U[:, :, pivc], Winv[None])  # (dQ, n, n*dd, k)
    coef = coef.reshape(Q.dim, n, n, dd * k)  # [j, l, l', (a,t)]
    Mj = (coef @ Bmat) % p  # [j, l, l', K]
    Mj = Mj.transpose(0, 2, 1, 3)  # [j, l', l, K]
    xt = ctx.decode(p ** np.arange(k))
    ex = emb(xt)  # (k, K)
    Phi = L.mul(Mj[:, None], ex[None, :, None, None, :])  # (dQ, k, n, n, K)
    Phi = Phi.reshape(Q.dim * k, n * n * L.k)
    # inverse on the summand
    SB = ctx.mul(Sspace.basis[:, None], xt[None, :, None, :]).reshape(ds * k, Q.dim * k)
    img = (SB @ Phi) % p
    Psi = _fp_inverse(img, p)
    Phiinv = (Psi @ SB) % p
    return SimpleSummand(ctx, L, emb, n, dd, e, zgen, beta, Phi, Phiinv, Q.dim)


def _summand_order(e: np.ndarray, ctx: FieldCtx):
    nz = np.flatnonzero(e.any(axis=-1))
    return (int(nz[0]) if len(nz) else -1, tuple(int(c) for c in ctx.encode(e)))


def wedderburn(A, budget: Optional[int] = None) -> StructureData:
    """Radical, quotient and explicit isomorphisms of its simple summands."""
    S = A.struct if isinstance(A, AlgebraRep) else A
    if S.one is None:
        raise ShapeMismatch("wedderburn needs a unital algebra")
    ctx = S.ctx
    budget = budget or (64 + 8 * S.dim)
    rad = radical(A)
    Q, nonpiv = quotient(S, rad)
    summands: List[SimpleSummand] = []
    if Q.dim:
        Z = center(Q)
        cis = _central_idempotents(Q, Z, budget)
        cis.sort(key=lambda t: _summand_order(t[0], ctx))
        for e, z, g in cis:
            summands.append(_build_summand(Q, e, z, g, budget))
    return StructureData(A, rad, Q, nonpiv, summands)


# ---------------------------------------------------------------------------
# module isomorphism and equivalence


def intertwiners(B: MatTuple, C: MatTuple) -> Subspace:
    """{A : A B_i = C_i A for all i}."""
    if B.n != C.n or B.m != C.m:
        raise ShapeMismatch("tuples must have the same n and m")
    ctx = B.ctx

    def fn(X):
        if B.m == 0:
            return ctx.zeros((X.shape[0], 0))
        XB = bmm(ctx, X[:, None], B.a[None])
        CX = bmm(ctx, C.a[None], X[:, None])
        return ctx.sub(XB, CX)

    return solution_space(ctx, (B.n, B.n), fn)


def scalar_set(ctx: FieldCtx, n: int) -> np.ndarray:
    """First min(q, n^2+1) field elements in the fixed enumeration."""
    return ctx.decode(np.arange(min(ctx.q, n * n + 1)))


def max_rank_element(ctx: FieldCtx, space: Subspace, n: int, start: Optional[np.ndarray] = None,
                     scalars: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int]:
    """Greedy rank increase Z <- lam Z + Z_i, first improving pair, restart on success."""
    basis = space.arrays()
    Z = basis[0] if start is None else start
    scalars = scalar_set(ctx, n) if scalars is None else scalars
    r = rank_arr(ctx, Z)
    while r < n:
        lamZ = ctx.mul(Z[None], scalars[:, None, None, :])  # (s, n, n, k)
        cands = ctx.add(lamZ[None], basis[:, None])  # (dim, s, n, n, k)
        flat = cands.reshape(-1, n, n, ctx.k)
        ranks = batch_rank(ctx, flat)
        better = np.flatnonzero(ranks > r)
        if better.size == 0:
            break
        Z = flat[better[0]]
        r = int(ranks[better[0]])
    return Z, r


def module_iso(B: MatTuple, C: MatTuple, budget: int = 200_000, samples: int = 256) -> Optional[Mat]:
    """Invertible A with A B_i = C_i A for all i, or None."""
    ctx = B.ctx
    n = B.n
    S = intertwiners(B, C)
    if S.dim == 0:
        return None
    start = S.random_element()
    Z, r = max_rank_element(ctx, S, n, start)
    if r == n:
        return Mat(ctx, Z)
    if ctx.q > n * n:
        return None
    # small field: the greedy scan is not a proof, so sample and then enumerate
    for lo in range(0, samples, 64):
        cand = combine(ctx, ctx.random((64, S.dim)), S.basis).reshape(-1, n, n, ctx.k)
        ok = np.flatnonzero(batch_rank(ctx, cand) == n)
        if ok.size:
            return Mat(ctx, cand[ok[0]])
    if ctx.q ** S.dim > budget:
        raise FieldTooSmall(f"q={ctx.q} <= n^2={n * n} and the intertwiner space "
                            f"(dim {S.dim}) is too large for exhaustive search")
    total = ctx.q ** S.dim
    chunk = 4096
    for lo in range(1, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk))
        digits = np.stack([(codes // ctx.q ** i) % ctx.q for i in range(S.dim)], axis=1)
        coeffs = ctx.decode(digits)
        cand = combine(ctx, coeffs, S.basis).reshape(-1, n, n, ctx.k)
        ok = np.flatnonzero(batch_rank(ctx, cand) == n)
        if ok.size:
            return Mat(ctx, cand[ok[0]])
    return None


def equivalence(B: MatTuple, C: MatTuple, **kw) -> Optional[Tuple[Mat, Mat]]:
    """Invertible (A, D) with A B_i = C_i D, via conjugacy of 2n x 2n tuples."""
    if B.n != C.n or B.m != C.m:
        raise ShapeMismatch("tuples must have the same n and m")
    ctx, n, m = B.ctx, B.n, B.m

    def lift(T: MatTuple) -> MatTuple:
        out = ctx.zeros((m + 1, 2 * n, 2 * n))
        out[0, :n, :n] = identity_arr(ctx, n)
        out[1:, :n, n:] = T.a
        return MatTuple(ctx, out)

    P = module_iso(lift(B), lift(C), **kw)
    if P is None:
        return None
    return Mat(ctx, P.a[:n, :n]), Mat(ctx, P.a[n:, n:])
