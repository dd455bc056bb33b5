"""Exact dense linear algebra over F_q.

Matrices are int64 arrays of shape (rows, cols, k) (see ffield).  The array
kernels (rref_arr, nullspace_arr, bmm, ...) are what the higher layers use in
their inner loops; Mat, MatTuple and Subspace wrap them for the public API.
"""
from __future__ import annotations

import json
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotInvertible, ParseError, ShapeMismatch
from .ffield import Fel, FieldCtx, parse_field


# ---------------------------------------------------------------------------
# array kernels


def bmm(ctx: FieldCtx, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Batched matrix product over F_q, broadcasting leading axes."""
    p = ctx.p
    if ctx.k == 1:
        return ((X[..., 0] @ Y[..., 0]) % p)[..., None]
    Xk = np.moveaxis(X, -1, -3)[..., :, None, :, :]
    Yk = np.moveaxis(Y, -1, -3)[..., None, :, :, :]
    prod = (Xk @ Yk) % p  # (..., k, k, r, c)
    out = np.tensordot(prod, ctx._T, axes=([-4, -3], [0, 1]))  # (..., r, c, k)
    return out % p


def transpose(X: np.ndarray) -> np.ndarray:
    return np.swapaxes(X, -2, -3)


def rref_arr(ctx: FieldCtx, A: np.ndarray, ncols: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form; pivots searched only in the first ncols columns."""
    A = np.array(A, dtype=np.int64, copy=True)
    rows, cols = A.shape[0], A.shape[1]
    nc = cols if ncols is None else ncols
    piv: List[int] = []
    r = 0
    for c in range(nc):
        if r == rows:
            break
        idx = np.flatnonzero(A[r:, c].any(axis=1))
        if idx.size == 0:
            continue
        i = r + idx[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r, c:] = ctx.mul(A[r, c:], ctx.inv(A[r, c]))
        f = A[:, c].copy()
        f[r] = 0
        nzr = np.flatnonzero(f.any(axis=1))
        if nzr.size:
            A[nzr, c:] = ctx.sub(A[nzr, c:], ctx.mul(f[nzr][:, None, :], A[r, c:][None, :, :]))
        piv.append(c)
        r += 1
    return A, piv


def rank_arr(ctx: FieldCtx, A: np.ndarray) -> int:
    """Rank by forward elimination only."""
    A = np.array(A, dtype=np.int64, copy=True)
    rows, cols = A.shape[0], A.shape[1]
    r = 0
    for c in range(cols):
        if r == rows:
            break
        idx = np.flatnonzero(A[r:, c].any(axis=1))
        if idx.size == 0:
            continue
        i = r + idx[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        below = A[r + 1:, c]
        nzr = np.flatnonzero(below.any(axis=1))
        if nzr.size:
            f = ctx.mul(below[nzr], ctx.inv(A[r, c]))
            rows_idx = r + 1 + nzr
            A[rows_idx, c:] = ctx.sub(A[rows_idx, c:], ctx.mul(f[:, None, :], A[r, c:][None, :, :]))
        r += 1
    return r


def nullspace_arr(ctx: FieldCtx, A: np.ndarray) -> np.ndarray:
    """Basis (d, cols, k) of {x : A x = 0}."""
    rows, cols = A.shape[0], A.shape[1]
    if rows == 0:
        return identity_arr(ctx, cols)
    R, piv = rref_arr(ctx, A)
    free = [c for c in range(cols) if c not in set(piv)]
    out = ctx.zeros((len(free), cols))
    for t, f in enumerate(free):
        out[t, f] = ctx.ones()
        for i, c in enumerate(piv):
            out[t, c] = ctx.neg(R[i, f])
    return out


def rowspace_arr(ctx: FieldCtx, A: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Echelon basis of the row span, with its pivot columns."""
    if A.shape[0] == 0:
        return A.copy(), []
    R, piv = rref_arr(ctx, A)
    return R[: len(piv)], piv


def inverse_arr(ctx: FieldCtx, A: np.ndarray) -> Optional[np.ndarray]:
    n = A.shape[0]
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)[:, :, None] * ctx.ones()], axis=1)
    R, piv = rref_arr(ctx, aug, ncols=n)
    if len(piv) < n:
        return None
    return R[:, n:]


def identity_arr(ctx: FieldCtx, n: int) -> np.ndarray:
    out = ctx.zeros((n, n))
    out[np.arange(n), np.arange(n), 0] = 1
    return out


def det_arr(ctx: FieldCtx, A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=np.int64, copy=True)
    n = A.shape[0]
    d = ctx.ones()
    for c in range(n):
        idx = np.flatnonzero(A[c:, c].any(axis=1))
        if idx.size == 0:
            return ctx.zeros()
        i = c + idx[0]
        if i != c:
            A[[c, i]] = A[[i, c]]
            d = ctx.neg(d)
        d = ctx.mul(d, A[c, c])
        inv = ctx.inv(A[c, c])
        f = ctx.mul(A[c + 1:, c], inv)
        A[c + 1:, c:] = ctx.sub(A[c + 1:, c:], ctx.mul(f[:, None, :], A[c, c:][None, :, :]))
    return d


# ---------------------------------------------------------------------------
# Mat


class Mat:
    """A rows x cols matrix over ctx."""

    __slots__ = ("ctx", "a")

    def __init__(self, ctx: FieldCtx, a):
        self.ctx = ctx
        a = np.asarray(a, dtype=np.int64)
        if a.ndim == 2 and ctx.k == 1:
            a = a[:, :, None]
        if a.ndim != 3 or a.shape[2] != ctx.k:
            raise ShapeMismatch(f"bad matrix array shape {a.shape} for k={ctx.k}")
        self.a = a % ctx.p

    # constructors
    @classmethod
    def zeros(cls, ctx: FieldCtx, r: int, c: Optional[int] = None) -> "Mat":
        return cls(ctx, ctx.zeros((r, r if c is None else c)))

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "Mat":
        return cls(ctx, identity_arr(ctx, n))

    @classmethod
    def from_ints(cls, ctx: FieldCtx, rows: Sequence[Sequence[int]]) -> "Mat":
        arr = np.array(rows, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(len(rows), 0)
        return cls(ctx, ctx.const(arr))

    @classmethod
    def diag(cls, ctx: FieldCtx, entries: Sequence) -> "Mat":
        n = len(entries)
        out = ctx.zeros((n, n))
        for i, e in enumerate(entries):
            out[i, i] = ctx.el(e).v
        return cls(ctx, out)

    @classmethod
    def random(cls, ctx: FieldCtx, r: int, c: Optional[int] = None) -> "Mat":
        return cls(ctx, ctx.random((r, r if c is None else c)))

    @classmethod
    def random_invertible(cls, ctx: FieldCtx, n: int) -> "Mat":
        while True:
            M = cls.random(ctx, n)
            if M.rank() == n:
                return M

    # shape
    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.a.shape[0], self.a.shape[1]

    def __getitem__(self, ij) -> Fel:
        i, j = ij
        return Fel(self.ctx, self.a[i, j])

    def __setitem__(self, ij, v):
        i, j = ij
        self.a[i, j] = self.ctx.el(v).v

    # arithmetic
    def __add__(self, o: "Mat") -> "Mat":
        return Mat(self.ctx, self.ctx.add(self.a, o.a))

    def __sub__(self, o: "Mat") -> "Mat":
        return Mat(self.ctx, self.ctx.sub(self.a, o.a))

    def __neg__(self) -> "Mat":
        return Mat(self.ctx, self.ctx.neg(self.a))

    def __matmul__(self, o: "Mat") -> "Mat":
        if self.cols != o.rows:
            raise ShapeMismatch(f"{self.shape} @ {o.shape}")
        return Mat(self.ctx, bmm(self.ctx, self.a, o.a))

    def scale(self, c) -> "Mat":
        c = self.ctx.el(c)
        return Mat(self.ctx, self.ctx.mul(self.a, c.v))

    def __mul__(self, c) -> "Mat":
        return self.scale(c)

    __rmul__ = __mul__

    @property
    def T(self) -> "Mat":
        return Mat(self.ctx, transpose(self.a))

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Mat":
        """Apply an elementwise array map (e.g. a field conjugation)."""
        return Mat(self.ctx, fn(self.a))

    def copy(self) -> "Mat":
        return Mat(self.ctx, self.a.copy())

    def __eq__(self, o):
        return isinstance(o, Mat) and self.a.shape == o.a.shape and bool(np.array_equal(self.a, o.a))

    def __hash__(self):
        return hash(self.a.tobytes())

    def is_zero(self) -> bool:
        return not self.a.any()

    # linear algebra
    def rank(self) -> int:
        return rank_arr(self.ctx, self.a)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inv(self) -> "Mat":
        if self.rows != self.cols:
            raise ShapeMismatch("inverse of a non-square matrix")
        r = inverse_arr(self.ctx, self.a)
        if r is None:
            raise NotInvertible("matrix is singular")
        return Mat(self.ctx, r)

    def det(self) -> Fel:
        if self.rows != self.cols:
            raise ShapeMismatch("det of a non-square matrix")
        return Fel(self.ctx, det_arr(self.ctx, self.a))

    def to_lists(self) -> List[List[str]]:
        return [[fmt_el(self.ctx, self.a[i, j]) for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        return "Mat(" + "; ".join(" ".join(r) for r in self.to_lists()) + ")"


def block_diag(ctx: FieldCtx, *blocks: Mat) -> Mat:
    n = sum(b.rows for b in blocks)
    m = sum(b.cols for b in blocks)
    out = ctx.zeros((n, m))
    i = j = 0
    for b in blocks:
        out[i:i + b.rows, j:j + b.cols] = b.a
        i += b.rows
        j += b.cols
    return Mat(ctx, out)


def rref(M: Mat) -> Tuple[Mat, int, List[int], Mat]:
    """(R, rank, pivot columns, T) with T invertible and T @ M = R."""
    ctx = M.ctx
    aug = np.concatenate([M.a, identity_arr(ctx, M.rows)], axis=1)
    R, piv = rref_arr(ctx, aug, ncols=M.cols)
    return Mat(ctx, R[:, : M.cols]), len(piv), piv, Mat(ctx, R[:, M.cols:])


# ---------------------------------------------------------------------------
# Subspace


class Subspace:
    """Span of vectors of a fixed shape, stored as an RREF basis.

    Vectors are flattened to length `dim_ambient`; `shape` remembers the
    original shape so bases of matrix spaces can be handed back as Mats.
    """

    def __init__(self, ctx: FieldCtx, vectors: np.ndarray, shape: Optional[Tuple[int, ...]] = None,
                 _echelon: Optional[Tuple[np.ndarray, List[int]]] = None):
        self.ctx = ctx
        vectors = np.asarray(vectors, dtype=np.int64)
        if shape is None:
            shape = vectors.shape[1:-1]
        self.shape = tuple(shape)
        self.ambient = int(np.prod(self.shape)) if self.shape else 1
        flat = vectors.reshape(-1, self.ambient, ctx.k)
        if _echelon is not None:
            self.basis, self.pivots = _echelon
        else:
            self.basis, self.pivots = rowspace_arr(ctx, flat)

    @classmethod
    def zero(cls, ctx: FieldCtx, shape: Tuple[int, ...]) -> "Subspace":
        amb = int(np.prod(shape))
        return cls(ctx, ctx.zeros((0, amb)), shape)

    @classmethod
    def full(cls, ctx: FieldCtx, shape: Tuple[int, ...]) -> "Subspace":
        amb = int(np.prod(shape))
        return cls(ctx, identity_arr(ctx, amb), shape)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of v (assumed in the span) w.r.t. the echelon basis."""
        v = np.asarray(v, dtype=np.int64).reshape(-1, self.ambient, self.ctx.k)
        return v[:, self.pivots]

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64).reshape(-1, self.ambient, self.ctx.k)
        if self.dim == 0:
            return v % self.ctx.p
        c = v[:, self.pivots]  # (N, d, k)
        proj = combine(self.ctx, c, self.basis)
        return self.ctx.sub(v, proj)

    def contains(self, v) -> bool:
        if isinstance(v, Mat):
            v = v.a
        return not self.reduce(v).any()

    def contains_space(self, other: "Subspace") -> bool:
        return not self.reduce(other.basis).any()

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.ctx, np.concatenate([self.basis, other.basis]), self.shape)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.pivots == other.pivots
                and np.array_equal(self.basis, other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        # x = sum a_i u_i = sum b_j w_j
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ctx, self.shape)
        M = np.concatenate([self.basis, self.ctx.neg(other.basis)]).transpose(1, 0, 2)
        ns = nullspace_arr(self.ctx, M)
        vecs = combine(self.ctx, ns[:, : self.dim], self.basis)
        return Subspace(self.ctx, vecs, self.shape)

    def mats(self) -> List[Mat]:
        return [Mat(self.ctx, b.reshape(self.shape + (self.ctx.k,))) for b in self.basis]

    def arrays(self) -> np.ndarray:
        return self.basis.reshape((self.dim,) + self.shape + (self.ctx.k,))

    def vectors(self) -> np.ndarray:
        return self.basis

    def random_element(self) -> np.ndarray:
        c = self.ctx.random((self.dim,))
        return combine(self.ctx, c[None], self.basis)[0].reshape(self.shape + (self.ctx.k,))


def combine(ctx: FieldCtx, coeffs: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Linear combinations: coeffs (N, d, k) times vecs (d, ..., k) -> (N, ..., k)."""
    d = vecs.shape[0]
    N = coeffs.shape[0]
    flat = vecs.reshape(d, -1, ctx.k)
    if d == 0:
        return ctx.zeros((N,) + vecs.shape[1:-1])
    out = bmm(ctx, coeffs.reshape(N, d, ctx.k), flat)
    return out.reshape((N,) + vecs.shape[1:])


# ---------------------------------------------------------------------------
# solving


def solve_linear(A: Mat, b) -> Optional[Tuple[Mat, Subspace]]:
    """Solve A x = b.  Returns (particular column, nullspace) or None."""
    ctx = A.ctx
    bv = b.a if isinstance(b, Mat) else np.asarray(b, dtype=np.int64)
    bv = bv.reshape(A.rows, 1, ctx.k)
    aug = np.concatenate([A.a, bv], axis=1)
    R, piv = rref_arr(ctx, aug, ncols=A.cols)
    rank = len(piv)
    if R[rank:, A.cols].any():
        return None
    x = ctx.zeros((A.cols, 1))
    for i, c in enumerate(piv):
        x[c, 0] = R[i, A.cols]
    ns = nullspace_arr(ctx, A.a)
    return Mat(ctx, x), Subspace(ctx, ns.reshape(-1, A.cols, ctx.k), (A.cols,))


def solution_space(ctx: FieldCtx, shape: Tuple[int, ...], fn: Callable[[np.ndarray], np.ndarray]) -> Subspace:
    """All X of the given shape with fn(X) = 0, for a linear fn.

    fn receives a batch of unknowns (N, *shape, k) and must return a batch
    (N, ..., k) of constraint values.  It is evaluated once on the unit basis.
    """
    amb = int(np.prod(shape))
    units = identity_arr(ctx, amb).reshape((amb,) + tuple(shape) + (ctx.k,))
    vals = np.asarray(fn(units)).reshape(amb, -1, ctx.k)
    M = vals.transpose(1, 0, 2)
    ns = nullspace_arr(ctx, M) if M.shape[0] else identity_arr(ctx, amb)
    return Subspace(ctx, ns.reshape((-1,) + tuple(shape) + (ctx.k,)), tuple(shape))


# ---------------------------------------------------------------------------
# MatTuple


class MatTuple:
    """m square n x n matrices with an optional signature vector."""

    def __init__(self, ctx: FieldCtx, mats, sig: Optional[Sequence[int]] = None, n: Optional[int] = None):
        self.ctx = ctx
        if isinstance(mats, np.ndarray):
            a = mats.astype(np.int64)
        else:
            mats = list(mats)
            if mats:
                a = np.stack([m.a if isinstance(m, Mat) else np.asarray(m) for m in mats]).astype(np.int64)
            else:
                if n is None:
                    raise ShapeMismatch("empty tuple needs explicit n")
                a = ctx.zeros((0, n, n))
        if a.ndim != 4 or a.shape[1] != a.shape[2]:
            raise ShapeMismatch(f"tuple must hold square matrices, got {a.shape}")
        self.a = a % ctx.p
        if sig is not None:
            sig = tuple(int(s) for s in sig)
            if len(sig) != self.m or any(s not in (1, -1) for s in sig):
                raise ShapeMismatch("signature must be a +-1 vector of length m")
        self.sig = sig

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def __len__(self):
        return self.m

    def __getitem__(self, i) -> Mat:
        return Mat(self.ctx, self.a[i])

    def __iter__(self):
        return (self[i] for i in range(self.m))

    def mats(self) -> List[Mat]:
        return list(self)

    def with_sig(self, sig) -> "MatTuple":
        return MatTuple(self.ctx, self.a, sig, n=self.n)

    def congruence(self, F: Mat) -> "MatTuple":
        """(F^t B_i F)_i."""
        return MatTuple(self.ctx, bmm(self.ctx, bmm(self.ctx, transpose(F.a)[None], self.a), F.a[None]),
                        self.sig, n=F.cols)

    def left_right(self, A: Mat, D: Mat) -> "MatTuple":
        """(A B_i D)_i."""
        return MatTuple(self.ctx, bmm(self.ctx, bmm(self.ctx, A.a[None], self.a), D.a[None]), self.sig, n=self.n)

    def transposed(self) -> "MatTuple":
        return MatTuple(self.ctx, transpose(self.a), self.sig, n=self.n)

    def is_eps_symmetric(self, sig: Optional[Sequence[int]] = None) -> bool:
        sig = sig if sig is not None else self.sig
        if sig is None:
            return False
        s = np.array(sig, dtype=np.int64)[:, None, None, None]
        return bool(np.array_equal(transpose(self.a), (s * self.a) % self.ctx.p))

    def __eq__(self, o):
        return isinstance(o, MatTuple) and self.a.shape == o.a.shape and bool(np.array_equal(self.a, o.a))

    def __repr__(self):
        return f"MatTuple(n={self.n}, m={self.m}, sig={self.sig})"


def tuple_kernel(B: MatTuple) -> Subspace:
    ctx = B.ctx
    if B.m == 0:
        return Subspace.full(ctx, (B.n,))
    stacked = B.a.reshape(B.m * B.n, B.n, ctx.k)
    ns = nullspace_arr(ctx, stacked)
    return Subspace(ctx, ns.reshape(-1, B.n, ctx.k), (B.n,))


def tuple_image(B: MatTuple) -> Subspace:
    ctx = B.ctx
    if B.m == 0:
        return Subspace.zero(ctx, (B.n,))
    cols = transpose(B.a).reshape(B.m * B.n, B.n, ctx.k)
    return Subspace(ctx, cols, (B.n,))


# ---------------------------------------------------------------------------
# text / json formats


def fmt_el(ctx: FieldCtx, v: np.ndarray) -> str:
    return ",".join(str(int(c)) for c in np.asarray(v).reshape(ctx.k))


def parse_el(ctx: FieldCtx, tok: str) -> np.ndarray:
    parts = [int(t) for t in tok.split(",") if t != ""]
    if ctx.k == 1 and len(parts) == 1:
        return ctx.const(parts[0])
    if len(parts) > ctx.k:
        raise ParseError(f"element {tok!r} has more than {ctx.k} coordinates")
    v = np.zeros(ctx.k, dtype=np.int64)
    v[: len(parts)] = parts
    return v % ctx.p


def format_mat(M: Mat) -> str:
    return "\n".join(" ".join(r) for r in M.to_lists())


def format_tuple(B: MatTuple) -> str:
    sig = "-" if B.sig is None else ",".join(str(s) for s in B.sig)
    lines = [f"{B.ctx.spec()} {B.n} {B.m} {sig}"]
    for M in B:
        lines.append(format_mat(M))
    return "\n".join(lines) + "\n"


def _resolve_field(tok: str, ctx: Optional[FieldCtx], seed: int) -> FieldCtx:
    if ctx is not None:
        if tok.isdigit() and int(tok) != ctx.q:
            raise ParseError(f"file field size {tok} does not match {ctx.spec()}")
        return ctx
    if tok.isdigit():
        from .ffield import is_prime

        if not is_prime(int(tok)):
            raise ParseError(f"field size {tok} is not prime; pass --field with an explicit modulus")
    return parse_field(tok, seed=seed)


def parse_tuple(text: str, ctx: Optional[FieldCtx] = None, seed: int = 0) -> MatTuple:
    """Parse the text format (or JSON) into a MatTuple."""
    s = text.strip()
    if s.startswith("{"):
        return _parse_tuple_json(json.loads(s), ctx, seed)
    lines = [ln.split("#", 1)[0].strip() for ln in s.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty tuple file")
    head = lines[0].split()
    if len(head) != 4:
        raise ParseError("header must be 'q n m sig'")
    ctx = _resolve_field(head[0], ctx, seed)
    n, m = int(head[1]), int(head[2])
    sig = None if head[3] == "-" else [int(t) for t in head[3].split(",")]
    body = lines[1:]
    if len(body) != n * m:
        raise ParseError(f"expected {n * m} matrix rows, got {len(body)}")
    a = ctx.zeros((m, n, n))
    for idx, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != n:
            raise ParseError(f"row {idx + 2} has {len(toks)} entries, expected {n}")
        i, r = divmod(idx, n)
        for j, t in enumerate(toks):
            a[i, r, j] = parse_el(ctx, t)
    return MatTuple(ctx, a, sig, n=n)


def _parse_tuple_json(obj: dict, ctx: Optional[FieldCtx], seed: int) -> MatTuple:
    ctx = _resolve_field(str(obj.get("field", obj.get("q"))), ctx, seed)
    n = int(obj["n"])
    mats = obj.get("mats", [])
    a = ctx.zeros((len(mats), n, n))
    for i, M in enumerate(mats):
        for r, row in enumerate(M):
            for j, e in enumerate(row):
                a[i, r, j] = parse_el(ctx, ",".join(str(x) for x in e) if isinstance(e, list) else str(e))
    sig = obj.get("sig")
    return MatTuple(ctx, a, sig, n=n)


def parse_mat(text: str, ctx: FieldCtx) -> Mat:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    return Mat(ctx, np.array([[parse_el(ctx, t) for t in r] for r in rows], dtype=np.int64).reshape(
        len(rows), len(rows[0]) if rows else 0, ctx.k))


def batch_rank(ctx: FieldCtx, A: np.ndarray) -> np.ndarray:
    """Ranks of a batch of matrices (B, r, c, k), eliminated in lockstep."""
    A = np.array(A, dtype=np.int64, copy=True)
    B, rows, cols = A.shape[0], A.shape[1], A.shape[2]
    rb = np.zeros(B, dtype=np.int64)
    ar = np.arange(B)
    ridx = np.arange(rows)
    for c in range(cols):
        nz = A[:, :, c].any(axis=2) & (ridx[None, :] >= rb[:, None])
        has = nz.any(axis=1) & (rb < rows)
        if not has.any():
            continue
        bsel = ar[has]
        prow = np.argmax(nz[bsel], axis=1)
        cur = rb[bsel]
        # swap pivot row into position rb
        tmp = A[bsel, prow].copy()
        A[bsel, prow] = A[bsel, cur]
        A[bsel, cur] = tmp
        pivrow = A[bsel, cur]  # (b, cols, k)
        inv = ctx.inv(pivrow[:, c])  # (b, k)
        below = (ridx[None, :] > cur[:, None])  # (b, rows)
        f = ctx.mul(A[bsel, :, c], inv[:, None, :]) * below[:, :, None]
        A[bsel] = ctx.sub(A[bsel], ctx.mul(f[:, :, None, :], pivrow[:, None, :, :]))
        rb[bsel] += 1
    return rb
