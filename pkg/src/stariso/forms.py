"""Single classical forms: symmetric, alternating and hermitian.

A form is stored by its Gram matrix G with b(u, v) = u^t G v', where v' is v
(orthogonal, symplectic) or the conjugate of v (hermitian).  A change of basis
T acts as G -> T^t G T'.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import Degenerate, ShapeMismatch
from .exactla import Mat
from .ffield import Fel, FieldCtx, Subfield, norm_eq, sqrt, two_squares

ORTHOGONAL = "orthogonal"
SYMPLECTIC = "symplectic"
HERMITIAN = "hermitian"
TYPES = (ORTHOGONAL, SYMPLECTIC, HERMITIAN)


class FormInstance:
    """An invertible Gram matrix tagged with its type."""

    def __init__(self, gram: Mat, type: str, conj: Optional[Subfield] = None, check: bool = True):
        if type not in TYPES:
            raise ValueError(f"unknown form type {type!r}")
        if gram.rows != gram.cols:
            raise ShapeMismatch("Gram matrix must be square")
        self.gram = gram
        self.type = type
        self.ctx = gram.ctx
        if type == HERMITIAN and conj is None:
            if self.ctx.k % 2:
                raise ValueError("hermitian forms need an even-degree field")
            conj = Subfield(self.ctx, self.ctx.k // 2)
        self.conj = conj if type == HERMITIAN else None
        if check:
            self._check()

    def _check(self):
        G = self.gram
        if self.type == ORTHOGONAL and G.T != G:
            raise ValueError("orthogonal Gram matrix must be symmetric")
        if self.type == SYMPLECTIC:
            if G.T != -G or np.diagonal(G.a, axis1=0, axis2=1).any():
                raise ValueError("symplectic Gram matrix must be alternating")
        if self.type == HERMITIAN and self.bar(G).T != G:
            raise ValueError("hermitian Gram matrix must equal its conjugate transpose")
        if not G.is_invertible():
            raise Degenerate("form is degenerate")

    @property
    def n(self) -> int:
        return self.gram.rows

    def bar(self, M: Mat) -> Mat:
        return M.map(self.conj.conj) if self.conj is not None else M

    def transform(self, T: Mat) -> Mat:
        return T.T @ self.gram @ self.bar(T)


@dataclass
class CanonicalForm:
    type: str
    n: int
    label: Tuple
    gram: Mat
    transform: Mat

    def describe(self) -> str:
        if self.type == ORTHOGONAL:
            return f"orthogonal n={self.n} disc={'square' if self.label[1] == 0 else 'nonsquare'}"
        return f"{self.type} n={self.n}"


def _first_nonzero(vals: np.ndarray) -> Optional[int]:
    nz = np.flatnonzero(vals.any(axis=-1))
    return int(nz[0]) if nz.size else None


def gram_schmidt(f: FormInstance) -> Tuple[Mat, Mat]:
    """Basis T (columns) with T^t G T' diagonal, or J-block diagonal for alternating forms."""
    ctx = f.ctx
    n = f.n
    T = Mat.identity(ctx, n)
    if f.type == SYMPLECTIC:
        return _symplectic_basis(f, T)
    for i in range(n):
        M = f.transform(T)
        if not M.a[i, i].any():
            j = _first_nonzero(np.diagonal(M.a, axis1=0, axis2=1).T[i:])
            if j is not None:
                j += i
                T.a[:, [i, j]] = T.a[:, [j, i]]
            else:
                # every remaining vector is isotropic: use e_i + c e_j with b(e_i, e_j) != 0
                j = _first_nonzero(M.a[i, i:])
                if j is None:
                    raise Degenerate("form is degenerate")
                j += i
                c = _nonisotropic_shift(f, Fel(ctx, M.a[i, j]))
                T.a[:, i] = ctx.add(T.a[:, i], ctx.mul(T.a[:, j], c.v))
            M = f.transform(T)
        piv = Fel(ctx, M.a[i, i]).inv()
        for j in range(i + 1, n):
            if M.a[j, i].any():
                c = Fel(ctx, M.a[j, i]) * piv
                T.a[:, j] = ctx.sub(T.a[:, j], ctx.mul(T.a[:, i], c.v))
    return T, f.transform(T)


def _nonisotropic_shift(f: FormInstance, m: Fel) -> Fel:
    """c with b(e_i + c e_j) != 0 when b(e_i, e_j) = m and both are isotropic."""
    ctx = f.ctx
    one = Fel(ctx, ctx.ones())
    if f.type == ORTHOGONAL:
        return one
    # value is conj(c) m + c conj(m), a trace; c = 1 or c = tau works
    cm = Fel(ctx, f.conj.conj(m.v))
    if not (m + cm).is_zero():
        return one
    return f.conj.tau


def _symplectic_basis(f: FormInstance, T: Mat) -> Tuple[Mat, Mat]:
    ctx = f.ctx
    n = f.n
    for i in range(0, n, 2):
        M = f.transform(T)
        j = _first_nonzero(M.a[i, i + 1:])
        if j is None:
            raise Degenerate("alternating form is degenerate")
        j += i + 1
        if j != i + 1:
            T.a[:, [i + 1, j]] = T.a[:, [j, i + 1]]
        M = f.transform(T)
        T.a[:, i + 1] = ctx.mul(T.a[:, i + 1], ctx.inv(M.a[i, i + 1]))
        M = f.transform(T)
        # x <- x - b(x, w) u + b(x, u) w for the hyperbolic pair (u, w)
        for k in range(i + 2, n):
            bxw, bxu = M.a[k, i + 1], M.a[k, i]
            T.a[:, k] = ctx.add(ctx.sub(T.a[:, k], ctx.mul(T.a[:, i], bxw)), ctx.mul(T.a[:, i + 1], bxu))
    return T, f.transform(T)


def _scale_col(T: Mat, i: int, c: Fel):
    T.a[:, i] = T.ctx.mul(T.a[:, i], c.v)


def canonicalize(f: FormInstance) -> CanonicalForm:
    ctx = f.ctx
    n = f.n
    if f.type == SYMPLECTIC:
        if n % 2:
            raise Degenerate("odd-size alternating forms are degenerate")
        T, D = gram_schmidt(f)
        return CanonicalForm(SYMPLECTIC, n, (SYMPLECTIC, n), D, T)
    T, D = gram_schmidt(f)
    diag = [Fel(ctx, D.a[i, i]) for i in range(n)]
    if f.type == HERMITIAN:
        sub = f.conj
        for i, d in enumerate(diag):
            x, y = norm_eq(d.inv(), sub.omega, ctx, sub)
            _scale_col(T, i, x + y * sub.tau)
        return CanonicalForm(HERMITIAN, n, (HERMITIAN, n), f.transform(T), T)
    omega = ctx.omega
    winv = omega.inv()
    nonsq = []
    for i, d in enumerate(diag):
        r = sqrt(d)
        if r is not None:
            _scale_col(T, i, r.inv())
        else:
            _scale_col(T, i, sqrt(d * winv).inv())
            nonsq.append(i)
    # merge pairs diag(w, w) -> diag(1, 1) using M = [[a, b], [b, -a]], a^2 + b^2 = w
    if len(nonsq) >= 2:
        a, b = two_squares(omega)
        for s in range(0, len(nonsq) - 1, 2):
            i, j = nonsq[s], nonsq[s + 1]
            ci, cj = T.a[:, i].copy(), T.a[:, j].copy()
            ai, bi = (a * winv).v, (b * winv).v
            T.a[:, i] = ctx.add(ctx.mul(ci, ai), ctx.mul(cj, bi))
            T.a[:, j] = ctx.sub(ctx.mul(ci, bi), ctx.mul(cj, ai))
    odd = len(nonsq) % 2
    if odd:
        last = nonsq[-1]
        order = [c for c in range(n) if c != last] + [last]
        T = Mat(ctx, T.a[:, order])
    return CanonicalForm(ORTHOGONAL, n, (ORTHOGONAL, odd), f.transform(T), T)


def isometry_single(f: FormInstance, g: FormInstance) -> Optional[Mat]:
    """Y with Y^t G_f Y' = G_g, or None when the canonical labels differ."""
    if f.type != g.type or f.n != g.n:
        raise ShapeMismatch("forms must have the same type and size")
    cf, cg = canonicalize(f), canonicalize(g)
    if cf.label != cg.label:
        return None
    return cf.transform @ cg.transform.inv()


def form_type_of(G: Mat, conj: Optional[Subfield] = None) -> Optional[str]:
    """Classify an invertible Gram matrix, or None if it is none of the three types."""
    if conj is not None and G.map(conj.conj).T == G:
        return HERMITIAN
    if G.T == G:
        return ORTHOGONAL
    if G.T == -G:
        return SYMPLECTIC
    return None
