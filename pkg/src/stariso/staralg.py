"""Adjoint algebras of form tuples and the decomposition problem X* X = E.

For a non-degenerate slotwise eps-symmetric tuple B the adjoint algebra is the
set of D with A^t B_i = B_i D for some (then unique) A; the involution is
D* = A.  decompose() finds X in the algebra with X* X = E by working on the
semisimple quotient summand by summand and lifting back through the radical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .algstruct import AlgebraRep, StructureData, intertwiners, module_iso, wedderburn
from .errors import Degenerate, InternalError, NotInvertible, ShapeMismatch
from .exactla import Mat, MatTuple, Subspace, bmm, combine, identity_arr, solution_space, transpose, tuple_kernel
from .ffield import Fel, FieldCtx, Subfield
from .forms import HERMITIAN, ORTHOGONAL, SYMPLECTIC, FormInstance, isometry_single


def adjoint_pairs(B: MatTuple) -> Subspace:
    """All (A, D) with A^t B_i = B_i D, as a Subspace of shape (2, n, n) (D first)."""
    ctx, n = B.ctx, B.n

    def fn(X):
        D, A = X[:, 0], X[:, 1]
        if B.m == 0:
            return ctx.zeros((X.shape[0], 0))
        lhs = bmm(ctx, transpose(A)[:, None], B.a[None])
        rhs = bmm(ctx, B.a[None], D[:, None])
        return ctx.sub(lhs, rhs)

    return solution_space(ctx, (2, n, n), fn)


class AdjointAlgebra:
    """The D-projection of Adj(B) with its involution as a coordinate matrix."""

    def __init__(self, B: MatTuple, alg: AlgebraRep, star_mat: np.ndarray):
        self.B = B
        self.ctx = B.ctx
        self.alg = alg
        self.star_mat = star_mat  # (d, d, k): row b = coords of star(basis_b)
        self._sd: Optional[StructureData] = None

    @property
    def dim(self) -> int:
        return self.alg.dim

    def star(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        lead = x.shape[:-2]
        out = combine(self.ctx, x.reshape(-1, self.dim, self.ctx.k), self.star_mat)
        return out.reshape(lead + (self.dim, self.ctx.k))

    def star_mat_of(self, X: Mat) -> Mat:
        return self.alg.mat(self.star(self.alg.coords(X)))

    @property
    def structure(self) -> StructureData:
        if self._sd is None:
            self._sd = wedderburn(self.alg)
        return self._sd


def adjoint(B: MatTuple) -> AdjointAlgebra:
    if tuple_kernel(B).dim:
        raise Degenerate("tuple has a nonzero common kernel")
    ctx, n = B.ctx, B.n
    pairs = adjoint_pairs(B)
    # D occupies the leading coordinates, so the echelon basis restricted to D
    # is the echelon basis of the projection and the A halves are the stars
    arr = pairs.arrays()
    D, A = arr[:, 0], arr[:, 1]
    alg = AlgebraRep(ctx, D, unital=True)
    if alg.dim != pairs.dim or not np.array_equal(alg.basis, D):
        raise InternalError("adjoint projection is not injective")
    star_mat = alg.coords(A)
    return AdjointAlgebra(B, alg, star_mat)


# ---------------------------------------------------------------------------
# involution on the semisimple quotient


@dataclass
class FixedSummand:
    index: int
    type: str
    A: Mat  # Gram witness over the summand field
    conj: Optional[Subfield] = None


@dataclass
class StarStructure:
    pairing: List[int]  # pairing[i] = j when star maps summand i onto summand j
    fixed: Dict[int, FixedSummand] = field(default_factory=dict)

    def describe(self) -> List[str]:
        out = []
        for i, j in enumerate(self.pairing):
            if i == j:
                out.append(f"summand {i}: {self.fixed[i].type}")
            elif i < j:
                out.append(f"summands {i}<->{j}: exchange")
        return out


def quotient_star(adj: AdjointAlgebra, sd: StructureData, y: np.ndarray) -> np.ndarray:
    return sd.to_quotient(adj.star(sd.from_quotient(y)))


def _sigma(adj: AdjointAlgebra, sd: StructureData, i: int, X: np.ndarray) -> np.ndarray:
    s = sd.summands[i]
    return s.phi(quotient_star(adj, sd, s.phi_inv(X)))


def induced_star_structure(adj: AdjointAlgebra, sd: StructureData) -> StarStructure:
    ctx = adj.ctx
    es = [s.e for s in sd.summands]
    pairing = []
    for e in es:
        se = quotient_star(adj, sd, e)
        j = next((j for j, f in enumerate(es) if np.array_equal(se, f)), None)
        if j is None:
            raise InternalError("star does not permute the central idempotents")
        pairing.append(j)
    ss = StarStructure(pairing)
    for i, j in enumerate(pairing):
        if i == j:
            ss.fixed[i] = _classify_fixed(adj, sd, i)
    return ss


def _classify_fixed(adj: AdjointAlgebra, sd: StructureData, i: int) -> FixedSummand:
    s = sd.summands[i]
    L, n = s.L, s.n
    # does sigma move the center?
    bI = L.mul(identity_arr(L, n), s.beta)
    sb = _sigma(adj, sd, i, bI)
    conj = None
    if not np.array_equal(sb, bI):
        if L.k % 2:
            raise InternalError("nontrivial field involution on an odd-degree center")
        conj = Subfield(L, L.k // 2)
        if not np.array_equal(sb, conj.conj(bI)):
            raise InternalError("star acts on the center by an unexpected automorphism")
    theta = conj.conj if conj is not None else (lambda a: a)
    # A sigma(X) = theta(X)^t A for all matrix units X
    units = identity_arr(L, n * n).reshape(n * n, n, n, L.k)
    Bt = MatTuple(L, _sigma(adj, sd, i, units))
    Ct = MatTuple(L, transpose(theta(units)))
    A = module_iso(Bt, Ct)
    if A is None:
        raise InternalError("no Gram witness for the involution on a simple summand")
    At = A.T
    if conj is None:
        if At == A:
            typ = ORTHOGONAL
        elif At == -A:
            typ = SYMPLECTIC
        else:
            raise InternalError("Gram witness is neither symmetric nor skew")
        return FixedSummand(i, typ, A, None)
    # conj(A)^t = lam A with N(lam) = 1; rescale by mu = c + lam conj(c)
    Ab = A.map(theta).T
    k0 = int(np.flatnonzero(A.a.any(axis=-1))[0])
    r, c0 = divmod(k0, n)
    lam = Fel(L, Ab.a[r, c0]) / Fel(L, A.a[r, c0])
    for code in range(1, L.q):
        c = Fel(L, L.decode(code))
        mu = c + lam * Fel(L, theta(c.v))
        if not mu.is_zero():
            break
    A = A.scale(mu)
    if A.map(theta).T != A:
        raise InternalError("hermitian normalization failed")
    return FixedSummand(i, HERMITIAN, A, conj)


# ---------------------------------------------------------------------------
# solving on the quotient


def solve_simple(summand, fx: FixedSummand, E: np.ndarray) -> Optional[np.ndarray]:
    """X with A^{-1} X'^t A X = E on one fixed summand (matrices over its field)."""
    L = summand.L
    A = fx.A
    F = A @ Mat(L, E)
    f = FormInstance(A, fx.type, fx.conj, check=False)
    g = FormInstance(F, fx.type, fx.conj, check=False)
    Y = isometry_single(f, g)
    if Y is None:
        return None
    X = Y.map(fx.conj.conj) if fx.type == HERMITIAN else Y
    return X.a


@dataclass
class SemisimpleResult:
    X: Optional[np.ndarray]  # quotient coordinates
    refuted: Optional[int] = None


def solve_semisimple(ss: StarStructure, sd: StructureData, Ebar: np.ndarray) -> SemisimpleResult:
    """Xbar in quotient coordinates with star(Xbar) Xbar = Ebar, or the refuting summand."""
    ctx = sd.ctx
    Q = sd.Q
    X = ctx.zeros((Q.dim,))
    for i, j in enumerate(ss.pairing):
        s = sd.summands[i]
        if i == j:
            Xi = solve_simple(s, ss.fixed[i], s.phi(Ebar))
            if Xi is None:
                return SemisimpleResult(None, i)
            X = ctx.add(X, s.phi_inv(Xi))
        elif i < j:
            # exchange pair: X = e_i Ebar + e_j
            X = ctx.add(X, ctx.add(Q.mul(s.e, Ebar), sd.summands[j].e))
    return SemisimpleResult(X)


# ---------------------------------------------------------------------------
# lifting through the radical


def lift_through_radical(adj: AdjointAlgebra, E: Mat, Y: Mat, max_rounds: Optional[int] = None) -> Tuple[Mat, int]:
    """Correct Y (with Y*Y = E mod Rad) to X with X*X = E; returns (X, rounds)."""
    ctx = adj.ctx
    n = adj.alg.n
    half = Fel(ctx, ctx.const(2)).inv()
    max_rounds = max_rounds if max_rounds is not None else max(1, math.ceil(math.log2(max(n, 2)))) + 1
    rounds = 0
    while True:
        Ys = adj.star_mat_of(Y)
        err = E - Ys @ Y
        if err.is_zero():
            return Y, rounds
        if rounds >= max_rounds:
            raise InternalError("radical lifting did not converge")
        if not Ys.is_invertible():
            raise NotInvertible("intermediate lift is not invertible")
        Z = Ys.inv() @ err.scale(half)
        Y = Y + Z
        rounds += 1


# ---------------------------------------------------------------------------


@dataclass
class DecomposeResult:
    X: Optional[Mat]
    rounds: int = 0
    refuted: Optional[int] = None
    signature: List[Tuple[int, int]] = field(default_factory=list)
    star_types: List[str] = field(default_factory=list)


def decompose(adj: AdjointAlgebra, E: Mat) -> DecomposeResult:
    """X in the adjoint algebra with X* X = E, or a record of the refuting summand."""
    if not adj.alg.contains(E):
        raise ShapeMismatch("E is not in the adjoint algebra")
    sd = adj.structure
    ss = induced_star_structure(adj, sd)
    Eq = sd.to_quotient(adj.alg.coords(E))
    res = solve_semisimple(ss, sd, Eq)
    info = dict(signature=sd.signature(), star_types=ss.describe())
    if res.X is None:
        return DecomposeResult(None, refuted=res.refuted, **info)
    Y = adj.alg.mat(sd.from_quotient(res.X))
    X, rounds = lift_through_radical(adj, E, Y)
    return DecomposeResult(X, rounds=rounds, **info)
