"""Isometry of tuples of eps-symmetric forms.

Pipeline: split off the common kernel, find a twisted equivalence
A^t B = C D of the cores, form E = A^{-1} D^{-1} in the adjoint algebra of C,
solve X* X = E, and return F = D^{-1} X^{-1} (moved back through the kernel
splitting).  Every positive answer is checked by verify_isometry.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .algstruct import equivalence
from .errors import InternalError, ShapeMismatch
from .exactla import Mat, MatTuple, block_diag, identity_arr, transpose, tuple_kernel
from .staralg import adjoint, decompose


@dataclass
class IsometryWitness:
    F: Mat
    trace: List[dict] = field(default_factory=list)
    parts: Optional[dict] = None  # adjoint algebra, E and X of the decomposition step


def extract_nondegenerate(B: MatTuple) -> Tuple[MatTuple, Mat, int]:
    """(core, S, d) with S^t B_i S = diag(core_i, 0) and d = dim of the common kernel."""
    ctx, n = B.ctx, B.n
    K = tuple_kernel(B)
    d = K.dim
    comp = [j for j in range(n) if j not in set(K.pivots)]
    S = ctx.zeros((n, n))
    S[comp, np.arange(n - d)] = ctx.ones()
    if d:
        S[:, n - d:] = transpose(K.basis)
    S = Mat(ctx, S)
    core = B.congruence(S)
    core = MatTuple(ctx, core.a[:, : n - d, : n - d], B.sig, n=n - d)
    return core, S, d


def verify_isometry(B: MatTuple, C: MatTuple, F: Mat) -> bool:
    if F.shape != (B.n, C.n) or B.m != C.m or B.n != C.n:
        return False
    if not F.is_invertible():
        return False
    return B.congruence(F) == MatTuple(C.ctx, C.a, B.sig, n=C.n)


def _check_inputs(B: MatTuple, C: MatTuple):
    if B.n != C.n or B.m != C.m:
        raise ShapeMismatch("tuples must have the same n and m")
    if B.sig is None or C.sig is None or tuple(B.sig) != tuple(C.sig):
        raise ShapeMismatch("both tuples need the same signature vector")
    if not B.is_eps_symmetric() or not C.is_eps_symmetric():
        raise ShapeMismatch("tuples are not slotwise eps-symmetric for their signature")


def isometry_run(B: MatTuple, C: MatTuple) -> Tuple[Optional[IsometryWitness], List[dict]]:
    """The full pipeline; returns (witness or None, stage trace)."""
    _check_inputs(B, C)
    ctx, n = B.ctx, B.n
    trace: List[dict] = []
    Bc, SB, dB = extract_nondegenerate(B)
    Cc, SC, dC = extract_nondegenerate(C)
    trace.append({"stage": "kernel", "dim_B": dB, "dim_C": dC})
    if dB != dC:
        trace.append({"stage": "refuted", "by": "kernel-dim"})
        return None, trace
    r = n - dB
    parts = None
    if r == 0:
        Fc = Mat.identity(ctx, 0)
    else:
        eq = equivalence(Bc, Cc)
        if eq is None:
            trace.append({"stage": "refuted", "by": "twisted-equivalence"})
            return None, trace
        A0, D = eq
        A = A0.T  # A^t B = C D
        trace.append({"stage": "twisted-equivalence"})
        adj = adjoint(Cc)
        E = A.inv() @ D.inv()
        if not adj.alg.contains(E):
            raise InternalError("E = A^-1 D^-1 is not in the adjoint algebra")
        res = decompose(adj, E)
        trace.append({"stage": "decompose", "adj_dim": adj.dim, "rad_dim": adj.structure.radical.dim,
                      "summands": [list(s) for s in res.signature], "star": res.star_types,
                      "rounds": res.rounds})
        if res.X is None:
            trace.append({"stage": "refuted", "by": "summand-form", "summand": res.refuted})
            return None, trace
        Fc = D.inv() @ res.X.inv()
        parts = {"adj": adj, "E": E, "X": res.X, "rounds": res.rounds, "n": r}
    F = SB @ block_diag(ctx, Fc, Mat.identity(ctx, dB)) @ SC.inv()
    if not verify_isometry(B, C, F):
        raise InternalError("pipeline produced an invalid isometry")
    trace.append({"stage": "verified"})
    return IsometryWitness(F, trace, parts), trace


def isometry_test(B: MatTuple, C: MatTuple) -> Optional[IsometryWitness]:
    """F with F^t B_i F = C_i for all i, or None."""
    return isometry_run(B, C)[0]


def split_general(B: MatTuple) -> MatTuple:
    """(sym parts..., skew parts...) with signature (+1,...,-1,...)."""
    ctx = B.ctx
    half = ctx.inv(ctx.const(2))
    Bt = transpose(B.a)
    sym = ctx.mul(ctx.add(B.a, Bt), half)
    skw = ctx.mul(ctx.sub(B.a, Bt), half)
    return MatTuple(ctx, np.concatenate([sym, skw]), [1] * B.m + [-1] * B.m, n=B.n)


def isometry_general(B: MatTuple, C: MatTuple) -> Optional[IsometryWitness]:
    """Isometry of arbitrary square tuples via their symmetric and skew parts."""
    if B.n != C.n or B.m != C.m:
        raise ShapeMismatch("tuples must have the same n and m")
    w = isometry_test(split_general(B), split_general(C))
    if w is None:
        return None
    if B.congruence(w.F).a.tolist() != C.a.tolist():
        raise InternalError("general isometry does not transport the original tuple")
    return w
