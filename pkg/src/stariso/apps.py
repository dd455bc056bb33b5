"""Applications: quadratic forms with one secret, pseudo-isometry and p-groups."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceeded, InternalError, NotClassTwo, NotExponentP, NotPGroup, ParseError, ShapeMismatch
from .exactla import Mat, MatTuple, Subspace, combine, fmt_el, parse_el
from .ffield import FieldCtx, is_prime
from .isometry import isometry_test

# ---------------------------------------------------------------------------
# quadratic forms

_TERM = re.compile(r"^(?:(?P<c>[0-9,]+)\*)?x(?P<i>\d+)(?:\^2|\*x(?P<j>\d+))$")


class QuadraticForm:
    """Homogeneous quadratic polynomial sum_{i<=j} c_ij x_i x_j (variables 1-based in text)."""

    def __init__(self, ctx: FieldCtx, n: int, terms: Dict[Tuple[int, int], np.ndarray]):
        self.ctx = ctx
        self.n = n
        self.terms = {k: v % ctx.p for k, v in terms.items() if np.any(v % ctx.p)}

    @classmethod
    def parse(cls, text: str, ctx: FieldCtx, n: Optional[int] = None) -> "QuadraticForm":
        s = re.sub(r"\s+", "", text)
        if not s:
            raise ParseError("empty polynomial")
        if s == "0":
            return cls(ctx, n or 0, {})
        s = s.replace("-", "+-")
        terms: Dict[Tuple[int, int], np.ndarray] = {}
        top = 0
        for tok in s.split("+"):
            if not tok:
                continue
            neg = tok.startswith("-")
            tok = tok.lstrip("-")
            m = _TERM.match(tok)
            if m is None:
                raise ParseError(f"cannot parse term {tok!r}")
            c = parse_el(ctx, m.group("c")) if m.group("c") else ctx.ones()
            if neg:
                c = ctx.neg(c)
            i = int(m.group("i"))
            j = int(m.group("j")) if m.group("j") else i
            if i < 1 or j < 1:
                raise ParseError("variables are numbered from 1")
            key = (min(i, j) - 1, max(i, j) - 1)
            terms[key] = ctx.add(terms.get(key, ctx.zeros()), c)
            top = max(top, i, j)
        if n is not None and top > n:
            raise ParseError(f"variable x{top} exceeds n={n}")
        return cls(ctx, n if n is not None else top, terms)

    @classmethod
    def from_gram(cls, G: Mat) -> "QuadraticForm":
        ctx, n = G.ctx, G.rows
        terms = {}
        for i in range(n):
            terms[(i, i)] = G.a[i, i]
            for j in range(i + 1, n):
                terms[(i, j)] = ctx.add(G.a[i, j], G.a[j, i])
        return cls(ctx, n, terms)

    @property
    def gram(self) -> Mat:
        ctx = self.ctx
        half = ctx.inv(ctx.const(2))
        G = ctx.zeros((self.n, self.n))
        for (i, j), c in self.terms.items():
            if i == j:
                G[i, i] = c
            else:
                G[i, j] = G[j, i] = ctx.mul(c, half)
        return Mat(ctx, G)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        acc = ctx.zeros()
        for (i, j), c in self.terms.items():
            acc = ctx.add(acc, ctx.mul(c, ctx.mul(x[i], x[j])))
        return acc

    def format(self) -> str:
        parts = []
        for (i, j) in sorted(self.terms):
            c = fmt_el(self.ctx, self.terms[(i, j)])
            var = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
            parts.append(var if c == "1" else f"{c}*{var}")
        return " + ".join(parts) if parts else "0"

    def __eq__(self, o):
        return (isinstance(o, QuadraticForm) and self.n == o.n and self.terms.keys() == o.terms.keys()
                and all(np.array_equal(self.terms[k], o.terms[k]) for k in self.terms))


def forms_to_tuple(fs: Sequence[QuadraticForm], n: Optional[int] = None) -> MatTuple:
    ctx = fs[0].ctx
    n = n if n is not None else max(f.n for f in fs)
    grams = []
    for f in fs:
        g = QuadraticForm(ctx, n, f.terms).gram
        grams.append(g)
    return MatTuple(ctx, grams, [1] * len(grams), n=n)


def iqf1s(f: Sequence[QuadraticForm], g: Sequence[QuadraticForm]) -> Optional[Mat]:
    """A with f_k(A x) = g_k(x) for all k (Gram form: A^t G_f A = G_g), or None."""
    if len(f) != len(g) or not f:
        raise ShapeMismatch("need the same nonzero number of forms on both sides")
    n = max(max(h.n for h in f), max(h.n for h in g))
    w = isometry_test(forms_to_tuple(f, n), forms_to_tuple(g, n))
    return None if w is None else w.F


def substitute_check(f: Sequence[QuadraticForm], g: Sequence[QuadraticForm], A: Mat, points: int = 20) -> bool:
    """f_k(A x) == g_k(x) at random points."""
    ctx = A.ctx
    for _ in range(points):
        x = ctx.random((A.cols,))
        Ax = np.zeros((A.rows, ctx.k), dtype=np.int64)
        for j in range(A.cols):
            Ax = ctx.add(Ax, ctx.mul(A.a[:, j], x[j]))
        for fk, gk in zip(f, g):
            if not np.array_equal(fk.evaluate(Ax), gk.evaluate(x)):
                return False
    return True


# ---------------------------------------------------------------------------
# pseudo-isometry


def _gl_enumerate(ctx: FieldCtx, m: int):
    """GL(m, q) in row-major lexicographic order of element codes."""
    if m == 0:
        yield ctx.zeros((0, 0))
        return
    for codes in itertools.product(range(ctx.q), repeat=m * m):
        T = ctx.decode(np.array(codes, dtype=np.int64)).reshape(m, m, ctx.k)
        if Mat(ctx, T).is_invertible():
            yield T


PSEUDO_BUDGET = 5 ** 4  # all of M(2, 5)


def pseudo_isometry(B: MatTuple, C: MatTuple, budget: int = PSEUDO_BUDGET) -> Optional[Tuple[Mat, Mat]]:
    """(X, T) with X^t B_i X = sum_j T_ij C_j, or None."""
    if B.n != C.n or B.m != C.m:
        raise ShapeMismatch("tuples must have the same n and m")
    ctx, m = B.ctx, B.m
    if ctx.q ** (m * m) > budget:
        raise BudgetExceeded(f"enumerating GL({m}, {ctx.q}) exceeds the budget {budget}")
    sig = B.sig
    for T in _gl_enumerate(ctx, m):
        # C'_i = sum_j T_ij C_j
        Cp = combine(ctx, T, C.a.reshape(m, -1, ctx.k)).reshape(C.a.shape) if m else C.a
        w = isometry_test(B, MatTuple(ctx, Cp, sig, n=C.n))
        if w is not None:
            if not span_equal(B.congruence(w.F), C):
                raise InternalError("pseudo-isometry does not match the spans")
            return w.F, Mat(ctx, T)
    return None


def span_equal(B: MatTuple, C: MatTuple) -> bool:
    ctx = B.ctx
    SB = Subspace(ctx, B.a, (B.n, B.n))
    SC = Subspace(ctx, C.a, (C.n, C.n))
    return SB == SC


# ---------------------------------------------------------------------------
# groups


class CayleyTable:
    def __init__(self, table: np.ndarray, identity: int = 0, strict: bool = False, seed: int = 0):
        table = np.asarray(table, dtype=np.int64)
        N = table.shape[0]
        if table.shape != (N, N):
            raise ParseError("Cayley table must be square")
        if table.min() < 0 or table.max() >= N:
            raise ParseError("table entries out of range")
        self.N, self.table, self.identity = N, table, identity
        rng = np.arange(N)
        if not (np.sort(table, axis=1) == rng).all() or not (np.sort(table, axis=0) == rng[:, None]).all():
            raise ParseError("every row and column must be a permutation")
        if not (table[identity] == rng).all() or not (table[:, identity] == rng).all():
            raise ParseError("identity index does not act as the identity")
        if strict:
            left = table[table[:, :, None], rng[None, None, :]]
            right = table[rng[:, None, None], table[None, :, :]]
            ok = bool((left == right).all())
        else:
            r = np.random.default_rng(seed)
            x, y, z = r.integers(0, N, (3, 200))
            ok = bool((table[table[x, y], z] == table[x, table[y, z]]).all())
        if not ok:
            raise ParseError("table is not associative")
        self.inverse = np.argmax(table == identity, axis=1)

    @classmethod
    def parse(cls, text: str, strict: bool = False, seed: int = 0) -> "CayleyTable":
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or len(lines[0]) != 2:
            raise ParseError("first line must be 'N identity'")
        N, e = int(lines[0][0]), int(lines[0][1])
        rows = lines[1:]
        if len(rows) != N or any(len(r) != N for r in rows):
            raise ParseError(f"expected {N} rows of {N} indices")
        return cls(np.array(rows, dtype=np.int64), e, strict, seed)

    def format(self) -> str:
        return "\n".join([f"{self.N} {self.identity}"] + [" ".join(map(str, r)) for r in self.table]) + "\n"

    def mul(self, x, y):
        return self.table[x, y]

    def power(self, x, e: int):
        r = np.full_like(np.asarray(x), self.identity)
        for _ in range(e):
            r = self.table[r, x]
        return r

    def comm(self, x, y):
        inv = self.inverse
        return self.table[self.table[inv[x], inv[y]], self.table[x, y]]

    def relabel(self, perm: np.ndarray) -> "CayleyTable":
        perm = np.asarray(perm)
        new = np.empty_like(self.table)
        new[perm[:, None], perm[None, :]] = perm[self.table]
        return CayleyTable(new, int(perm[self.identity]))


@dataclass
class PGroupPresentation:
    p: int
    n: int
    m: int
    b: MatTuple


def _closure(G: CayleyTable, gens: Sequence[int]) -> np.ndarray:
    mask = np.zeros(G.N, dtype=bool)
    mask[G.identity] = True
    frontier = [G.identity]
    gens = list(dict.fromkeys(int(g) for g in gens))
    while frontier:
        prods = G.table[np.array(frontier)][:, gens].ravel() if gens else np.array([], dtype=np.int64)
        new = np.unique(prods[~mask[prods]])
        mask[new] = True
        frontier = list(new)
    return mask


def _log_p(N: int, p: int) -> Optional[int]:
    l = 0
    while N % p == 0:
        N //= p
        l += 1
    return l if N == 1 else None


def baer_reduce(G: CayleyTable, p: int) -> PGroupPresentation:
    if not is_prime(p) or p == 2:
        raise NotPGroup("p must be an odd prime")
    ell = _log_p(G.N, p)
    if ell is None:
        raise NotPGroup(f"|G| = {G.N} is not a power of {p}")
    xs = np.arange(G.N)
    C = G.comm(xs[:, None], xs[None, :])
    comm_els = np.unique(C)
    # commutators must be central
    bad = [int(z) for z in comm_els if not (G.table[z] == G.table[:, z]).all()]
    if bad:
        raise NotClassTwo(f"commutator element {bad[0]} is not central")
    powp = G.power(xs, p)
    badp = np.flatnonzero(powp != G.identity)
    if badp.size:
        raise NotExponentP(f"element {int(badp[0])} has order greater than {p}")
    # basis of [G, G]
    zs: List[int] = []
    H = _closure(G, [])
    for z in comm_els:
        if not H[z]:
            zs.append(int(z))
            H = _closure(G, zs)
    m = len(zs)
    # basis of G / [G, G]
    xsb: List[int] = []
    K = H.copy()
    for g in range(G.N):
        if not K[g]:
            xsb.append(g)
            K = _closure(G, zs + xsb)
    n = len(xsb)
    # coordinates of [G, G]
    zcoord = {}
    for a in itertools.product(range(p), repeat=m):
        el = G.identity
        for zi, ai in zip(zs, a):
            for _ in range(ai):
                el = G.table[el, zi]
        zcoord[int(el)] = a
    ctx = FieldCtx(p)
    b = ctx.zeros((m, n, n))
    for i in range(n):
        for j in range(n):
            c = zcoord[int(G.comm(xsb[i], xsb[j]))]
            b[:, i, j, 0] = c
    return PGroupPresentation(p, n, m, MatTuple(ctx, b, [-1] * m, n=n))


def pgroup_iso(G: CayleyTable, H: CayleyTable, p: int, budget: int = PSEUDO_BUDGET) -> bool:
    if G.N != H.N:
        return False
    PG, PH = baer_reduce(G, p), baer_reduce(H, p)
    if (PG.n, PG.m) != (PH.n, PH.m):
        return False
    return pseudo_isometry(PG.b, PH.b, budget) is not None


def heisenberg(p: int) -> CayleyTable:
    """Upper unitriangular 3 x 3 matrices over F_p; (a, b, c) has index a p^2 + b p + c."""
    idx = np.arange(p ** 3)
    a, b, c = idx // (p * p), (idx // p) % p, idx % p
    A = (a[:, None] + a[None, :]) % p
    Bv = (b[:, None] + b[None, :]) % p
    Cv = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    return CayleyTable(A * p * p + Bv * p + Cv, 0, strict=True)


def elementary_abelian(p: int, r: int) -> CayleyTable:
    idx = np.arange(p ** r)
    digits = np.stack([(idx // p ** i) % p for i in range(r)], axis=1)
    s = (digits[:, None, :] + digits[None, :, :]) % p
    return CayleyTable((s * (p ** np.arange(r))).sum(axis=-1), 0, strict=True)


def wreath_cyclic(p: int) -> CayleyTable:
    """Z_p wr Z_p: order p^(p+1), nilpotency class p (so class 3 for p = 3)."""
    N = p ** (p + 1)
    idx = np.arange(N)
    v = np.stack([(idx // p ** i) % p for i in range(p)], axis=1)
    s = (idx // p ** p) % p
    # (v, s)(w, t) = (v + shift^s w, s + t)
    rolled = np.stack([np.roll(v, k, axis=1) for k in range(p)])  # rolled[k] = shift^k
    w_shift = rolled[s[:, None], idx[None, :]]  # (N, N, p)
    nv = (v[:, None, :] + w_shift) % p
    ns = (s[:, None] + s[None, :]) % p
    table = (nv * (p ** np.arange(p))).sum(axis=-1) + ns * p ** p
    return CayleyTable(table, 0, strict=True)
