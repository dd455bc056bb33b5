"""Finite fields F_{p^k}, p odd, and the number theory used by the form code.

Elements are stored as length-k coefficient vectors over the power basis of a
monic irreducible modulus.  Every array op in FieldCtx works on int64 arrays
whose last axis has length k, so a matrix over F_q is an array of shape
(rows, cols, k).  Fel and Poly are thin scalar / polynomial wrappers on top.
"""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InternalError, NonDivisor


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _retry_bound(ctx: "FieldCtx") -> int:
    return 64 * max(ctx.k, 1) + 64


class FieldCtx:
    """The field F_{p^k} together with its seedable PRNG handle."""

    def __init__(self, p: int, k: int = 1, modulus: Optional[Sequence[int]] = None, seed: int = 0):
        if p == 2 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.k = k
        self.q = p ** k
        self.rng = np.random.default_rng(seed)
        if modulus is None:
            modulus = (0, 1) if k == 1 else _random_irreducible(p, k, self.rng)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        self.modulus = modulus
        if k > 1:
            base = FieldCtx(p)
            if not is_irreducible(Poly.from_ints(base, modulus)):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self._T = self._reduction_tensor()
        self._inv_table = None
        if k == 1:
            tab = np.zeros(p, dtype=np.int64)
            for a in range(1, p):
                tab[a] = pow(a, p - 2, p)
            self._inv_table = tab
        self._omega = None

    # -- construction helpers -------------------------------------------
    def _reduction_tensor(self) -> np.ndarray:
        k, p = self.k, self.p
        powers = []
        cur = np.zeros(k, dtype=np.int64)
        cur[0] = 1
        low = np.array(self.modulus[:k], dtype=np.int64)
        for _ in range(2 * k - 1):
            powers.append(cur.copy())
            # multiply by x and reduce
            top = cur[k - 1]
            cur = np.roll(cur, 1)
            cur[0] = 0
            cur = (cur - top * low) % p
        T = np.zeros((k, k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                T[i, j] = powers[i + j]
        return T

    def spec(self) -> str:
        if self.k == 1:
            return str(self.p)
        return f"{self.p}^{self.k}/" + ",".join(str(c) for c in self.modulus)

    def __repr__(self):
        return f"FieldCtx({self.spec()})"

    def same_field(self, other: "FieldCtx") -> bool:
        return self.p == other.p and self.k == other.k and self.modulus == other.modulus

    # -- array arithmetic -----------------------------------------------
    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        outer = a[..., :, None] * b[..., None, :]
        return np.tensordot(outer, self._T, axes=([-2, -1], [0, 1])) % self.p

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        res = np.zeros(a.shape, dtype=np.int64)
        res[..., 0] = 1
        base = a
        while e > 0:
            if e & 1:
                res = self.mul(res, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return res

    def inv(self, a):
        """Elementwise inverse (zero maps to zero)."""
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return self._inv_table[a[..., 0]][..., None]
        return self.power(a, self.q - 2)

    def is_zero(self, a):
        return ~np.any(a, axis=-1)

    def zeros(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.k,), dtype=np.int64)

    def ones(self, shape=()) -> np.ndarray:
        z = self.zeros(shape)
        z[..., 0] = 1
        return z

    def const(self, n) -> np.ndarray:
        """Image of integer(s) n under Z -> F_p -> F_q."""
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape + (self.k,), dtype=np.int64)
        out[..., 0] = n % self.p
        return out

    def encode(self, a) -> np.ndarray:
        """Integer code sum c_i p^i, also the fixed enumeration order."""
        w = self.p ** np.arange(self.k, dtype=np.int64)
        return np.asarray(a, dtype=np.int64) @ w

    def decode(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.zeros(codes.shape + (self.k,), dtype=np.int64)
        c = codes.copy()
        for i in range(self.k):
            out[..., i] = c % self.p
            c //= self.p
        return out

    def all_elements(self) -> np.ndarray:
        return self.decode(np.arange(self.q))

    def random(self, shape=()) -> np.ndarray:
        return self.rng.integers(0, self.p, size=tuple(shape) + (self.k,), dtype=np.int64)

    def frobenius(self, a, e: int = 1):
        return self.power(a, self.p ** e)

    # -- scalar conveniences --------------------------------------------
    def el(self, v) -> "Fel":
        if isinstance(v, Fel):
            return v
        if isinstance(v, (int, np.integer)):
            return Fel(self, self.const(int(v)))
        return Fel(self, v)

    @property
    def omega(self) -> "Fel":
        """First non-square in the fixed enumeration; stable for the life of the ctx."""
        if self._omega is None:
            e = (self.q - 1) // 2
            for code in range(1, self.q):
                a = self.decode(code)
                if not np.array_equal(self.power(a, e), self.ones()):
                    self._omega = Fel(self, a)
                    break
        return self._omega


class Fel:
    """A single element of F_q."""

    __slots__ = ("ctx", "v")

    def __init__(self, ctx: FieldCtx, v):
        self.ctx = ctx
        self.v = np.asarray(v, dtype=np.int64).reshape(ctx.k) % ctx.p

    def _coerce(self, o) -> np.ndarray:
        if isinstance(o, Fel):
            return o.v
        return self.ctx.const(int(o))

    def __add__(self, o):
        return Fel(self.ctx, self.ctx.add(self.v, self._coerce(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return Fel(self.ctx, self.ctx.sub(self.v, self._coerce(o)))

    def __rsub__(self, o):
        return Fel(self.ctx, self.ctx.sub(self._coerce(o), self.v))

    def __mul__(self, o):
        return Fel(self.ctx, self.ctx.mul(self.v, self._coerce(o)))

    __rmul__ = __mul__

    def __neg__(self):
        return Fel(self.ctx, self.ctx.neg(self.v))

    def inv(self) -> "Fel":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return Fel(self.ctx, self.ctx.inv(self.v))

    def __truediv__(self, o):
        o = o if isinstance(o, Fel) else Fel(self.ctx, self.ctx.const(int(o)))
        return self * o.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return Fel(self.ctx, self.ctx.power(self.v, e))

    def is_zero(self) -> bool:
        return not self.v.any()

    def __eq__(self, o):
        if isinstance(o, (int, np.integer)):
            o = Fel(self.ctx, self.ctx.const(int(o)))
        if not isinstance(o, Fel):
            return NotImplemented
        return bool(np.array_equal(self.v, o.v))

    def __hash__(self):
        return int(self.ctx.encode(self.v))

    def __int__(self):
        return int(self.ctx.encode(self.v))

    def __repr__(self):
        return ",".join(str(int(c)) for c in self.v)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Dense univariate polynomial over F_q; coefficient rows low to high degree."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldCtx, c):
        self.ctx = ctx
        c = np.asarray(c, dtype=np.int64).reshape(-1, ctx.k) % ctx.p
        nz = np.nonzero(c.any(axis=1))[0]
        self.c = c[: nz[-1] + 1] if len(nz) else c[:0]

    @classmethod
    def from_ints(cls, ctx: FieldCtx, coeffs: Sequence[int]) -> "Poly":
        return cls(ctx, ctx.const(np.array(coeffs, dtype=np.int64)))

    @classmethod
    def from_fels(cls, ctx: FieldCtx, coeffs: Sequence[Fel]) -> "Poly":
        if not coeffs:
            return cls(ctx, ctx.zeros((0,)))
        return cls(ctx, np.stack([ctx.el(a).v for a in coeffs]))

    @classmethod
    def x(cls, ctx: FieldCtx) -> "Poly":
        return cls.from_ints(ctx, [0, 1])

    @classmethod
    def one(cls, ctx: FieldCtx) -> "Poly":
        return cls.from_ints(ctx, [1])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return len(self.c) == 0

    def coeff(self, i: int) -> Fel:
        if i < len(self.c):
            return Fel(self.ctx, self.c[i])
        return Fel(self.ctx, self.ctx.zeros())

    def lead(self) -> Fel:
        return Fel(self.ctx, self.c[-1])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return Poly(self.ctx, self.ctx.mul(self.c, self.ctx.inv(self.c[-1])))

    def __add__(self, o: "Poly") -> "Poly":
        n = max(len(self.c), len(o.c))
        a = self.ctx.zeros((n,))
        a[: len(self.c)] += self.c
        a[: len(o.c)] += o.c
        return Poly(self.ctx, a)

    def __neg__(self) -> "Poly":
        return Poly(self.ctx, self.ctx.neg(self.c))

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def __mul__(self, o) -> "Poly":
        ctx = self.ctx
        if isinstance(o, Fel):
            return Poly(ctx, ctx.mul(self.c, o.v))
        if self.is_zero() or o.is_zero():
            return Poly(ctx, ctx.zeros((0,)))
        m, n = len(self.c), len(o.c)
        if ctx.k == 1:
            return Poly(ctx, np.convolve(self.c[:, 0], o.c[:, 0])[:, None])
        outer = ctx.mul(self.c[:, None, :], o.c[None, :, :])
        res = ctx.zeros((m + n - 1,))
        for i in range(m):
            res[i : i + n] += outer[i]
        return Poly(ctx, res)

    def __pow__(self, e: int) -> "Poly":
        res = Poly.one(self.ctx)
        for _ in range(e):
            res = res * self
        return res

    def divmod(self, o: "Poly") -> Tuple["Poly", "Poly"]:
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ctx = self.ctx
        db = o.deg
        if self.deg < db:
            return Poly(ctx, ctx.zeros((0,))), self
        r = self.c.copy()
        inv_lead = ctx.inv(o.c[-1])
        qc = ctx.zeros((self.deg - db + 1,))
        for i in range(self.deg - db, -1, -1):
            coef = ctx.mul(r[i + db], inv_lead)
            if not coef.any():
                continue
            qc[i] = coef
            r[i : i + db + 1] = ctx.sub(r[i : i + db + 1], ctx.mul(coef, o.c))
        return Poly(ctx, qc), Poly(ctx, r[:db])

    def __mod__(self, o: "Poly") -> "Poly":
        return self.divmod(o)[1]

    def __floordiv__(self, o: "Poly") -> "Poly":
        return self.divmod(o)[0]

    def deriv(self) -> "Poly":
        if self.deg < 1:
            return Poly(self.ctx, self.ctx.zeros((0,)))
        idx = np.arange(1, len(self.c), dtype=np.int64)
        return Poly(self.ctx, (self.c[1:] * idx[:, None]) % self.ctx.p)

    def __eq__(self, o):
        return isinstance(o, Poly) and self.c.shape == o.c.shape and bool(np.array_equal(self.c, o.c))

    def __hash__(self):
        return hash(self.c.tobytes())

    def eval_matrix_coeffs(self):
        return self.c

    def sort_key(self):
        return (self.deg, tuple(int(x) for x in self.ctx.encode(self.c[::-1])))

    def __repr__(self):
        terms = []
        for i, row in enumerate(self.c):
            if row.any():
                terms.append(f"({','.join(str(int(v)) for v in row)})x^{i}")
        return " + ".join(terms) if terms else "0"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_powmod(base: Poly, e: int, mod: Poly) -> Poly:
    res = Poly.one(base.ctx) % mod
    b = base % mod
    while e > 0:
        if e & 1:
            res = (res * b) % mod
        e >>= 1
        if e:
            b = (b * b) % mod
    return res


def poly_inverse_mod(a: Poly, m: Poly) -> Poly:
    """s with s*a = 1 mod m (a and m coprime)."""
    ctx = a.ctx
    r0, r1 = m, a % m
    s0, s1 = Poly(ctx, ctx.zeros((0,))), Poly.one(ctx)
    while not r1.is_zero():
        qt, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
    if r0.deg != 0:
        raise ValueError("not invertible modulo m")
    return (s0 * r0.lead().inv()) % m


def is_irreducible(f: Poly) -> bool:
    """Distinct-degree check: no factor of degree <= deg/2 and squarefree."""
    if f.deg < 1:
        return False
    f = f.monic()
    if f.deg == 1:
        return True
    if poly_gcd(f, f.deriv()).deg > 0:
        return False
    x = Poly.x(f.ctx)
    h = x % f
    for _ in range(1, f.deg // 2 + 1):
        h = poly_powmod(h, f.ctx.q, f)
        if poly_gcd(h - x, f).deg > 0:
            return False
    return True


def _random_irreducible(p: int, k: int, rng) -> Tuple[int, ...]:
    base = FieldCtx(p)
    for _ in range(64 * k + 64):
        low = [int(v) for v in rng.integers(0, p, size=k)]
        if low[0] == 0:
            continue
        coeffs = low + [1]
        if is_irreducible(Poly.from_ints(base, coeffs)):
            return tuple(coeffs)
    raise InternalError(f"no irreducible of degree {k} over F_{p} found within retry bound")


# ---------------------------------------------------------------------------
# square roots and friends


def is_square(a: Fel) -> bool:
    if a.is_zero():
        return True
    return (a ** ((a.ctx.q - 1) // 2)) == 1


def find_nonsquare(ctx: FieldCtx) -> Fel:
    """Random non-square (Euler criterion); expected two draws."""
    e = (ctx.q - 1) // 2
    for _ in range(_retry_bound(ctx)):
        a = Fel(ctx, ctx.random())
        if not a.is_zero() and (a ** e) != 1:
            return a
    raise InternalError("non-square search exceeded retry bound")


def _canonical_root(r: Fel) -> Fel:
    s = -r
    return r if int(r) <= int(s) else s


def sqrt(a: Fel, ctx: Optional[FieldCtx] = None) -> Optional[Fel]:
    """Tonelli-Shanks.  Returns the root with the smaller integer code, or None."""
    ctx = ctx or a.ctx
    a = ctx.el(a)
    if a.is_zero():
        return a
    q = ctx.q
    if (a ** ((q - 1) // 2)) != 1:
        return None
    s, t = 0, q - 1
    while t % 2 == 0:
        s += 1
        t //= 2
    if s == 1:
        return _canonical_root(a ** ((q + 1) // 4))
    z = find_nonsquare(ctx)
    m = s
    c = z ** t
    x = a ** ((t + 1) // 2)
    b = a ** t
    while b != 1:
        i, bb = 0, b
        while bb != 1:
            bb = bb * bb
            i += 1
        g = c ** (2 ** (m - i - 1))
        x = x * g
        c = g * g
        b = b * c
        m = i
    return _canonical_root(x)


def two_squares(w: Fel, ctx: Optional[FieldCtx] = None) -> Tuple[Fel, Fel]:
    """(alpha, beta) with alpha^2 + beta^2 = w, by sampling alpha."""
    ctx = ctx or w.ctx
    w = ctx.el(w)
    if w.is_zero():
        raise ValueError("w must be nonzero")
    r = sqrt(w, ctx)
    if r is not None:
        return r, Fel(ctx, ctx.zeros())
    for _ in range(_retry_bound(ctx)):
        alpha = Fel(ctx, ctx.random())
        beta = sqrt(w - alpha * alpha, ctx)
        if beta is not None:
            return alpha, beta
    raise InternalError("two_squares exceeded retry bound")


class Subfield:
    """F_{p^k'} inside F_{p^k}, with conjugation x -> x^{p^k'}."""

    def __init__(self, ctx: FieldCtx, kp: int):
        if kp < 1 or ctx.k % kp:
            raise NonDivisor(f"{kp} does not divide {ctx.k}")
        self.ctx = ctx
        self.kp = kp
        self.qp = ctx.p ** kp
        # F_p-basis of the fixed space of the conjugation
        frob = np.stack([self.conj(ctx.decode(ctx.p ** i)) for i in range(ctx.k)])
        M = (frob - np.eye(ctx.k, dtype=np.int64)) % ctx.p
        self.basis = _left_nullspace_mod(M, ctx.p)
        self.tau = None
        self.omega = None
        if ctx.k == 2 * kp:
            for _ in range(_retry_bound(ctx)):
                y = ctx.random()
                t = ctx.sub(y, self.conj(y))
                if t.any():
                    self.tau = Fel(ctx, t)
                    self.omega = self.tau * self.tau
                    break
            else:
                raise InternalError("no trace-zero element found")

    def conj(self, a):
        if isinstance(a, Fel):
            return Fel(self.ctx, self.conj(a.v))
        return self.ctx.power(a, self.qp)

    def contains(self, a: Fel) -> bool:
        return self.conj(a) == a

    def random(self) -> Fel:
        c = self.ctx.rng.integers(0, self.ctx.p, size=len(self.basis))
        return Fel(self.ctx, (c @ self.basis) % self.ctx.p)


def subfield_tower(ctx: FieldCtx, kp: int) -> Subfield:
    return Subfield(ctx, kp)


def _left_nullspace_mod(M: np.ndarray, p: int) -> np.ndarray:
    """Rows v with v @ M = 0 (mod p), as an echelon basis."""
    A = (M.T % p).copy()
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        nz = np.nonzero(A[r:, c])[0] if r < rows else []
        if len(nz) == 0:
            continue
        i = r + nz[0]
        A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        for j in range(rows):
            if j != r and A[j, c]:
                A[j] = (A[j] - A[j, c] * A[r]) % p
        piv.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-A[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(-1, cols)


def norm_eq(alpha: Fel, omega: Fel, ctx: Optional[FieldCtx] = None,
            sub: Optional[Subfield] = None) -> Tuple[Fel, Fel]:
    """(x, y) with x^2 - omega*y^2 = alpha, x and y taken from `sub` (or all of ctx)."""
    ctx = ctx or alpha.ctx
    alpha, omega = ctx.el(alpha), ctx.el(omega)
    zero = Fel(ctx, ctx.zeros())
    if alpha.is_zero():
        return zero, zero

    def sub_sqrt(a: Fel) -> Optional[Fel]:
        r = sqrt(a, ctx)
        if r is None:
            return None
        if sub is not None and not sub.contains(r):
            return None
        return r

    r = sub_sqrt(alpha)
    if r is not None:
        return r, zero
    winv = omega.inv()
    for _ in range(_retry_bound(ctx)):
        x = sub.random() if sub is not None else Fel(ctx, ctx.random())
        y = sub_sqrt((x * x - alpha) * winv)
        if y is not None:
            return x, y
    raise InternalError("norm_eq exceeded retry bound")


# ---------------------------------------------------------------------------
# factorization


def _pth_root(f: Poly) -> Poly:
    ctx = f.ctx
    c = f.c[:: ctx.p]
    return Poly(ctx, ctx.power(c, ctx.p ** (ctx.k - 1)))


def squarefree_decomposition(f: Poly) -> List[Tuple[Poly, int]]:
    f = f.monic()
    out: List[Tuple[Poly, int]] = []
    if f.deg < 1:
        return out
    d = f.deriv()
    if d.is_zero():
        return [(g, m * f.ctx.p) for g, m in squarefree_decomposition(_pth_root(f))]
    c = poly_gcd(f, d)
    w = f // c
    i = 1
    while w.deg > 0:
        y = poly_gcd(w, c)
        fac = w // y
        if fac.deg > 0:
            out.append((fac.monic(), i))
        w = y
        c = c // y
        i += 1
    if c.deg > 0:
        out += [(g, m * f.ctx.p) for g, m in squarefree_decomposition(_pth_root(c.monic()))]
    return out


def distinct_degree(f: Poly) -> List[Tuple[Poly, int]]:
    ctx = f.ctx
    x = Poly.x(ctx)
    out = []
    h = x % f
    i = 1
    while f.deg >= 2 * i:
        h = poly_powmod(h, ctx.q, f)
        g = poly_gcd(h - x, f)
        if g.deg > 0:
            out.append((g, i))
            f = f // g
            h = h % f
        i += 1
    if f.deg > 0:
        out.append((f.monic(), f.deg))
    return out


def equal_degree(f: Poly, d: int) -> List[Poly]:
    ctx = f.ctx
    if f.deg == d:
        return [f.monic()]
    e = (ctx.q ** d - 1) // 2
    one = Poly.one(ctx)
    for _ in range(_retry_bound(ctx) + 16 * f.deg):
        a = Poly(ctx, ctx.random((f.deg,)))
        if a.deg < 1:
            continue
        g = poly_gcd(a, f)
        if 0 < g.deg < f.deg:
            return equal_degree(g, d) + equal_degree(f // g, d)
        b = poly_powmod(a, e, f) - one
        g = poly_gcd(b, f)
        if 0 < g.deg < f.deg:
            return equal_degree(g, d) + equal_degree(f // g, d)
    raise InternalError("Cantor-Zassenhaus exceeded retry bound")


def factor(f: Poly, ctx: Optional[FieldCtx] = None) -> List[Tuple[Poly, int]]:
    """Monic irreducible factors with multiplicities, in a deterministic order."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    out = []
    for g, m in squarefree_decomposition(f):
        for h, d in distinct_degree(g):
            for irr in equal_degree(h, d):
                out.append((irr, m))
    out.sort(key=lambda t: (t[0].sort_key(), t[1]))
    return out


def roots(f: Poly) -> List[Fel]:
    rs = [-(g.coeff(0)) for g, _ in factor(f) if g.deg == 1]
    return sorted(set(rs), key=int)


# ---------------------------------------------------------------------------
# embeddings between fields


class Embedding:
    """F_p-linear field embedding small -> big, given by the images of x^i."""

    def __init__(self, small: FieldCtx, big: FieldCtx, gen_image: np.ndarray):
        self.small, self.big = small, big
        imgs = [big.ones()]
        for _ in range(1, small.k):
            imgs.append(big.mul(imgs[-1], gen_image))
        self.img = np.stack(imgs)  # (k_small, k_big)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "Embedding":
        e = cls.__new__(cls)
        e.small = e.big = ctx
        e.img = np.eye(ctx.k, dtype=np.int64)
        return e

    def __call__(self, a):
        if isinstance(a, Fel):
            return Fel(self.big, self(a.v))
        return (np.asarray(a, dtype=np.int64) @ self.img) % self.big.p


def embed_field(small: FieldCtx, big: FieldCtx) -> Embedding:
    if big.p != small.p or big.k % small.k:
        raise NonDivisor("no embedding between these fields")
    if small is big:
        return Embedding.identity(small)
    if small.k == 1:
        return Embedding(small, big, big.ones())
    rs = roots(Poly.from_ints(big, small.modulus))
    if not rs:
        raise InternalError("modulus has no root in the extension")
    return Embedding(small, big, rs[0].v)


def extension(ctx: FieldCtx, d: int) -> Tuple[FieldCtx, Embedding]:
    """A degree-d extension of ctx with a seeded modulus, plus the embedding."""
    seed = int(ctx.rng.integers(0, 2 ** 31))
    big = FieldCtx(ctx.p, ctx.k * d, seed=seed)
    return big, embed_field(ctx, big)


def parse_field(spec: str, seed: int = 0) -> FieldCtx:
    """'p', 'p^k' or 'p^k/c0,c1,...,ck' (modulus coefficients low to high)."""
    spec = spec.strip()
    mod = None
    if "/" in spec:
        spec, m = spec.split("/", 1)
        mod = [int(t) for t in m.split(",")]
    if "^" in spec:
        p, k = (int(t) for t in spec.split("^"))
    else:
        p, k = int(spec), 1
    return FieldCtx(p, k, modulus=mod, seed=seed)
