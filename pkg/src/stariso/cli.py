"""Command line interface: `stariso <command> ...`.

Exit codes: 0 positive answer or witness, 1 negative answer, 2 error.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import apps
from .algstruct import close_algebra, wedderburn
from .errors import StarIsoError
from .exactla import Mat, MatTuple, format_mat, parse_tuple
from .ffield import FieldCtx, Subfield, parse_field
from .forms import TYPES, FormInstance, canonicalize
from .isometry import extract_nondegenerate, isometry_general, isometry_run
from .staralg import adjoint, induced_star_structure
from .symmetrize import pit_witness, symmetrize, verify_symmetrizer

POSITIVE, NEGATIVE, ERROR = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _ctx(args) -> Optional[FieldCtx]:
    return parse_field(args.field, seed=args.seed) if args.field else None


def _tuple(args, path: str, ctx: Optional[FieldCtx] = None) -> MatTuple:
    return parse_tuple(_read(path), ctx if ctx is not None else _ctx(args), seed=args.seed)


def _pair(args):
    B = _tuple(args, args.B)
    C = _tuple(args, args.C, B.ctx)
    return B, C


def _emit_mat(out: List[str], title: str, M: Mat):
    out.append(f"{title}:")
    out.append(format_mat(M))


def _write_witness(args, M: Mat):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(format_mat(M) + "\n")


# ---------------------------------------------------------------------------


def cmd_isometry(args, out):
    B, C = _pair(args)
    w, trace = isometry_run(B, C)
    if w is None:
        out.append(f"not isometric (refuted by {trace[-1]['by']})")
        return NEGATIVE
    out.append("isometric")
    _emit_mat(out, "F", w.F)
    _write_witness(args, w.F)
    return POSITIVE


def cmd_isometry_general(args, out):
    B, C = _pair(args)
    w = isometry_general(B, C)
    if w is None:
        out.append("not isometric")
        return NEGATIVE
    out.append("isometric")
    _emit_mat(out, "F", w.F)
    _write_witness(args, w.F)
    return POSITIVE


def _eps(text: Optional[str], m: int, default):
    if text is None:
        return list(default) if default is not None else [1] * m
    vals = [int(t) for t in text.split(",")]
    if len(vals) == 1:
        vals = vals * m
    return vals


def cmd_symmetrize(args, out):
    B = _tuple(args, args.B)
    sig = _eps(args.eps, B.m, B.sig)
    w = symmetrize(B, sig, budget=args.budget or 200_000)
    if w is None:
        out.append("not symmetrizable")
        return NEGATIVE
    if not verify_symmetrizer(B, sig, w):
        raise StarIsoError("symmetrizer failed verification")
    out.append(f"symmetrizable eps={','.join(map(str, sig))}")
    _emit_mat(out, "E", w.E)
    _emit_mat(out, "A", w.A)
    _emit_mat(out, "D", w.D)
    _write_witness(args, w.E)
    return POSITIVE


def cmd_pit(args, out):
    B = _tuple(args, args.B)
    rep = pit_witness(list(B), budget=args.budget or 200_000)
    found = False
    for name, w in (("skew-subspace", rep.skew_subspace), ("skew-induced", rep.skew_induced)):
        if w is None:
            out.append(f"{name}: no")
            continue
        found = True
        out.append(f"{name}: yes")
        _emit_mat(out, "A", w.A)
        _emit_mat(out, "D", w.D)
    return POSITIVE if found else NEGATIVE


def _forms(args, path: str, ctx: FieldCtx):
    lines = [ln.split("#", 1)[0].strip() for ln in _read(path).splitlines()]
    return [apps.QuadraticForm.parse(ln, ctx, args.n) for ln in lines if ln]


def cmd_iqf1s(args, out):
    ctx = _ctx(args)
    if ctx is None:
        raise StarIsoError("iqf1s needs --field")
    f, g = _forms(args, args.F, ctx), _forms(args, args.G, ctx)
    A = apps.iqf1s(f, g)
    if A is None:
        out.append("no solution")
        return NEGATIVE
    out.append("solution")
    _emit_mat(out, "A", A)
    _write_witness(args, A)
    return POSITIVE


def cmd_pseudo(args, out):
    B, C = _pair(args)
    res = apps.pseudo_isometry(B, C, budget=args.budget or apps.PSEUDO_BUDGET)
    if res is None:
        out.append("not pseudo-isometric")
        return NEGATIVE
    X, T = res
    out.append("pseudo-isometric")
    _emit_mat(out, "X", X)
    _emit_mat(out, "T", T)
    _write_witness(args, X)
    return POSITIVE


def _smallest_prime_factor(N: int) -> int:
    d = 2
    while d * d <= N:
        if N % d == 0:
            return d
        d += 1
    return N


def cmd_pgroup(args, out):
    G = apps.CayleyTable.parse(_read(args.G), strict=args.strict, seed=args.seed)
    H = apps.CayleyTable.parse(_read(args.H), strict=args.strict, seed=args.seed)
    p = args.p or _smallest_prime_factor(G.N)
    PG, PH = apps.baer_reduce(G, p), apps.baer_reduce(H, p)
    out.append(f"G: n={PG.n} m={PG.m}")
    out.append(f"H: n={PH.n} m={PH.m}")
    ok = apps.pgroup_iso(G, H, p, budget=args.budget or apps.PSEUDO_BUDGET)
    out.append("isomorphic" if ok else "not isomorphic")
    return POSITIVE if ok else NEGATIVE


def cmd_canon(args, out):
    B = _tuple(args, args.FILE)
    if B.m != 1:
        raise StarIsoError("canon expects a single form (m = 1)")
    conj = Subfield(B.ctx, B.ctx.k // 2) if args.type == "hermitian" else None
    c = canonicalize(FormInstance(B[0], args.type, conj))
    out.append(c.describe())
    _emit_mat(out, "canonical", c.gram)
    _emit_mat(out, "transform", c.transform)
    return POSITIVE


def cmd_algebra_info(args, out):
    B = _tuple(args, args.B)
    if B.sig is not None or args.star:
        core, _, d = extract_nondegenerate(B)
        out.append(f"adjoint algebra (common kernel dim {d})")
        adj = adjoint(core)
        alg, sd = adj.alg, adj.structure
    else:
        out.append("unital algebra generated by the tuple")
        alg = close_algebra(list(B), unital=True, ctx=B.ctx, n=B.n)
        sd = wedderburn(alg)
    out.append(f"dim {alg.dim}")
    out.append(f"dim Rad {sd.radical.dim}")
    out.append("summands " + " ".join(f"({n},{q})" for n, q in sd.signature()))
    if args.star:
        for line in induced_star_structure(adj, sd).describe():
            out.append(line)
    return POSITIVE


# ---------------------------------------------------------------------------


def _add_global(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--field", default=d(None), help="field spec p, p^k or p^k/c0,...,ck")
    p.add_argument("--seed", type=int, default=d(0), help="seed for all randomized steps")
    p.add_argument("--budget", type=int, default=d(None), help="search budget override")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stariso", description="Isometry and symmetrization of matrix tuples over finite fields.")
    _add_global(ap, False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        _add_global(p, True)
        p.set_defaults(func=fn)
        return p

    p = add("isometry", cmd_isometry, "isometry of two eps-symmetric tuples")
    p.add_argument("B"); p.add_argument("C"); p.add_argument("--out")
    p = add("isometry-general", cmd_isometry_general, "isometry of arbitrary square tuples")
    p.add_argument("B"); p.add_argument("C"); p.add_argument("--out")
    p = add("symmetrize", cmd_symmetrize, "find E with every E B_i eps_i-symmetric")
    p.add_argument("B"); p.add_argument("--eps", help="comma list of +-1 (one value applies to all)")
    p.add_argument("--out")
    p = add("pit-witness", cmd_pit, "recognize skew and skew-induced matrix spaces")
    p.add_argument("B")
    p = add("iqf1s", cmd_iqf1s, "quadratic forms with one secret (one polynomial per line)")
    p.add_argument("F"); p.add_argument("G"); p.add_argument("--n", type=int); p.add_argument("--out")
    p = add("pseudo-isometry", cmd_pseudo, "isometry up to a change of basis of the tuple span")
    p.add_argument("B"); p.add_argument("C"); p.add_argument("--out")
    p = add("pgroup-iso", cmd_pgroup, "isomorphism of p-groups of class 2 and exponent p")
    p.add_argument("G"); p.add_argument("H"); p.add_argument("--p", type=int)
    p.add_argument("--strict", action="store_true", help="full associativity check")
    p = add("canon", cmd_canon, "canonical form of a single form")
    p.add_argument("FILE"); p.add_argument("--type", choices=TYPES, default="orthogonal")
    p = add("algebra-info", cmd_algebra_info, "structure of the adjoint (or generated) algebra")
    p.add_argument("B"); p.add_argument("--star", action="store_true", help="also print the involution type")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out: List[str] = []
    try:
        code = args.func(args, out)
    except (StarIsoError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    sys.stdout.write("\n".join(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
