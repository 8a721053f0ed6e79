"""Command-line front end: ``onepoint <subcommand> ...``.

Exit status 0 on success, 1 on a computation or validation error, 2 when a
verification or modularity check fails.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from math import lcm

from .closedform import closed_form_trace, g_series, zhu_recurse_twisted, zhu_recurse_untwisted
from .elliptic import p1_series, q1_series
from .fockoracle import literal_trace, oracle_trace
from .lattice import EvenLattice, lattice_level, load_gram, theta, theta_vm
from .modforms import character, eisenstein_E, eisenstein_F, eisenstein_hat
from .qseries import FracQSeries, format_series, qs_from_json, qs_to_json
from .verify import (
    VerificationReport,
    elliptic_suite,
    enumerate_words,
    g_series_reorganization,
    jacobi_like_coefficient_identity,
    numeric_modularity_check,
    run_equivalence_suite,
)
from .words import BracketWord, HeisenbergContext, Tail

__all__ = ["StateSyntaxError", "parse_state", "build_parser", "main"]

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2
ALGEBRAS = {"M": "M", "M+": "Mplus", "M-": "Mminus", "VL": "VL", "VL+": "VLplus"}


class StateSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<color>h(?P<ci>\d+)\[(?P<cn>[-+]?\d+)\])
      | (?P<vec>h\((?P<vc>[^)]*)\)\[(?P<vn>[-+]?\d+)\])
      | (?P<tail>\|\s*(?P<kind>[fge])\s*\((?P<tc>[^)]*)\))
    )""",
    re.VERBOSE,
)


def _bracket_index(inner: str, pos: int) -> int:
    n = -int(inner)
    if n < 1:
        raise StateSyntaxError(f"square-bracket index must be negative; got [{inner}]", pos)
    return n


def _numbers(text: str, pos: int, kind=Fraction) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    try:
        return tuple(kind(p) for p in parts if p)
    except ValueError:
        raise StateSyntaxError(f"bad coordinate list {text!r}", pos) from None


def parse_state(expr: str, rank: int) -> BracketWord:
    """Parse ``h1[-2] h(1/2,1)[-1] | f(2,0)`` into a BracketWord over ``rank``."""
    factors = []
    tail = Tail()
    pos = 0
    expr = expr.rstrip()
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m or m.end() == pos:
            at = pos + (len(expr[pos:]) - len(expr[pos:].lstrip()))
            raise StateSyntaxError(f"unexpected input {expr[at:at + 8]!r}", at)
        start = m.start(m.lastgroup)
        if tail.kind != "vacuum":
            raise StateSyntaxError("nothing may follow the tail", start)
        if m.group("color"):
            color = int(m.group("ci"))
            if not 1 <= color <= rank:
                raise StateSyntaxError(f"color {color} out of range 1..{rank}", start)
            n = _bracket_index(m.group("cn"), start)
            factors.append((tuple(int(i == color - 1) for i in range(rank)), n))
        elif m.group("vec"):
            v = _numbers(m.group("vc"), start)
            if len(v) != rank:
                raise StateSyntaxError(f"vector has {len(v)} coordinates, expected {rank}", start)
            factors.append((v, _bracket_index(m.group("vn"), start)))
        else:
            alpha = _numbers(m.group("tc"), start, int)
            if len(alpha) != rank:
                raise StateSyntaxError(f"tail has {len(alpha)} coordinates, expected {rank}", start)
            kind = m.group("kind")
            if kind in "fg" and not any(alpha):
                raise StateSyntaxError(f"{kind} tail needs a nonzero lattice vector", start)
            tail = Tail(kind, alpha)
        pos = m.end()
    return BracketWord(tuple(factors), tail)


# ------------------------------------------------------------------ output

def _emit_series(args, series: FracQSeries, **meta) -> int:
    if args.json:
        print(json.dumps({**meta, "series": qs_to_json(series)}))
    else:
        print(format_series(series))
    return EXIT_OK


def _emit_report(args, report: VerificationReport) -> int:
    if args.json:
        print(json.dumps(report.to_json()))
    else:
        for case in report.cases:
            mark = "ok  " if case.passed else "FAIL"
            print(f"{mark} {case.description}" + (f"  [{case.detail}]" if case.detail else ""))
        print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILED


# ------------------------------------------------------------- subcommands

def _lattice(args) -> EvenLattice | None:
    return load_gram(args.gram) if getattr(args, "gram", None) else None


def _context(args, need_lattice: bool) -> HeisenbergContext:
    L = _lattice(args)
    if L is not None:
        return HeisenbergContext.for_lattice(L)
    if need_lattice:
        raise ValueError("this algebra needs --gram")
    if args.rank is None:
        raise ValueError("give --rank or --gram")
    return HeisenbergContext.heisenberg(args.rank)


def cmd_char(args) -> int:
    which = ALGEBRAS[args.algebra]
    if which in ("VL", "VLplus"):
        L = _lattice(args)
        if L is None:
            raise ValueError("this algebra needs --gram")
        return _emit_series(args, character(which, L, args.order), algebra=args.algebra)
    rank = args.rank if args.rank is not None else (_lattice(args).rank if args.gram else None)
    if rank is None:
        raise ValueError("give --rank or --gram")
    return _emit_series(args, character(which, rank, args.order), algebra=args.algebra)


def cmd_trace(args) -> int:
    algebra = ALGEBRAS[args.algebra]
    ctx = _context(args, algebra in ("VL", "VLplus"))
    word = parse_state(args.state, ctx.rank)
    if args.method == "closed":
        series = closed_form_trace(word, algebra, ctx, args.order)
    elif algebra in ("Mplus", "VLplus"):
        series = zhu_recurse_twisted(word, algebra, ctx, args.order)
    else:
        series = zhu_recurse_untwisted(word, algebra, ctx, args.order)
    return _emit_series(args, series, algebra=args.algebra, state=str(word), method=args.method)


def cmd_oracle(args) -> int:
    algebra = ALGEBRAS[args.algebra]
    ctx = _context(args, algebra in ("VL", "VLplus"))
    word = parse_state(args.state, ctx.rank)
    if args.literal:
        series = literal_trace(word, algebra, ctx, args.max_weight)
    else:
        series = oracle_trace(word, algebra, ctx, args.max_weight + 1)
    return _emit_series(args, series, algebra=args.algebra, state=str(word), max_weight=args.max_weight)


def cmd_verify(args) -> int:
    L = _lattice(args)
    suite = args.suite
    if suite == "elliptic":
        report = elliptic_suite(q_order=args.order, tol=args.tol)
    elif suite == "jacobi":
        L = L or EvenLattice(((2,),))
        report = _jacobi_suite(L, args.order)
    elif suite in ("heisenberg", "heisenberg-plus"):
        rank = args.rank if args.rank is not None else (L.rank if L else 1)
        report = run_equivalence_suite(suite, rank=rank, max_weight=args.max_weight, order=args.order)
    else:
        if L is None:
            raise ValueError(f"suite {suite} needs --gram")
        alpha = tuple(int(x) for x in args.alpha.split(",")) if args.alpha else None
        report = run_equivalence_suite(suite, lattice=L, max_weight=args.max_weight, order=args.order, alpha=alpha)
    return _emit_report(args, report)


def _jacobi_suite(L: EvenLattice, order: int) -> VerificationReport:
    v = tuple(int(i == 0) for i in range(L.rank))
    fs = [eisenstein_E(4, order), eisenstein_E(6, order), eisenstein_E(4, order) ** 2,
          eisenstein_E(4, order) * eisenstein_E(6, order), eisenstein_E(4, order) ** 3]
    report = jacobi_like_coefficient_identity(L, v, 4, fs, order)
    report.suite = "jacobi"
    if L.rank == 1:
        for w in enumerate_words(1, 6):
            lhs, rhs = g_series_reorganization(w, L, order)
            same = lhs == rhs or (lhs.is_zero and rhs.is_zero)
            report.add(f"eta G({w}) reorganized", same)
    return report


def cmd_modcheck(args) -> int:
    order = args.order
    correction = None
    if args.series:
        with (sys.stdin if args.series == "-" else open(args.series)) as fh:
            obj = json.load(fh)
        series = qs_from_json(obj["series"] if "series" in obj else obj)
        weight, level = args.weight, args.level
    elif args.kind:
        series = (eisenstein_E if args.kind == "E" else eisenstein_F)(args.k, order)
        weight = args.weight if args.weight is not None else args.k
        level = args.level or (1 if args.kind == "E" else 2)
        if args.kind == "E" and args.k == 2 and args.e2_correction:
            correction = FracQSeries.constant(1, order)
    else:
        L = _lattice(args)
        if L is None or not args.state:
            raise ValueError("give --series, --kind/--k or --state with --gram")
        word = parse_state(args.state, L.rank)
        series = g_series(word, L, order)
        weight = args.weight if args.weight is not None else word.weight
        level = args.level or lcm(2, lattice_level(L))
    if weight is None or level is None:
        raise ValueError("--weight and --level are required for a raw series")
    report = numeric_modularity_check(series, Fraction(weight), level, args.samples, args.tol, correction)
    return _emit_report(args, report)


def cmd_eisenstein(args) -> int:
    if args.kind in ("E", "F"):
        if args.k is None:
            raise ValueError(f"--kind {args.kind} needs --k")
        series = (eisenstein_E if args.kind == "E" else eisenstein_F)(args.k, args.order)
    else:
        if args.m is None or args.n is None:
            raise ValueError(f"--kind {args.kind} needs --m and --n")
        series = eisenstein_hat(args.kind, args.m, args.n, args.order)
    return _emit_series(args, series, kind=args.kind)


def cmd_theta(args) -> int:
    L = load_gram(args.gram)
    if args.vector:
        v = tuple(Fraction(x) for x in args.vector.split(","))
        if len(v) != L.rank:
            raise ValueError(f"vector has {len(v)} coordinates, expected {L.rank}")
        series = theta_vm(L, v, args.power, args.order)
    else:
        series = theta(L, args.order)
    return _emit_series(args, series)


def cmd_elliptic(args) -> int:
    fn = p1_series if args.which == "P1" else q1_series
    s = fn(args.m, args.z_order, args.q_order)
    if args.json:
        print(json.dumps({"which": args.which, "m": args.m, "z_order": args.z_order,
                          "terms": {str(d): qs_to_json(s.coeff(d)) for d in s.exponents()}}))
    else:
        for d in s.exponents():
            print(f"z^{d}: {format_series(s.coeff(d))}")
    return EXIT_OK


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="onepoint", description="Exact 1-point trace functions and their cross-checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    def space(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--rank", type=int)
        g.add_argument("--gram", help="JSON file {\"rank\": k, \"gram\": [[...]]}")

    sp = add("char", cmd_char, "graded character")
    sp.add_argument("--algebra", choices=list(ALGEBRAS), required=True)
    space(sp)
    sp.add_argument("--order", type=int, default=20)

    sp = add("trace", cmd_trace, "1-point function from the closed form or the recursion")
    sp.add_argument("--algebra", choices=["M", "M+", "VL", "VL+"], required=True)
    sp.add_argument("--state", required=True)
    space(sp)
    sp.add_argument("--order", type=int, default=20)
    sp.add_argument("--method", choices=["closed", "recursion"], default="closed")

    sp = add("oracle-trace", cmd_oracle, "1-point function by tracing zero modes on Fock space")
    sp.add_argument("--algebra", choices=list(ALGEBRAS), required=True)
    sp.add_argument("--state", required=True)
    space(sp)
    sp.add_argument("--max-weight", type=int, default=6)
    sp.add_argument("--literal", action="store_true", help="build explicit zero-mode matrices")

    sp = add("verify", cmd_verify, "run a verification suite")
    sp.add_argument("--suite", required=True, choices=["heisenberg", "heisenberg-plus", "lattice-full",
                                                       "lattice-plus-M", "lattice-plus-tail", "elliptic", "jacobi"])
    space(sp)
    sp.add_argument("--max-weight", type=int, default=6)
    sp.add_argument("--order", type=int, default=20)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--alpha", help="tail vector for lattice-plus-tail, e.g. 2")

    sp = add("modcheck", cmd_modcheck, "numeric modular transformation check")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--series", help="JSON series file ('-' for stdin)")
    src.add_argument("--kind", choices=["E", "F"])
    src.add_argument("--state", help="state whose G-series is checked (needs --gram)")
    sp.add_argument("--k", type=int)
    sp.add_argument("--gram")
    sp.add_argument("--weight", type=Fraction)
    sp.add_argument("--level", type=int)
    sp.add_argument("--samples", type=int, default=9)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--order", type=int, default=40)
    sp.add_argument("--e2-correction", action="store_true", help="add 1/(4 pi Im tau) to E_2")

    sp = add("eisenstein", cmd_eisenstein, "Eisenstein series E_k, F_k and their hatted multiples")
    sp.add_argument("--kind", choices=["E", "F", "Ehat", "Fhat"], required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--order", type=int, default=20)

    sp = add("theta", cmd_theta, "lattice theta series, optionally weighted by (v, alpha)^m")
    sp.add_argument("--gram", required=True)
    sp.add_argument("--vector")
    sp.add_argument("--power", type=int, default=0)
    sp.add_argument("--order", type=int, default=20)

    sp = add("elliptic", cmd_elliptic, "Laurent coefficients of P1^(m) or Q1^(m)")
    sp.add_argument("--which", choices=["P1", "Q1"], required=True)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--z-order", type=int, default=10)
    sp.add_argument("--q-order", type=int, default=20)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
