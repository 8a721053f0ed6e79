"""Closed-form 1-point functions and the Zhu recursion engines.

Vectors are rational coordinates in a fixed basis and all pairings go
through the context's bilinear form, so the formulas are used in their
multilinear form: a Kronecker delta between colors becomes ``(v_r, v_s)`` and
``(h, alpha)`` becomes ``v^T G alpha``.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

from .combinatorics import all_involutions, fixed_point_free_involutions, subsets
from .lattice import EvenLattice, theta, theta_weighted
from .modforms import character, eisenstein_F, eisenstein_hat, eta_quotient
from .qseries import FracQSeries, qs_add, qs_mul, qs_scale, qs_sub
from .words import BracketWord, HeisenbergContext, Tail, pairing

__all__ = [
    "TraceError",
    "trace_M",
    "trace_Mplus",
    "trace_module_N",
    "trace_VL",
    "trace_VLplus_lattice_tail",
    "trace_VLplus_M",
    "falpha_trace",
    "g_series",
    "zhu_recurse_untwisted",
    "zhu_recurse_twisted",
    "closed_form_trace",
]


class TraceError(ValueError):
    pass


def _one(order: int) -> FracQSeries:
    return FracQSeries(0, [1], order)


def _require_vacuum(word: BracketWord) -> None:
    if word.tail.kind != "vacuum":
        raise TraceError("this trace needs a vacuum tail")


def _require_even(word: BracketWord, what: str) -> None:
    if word.p % 2:
        raise TraceError(f"state not in {what}")


def _inv_eta(k: int, order: int) -> FracQSeries:
    return eta_quotient(((1, -k),), order)


def _matching_sum(factors: tuple, kind: str, gram: tuple, order: int) -> FracQSeries:
    """sum over perfect matchings of prod (v_r, v_s) * hat_{n_r + n_s}."""
    return _matching_sum_cached(tuple(sorted(factors)), kind, gram, order)


@lru_cache(maxsize=None)
def _matching_sum_cached(factors: tuple, kind: str, gram: tuple, order: int) -> FracQSeries:
    total = FracQSeries.zero()
    for sigma in fixed_point_free_involutions(range(len(factors))):
        term = _one(order)
        for r, s in sigma.pairs:
            (vr, nr), (vs, ns) = factors[r], factors[s]
            c = pairing(vr, vs, gram)
            if not c:
                term = FracQSeries.zero()
                break
            term = qs_mul(term, qs_scale(eisenstein_hat(kind, nr, ns, order), c))
            if term.is_zero:
                break
        total = qs_add(total, term)
    return total


def trace_M(word: BracketWord, ctx: HeisenbergContext, order: int) -> FracQSeries:
    _require_vacuum(word)
    s = _matching_sum(word.factors, "Ehat", ctx.gram, order)
    return qs_mul(s, character("M", ctx.rank, order))


def trace_Mplus(word: BracketWord, ctx: HeisenbergContext, order: int) -> FracQSeries:
    _require_vacuum(word)
    _require_even(word, "M+")
    se = _matching_sum(word.factors, "Ehat", ctx.gram, order)
    sf = _matching_sum(word.factors, "Fhat", ctx.gram, order)
    first = qs_mul(sf, character("Mplus", ctx.rank, order))
    second = qs_mul(qs_scale(qs_sub(se, sf), Fraction(1, 2)), character("M", ctx.rank, order))
    return qs_add(first, second)


def _lambda_split(word: BracketWord):
    """Yield (Delta, remaining factors) over subsets of the n_j = 1 positions."""
    lam = [j for j, (_, n) in enumerate(word.factors) if n == 1]
    for delta in subsets(lam):
        rest = tuple(f for j, f in enumerate(word.factors) if j not in delta)
        yield delta, rest


def trace_module_N(word: BracketWord, ctx: HeisenbergContext, alpha, order: int) -> FracQSeries:
    """Trace over the module M (x) e^alpha."""
    _require_vacuum(word)
    alpha = tuple(alpha)
    h = pairing(alpha, alpha, ctx.gram) / 2
    total = FracQSeries.zero()
    for delta, rest in _lambda_split(word):
        c = Fraction(1)
        for j in delta:
            c *= pairing(word.factors[j][0], alpha, ctx.gram)
        if not c:
            continue
        total = qs_add(total, qs_scale(_matching_sum(rest, "Ehat", ctx.gram, order), c))
    if total.is_zero:
        return total
    base = _inv_eta(ctx.rank, order)
    return qs_mul(total, FracQSeries(base.lead_exp + h, base.coeffs, base.order))


def _theta_P(L: EvenLattice, vectors: tuple, order: int) -> FracQSeries:
    if not vectors:
        return theta(L, order)
    gvs = [[sum(L.gram[i][j] * v[j] for j in range(L.rank)) for i in range(L.rank)] for v in vectors]

    def P(a):
        out = Fraction(1)
        for g in gvs:
            out *= sum(x * y for x, y in zip(g, a))
            if not out:
                break
        return out

    return theta_weighted(L, P, order)


def g_series(word: BracketWord, L: EvenLattice, order: int) -> FracQSeries:
    """sum_Delta theta_L(P_Delta)/eta^k * (matching sum of Ehat on the complement)."""
    _require_vacuum(word)
    total = FracQSeries.zero()
    for delta, rest in _lambda_split(word):
        th = _theta_P(L, tuple(word.factors[j][0] for j in delta), order)
        if th.is_zero:
            continue
        total = qs_add(total, qs_mul(th, _matching_sum(rest, "Ehat", L.gram, order)))
    return qs_mul(total, _inv_eta(L.rank, order))


def trace_VL(word: BracketWord, L: EvenLattice, order: int) -> FracQSeries:
    return g_series(word, L, order)


def trace_VLplus_M(word: BracketWord, L: EvenLattice, order: int) -> FracQSeries:
    _require_vacuum(word)
    _require_even(word, "M+")
    sf = _matching_sum(word.factors, "Fhat", L.gram, order)
    bracket = qs_sub(character("VLplus", L, order), qs_scale(character("VL", L, order), Fraction(1, 2)))
    return qs_add(qs_mul(sf, bracket), qs_scale(g_series(word, L, order), Fraction(1, 2)))


def falpha_trace(L: EvenLattice, alpha, order: int) -> FracQSeries:
    """Trace of o(e^alpha + e^-alpha) over V_L^+."""
    alpha = tuple(int(a) for a in alpha)
    if not any(alpha):
        # f_0 = 2 * vacuum
        return qs_scale(character("VLplus", L, order), 2)
    if any(a % 2 for a in alpha):
        return FracQSeries.zero()
    n = int(L.norm(alpha))
    return eta_quotient(((2, 2 * n - L.rank), (1, L.rank - n)), order)


def trace_VLplus_lattice_tail(word: BracketWord, L: EvenLattice, order: int) -> FracQSeries:
    tail = word.tail
    if tail.kind not in ("f", "g") or (tail.kind == "f") != (word.p % 2 == 0):
        raise TraceError("state not in V_L+ basis family")
    alpha = tail.alpha
    base = falpha_trace(L, alpha, order)
    if base.is_zero:
        return base
    total = FracQSeries.zero()
    for sigma in all_involutions(range(word.p)):
        term = _one(order)
        for t in sigma.fixed:
            v, n = word.factors[t]
            c = -pairing(v, alpha, L.gram)
            term = qs_mul(term, qs_scale(eisenstein_F(n, order), c))
            if term.is_zero:
                break
        if term.is_zero:
            continue
        for r, s in sigma.pairs:
            (vr, nr), (vs, ns) = word.factors[r], word.factors[s]
            term = qs_mul(term, qs_scale(eisenstein_hat("Fhat", nr, ns, order), pairing(vr, vs, L.gram)))
            if term.is_zero:
                break
        total = qs_add(total, term)
    return qs_mul(total, base)


# ------------------------------------------------------------- recursion

def _hat(kind: str, n: int, m: int, order: int) -> FracQSeries:
    return eisenstein_hat(kind, n, m, order)


@lru_cache(maxsize=None)
def _untwisted_parts(factors: tuple, gram: tuple, order: int) -> dict:
    """Zhu recursion on a module M (x) e^alpha with alpha kept symbolic.

    Returns {sorted tuple of vectors D: series R_D} so that the trace over the
    module is sum_D prod_{v in D} (v, alpha) R_D * q^{alpha^2/2} / eta^k.
    """
    if not factors:
        return {(): _one(order)}
    (v, n), rest = factors[0], factors[1:]
    out: dict = defaultdict(FracQSeries.zero)
    if n == 1:
        # o(h) acts on M (x) e^alpha as the scalar (h, alpha)
        for d, s in _untwisted_parts(rest, gram, order).items():
            key = tuple(sorted(d + (v,)))
            out[key] = qs_add(out[key], s)
    # h[m] with m >= 1 contracts with the factor h[-m]: [h[m], h_w[-m]] = m (h, w)
    for j, (w, nj) in enumerate(rest):
        c = pairing(v, w, gram)
        if not c:
            continue
        coeff = qs_scale(_hat("Ehat", n, nj, order), c)  # (1/m) * m (v, w) Ehat_{n+m}
        if coeff.is_zero:
            continue
        for d, s in _untwisted_parts(rest[:j] + rest[j + 1:], gram, order).items():
            out[d] = qs_add(out[d], qs_mul(coeff, s))
    return {d: s for d, s in out.items() if not s.is_zero}


def _untwisted_value(word: BracketWord, algebra: str, ctx: HeisenbergContext, order: int, alpha=None) -> FracQSeries:
    if word.tail.kind != "vacuum":
        # a lattice tail moves the sector, so the untwisted trace vanishes
        return FracQSeries.zero()
    parts = _untwisted_parts(word.factors, ctx.gram, order)
    k = ctx.rank
    if algebra == "M":
        return qs_mul(parts.get((), FracQSeries.zero()), character("M", k, order))
    if algebra == "module":
        alpha = tuple(alpha)
        total = FracQSeries.zero()
        for d, s in parts.items():
            c = Fraction(1)
            for v in d:
                c *= pairing(v, alpha, ctx.gram)
            total = qs_add(total, qs_scale(s, c))
        if total.is_zero:
            return total
        base = _inv_eta(k, order)
        h = pairing(alpha, alpha, ctx.gram) / 2
        return qs_mul(total, FracQSeries(base.lead_exp + h, base.coeffs, base.order))
    if algebra == "VL":
        L = ctx.lattice
        total = FracQSeries.zero()
        for d, s in parts.items():
            total = qs_add(total, qs_mul(_theta_P(L, d, order), s))
        return qs_mul(total, _inv_eta(k, order))
    raise TraceError(f"untwisted recursion does not handle {algebra!r}")


def zhu_recurse_untwisted(word: BracketWord, algebra: str, ctx: HeisenbergContext, order: int,
                          alpha=None) -> FracQSeries:
    """Trace over M, V_L or a module M (x) e^alpha by peeling the leftmost factor."""
    return _untwisted_value(word, algebra, ctx, order, alpha)


def _mixed_trace(v, rest: BracketWord, ctx: HeisenbergContext, order: int) -> FracQSeries:
    from .fockoracle import oracle_mixed_trace

    return oracle_mixed_trace(v, rest, ctx, order)


def zhu_recurse_twisted(word: BracketWord, algebra: str, ctx: HeisenbergContext, order: int) -> FracQSeries:
    """Trace over M+ or V_L+ by the Z2-twisted recursion."""
    if algebra not in ("Mplus", "VLplus"):
        raise TraceError("twisted recursion needs Mplus or VLplus")
    if algebra == "Mplus" and word.tail.kind != "vacuum":
        raise TraceError("M+ states carry a vacuum tail")
    tail = word.tail
    if tail.kind == "e":
        raise TraceError("e-tails are not t-invariant")
    # an odd vacuum word lies in V^-; every leg then vanishes and the value is 0
    if tail.kind != "vacuum" and (tail.kind == "f") != (word.p % 2 == 0):
        raise TraceError("state not in V_L+ basis family")
    return _twisted(word.factors, tail, algebra, ctx, order)


@lru_cache(maxsize=None)
def _twisted(factors: tuple, tail: Tail, algebra: str, ctx: HeisenbergContext, order: int) -> FracQSeries:
    k = ctx.rank
    if not factors:
        if tail.kind == "vacuum":
            return character(algebra, k if algebra == "Mplus" else ctx.lattice, order)
        if tail.kind == "g":
            return FracQSeries.zero()
        return falpha_trace(ctx.lattice, tail.alpha, order)
    (v, n), rest = factors[0], factors[1:]
    total = FracQSeries.zero()
    if tail.kind != "vacuum":
        # m = 0: h[0] commutes past the remaining factors and flips f <-> g
        c = pairing(v, tail.alpha, ctx.gram)
        if c:
            flipped = Tail("g" if tail.kind == "f" else "f", tail.alpha)
            sub = _twisted(rest, flipped, algebra, ctx, order)
            total = qs_add(total, qs_mul(qs_scale(eisenstein_F(n, order), -c), sub))
    for j, (w, nj) in enumerate(rest):
        c = pairing(v, w, ctx.gram)
        if not c:
            continue
        reduced = rest[:j] + rest[j + 1:]
        sub = _twisted(reduced, tail, algebra, ctx, order)
        total = qs_add(total, qs_mul(qs_scale(_hat("Fhat", n, nj, order), c), sub))
        if tail.kind == "vacuum":
            plain = "M" if algebra == "Mplus" else "VL"
            zv = _untwisted_value(BracketWord(reduced, tail), plain, ctx, order)
            diff = qs_sub(_hat("Ehat", n, nj, order), _hat("Fhat", n, nj, order))
            total = qs_add(total, qs_mul(qs_scale(diff, c / 2), zv))
    if n == 1 and algebra == "VLplus" and tail.kind == "vacuum":
        mixed = _mixed_trace(v, BracketWord(rest, tail), ctx, order)
        total = qs_add(total, qs_scale(mixed, Fraction(1, 2)))
    return total


def closed_form_trace(word: BracketWord, algebra: str, ctx: HeisenbergContext, order: int) -> FracQSeries:
    """Dispatch to the closed form matching the algebra and tail."""
    if algebra == "M":
        return trace_M(word, ctx, order)
    if algebra == "Mplus":
        return trace_Mplus(word, ctx, order)
    if ctx.lattice is None:
        raise TraceError("lattice algebra needs a Gram matrix")
    if algebra == "VL":
        if word.tail.kind != "vacuum":
            return FracQSeries.zero()
        return trace_VL(word, ctx.lattice, order)
    if algebra == "VLplus":
        if word.tail.kind == "vacuum":
            return trace_VLplus_M(word, ctx.lattice, order)
        return trace_VLplus_lattice_tail(word, ctx.lattice, order)
    raise TraceError(f"unknown algebra {algebra!r}")
