"""Brute-force traces on explicit Fock spaces.

States are sparse rational combinations of basis keys ``(modes, alpha)``:
``modes`` is a sorted tuple of ``(n, color)`` meaning ``b_color(-n)`` and
``alpha`` is a lattice vector (all zeros for pure Heisenberg states).
Colors index the lattice basis, so ``[b_i(m), b_j(n)] = m G_ij delta_{m,-n}``.

Two trace engines are provided.

* The literal engine enumerates a graded basis up to a weight cutoff, applies
  zero modes by free-field normal ordering (and the lattice vertex operator
  for ``e^gamma`` tails) and sums diagonal entries.
* The level engine uses that the Fock space is a tensor product over
  oscillator levels ``n``.  A normal-ordered zero mode splits into per-level
  operators, so its trace is a product of small per-level traces.  This is
  still a literal trace (no closed form is used), but it reaches q-order 20
  in well under a second per state.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb, factorial

from .lattice import enumerate_vectors
from .qseries import FracQSeries, qs_add, qs_mul, qs_scale
from .words import BracketWord, HeisenbergContext, Tail, pairing

__all__ = [
    "FockVector",
    "ModeTransportTable",
    "transport_coefficient",
    "enumerate_basis",
    "apply_round_mode",
    "apply_square_mode",
    "build_square_state",
    "tail_vector",
    "zero_mode_apply",
    "zero_mode_matrix",
    "lattice_vertex_zero_mode",
    "graded_trace",
    "literal_trace",
    "oracle_trace",
    "cocycle",
    "oracle_mixed_trace",
    "OracleError",
]


class OracleError(ValueError):
    pass


def gbinom(a: int, k: int) -> int:
    """Binomial coefficient with arbitrary integer top."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= a - i
    return num // factorial(k)


# ---------------------------------------------------------------- states

@dataclass
class FockVector:
    entries: dict = field(default_factory=dict)

    @classmethod
    def basis(cls, key) -> "FockVector":
        return cls({key: Fraction(1)})

    def add_term(self, key, c) -> None:
        if not c:
            return
        v = self.entries.get(key, 0) + c
        if v:
            self.entries[key] = v
        else:
            self.entries.pop(key, None)

    def __add__(self, other: "FockVector") -> "FockVector":
        out = FockVector(dict(self.entries))
        for k, c in other.entries.items():
            out.add_term(k, c)
        return out

    def scale(self, c) -> "FockVector":
        c = Fraction(c)
        if not c:
            return FockVector()
        return FockVector({k: v * c for k, v in self.entries.items()})

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        return isinstance(other, FockVector) and self.entries == other.entries

    def items(self):
        return self.entries.items()


def mode_weight(key) -> int:
    return sum(n for n, _ in key[0])


def key_weight(key, gram) -> Fraction:
    a = key[1]
    return mode_weight(key) + pairing(a, a, gram) / 2


def _insert(modes: tuple, mode: tuple) -> tuple:
    lst = list(modes)
    lst.append(mode)
    lst.sort()
    return tuple(lst)


def _remove(modes: tuple, mode: tuple) -> tuple:
    lst = list(modes)
    lst.remove(mode)
    return tuple(lst)


def apply_round_mode(v, n: int, x: FockVector, ctx: HeisenbergContext) -> FockVector:
    """``h_v(n) x`` for a coordinate vector ``v``."""
    out = FockVector()
    if n < 0:
        for key, c in x.items():
            modes, alpha = key
            for i, vi in enumerate(v):
                if vi:
                    out.add_term((_insert(modes, (-n, i)), alpha), c * vi)
    elif n > 0:
        gv = [pairing(v, [int(i == j) for j in range(ctx.rank)], ctx.gram) for i in range(ctx.rank)]
        for key, c in x.items():
            modes, alpha = key
            for mode in set(modes):
                if mode[0] != n or not gv[mode[1]]:
                    continue
                mult = modes.count(mode)
                out.add_term((_remove(modes, mode), alpha), c * mult * n * gv[mode[1]])
    else:
        for key, c in x.items():
            out.add_term(key, c * ctx.pair(v, key[1]))
    return out


# ----------------------------------------------------- square brackets

def _zmul(a: list, b: list, deg: int) -> list:
    out = [Fraction(0)] * (deg + 1)
    for i, x in enumerate(a[: deg + 1]):
        if x:
            for j, y in enumerate(b[: deg + 1 - i]):
                if y:
                    out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _U_power(r: int, deg: int) -> tuple:
    """Coefficients of ((e^z - 1)/z)^r up to z^deg."""
    U = [Fraction(1, factorial(i + 1)) for i in range(deg + 1)]
    if r < 0:
        inv = [Fraction(1)]
        for k in range(1, deg + 1):
            inv.append(-sum(U[i] * inv[k - i] for i in range(1, k + 1)))
        U, r = inv, -r
    out = [Fraction(1)] + [Fraction(0)] * deg
    for _ in range(r):
        out = _zmul(out, U, deg)
    return tuple(out)


@lru_cache(maxsize=None)
def transport_coefficient(m: int, j: int) -> Fraction:
    """Coefficient of ``h(j)`` in ``h[m]`` for a weight-one generator ``h``."""
    d = j - m
    if d < 0:
        return Fraction(0)
    expz = [Fraction(1, factorial(i)) for i in range(d + 1)]
    return _zmul(expz, list(_U_power(-j - 1, d)), d)[d]


class ModeTransportTable:
    """``a(m, j)`` with ``h[m] = sum_{j >= m} a(m, j) h(j)``."""

    def __call__(self, m: int, j: int) -> Fraction:
        return transport_coefficient(m, j)

    def row(self, m: int, j_max: int) -> list[tuple[int, Fraction]]:
        return [(j, transport_coefficient(m, j)) for j in range(m, j_max + 1) if transport_coefficient(m, j)]


def apply_square_mode(v, m: int, x: FockVector, ctx: HeisenbergContext) -> FockVector:
    """``h_v[m] x``; the sum over round modes stops at the top mode weight of ``x``."""
    top = max((mode_weight(k) for k in x.entries), default=0)
    out = FockVector()
    for j in range(m, max(top, 0) + 1):
        a = transport_coefficient(m, j)
        if a:
            out = out + apply_round_mode(v, j, x, ctx).scale(a)
    return out


def tail_vector(tail: Tail, rank: int) -> FockVector:
    zero = (0,) * rank
    if tail.kind == "vacuum":
        return FockVector.basis(((), zero))
    a = tail.alpha
    neg = tuple(-x for x in a)
    if tail.kind == "e":
        return FockVector.basis(((), a))
    sign = 1 if tail.kind == "f" else -1
    out = FockVector.basis(((), a))
    out.add_term(((), neg), Fraction(sign))
    return out


def build_square_state(word: BracketWord, ctx: HeisenbergContext) -> FockVector:
    x = tail_vector(word.tail, ctx.rank)
    for v, n in reversed(word.factors):
        x = apply_square_mode(v, -n, x, ctx)
    return x


# ---------------------------------------------------------------- basis

def _colored_partitions(w: int, k: int) -> list[tuple]:
    """Sorted mode tuples ``((n, color), ...)`` of total weight exactly ``w``."""
    parts = [(n, c) for n in range(1, w + 1) for c in range(k)]

    def rec(left: int, start: int):
        if left == 0:
            yield ()
            return
        for i in range(start, len(parts)):
            n = parts[i][0]
            if n > left:
                break
            for rest in rec(left - n, i):
                yield (parts[i],) + rest

    return list(rec(w, 0))


@lru_cache(maxsize=None)
def _modes_of_weight(w: int, k: int) -> tuple:
    return tuple(_colored_partitions(w, k))


def cocycle(a, b, gram) -> int:
    """Bimultiplicative 2-cocycle: eps(b_i, b_j) = (-1)^{G_ij} for i > j, else 1."""
    s = 0
    for i in range(len(gram)):
        for j in range(i):
            s += a[i] * b[j] * gram[i][j]
    return -1 if s % 2 else 1


def enumerate_basis(ctx: HeisenbergContext, algebra: str, max_weight: int) -> dict:
    """Weight -> list of basis entries.

    Entries are keys for M, Mplus, Mminus, VL.  For VLplus they are pairs
    ``(representative key, FockVector)`` of the t-invariant basis.
    """
    k = ctx.rank
    zero = (0,) * k
    out: dict = {w: [] for w in range(max_weight + 1)}
    if algebra in ("M", "Mplus", "Mminus"):
        for w in range(max_weight + 1):
            for modes in _modes_of_weight(w, k):
                if algebra == "Mplus" and len(modes) % 2:
                    continue
                if algebra == "Mminus" and not len(modes) % 2:
                    continue
                out[w].append((modes, zero))
        return out
    if algebra not in ("VL", "VLplus"):
        raise OracleError(f"unknown algebra {algebra!r}")
    if ctx.lattice is None:
        raise OracleError("lattice algebra needs a lattice context")
    L = ctx.lattice
    for alpha in enumerate_vectors(L, 2 * max_weight):
        h = int(L.norm(alpha)) // 2
        if algebra == "VLplus" and alpha != zero and alpha < tuple(-x for x in alpha):
            continue
        for w in range(h, max_weight + 1):
            for modes in _modes_of_weight(w - h, k):
                key = (modes, alpha)
                if algebra == "VL":
                    out[w].append(key)
                elif alpha == zero:
                    if not len(modes) % 2:
                        out[w].append((key, FockVector.basis(key)))
                else:
                    vec = FockVector.basis(key)
                    vec.add_term((modes, tuple(-x for x in alpha)), Fraction((-1) ** len(modes)))
                    out[w].append((key, vec))
    return out


# ------------------------------------------------------ literal zero modes

def _apply_h_j(color_vec, j: int, coeff_of_j, zshift, cur: dict, ctx, bound: int | None) -> dict:
    new: dict = defaultdict(FockVector)
    for zp, vec in cur.items():
        res = apply_round_mode(color_vec, j, vec, ctx)
        if bound is not None:
            res = FockVector({k: c for k, c in res.items() if mode_weight(k) <= bound})
        if res:
            new[zp + zshift] = new[zp + zshift] + res.scale(coeff_of_j)
    return {z: v for z, v in new.items() if v}


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for z, v in b.items():
        out[z] = out[z] + v if z in out else v
    return out


def _field_zero_mode_on_key(factors: list, gamma: tuple, key, ctx: HeisenbergContext) -> FockVector:
    """Zero mode of ``h_{w1}(-m1)...h_{wp}(-mp) e^gamma`` on one basis key."""
    gram = ctx.gram
    modes, sigma = key
    target = tuple(s + g for s, g in zip(sigma, gamma))
    src_w = mode_weight(key) + pairing(sigma, sigma, gram) / 2
    top = src_w - pairing(target, target, gram) / 2
    if top < 0 or top.denominator != 1:
        return FockVector()
    top = int(top)
    wt_u = sum(m for _, m in factors) + pairing(gamma, gamma, gram) / 2
    gamma_vec = tuple(Fraction(x) for x in gamma)
    has_gamma = any(gamma)
    w0 = mode_weight(key)
    result = FockVector()
    p = len(factors)
    for r in range(p + 1):
        for ann in combinations(range(p), r):
            cur = {Fraction(0): FockVector.basis(key)}
            for t in ann:
                w, m = factors[t]
                acc: dict = {}
                for j in range(0, w0 + 1):
                    acc = _merge(acc, _apply_h_j(w, j, gbinom(-j - 1, m - 1), -j - m, cur, ctx, None))
                cur = acc
                if not cur:
                    break
            if not cur:
                continue
            if has_gamma:
                for n in range(1, w0 + 1):
                    acc = dict(cur)
                    step = cur
                    for b in range(1, w0 // n + 1):
                        step = _apply_h_j(gamma_vec, n, Fraction(-1, n * b), -n, step, ctx, None)
                        if not step:
                            break
                        acc = _merge(acc, step)
                    cur = acc
                moved = {}
                for zp, vec in cur.items():
                    nv = FockVector()
                    for (md, s), c in vec.items():
                        nv.add_term((md, tuple(x + g for x, g in zip(s, gamma))), c * cocycle(gamma, s, gram))
                    zs = zp + pairing(gamma, sigma, gram)
                    moved[zs] = moved[zs] + nv if zs in moved else nv
                cur = moved
                for n in range(1, top + 1):
                    acc = dict(cur)
                    step = cur
                    for a in range(1, top // n + 1):
                        step = _apply_h_j(gamma_vec, -n, Fraction(1, n * a), n, step, ctx, top)
                        if not step:
                            break
                        acc = _merge(acc, step)
                    cur = acc
            for t in range(p):
                if t in ann:
                    continue
                w, m = factors[t]
                acc = {}
                for n in range(1, top + 1):
                    acc = _merge(acc, _apply_h_j(w, -n, gbinom(n - 1, m - 1), n - m, cur, ctx, top))
                cur = acc
                if not cur:
                    break
            hit = cur.get(-wt_u)
            if hit:
                result = result + FockVector({k: c for k, c in hit.items() if mode_weight(k) == top})
    return result


def _key_factors(modes: tuple, rank: int) -> list:
    return [(tuple(int(i == c) for i in range(rank)), n) for n, c in modes]


def zero_mode_apply(u: FockVector, x: FockVector, ctx: HeisenbergContext) -> FockVector:
    """``o(u) x`` by normal ordering, summed over the homogeneous components of ``u``."""
    out = FockVector()
    for (umodes, gamma), cu in u.items():
        factors = _key_factors(umodes, ctx.rank)
        for key, cx in x.items():
            out = out + _field_zero_mode_on_key(factors, gamma, key, ctx).scale(cu * cx)
    return out


def zero_mode_matrix(u: FockVector, ctx: HeisenbergContext, keys: list) -> dict:
    """Exact matrix ``{(row key, column key): entry}`` of o(u) on the span of ``keys``."""
    if len({key_weight(k, ctx.gram) for k in u.entries}) > 1:
        raise OracleError("zero mode matrix needs a homogeneous state")
    mat = {}
    for col in keys:
        img = zero_mode_apply(u, FockVector.basis(col), ctx)
        for row, c in img.items():
            mat[(row, col)] = c
    return mat


def lattice_vertex_zero_mode(word: BracketWord, ctx: HeisenbergContext, keys: list) -> dict:
    """Matrix of the zero mode of a lattice-tail word on the span of ``keys``."""
    if word.tail.kind == "vacuum" or not any(word.tail.alpha):
        raise OracleError("lattice vertex zero mode needs a nonzero lattice tail")
    u = build_square_state(word, ctx)
    mat: dict = {}
    for col in keys:
        for row, c in zero_mode_apply(u, FockVector.basis(col), ctx).items():
            mat[(row, col)] = c
    return mat


def graded_trace(op, algebra: str, ctx: HeisenbergContext, max_weight: int) -> FracQSeries:
    """``q^{-k/24} sum_w Tr(op | weight w) q^w`` over the chosen algebra.

    ``op`` maps a FockVector to a FockVector.
    """
    basis = enumerate_basis(ctx, algebra, max_weight)
    coeffs = []
    for w in range(max_weight + 1):
        tr = Fraction(0)
        for entry in basis[w]:
            if algebra == "VLplus":
                rep, vec = entry
                tr += op(vec).entries.get(rep, 0)
            else:
                tr += op(FockVector.basis(entry)).entries.get(entry, 0)
        coeffs.append(tr)
    return FracQSeries(Fraction(-ctx.rank, 24), coeffs, max_weight + 1)


def literal_trace(word: BracketWord, algebra: str, ctx: HeisenbergContext, max_weight: int) -> FracQSeries:
    u = build_square_state(word, ctx)
    if not u:
        return FracQSeries.zero()
    return graded_trace(lambda x: zero_mode_apply(u, x, ctx), algebra, ctx, max_weight)


# ------------------------------------------------------------ level engine

def _poly_trunc_mul(a: list, b: dict, order: int) -> list:
    """``a`` dense in q, ``b`` sparse {power: coeff}; product truncated to ``order``."""
    out = [Fraction(0)] * order
    for i, x in enumerate(a):
        if x:
            for e, y in b.items():
                if i + e >= order:
                    continue
                out[i + e] += x * y
    return out


@lru_cache(maxsize=None)
def _occupations(k: int, bound: int) -> tuple:
    out = []
    for total in range(bound + 1):
        for occ in product(range(total + 1), repeat=k):
            if sum(occ) == total:
                out.append(occ)
    return tuple(out)


@lru_cache(maxsize=None)
def _unit_level_trace(creators: tuple, annihilators: tuple, sign: int, bound: int, gram: tuple) -> tuple:
    """``sum_N sign^|N| x^|N| <N| prod c(-1) prod a(1) |N>`` for |N| <= bound.

    Level-one normalization: ``a(1) b_i(-1) = (G a)_i``; the caller restores
    the factor ``n`` per annihilator.
    """
    k = len(gram)
    ga = [[sum(gram[i][j] * a[j] for j in range(k)) for i in range(k)] for a in annihilators]
    coeffs = [Fraction(0)] * (bound + 1)
    need = len(annihilators)
    for occ in _occupations(k, bound):
        tot = sum(occ)
        if tot < need:
            continue
        state = {occ: Fraction(1)}
        for g in ga:
            nxt: dict = defaultdict(Fraction)
            for o, c in state.items():
                for i in range(k):
                    if o[i] and g[i]:
                        nxt[o[:i] + (o[i] - 1,) + o[i + 1:]] += c * o[i] * g[i]
            state = {o: c for o, c in nxt.items() if c}
            if not state:
                break
        if not state:
            continue
        for cvec in creators:
            nxt = defaultdict(Fraction)
            for o, c in state.items():
                for i in range(k):
                    if cvec[i]:
                        nxt[o[:i] + (o[i] + 1,) + o[i + 1:]] += c * cvec[i]
            state = {o: c for o, c in nxt.items() if c}
        diag = state.get(occ, 0)
        if diag:
            coeffs[tot] += diag * (sign ** tot)
    return tuple(coeffs)


def _empty_level_inverse(sign: int, k: int, bound: int) -> list:
    """Coefficients of (1 - sign x)^k."""
    return [Fraction(comb(k, i) * (-sign) ** i) for i in range(min(k, bound) + 1)]


@lru_cache(maxsize=None)
def _level_ratio(n: int, creators: tuple, annihilators: tuple, sign: int, order: int, gram: tuple) -> tuple:
    """Per-level trace divided by the empty-level trace, as sparse q-powers."""
    bound = (order - 1) // n
    t = _unit_level_trace(creators, annihilators, sign, bound, gram)
    e = _empty_level_inverse(sign, len(gram), bound)
    out = {}
    for i, x in enumerate(t):
        if x:
            for j, y in enumerate(e):
                if i + j <= bound:
                    out[n * (i + j)] = out.get(n * (i + j), 0) + x * y * n ** len(annihilators)
    return tuple(sorted((p, c) for p, c in out.items() if c))


def _creator_coeff(n: int, m: int) -> int:
    return comb(n - 1, m - 1)


def _annihilator_coeff(n: int, m: int) -> int:
    return gbinom(-n - 1, m - 1)


def _choices(rem: tuple, r: int):
    """Count vectors c <= rem with sum r, with multiplicity prod binom(rem_i, c_i)."""
    def rec(i, left):
        if i == len(rem):
            if left == 0:
                yield (), 1
            return
        for c in range(min(rem[i], left) + 1):
            for tail, mult in rec(i + 1, left - c):
                yield (c,) + tail, mult * comb(rem[i], c)
    yield from rec(0, r)


def _expand(types: tuple, counts: tuple) -> list:
    return [types[i] for i, c in enumerate(counts) for _ in range(c)]


@lru_cache(maxsize=None)
def _heisenberg_core(types: tuple, counts: tuple, sign: int, order: int, gram: tuple, allow_zero: bool) -> dict:
    """DP over levels for a round monomial; returns remaining-counts -> q-series list.

    ``types`` lists distinct factors ``(vector, m)``; the result still has to be
    multiplied by the empty-level product and by the zero-mode factors of the
    unassigned factors.
    """
    states = {counts: [Fraction(1)] + [Fraction(0)] * (order - 1)}
    for n in range(1, order):
        new: dict = defaultdict(lambda: [Fraction(0)] * order)
        for rem, ser in states.items():
            low = next((i for i, x in enumerate(ser) if x), order)
            left = sum(rem)
            if low >= order:
                continue
            if not allow_zero and low + n * ((left + 1) // 2) >= order:
                continue
            acc = new[rem]
            for i, x in enumerate(ser):
                acc[i] += x
            for r in range(1, left // 2 + 1):
                if low + n * r >= order:
                    break
                for cc, mc in _choices(rem, r):
                    rem2 = tuple(a - b for a, b in zip(rem, cc))
                    for ac, ma in _choices(rem2, r):
                        cre = _expand(types, cc)
                        ann = _expand(types, ac)
                        coeff = mc * ma
                        for _, m in cre:
                            coeff *= _creator_coeff(n, m)
                        for _, m in ann:
                            coeff *= _annihilator_coeff(n, m)
                        if not coeff:
                            continue
                        ratio = _level_ratio(
                            n, tuple(sorted(v for v, _ in cre)), tuple(sorted(v for v, _ in ann)), sign, order, gram
                        )
                        prodser = _poly_trunc_mul(ser, dict(ratio), order)
                        tgt = new[tuple(a - b for a, b in zip(rem2, ac))]
                        for i, x in enumerate(prodser):
                            if x:
                                tgt[i] += coeff * x
        states = {s: v for s, v in new.items() if any(v)}
    return states


@lru_cache(maxsize=None)
def _empty_product(sign: int, k: int, order: int) -> FracQSeries:
    """q^{-k/24} prod_{n>=1} (1 - sign q^n)^{-k}."""
    ser = [Fraction(1)] + [Fraction(0)] * (order - 1)
    for n in range(1, order):
        for _ in range(k):
            for i in range(n, order):
                ser[i] += sign * ser[i - n]
    return FracQSeries(Fraction(-k, 24), ser, order)


def _monomial_types(modes: tuple, rank: int) -> tuple[tuple, tuple]:
    tally: dict = defaultdict(int)
    for n, c in modes:
        tally[(tuple(Fraction(int(i == c)) for i in range(rank)), n)] += 1
    types = tuple(sorted(tally))
    return types, tuple(tally[t] for t in types)


def _zero_factor(types, rem, alpha, gram) -> Fraction:
    f = Fraction(1)
    for (v, m), c in zip(types, rem):
        if c:
            f *= ((-1) ** (m - 1) * pairing(v, alpha, gram)) ** c
    return f


def _sector_trace(modes: tuple, alpha: tuple, sign: int, ctx, order: int) -> FracQSeries:
    """Tr over M (x) e^alpha of o(h(-m)...1) composed with (sign)^N, without q^{alpha^2/2}."""
    types, counts = _monomial_types(modes, ctx.rank)
    has_alpha = any(alpha)
    core = _heisenberg_core(types, counts, sign, order, ctx.gram, has_alpha)
    ser = [Fraction(0)] * order
    for rem, s in core.items():
        f = _zero_factor(types, rem, alpha, ctx.gram) if any(rem) else Fraction(1)
        if f:
            for i, x in enumerate(s):
                ser[i] += f * x
    return qs_mul(FracQSeries(0, ser, order), _empty_product(sign, ctx.rank, order))


def _shift(s: FracQSeries, e) -> FracQSeries:
    if s.is_zero:
        return s
    return FracQSeries(s.lead_exp + e, s.coeffs, s.order)


def _lattice_sum(modes: tuple, ctx, order: int, weight_vector=None) -> FracQSeries:
    """Tr over V_L of o(monomial), optionally composed with h(0) for ``weight_vector``."""
    L = ctx.lattice
    types, counts = _monomial_types(modes, ctx.rank)
    core = _heisenberg_core(types, counts, 1, order, ctx.gram, True)
    coeffs = [Fraction(0)] * order
    for alpha in enumerate_vectors(L, 2 * (order - 1)):
        h = int(L.norm(alpha)) // 2
        w0 = pairing(weight_vector, alpha, ctx.gram) if weight_vector is not None else 1
        if not w0:
            continue
        for rem, s in core.items():
            f = w0 * (_zero_factor(types, rem, alpha, ctx.gram) if any(rem) else Fraction(1))
            if f:
                for i, x in enumerate(s[: order - h]):
                    coeffs[i + h] += f * x
    return qs_mul(FracQSeries(0, coeffs, order), _empty_product(1, ctx.rank, order))


# -- lattice-tail traces with the involution ---------------------------------

@lru_cache(maxsize=None)
def _exp_level_factor(n: int, cre: tuple, ann: tuple, gamma: tuple, order: int, gram: tuple) -> tuple:
    """Level-n trace of (creators) E^-(gamma) E^+(gamma) (annihilators) (-1)^N.

    Returns sparse q-powers (as a tuple of pairs).
    """
    bound = (order - 1) // n
    out: dict = defaultdict(Fraction)
    for b in range(0, bound - len(ann) + 1):
        a = len(ann) + b - len(cre)
        if a < 0:
            continue
        c0 = Fraction((-1) ** b, factorial(a) * factorial(b)) * Fraction(n) ** (len(ann) - a)
        cr = tuple(sorted(cre + (gamma,) * a))
        an = tuple(sorted(ann + (gamma,) * b))
        t = _unit_level_trace(cr, an, -1, bound, gram)
        for i, x in enumerate(t):
            if x:
                out[n * i] += c0 * x
    return tuple(sorted((p, c) for p, c in out.items() if c))


def _twisted_lattice_monomial(modes: tuple, gamma: tuple, ctx, order: int) -> FracQSeries:
    """Tr over V_L of o(h(-m)...e^gamma) t, supported on the sector gamma/2."""
    gram = ctx.gram
    if any(g % 2 for g in gamma):
        return FracQSeries.zero()
    beta = tuple(g // 2 for g in gamma)
    src = tuple(-b for b in beta)
    types, counts = _monomial_types(modes, ctx.rank)
    gvec = tuple(Fraction(g) for g in gamma)
    states = {counts: [Fraction(1)] + [Fraction(0)] * (order - 1)}
    for n in range(1, order):
        new: dict = defaultdict(lambda: [Fraction(0)] * order)
        for rem, ser in states.items():
            if not any(ser):
                continue
            left = sum(rem)
            for rc in range(left + 1):
                for cc, mc in _choices(rem, rc):
                    rem2 = tuple(a - b for a, b in zip(rem, cc))
                    for ra in range(sum(rem2) + 1):
                        if n * max(rc, ra) >= order:
                            continue
                        for ac, ma in _choices(rem2, ra):
                            cre = _expand(types, cc)
                            ann = _expand(types, ac)
                            coeff = Fraction(mc * ma)
                            for _, m in cre:
                                coeff *= _creator_coeff(n, m)
                            for _, m in ann:
                                coeff *= _annihilator_coeff(n, m)
                            if not coeff:
                                continue
                            fac = _exp_level_factor(
                                n, tuple(sorted(v for v, _ in cre)), tuple(sorted(v for v, _ in ann)), gvec, order, gram
                            )
                            if not fac:
                                continue
                            prodser = _poly_trunc_mul(ser, dict(fac), order)
                            tgt = new[tuple(a - b for a, b in zip(rem2, ac))]
                            for i, x in enumerate(prodser):
                                if x:
                                    tgt[i] += coeff * x
        states = {s: v for s, v in new.items() if any(v)}
    ser = [Fraction(0)] * order
    for rem, s in states.items():
        f = _zero_factor(types, rem, src, gram) if any(rem) else Fraction(1)
        if f:
            for i, x in enumerate(s):
                ser[i] += f * x
    eps = cocycle(gamma, src, gram)
    lead = pairing(beta, beta, gram) / 2 - Fraction(ctx.rank, 24)
    return qs_scale(FracQSeries(lead, ser, order), eps)


# ------------------------------------------------------------ public oracle

def oracle_trace(word: BracketWord, algebra: str, ctx: HeisenbergContext, order: int,
                 alpha: tuple | None = None) -> FracQSeries:
    """Literal trace of o(u) over the algebra (or over M (x) e^alpha when ``alpha`` is given).

    ``algebra`` is one of M, Mplus, Mminus, VL, VLplus, module.  The result is
    known to ``order`` coefficients past q^{-k/24} (or past the lead of the
    lattice-tail sector).
    """
    u = build_square_state(word, ctx)
    total = FracQSeries.zero()
    k = ctx.rank
    zero = (0,) * k
    if word.tail.kind != "vacuum":
        if algebra != "VLplus":
            # o(x (x) e^gamma) moves the lattice sector, so its plain trace vanishes
            return FracQSeries.zero()
        for (modes, gamma), c in u.items():
            total = qs_add(total, qs_scale(_twisted_lattice_monomial(modes, gamma, ctx, order), c / 2))
        return total
    for (modes, _), c in u.items():
        if algebra == "M":
            part = _sector_trace(modes, zero, 1, ctx, order)
        elif algebra in ("Mplus", "Mminus"):
            s = 1 if algebra == "Mplus" else -1
            part = qs_scale(
                qs_add(_sector_trace(modes, zero, 1, ctx, order),
                       qs_scale(_sector_trace(modes, zero, -1, ctx, order), s)),
                Fraction(1, 2),
            )
        elif algebra == "module":
            if alpha is None:
                raise OracleError("module trace needs a lattice vector")
            h = pairing(alpha, alpha, ctx.gram) / 2
            part = _shift(_sector_trace(modes, tuple(alpha), 1, ctx, order), h)
        elif algebra == "VL":
            part = _lattice_sum(modes, ctx, order)
        elif algebra == "VLplus":
            # Tr_{V+} A = (Tr_V A + Tr_V A t) / 2; only the alpha = 0 sector is t-stable
            part = qs_scale(
                qs_add(_lattice_sum(modes, ctx, order), _sector_trace(modes, zero, -1, ctx, order)),
                Fraction(1, 2),
            )
        else:
            raise OracleError(f"unknown algebra {algebra!r}")
        total = qs_add(total, qs_scale(part, c))
    return total


def oracle_mixed_trace(h, word: BracketWord, ctx: HeisenbergContext, order: int) -> FracQSeries:
    """Tr over V_L of o(h) o(u) q^{L(0)-c/24} for a weight-one ``h`` and vacuum-tail ``u``."""
    if word.tail.kind != "vacuum":
        return FracQSeries.zero()
    if ctx.lattice is None:
        return FracQSeries.zero()
    u = build_square_state(word, ctx)
    total = FracQSeries.zero()
    for (modes, _), c in u.items():
        total = qs_add(total, qs_scale(_lattice_sum(modes, ctx, order, tuple(h)), c))
    return total
