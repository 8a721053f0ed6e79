"""Bernoulli numbers, Eisenstein series E_k / F_k and their renormalized
versions, the Dedekind eta function and the VOA characters built from them.

Normalization follows the conventions used throughout the package::

    E_k = -B_k/k! + 2/(k-1)! * sum sigma_{k-1}(n) q^n     (k even; 0 for k odd)
    F_k(tau) = 2 E_k(2 tau) - E_k(tau)
    Ehat_{m+n} = (-1)^(n+1) n binom(m+n-1, n) E_{m+n}   (likewise Fhat)
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .qseries import FracQSeries, qs_add, qs_mul, qs_pow, qs_rescale, qs_scale

__all__ = [
    "bernoulli",
    "divisor_sigma",
    "eisenstein_E",
    "eisenstein_F",
    "eisenstein_hat",
    "hat_coefficient",
    "eta",
    "eta_quotient",
    "character",
    "EisensteinId",
]


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """B_k from z/(e^z - 1), so B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2:
        return Fraction(0)
    s = sum(comb(k + 1, j) * bernoulli(j) for j in range(k))
    return -s / (k + 1)


def divisor_sigma(r: int, n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** r
            e = n // d
            if e != d:
                total += e ** r
        d += 1
    return total


@lru_cache(maxsize=None)
def _E_coeffs(k: int, order: int) -> tuple:
    const = -bernoulli(k) / factorial(k)
    scale = Fraction(2, factorial(k - 1))
    return (const,) + tuple(scale * divisor_sigma(k - 1, n) for n in range(1, order))


def eisenstein_E(k: int, order: int) -> FracQSeries:
    if k < 1:
        raise ValueError("weight must be positive")
    if k % 2:
        return FracQSeries.zero()
    return FracQSeries(0, _E_coeffs(k, order), order)


@lru_cache(maxsize=None)
def eisenstein_F(k: int, order: int) -> FracQSeries:
    if k < 1:
        raise ValueError("weight must be positive")
    if k % 2:
        return FracQSeries.zero()
    e = eisenstein_E(k, order)
    return qs_add(qs_scale(qs_rescale(e, 2), 2), qs_scale(e, -1)).truncate(order)


def hat_coefficient(m: int, n: int) -> int:
    """The integer ``(-1)^(n+1) n binom(m+n-1, n)`` multiplying E_{m+n}."""
    if m < 1 or n < 1:
        raise ValueError("indices must be positive")
    return (-1) ** (n + 1) * n * comb(m + n - 1, n)


@lru_cache(maxsize=None)
def _hat_cached(kind: str, lo: int, hi: int, order: int) -> FracQSeries:
    # keyed by the ordered pair so that Ehat_{1+5}, Ehat_{2+4}, Ehat_{3+3}
    # never share a slot even though all are multiples of E_6
    base = eisenstein_E(lo + hi, order) if kind == "Ehat" else eisenstein_F(lo + hi, order)
    return qs_scale(base, hat_coefficient(lo, hi))


def eisenstein_hat(kind: str, m: int, n: int, order: int) -> FracQSeries:
    if kind not in ("Ehat", "Fhat"):
        raise ValueError("kind must be 'Ehat' or 'Fhat'")
    lo, hi = (m, n) if m <= n else (n, m)
    return _hat_cached(kind, lo, hi, order)


class EisensteinId:
    """Names one of E_k, F_k, Ehat_{m+n}, Fhat_{m+n}."""

    def __init__(self, kind: str, k: int | None = None, m: int | None = None, n: int | None = None):
        if kind in ("E", "F"):
            if k is None or k < 1:
                raise ValueError(f"{kind} needs a positive weight k")
        elif kind in ("Ehat", "Fhat"):
            if m is None or n is None or m < 1 or n < 1:
                raise ValueError(f"{kind} needs positive indices m, n")
            m, n = min(m, n), max(m, n)
        else:
            raise ValueError(f"unknown Eisenstein kind {kind!r}")
        self.kind, self.k, self.m, self.n = kind, k, m, n

    def __eq__(self, other):
        return isinstance(other, EisensteinId) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.kind, self.k, self.m, self.n)

    def __repr__(self):
        if self.kind in ("E", "F"):
            return f"{self.kind}_{self.k}"
        return f"{self.kind}_{{{self.m}+{self.n}}}"

    def series(self, order: int) -> FracQSeries:
        if self.kind == "E":
            return eisenstein_E(self.k, order)
        if self.kind == "F":
            return eisenstein_F(self.k, order)
        return eisenstein_hat(self.kind, self.m, self.n, order)


@lru_cache(maxsize=None)
def _euler_product(order: int) -> tuple:
    """Coefficients of prod_{n>=1} (1 - q^n) up to q^(order-1)."""
    c = [0] * order
    c[0] = 1
    for n in range(1, order):
        for i in range(order - 1, n - 1, -1):
            c[i] -= c[i - n]
    return tuple(c)


def eta(order: int) -> FracQSeries:
    return FracQSeries(Fraction(1, 24), _euler_product(order), order)


def eta_quotient(factors, order: int) -> FracQSeries:
    """prod_j eta(m_j tau)^(r_j) for ``factors`` = [(m_1, r_1), ...], to ``order`` terms."""
    return _eta_quotient(tuple((int(m), int(r)) for m, r in factors), order)


@lru_cache(maxsize=None)
def _eta_quotient(factors: tuple, order: int) -> FracQSeries:
    result = FracQSeries(0, [1], order)
    for m, r in factors:
        if r == 0:
            continue
        base = eta(order)
        if m != 1:
            base = qs_rescale(base, m).truncate(order)
        result = qs_mul(result, qs_pow(base, r))
    return result


def _lattice_theta(L, order):
    from .lattice import theta

    return theta(L, order)


def character(which: str, rank_or_lattice, order: int) -> FracQSeries:
    """Graded characters of M, M+, M-, V_L and V_L+ as eta/theta expressions."""
    aliases = {"M+": "Mplus", "M-": "Mminus", "VL+": "VLplus"}
    which = aliases.get(which, which)
    if which in ("M", "Mplus", "Mminus"):
        k = int(rank_or_lattice)
        if k < 1:
            raise ValueError("rank must be positive")
        zm = eta_quotient(((1, -k),), order)
        if which == "M":
            return zm
        twisted = eta_quotient(((1, k), (2, -k)), order)
        sign = 1 if which == "Mplus" else -1
        return qs_scale(qs_add(zm, qs_scale(twisted, sign)), Fraction(1, 2))
    if which in ("VL", "VLplus"):
        L = rank_or_lattice
        k = L.rank
        zvl = qs_mul(_lattice_theta(L, order), eta_quotient(((1, -k),), order))
        if which == "VL":
            return zvl
        twisted = eta_quotient(((1, k), (2, -k)), order)
        return qs_scale(qs_add(zvl, twisted), Fraction(1, 2))
    raise ValueError(f"unknown algebra {which!r}")

