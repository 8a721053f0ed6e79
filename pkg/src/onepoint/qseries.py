"""Exact truncated q-series with rational leading exponent.

A :class:`FracQSeries` stands for ``q^e * (a_0 + a_1 q + ... + a_{O-1} q^{O-1} + O(q^O))``
with every ``a_n`` an exact :class:`fractions.Fraction`.  The canonical zero
series (empty coefficients, ``lead_exp == 0``) is treated as *exact* zero: it
is known to every order.
"""
from __future__ import annotations

import cmath
import json
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "FracQSeries",
    "qs_add",
    "qs_sub",
    "qs_neg",
    "qs_scale",
    "qs_mul",
    "qs_inv",
    "qs_pow",
    "qs_rescale",
    "qs_eval",
    "qs_from_json",
    "qs_to_json",
    "EvaluationRegionError",
    "MIN_EVAL_IM",
]

MIN_EVAL_IM = 0.5


class EvaluationRegionError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class FracQSeries:
    """Immutable truncated q-series ``q^lead_exp * sum(coeffs[n] q^n)``."""

    __slots__ = ("lead_exp", "coeffs", "order")

    def __init__(self, lead_exp, coeffs: Iterable = (), order: int | None = None):
        e = _frac(lead_exp)
        cs = [_frac(c) for c in coeffs]
        if order is None:
            order = len(cs)
        if order < len(cs):
            cs = cs[:order]
        else:
            cs.extend([Fraction(0)] * (order - len(cs)))
        # strip leading zeros; every stripped zero shifts the lead by one
        k = 0
        while k < len(cs) and cs[k] == 0:
            k += 1
        if k == len(cs):
            e, cs = Fraction(0), []
        elif k:
            e += k
            cs = cs[k:]
        object.__setattr__(self, "lead_exp", e)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", len(cs))

    def __setattr__(self, name, value):
        raise AttributeError("FracQSeries is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "FracQSeries":
        return cls(0, ())

    @classmethod
    def constant(cls, c, order: int) -> "FracQSeries":
        """The constant ``c`` known to ``order`` coefficients (exact zero if c == 0)."""
        return cls(0, [c], order)

    @classmethod
    def monomial(cls, exp, c=1, order: int = 1) -> "FracQSeries":
        return cls(exp, [c], order)

    # -- basic properties ----------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def precision(self):
        """Absolute exponent up to which coefficients are known (None = exact)."""
        if self.is_zero:
            return None
        return self.lead_exp + self.order

    def coeff(self, exponent) -> Fraction:
        """Coefficient of ``q^exponent``; raises if outside the known range."""
        exponent = _frac(exponent)
        if self.is_zero:
            return Fraction(0)
        d = exponent - self.lead_exp
        if d.denominator != 1:
            return Fraction(0)
        n = int(d)
        if n < 0:
            return Fraction(0)
        if n >= self.order:
            raise IndexError(f"coefficient of q^{exponent} not known (precision {self.precision})")
        return self.coeffs[n]

    def coefficients_from(self, start, count: int) -> list[Fraction]:
        """``count`` coefficients starting at absolute exponent ``start``."""
        return [self.coeff(_frac(start) + i) for i in range(count)]

    def truncate(self, order: int) -> "FracQSeries":
        """Keep at most ``order`` coefficients past the lead."""
        if self.is_zero or order >= self.order:
            return self
        return FracQSeries(self.lead_exp, self.coeffs[:order], order)

    def truncate_abs(self, precision) -> "FracQSeries":
        """Drop everything at or above absolute exponent ``precision``."""
        precision = _frac(precision)
        if self.is_zero:
            return self
        n = precision - self.lead_exp
        n = int(n) if n.denominator == 1 else int(n) + (1 if n > 0 else 0)
        if n <= 0:
            raise ValueError("truncation leaves no known coefficients")
        return self.truncate(n)

    # -- python protocol --------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, FracQSeries):
            return NotImplemented
        return (self.lead_exp, self.coeffs) == (other.lead_exp, other.coeffs)

    def __hash__(self):
        return hash((self.lead_exp, self.coeffs))

    def __repr__(self):
        return f"FracQSeries({self.lead_exp!s}, [{', '.join(map(str, self.coeffs[:6]))}{', ...' if self.order > 6 else ''}], order={self.order})"

    def __str__(self):
        return format_series(self)

    def __add__(self, other):
        return qs_add(self, _coerce(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return qs_add(self, qs_neg(_coerce(other, self)))

    def __rsub__(self, other):
        return qs_add(_coerce(other, self), qs_neg(self))

    def __neg__(self):
        return qs_neg(self)

    def __mul__(self, other):
        if isinstance(other, FracQSeries):
            return qs_mul(self, other)
        return qs_scale(self, other)

    def __rmul__(self, other):
        return qs_scale(self, other)

    def __truediv__(self, other):
        if isinstance(other, FracQSeries):
            return qs_mul(self, qs_inv(other))
        return qs_scale(self, 1 / _frac(other))

    def __pow__(self, r: int):
        return qs_pow(self, r)


def _coerce(x, like: FracQSeries) -> FracQSeries:
    if isinstance(x, FracQSeries):
        return x
    x = _frac(x)
    if x == 0:
        return FracQSeries.zero()
    # constants inherit the absolute precision of the series they meet
    prec = like.precision
    if prec is None or prec <= 0:
        raise ValueError("cannot add a constant to a series without known q^0 range")
    return FracQSeries(0, [x], int(prec) if prec.denominator == 1 else int(prec) + 1)


def _shift_class(a: FracQSeries, b: FracQSeries) -> int:
    d = a.lead_exp - b.lead_exp
    if d.denominator != 1:
        raise ValueError(f"exponent classes differ: {a.lead_exp} vs {b.lead_exp}")
    return int(d)


def qs_neg(a: FracQSeries) -> FracQSeries:
    return FracQSeries(a.lead_exp, [-c for c in a.coeffs])


def qs_scale(a: FracQSeries, c) -> FracQSeries:
    c = _frac(c)
    if c == 0 or a.is_zero:
        return FracQSeries.zero()
    return FracQSeries(a.lead_exp, [c * x for x in a.coeffs])


def qs_add(a: FracQSeries, b: FracQSeries) -> FracQSeries:
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    _shift_class(a, b)
    lo = min(a.lead_exp, b.lead_exp)
    prec = min(a.precision, b.precision)
    n = prec - lo
    if n.denominator != 1:
        raise ValueError(f"exponent classes differ: {a.lead_exp} vs {b.lead_exp}")
    n = int(n)
    out = [Fraction(0)] * n
    for s in (a, b):
        off = int(s.lead_exp - lo)
        for i, c in enumerate(s.coeffs):
            j = off + i
            if j >= n:
                break
            out[j] += c
    return FracQSeries(lo, out, n)


def qs_sub(a: FracQSeries, b: FracQSeries) -> FracQSeries:
    return qs_add(a, qs_neg(b))


def qs_mul(a: FracQSeries, b: FracQSeries) -> FracQSeries:
    if a.is_zero or b.is_zero:
        return FracQSeries.zero()
    n = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(n):
        s = Fraction(0)
        for i in range(k + 1):
            x = ac[i]
            if x:
                y = bc[k - i]
                if y:
                    s += x * y
        out.append(s)
    return FracQSeries(a.lead_exp + b.lead_exp, out, n)


def qs_inv(a: FracQSeries) -> FracQSeries:
    if a.is_zero:
        raise ZeroDivisionError("division by zero series")
    c = a.coeffs
    n = a.order
    inv0 = 1 / c[0]
    out = [inv0]
    for k in range(1, n):
        s = Fraction(0)
        for i in range(1, k + 1):
            if c[i]:
                s += c[i] * out[k - i]
        out.append(-s * inv0)
    return FracQSeries(-a.lead_exp, out, n)


def qs_pow(a: FracQSeries, r: int) -> FracQSeries:
    r = int(r)
    if r < 0:
        return qs_pow(qs_inv(a), -r)
    if r == 0:
        if a.is_zero:
            return FracQSeries.constant(1, 1)
        return FracQSeries(0, [1], a.order)
    result = None
    base = a
    while r:
        if r & 1:
            result = base if result is None else qs_mul(result, base)
        r >>= 1
        if r:
            base = qs_mul(base, base)
    return result


def qs_rescale(a: FracQSeries, m: int) -> FracQSeries:
    """``a(m tau)``: substitute ``q -> q^m``."""
    m = int(m)
    if m <= 0:
        raise ValueError("rescale factor must be a positive integer")
    if a.is_zero or m == 1:
        return a
    out = [Fraction(0)] * (m * a.order)
    for i, c in enumerate(a.coeffs):
        out[m * i] = c
    return FracQSeries(m * a.lead_exp, out, m * a.order)


def qs_eval(a: FracQSeries, tau: complex, min_im: float = MIN_EVAL_IM) -> tuple[complex, float]:
    """Evaluate at ``q = exp(2 pi i tau)``; returns ``(value, |last term|)``.

    ``min_im`` guards the truncation; callers that evaluate closer to the real
    axis must carry enough coefficients themselves.
    """
    tau = complex(tau)
    if tau.imag < min_im:
        raise EvaluationRegionError("evaluation region too close to real axis for truncation guarantee")
    if a.is_zero:
        return 0j, 0.0
    q = cmath.exp(2j * cmath.pi * tau)
    total = 0j
    qn = 1 + 0j
    last = 0.0
    for c in a.coeffs:
        term = float(c) * qn
        total += term
        last = abs(term)
        qn *= q
    lead = cmath.exp(2j * cmath.pi * tau * float(a.lead_exp))
    return total * lead, last * abs(lead)


# -- serialization ------------------------------------------------------------

def _fstr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def qs_to_json(a: FracQSeries) -> dict:
    return {
        "lead_exp": _fstr(a.lead_exp),
        "coeffs": [_fstr(c) for c in a.coeffs],
        "order": a.order,
    }


def qs_from_json(obj) -> FracQSeries:
    if isinstance(obj, str):
        obj = json.loads(obj)
    coeffs = [Fraction(c) for c in obj["coeffs"]]
    order = int(obj["order"])
    if order != len(coeffs):
        raise ValueError("order does not match number of coefficients")
    return FracQSeries(Fraction(obj["lead_exp"]), coeffs, order)


def format_series(a: FracQSeries, max_terms: int | None = None) -> str:
    """Human-readable ``q^(e) * (a0 + a1 q + ...)``."""
    if a.is_zero:
        return "0"
    terms = []
    cs = a.coeffs if max_terms is None else a.coeffs[:max_terms]
    for n, c in enumerate(cs):
        if c == 0:
            continue
        mon = "" if n == 0 else ("q" if n == 1 else f"q^{n}")
        if mon and c in (1, -1):
            body = mon if c == 1 else "-" + mon
        else:
            body = f"{c}{'*' + mon if mon else ''}"
        terms.append(body)
    inner = " + ".join(terms).replace("+ -", "- ")
    return f"q^({a.lead_exp}) * ({inner} + O(q^{a.order}))"


def series_from_ints(lead_exp, coeffs: Sequence[int]) -> FracQSeries:
    return FracQSeries(lead_exp, coeffs, len(coeffs))
