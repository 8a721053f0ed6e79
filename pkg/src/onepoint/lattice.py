"""Even positive-definite lattices, their theta series and the Jacobi-like
forms built from power-weighted theta functions."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial, isqrt
from pathlib import Path
from typing import Callable, Sequence

from .modforms import eisenstein_E
from .qseries import FracQSeries, qs_add, qs_mul, qs_pow, qs_scale

__all__ = [
    "LatticeError",
    "EvenLattice",
    "JacobiLikeForm",
    "lattice_level",
    "enumerate_vectors",
    "theta",
    "theta_vm",
    "theta_weighted",
    "jl_theta",
    "jl_E2exp",
    "jl_mul",
    "jl_unit",
    "load_gram",
]


class LatticeError(ValueError):
    pass


def _det(rows: list[list[Fraction]]) -> Fraction:
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for j in range(c, n):
                    a[r][j] -= f * a[c][j]
    return det


def _inverse(rows) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class EvenLattice:
    """Lattice given by an integral Gram matrix in a fixed basis."""

    gram: tuple
    rank: int = field(init=False)

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        k = len(g)
        if k == 0 or any(len(row) != k for row in g):
            raise LatticeError("gram must be a non-empty square matrix")
        for i in range(k):
            if g[i][i] % 2:
                raise LatticeError(f"diagonal entry {g[i][i]} is odd; lattice is not even")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise LatticeError("gram matrix is not symmetric")
        for s in range(1, k + 1):
            if _det([[Fraction(x) for x in row[:s]] for row in g[:s]]) <= 0:
                raise LatticeError("gram matrix is not positive definite")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "rank", k)

    @classmethod
    def from_json(cls, obj) -> "EvenLattice":
        if isinstance(obj, (str, Path)) and not str(obj).lstrip().startswith("{"):
            obj = json.loads(Path(obj).read_text())
        elif isinstance(obj, str):
            obj = json.loads(obj)
        L = cls(tuple(tuple(r) for r in obj["gram"]))
        if "rank" in obj and int(obj["rank"]) != L.rank:
            raise LatticeError("declared rank does not match gram matrix")
        return L

    def to_json(self) -> dict:
        return {"rank": self.rank, "gram": [list(r) for r in self.gram]}

    def pair(self, v: Sequence, w: Sequence) -> Fraction:
        """``v^T G w`` for coordinate vectors in the lattice basis."""
        if len(v) != self.rank or len(w) != self.rank:
            raise LatticeError("dimension mismatch")
        g = self.gram
        total = Fraction(0)
        for i, vi in enumerate(v):
            if vi:
                row = g[i]
                total += vi * sum(row[j] * wj for j, wj in enumerate(w))
        return Fraction(total)

    def norm(self, v: Sequence) -> Fraction:
        return self.pair(v, v)

    def inverse_gram(self) -> list[list[Fraction]]:
        return _inverse(self.gram)

    def determinant(self) -> int:
        return int(_det([[Fraction(x) for x in r] for r in self.gram]))


def load_gram(path) -> EvenLattice:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LatticeError(f"cannot read gram file {path}: {exc.strerror}") from exc
    try:
        return EvenLattice.from_json(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise LatticeError(f"malformed gram file {path}") from exc


def lattice_level(L: EvenLattice) -> int:
    """Smallest N with N*G^{-1} integral and even on the diagonal."""
    ginv = L.inverse_gram()
    k = L.rank
    bound = 2 * abs(L.determinant())
    for N in range(1, bound + 1):
        ok = True
        for i in range(k):
            for j in range(k):
                x = N * ginv[i][j]
                if x.denominator != 1 or (i == j and x.numerator % 2):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return N
    raise AssertionError("level scan exceeded 2*det; gram matrix inconsistent")


@lru_cache(maxsize=None)
def _vectors(L: EvenLattice, max_norm: int) -> tuple:
    if max_norm < 0:
        raise ValueError("max_norm must be non-negative")
    ginv = L.inverse_gram()
    # x_i^2 <= max_norm * (G^-1)_ii for any x with x^T G x <= max_norm
    bounds = []
    for i in range(L.rank):
        b = max_norm * ginv[i][i]
        bounds.append(isqrt(b.numerator // b.denominator))
    out = []
    for coords in product(*(range(-b, b + 1) for b in bounds)):
        if L.norm(coords) <= max_norm:
            out.append(coords)
    return tuple(out)


def enumerate_vectors(L: EvenLattice, max_norm: int) -> list[tuple[int, ...]]:
    """All lattice vectors (as coordinate tuples) with norm at most ``max_norm``."""
    return list(_vectors(L, int(max_norm)))


def theta_weighted(L: EvenLattice, P: Callable[[tuple], object], order: int) -> FracQSeries:
    """sum_alpha P(alpha) q^{(alpha,alpha)/2} over (alpha,alpha)/2 < order."""
    if order < 1:
        raise ValueError("order must be at least 1")
    coeffs = [Fraction(0)] * order
    for a in _vectors(L, 2 * (order - 1)):
        w = P(a)
        if w:
            coeffs[int(L.norm(a)) // 2] += w
    return FracQSeries(0, coeffs, order)


@lru_cache(maxsize=None)
def theta(L: EvenLattice, order: int) -> FracQSeries:
    return theta_weighted(L, lambda a: 1, order)


def theta_vm(L: EvenLattice, v: Sequence, m: int, order: int) -> FracQSeries:
    """sum_alpha (v, alpha)^m q^{(alpha,alpha)/2}."""
    v = tuple(Fraction(x) for x in v)
    if m == 0:
        return theta(L, order)
    if m % 2:
        return FracQSeries.zero()
    gv = [sum(L.gram[i][j] * v[j] for j in range(L.rank)) for i in range(L.rank)]
    return theta_weighted(L, lambda a: sum(x * y for x, y in zip(gv, a)) ** m, order)


@dataclass(frozen=True)
class JacobiLikeForm:
    """``sum_n coeffs[n] (2 pi i X)^n`` with weight/index carried as metadata."""

    coeffs: tuple
    weight: Fraction
    index: Fraction

    @property
    def x_order(self) -> int:
        return len(self.coeffs)

    def coefficient(self, n: int) -> FracQSeries:
        return self.coeffs[n]


def jl_unit(x_order: int, q_order: int) -> JacobiLikeForm:
    one = FracQSeries(0, [1], q_order)
    return JacobiLikeForm((one,) + (FracQSeries.zero(),) * (x_order - 1), Fraction(0), Fraction(0))


def jl_theta(L: EvenLattice, v: Sequence, x_order: int, q_order: int) -> JacobiLikeForm:
    coeffs = tuple(
        qs_scale(theta_vm(L, v, 2 * m, q_order), Fraction(2 ** m, factorial(2 * m)))
        for m in range(x_order)
    )
    return JacobiLikeForm(coeffs, Fraction(L.rank, 2), L.norm(v))


def jl_E2exp(sign: int, x_order: int, q_order: int, scale=1) -> JacobiLikeForm:
    """exp(scale * E_2 * (-2 pi i * sign * X)), coefficientwise in (2 pi i X)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    scale = Fraction(scale)
    base = qs_scale(eisenstein_E(2, q_order), -sign * scale)
    coeffs = [FracQSeries(0, [1], q_order)]
    for n in range(1, x_order):
        coeffs.append(qs_scale(qs_pow(base, n), Fraction(1, factorial(n))))
    return JacobiLikeForm(tuple(coeffs), Fraction(0), sign * scale)


def jl_mul(a: JacobiLikeForm, b: JacobiLikeForm) -> JacobiLikeForm:
    n = min(a.x_order, b.x_order)
    out = []
    for k in range(n):
        acc = FracQSeries.zero()
        for i in range(k + 1):
            acc = qs_add(acc, qs_mul(a.coeffs[i], b.coeffs[k - i]))
        out.append(acc)
    return JacobiLikeForm(tuple(out), a.weight + b.weight, a.index + b.index)
