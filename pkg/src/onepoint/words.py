"""Square-bracket words h_{v1}[-n1] ... h_{vp}[-np] applied to a tail state."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import EvenLattice

__all__ = ["Tail", "BracketWord", "HeisenbergContext", "pairing", "identity_gram", "VACUUM"]


def identity_gram(k: int) -> tuple:
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


def pairing(v: Sequence, w: Sequence, gram: Sequence[Sequence[int]]) -> Fraction:
    """``v^T G w``."""
    if len(v) != len(gram) or len(w) != len(gram):
        raise ValueError("dimension mismatch")
    total = Fraction(0)
    for i, vi in enumerate(v):
        if vi:
            total += vi * sum(gram[i][j] * wj for j, wj in enumerate(w) if wj)
    return total


@dataclass(frozen=True)
class Tail:
    """``kind`` is one of vacuum, f, g, e; ``alpha`` is None for the vacuum."""

    kind: str = "vacuum"
    alpha: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("vacuum", "f", "g", "e"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == "vacuum":
            if self.alpha is not None:
                raise ValueError("vacuum tail carries no lattice vector")
            return
        if self.alpha is None:
            raise ValueError(f"{self.kind} tail needs a lattice vector")
        a = tuple(int(x) for x in self.alpha)
        if self.kind in ("f", "g") and not any(a):
            raise ValueError("f/g tails need a nonzero lattice vector")
        object.__setattr__(self, "alpha", a)

    def __str__(self):
        if self.kind == "vacuum":
            return "1"
        return f"{self.kind}({','.join(map(str, self.alpha))})"


VACUUM = Tail()


@dataclass(frozen=True)
class BracketWord:
    factors: tuple  # ((vector, n), ...) with vector a tuple of Fractions
    tail: Tail = VACUUM

    def __post_init__(self):
        fs = []
        for v, n in self.factors:
            n = int(n)
            if n < 1:
                raise ValueError(f"square-bracket index must be negative; got h[{-n}]")
            fs.append((tuple(Fraction(x) for x in v), n))
        ranks = {len(v) for v, _ in fs}
        if self.tail.alpha is not None:
            ranks.add(len(self.tail.alpha))
        if len(ranks) > 1:
            raise ValueError("factors and tail have inconsistent ranks")
        object.__setattr__(self, "factors", tuple(fs))

    @classmethod
    def from_colors(cls, pairs: Sequence[tuple[int, int]], rank: int, tail: Tail = VACUUM) -> "BracketWord":
        """Build from ``(color, n)`` pairs, colors numbered from 1."""
        fs = []
        for color, n in pairs:
            if not 1 <= color <= rank:
                raise ValueError(f"color {color} out of range 1..{rank}")
            fs.append((tuple(int(i == color - 1) for i in range(rank)), n))
        return cls(tuple(fs), tail)

    @property
    def p(self) -> int:
        return len(self.factors)

    @property
    def weight(self) -> int:
        """Total square-bracket weight sum n_j (ignores the tail)."""
        return sum(n for _, n in self.factors)

    @property
    def vectors(self) -> list:
        return [v for v, _ in self.factors]

    @property
    def indices(self) -> list[int]:
        return [n for _, n in self.factors]

    def drop(self, j: int) -> "BracketWord":
        return BracketWord(self.factors[:j] + self.factors[j + 1:], self.tail)

    def with_tail(self, tail: Tail) -> "BracketWord":
        return BracketWord(self.factors, tail)

    def __str__(self):
        parts = []
        for v, n in self.factors:
            parts.append(f"h({','.join(map(str, v))})[-{n}]")
        s = " ".join(parts) or "1"
        if self.tail.kind != "vacuum":
            s += f" | {self.tail}"
        return s


@dataclass(frozen=True)
class HeisenbergContext:
    """Rank and bilinear form for the oscillators, plus an optional lattice."""

    gram: tuple
    lattice: EvenLattice | None = None

    @classmethod
    def heisenberg(cls, k: int) -> "HeisenbergContext":
        if k < 1:
            raise ValueError("rank must be positive")
        return cls(identity_gram(k))

    @classmethod
    def for_lattice(cls, L: EvenLattice) -> "HeisenbergContext":
        return cls(L.gram, L)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, v, w) -> Fraction:
        return pairing(v, w, self.gram)
