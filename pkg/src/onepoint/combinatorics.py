"""Involutions and subsets of finite index sets, in a canonical order."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

__all__ = ["Involution", "fixed_point_free_involutions", "all_involutions", "subsets"]


@dataclass(frozen=True)
class Involution:
    pairs: tuple[tuple[int, int], ...]
    fixed: tuple[int, ...]

    @property
    def domain(self) -> frozenset:
        return frozenset(self.fixed) | frozenset(i for p in self.pairs for i in p)

    def __call__(self, i: int) -> int:
        for a, b in self.pairs:
            if i == a:
                return b
            if i == b:
                return a
        if i in self.fixed:
            return i
        raise KeyError(i)

    def compose(self, other: "Involution") -> dict[int, int]:
        return {i: self(other(i)) for i in other.domain}


def _matchings(items: tuple) -> list[tuple]:
    if not items:
        return [()]
    first, rest = items[0], items[1:]
    out = []
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for m in _matchings(remaining):
            out.append(((first, partner),) + m)
    return out


def fixed_point_free_involutions(A: Iterable[int]) -> list[Involution]:
    items = tuple(sorted(A))
    if len(items) % 2:
        return []
    return [Involution(m, ()) for m in _matchings(items)]


def all_involutions(A: Iterable[int]) -> list[Involution]:
    items = tuple(sorted(A))
    out = []
    for r in range(len(items) + 1):
        for fixed in combinations(items, r):
            rest = tuple(i for i in items if i not in fixed)
            out.extend(Involution(m.pairs, fixed) for m in fixed_point_free_involutions(rest))
    return out


def subsets(A: Iterable[int]) -> list[tuple[int, ...]]:
    items = tuple(sorted(A))
    return [c for r in range(len(items) + 1) for c in combinations(items, r)]
