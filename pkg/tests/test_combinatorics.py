from math import prod

import pytest

from onepoint.combinatorics import Involution, all_involutions, fixed_point_free_involutions, subsets

TELEPHONE = [1, 1, 2, 4, 10, 26, 76, 232, 764]


def double_factorial_odd(n):
    return prod(range(1, n, 2)) if n else 1


def test_four_points():
    pairs = [inv.pairs for inv in fixed_point_free_involutions([1, 2, 3, 4])]
    assert pairs == [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]


def test_odd_and_empty():
    assert fixed_point_free_involutions([1, 2, 3]) == []
    assert fixed_point_free_involutions([]) == [Involution((), ())]


@pytest.mark.parametrize("n", range(0, 11, 2))
def test_matching_counts(n):
    invs = fixed_point_free_involutions(range(n))
    assert len(invs) == double_factorial_odd(n)
    assert len(set(invs)) == len(invs)
    for inv in invs:
        assert all(inv(inv(i)) == i and inv(i) != i for i in range(n))


@pytest.mark.parametrize("n", range(9))
def test_involution_counts_are_telephone_numbers(n):
    invs = all_involutions(range(n))
    assert len(invs) == TELEPHONE[n]
    assert all(inv.domain == frozenset(range(n)) for inv in invs)


def test_compose_is_identity_for_self():
    inv = all_involutions(range(5))[7]
    assert inv.compose(inv) == {i: i for i in range(5)}


def test_subsets():
    assert len(subsets([1, 2])) == 4
    assert subsets([]) == [()]
    sizes = [len(s) for s in subsets([1, 2, 3])]
    assert [sizes.count(r) for r in range(4)] == [1, 3, 3, 1]
