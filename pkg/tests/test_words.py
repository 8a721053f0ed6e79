from fractions import Fraction

import pytest

from onepoint.words import BracketWord, HeisenbergContext, Tail, identity_gram, pairing


def test_pairing():
    g = identity_gram(3)
    assert [[pairing(a, b, g) for b in g] for a in g] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert pairing((1,), (2,), ((2,),)) == 4
    with pytest.raises(ValueError):
        pairing((1, 0), (1,), ((2,),))


def test_word_from_colors():
    w = BracketWord.from_colors([(1, 2), (2, 1)], 2, Tail("g", (2, 0)))
    assert w.factors == (((1, 0), 2), ((0, 1), 1))
    assert w.p == 2 and w.weight == 3 and w.indices == [2, 1]
    assert str(w) == "h(1,0)[-2] h(0,1)[-1] | g(2,0)"
    assert w.drop(0).factors == (((0, 1), 1),)
    assert w.with_tail(Tail()).tail.kind == "vacuum"


def test_rational_coordinates():
    w = BracketWord(((("1/2", 1), 1),))
    assert w.vectors == [(Fraction(1, 2), Fraction(1))]


@pytest.mark.parametrize("bad", [
    lambda: BracketWord((((1,), 0),)),
    lambda: BracketWord.from_colors([(2, 1)], 1),
    lambda: BracketWord((((1,), 1),), Tail("f", (1, 0))),
    lambda: Tail("f", (0,)),
    lambda: Tail("g"),
    lambda: Tail("vacuum", (1,)),
    lambda: Tail("x", (1,)),
])
def test_validation(bad):
    with pytest.raises(ValueError):
        bad()


def test_context(A1):
    ctx = HeisenbergContext.for_lattice(A1)
    assert ctx.rank == 1 and ctx.pair((1,), (1,)) == 2
    assert HeisenbergContext.heisenberg(2).gram == ((1, 0), (0, 1))
    with pytest.raises(ValueError):
        HeisenbergContext.heisenberg(0)
