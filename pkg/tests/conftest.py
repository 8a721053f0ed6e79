from fractions import Fraction

import pytest

from onepoint.lattice import EvenLattice


def partition_counts(n_max: int, parts_parity: int | None = None, colors: int = 1) -> list[int]:
    """Brute-force colored partition counts by recursive enumeration.

    With ``parts_parity`` set, only partitions whose number of parts has that
    parity are counted.
    """
    letters = [(n, c) for n in range(1, n_max + 1) for c in range(colors)]
    counts = [0] * (n_max + 1)

    def walk(i, left, nparts):
        w = n_max - left
        if parts_parity is None or nparts % 2 == parts_parity:
            counts[w] += 1
        for j in range(i, len(letters)):
            n = letters[j][0]
            if n > left:
                break
            walk(j, left - n, nparts + 1)

    walk(0, n_max, 0)
    return counts


@pytest.fixture(scope="session")
def A1():
    return EvenLattice(((2,),))


@pytest.fixture(scope="session")
def A2():
    return EvenLattice(((2, -1), (-1, 2)))


def F(*xs):
    return [Fraction(x) for x in xs]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
