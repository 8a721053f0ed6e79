"""Numerically test modular transformation laws of G-series and Eisenstein series."""
from onepoint import EvenLattice, eisenstein_E
from onepoint.closedform import g_series
from onepoint.cli import parse_state
from onepoint.qseries import FracQSeries
from onepoint.verify import numeric_modularity_check

ORDER = 40
L = EvenLattice(((2,),))

print(numeric_modularity_check(eisenstein_E(4, ORDER), 4, 1, label="E_4").summary())
print("E_2 uncorrected:", numeric_modularity_check(eisenstein_E(2, ORDER), 2, 1, label="E_2").summary())
corrected = numeric_modularity_check(eisenstein_E(2, ORDER), 2, 1, correction=FracQSeries(0, [1], ORDER), label="E_2")
print("E_2 corrected:  ", corrected.summary())

word = parse_state("h1[-1] h1[-1]", 1)
print("G(h[-1]^2) on A1:", numeric_modularity_check(g_series(word, L, ORDER), 2, 4, label="G").summary())
