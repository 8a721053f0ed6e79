"""Traces on the fixed-point subalgebra of the A1 lattice algebra with a lattice tail."""
from onepoint import EvenLattice, HeisenbergContext, format_series, oracle_trace
from onepoint.cli import parse_state
from onepoint.closedform import falpha_trace, trace_VLplus_lattice_tail

ORDER = 12
L = EvenLattice(((2,),))
ctx = HeisenbergContext.for_lattice(L)

print("Tr o(f_alpha), alpha = 2:", format_series(falpha_trace(L, (2,), ORDER)))
for expr in ["h1[-1] h1[-1] | f(2)", "h1[-2] | g(2)", "h1[-2] h1[-1] h1[-1] | g(2)"]:
    word = parse_state(expr, 1)
    closed = trace_VLplus_lattice_tail(word, L, ORDER)
    print(f"{expr:28s} {format_series(closed)}")
    print(f"{'':28s} oracle agrees: {oracle_trace(word, 'VLplus', ctx, ORDER) == closed}")
