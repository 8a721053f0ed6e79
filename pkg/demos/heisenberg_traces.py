"""Compute a few 1-point functions on the rank-1 Heisenberg algebra three ways."""
from onepoint import HeisenbergContext, closed_form_trace, format_series, oracle_trace, zhu_recurse_untwisted
from onepoint.cli import parse_state

ORDER = 10
ctx = HeisenbergContext.heisenberg(1)

for expr in ["h1[-1] h1[-1]", "h1[-3] h1[-1]", "h1[-2] h1[-2] h1[-1] h1[-1]"]:
    word = parse_state(expr, 1)
    closed = closed_form_trace(word, "M", ctx, ORDER)
    recursed = zhu_recurse_untwisted(word, "M", ctx, ORDER)
    counted = oracle_trace(word, "M", ctx, ORDER)
    print(f"{expr:28s} {format_series(closed)}")
    print(f"{'':28s} recursion agrees: {recursed == closed}, oracle agrees: {counted == closed}")
