from fractions import Fraction
from itertools import product
from math import comb, factorial

import pytest

from onepoint.fockoracle import (
    FockVector,
    ModeTransportTable,
    OracleError,
    apply_round_mode,
    apply_square_mode,
    build_square_state,
    enumerate_basis,
    graded_trace,
    key_weight,
    lattice_vertex_zero_mode,
    literal_trace,
    oracle_trace,
    transport_coefficient,
    zero_mode_apply,
    zero_mode_matrix,
)
from onepoint.modforms import character, eisenstein_E, eta_quotient
from onepoint.qseries import FracQSeries, qs_add, qs_mul
from onepoint.verify import compare_series
from onepoint.words import BracketWord, HeisenbergContext, Tail


H1 = HeisenbergContext.heisenberg(1)
H2 = HeisenbergContext.heisenberg(2)
VAC1 = FockVector.basis(((), (0,)))


def stirling_first(n, k):
    """Signed Stirling numbers of the first kind by the standard recurrence."""
    s = [[0] * (n + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for i in range(n):
        for j in range(1, i + 2):
            s[i + 1][j] = s[i][j - 1] - i * s[i][j]
    return s[n][k]


def word(pairs, rank=1, tail=Tail()):
    return BracketWord.from_colors(pairs, rank, tail)


class TestBasis:
    def test_partition_counts(self):
        b = enumerate_basis(H1, "M", 4)
        assert [len(b[w]) for w in range(5)] == [1, 1, 2, 3, 5]

    def test_even_part_counts(self):
        b = enumerate_basis(H1, "Mplus", 4)
        assert [len(b[w]) for w in range(5)] == [1, 0, 1, 1, 3]

    def test_lattice_low_weights(self, A1):
        b = enumerate_basis(HeisenbergContext.for_lattice(A1), "VL", 1)
        assert b[0] == [((), (0,))]
        assert sorted(b[1]) == sorted([(((1, 0),), (0,)), ((), (1,)), ((), (-1,))])

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_counts_match_characters(self, k):
        ctx = HeisenbergContext.heisenberg(k)
        W = 12 if k < 3 else 9
        for alg in ("M", "Mplus", "Mminus"):
            b = enumerate_basis(ctx, alg, W)
            counts = [len(b[w]) for w in range(W + 1)]
            assert FracQSeries(Fraction(-k, 24), counts) == character(alg, k, W + 1)

    def test_symmetrized_basis_is_t_invariant(self, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        for entries in enumerate_basis(ctx, "VLplus", 5).values():
            for rep, vec in entries:
                flipped = FockVector()
                for (modes, a), c in vec.items():
                    flipped.add_term((modes, tuple(-x for x in a)), c * (-1) ** len(modes))
                assert flipped == vec

    def test_unknown_algebra(self):
        with pytest.raises(OracleError):
            enumerate_basis(H1, "W", 2)


class TestRoundModes:
    def test_annihilate_after_create(self):
        x = apply_round_mode((1,), -1, VAC1, H1)
        assert apply_round_mode((1,), 1, x, H1) == VAC1

    def test_zero_mode_on_lattice_vector(self, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        e = FockVector.basis(((), (2,)))
        assert apply_round_mode((1,), 0, e, ctx) == e.scale(4)

    def test_truncation(self):
        x = apply_round_mode((1,), -1, VAC1, H1)
        assert not apply_round_mode((1,), 2, x, H1)

    def test_commutator_on_all_weight_6_states(self):
        for ctx in (H1, H2):
            basis = [k for ks in enumerate_basis(ctx, "M", 6).values() for k in ks]
            vs = [(1,) + (0,) * (ctx.rank - 1), (0,) * (ctx.rank - 1) + (1,)]
            for v, w in product(vs, repeat=2):
                for m, n in product(range(-3, 4), repeat=2):
                    for key in basis:
                        x = FockVector.basis(key)
                        lhs = apply_round_mode(v, m, apply_round_mode(w, n, x, ctx), ctx) + \
                            apply_round_mode(w, n, apply_round_mode(v, m, x, ctx), ctx).scale(-1)
                        expect = x.scale(m * ctx.pair(v, w)) if m + n == 0 else FockVector()
                        assert lhs == expect


class TestTransport:
    def test_row_minus_one(self):
        table = ModeTransportTable()
        assert [table(-1, j) for j in range(-1, 4)] == [1, Fraction(1, 2), Fraction(-1, 12), Fraction(1, 24),
                                                         Fraction(-19, 720)]

    def test_stirling(self):
        # (log(1+z))^m = m! sum_i s(i, m) z^i / i!
        for m in range(0, 9):
            for i in range(m, 13):
                assert transport_coefficient(m, i) == Fraction(factorial(m) * stirling_first(i, m), factorial(i))

    def test_binomial_identity(self):
        # sum_m n^m/m! h[m] = sum_i binom(n, i) h(i) for a weight-one h
        for n in range(0, 13):
            for j in range(0, 13):
                lhs = sum(Fraction(n ** m, factorial(m)) * transport_coefficient(m, j) for m in range(j + 1))
                assert lhs == comb(n, j)

    def test_below_diagonal_is_zero(self):
        assert transport_coefficient(3, 2) == 0
        assert ModeTransportTable().row(2, 4)[0] == (2, 1)


class TestSquareModes:
    @pytest.mark.parametrize("ctx_name", ["H1", "H2", "A1"])
    def test_commutation_relations(self, ctx_name, A1):
        ctx = {"H1": H1, "H2": H2, "A1": HeisenbergContext.for_lattice(A1)}[ctx_name]
        alg = "VL" if ctx.lattice else "M"
        basis = [k for ks in enumerate_basis(ctx, alg, 6).values() for k in ks]
        vs = [tuple(int(i == c) for i in range(ctx.rank)) for c in range(ctx.rank)]
        for v, w in product(vs, repeat=2):
            for m, n in product(range(-3, 4), repeat=2):
                for key in basis:
                    x = FockVector.basis(key)
                    lhs = apply_square_mode(v, m, apply_square_mode(w, n, x, ctx), ctx) + \
                        apply_square_mode(w, n, apply_square_mode(v, m, x, ctx), ctx).scale(-1)
                    expect = x.scale(m * ctx.pair(v, w)) if m + n == 0 else FockVector()
                    assert lhs == expect, (v, w, m, n, key)

    def test_f_tail(self):
        ctx = HeisenbergContext.heisenberg(1)
        s = build_square_state(BracketWord((), Tail("f", (2,))), ctx)
        assert s == FockVector({((), (2,)): Fraction(1), ((), (-2,)): Fraction(1)})


class TestZeroModes:
    def test_weight_one_trace(self):
        u = apply_round_mode((1,), -1, apply_round_mode((1,), -1, VAC1, H1), H1)
        keys = enumerate_basis(H1, "M", 1)[1]
        mat = zero_mode_matrix(u, H1, keys)
        assert sum(mat.get((k, k), 0) for k in keys) == 2

    def test_block_diagonal(self, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        basis = enumerate_basis(ctx, "VL", 4)
        keys = [k for ks in basis.values() for k in ks]
        u = apply_round_mode((1,), -2, apply_round_mode((1,), -1, FockVector.basis(((), (0,))), ctx), ctx)
        for (row, col), c in zero_mode_matrix(u, ctx, keys).items():
            assert key_weight(row, ctx.gram) == key_weight(col, ctx.gram)

    def test_homogeneity_required(self):
        u = VAC1 + apply_round_mode((1,), -1, VAC1, H1)
        with pytest.raises(OracleError, match="homogeneous"):
            zero_mode_matrix(u, H1, [((), (0,))])

    def test_odd_states_swap_parity(self):
        u = build_square_state(word([(1, 1), (1, 2), (1, 2)]), H1)
        for keys in enumerate_basis(H1, "Mplus", 6).values():
            for key in keys:
                img = zero_mode_apply(u, FockVector.basis(key), H1)
                assert all(len(m) % 2 == 1 for (m, _), _ in img.items())

    def test_lattice_vertex_moves_sector(self, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        keys = [k for ks in enumerate_basis(ctx, "VL", 3).values() for k in ks]
        mat = lattice_vertex_zero_mode(BracketWord((), Tail("e", (2,))), ctx, keys)
        assert mat and all(r[1][0] == c[1][0] + 2 for (r, c) in mat)
        with pytest.raises(OracleError):
            lattice_vertex_zero_mode(BracketWord(()), ctx, keys)


class TestTraces:
    def test_identity_on_M(self):
        t = graded_trace(lambda x: x, "M", H1, 4)
        assert t == FracQSeries(Fraction(-1, 24), [1, 1, 2, 3, 5])

    def test_identity_on_VL_plus(self, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        assert graded_trace(lambda x: x, "VLplus", ctx, 8) == character("VL+", A1, 9)

    def test_zero_operator(self):
        assert graded_trace(lambda x: FockVector(), "M", H1, 4).is_zero

    def test_M_splits_into_eigenspaces(self):
        w = word([(1, 1), (1, 1), (2, 3)], 2)
        parts = [literal_trace(w, a, H2, 6) for a in ("M", "Mplus", "Mminus")]
        assert parts[0] == qs_add(parts[1], parts[2])

    def test_E2_over_eta(self):
        expect = qs_mul(eisenstein_E(2, 20), eta_quotient([(1, -1)], 20))
        assert oracle_trace(word([(1, 1), (1, 1)]), "M", H1, 20) == expect
        assert literal_trace(word([(1, 1), (1, 1)]), "M", H1, 8) == expect.truncate(9)

    @pytest.mark.parametrize("pairs,rank,algebra", [
        ([(1, 1), (1, 3)], 1, "M"),
        ([(1, 2), (1, 1), (1, 1)], 1, "M"),
        ([(1, 1), (2, 1)], 2, "Mplus"),
        ([(1, 2), (1, 2)], 1, "Mplus"),
        ([(1, 1), (1, 1), (1, 2)], 1, "Mminus"),
    ])
    def test_level_engine_matches_matrices(self, pairs, rank, algebra):
        ctx = HeisenbergContext.heisenberg(rank)
        w = word(pairs, rank)
        assert compare_series(oracle_trace(w, algebra, ctx, 8), literal_trace(w, algebra, ctx, 7)).equal

    @pytest.mark.parametrize("pairs,tail,algebra", [
        ([(1, 1)], Tail(), "VL"),
        ([(1, 1), (1, 1)], Tail(), "VLplus"),
        ([(1, 2), (1, 2)], Tail(), "VL"),
        ([], Tail("f", (2,)), "VLplus"),
        ([(1, 1)], Tail("g", (2,)), "VLplus"),
        ([(1, 1), (1, 1)], Tail("f", (2,)), "VLplus"),
    ])
    def test_lattice_level_engine_matches_matrices(self, pairs, tail, algebra, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        w = word(pairs, 1, tail)
        assert compare_series(oracle_trace(w, algebra, ctx, 6), literal_trace(w, algebra, ctx, 6)).equal

    def test_module_sector(self, A1):
        ctx = HeisenbergContext.for_lattice(A1)
        t = oracle_trace(word([(1, 1)]), "module", ctx, 6, (3,))
        expect = qs_mul(FracQSeries(Fraction(9), [6], 6), eta_quotient([(1, -1)], 6))
        assert t == expect

    def test_unknown_algebra(self):
        with pytest.raises(OracleError):
            oracle_trace(word([]), "W", H1, 3)

