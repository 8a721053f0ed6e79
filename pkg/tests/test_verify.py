from fractions import Fraction

import pytest

from onepoint.closedform import g_series
from onepoint.modforms import character, eisenstein_E, eisenstein_F, eta_quotient
from onepoint.qseries import FracQSeries, qs_mul, qs_scale
from onepoint.verify import (
    compare_series,
    enumerate_words,
    g_series_reorganization,
    jacobi_like_coefficient_identity,
    modularity_matrices,
    numeric_modularity_check,
    run_equivalence_suite,
)
from onepoint.words import BracketWord, Tail


class TestCompare:
    def test_equal(self):
        e = eisenstein_E(4, 10)
        assert compare_series(e, e).equal

    def test_first_mismatch(self):
        r = compare_series(eisenstein_E(2, 10), eisenstein_F(2, 10))
        assert not r.equal and r.first_mismatch == 1

    def test_shared_order(self):
        assert compare_series(eta_quotient([(1, -1)], 12), character("M", 1, 20)).equal

    def test_no_overlap(self):
        with pytest.raises(ValueError, match="no comparable range"):
            compare_series(FracQSeries(0, [1], 2), FracQSeries(5, [1], 2))

    def test_exponent_classes_differ(self):
        assert not compare_series(FracQSeries(0, [1], 4), FracQSeries(Fraction(1, 2), [1], 4)).equal

    def test_exact_zeros(self):
        assert compare_series(FracQSeries.zero(), FracQSeries.zero()).equal


def test_word_enumeration_counts():
    # rank 1: partitions of 0..4 -> 1 + 1 + 2 + 3 + 5
    assert len(enumerate_words(1, 4)) == 12
    assert all(w.p % 2 == 0 for w in enumerate_words(2, 6, 0))
    tails = enumerate_words(1, 3, 1, Tail("g", (2,)))
    assert all(w.tail.kind == "g" for w in tails)


class TestSuites:
    def test_heisenberg(self):
        r = run_equivalence_suite("heisenberg", rank=1, max_weight=6, order=20)
        assert r.passed
        assert any(c.description == "M h(1)[-1] h(1)[-3]" for c in r.cases)

    def test_heisenberg_plus_includes_identity(self):
        r = run_equivalence_suite("heisenberg-plus", rank=1, max_weight=4, order=12)
        assert r.passed and r.cases[0].description == "Mplus 1"

    def test_lattice_tail(self, A1):
        r = run_equivalence_suite("lattice-plus-tail", lattice=A1, max_weight=3, order=10)
        assert r.passed and len(r.cases) > 4

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_equivalence_suite("nope")

    def test_report_json(self):
        r = run_equivalence_suite("heisenberg", rank=1, max_weight=2, order=5)
        js = r.to_json()
        assert js["passed"] and js["suite"] == "heisenberg" and len(js["cases"]) == 4


class TestJacobiLike:
    def test_zero_control(self, A1):
        r = jacobi_like_coefficient_identity(A1, (1,), 4, [FracQSeries.zero()] * 5, 10)
        assert r.passed

    def test_random_controls(self, A1, A2):
        import random

        rng = random.Random(7)
        e4, e6 = eisenstein_E(4, 12), eisenstein_E(6, 12)
        fs = [qs_scale(e4, rng.randint(-5, 5)) + qs_scale(e6, rng.randint(-5, 5)) for _ in range(5)]
        assert jacobi_like_coefficient_identity(A1, (1,), 4, fs, 12).passed
        assert jacobi_like_coefficient_identity(A2, (1, 1), 3, fs, 12).passed

    def test_reorganization(self, A1):
        for w in enumerate_words(1, 6):
            lhs, rhs = g_series_reorganization(w, A1, 12)
            assert compare_series(lhs, rhs).equal, str(w)

    def test_reorganization_detects_a_wrong_constant(self, A1):
        w = BracketWord.from_colors([(1, 1)] * 4, 1)
        lhs, rhs = g_series_reorganization(w, A1, 10)
        assert not compare_series(lhs, qs_scale(rhs, 2)).equal

    def test_reorganization_needs_rank_one(self, A2):
        with pytest.raises(ValueError):
            g_series_reorganization(BracketWord.from_colors([(1, 1)], 2), A2, 5)


class TestModularity:
    def test_matrices_in_gamma0(self):
        for N in (1, 2, 4):
            for a, b, c, d in modularity_matrices(N):
                assert a * d - b * c == 1 and c % N == 0 and max(map(abs, (a, b, c, d))) <= 50

    def test_E4_E6(self):
        assert numeric_modularity_check(eisenstein_E(4, 40), 4, 1).passed
        assert numeric_modularity_check(eisenstein_E(6, 40), 6, 1).passed

    def test_wrong_weight_fails(self):
        assert not numeric_modularity_check(eisenstein_E(4, 40), 6, 1).passed

    def test_quasimodular_E2(self):
        e2 = eisenstein_E(2, 40)
        assert not numeric_modularity_check(e2, 2, 1).passed
        assert numeric_modularity_check(e2, 2, 1, correction=FracQSeries(0, [1], 40)).passed

    def test_E2_over_eta_needs_correction(self):
        inv = eta_quotient([(1, -1)], 40)
        f = qs_mul(eisenstein_E(2, 40), inv)
        assert not numeric_modularity_check(f, Fraction(3, 2), 1).passed
        assert numeric_modularity_check(f, Fraction(3, 2), 1, correction=inv).passed

    def test_g_series(self, A1):
        g = g_series(BracketWord.from_colors([(1, 1), (1, 1)], 1), A1, 40)
        assert numeric_modularity_check(g, 2, 4).passed

    def test_region_guard(self):
        with pytest.raises(ValueError, match="too close to real axis"):
            numeric_modularity_check(eisenstein_E(4, 40), 4, 1, matrices=[(1, 0, 9, 1)])

    def test_non_member_rejected(self):
        with pytest.raises(ValueError):
            numeric_modularity_check(eisenstein_E(4, 40), 4, 2, matrices=[(1, 0, 1, 1)])
