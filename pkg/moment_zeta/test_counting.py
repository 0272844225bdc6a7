"""Test suite for the Point Counting module."""

import unittest
from fractions import Fraction

import pytest

from arithmetic_core.charsums import build_char_table, build_gauss_table
from arithmetic_core.errors import CapExceeded, HypothesisViolated, Mismatch, WorkCapExceeded
from arithmetic_core.exactalg import charpoly_power_sum
from arithmetic_core.ffield import build_field
from moment_zeta.config import RunConfig
from moment_zeta.counting import (
    S_triv,
    bad_parameters,
    bruteforce_all_fibers,
    collect_frobenius_data,
    count_all_fibers,
    count_bruteforce,
    count_from_trace,
    count_gauss,
    count_gauss_zero,
    det_value,
    fiber_charpoly,
    fiber_kind,
    frob_trace,
    moment_counts,
    trace_sum,
)


def _build_dummy_config():
    return RunConfig(cache_dir=None)


def _gauss(ctx):
    return build_gauss_table(build_char_table(ctx))


class TestFiberCounts(unittest.TestCase):
    """Single-fibre counts by enumeration and Gauss sums."""

    def test_small_example(self):
        ctx = build_field(3, 1)
        self.assertEqual(count_bruteforce(ctx, 2, 2).N, 3)
        self.assertEqual(count_gauss(ctx, _gauss(ctx), 2, 2).N, 3)

    def test_field_of_two(self):
        ctx = build_field(2, 1)
        self.assertEqual(count_bruteforce(ctx, 2, 1).N, 1)
        self.assertEqual(count_gauss(ctx, _gauss(ctx), 2, 1).N, 1)

    def test_zero_fibre(self):
        ctx = build_field(5, 1)
        self.assertEqual(count_bruteforce(ctx, 4, 0).N, 51)
        self.assertEqual(count_gauss_zero(ctx, _gauss(ctx), 4).N, 51)

    def test_counts_independent_of_character(self):
        # prime-field constants have the same code in every construction
        seen = set()
        for seed in (0, 1, 2):
            ctx = build_field(3, 2, seed=seed, cache_dir=None)
            gt = _gauss(ctx)
            counts = (count_gauss_zero(ctx, gt, 2).N,) + tuple(count_gauss(ctx, gt, 2, lam).N for lam in (1, 2))
            self.assertEqual(counts[1], count_bruteforce(ctx, 2, 1).N)
            seen.add(counts)
        self.assertEqual(len(seen), 1)

    def test_gauss_needs_nonzero_lambda(self):
        ctx = build_field(5, 1)
        with self.assertRaises(ValueError):
            count_gauss(ctx, _gauss(ctx), 2, 0)

    def test_gauss_matches_enumeration(self):
        for p, m, n in [(7, 1, 2), (5, 1, 3), (3, 2, 2), (2, 3, 3)]:
            ctx = build_field(p, m)
            gt = _gauss(ctx)
            for code in range(1, ctx.q):
                self.assertEqual(count_gauss(ctx, gt, n, code).N, count_bruteforce(ctx, n, code).N)

    def test_all_fibres_at_once(self):
        for p, m, n in [(7, 1, 2), (3, 2, 3), (2, 3, 2)]:
            ctx = build_field(p, m)
            gt = _gauss(ctx)
            brute = bruteforce_all_fibers(ctx, n)
            self.assertEqual([int(x) for x in count_all_fibers(ctx, gt, n)], [int(x) for x in brute])
            self.assertEqual([int(x) for x in count_all_fibers(ctx, gt, n, fft_threshold=1)],
                             [int(x) for x in brute])

    def test_work_cap(self):
        with self.assertRaises(WorkCapExceeded):
            count_bruteforce(build_field(7, 1), 3, 1, work_cap=100)


class TestFibreKinds(unittest.TestCase):
    """Singular parameters and traces."""

    def setUp(self):
        self.f7 = build_field(7, 1)

    def test_bad_parameters(self):
        self.assertEqual(bad_parameters(self.f7, 2), [3, 5, 6])
        self.assertEqual(fiber_kind(self.f7, 2, 3), "bad")
        self.assertEqual(fiber_kind(self.f7, 2, 1), "good")

    def test_wild_zero_fibre(self):
        f3 = build_field(3, 1)
        self.assertEqual(bad_parameters(f3, 2), [0])
        self.assertEqual(fiber_kind(f3, 2, 0), "zero_fiber_wild")

    def test_trace_round_trip(self):
        self.assertEqual(S_triv(2, 7), 7)
        self.assertEqual(frob_trace(2, 3, 3), -2)
        for N in range(20):
            self.assertEqual(count_from_trace(3, 5, frob_trace(3, 5, N)), N)

    def test_determinant(self):
        self.assertEqual(det_value(self.f7, 2, 1, 7), 7)
        self.assertEqual(abs(det_value(self.f7, 3, 1, 7)), 7 ** 3)


class TestFrobeniusData(unittest.TestCase):
    """Characteristic polynomials of Frobenius at single fibres."""

    def setUp(self):
        self.f7 = build_field(7, 1)
        self.counts = bruteforce_all_fibers(self.f7, 2)

    def test_good_fibre(self):
        fd = fiber_charpoly(self.f7, 2, 1, [int(self.counts[1])])
        self.assertEqual(fd.kind, "good")
        self.assertEqual(fd.cp.degree, 2)
        self.assertEqual(fd.cp.coeffs[2], 7)
        self.assertEqual(-fd.cp.coeffs[1], frob_trace(2, 7, int(self.counts[1])))

    def test_bad_fibre_has_rank_one(self):
        fd = fiber_charpoly(self.f7, 2, 3, [int(self.counts[3])])
        self.assertEqual(fd.kind, "bad")
        self.assertEqual(fd.cp.degree, 1)
        self.assertEqual(abs(fd.cp.coeffs[1]), 1)

    def test_too_few_levels(self):
        with self.assertRaises(ValueError):
            fiber_charpoly(self.f7, 2, 1, [])

    def test_extra_level_disagrees(self):
        with self.assertRaises(Mismatch):
            fiber_charpoly(self.f7, 2, 1, [int(self.counts[1]), 0])

    def test_wild_fibre_rejected(self):
        f3 = build_field(3, 1)
        with self.assertRaises(HypothesisViolated):
            fiber_charpoly(f3, 2, 0, [1])


class TestRankThreeFibre(unittest.TestCase):
    """n = 3, q = 7, lambda = 1 with counts over F_7, F_49 and F_343."""

    def setUp(self):
        self.f7 = build_field(7, 1)
        self.counts = []
        for m in (1, 2, 3):
            ctx = build_field(7, m)
            self.counts.append(count_gauss(ctx, _gauss(ctx), 3, 1).N)
        self.det = det_value(self.f7, 3, 1, 7)

    def test_two_levels_and_det(self):
        fd = fiber_charpoly(self.f7, 3, 1, self.counts[:2])
        self.assertEqual(fd.cp.degree, 3)
        self.assertEqual(fd.cp.coeffs[3], -self.det)
        chi = Fraction(self.det, 7 ** 3)
        self.assertEqual(fd.cp(1 / (chi * 7)), 0)

    def test_third_level_count(self):
        fd = fiber_charpoly(self.f7, 3, 1, self.counts[:1])
        self.assertEqual(charpoly_power_sum(fd.cp, 3), frob_trace(3, 7 ** 3, self.counts[2]))
        self.assertEqual(fiber_charpoly(self.f7, 3, 1, self.counts).cp, fd.cp)

    def test_wrong_second_level(self):
        with self.assertRaises(Mismatch):
            fiber_charpoly(self.f7, 3, 1, [self.counts[0], self.counts[1] + 1])


def test_trace_sum_is_minus_one():
    config = _build_dummy_config()
    assert trace_sum(2, 5, 1, config) == -1
    assert trace_sum(2, 7, 2, config) == -1
    assert trace_sum(3, 7, 1, config) == -1


def test_frobenius_data_covers_the_line():
    data = collect_frobenius_data(2, 5, 2, _build_dummy_config())
    assert len(data[1]) == 5
    assert len(data[2]) == (25 - 5) // 2
    assert all(fd.degree == 2 for fd in data[2])


def test_frobenius_data_rejects_wild_characteristic():
    with pytest.raises(HypothesisViolated):
        collect_frobenius_data(2, 3, 1, _build_dummy_config())


@pytest.mark.parametrize("n,q,d,K", [(2, 5, 1, 2), (2, 5, 2, 1), (3, 5, 1, 2)])
def test_moment_counts_methods_agree(n, q, d, K):
    config = _build_dummy_config()
    direct = moment_counts(n, q, d, K, method="direct", config=config)
    charpoly = moment_counts(n, q, d, K, config=config, cross_check=True)
    assert direct.counts == charpoly.counts
    assert charpoly.cross_checked


def test_direct_moment_counts_respect_field_cap():
    config = RunConfig(cache_dir=None, field_cap=100)
    with pytest.raises(CapExceeded):
        moment_counts(2, 5, 2, 2, method="direct", config=config)


if __name__ == "__main__":
    unittest.main()
