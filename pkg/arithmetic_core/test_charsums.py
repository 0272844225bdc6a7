"""Test suite for the Character Sums module."""

import os
import shutil
import unittest
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from arithmetic_core.charsums import (
    DEFAULT_BITS,
    GUARD_BITS,
    build_char_table,
    build_gauss_table,
    check_inversion,
    dft,
    gauss_sum,
    hasse_davenport_check,
    load_gauss_table,
    p_orbits,
    save_gauss_table,
    subfield_gauss_sum,
)
from arithmetic_core.errors import NotCoprime
from arithmetic_core.ffield import build_field, subfield


def _build_dummy_signal(size, scale):
    """Fixed-point samples x_j = j + 1 - (j mod 3) i."""
    re, im = np.zeros(size, dtype=object), np.zeros(size, dtype=object)
    for j in range(size):
        re[j] = (j + 1) << scale
        im[j] = -((j % 3) << scale)
    return re, im


class TestGaussTable(unittest.TestCase):
    """Gauss sums of F_7 and F_9."""

    def setUp(self):
        self.test_dir = os.path.join(os.path.dirname(__file__), "test_output")
        os.makedirs(self.test_dir, exist_ok=True)
        self.f7 = build_field(7, 1)
        self.f9 = build_field(3, 2)
        self.ct7 = build_char_table(self.f7, DEFAULT_BITS)
        self.gt7 = build_gauss_table(self.ct7)

    def test_trivial_character(self):
        g0 = self.gt7.value(0)
        self.assertLess(abs(g0 - 1), mpmath.mpf(2) ** -100)

    def test_norms(self):
        with mpmath.workprec(DEFAULT_BITS):
            for k in range(1, 6):
                self.assertLess(abs(abs(self.gt7.value(k)) ** 2 - 7), mpmath.mpf(2) ** -90)

    def test_quadratic_gauss_sum(self):
        g = self.gt7.value(3)
        with mpmath.workprec(DEFAULT_BITS):
            self.assertLess(abs(g * g + 7), mpmath.mpf(2) ** -90)
        gt5 = build_gauss_table(build_char_table(build_field(5, 1)))
        g5 = gt5.value(2)
        with mpmath.workprec(DEFAULT_BITS):
            self.assertLess(abs(g5 * g5 - 5), mpmath.mpf(2) ** -90)

    def test_table_matches_direct_sum(self):
        for k in range(6):
            self.assertLess(abs(self.gt7.value(k) - gauss_sum(self.f7, k)), mpmath.mpf(2) ** -90)

    def test_fft_path_agrees(self):
        naive = build_gauss_table(build_char_table(self.f9))
        fast = build_gauss_table(build_char_table(self.f9), fft_threshold=1)
        self.assertEqual(naive.built_by, "naive")
        self.assertEqual(fast.built_by, "fft")
        for k in range(8):
            self.assertLess(abs(naive.value(k) - fast.value(k)), mpmath.mpf(2) ** -90)

    def test_inversion(self):
        for a in range(1, 7):
            self.assertLess(check_inversion(self.ct7, self.gt7, a), mpmath.mpf(2) ** -90)

    def test_cache_round_trip(self):
        cache = os.path.join(self.test_dir, "gauss_cache")
        shutil.rmtree(cache, ignore_errors=True)
        self.assertTrue(save_gauss_table(self.gt7, cache))
        loaded = load_gauss_table(self.f7, DEFAULT_BITS, cache)
        self.assertIsNotNone(loaded)
        for k in range(6):
            self.assertLess(abs(loaded.value(k) - self.gt7.value(k)), mpmath.mpf(2) ** -100)
        self.assertIsNone(load_gauss_table(self.f7, 2 * DEFAULT_BITS, cache))


class TestFourierTransform(unittest.TestCase):
    """Naive and chirp transforms."""

    def test_delta(self):
        scale = 64 + GUARD_BITS
        re, im = np.zeros(6, dtype=object), np.zeros(6, dtype=object)
        re[0] = 1 << scale
        out_re, out_im, method = dft(re, im, 1, scale)
        self.assertEqual(method, "naive")
        for x, y in zip(out_re, out_im):
            self.assertLess(abs(x - (1 << scale)), 1 << 8)
            self.assertLess(abs(y), 1 << 8)

    def test_bluestein_matches_naive(self):
        scale = 96
        re, im = _build_dummy_signal(11, scale)
        a_re, a_im, _ = dft(re, im, 1, scale, fft_threshold=10 ** 6)
        b_re, b_im, method = dft(re, im, 1, scale, fft_threshold=1)
        self.assertEqual(method, "fft")
        for x, y in zip(list(a_re) + list(a_im), list(b_re) + list(b_im)):
            self.assertLess(abs(x - y), 1 << 24)


def test_hasse_davenport_small_cases():
    assert hasse_davenport_check(2, 1, 2, Fraction(0)) < 1e-20
    assert hasse_davenport_check(3, 1, 2, Fraction(1, 2)) < 1e-20
    assert hasse_davenport_check(5, 1, 2, Fraction(1, 4)) < 1e-20


def test_subfield_gauss_sum_of_prime_field():
    big = build_field(5, 2)
    handle = subfield(big, 1)
    value = subfield_gauss_sum(handle, 2)
    assert abs(value * value - 5) < 1e-30


def test_p_orbits():
    orbits = p_orbits(4, 3)
    lengths = sorted(o.length for o in orbits.orbits)
    assert lengths == [1, 2]
    assert orbits.degree() == 3
    assert p_orbits(5, 2).orbits[0].length == 4


def test_p_orbits_not_coprime():
    with pytest.raises(NotCoprime):
        p_orbits(4, 2)


if __name__ == "__main__":
    unittest.main()
