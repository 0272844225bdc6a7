"""Test suite for the Finite Field module."""

import os
import shutil
import unittest

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithmetic_core.errors import CapExceeded, NotADivisor, ZeroElement
from arithmetic_core.ffield import (
    FFElem,
    add_codes,
    build_field,
    dlog,
    euler_phi,
    factorize,
    frobenius_orbits,
    generator_power,
    is_irreducible,
    is_prime,
    load_field_cache,
    minimal_polynomial,
    mul_codes,
    neg_code,
    pow_code,
    prime_power,
    quadratic_character,
    save_field_cache,
    subfield,
    subfield_codes,
    trace_to_prime,
)


class TestIntegerHelpers(unittest.TestCase):
    """Primes, prime powers and factorization."""

    def test_prime_power(self):
        self.assertEqual(prime_power(9), (3, 2))
        self.assertEqual(prime_power(7), (7, 1))
        self.assertEqual(prime_power(32), (2, 5))
        with self.assertRaises(ValueError):
            prime_power(12)

    def test_is_prime(self):
        self.assertEqual([n for n in range(20) if is_prime(n)], [2, 3, 5, 7, 11, 13, 17, 19])

    def test_factorize_and_phi(self):
        self.assertEqual(factorize(360), {2: 3, 3: 2, 5: 1})
        self.assertEqual(euler_phi(12), 4)


class TestFieldConstruction(unittest.TestCase):
    """F_9 and F_16 with tables."""

    def setUp(self):
        self.test_dir = os.path.join(os.path.dirname(__file__), "test_output")
        os.makedirs(self.test_dir, exist_ok=True)
        self.f9 = build_field(3, 2)
        self.f16 = build_field(2, 4)

    def test_modulus_irreducible(self):
        self.assertTrue(is_irreducible(list(self.f9.modulus), 3))
        self.assertEqual(len(self.f16.modulus), 5)

    def test_generator_has_full_order(self):
        powers = {generator_power(self.f9, i) for i in range(8)}
        self.assertEqual(powers, set(range(1, 9)))

    def test_dlog_inverts_exp(self):
        for i in range(15):
            self.assertEqual(dlog(self.f16, generator_power(self.f16, i)), i)

    def test_dlog_of_zero(self):
        with self.assertRaises(ZeroElement):
            dlog(self.f9, 0)

    def test_field_arithmetic(self):
        for x in range(1, 9):
            self.assertEqual(pow_code(self.f9, x, 8), 1)
            self.assertEqual(add_codes(self.f9, x, neg_code(self.f9, x)), 0)
        self.assertEqual(mul_codes(self.f9, 2, 2), 1)

    def test_trace_of_one(self):
        self.assertEqual(trace_to_prime(self.f9, 1), 2)
        self.assertEqual(trace_to_prime(self.f16, 1), 0)

    def test_subfield(self):
        self.assertEqual(sorted(int(c) for c in subfield_codes(self.f9, 1)), [0, 1, 2])
        self.assertEqual(len(subfield_codes(self.f16, 2)), 4)
        with self.assertRaises(NotADivisor):
            subfield(self.f9, 3)

    def test_subfield_generator_is_an_element(self):
        handle = subfield(self.f16, 2)
        self.assertIsInstance(handle.embed_gen, FFElem)
        self.assertEqual(handle.embed_code, self.f16.code(handle.embed_gen))
        self.assertEqual(pow_code(self.f16, handle.embed_code, 3), 1)
        self.assertNotEqual(handle.embed_code, 1)

    def test_frobenius_orbits(self):
        orbits = frobenius_orbits(self.f9, 1)
        self.assertEqual(sorted(int(c) for c in orbits[1]), [0, 1, 2])
        self.assertEqual(len(orbits[2]), 3)
        orbits16 = frobenius_orbits(self.f16, 1)
        self.assertEqual(len(orbits16[4]), 3)
        self.assertEqual(len(orbits16[2]), 1)

    def test_minimal_polynomial(self):
        self.assertEqual(minimal_polynomial(self.f9, 2), (1, 1))
        for rep in frobenius_orbits(self.f9, 1)[2]:
            poly = minimal_polynomial(self.f9, int(rep))
            self.assertEqual(len(poly), 3)
            self.assertTrue(is_irreducible(list(poly), 3))

    def test_cache_round_trip(self):
        cache = os.path.join(self.test_dir, "field_cache")
        shutil.rmtree(cache, ignore_errors=True)
        self.assertTrue(save_field_cache(self.f9, cache))
        modulus, generator = load_field_cache(3, 2, 0, cache)
        self.assertEqual(modulus, self.f9.modulus)
        self.assertEqual(generator, self.f9.generator)
        self.assertIsNone(load_field_cache(3, 2, 1, cache))

    def test_deterministic_for_seed(self):
        again = build_field(3, 2, seed=0, cache_dir=None)
        self.assertEqual(again.modulus, self.f9.modulus)
        self.assertEqual(again.generator, self.f9.generator)


def test_quadratic_character_on_f5():
    ctx = build_field(5, 1)
    assert [quadratic_character(ctx, x) for x in range(5)] == [0, 1, -1, -1, 1]


def test_field_cap():
    with pytest.raises(CapExceeded):
        build_field(3, 5, field_cap=100)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=120))
def test_dlog_inverse_on_random_elements(code):
    ctx = build_field(11, 2)
    assert generator_power(ctx, dlog(ctx, code)) == code


if __name__ == "__main__":
    unittest.main()
