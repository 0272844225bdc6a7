"""Test suite for the Closed-Form Formulas module."""

import unittest
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithmetic_core.errors import CapExceeded
from moment_zeta.formulas import (
    B_count,
    C_count,
    D_local,
    D_local_printed,
    L_Fd_case_shape,
    L_Fd_trivial_shape,
    N_count,
    Q_d_trivial,
    Q_d_trivial_spec,
    TrivialFactorSpec,
    alpha,
    beta,
    binom,
    degP,
    degP_d,
    delta,
    delta_d,
    estimate_holds,
    estimate_main_term,
    formula_row,
    infinity_factor_Fd,
    infinity_factor_from_alpha,
    jordan_blocks,
    moment_exponents,
    moment_terms_budget,
    trivial_factor_Fd,
)


class TestCountingFunctions(unittest.TestCase):
    """C, B and N by enumeration and generating functions."""

    def test_empty_multiset(self):
        self.assertEqual(C_count(4, 0, 0, method="both"), 1)
        self.assertEqual(C_count(4, 0, 3, method="both"), 0)

    def test_minimal_strict_choice(self):
        for n in range(2, 6):
            for b in range(n + 1):
                self.assertEqual(B_count(n, b, b * (b - 1) // 2, method="both"), 1)

    def test_symmetry_sweep(self):
        for n in range(2, 5):
            for a in range(4):
                for b in range(n + 1):
                    top = (a + b) * (n - 1)
                    for k in range(top + 1):
                        self.assertEqual(N_count(n, a, b, k, method="both"),
                                         N_count(n, a, b, top - k))

    def test_enumeration_cap(self):
        with self.assertRaises(CapExceeded):
            C_count(9, 1, 0, method="enumerate")
        with self.assertRaises(CapExceeded):
            N_count(3, 10, 3, 0, method="both")


class TestAlphaBeta(unittest.TestCase):
    """Exponents at infinity and the beta generating function."""

    def test_alpha_constant_sheaf(self):
        self.assertEqual([alpha(3, 0, 0, k) for k in range(4)], [1, -1, 0, 0])

    def test_alpha_telescopes(self):
        for n, a, b in [(2, 2, 0), (3, 1, 1), (4, 2, 2), (5, 3, 0)]:
            c = (a + b) * (n - 1) // 2
            self.assertEqual(sum(alpha(n, a, b, k) for k in range(c + 1)), N_count(n, a, b, c))

    def test_beta_n2(self):
        self.assertEqual([beta(2, 0, k) for k in range(4)], [1, 0, 0, 0])

    def test_beta_dual_path(self):
        self.assertEqual(beta(3, 1, 2, method="both"), beta(3, 1, 2))

    def test_beta_alternating_sum(self):
        for n in range(2, 6):
            sums = [sum((-1) ** (b - 1) * b * beta(n, b, k) for b in range(1, n + 1)) for k in range(6)]
            self.assertEqual(sums, [1, -1, 0, 0, 0, 0])


class TestLocalDegrees(unittest.TestCase):
    """delta, D and degP."""

    def test_delta_table(self):
        self.assertEqual(delta(4, 0, 2), 1)
        self.assertEqual(delta(3, 2, 0), 1)
        self.assertEqual(delta(4, 2, 1), 0)
        self.assertEqual(delta(3, 1, 1), 1)

    def test_blocks_sum_to_D(self):
        for n in (2, 4, 6):
            for a in range(5):
                for b in range(n + 1):
                    self.assertEqual(sum(jordan_blocks(n, a, b).values()), D_local(n, a, b))

    def test_n2_wedge_one(self):
        self.assertEqual(D_local(2, 0, 1), 1)
        self.assertEqual(jordan_blocks(2, 0, 1), {2: 1})

    def test_printed_display_overcounts(self):
        self.assertEqual(D_local(4, 1, 0), D_local_printed(4, 1, 0))
        self.assertEqual(D_local(4, 1, 1), 10)
        self.assertEqual(D_local_printed(4, 1, 1), 13)

    def test_odd_D(self):
        self.assertEqual(D_local(3, 0, 0), 1)
        self.assertEqual(D_local(3, 1, 0), 2)

    def test_binomial_convention(self):
        self.assertEqual(binom(-1, -1), 1)
        self.assertEqual(binom(-1, 0), 0)
        self.assertEqual(binom(3, -1), 0)

    def test_degP_n2(self):
        expected = {(0, 0): 0, (1, 0): 0, (2, 0): 2, (0, 2): 0, (1, 1): 2, (3, 0): 4}
        for (a, b), value in expected.items():
            self.assertEqual(degP(2, a, b), value)

    def test_degP_beyond_rank(self):
        self.assertEqual(degP(2, 1, 3), 0)


class TestTrivialFactors(unittest.TestCase):
    """Q_d, the unified shape and the corrected trivial factor."""

    def test_Q1_n2(self):
        self.assertEqual(Q_d_trivial_spec(2, 1, 7).as_dict(), {0: 1, 1: -3, 2: 1})
        num, den = Q_d_trivial(2, 1, 7)
        self.assertEqual(num.as_dict(), {0: 1, 2: 1})
        self.assertEqual(den.as_dict(), {1: 3})

    def test_Q2_n2(self):
        spec = Q_d_trivial_spec(2, 2, 5).as_dict()
        self.assertEqual(spec[Fraction(2)], 1)
        self.assertEqual(spec, {0: 1, 1: -2, 2: 1, 3: 1})

    def test_shapes_agree(self):
        for n in range(2, 7):
            for d in range(1, 7):
                self.assertEqual(L_Fd_trivial_shape(n, d, 3).as_dict(), L_Fd_case_shape(n, d, 3).as_dict())

    def test_infinity_factor_from_alpha(self):
        for n in range(2, 5):
            for d in range(1, 5):
                self.assertEqual(infinity_factor_Fd(n, d), infinity_factor_from_alpha(n, d))

    def test_corrected_factor_differs_at_d1_even_n(self):
        corrected = trivial_factor_Fd(2, 1, 5).as_dict()
        self.assertEqual(corrected, {0: 1, 1: -2, 2: 1})
        self.assertEqual(trivial_factor_Fd(2, 2, 5).as_dict(), Q_d_trivial_spec(2, 2, 5).as_dict())

    def test_delta_d_vanishes_for_large_even_d(self):
        self.assertEqual(delta_d(2, 4), 0)
        self.assertEqual(delta_d(2, 2), -1)

    def test_spec_product_and_polys(self):
        spec = TrivialFactorSpec.from_map([(0, 1), (1, -1)], 3)
        num, den = spec.polys()
        self.assertEqual(num.coeffs, (1, -1))
        self.assertEqual(den.coeffs, (1, -3))
        self.assertEqual((spec * spec.inverse()).factors, ())
        self.assertEqual(spec.degree(), 0)


def test_moment_exponents():
    assert moment_exponents(2, 2) == [(2, 0, 1), (1, 1, 0), (0, 2, -1)]
    assert moment_exponents(4, 4)[3] == (1, 3, 2)
    assert all(isinstance(e, int) for _, _, e in moment_exponents(5, 6))


def test_degP_d_and_budget():
    assert degP_d(2, 1) == (0, 0)
    assert degP_d(2, 2) == (2, 0)
    assert degP_d(2, 3) == (4, 0)
    assert moment_terms_budget(2, 3) == 6


def test_estimate_main_term():
    assert estimate_main_term(2, 5, 1, 1) == 16
    assert estimate_main_term(2, 5, 2, 1) == Fraction(24 ** 2, 5) + 25
    assert estimate_holds(2, 5, 1, 1, 16, 0)
    assert not estimate_holds(2, 5, 1, 1, 1000, 0)


def test_formula_row_keys():
    row = formula_row(4, 1, 1)
    assert {"delta", "D", "degP", "alpha", "beta", "jordan_blocks"} <= set(row)
    assert "jordan_blocks" not in formula_row(3, 1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=6), st.data())
def test_alpha_matches_differences(n, a, data):
    b = data.draw(st.integers(min_value=0, max_value=n))
    k = data.draw(st.integers(min_value=0, max_value=(a + b) * (n - 1)))
    assert alpha(n, a, b, k) == N_count(n, a, b, k) - N_count(n, a, b, k - 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_degP_nonnegative(n):
    for a in range(9):
        for b in range(n + 1):
            assert degP(n, a, b) >= 0


if __name__ == "__main__":
    unittest.main()
