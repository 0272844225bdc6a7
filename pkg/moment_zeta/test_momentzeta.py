"""Test suite for the Moment Zeta Pipeline module."""

import unittest

import pytest

from arithmetic_core.errors import (
    HypothesisViolated,
    Mismatch,
    UsageError,
)
from arithmetic_core.exactalg import Poly, RationalFunctionRF
from moment_zeta import momentzeta
from moment_zeta.config import RunConfig
from moment_zeta.counting import FrobeniusData
from moment_zeta.formulas import D_local, degP
from moment_zeta.momentzeta import (
    adams_charpoly,
    bad_degree,
    bad_fiber_correction,
    bad_local_factor,
    congruence_check,
    prop31_check,
    run_gab,
    run_moment,
    split_bad_charpoly,
    substitute_power,
    sym_wedge_trace,
)


def _build_dummy_config():
    return RunConfig(cache_dir=None)


def _build_dummy_bad_point(sign=1, q=7, degree=1):
    return FrobeniusData(lam=3, level_q=q, n=2, cp=Poly((1, -sign)), kind="bad", degree=degree)


class TestPolynomialHelpers(unittest.TestCase):
    """Substitution and Adams operations on charpolys."""

    def test_substitute_power(self):
        self.assertEqual(substitute_power(Poly((1, 2)), 3).coeffs, (1, 0, 0, 2))
        self.assertEqual(substitute_power(Poly((1, 2)), 1), Poly((1, 2)))

    def test_adams_charpoly(self):
        cp = Poly.linear(2) * Poly.linear(3)
        self.assertEqual(adams_charpoly(cp, 2), Poly.linear(4) * Poly.linear(9))
        self.assertEqual(adams_charpoly(Poly.one(), 3), Poly.one())

    def test_sym_wedge_trace(self):
        cp = Poly.linear(2) * Poly.linear(3)
        self.assertEqual(sym_wedge_trace(cp, 2, 0, 1), 4 + 6 + 9)
        self.assertEqual(sym_wedge_trace(cp, 0, 2, 1), 6)
        self.assertEqual(sym_wedge_trace(cp, 1, 1, 2), 13 ** 2)
        self.assertEqual(sym_wedge_trace(cp, 0, 0, 5), 1)

    def test_bad_degree(self):
        self.assertEqual(bad_degree(2, 7), 1)
        self.assertEqual(bad_degree(2, 5), 2)
        self.assertEqual(bad_degree(3, 7), 2)


class TestSingularFibreModel(unittest.TestCase):
    """Local factors at the singular fibres for n = 2."""

    def test_split_even(self):
        cp0, u = split_bad_charpoly(2, Poly((1, 1)), 7)
        self.assertEqual(u, -1)
        self.assertEqual(cp0, Poly.one())

    def test_local_factors(self):
        cp = Poly((1, -1))
        self.assertEqual(bad_local_factor(2, 1, 0, cp, 7), Poly((1, -1)))
        self.assertEqual(bad_local_factor(2, 0, 2, cp, 7), Poly((1, -7)))
        for a, b in [(0, 0), (2, 0), (3, 0), (1, 1), (2, 2)]:
            self.assertEqual(bad_local_factor(2, a, b, cp, 7).degree, D_local(2, a, b))

    def test_second_moment_correction(self):
        num, den = bad_fiber_correction(2, 2, [_build_dummy_bad_point(-1)])
        self.assertEqual(num, Poly.one())
        self.assertEqual(den, Poly((1, -7)))

    def test_first_moment_has_no_correction(self):
        num, den = bad_fiber_correction(2, 1, [_build_dummy_bad_point(1)])
        self.assertEqual((num, den), (Poly.one(), Poly.one()))

    def test_correction_at_higher_degree_point(self):
        num, den = bad_fiber_correction(2, 2, [_build_dummy_bad_point(1, q=49, degree=2)])
        self.assertEqual(num, Poly.one())
        self.assertEqual(den, Poly((1, 0, -49)))


class TestRunMoment(unittest.TestCase):
    """End-to-end moment zeta functions over F_5."""

    def setUp(self):
        self.config = _build_dummy_config()

    def test_first_moment(self):
        report = run_moment(2, 5, 1, config=self.config)
        self.assertEqual(report.K, 2)
        self.assertEqual((report.Pd.num.degree, report.Pd.den.degree), (0, 0))
        self.assertTrue(all(row["holds"] for row in report.estimate))

    def test_second_moment(self):
        capped = RunConfig(cache_dir=None, field_cap=5 ** 4)
        report = run_moment(2, 5, 2, config=capped, cross_check=True)
        self.assertTrue(report.degree_check["consistent"])
        self.assertEqual(report.degree_check["predicted"], [2, 0])
        self.assertTrue(report.cross_checked)
        self.assertIn(report.fe_signs["numerator"], (1, -1))

    def test_budget_enforced(self):
        with self.assertRaises(UsageError):
            run_moment(2, 5, 2, K=2, config=self.config)

    def test_wild_characteristic(self):
        with self.assertRaises(HypothesisViolated):
            run_moment(2, 3, 1, config=self.config)


def test_second_moment_over_f7_is_pure():
    report = run_moment(2, 7, 2, config=_build_dummy_config())
    assert report.degree_check["observed"] == [2, 0]
    assert report.degree_check["consistent"]
    assert len(report.purity) == 2
    assert all(float(row["relative_error"]) < 1e-6 for row in report.purity)


def test_moment_degrees_compared_separately(monkeypatch):
    # a prediction with the right difference but the wrong degrees must fail
    monkeypatch.setattr(momentzeta, "degP_d", lambda n, d: (1, 1))
    with pytest.raises(Mismatch):
        run_moment(2, 5, 1, config=_build_dummy_config())


def test_congruence_between_moments():
    assert congruence_check(2, 5, 1, 5, 0, 4, _build_dummy_config()) == 4


def test_congruence_hypotheses():
    with pytest.raises(HypothesisViolated):
        congruence_check(2, 5, 1, 4, 0, 4, _build_dummy_config())


@pytest.mark.parametrize("a,b,total", [(1, 0, 4), (0, 2, 2), (2, 0, 6), (1, 1, 8), (3, 0, 8)])
def test_gab_degrees(a, b, total):
    report = run_gab(2, 7, a, b, config=_build_dummy_config())
    assert report.total_degree == report.predicted_total_degree == total
    assert report.L.series(report.K) == list(report.series.coeffs)
    assert report.alpha_agreement
    assert report.residual.num.degree == degP(2, a, b)


def test_gab_rebuilt_function_must_match_counts(monkeypatch):
    monkeypatch.setattr(momentzeta, "pade_reconstruct",
                        lambda series, deg_num, deg_den: RationalFunctionRF(Poly((1, 5)), Poly.one(), series.order))
    with pytest.raises(Mismatch):
        run_gab(2, 7, 1, 0, config=_build_dummy_config())


def test_gab_rejects_unknown_mode():
    with pytest.raises(UsageError):
        run_gab(2, 7, 1, 0, mode="bogus")


def test_gab_rejects_large_n():
    with pytest.raises(UsageError):
        run_gab(4, 7, 1, 0)


def test_prop31_shape():
    report = prop31_check(2, 7, config=_build_dummy_config())
    assert report.P.degree == 1
    assert report.P == report.P_bad
    assert len(report.magnitudes) == 1


def test_prop31_needs_roots_of_unity():
    with pytest.raises(HypothesisViolated):
        prop31_check(2, 5, config=_build_dummy_config())


def test_prop31_default_levels():
    report = prop31_check(2, 7, config=_build_dummy_config())
    assert report.K == 3
    assert report.L_poly.degree == 4
    assert report.L_poly == Poly((1, -1)) * report.P ** 3
    assert not report.reconstructed


def test_prop31_thirteen():
    config = RunConfig(cache_dir=None, fft_threshold=256)
    report = prop31_check(2, 13, config=config)
    assert report.P.degree == 1
    assert abs(report.P.coeffs[1]) == 1
    assert report.P == report.P_bad
    rank_three = prop31_check(3, 13, K=4, config=config)
    assert rank_three.P.degree == 2
    assert rank_three.L_poly.degree == 9
    assert all(abs(float(x) - 13.0) < 1e-9 for x in rank_three.magnitudes)


def test_prop31_reconstructs_from_enough_levels():
    config = RunConfig(cache_dir=None, fft_threshold=256)
    report = prop31_check(2, 4, K=6, config=config)
    assert report.reconstructed
    assert report.L_poly.degree == 4
    assert report.P == report.P_bad


def test_prop31_needs_a_coefficient_past_p():
    with pytest.raises(UsageError):
        prop31_check(3, 13, K=3, config=_build_dummy_config())


if __name__ == "__main__":
    unittest.main()
