"""Test suite for the verification suites registry."""

import os
import shutil
import unittest

import pytest

from arithmetic_core.errors import UnknownSuite
from moment_zeta.config import RunConfig
from moment_zeta.suites import SUITES, formula_rows, prime_powers, run_bundle, run_suite
from moment_zeta.utils.reports import load_report


def _build_dummy_config():
    return RunConfig(cache_dir=None)


class TestBundle(unittest.TestCase):
    """Bundle output for a subset of suites."""

    def setUp(self):
        self.test_dir = os.path.join(os.path.dirname(__file__), "test_output", "bundle")
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_bundle_writes_manifest(self):
        success, manifest_path = run_bundle(_build_dummy_config(), self.test_dir, ["combinatorics"])
        self.assertTrue(success)
        manifest = load_report(manifest_path)
        self.assertTrue(manifest["complete"])
        self.assertNotIn("saved_at", manifest["metadata"])
        names = [a["name"] for a in manifest["artifacts"]]
        self.assertEqual(names, ["combinatorics.json", "formulas.csv"])
        report = load_report(os.path.join(self.test_dir, "combinatorics.json"))
        self.assertNotIn("saved_at", report["metadata"])
        self.assertNotIn("wall_time", report["result"])


def test_registry_names():
    assert set(SUITES) == {"gauss_vs_brute", "sk_minus_one", "purity", "hasse_davenport", "zeta0",
                           "combinatorics", "moment_thm11", "congruence", "prop31", "gab"}


def test_combinatorics_suite_passes():
    result = run_suite("combinatorics", _build_dummy_config())
    assert result.status == "pass"
    assert result.cases_run == 3
    assert result.first_failure is None


def test_gauss_suite_passes():
    result = run_suite("gauss_vs_brute", _build_dummy_config())
    assert result.passed


def test_purity_suite_checks_quadratic_eigenvalue():
    result = run_suite("purity", _build_dummy_config())
    assert result.passed
    detail = [c["detail"] for c in result.cases if c["detail"]["n"] == 3][0]
    assert detail["chi_checked"] == 5


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nosuch")


def test_prime_powers():
    assert prime_powers(10) == [2, 3, 4, 5, 7, 8, 9]


def test_formula_rows_cover_grid():
    rows = formula_rows(top_n=3, top_a=1)
    assert len(rows) == 2 * 3 + 2 * 4


if __name__ == "__main__":
    unittest.main()
