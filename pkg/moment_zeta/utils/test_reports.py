"""Test suite for the Report Writers module."""

import os
import csv
import json
import shutil
import unittest
from fractions import Fraction

from arithmetic_core.exactalg import Poly, RationalFunctionRF
from moment_zeta.config import RunConfig
from moment_zeta.formulas import Q_d_trivial_spec
from moment_zeta.utils.reports import (
    SAFE_INT,
    build_report,
    dumps_report,
    load_report,
    save_csv,
    save_report,
    sha256_file,
    to_jsonable,
    write_manifest,
)


def _build_dummy_report():
    result = {"N": 3, "ratio": Fraction(1, 3), "cp": Poly((1, -2, 7))}
    return build_report("count", result, "both", True, RunConfig(cache_dir=None))


class TestToJsonable(unittest.TestCase):
    """Conversion of exact values."""

    def test_exact_numbers(self):
        self.assertEqual(to_jsonable(Fraction(1, 3)), "1/3")
        self.assertEqual(to_jsonable(Fraction(6, 3)), 2)
        self.assertEqual(to_jsonable(SAFE_INT), str(SAFE_INT))
        self.assertEqual(to_jsonable(SAFE_INT - 1), SAFE_INT - 1)

    def test_polynomials(self):
        self.assertEqual(to_jsonable(Poly((1, Fraction(1, 2)))), [1, "1/2"])
        rf = RationalFunctionRF(Poly.one(), Poly((1, -5)), 4)
        self.assertEqual(to_jsonable(rf), {"num": [1], "den": [1, -5], "total_degree": -1, "verified_to": 4})

    def test_trivial_factor(self):
        self.assertEqual(to_jsonable(Q_d_trivial_spec(2, 1, 7)), {"0": 1, "1": -3, "2": 1})

    def test_sets_are_sorted(self):
        self.assertEqual(to_jsonable({3, 1, 2}), [1, 2, 3])


class TestReportFiles(unittest.TestCase):
    """JSON, CSV and manifest output."""

    def setUp(self):
        self.test_dir = os.path.join(os.path.dirname(__file__), "test_output")
        shutil.rmtree(self.test_dir, ignore_errors=True)
        os.makedirs(self.test_dir, exist_ok=True)

    def test_provenance(self):
        data = _build_dummy_report()
        self.assertEqual(data["provenance"]["method"], "both")
        self.assertTrue(data["provenance"]["oracle_checked"])
        self.assertIn("mpmath", data["provenance"]["versions"])
        self.assertEqual(data["provenance"]["seed"], 0)

    def test_round_trip(self):
        data = _build_dummy_report()
        path = os.path.join(self.test_dir, "report.json")
        self.assertTrue(save_report(data, path))
        loaded = load_report(path)
        self.assertEqual(loaded["result"], {"N": 3, "ratio": "1/3", "cp": [1, -2, 7]})
        self.assertIn("saved_at", loaded["metadata"])

    def test_deterministic_without_timestamp(self):
        data = _build_dummy_report()
        first, second = (os.path.join(self.test_dir, name) for name in ("a.json", "b.json"))
        save_report(data, first, timestamp=False)
        save_report(data, second, timestamp=False)
        self.assertEqual(sha256_file(first), sha256_file(second))
        self.assertEqual(json.loads(dumps_report(data)), data)

    def test_missing_report(self):
        self.assertIsNone(load_report(os.path.join(self.test_dir, "missing.json")))

    def test_csv(self):
        path = os.path.join(self.test_dir, "rows.csv")
        rows = [{"n": 2, "alpha": [1, -1]}, {"n": 3, "alpha": [1, 0, -1]}]
        self.assertTrue(save_csv(rows, path, columns=["n", "alpha"]))
        with open(path, encoding="utf-8") as f:
            read = list(csv.DictReader(f))
        self.assertEqual(read[1]["alpha"], "1 0 -1")

    def test_manifest(self):
        save_report({"x": 1}, os.path.join(self.test_dir, "ok.json"), timestamp=False)
        artifacts = [{"name": "ok.json", "status": "pass"}, {"name": "gone.json", "status": "fail"}]
        path = write_manifest(self.test_dir, {"seed": 0}, artifacts)
        manifest = load_report(path)
        self.assertFalse(manifest["complete"])
        self.assertIsNone(manifest["artifacts"][1]["sha256"])
        self.assertEqual(len(manifest["artifacts"][0]["sha256"]), 64)


if __name__ == "__main__":
    unittest.main()
