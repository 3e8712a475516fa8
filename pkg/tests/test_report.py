import json
import unittest

import numpy as np

from levylab.catalog import catalog_model, catalog_text
from levylab.config import Settings
from levylab.parser import model_hash, parse_model
from levylab.report import CheckStatus, build_report, symbol_law_defect
from levylab.runtime import capture_events
from levylab.parser import model_symbol


def _statuses(report) -> dict[str, CheckStatus]:
    return {c.name: c.status for c in report.checks}


class TestBuildReport(unittest.TestCase):
    def test_catalog_models_pass(self) -> None:
        for name in ("brownian1d", "poisson1d", "compensated1d", "symmetric1d", "lattice2d", "mixed2d", "sqrt_poisson1d"):
            report = build_report(catalog_model(name))
            failed = [c.to_dict() for c in report.checks if not c.passed]
            self.assertTrue(report.ok, f"{name}: {failed}")

    def test_liouville_model_skips_fixed_points(self) -> None:
        statuses = _statuses(build_report(catalog_model("brownian1d")))
        self.assertEqual(statuses["harmonic"], CheckStatus.PASS)
        self.assertEqual(statuses["resolvent_fixed_point"], CheckStatus.SKIP)
        self.assertEqual(statuses["truncation"], CheckStatus.SKIP)
        self.assertEqual(statuses["corollary2"], CheckStatus.PASS)

    def test_lattice_model_runs_every_check(self) -> None:
        report = build_report(catalog_model("poisson1d"))
        self.assertFalse(report.verdict.holds)
        self.assertTrue(all(c.status is CheckStatus.PASS for c in report.checks))
        self.assertIsNotNone(report.crosscheck)
        self.assertIsNone(report.subordination)

    def test_subordinated_model_carries_equivalence_check(self) -> None:
        report = build_report(catalog_model("sqrt_poisson1d"))
        self.assertIsNotNone(report.subordination)
        self.assertTrue(report.subordination.zero_sets_equal)
        self.assertEqual(_statuses(report)["cross_application"], CheckStatus.SKIP)

    def test_numeric_verdict_skips_exact_checks(self) -> None:
        report = build_report(catalog_model("incommensurable1d"))
        statuses = _statuses(report)
        self.assertEqual(report.provenance["method"], "numeric_heuristic")
        for name in ("harmonic", "corollary2", "corollary3", "truncation"):
            self.assertEqual(statuses[name], CheckStatus.SKIP, name)
        self.assertTrue(report.ok)

    def test_checks_section_switches_checks_off(self) -> None:
        model = parse_model(catalog_text("poisson1d") + "\n[checks]\nharmonic = off\ntruncation = off\n")
        statuses = _statuses(build_report(model))
        self.assertEqual(statuses["harmonic"], CheckStatus.SKIP)
        self.assertEqual(statuses["truncation"], CheckStatus.SKIP)
        self.assertEqual(statuses["resolvent_fixed_point"], CheckStatus.PASS)

    def test_json_is_deterministic(self) -> None:
        model = catalog_model("compensated1d")
        first = build_report(model, Settings(seed=3)).to_json()
        second = build_report(model, Settings(seed=3)).to_json()
        self.assertEqual(first, second)
        data = json.loads(first)
        self.assertEqual(data["provenance"]["model_sha256"], model_hash(model))
        self.assertEqual(data["provenance"]["tolerances"]["seed"], 3)
        self.assertTrue(first.endswith("}\n"))

    def test_report_event(self) -> None:
        with capture_events() as log:
            build_report(catalog_model("drift1d"))
        built = [e for e in log.events if e["kind"] == "report_built"]
        self.assertEqual(len(built), 1)
        self.assertEqual(built[0]["failed"], [])


class TestSymbolLawDefect(unittest.TestCase):
    def test_defects_are_tiny_for_valid_symbols(self) -> None:
        for name in ("mixed2d", "compensated1d", "stable1d"):
            defects = symbol_law_defect(model_symbol(catalog_model(name)), 500, 0)
            self.assertEqual(set(defects), {"origin", "hermitian", "real_part", "subadditivity", "periodicity"})
            self.assertLess(max(defects.values()), 1e-9, name)

    def test_origin_defect_is_absolute_on_large_symbols(self) -> None:
        class Stiff:
            dimension = 1

            def __init__(self) -> None:
                self.sizes: list[int] = []

            def evaluate(self, xi: np.ndarray) -> np.ndarray:
                self.sizes.append(len(xi))
                return 1e8 * (np.asarray(xi, dtype=float) ** 2).sum(axis=1) + 5e-9 + 0j

            def __call__(self, xi: np.ndarray) -> complex:
                return complex(self.evaluate(np.asarray(xi, dtype=float).reshape(1, -1))[0])

        stiff = Stiff()
        defects = symbol_law_defect(stiff)  # type: ignore[arg-type]
        self.assertAlmostEqual(defects["origin"], 5e-9, delta=1e-15)
        self.assertEqual(defects["real_part"], 0.0)
        self.assertEqual(stiff.sizes[0], 10_000)


if __name__ == "__main__":
    unittest.main()
