import math
import unittest
from fractions import Fraction

from levylab.catalog import catalog_model, catalog_names
from levylab.config import Settings
from levylab.groups import Scale, format_group, subgroup_from_generators
from levylab.parser import model_symbol, model_triplet
from levylab.scan import scan_axis
from levylab.symbol import make_triplet
from levylab.zeroset import (
    ExactnessError,
    VerdictMethod,
    ZeroSetError,
    crosscheck_corollary2,
    decide_liouville,
    triplet_characterization,
    truncation_zero_set_check,
    zero_set_exact,
)


def _verdict(name: str, **kwargs):
    return decide_liouville(model_symbol(catalog_model(name)), **kwargs)


class TestExactZeroSets(unittest.TestCase):
    def test_brownian_and_drift_are_liouville(self) -> None:
        for name in ("brownian1d", "brownian2d", "drift1d", "stable1d", "truncation1d"):
            verdict = _verdict(name)
            self.assertTrue(verdict.holds, name)
            self.assertEqual(verdict.method, VerdictMethod.EXACT)
            self.assertTrue(verdict.zero_set.is_trivial)

    def test_drift_leaves_orthogonal_line(self) -> None:
        verdict = _verdict("drift2d")
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.zero_set.subspace_basis, ((Fraction(0), Fraction(1)),))
        self.assertEqual(verdict.zero_set.lattice_rank, 0)

    def test_unit_atom(self) -> None:
        verdict = _verdict("poisson1d")
        self.assertFalse(verdict.holds)
        self.assertEqual(format_group(verdict.zero_set), "2π·ℤ")
        self.assertEqual(format_group(verdict.periodicity_group), "ℤ")
        self.assertEqual(len(verdict.witnesses), 1)
        self.assertAlmostEqual(abs(verdict.witnesses[0].location[0]), 2 * math.pi, places=12)

    def test_drift_compensated_atom(self) -> None:
        verdict = _verdict("compensated1d")
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.zero_set.scale, Scale.TWO_PI)
        self.assertEqual(verdict.zero_set.lattice_basis, ((Fraction(2),),))
        self.assertEqual(verdict.periodicity_group.lattice_basis, ((Fraction(1, 2),),))

    def test_symmetric_atoms(self) -> None:
        self.assertEqual(format_group(_verdict("symmetric1d").zero_set), "2π·ℤ")

    def test_two_dimensional_lattice(self) -> None:
        verdict = _verdict("lattice2d")
        self.assertEqual(verdict.zero_set.lattice_rank, 2)
        self.assertEqual(verdict.periodicity_group, subgroup_from_generators([(1, 0), (0, 1)], 2))

    def test_mixed_gaussian_and_jumps(self) -> None:
        zero_set = zero_set_exact(model_triplet(catalog_model("mixed2d")))
        self.assertEqual(zero_set.subspace_dimension, 0)
        self.assertEqual(zero_set.lattice_basis, ((Fraction(0), Fraction(1)),))

    def test_three_dimensional_lattice(self) -> None:
        zero_set = zero_set_exact(model_triplet(catalog_model("lattice3d")))
        self.assertEqual(zero_set.lattice_rank, 3)
        self.assertIn((Fraction(0), Fraction(0), Fraction(1, 2)), zero_set.lattice_basis)

    def test_gaussian_part_kills_lattice(self) -> None:
        self.assertTrue(_verdict("brownian_poisson1d").holds)

    def test_subordinated_model_keeps_zero_set(self) -> None:
        verdict = _verdict("sqrt_poisson1d")
        self.assertEqual(verdict.method, VerdictMethod.EXACT)
        self.assertFalse(verdict.holds)
        self.assertEqual(format_group(verdict.zero_set), "2π·ℤ")

    def test_irrational_data_needs_numeric_mode(self) -> None:
        triplet = make_triplet([0], measure=[(1, [1]), (1, [math.sqrt(2)])])
        with self.assertRaises(ExactnessError):
            zero_set_exact(triplet)

    def test_verdict_to_dict(self) -> None:
        data = _verdict("poisson1d").to_dict()
        self.assertEqual(data["method"], "exact")
        self.assertFalse(data["holds"])
        self.assertEqual(data["periodicity_group"]["text"], "ℤ")


class TestNumericVerdict(unittest.TestCase):
    def test_incommensurable_atoms(self) -> None:
        verdict = _verdict("incommensurable1d")
        self.assertEqual(verdict.method, VerdictMethod.NUMERIC_HEURISTIC)
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.witnesses, ())
        self.assertGreater(verdict.residual_floor, 1e-10)

    def test_forced_numeric_mode_finds_lattice_points(self) -> None:
        verdict = _verdict("poisson1d", numeric=True, settings=Settings(scan_halfwidth=10.0))
        self.assertEqual(verdict.method, VerdictMethod.NUMERIC_HEURISTIC)
        self.assertFalse(verdict.holds)
        found = sorted(round(w.location[0] / (2 * math.pi)) for w in verdict.witnesses)
        self.assertEqual(found, [-1, 1])
        for w in verdict.witnesses:
            self.assertAlmostEqual(abs(w.location[0]), 2 * math.pi, places=6)

    def test_origin_cut_follows_the_coarsened_step(self) -> None:
        self.assertEqual(scan_axis(50.0, 0.01, 1, 200_000), (10001, 0.01))
        self.assertEqual(scan_axis(50.0, 0.01, 1, 101), (101, 1.0))
        verdict = _verdict("poisson1d", numeric=True, settings=Settings(scan_max_points=101))
        self.assertFalse(verdict.holds)
        self.assertTrue(verdict.witnesses)
        for w in verdict.witnesses:
            self.assertGreater(abs(w.location[0]), 10.0)
        self.assertIn("step 1,", verdict.notes[-1] + ",")


class TestTripletCharacterization(unittest.TestCase):
    def test_every_exact_catalog_model_agrees(self) -> None:
        for name in catalog_names():
            model = catalog_model(name)
            if model.symbol is not None or model.bernstein is not None or not model.is_exact:
                continue
            result = crosscheck_corollary2(model_triplet(model))
            self.assertTrue(result.equal, name)

    def test_compensator(self) -> None:
        info = triplet_characterization(model_triplet(catalog_model("compensated1d")))
        self.assertEqual(info.compensator, (Fraction(1, 4),))
        self.assertTrue(info.drift_subspace.is_trivial)
        self.assertTrue(info.sigma_exact)

    def test_mixed_model_sigma(self) -> None:
        result = crosscheck_corollary2(model_triplet(catalog_model("mixed2d")))
        self.assertTrue(result.equal)
        self.assertEqual(result.characterization.sigma.tolist(), [[1.0, 0.0], [0.0, 0.0]])
        self.assertEqual(format_group(result.rhs), format_group(result.lhs))

    def test_non_diagonal_covariance_sigma_is_numeric(self) -> None:
        triplet = make_triplet([0, 0], [[2, 1], [1, 2]])
        info = triplet_characterization(triplet)
        self.assertFalse(info.sigma_exact)
        product = info.sigma @ info.sigma
        for i in range(2):
            for j in range(2):
                self.assertAlmostEqual(product[i, j], float(triplet.covariance[i][j]), places=12)


class TestTruncation(unittest.TestCase):
    def test_truncated_zero_sets_intersect_to_the_full_one(self) -> None:
        triplet = model_triplet(catalog_model("truncation1d"))
        self.assertTrue(truncation_zero_set_check(triplet, [1, 2, 6]))
        lattice = make_triplet([0], measure=[(1, [1]), (1, [Fraction(3, 2)])])
        self.assertTrue(truncation_zero_set_check(lattice, [1, Fraction(3, 2), 2]))

    def test_radius_rules(self) -> None:
        triplet = model_triplet(catalog_model("truncation1d"))
        with self.assertRaises(ZeroSetError):
            truncation_zero_set_check(triplet, [2, 1, 6])
        with self.assertRaises(ZeroSetError):
            truncation_zero_set_check(triplet, [1, 3])
        with self.assertRaises(ZeroSetError):
            truncation_zero_set_check(triplet, [])


if __name__ == "__main__":
    unittest.main()
