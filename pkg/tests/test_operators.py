import math
import unittest
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from levylab.catalog import catalog_model
from levylab.grid import (
    FiniteDifferenceFunction,
    GridError,
    GridFunction,
    TestBump,
    TorusGrid,
    TrigPolynomial,
    random_trig_polynomial,
)
from levylab.groups import trivial_group
from levylab.harmonic import HarmonicError, corollary3_consistency, make_harmonic, verify_harmonic
from levylab.operators import (
    OperatorError,
    apply_generator_direct,
    apply_generator_fourier,
    crosscheck_applications,
    distributional_pairing,
    eval_symbol_grid,
    positivity_report,
    resolvent_fixed_point,
    semigroup_fixed_point,
    transition_density,
)
from levylab.parser import model_triplet
from levylab.symbol import LevyMeasure, make_triplet
from levylab.zeroset import zero_set_exact

POISSON = make_triplet([0], measure=[(1, [1])])
SYMMETRIC = make_triplet([0], measure=[(1, [1]), (1, [-1])])
BROWNIAN = make_triplet([0], [[1]])


class TestTorusGrid(unittest.TestCase):
    def test_rejects_bad_shapes(self) -> None:
        with self.assertRaises(GridError):
            TorusGrid(1, 2 * math.pi, 12)
        with self.assertRaises(GridError):
            TorusGrid(1, 0.0, 16)
        with self.assertRaises(GridError):
            TorusGrid(0, 1.0, 16)

    def test_frequencies_are_integer_multiples(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 8)
        self.assertEqual(np.round(grid.frequency_axis()).tolist(), [0, 1, 2, 3, -4, -3, -2, -1])
        self.assertTrue(grid.resolves([3.0]))
        self.assertFalse(grid.resolves([4.0]))
        self.assertFalse(grid.resolves([0.5]))

    def test_bump_derivatives_match_finite_differences(self) -> None:
        bump = TestBump((0.0,), 1.0)
        numeric = FiniteDifferenceFunction(bump.value, 1)
        points = np.array([[0.3], [-0.5], [0.8]])
        np.testing.assert_allclose(bump.gradient(points), numeric.gradient(points), atol=1e-6)
        np.testing.assert_allclose(bump.hessian(points), numeric.hessian(points), atol=1e-4)
        self.assertEqual(bump.value(np.array([[1.5]]))[0], 0.0)


class TestGeneratorApplication(unittest.TestCase):
    def test_symbol_on_grid(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 8)
        psi = eval_symbol_grid(BROWNIAN, grid)
        k = np.round(grid.frequency_axis())
        np.testing.assert_allclose(psi.real, k * k / 2, atol=1e-12)
        with self.assertRaises(OperatorError):
            eval_symbol_grid(BROWNIAN, TorusGrid(2, 2 * math.pi, 8))

    def test_fourier_and_direct_forms_agree(self) -> None:
        triplet = make_triplet([Fraction(1, 2)], [[1]], [(1, [Fraction(1, 2)]), (2, [3])])
        grid = TorusGrid(1, 2 * math.pi, 32)
        for seed in range(3):
            u = random_trig_polynomial(grid, 5, seed)
            self.assertLess(crosscheck_applications(u, triplet, grid), 1e-9)

    def test_fourier_and_direct_forms_agree_in_two_dimensions(self) -> None:
        triplet = model_triplet(catalog_model("mixed2d"))
        grid = TorusGrid(2, 2 * math.pi, 16)
        u = random_trig_polynomial(grid, 5, 4)
        self.assertLess(crosscheck_applications(u, triplet, grid), 1e-9)

    def test_unresolved_polynomial_is_rejected(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 8)
        with self.assertRaises(OperatorError):
            crosscheck_applications(TrigPolynomial(((0.5,),), (1 + 0j,)), POISSON, grid)

    def test_direct_form_needs_discrete_measure(self) -> None:
        triplet = make_triplet([0], measure=LevyMeasure.from_density(lambda x: math.exp(-abs(float(x[0])))))
        with self.assertRaises(OperatorError):
            apply_generator_direct(TestBump((0.0,), 1.0), triplet, np.zeros((1, 1)))

    def test_direct_form_examples(self) -> None:
        quadratic = FiniteDifferenceFunction(lambda x: 0.5 * x[:, 0] ** 2, 1)
        self.assertAlmostEqual(float(apply_generator_direct(quadratic, BROWNIAN, [[0.7]])[0].real), 0.5, places=5)
        wave = TrigPolynomial(((2 * math.pi,), (-2 * math.pi,)), (0.5 + 0j, 0.5 + 0j))
        self.assertLess(abs(apply_generator_direct(wave, POISSON, [[0.0]])[0]), 1e-12)
        plane = TrigPolynomial(((1.0,),), (1 + 0j,))
        for x in (0.0, 0.3, 1.7):
            expected = (np.exp(1j) - 1) * np.exp(1j * x)
            self.assertAlmostEqual(complex(apply_generator_direct(plane, POISSON, [[x]])[0]), expected, places=12)

    def test_constants_are_annihilated(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 256)
        one = TrigPolynomial(((0.0,),), (1 + 0j,))
        self.assertLess(float(np.abs(apply_generator_fourier(one.on_grid(grid), POISSON).values).max()), 1e-14)
        self.assertLess(abs(distributional_pairing(one.on_grid(grid), TestBump((math.pi,), 1.0), POISSON)), 1e-8)

    def test_brownian_generator_is_half_laplacian(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 16)
        u = TrigPolynomial(((2.0,),), (1 + 0j,)).on_grid(grid)
        image = apply_generator_fourier(u, BROWNIAN)
        np.testing.assert_allclose(image.values, -2.0 * u.values, atol=1e-12)

    def test_crosscheck_is_relative_to_the_application(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 64)
        loud = TrigPolynomial(((20.0,),), (1e6 + 0j,))
        self.assertLess(crosscheck_applications(loud, BROWNIAN, grid), 1e-9)

    def test_generator_is_linear(self) -> None:
        triplet = make_triplet([Fraction(1, 2)], [[1]], [(1, [Fraction(1, 2)]), (2, [3])])
        grid = TorusGrid(1, 2 * math.pi, 32)
        u = random_trig_polynomial(grid, 4, 11)
        v = random_trig_polynomial(grid, 4, 12)
        alpha, beta = 2.0 - 1.0j, 0.5 + 0.0j
        combined = GridFunction(grid, alpha * u.on_grid(grid).values + beta * v.on_grid(grid).values)
        lu = apply_generator_fourier(u.on_grid(grid), triplet).values
        lv = apply_generator_fourier(v.on_grid(grid), triplet).values
        expected = alpha * lu + beta * lv
        np.testing.assert_allclose(apply_generator_fourier(combined, triplet).values, expected, atol=1e-10)
        sum_poly = TrigPolynomial(
            u.frequencies + v.frequencies,
            tuple(alpha * c for c in u.coefficients) + tuple(beta * c for c in v.coefficients),
        )
        x = grid.coordinates()
        direct = alpha * apply_generator_direct(u, triplet, x) + beta * apply_generator_direct(v, triplet, x)
        np.testing.assert_allclose(apply_generator_direct(sum_poly, triplet, x), direct, atol=1e-10)


class TestHarmonicFunctions(unittest.TestCase):
    def test_trivial_zero_set_has_no_candidate(self) -> None:
        with self.assertRaises(HarmonicError):
            make_harmonic(trivial_group(1))

    def test_unit_atom_candidate(self) -> None:
        candidate, f = make_harmonic(zero_set_exact(POISSON))
        self.assertAlmostEqual(candidate.period, 1.0, places=14)
        self.assertEqual(f.grid.points, 16)
        self.assertAlmostEqual(f.sup_norm(), 2.0, places=12)
        self.assertTrue(verify_harmonic(candidate, POISSON, f.grid).passed)

    def test_compensated_atom_candidate(self) -> None:
        triplet = model_triplet(catalog_model("compensated1d"))
        candidate, f = make_harmonic(zero_set_exact(triplet), seed=3)
        self.assertAlmostEqual(candidate.period, 0.5, places=14)
        report = verify_harmonic(candidate, triplet, f.grid)
        self.assertTrue(report.passed)
        self.assertIsNotNone(report.direct_residual)

    def test_two_dimensional_candidate(self) -> None:
        triplet = model_triplet(catalog_model("lattice2d"))
        candidate, f = make_harmonic(zero_set_exact(triplet), seed=1)
        self.assertTrue(verify_harmonic(candidate, triplet, f.grid).passed)
        self.assertIn("coefficients", candidate.to_dict())

    def test_non_harmonic_function_fails(self) -> None:
        grid = TorusGrid(1, 1.0, 16)
        poly = TrigPolynomial(((4 * math.pi,),), (1 + 0j,))
        self.assertTrue(verify_harmonic(poly, POISSON, grid).passed)
        self.assertFalse(verify_harmonic(poly, BROWNIAN, grid).passed)

    def test_harmonic_bound_counts_the_constant_and_the_norm(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 16)
        wave = TrigPolynomial(((1.0,),), (1 + 0j,))
        inside = verify_harmonic(wave, make_triplet([Fraction(3, 2000)]), grid, tolerance=1e-3)
        self.assertAlmostEqual(inside.fourier_residual, 1.5e-3, places=12)
        self.assertTrue(inside.passed)
        self.assertFalse(verify_harmonic(wave, make_triplet([Fraction(5, 2000)]), grid, tolerance=1e-3).passed)

    def test_too_coarse_grid_is_rejected(self) -> None:
        with self.assertRaises(HarmonicError):
            make_harmonic(zero_set_exact(POISSON), points=2)

    def test_distributional_pairing_vanishes(self) -> None:
        _, f = make_harmonic(zero_set_exact(POISSON))
        pairing = distributional_pairing(f, TestBump((0.5,), 0.3), POISSON)
        self.assertLess(abs(pairing), 1e-12)
        with self.assertRaises(OperatorError):
            distributional_pairing(f, TestBump((0.5,), 0.8), POISSON)

    def test_non_harmonic_witness(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 64)
        f = TrigPolynomial(((1.0,), (-1.0,)), (0.5 + 0j, 0.5 + 0j)).on_grid(grid)
        self.assertGreater(abs(distributional_pairing(f, TestBump((math.pi,), 1.0), POISSON)), 1e-3)
        self.assertGreater(resolvent_fixed_point(f, POISSON, 1.0), 1e-2)
        report = verify_harmonic(TrigPolynomial(((1.0,), (-1.0,)), (0.5 + 0j, 0.5 + 0j)), POISSON, grid)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.fourier_residual, 2 * math.sin(0.5), delta=0.01)

    def test_pairing_vanishes_for_every_bump_placement(self) -> None:
        _, f = make_harmonic(zero_set_exact(POISSON))
        for center in (0.2, 0.5, 0.85):
            self.assertLess(abs(distributional_pairing(f, TestBump((center,), 0.3), POISSON)), 1e-8)

    def test_pairing_matches_the_bump_fourier_weight(self) -> None:
        # centre chosen so that psi(1) e^{ic} = 2 sin(1/2) is real
        center = math.pi / 2 - 0.5
        bump = TestBump((center,), 1.0)

        def centred(y: float) -> float:
            return math.cos(y) * float(bump.value(np.array([[center + y]]))[0])

        weight, _ = quad(centred, -1.0, 1.0, limit=200)
        grid = TorusGrid(1, 2 * math.pi, 256)
        f = TrigPolynomial(((1.0,), (-1.0,)), (0.5 + 0j, 0.5 + 0j)).on_grid(grid)
        expected = abs(1 - np.exp(1j)) * weight
        self.assertAlmostEqual(abs(distributional_pairing(f, bump, POISSON)), expected, delta=0.01 * expected)

    def test_pairing_is_the_adjoint_of_the_generator(self) -> None:
        triplet = make_triplet([Fraction(1, 2)], [[1]], [(1, [Fraction(1, 2)]), (2, [3])])
        grid = TorusGrid(1, 2 * math.pi, 256)
        bump = TestBump((math.pi,), 1.0)
        for seed in range(2):
            u = random_trig_polynomial(grid, 4, seed)

            def weighted(y: float, u: TrigPolynomial = u) -> complex:
                lu = complex(apply_generator_direct(u, triplet, [[y]])[0])
                return lu * float(bump.value(np.array([[y]]))[0])

            re, _ = quad(lambda y: weighted(y).real, math.pi - 1.0, math.pi + 1.0, limit=200)
            im, _ = quad(lambda y: weighted(y).imag, math.pi - 1.0, math.pi + 1.0, limit=200)
            pairing = distributional_pairing(u.on_grid(grid), bump, triplet)
            self.assertLess(abs(pairing - complex(re, im)), 1e-5 * (1.0 + abs(complex(re, im))))

    def test_candidate_is_constant_along_the_gaussian_direction(self) -> None:
        triplet = model_triplet(catalog_model("mixed2d"))
        candidate, f = make_harmonic(zero_set_exact(triplet))
        self.assertAlmostEqual(candidate.period, 1.0, places=14)
        self.assertLess(float(np.abs(f.values - f.values[0:1, :]).max()), 1e-12)
        self.assertTrue(verify_harmonic(candidate, triplet, f.grid).passed)

    def test_fixed_points(self) -> None:
        _, f = make_harmonic(zero_set_exact(SYMMETRIC))
        self.assertLess(resolvent_fixed_point(f, SYMMETRIC, 1.0), 1e-12)
        result = semigroup_fixed_point(f, SYMMETRIC, 1.0)
        self.assertLess(result.residual, 1e-12)
        self.assertTrue(result.conclusive)
        self.assertFalse(semigroup_fixed_point(f, POISSON, 1.0).conclusive)
        with self.assertRaises(OperatorError):
            resolvent_fixed_point(f, SYMMETRIC, 0.0)


class TestTransitionDensity(unittest.TestCase):
    def test_heat_kernel_is_positive_and_normalised(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 64)
        density = transition_density(BROWNIAN, 1.0, grid)
        report = positivity_report(density)
        self.assertTrue(report.strictly_positive)
        self.assertLess(report.max_imaginary, 1e-12)
        self.assertAlmostEqual(float(density.values.real.sum()) * grid.spacing, 1.0, places=10)

    def test_positive_density_matches_verdict(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 64)
        self.assertTrue(corollary3_consistency(BROWNIAN, 1.0, grid).consistent)
        lattice = corollary3_consistency(POISSON, 1.0, grid)
        self.assertFalse(lattice.liouville)
        self.assertTrue(lattice.consistent)

    def test_brownian_plus_unit_atom_is_liouville(self) -> None:
        grid = TorusGrid(1, 2 * math.pi, 64)
        result = corollary3_consistency(model_triplet(catalog_model("brownian_poisson1d")), 1.0, grid)
        self.assertTrue(result.positivity.strictly_positive)
        self.assertTrue(result.liouville)
        self.assertTrue(result.consistent)


if __name__ == "__main__":
    unittest.main()
