import math
import random
import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from levylab.groups import (
    ClosedSubgroup,
    IncommensurableError,
    Scale,
    canonical_group,
    distance_to,
    format_group,
    full_space,
    group_sum_closure,
    intersect_subspace,
    lattice_preimage,
    member,
    orthogonal_subgroup,
    subgroup_from_generators,
    subspace_group,
    trivial_group,
)
from levylab.rational import RationalityError, dot, dual_basis, lattice_basis


class TestRational(unittest.TestCase):
    def test_lattice_basis_is_canonical(self) -> None:
        a = lattice_basis([(Fraction(2), Fraction(0)), (Fraction(0), Fraction(1))], 2)
        b = lattice_basis([(Fraction(2), Fraction(1)), (Fraction(0), Fraction(1)), (Fraction(4), Fraction(3))], 2)
        self.assertEqual(a, b)

    def test_lattice_basis_keeps_fractions(self) -> None:
        self.assertEqual(lattice_basis([(Fraction(1, 2),), (Fraction(1, 3),)], 1), [(Fraction(1, 6),)])

    def test_dual_basis_of_scaled_line(self) -> None:
        self.assertEqual(dual_basis([(Fraction(2),)], 1), [(Fraction(1, 2),)])


class TestClosedSubgroups(unittest.TestCase):
    def test_trivial_and_full(self) -> None:
        self.assertTrue(trivial_group(2).is_trivial)
        self.assertEqual(format_group(trivial_group(2)), "{0}")
        self.assertEqual(format_group(full_space(1)), "ℝ")
        self.assertEqual(format_group(full_space(3)), "ℝ^3")
        self.assertEqual(orthogonal_subgroup(trivial_group(2)), full_space(2))
        self.assertEqual(orthogonal_subgroup(full_space(2)), trivial_group(2))

    def test_preimage_of_unit_atom(self) -> None:
        zero_set = lattice_preimage([(1,)], None, 1)
        self.assertEqual(zero_set.scale, Scale.TWO_PI)
        self.assertEqual(zero_set.lattice_basis, ((Fraction(1),),))
        self.assertEqual(format_group(zero_set), "2π·ℤ")
        self.assertEqual(format_group(orthogonal_subgroup(zero_set)), "ℤ")

    def test_preimage_of_half_atom(self) -> None:
        zero_set = lattice_preimage([(Fraction(1, 2),)], None, 1)
        self.assertEqual(zero_set.lattice_basis, ((Fraction(2),),))
        perp = orthogonal_subgroup(zero_set)
        self.assertEqual(perp.scale, Scale.UNIT)
        self.assertEqual(perp.lattice_basis, ((Fraction(1, 2),),))

    def test_preimage_restricted_to_subspace(self) -> None:
        # {xi in R x {0} : xi_1 in 2 pi Z}
        group = lattice_preimage([(1, 0)], [(1, 0)], 2)
        self.assertEqual(group.subspace_dimension, 0)
        self.assertEqual(group.lattice_basis, ((Fraction(1), Fraction(0)),))
        self.assertEqual(orthogonal_subgroup(group), canonical_group(2, [(0, 1)], [(1, 0)], Scale.UNIT))

    def test_unconstrained_direction_becomes_subspace(self) -> None:
        group = lattice_preimage([(1, 0)], None, 2)
        self.assertEqual(group.subspace_basis, ((Fraction(0), Fraction(1)),))
        self.assertEqual(group.lattice_rank, 1)
        self.assertIn("span{(0, 1)}", format_group(group))

    def test_empty_lattice_normalizes_scale(self) -> None:
        group = canonical_group(2, [(1, 1)], [], Scale.TWO_PI)
        self.assertEqual(group.scale, Scale.UNIT)
        self.assertEqual(group, subspace_group([(2, 2)], 2))

    def test_member(self) -> None:
        group = subgroup_from_generators([(1, 0), (0, 2)], 2)
        self.assertTrue(member(group, (3, 4)))
        self.assertFalse(member(group, (3, 3)))
        self.assertFalse(member(group, (Fraction(1, 2), 0)))
        zero_set = lattice_preimage([(1,)], None, 1)
        self.assertTrue(member(zero_set, (5,), Scale.TWO_PI))
        self.assertFalse(member(zero_set, (5,), Scale.UNIT))

    def test_irrational_generator_rejected(self) -> None:
        with self.assertRaises(RationalityError):
            subgroup_from_generators([(math.sqrt(2),)], 1)

    def test_sum_closure(self) -> None:
        line = subspace_group([(1, 0)], 2)
        lattice = subgroup_from_generators([(1, 1)], 2)
        total = group_sum_closure(line, lattice)
        self.assertEqual(total, canonical_group(2, [(1, 0)], [(0, 1)]))

    def test_sum_closure_across_scales(self) -> None:
        unit = subgroup_from_generators([(1, 0)], 2)
        two_pi = lattice_preimage([(0, 1)], [(0, 1)], 2)
        total = group_sum_closure(unit, two_pi)
        self.assertEqual(total.scale, Scale.UNIT)
        self.assertEqual(total.lattice_basis, ((Fraction(1), Fraction(0)),))
        self.assertEqual(total.cross_lattice_basis, ((Fraction(0), Fraction(1)),))
        self.assertEqual(total, group_sum_closure(two_pi, unit))
        self.assertEqual(format_group(total), "ℤ⟨(1, 0)⟩ ⊕ 2π·ℤ⟨(0, 1)⟩")
        self.assertTrue(member(total, (3, 0)))
        self.assertTrue(member(total, (0, -2), Scale.TWO_PI))
        self.assertFalse(member(total, (0, 1)))
        perp = orthogonal_subgroup(total)
        self.assertEqual(perp.lattice_basis, ((Fraction(0), Fraction(1)),))
        self.assertEqual(perp.cross_lattice_basis, ((Fraction(1), Fraction(0)),))
        self.assertEqual(orthogonal_subgroup(perp), total)
        self.assertAlmostEqual(distance_to(total, [0.1, 2 * math.pi]), 0.1, places=12)
        self.assertEqual(total.to_dict()["cross_lattice"], [["0", "1"]])

    def test_shared_direction_across_scales_is_dense(self) -> None:
        unit = subgroup_from_generators([(1,)], 1)
        two_pi = lattice_preimage([(1,)], None, 1)
        self.assertEqual(group_sum_closure(unit, two_pi), full_space(1))
        plane = group_sum_closure(subgroup_from_generators([(1, 1), (1, 0)], 2), lattice_preimage([(1, 1)], [(1, 1)], 2))
        self.assertEqual(plane.subspace_basis, ((Fraction(1), Fraction(1)),))
        self.assertFalse(plane.cross_lattice_basis)

    def test_overlapping_scales_are_not_canonical(self) -> None:
        with self.assertRaises(IncommensurableError):
            canonical_group(1, [], [(1,)], Scale.UNIT, [(2,)])

    def test_intersect_mixed_group(self) -> None:
        total = group_sum_closure(subgroup_from_generators([(1, 0, 0)], 3), lattice_preimage([(0, 1, 0)], [(0, 1, 0)], 3))
        self.assertEqual(intersect_subspace(total, [(0, 1, 0), (0, 0, 1)]), lattice_preimage([(0, 1, 0)], [(0, 1, 0)], 3))
        self.assertTrue(intersect_subspace(total, [(1, 1, 0)]).is_trivial)

    def test_intersect_subspace(self) -> None:
        grid = subgroup_from_generators([(1, 0), (0, 1)], 2)
        diagonal = intersect_subspace(grid, [(1, 1)])
        self.assertEqual(diagonal, subgroup_from_generators([(1, 1)], 2))
        mixed = canonical_group(2, [(1, 0)], [(0, 1)])
        self.assertEqual(intersect_subspace(mixed, [(0, 1)]), subgroup_from_generators([(0, 1)], 2))

    def test_distance_to(self) -> None:
        zero_set = lattice_preimage([(1,)], None, 1)
        self.assertAlmostEqual(distance_to(zero_set, [2 * math.pi + 0.1]), 0.1, places=12)
        line = subspace_group([(1, 0)], 2)
        self.assertAlmostEqual(distance_to(line, [5.0, -0.25]), 0.25, places=12)
        self.assertAlmostEqual(distance_to(trivial_group(2), [3.0, 4.0]), 5.0, places=12)
        skewed = subgroup_from_generators([(2, 0), (1, 3)], 2)
        self.assertAlmostEqual(distance_to(skewed, [1.01, 2.98]), math.hypot(0.01, 0.02), places=10)
        self.assertAlmostEqual(distance_to(skewed, [3.0, 3.0]), 0.0, places=12)

    def test_to_dict_carries_text(self) -> None:
        data = lattice_preimage([(1,)], None, 1).to_dict()
        self.assertEqual(data["scale"], "2pi")
        self.assertEqual(data["lattice"], [["1"]])
        self.assertEqual(data["text"], "2π·ℤ")


_entries = st.integers(min_value=-4, max_value=4)


class TestGroupProperties(unittest.TestCase):
    @settings(deadline=None, max_examples=60)
    @given(st.lists(st.tuples(_entries, _entries), min_size=1, max_size=3))
    def test_double_annihilator(self, rows: list[tuple[int, int]]) -> None:
        group = lattice_preimage(rows, None, 2)
        self.assertEqual(orthogonal_subgroup(orthogonal_subgroup(group)), group)

    @settings(deadline=None, max_examples=60)
    @given(st.lists(st.tuples(_entries, _entries), min_size=1, max_size=3))
    def test_annihilator_pairing(self, rows: list[tuple[int, int]]) -> None:
        group = lattice_preimage(rows, None, 2)
        perp = orthogonal_subgroup(group)
        for g in group.generators():
            for h in perp.generators():
                ratio = float(g @ h) / (2 * math.pi)
                self.assertAlmostEqual(ratio, round(ratio), places=9)

    def test_random_lattices_round_trip(self) -> None:
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randint(1, 4)
            group = lattice_preimage(_random_rows(rng, n), None, n)
            self.assertEqual(orthogonal_subgroup(orthogonal_subgroup(group)), group)

    def test_membership_matches_brute_force(self) -> None:
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(1, 4)
            rows = _random_rows(rng, n)
            group = lattice_preimage(rows, None, n)
            perp = orthogonal_subgroup(group)
            for _ in range(10):
                # 2*pi*x is in the preimage exactly when A x is integral
                x = _combination(rng, group.lattice_basis + group.subspace_basis, n)
                expected = all(dot(r, x).denominator == 1 for r in rows)
                self.assertEqual(member(group, x, Scale.TWO_PI), expected, (rows, x))
                # y is in the annihilator exactly when it pairs integrally with 2*pi-lattice vectors
                y = _combination(rng, perp.lattice_basis + perp.subspace_basis, n)
                expected = all(dot(s, y) == 0 for s in group.subspace_basis) and all(
                    dot(v, y).denominator == 1 for v in group.lattice_basis
                )
                self.assertEqual(member(perp, y, Scale.UNIT), expected, (rows, y))

    def test_sum_closure_is_commutative_and_associative(self) -> None:
        rng = random.Random(5)
        for _ in range(40):
            n = rng.randint(2, 3)
            a, b, c = (_random_group(rng, n) for _ in range(3))
            self.assertEqual(group_sum_closure(a, b), group_sum_closure(b, a))
            self.assertEqual(
                group_sum_closure(group_sum_closure(a, b), c),
                group_sum_closure(a, group_sum_closure(b, c)),
            )

    def test_annihilator_reverses_inclusion(self) -> None:
        rng = random.Random(3)
        for _ in range(40):
            n = rng.randint(1, 4)
            rows = _random_rows(rng, n)
            larger = lattice_preimage(rows, None, n)
            smaller = lattice_preimage(rows + _random_rows(rng, n), None, n)
            for v in smaller.lattice_basis:
                self.assertTrue(member(larger, v, smaller.scale))
            big_perp = orthogonal_subgroup(larger)
            small_perp = orthogonal_subgroup(smaller)
            for v in big_perp.subspace_basis:
                self.assertTrue(member(small_perp, v) and member(small_perp, [x / 7 for x in v]))
            for v in big_perp.lattice_basis:
                self.assertTrue(member(small_perp, v, big_perp.scale))


def _random_rows(rng: random.Random, n: int) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)) for _ in range(rng.randint(1, 3))]


def _combination(rng: random.Random, basis: tuple, n: int) -> tuple[Fraction, ...]:
    """Integer combination with coefficients |k| <= 6, sometimes divided by 2 or 3."""
    x = tuple(Fraction(0) for _ in range(n))
    for v in basis:
        k = rng.randint(-6, 6)
        x = tuple(a + k * b for a, b in zip(x, v))
    d = rng.choice((1, 1, 2, 3))
    return tuple(a / d for a in x)


def _random_group(rng: random.Random, n: int) -> ClosedSubgroup:
    kind = rng.choice(("preimage", "generators", "subspace"))
    vectors = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(rng.randint(1, 2))]
    if kind == "preimage":
        return lattice_preimage(vectors, vectors, n)
    if kind == "generators":
        return subgroup_from_generators(vectors, n)
    return subspace_group(vectors, n)


if __name__ == "__main__":
    unittest.main()
