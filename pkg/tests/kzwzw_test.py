import unittest
from fractions import Fraction

import numpy as np

from treealg.connalg import conn_degree, curvature, is_flat
from treealg.errors import NotInvariantError, SingularLevelError
from treealg.kzwzw import MapBasis, alpha, kz_build, kz_degree_identity, kz_restrict, shifted_level, wzw_instance
from treealg.liealg import eye, sl2, sl2_rep


class KZTestCase(unittest.TestCase):
    def setUp(self):
        self.g = sl2()
        self.half = sl2_rep(self.g, 1)

    def test_kz_connection_is_flat_under_both_conventions(self):
        kz = kz_build(self.g, [self.half] * 3, 1)
        self.assertTrue(is_flat(kz.full, "half")[0])
        self.assertTrue(is_flat(kz.full, "standard")[0])
        for curl, bracket in curvature(kz.full).values():
            self.assertTrue(all(not e for e in curl.flat))
            self.assertTrue(all(not e for e in bracket.flat))

    def test_four_points_and_spin_one_are_flat(self):
        cases = [([1, 1, 1, 1], 1), ([1, 1, 1, 1], 2), ([2, 2], 1), ([2, 2, 2], 1), ([1, 1, 2, 1], 2)]
        for weights, level in cases:
            kz = kz_build(self.g, [sl2_rep(self.g, m) for m in weights], level)
            with self.subTest(weights=weights, level=level):
                for curl, bracket in curvature(kz.full).values():
                    self.assertTrue(all(not e for e in curl.flat))
                    self.assertTrue(all(not e for e in bracket.flat))
                for convention in ("half", "paper", "standard"):
                    self.assertTrue(is_flat(kz.full, convention)[0], convention)

    def test_mixed_spins_at_level_two_are_flat(self):
        kz = kz_build(self.g, [self.half, sl2_rep(self.g, 2), self.half], 2)
        self.assertTrue(is_flat(kz.full, "standard")[0])

    def test_singlet_and_triplet_degrees(self):
        kz = kz_build(self.g, [self.half, self.half], 1)
        self.assertEqual(kz_degree_identity(kz, sl2_rep(self.g, 0)), (Fraction(1, 8), Fraction(1, 8)))
        self.assertEqual(conn_degree(kz_restrict(kz, sl2_rep(self.g, 2))), Fraction(-1, 24))

    def test_degree_identity_on_three_points(self):
        kz = kz_build(self.g, [self.half] * 3, 2)
        computed, predicted = kz_degree_identity(kz, self.half)
        self.assertEqual(computed, predicted)
        self.assertEqual(kz_restrict(kz, self.half).rank, 2)

    def test_restriction_to_an_absent_channel_has_rank_zero(self):
        kz = kz_build(self.g, [self.half, self.half], 1)
        self.assertEqual(kz_restrict(kz, self.half).rank, 0)

    def test_conformal_shift(self):
        self.assertEqual(alpha(self.g, self.half, 1), Fraction(1, 16))
        self.assertEqual(alpha(self.g, sl2_rep(self.g, 2), 1), Fraction(1, 6))

    def test_critical_level_should_raise_error(self):
        self.assertEqual(shifted_level(self.g, 1), 3)
        with self.assertRaises(SingularLevelError):
            shifted_level(self.g, -2)


class MapBasisTestCase(unittest.TestCase):
    def test_coordinates_of_a_combination(self):
        a, b = eye(2), np.array([[0, 1], [0, 0]], dtype=object)
        basis = MapBasis([a, b])
        self.assertListEqual(list(basis.coordinates(a * 3 - b)), [3, -1])

    def test_map_outside_the_span_should_raise_error(self):
        basis = MapBasis([eye(2)])
        with self.assertRaises(NotInvariantError):
            basis.coordinates(np.array([[0, 1], [0, 0]], dtype=object))


class WZWTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.data = wzw_instance(sl2(), [1], 1, max_arity=3)

    def test_labels_are_closed_under_fusion_channels(self):
        self.assertListEqual(self.data.labels, [0, 1, 2])

    def test_unit_patterns(self):
        self.assertEqual(self.data.rank((), 0), 1)
        self.assertEqual(self.data.rank((), 1), 0)
        self.assertEqual(self.data.rank((1,), 1), 1)
        self.assertEqual(self.data.rank((1,), 2), 0)

    def test_ranks_of_three_spin_halves(self):
        self.assertEqual(self.data.rank((1, 1, 1), 1), 2)
        self.assertEqual(self.data.rank((1, 1, 1), 0), 0)

    def test_stored_degrees_follow_the_shifts(self):
        for key in [((1, 1), 0), ((1, 1), 2), ((1, 1, 1), 1)]:
            with self.subTest(key=key):
                self.assertEqual(conn_degree(self.data.module(*key).connection), self.data.expected_degree(key))

    def test_certificates_are_stored(self):
        self.assertIn((((1, 1), 2), 0), self.data.permutations)
        self.assertIn((((0, 1), 1), 0), self.data.unit_gauges)
        self.assertIn((((1, 1, 1), 1), (2, 1)), self.data.decompositions)

    def test_decompositions_are_square(self):
        decomposition = self.data.decompositions[(((1, 1, 1), 1), (1, 2))]
        self.assertEqual(decomposition.matrix.shape, (2, 2))


if __name__ == '__main__':
    unittest.main()
