import unittest
from fractions import Fraction

import numpy as np

from treealg.connalg import (Coaugmentation, Connection, GaugeMap, Permutation, StructureMap, conn_degree,
                             curvature, direct_sum_conn, gauge_transform, identity, idempotent_restriction,
                             is_flat, mat_inverse, pushforward_conn, same_monodromy, tensor_conn, zeros)
from treealg.errors import NotFlatError, NotInvariantError, NotInvertibleError, ShapeMismatchError
from treealg.kzwzw import kz_build, kz_restrict
from treealg.liealg import sl2, sl2_rep
from treealg.ratfield import RatFunc


def inv(n, i, j, power=1):
    return RatFunc.diagonal(n, i, j, -power)


class FlatnessTestCase(unittest.TestCase):
    def test_zero_connection_is_flat(self):
        conn = Connection.trivial(3, 2)
        self.assertTrue(is_flat(conn, "half")[0])
        self.assertTrue(is_flat(conn, "standard")[0])

    def test_abelian_connection_is_flat(self):
        conn = Connection.abelian(3, {(0, 1): Fraction(1, 3), (1, 2): 2, (0, 2): -1})
        for convention in ("half", "standard"):
            flat, witness = is_flat(conn, convention)
            self.assertTrue(flat)
            self.assertIsNone(witness)

    def test_non_flat_connection_gives_a_witness(self):
        conn = Connection(2, 1, [[[inv(2, 0, 1)]], [[0]]])
        flat, (pair, residual) = is_flat(conn, "standard")
        self.assertFalse(flat)
        self.assertEqual(pair, (0, 1))
        self.assertEqual(residual[0, 0], -inv(2, 0, 1, 2))

    def test_curl_and_bracket_are_kept_apart(self):
        conn = Connection.abelian(2, {(0, 1): 1})
        curl, bracket = curvature(conn)[(0, 1)]
        self.assertTrue(all(not e for e in curl.flat))
        self.assertTrue(all(not e for e in bracket.flat))

    def test_unknown_convention_should_raise_error(self):
        with self.assertRaises(ValueError):
            is_flat(Connection.trivial(2, 1), "other")

    def test_wrong_matrix_count_should_raise_error(self):
        with self.assertRaises(ShapeMismatchError):
            Connection(3, 1, [[[0]], [[0]]])


class DegreeTestCase(unittest.TestCase):
    def test_abelian_degree_is_the_total_coefficient(self):
        conn = Connection.abelian(2, {(0, 1): Fraction(1, 3)})
        self.assertEqual(conn_degree(conn), Fraction(1, 3))

    def test_trivial_connection_has_degree_zero(self):
        self.assertEqual(conn_degree(Connection.trivial(3, 2)), 0)

    def test_rank_zero_has_no_degree(self):
        self.assertIsNone(conn_degree(Connection.trivial(2, 0)))

    def test_non_flat_connection_should_raise_error(self):
        conn = Connection(2, 1, [[[inv(2, 0, 1)]], [[0]]])
        with self.assertRaises(NotFlatError):
            conn_degree(conn)

    def test_degree_against_a_reference(self):
        a = Connection.abelian(2, {(0, 1): 2})
        b = Connection.abelian(2, {(0, 1): Fraction(1, 2)})
        self.assertEqual(conn_degree(a, b), Fraction(3, 2))


class GaugeTestCase(unittest.TestCase):
    def setUp(self):
        self.g = GaugeMap.scalar(2, 1, RatFunc.diagonal(2, 0, 1, 2), degree=2)

    def test_gauge_adds_a_logarithmic_term(self):
        gauged = gauge_transform(Connection.trivial(2, 1), self.g)
        self.assertEqual(gauged, Connection.abelian(2, {(0, 1): 2}))
        self.assertEqual(gauged.basis_degrees, [2])
        self.assertTrue(same_monodromy(Connection.trivial(2, 1), gauged, self.g))

    def test_gauge_shifts_the_degree(self):
        conn = Connection.abelian(2, {(0, 1): Fraction(1, 3)})
        gauged = gauge_transform(conn, self.g)
        self.assertEqual(conn_degree(gauged), Fraction(1, 3) + 2)

    def test_homogeneity_of_gauges(self):
        self.assertTrue(self.g.is_homogeneous([0]))
        self.assertFalse(GaugeMap.scalar(2, 1, RatFunc.variable(2, 0) + 1).is_homogeneous([0]))

    def test_inverse_of_a_gauge(self):
        inverse = self.g.inverse()
        self.assertEqual(inverse.matrix[0, 0], inv(2, 0, 1, 2))
        self.assertEqual(inverse.degree, -2)

    def test_singular_matrix_should_raise_error(self):
        with self.assertRaises(NotInvertibleError):
            mat_inverse(zeros(2, 2, 2), 2)
        with self.assertRaises(NotInvertibleError):
            GaugeMap.scalar(2, 1, RatFunc.variable(2, 0) + RatFunc.variable(2, 1)).inverse_matrix

    def test_two_by_two_inverse(self):
        a = identity(2, 2)
        a[0, 1] = inv(2, 0, 1)
        b = mat_inverse(a, 2)
        self.assertEqual(b[0, 1], -inv(2, 0, 1))
        self.assertEqual(b[1, 1], RatFunc.constant(2, 1))


def random_unit(rng, n):
    "c * prod (z_i - z_j)^p over a few random pairs"
    f = RatFunc.constant(n, Fraction(int(rng.choice([-3, -1, 1, 2])), int(rng.integers(1, 4))))
    for _ in range(int(rng.integers(1, 3))):
        i, j = (int(k) for k in rng.choice(n, size=2, replace=False))
        f = f * RatFunc.diagonal(n, i, j, int(rng.choice([-2, -1, 1, 2])))
    return f


def random_unit_gauge(rng, n, rank):
    "Constant invertible integer matrix times a scalar unit"
    while True:
        a = rng.integers(-3, 4, size=(rank, rank))
        if round(np.linalg.det(a)):
            break
    u = random_unit(rng, n)
    return GaugeMap(np.array([[int(x) * u for x in row] for row in a], dtype=object), u.degree, n)


class GaugePropertyTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        g = sl2()
        cls.flat = kz_restrict(kz_build(g, [sl2_rep(g, 1)] * 3, 1), sl2_rep(g, 1))
        bent = zeros(2, 2, 3)
        bent[0, 1] = inv(3, 0, 1)
        cls.bent = Connection(3, 2, [bent, zeros(2, 2, 3), zeros(2, 2, 3)])

    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_flatness_survives_random_unit_gauges(self):
        self.assertEqual(self.flat.rank, 2)
        for case in range(10):
            g = random_unit_gauge(self.rng, 3, 2)
            for conn in (self.flat, self.bent):
                gauged = gauge_transform(conn, g)
                for convention in ("half", "paper", "standard"):
                    with self.subTest(case=case, conn=conn is self.flat, convention=convention):
                        self.assertEqual(is_flat(gauged, convention)[0], is_flat(conn, convention)[0])

    def test_triangular_gauge_keeps_standard_flatness(self):
        u = RatFunc.diagonal(3, 0, 2, 1)
        g = GaugeMap(np.array([[u, RatFunc.variable(3, 1) * u * inv(3, 1, 2)], [0, u]], dtype=object), 1, 3)
        self.assertTrue(is_flat(gauge_transform(self.flat, g), "standard")[0])
        self.assertFalse(is_flat(gauge_transform(self.bent, g), "standard")[0])

    def test_gauge_then_its_inverse_is_the_identity(self):
        for case in range(10):
            g = random_unit_gauge(self.rng, 3, 2)
            with self.subTest(case=case):
                back = gauge_transform(gauge_transform(self.flat, g), g.inverse())
                self.assertEqual(back, self.flat)
                self.assertListEqual(back.basis_degrees, self.flat.basis_degrees)
                self.assertTrue(same_monodromy(self.flat, gauge_transform(self.flat, g), g))

    def test_different_connections_do_not_share_monodromy(self):
        extra = zeros(2, 2, 3)
        for k in range(2):
            extra[k, k] = RatFunc.variable(3, 0)
        shifted = self.flat + Connection(3, 2, [extra, zeros(2, 2, 3), zeros(2, 2, 3)])
        unit = GaugeMap(identity(2, 3), 0, 3)
        self.assertTrue(same_monodromy(self.flat, self.flat, unit))
        self.assertFalse(same_monodromy(self.flat, shifted, unit))

    def test_convention_aliases_agree(self):
        conn = Connection.abelian(3, {(0, 1): 1, (1, 2): Fraction(1, 2)})
        self.assertEqual(is_flat(conn, "paper"), is_flat(conn, "half"))
        self.assertFalse(is_flat(self.bent, "paper")[0])


class ConstructionTestCase(unittest.TestCase):
    def test_tensor_product_juxtaposes_variables(self):
        a = Connection.abelian(2, {(0, 1): 1})
        b = Connection.abelian(2, {(0, 1): 2})
        product = tensor_conn([a, b])
        self.assertEqual(product.n_vars, 4)
        self.assertEqual(product[0][0, 0], inv(4, 0, 1))
        self.assertEqual(product[2][0, 0], inv(4, 2, 3) * 2)

    def test_tensor_product_of_ranks(self):
        product = tensor_conn([Connection.trivial(1, 2), Connection.trivial(2, 3)])
        self.assertEqual(product.rank, 6)

    def test_direct_sum_is_block_diagonal(self):
        total = direct_sum_conn([Connection.abelian(2, {(0, 1): 1}), Connection.abelian(2, {(0, 1): 3})])
        self.assertEqual(total.rank, 2)
        self.assertEqual(total[0][1, 1], inv(2, 0, 1) * 3)
        self.assertFalse(total[0][0, 1])

    def test_idempotent_restriction(self):
        total = direct_sum_conn([Connection.abelian(2, {(0, 1): 1}), Connection.abelian(2, {(0, 1): 3})])
        restricted = idempotent_restriction(total, np.array([[0, 0], [0, 1]], dtype=object))
        self.assertEqual(restricted, Connection.abelian(2, {(0, 1): 3}))

    def test_non_invariant_image_should_raise_error(self):
        nilpotent = np.array([[0, inv(2, 0, 1)], [0, 0]], dtype=object)
        conn = Connection(2, 2, [nilpotent, -nilpotent])
        with self.assertRaises(NotInvariantError):
            idempotent_restriction(conn, np.array([[0, 0], [0, 1]], dtype=object))


class PushforwardTestCase(unittest.TestCase):
    def test_coaugmentation_adds_a_silent_point(self):
        pushed = pushforward_conn(Connection.abelian(2, {(0, 1): 1}), Coaugmentation([0, 2], 3))
        self.assertEqual(pushed, Connection.abelian(3, {(0, 2): 1}))

    def test_swapping_two_points_keeps_the_abelian_connection(self):
        conn = Connection.abelian(2, {(0, 1): Fraction(1, 3)})
        self.assertEqual(pushforward_conn(conn, Permutation([1, 0])), conn)

    def test_structure_map_inside_one_block(self):
        pushed = pushforward_conn(Connection.abelian(2, {(0, 1): 1}), StructureMap((2,), 2))
        self.assertEqual(pushed.dt[0].entry(0, 0), inv(3, 0, 1))
        self.assertFalse(pushed.coefficient(2).entry(0, 0))

    def test_structure_map_between_blocks(self):
        pushed = pushforward_conn(Connection.abelian(2, {(0, 1): 1}), StructureMap((1, 1), 0))
        self.assertEqual(pushed.dz[0].entry(0, 0), inv(4, 2, 3))
        self.assertEqual(len(pushed.coefficients), 4)


if __name__ == '__main__':
    unittest.main()
