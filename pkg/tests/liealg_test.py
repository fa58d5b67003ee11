import unittest
from fractions import Fraction

import numpy as np

from treealg.errors import NotALieAlgebraError, NotIrreducibleError, NotSemisimpleError
from treealg.liealg import (LieAlgebra, Rep, casimir_eigenvalue, casimir_pair, dual_coxeter, eye, invariant_maps,
                            is_irreducible, sl2, sl2_rep, trivial_rep)


class LieAlgebraTestCase(unittest.TestCase):
    def setUp(self):
        self.g = sl2()

    def test_killing_form_of_sl2(self):
        e, f, h = range(3)
        self.assertEqual(self.g.killing[h, h], 8)
        self.assertEqual(self.g.killing[e, f], 4)
        self.assertEqual(self.g.killing[e, e], 0)

    def test_dual_basis_pairs_to_identity(self):
        self.assertTrue(np.all(self.g.dual_basis @ self.g.killing == eye(3)))

    def test_bracket_of_e_and_f_is_h(self):
        self.assertListEqual(list(self.g.bracket([1, 0, 0], [0, 1, 0])), [0, 0, 1])

    def test_dual_coxeter_numbers(self):
        self.assertEqual(self.g.h_dual, 2)
        self.assertEqual(dual_coxeter("E", 8), 30)
        with self.assertRaises(NotSemisimpleError):
            dual_coxeter("H", 3)

    def test_broken_antisymmetry_should_raise_error(self):
        c = np.zeros((3, 3, 3), dtype=int)
        c[0, 1, 2] = 1
        with self.assertRaises(NotALieAlgebraError):
            LieAlgebra(c)

    def test_abelian_algebra_is_not_semisimple(self):
        with self.assertRaises(NotSemisimpleError):
            LieAlgebra(np.zeros((2, 2, 2), dtype=int))


class RepTestCase(unittest.TestCase):
    def setUp(self):
        self.g = sl2()
        self.half = sl2_rep(self.g, 1)
        self.one = sl2_rep(self.g, 2)

    def test_weight_modules_are_representations(self):
        for m in range(4):
            self.assertTrue(sl2_rep(self.g, m).is_rep())

    def test_bad_matrices_should_raise_error(self):
        e = np.array([[0, 1], [0, 0]])
        with self.assertRaises(NotALieAlgebraError):
            Rep(self.g, [e, e.T, 2 * np.eye(2, dtype=int)])

    def test_casimir_eigenvalues(self):
        self.assertEqual(casimir_eigenvalue(trivial_rep(self.g)), 0)
        self.assertEqual(casimir_eigenvalue(self.half), Fraction(3, 8))
        self.assertEqual(casimir_eigenvalue(self.one), 1)

    def test_casimir_of_a_reducible_rep_should_raise_error(self):
        reducible = Rep(self.g, [np.kron(m, np.eye(2, dtype=int)) for m in self.half.matrices])
        self.assertFalse(is_irreducible(reducible))
        with self.assertRaises(NotIrreducibleError):
            casimir_eigenvalue(reducible)

    def test_clebsch_gordan_multiplicities(self):
        self.assertEqual(len(invariant_maps([self.half, self.half], trivial_rep(self.g))), 1)
        self.assertEqual(len(invariant_maps([self.half, self.half], self.one)), 1)
        self.assertEqual(len(invariant_maps([self.half, self.half], self.half)), 0)
        self.assertEqual(len(invariant_maps([self.half] * 3, self.half)), 2)

    def test_invariant_maps_intertwine(self):
        for f in invariant_maps([self.half, self.half], self.one):
            self.assertEqual(f.shape, (3, 4))
            self.assertTrue(np.all(f @ casimir_pair([self.half, self.half], 0, 1) == f * Fraction(1, 8)))

    def test_split_casimir_is_symmetric_in_the_slots(self):
        forward = casimir_pair([self.half, self.one], 0, 1)
        backward = casimir_pair([self.half, self.one], 1, 0)
        self.assertTrue(np.all(forward == backward))


if __name__ == '__main__':
    unittest.main()
