import unittest
from fractions import Fraction

from treealg.axioms import (gauge_tree_functor, mutations, scalar_gauges, verify_iso, verify_pretree, verify_pta,
                            verify_treefunctor)
from treealg.axioms.data import compositions, split
from treealg.axioms.report import FAIL, UNVERIFIED, Report
from treealg.errors import IncompleteDataError, PartitionError
from treealg.kzwzw import wzw_algebra, wzw_instance
from treealg.liealg import sl2
from treealg.ratfield import RatFunc


class DataTestCase(unittest.TestCase):
    def test_split_into_blocks(self):
        self.assertListEqual(split((1, 2, 3), (2, 1)), [(1, 2), (3,)])
        with self.assertRaises(PartitionError):
            split((1, 2, 3), (2, 2))

    def test_compositions(self):
        self.assertListEqual(compositions(3), [(1, 1, 1), (1, 2), (2, 1)])
        self.assertListEqual(compositions(3, min_parts=1), [(1, 1, 1), (1, 2), (2, 1), (3,)])

    def test_missing_module_should_raise_error(self):
        data = wzw_instance(sl2(), [], 1, max_arity=1)
        with self.assertRaises(IncompleteDataError):
            data.module((5,), 5)


class ReportTestCase(unittest.TestCase):
    def test_first_failure_and_counts(self):
        report = Report("demo", order=1)
        report.record("a", True)
        report.record("b", False, "broken", key=((1,), 1))
        report.unverified("c", "no certificate")
        self.assertFalse(report.passed)
        self.assertEqual(report.first_failure.name, "b")
        self.assertEqual(report.count(UNVERIFIED), 1)
        self.assertIn("first failure", report.summary())

    def test_merged_reports_keep_every_check(self):
        a, b = Report("a"), Report("b")
        a.record("x", True)
        b.record("y", False)
        merged = a + b
        self.assertEqual(len(merged.checks), 2)
        self.assertFalse(merged.passed)
        self.assertTrue(a.passed)


class WZWAxiomsTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.data = wzw_instance(sl2(), [1], 1, max_arity=3)

    def test_pretree_functor(self):
        report = verify_pretree(self.data, 2)
        self.assertTrue(report.passed, report.summary())

    def test_tree_functor(self):
        report = verify_treefunctor(self.data, 1)
        self.assertTrue(report.passed, report.summary())
        names = {c.name for c in report.checks}
        for axiom in ("axiom 1", "axiom 2", "axiom 3 (2, 1)", "axiom 3 (1, 2)", "axiom 4"):
            self.assertIn(axiom, names)

    def test_pre_tree_algebra(self):
        report = verify_pta(wzw_algebra(self.data), 1)
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(report.window, 1)

    def test_cleared_decomposition_is_reported_on_its_tuple(self):
        broken = self.data.copy()
        key = ((1, 1, 1), 1)
        broken.decompositions[(key, (2, 1))].matrix[:, :] = Fraction(0)
        failure = verify_pretree(broken, 2).first_failure
        self.assertIsNotNone(failure)
        self.assertEqual(failure.key, key)

    def test_doubled_connection_fails_the_factorization(self):
        broken = self.data.copy()
        module = broken.module((1, 1, 1), 1)
        for matrix in module.connection.matrices:
            matrix *= 2
        report = verify_treefunctor(broken, 1)
        self.assertIn("axiom 3", {c.name[:7] for c in report.checks if c.status == FAIL})

    def test_unconjugated_swap_fails_equivariance(self):
        broken = self.data.copy()
        key = ((1, 1, 1), 1)
        broken.permutations[(key, 0)] = broken.permutations[(key, 1)]
        report = verify_treefunctor(broken, 1)
        failed = [c for c in report.checks if c.status == FAIL]
        self.assertTrue(any(c.name == "axiom 1" and c.key == key for c in failed), report.summary())

    def test_scaled_algebra_map_is_located(self):
        algebra = wzw_algebra(self.data)
        key = ((1, 1), 0)
        algebra.phi[key] = [image * 2 for image in algebra.phi[key]]
        report = verify_pta(algebra, 1)
        self.assertFalse(report.passed)

    def test_every_mutation_is_caught(self):
        for description, mutated in mutations(self.data, count=20, seed=0):
            with self.subTest(mutation=description):
                caught = not verify_pretree(mutated, 2).passed or not verify_treefunctor(mutated, 1).passed
                self.assertTrue(caught)

    def test_mutations_are_reproducible(self):
        first = [d for d, _ in mutations(self.data, count=5, seed=3)]
        second = [d for d, _ in mutations(self.data, count=5, seed=3)]
        self.assertListEqual(first, second)


class IsomorphismTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.data = wzw_instance(sl2(), [1], 1, max_arity=3)

    def test_constant_scalar_gauges(self):
        gauges = scalar_gauges(self.data, lambda key: (Fraction(3) ** max(len(key[0]) - 1, 0), 0))
        gauged = gauge_tree_functor(self.data, gauges, order=2)
        report = verify_iso(self.data, gauged, gauges, order=2)
        self.assertTrue(report.passed, report.summary())
        self.assertTrue(verify_pretree(gauged, 2).passed)
        self.assertTrue(verify_treefunctor(gauged, 1).passed)

    def test_point_dependent_gauge(self):
        def factor(key):
            if len(key[0]) != 3:
                return None
            return RatFunc.diagonal(3, 0, 1, 1) * RatFunc.diagonal(3, 1, 2, -1), 0

        gauges = scalar_gauges(self.data, factor)
        gauged = gauge_tree_functor(self.data, gauges, order=2)
        report = verify_iso(self.data, gauged, gauges, order=2)
        self.assertTrue(report.passed, report.summary())

    def test_wrong_gauge_is_rejected(self):
        gauges = scalar_gauges(self.data, lambda key: None)
        gauged = gauge_tree_functor(self.data, gauges, order=2)
        key = ((1, 1), 2)
        wrong = dict(gauges)
        wrong[key] = scalar_gauges(self.data, lambda k: (RatFunc.diagonal(2, 0, 1, 1), 1))[key]
        report = verify_iso(self.data, gauged, wrong, order=2)
        self.assertFalse(report.passed)


class TrivialLabelTestCase(unittest.TestCase):
    def test_single_label_data_passes(self):
        data = wzw_instance(sl2(), [], 1, max_arity=3)
        self.assertListEqual(data.labels, [0])
        self.assertTrue(verify_pretree(data, 2).passed)
        self.assertTrue(verify_treefunctor(data, 1).passed)
        self.assertTrue(verify_pta(wzw_algebra(data), 1).passed)


if __name__ == '__main__':
    unittest.main()
