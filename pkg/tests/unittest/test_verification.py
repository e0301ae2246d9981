import unittest

from mixmatch.common.mixmatch_errors import BudgetError, SuiteConfigError
from mixmatch.harness.verification import (allowed_violations, bound_steps, rate_steps, verify_concentration,
                                           verify_smoothness)
from mixmatch.sgd.concentration_bound import compute_E
from tests.unittest.suite_fixtures import latent_suite, logistic_suite, scalar_suite


class TestVerifySmoothness(unittest.TestCase):

    def test_scalar_suite_passes(self):
        report = verify_smoothness(scalar_suite(), 1000, seed=0)
        self.assertTrue(report.passed)
        self.assertEqual(report.pairs, 1000)
        self.assertLessEqual(report.max_ratio_optimum, 1.0)
        self.assertLessEqual(report.max_ratio_objective, 1.0)

    def test_latent_suite_passes(self):
        self.assertTrue(verify_smoothness(latent_suite(), 500, seed=1).passed)

    def test_deterministic(self):
        first = verify_smoothness(scalar_suite(), 100, seed=3)
        second = verify_smoothness(scalar_suite(), 100, seed=3)
        self.assertEqual(first.csv_row(), second.csv_row())

    def test_needs_quadratic_suite(self):
        with self.assertRaises(SuiteConfigError):
            verify_smoothness(logistic_suite(), 10)


class TestVerifyConcentration(unittest.TestCase):

    def test_grids(self):
        self.assertEqual(bound_steps(1000), [0, 1, 10, 100, 999])
        self.assertEqual(bound_steps(2), [0, 1])
        self.assertEqual(rate_steps(500), [])
        steps = rate_steps(100_000)
        self.assertEqual((steps[0], steps[-1]), (1000, 100_000))

    def test_allowed_violations_vanish(self):
        self.assertLess(allowed_violations(10 ** 4, 10 ** 4 + 1, 200), 1e-6)

    def test_zero_noise_below_bound(self):
        suite = scalar_suite(means=(1.0,), true_mixture=None, variance=0.0)
        report = verify_concentration(suite, 2000, 2001, 3, seed=0)
        self.assertTrue(report.passed)
        self.assertEqual([row.t for row in report.rows], [0, 1, 10, 100, 1000, 1999])
        E = compute_E(1.0, 2001)
        self.assertAlmostEqual(report.E, E)
        self.assertAlmostEqual(report.rows[0].term_G, E / (1.0 + E))
        for row in report.rows:
            self.assertEqual(row.violations, 0)
            self.assertLessEqual(row.p99_dsq, row.total)

    def test_noisy_suite_rows(self):
        report = verify_concentration(scalar_suite(means=(0.0,), true_mixture=None), 1000, 1001, 20, seed=1)
        self.assertTrue(report.bound_ok)
        self.assertFalse(report.check_rate)
        self.assertEqual(len(report.rows[0].csv_row()), 7)

    def test_explicit_offset_runs_rate_study(self):
        suite = scalar_suite(means=(0.0,), true_mixture=None)
        report = verify_concentration(suite, 3000, 3001, 10, seed=2, E=16.0)
        self.assertTrue(report.check_rate)
        self.assertEqual(report.E, 16.0)
        self.assertEqual(report.rate_steps[0], 1000)
        self.assertIsNotNone(report.slope)

    def test_budget_must_cover_steps(self):
        with self.assertRaises(BudgetError):
            verify_concentration(scalar_suite(), 100, 100, 2)


if __name__ == '__main__':
    unittest.main()
