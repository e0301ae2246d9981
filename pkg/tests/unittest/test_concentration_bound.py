import math
import unittest

import numpy as np

from mixmatch.common.mixmatch_errors import BudgetError
from mixmatch.data_models.problem_constants import ProblemConstants
from mixmatch.sgd.concentration_bound import (compute_E, concentration_bound, default_diameter, log_lambda8,
                                              martingale_constant, martingale_exponent, theoretical_budget)


def _constants(gcal=1.0, beta=1.0, mu=1.0):
    return ProblemConstants.from_moduli(mu=mu, beta=beta, L=1.0, Gcal=gcal, sigma=1.0, K=2)


class TestConcentrationBound(unittest.TestCase):

    def test_offset(self):
        self.assertAlmostEqual(compute_E(2.0, math.e), 4096.0 * 4.0 * 8.0)
        self.assertAlmostEqual(log_lambda8(10.0), 8.0 * math.log(10.0))
        with self.assertRaises(BudgetError):
            compute_E(1.0, 1.0)
        with self.assertRaises(BudgetError):
            compute_E(0.5, 100.0)

    def test_martingale_exponent(self):
        self.assertEqual(martingale_exponent(0), 0.5)
        self.assertEqual(martingale_exponent(1), 0.75)
        self.assertEqual(martingale_exponent(2), 0.875)

    def test_first_term_at_zero(self):
        constants = _constants(gcal=2.0)
        E = 50.0
        bound = concentration_bound(4.0, constants, 2.0, 0, 1000.0, E=E)
        self.assertAlmostEqual(bound.term_G, max(E * 4.0, 8.0 * 2.0) / (1.0 + E))
        self.assertAlmostEqual(bound.total, bound.term_G + bound.term_diameter + bound.term_martingale)

    def test_noise_floor_dominates_small_start(self):
        bound = concentration_bound(0.0, _constants(gcal=3.0), 1.0, 9, 1000.0, E=10.0)
        self.assertAlmostEqual(bound.term_G, 24.0 / 20.0)

    def test_terms_decay(self):
        constants = _constants()
        early = concentration_bound(1.0, constants, 5.0, 10, 10 ** 6, E=100.0)
        late = concentration_bound(1.0, constants, 5.0, 10 ** 5, 10 ** 6, E=100.0)
        self.assertLess(late.term_G, early.term_G)
        self.assertLess(late.term_martingale, early.term_martingale)

    def test_total_nonincreasing_past_offset(self):
        constants = _constants(gcal=2.0, beta=2.0)
        for Lambda, E, k in ((10 ** 7, None, 0), (10 ** 7, None, 2), (10 ** 5, 16.0, 1)):
            offset = compute_E(constants.kappa, Lambda) if E is None else E
            steps = sorted({int(t) for t in np.geomspace(math.ceil(offset), Lambda - 1, 40)})
            totals = [concentration_bound(1.0, constants, 4.0, t, Lambda, k, E).total for t in steps]
            for earlier, later in zip(totals, totals[1:]):
                self.assertLessEqual(later, earlier * (1.0 + 1e-12), (Lambda, k))

    def test_martingale_level_changes_rate(self):
        constants = _constants()
        zero = concentration_bound(1.0, constants, 5.0, 10 ** 5, 10 ** 6, k=0, E=100.0)
        one = concentration_bound(1.0, constants, 5.0, 10 ** 5, 10 ** 6, k=1, E=100.0)
        self.assertEqual((zero.k, one.k), (0, 1))
        self.assertGreater(martingale_constant(1.0, constants, 5.0, 10 ** 6, 1, 100.0), 0.0)
        self.assertNotEqual(zero.term_martingale, one.term_martingale)

    def test_default_offset(self):
        constants = _constants()
        bound = concentration_bound(1.0, constants, 1.0, 0, 100.0)
        self.assertAlmostEqual(bound.E, compute_E(1.0, 100.0))

    def test_errors(self):
        constants = _constants()
        with self.assertRaises(BudgetError):
            concentration_bound(1.0, constants, 1.0, 10, 10.0)
        with self.assertRaises(BudgetError):
            concentration_bound(4.0, constants, 1.0, 0, 10.0)
        with self.assertRaises(BudgetError):
            concentration_bound(1.0, constants, 1.0, 0, 10.0, k=-1)

    def test_default_diameter(self):
        constants = _constants(gcal=2.0)
        self.assertAlmostEqual(default_diameter(9.0, constants, 0, 10.0), 3.0 + 2.0)
        self.assertGreater(default_diameter(9.0, constants, 100, 10.0), 5.0)

    def test_theoretical_budget(self):
        constants = _constants(gcal=0.5)
        small = theoretical_budget(constants, 10 ** 5, 0.0)
        large = theoretical_budget(constants, 10 ** 5, 10.0)
        self.assertGreater(small, 0.0)
        self.assertGreater(large, small)
        with self.assertRaises(BudgetError):
            theoretical_budget(constants, 1.0, 0.0)
        with self.assertRaises(BudgetError):
            theoretical_budget(constants, 100.0, -1.0)


if __name__ == '__main__':
    unittest.main()
