import math

import numpy as np
from django.test import SimpleTestCase
from scipy import special

from boundary_dimension.tails import (
    AlternatingSlopes, GeometricTail, HurwitzTail, IntegralTail, LogSquaredTail, RatioTail, log_squared_remainder
)


class TestGeometricTail(SimpleTestCase):

    def test_bracket_is_the_geometric_remainder(self):
        tail = GeometricTail(ratio=0.5)
        lower, upper = tail.bracket(1.0, 10)
        self.assertAlmostEqual(lower, 2.0 ** -10, places=15)
        self.assertEqual(lower, upper)

    def test_diverges_at_zero(self):
        tail = GeometricTail(ratio=0.5)
        self.assertFalse(tail.converges(0.0))
        self.assertEqual(tail.bracket(0.0, 10), (math.inf, math.inf))
        self.assertEqual(tail.critical_exponent, 0.0)


class TestHurwitzTail(SimpleTestCase):

    def test_threshold(self):
        tail = HurwitzTail(power=2.0)
        self.assertEqual(tail.critical_exponent, 0.5)
        self.assertFalse(tail.converges(0.5))
        self.assertTrue(tail.converges(0.6))
        self.assertFalse(tail.behavior_at_critical())

    def test_exact_rule_has_a_closed_bracket(self):
        lower, upper = HurwitzTail(power=3.0).bracket(1.0, 100)
        self.assertEqual(lower, upper)
        self.assertEqual(lower, float(special.zeta(3.0, 101)))

    def test_shifts_sandwich_the_gauss_tail(self):
        tail = HurwitzTail(power=2.0, near_shift=0.0, far_shift=0.5)
        lower, upper = tail.bracket(1.0, 1000)
        exact = 1.0 / 1001
        self.assertLess(lower, exact)
        self.assertGreater(upper, exact)


class TestLogSquaredTail(SimpleTestCase):

    def test_converges_at_its_threshold(self):
        tail = LogSquaredTail(scale=1.0)
        self.assertTrue(tail.converges(1.0))
        self.assertFalse(tail.converges(0.999))
        self.assertTrue(tail.behavior_at_critical())

    def test_bracket_at_one_is_the_antiderivative(self):
        lower, upper = LogSquaredTail(scale=1.0).bracket(1.0, 100)
        self.assertAlmostEqual(lower, 1 / math.log(102))
        self.assertAlmostEqual(upper, 1 / math.log(101))

    def test_bracket_above_one(self):
        lower, upper = LogSquaredTail(scale=1.0).bracket(2.0, 100)
        m = np.arange(102, 10 ** 6, dtype=float)
        head = math.fsum((1 / (m * np.log(m) ** 2) ** 2).tolist())
        self.assertLess(lower, head + 1e-9)
        self.assertGreater(upper, head)

    def test_remainder_matches_a_direct_sum(self):
        m = np.arange(1000, 10 ** 6, dtype=float)
        direct = math.fsum((1 / (m * np.log(m) ** 2)).tolist())
        self.assertAlmostEqual(log_squared_remainder(1000) - log_squared_remainder(10 ** 6), direct, places=9)


class TestAlternatingSlopes(SimpleTestCase):

    def test_ratio_bounds(self):
        low, high = AlternatingSlopes((2.0, 3.0), 16.0).ratio_bounds
        self.assertAlmostEqual(low, 0.34)
        self.assertAlmostEqual(high, 17 / 35)

    def test_profile_is_continuous_and_alternates(self):
        profile = AlternatingSlopes((2.0, 3.0), 16.0)
        self.assertEqual(float(profile.phi(1.0)), 2.0)
        self.assertEqual(float(profile.phi(16.0)), 47.0)
        self.assertEqual(float(profile.phi(32.0)), 47.0 + 2 * 16)
        self.assertEqual(profile.slope(0), 2.0)
        self.assertEqual(profile.slope(1), 3.0)
        self.assertEqual(profile.slope(2), 2.0)

    def test_ratio_oscillates_between_the_bounds(self):
        profile = AlternatingSlopes((2.0, 3.0), 16.0)
        low, high = profile.ratio_bounds
        u = np.geomspace(16.0 ** 5, 16.0 ** 12, 4000)
        ratios = u / profile.phi(u)
        self.assertGreaterEqual(ratios.min(), low - 1e-6)
        self.assertLessEqual(ratios.max(), high + 1e-6)
        self.assertLess(ratios.min(), low + 0.01)
        self.assertGreater(ratios.max(), high - 0.01)


class TestIntegralTail(SimpleTestCase):

    def test_threshold_is_the_upper_ratio_bound(self):
        tail = IntegralTail(AlternatingSlopes((2.0, 3.0), 16.0), 0.0)
        self.assertAlmostEqual(tail.critical_exponent, 17 / 35)
        self.assertTrue(tail.converges(0.5))
        self.assertFalse(tail.converges(0.45))
        self.assertIsNone(tail.converges(tail.critical_exponent))
        self.assertEqual(tail.bracket(0.45, 100), (math.inf, math.inf))

    def test_bracket_is_ordered(self):
        tail = IntegralTail(AlternatingSlopes((2.0, 3.0), 16.0), 0.0)
        lower, upper = tail.bracket(1.0, 1000)
        self.assertGreater(lower, 0.0)
        self.assertLessEqual(lower, upper)


class TestRatioTail(SimpleTestCase):

    def test_three_way_verdict(self):
        tail = RatioTail(limsup=1 / 3, margin=1e-4)
        self.assertTrue(tail.converges(0.4))
        self.assertFalse(tail.converges(0.3))
        self.assertIsNone(tail.converges(1 / 3))
        self.assertFalse(tail.certified)

    def test_bracket(self):
        tail = RatioTail(limsup=1 / 3, margin=1e-4)
        self.assertEqual(tail.bracket(0.3, 100), (math.inf, math.inf))
        self.assertEqual(tail.bracket(1 / 3, 100), (0.0, math.inf))
        lower, upper = tail.bracket(1.0, 100)
        self.assertEqual(lower, 0.0)
        self.assertTrue(math.isfinite(upper))
