import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from boundary_dimension.boxdim import (
    BOURDON, GREEDY_BALL, SORTED_SWEEP, DimensionEstimate, GapExponentEstimate, PointCloud, check_geometric_grid,
    chord_threshold, covering_count_line, covering_count_sphere, dyadic_deltas, endpoint_cloud,
    estimate_box_dimension, falconer_check, gap_exponent_bounds, sandwich_counts
)
from boundary_dimension.exceptions import GeometryError, PreconditionError, SaturationError
from boundary_dimension.interval_partition import build_partition


def circle(count):
    angles = 2 * math.pi * np.arange(count) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


class TestPointCloud(SimpleTestCase):

    def test_line_cloud_is_sorted_and_deduplicated(self):
        cloud = PointCloud.line([0.5, 0.0, 0.5, 1.0, 0.5 + 1e-17])
        np.testing.assert_array_equal(cloud.points, [0.0, 0.5, 1.0])
        self.assertEqual(cloud.ambient_dimension, 1)

    def test_sphere_cloud_checks_norms(self):
        with self.assertRaises(GeometryError):
            PointCloud.sphere([[1.0, 1.0]])
        with self.assertRaises(GeometryError):
            PointCloud.sphere([1.0, 0.0])

    def test_sphere_cloud_merges_grid_neighbours(self):
        cloud = PointCloud.sphere([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        self.assertEqual(cloud.size, 3)
        np.testing.assert_array_equal(cloud.points[0], [-1.0, 0.0])
        self.assertEqual(cloud.ambient_dimension, 1)


class TestCoveringCounts(SimpleTestCase):

    def test_sorted_sweep(self):
        count = covering_count_line(PointCloud.line(np.linspace(0, 1, 11)), 0.25)
        self.assertEqual(count.count, 4)
        self.assertEqual(count.algorithm, SORTED_SWEEP)

    def test_delta_must_be_positive(self):
        with self.assertRaises(PreconditionError):
            covering_count_line(PointCloud.line([0.0, 1.0]), 0.0)

    def test_empty_cloud(self):
        with self.assertRaises(PreconditionError):
            covering_count_line(PointCloud.line([]), 0.1)

    def test_greedy_packing_on_the_circle(self):
        cloud = PointCloud.sphere([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        self.assertEqual(covering_count_sphere(cloud, 0.1).count, 4)
        count = covering_count_sphere(cloud, 2.0)
        self.assertEqual(count.count, 2)
        self.assertEqual(count.algorithm, GREEDY_BALL)

    def test_line_cloud_is_not_a_sphere_cloud(self):
        with self.assertRaises(PreconditionError):
            covering_count_sphere(PointCloud.line([0.0, 1.0]), 0.1)

    def test_chord_thresholds(self):
        self.assertAlmostEqual(chord_threshold(math.pi / 3), 1.0)
        self.assertEqual(chord_threshold(0.25, BOURDON), 0.5)
        with self.assertRaises(PreconditionError):
            chord_threshold(1.5, BOURDON)
        with self.assertRaises(PreconditionError):
            chord_threshold(0.1, 'euclidean')

    def test_sandwich_counts(self):
        cloud = PointCloud.sphere(circle(1000))
        wide, narrow = sandwich_counts(cloud, 0.05)
        self.assertLessEqual(wide, narrow)
        self.assertIsNone(sandwich_counts(PointCloud.line([0.0]), 0.05))


class TestDimensionEstimate(SimpleTestCase):

    def test_grid_must_be_geometric(self):
        with self.assertRaises(PreconditionError):
            check_geometric_grid(dyadic_deltas(2, 8))
        with self.assertRaises(PreconditionError):
            check_geometric_grid([0.5, 0.25, 0.125, 0.1, 0.05, 0.025, 0.0125, 0.00625])
        np.testing.assert_array_equal(check_geometric_grid(dyadic_deltas(2, 9)[::-1]), dyadic_deltas(2, 9))

    def test_equally_spaced_points(self):
        cloud = PointCloud.line(np.arange(10 ** 4) / 10 ** 4)
        estimate = estimate_box_dimension(cloud, dyadic_deltas(2, 9))
        self.assertGreaterEqual(estimate.lower_dim, 0.95)
        self.assertLessEqual(estimate.upper_dim, 1.0)
        self.assertEqual(estimate.saturated, ())
        self.assertEqual(estimate.window, (4, 5, 6, 7))

    def test_geometric_sequence_has_dimension_zero(self):
        cloud = PointCloud.line(2.0 ** -np.arange(0, 61))
        estimate = estimate_box_dimension(cloud, dyadic_deltas(20, 40))
        self.assertLessEqual(estimate.upper_dim, 0.1)
        self.assertEqual(estimate.counts[0].count, 21)

    def test_gauss_end_points(self):
        cloud = endpoint_cloud(build_partition('gauss', 10 ** 4))
        estimate = estimate_box_dimension(cloud, dyadic_deltas(6, 18))
        self.assertGreaterEqual(estimate.lower_dim, 0.45)
        self.assertLessEqual(estimate.upper_dim, 0.55)
        self.assertEqual(len(estimate.table()), 13)

    @pytest.mark.slow
    def test_gauss_end_points_at_a_million(self):
        cloud = endpoint_cloud(build_partition('gauss', 10 ** 6))
        estimate = estimate_box_dimension(cloud, dyadic_deltas(6, 18))
        self.assertGreaterEqual(estimate.lower_dim, 0.45)
        self.assertLessEqual(estimate.upper_dim, 0.55)
        self.assertEqual(estimate.saturated, ())

    def test_saturated_levels_are_dropped(self):
        cloud = PointCloud.line(np.arange(100) / 100)
        with self.assertRaises(SaturationError):
            estimate_box_dimension(cloud, dyadic_deltas(10, 20))

    def test_circle_has_dimension_one(self):
        cloud = PointCloud.sphere(circle(20000))
        estimate = estimate_box_dimension(cloud, 2 * math.pi * dyadic_deltas(4, 11))
        self.assertAlmostEqual(estimate.regression_slope, 1.0, delta=0.15)
        self.assertLessEqual(estimate.upper_dim, 1.0)

    def test_threads_do_not_change_the_estimate(self):
        cloud = endpoint_cloud(build_partition('gauss', 1000))
        serial = estimate_box_dimension(cloud, dyadic_deltas(4, 12))
        threaded = estimate_box_dimension(cloud, dyadic_deltas(4, 12), threads=3)
        self.assertEqual(serial.log_counts, threaded.log_counts)
        self.assertEqual(serial.upper_dim, threaded.upper_dim)


class TestGapExponents(SimpleTestCase):

    def test_gauss(self):
        estimate = gap_exponent_bounds(build_partition('gauss', 10 ** 4))
        self.assertAlmostEqual(estimate.L_lower, 0.5, places=3)
        self.assertAlmostEqual(estimate.L_upper, 0.5, places=3)
        self.assertGreater(estimate.sampled_to, 1e11)

    def test_interleaved_exponents_differ(self):
        partition = build_partition({'name': 'interleaved', 'slopes': [2, 3], 'period': 16}, 10 ** 4)
        estimate = gap_exponent_bounds(partition)
        self.assertAlmostEqual(estimate.L_lower, 0.34, delta=0.005)
        self.assertAlmostEqual(estimate.L_upper, 17 / 35, delta=0.005)
        self.assertGreater(estimate.gap, 0.1)

    def test_dyadic(self):
        self.assertLess(gap_exponent_bounds(build_partition('dyadic', 1000)).L_upper, 0.01)

    def test_without_the_rule_only_materialized_lengths_count(self):
        estimate = gap_exponent_bounds(build_partition('gauss', 10 ** 4), use_rule=False)
        self.assertAlmostEqual(estimate.sampled_to, math.log(10 ** 4))

    def test_needs_enough_intervals(self):
        with self.assertRaises(PreconditionError):
            gap_exponent_bounds(build_partition('middle-thirds', 2))


class TestFalconer(SimpleTestCase):

    def test_bounds(self):
        estimate = DimensionEstimate(0.4, 0.6, (), (), (), (), (), 0.5, ())
        gaps = GapExponentEstimate(0.3, 0.5, (), ())
        check = falconer_check(estimate, gaps)
        self.assertAlmostEqual(check.lower_bound, 0.4 * 0.4 / 0.6)
        self.assertTrue(check.holds())
        self.assertFalse(falconer_check(estimate, GapExponentEstimate(0.2, 0.5, (), ())).holds())
