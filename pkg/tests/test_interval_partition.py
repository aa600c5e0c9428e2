import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from boundary_dimension.exceptions import (
    NonSummableError, PartitionValidationError, PerturbationError, PreconditionError, RefinementCapError
)
from boundary_dimension.interval_partition import (
    BranchMap, GeneratorSpec, all_words, build_partition, periodic_continued_fraction, perturb_compactly,
    refine_partition
)
from boundary_dimension.tails import RatioTail


HALVES = {'name': 'explicit-list', 'intervals': [[0.0, 0.5], [0.5, 1.0]]}


class TestGeneratorSpec(SimpleTestCase):

    def test_parse(self):
        self.assertEqual(GeneratorSpec.parse('gauss'), GeneratorSpec('gauss'))
        spec = GeneratorSpec.parse({'name': 'interleaved', 'slopes': [2, 3], 'period': 16})
        self.assertEqual(spec.kwargs, {'slopes': (2, 3), 'period': 16})
        self.assertEqual(str(spec), 'interleaved(period=16, slopes=(2, 3))')


class TestGenerators(SimpleTestCase):

    def test_gauss(self):
        partition = build_partition('gauss', 1000)
        self.assertEqual(partition.truncation, 1000)
        self.assertTrue(partition.unbounded)
        self.assertEqual(partition.count_available, 'unbounded')
        self.assertEqual(partition.interval(1), (0.5, 1.0))
        self.assertEqual(partition.interval(2), (1 / 3, 0.5))
        self.assertAlmostEqual(partition.lengths[2], 1 / 12)

    def test_gauss_restricted(self):
        partition = build_partition({'name': 'gauss-restricted', 'digits': [2, 1]}, 10)
        self.assertEqual(partition.digits, (1, 2))
        self.assertFalse(partition.unbounded)
        self.assertEqual(partition.generator, 'gauss-restricted(1,2)')

    def test_gauss_restricted_rejects_repeated_digits(self):
        with self.assertRaises(PartitionValidationError):
            build_partition({'name': 'gauss-restricted', 'digits': [1, 1]}, 10)

    def test_dyadic_truncation_is_capped(self):
        with self.assertLogs('boundary_dimension.partition_generators', 'WARNING'):
            partition = build_partition('dyadic', 5000)
        self.assertEqual(partition.truncation, 1000)
        self.assertEqual(partition.interval(3), (0.125, 0.25))

    def test_power_law(self):
        partition = build_partition({'name': 'power-law', 'exponent': 3}, 100)
        self.assertAlmostEqual(partition.right[0], 1.0)
        self.assertAlmostEqual(partition.tail.critical_exponent, 1 / 3)

    def test_power_law_must_be_summable(self):
        with self.assertRaises(NonSummableError):
            build_partition({'name': 'power-law', 'exponent': 1}, 100)

    def test_log_squared_tiles(self):
        partition = build_partition('log-squared', 10 ** 4)
        self.assertTrue(partition.tiling)
        self.assertAlmostEqual(partition.right[0], 1.0, places=9)
        self.assertEqual(partition.tail.critical_exponent, 1.0)

    def test_interleaved(self):
        partition = build_partition({'name': 'interleaved', 'slopes': [2, 3], 'period': 16}, 10 ** 4)
        self.assertTrue(partition.tiling)
        self.assertAlmostEqual(partition.tail.critical_exponent, 17 / 35)
        self.assertTrue(np.all(np.diff(partition.lengths) <= 0))

    def test_interleaved_needs_summable_slopes(self):
        with self.assertRaises(NonSummableError):
            build_partition({'name': 'interleaved', 'slopes': [1, 3]}, 100)

    def test_explicit_list_is_stored_by_decreasing_right_end(self):
        partition = build_partition(HALVES, 10)
        self.assertEqual(partition.interval(1), (0.5, 1.0))
        self.assertTrue(partition.tiling)
        self.assertFalse(partition.unbounded)
        self.assertEqual(partition.count_available, 2)

    def test_explicit_list_names_overlapping_intervals(self):
        spec = {'name': 'explicit-list', 'intervals': [[0.0, 0.5], [0.4, 0.8]]}
        with self.assertRaisesMessage(PartitionValidationError,
                                      'interiors overlap: interval 1 [0.0, 0.5] and interval 2 [0.4, 0.8]'):
            build_partition(spec, 10)

    def test_explicit_list_rejects_empty_intervals(self):
        with self.assertRaisesMessage(PartitionValidationError, 'interval 2 [0.5, 0.5] is empty'):
            build_partition({'name': 'explicit-list', 'intervals': [[0.0, 0.5], [0.5, 0.5]]}, 10)

    def test_explicit_list_must_lie_in_the_unit_interval(self):
        with self.assertRaises(PartitionValidationError):
            build_partition({'name': 'explicit-list', 'intervals': [[0.5, 1.5]]}, 10)

    def test_truncation_must_be_positive(self):
        with self.assertRaises(PartitionValidationError):
            build_partition('gauss', 0)

    def test_custom_length_rule_from_an_app(self):
        partition = build_partition('inverse-cube', 1000)
        self.assertEqual(partition.generator, 'custom-lengths(inverse-cube)')
        self.assertIsInstance(partition.tail, RatioTail)
        self.assertAlmostEqual(partition.tail.critical_exponent, 1 / 3, places=2)
        self.assertEqual(partition.accumulation_point, 0.0)

    def test_generator_from_an_app(self):
        partition = build_partition('middle-thirds', 10)
        self.assertEqual(partition.truncation, 2)
        self.assertFalse(partition.tiling)


class TestIntervalPartition(SimpleTestCase):

    def test_endpoints_count_shared_points_once(self):
        np.testing.assert_array_equal(build_partition(HALVES, 10).endpoints(), [0.0, 0.5, 1.0])
        self.assertEqual(build_partition('gauss', 100).endpoints().size, 101)

    def test_sorted_lengths(self):
        partition = build_partition({'name': 'explicit-list', 'intervals': [[0.9, 1.0], [0.0, 0.5]]}, 10)
        np.testing.assert_allclose(partition.sorted_lengths.values, [0.5, 0.1])
        self.assertEqual(list(partition.sorted_lengths.permutation), [1, 0])

    def test_arrays_are_read_only(self):
        partition = build_partition('gauss', 10)
        with self.assertRaises(ValueError):
            partition.lengths[0] = 1.0

    def test_finite_part(self):
        finite = build_partition('gauss', 10).finite_part()
        self.assertFalse(finite.unbounded)
        self.assertEqual(finite.generator, 'gauss[:10]')

    def test_fingerprint_follows_content(self):
        self.assertEqual(build_partition('gauss', 10).fingerprint, build_partition('gauss', 10).fingerprint)
        self.assertNotEqual(build_partition('gauss', 10).fingerprint, build_partition('gauss', 11).fingerprint)

    def test_rows(self):
        self.assertEqual(build_partition(HALVES, 10).rows()[0], (1, 0.5, 1.0, 0.5))


class TestBranchMap(SimpleTestCase):

    def test_gauss_cylinders(self):
        branch_map = BranchMap(build_partition('gauss', 100))
        self.assertTrue(branch_map.is_gauss)
        cylinder = branch_map.cylinder((1,))
        self.assertEqual((cylinder.left, cylinder.right), (0.5, 1.0))
        cylinder = branch_map.cylinder((2, 1))
        self.assertAlmostEqual(cylinder.left, 1 / 3)
        self.assertAlmostEqual(cylinder.right, 0.4)
        self.assertTrue(branch_map.cylinder((2,)).contains(cylinder))

    def test_linear_cylinders(self):
        branch_map = BranchMap(build_partition(HALVES, 10))
        cylinder = branch_map.cylinder((1, 2))
        self.assertEqual((cylinder.left, cylinder.right), (0.5, 0.75))
        self.assertEqual(cylinder.derivative_inf, 4.0)

    def test_expansion_and_distortion(self):
        self.assertEqual(BranchMap(build_partition(HALVES, 10)).check_expansion(), 2.0)
        gauss = BranchMap(build_partition('gauss', 100))
        self.assertGreater(gauss.check_expansion(), 1.0)
        self.assertLessEqual(gauss.renyi_constant(), 2.0)

    def test_contracting_branch_is_rejected(self):
        branch_map = BranchMap(build_partition({'name': 'explicit-list', 'intervals': [[0.0, 1.0]]}, 10))
        with self.assertRaises(PartitionValidationError):
            branch_map.check_expansion()

    def test_hull_of_restricted_digits(self):
        branch_map = BranchMap(build_partition({'name': 'gauss-restricted', 'digits': [1, 2]}, 10))
        low, high = branch_map.hull((1, 2))
        self.assertAlmostEqual(low, (math.sqrt(3) - 1) / 2)
        self.assertAlmostEqual(high, math.sqrt(3) - 1)

    def test_periodic_continued_fraction(self):
        self.assertAlmostEqual(periodic_continued_fraction(1, 1), (math.sqrt(5) - 1) / 2)


class TestRefinement(SimpleTestCase):

    def test_linear_refinement_tiles(self):
        refined = refine_partition(BranchMap(build_partition(HALVES, 10)), 3)
        self.assertEqual(refined.truncation, 8)
        np.testing.assert_allclose(refined.lengths, 1 / 8)
        self.assertTrue(refined.tiling)
        self.assertEqual(refined.generator, 'explicit-list^3')

    def test_gauss_refinement(self):
        refined = refine_partition(BranchMap(build_partition('gauss', 100)), 2, alphabet=3)
        self.assertEqual(refined.truncation, 9)
        self.assertEqual(refined.words.shape, (9, 2))
        self.assertAlmostEqual(refined.interval(1)[1], 0.8)

    def test_full_gauss_refinement_needs_an_alphabet(self):
        with self.assertRaises(PreconditionError):
            refine_partition(BranchMap(build_partition('gauss', 100)), 2)

    @override_settings(BD_REFINEMENT_CAP=10)
    def test_refinement_cap(self):
        with self.assertRaises(RefinementCapError) as context:
            refine_partition(BranchMap(build_partition(HALVES, 10)), 4)
        self.assertEqual(context.exception.required, 16)

    def test_all_words(self):
        self.assertEqual(all_words([1, 2], 2).tolist(), [[1, 1], [1, 2], [2, 1], [2, 2]])


class TestPerturbation(SimpleTestCase):

    def test_replace_the_top_interval(self):
        partition = build_partition('dyadic', 20)
        perturbed = perturb_compactly(partition, 0.5, [(0.5, 0.75), (0.75, 1.0)])
        self.assertEqual(perturbed.truncation, 21)
        self.assertEqual(perturbed.tail_index, 20)
        self.assertEqual(perturbed.interval(1), (0.75, 1.0))
        self.assertIs(perturbed.tail, partition.tail)

    def test_tail_keeps_counting_from_the_original_truncation(self):
        partition = build_partition('gauss', 1000)
        perturbed = perturb_compactly(partition, 0.5, [(0.5, 0.75), (0.75, 1.0)])
        self.assertEqual(perturbed.truncation, 1001)
        self.assertEqual(perturbed.tail_index, 1000)
        self.assertEqual(partition.tail_index, 1000)
        self.assertIsNone(perturbed.finite_part().tail_start)

    def test_perturbing_twice(self):
        partition = build_partition('gauss', 1000)
        once = perturb_compactly(partition, 0.5, [(0.5, 0.75), (0.75, 1.0)])
        twice = perturb_compactly(once, 0.75, [(0.75, 0.8), (0.8, 1.0)])
        self.assertEqual(twice.truncation, 1002)
        self.assertEqual(twice.tail_index, 1000)

    def test_replacement_must_keep_the_mass(self):
        with self.assertRaisesMessage(PerturbationError, 'tiled mass'):
            perturb_compactly(build_partition('dyadic', 20), 0.5, [(0.5, 0.75)])

    def test_region_must_not_cut_an_interval(self):
        with self.assertRaisesMessage(PerturbationError, 'meets the region'):
            perturb_compactly(build_partition('dyadic', 20), 0.6, [(0.6, 1.0)])

    def test_region_start_must_lie_inside(self):
        with self.assertRaises(PerturbationError):
            perturb_compactly(build_partition('dyadic', 20), 1.0, [(0.5, 1.0)])
