import csv
import json
import os
import tempfile
from io import StringIO
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from boundary_dimension.reports import Verdict
from boundary_dimension.verification import Assertion, VerificationReport


GAUSS = """\
partition:
  generator: gauss
  truncation: 1000
pressure:
  t_min: 0.4
  t_max: 1.0
  t_step: 0.2
"""

CYCLIC = """\
group:
  dimension: 2
  vectors: [[1.0]]
orbit:
  xi: [0.3]
  radius: 10
"""


def failing_report(*args, **kwargs):
    report = VerificationReport('gauss')
    report.add(Assertion('s_inf_between_gap_exponents', 'L_lower - eps <= s_inf <= L_upper + eps', Verdict.FAIL))
    return report


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.directory = directory.name
        self.out = os.path.join(self.directory, 'out')

    def write_config(self, text, name='run.yaml'):
        path = os.path.join(self.directory, name)
        with open(path, 'w', encoding='utf-8') as stream:
            stream.write(text)
        return path

    def call(self, name, text, **options):
        stdout = StringIO()
        options.setdefault('out', self.out)
        call_command(name, config=self.write_config(text), stdout=stdout, **options)
        return stdout.getvalue()

    def read_csv(self, name, out=None):
        with open(os.path.join(out or self.out, name), encoding='utf-8') as stream:
            lines = stream.read().splitlines()
        header = dict(line[2:].split('=', 1) for line in lines if line.startswith('# '))
        rows = list(csv.DictReader(line for line in lines if not line.startswith('#')))
        return header, rows

    def read_json(self, name):
        with open(os.path.join(self.out, name), encoding='utf-8') as stream:
            return json.load(stream)


class TestPartitionCommands(CommandTestCase):

    def test_pressure(self):
        output = self.call('pressure', GAUSS)
        header, rows = self.read_csv('pressure.csv')
        self.assertEqual([row['t'] for row in rows], ['0.4', '0.6', '0.8', '1.0'])
        self.assertEqual(rows[0]['infinite'], 'true')
        self.assertEqual(rows[0]['status'], 'infinite')
        self.assertEqual(rows[-1]['infinite'], 'false')
        self.assertEqual(json.loads(header['subcommand']), 'pressure')
        self.assertEqual(json.loads(header['truncations']), {'partition': 1000})
        self.assertEqual(len(json.loads(header['config_hash'])), 64)
        self.assertIn('4 values of t, 1 with infinite pressure', output)

    def test_threads_do_not_change_the_files(self):
        contents = []
        for threads in (1, 3):
            out = os.path.join(self.directory, f'out{threads}')
            self.call('pressure', GAUSS, out=out, threads=threads)
            with open(os.path.join(out, 'pressure.csv'), encoding='utf-8') as stream:
                contents.append(stream.read())
        self.assertEqual(contents[0], contents[1])

    def test_s_infinity_with_truncation_override(self):
        self.call('s_infinity', 'partition: dyadic\n', truncation=50)
        report = self.read_json('s_infinity.json')
        self.assertEqual(report['s_infinity']['s_low'], 0.0)
        self.assertEqual(report['s_infinity']['divergence_behavior'], 'converges_at_s_inf')
        self.assertEqual(report['provenance']['truncations'], {'partition': 50})

    def test_s_infinity_from_partial_sums(self):
        output = self.call('s_infinity', 'partition: gauss\ns_infinity:\n  method: partial-sums\n')
        report = self.read_json('s_infinity.json')
        self.assertEqual(report['s_infinity']['method'], 'partial-sums')
        self.assertLessEqual(report['s_infinity']['s_low'], 0.5)
        self.assertGreaterEqual(report['s_infinity']['s_high'], 0.5)
        self.assertIn('by partial-sums', output)

    def test_bowen(self):
        self.call('bowen', 'partition: middle-thirds\n')
        report = self.read_json('bowen.json')
        self.assertLessEqual(report['intersection']['low'], 0.6309297535714574 + 1e-9)
        self.assertGreaterEqual(report['intersection']['high'], 0.6309297535714574 - 1e-9)
        self.assertFalse(report['intersection']['empty'])

    def test_boxdim_of_end_points(self):
        self.call('boxdim', 'partition:\n  generator: gauss\n  truncation: 10000\n')
        report = self.read_json('boxdim.json')
        self.assertGreaterEqual(report['lower_dim'], 0.45)
        self.assertLessEqual(report['upper_dim'], 0.55)
        _, rows = self.read_csv('boxdim.csv')
        self.assertEqual(len(rows), 13)

    def test_gaps(self):
        self.call('gaps', 'partition:\n  generator: gauss\n  truncation: 10000\n')
        report = self.read_json('gaps.json')
        self.assertAlmostEqual(report['L_upper'], 0.5, places=3)
        self.assertEqual(report['generator'], 'gauss')

    def test_unknown_generator(self):
        with self.assertRaises(CommandError) as raised:
            self.call('pressure', 'partition: nope\n')
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn("Unknown generator 'nope'", str(raised.exception))

    def test_config_is_required(self):
        with self.assertRaises(CommandError) as raised:
            call_command('pressure', out=self.out)
        self.assertEqual(raised.exception.returncode, 2)

    def test_config_errors_name_the_line(self):
        with self.assertRaises(CommandError) as raised:
            self.call('pressure', GAUSS.replace('t_step: 0.2', 't_step: -0.2'))
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn('run.yaml:7:', str(raised.exception))


class TestGroupCommands(CommandTestCase):

    def test_orbit(self):
        self.call('orbit', CYCLIC)
        header, rows = self.read_csv('orbit.csv')
        self.assertEqual(len(rows), 21)
        self.assertEqual(list(rows[0]), ['x0', 'x1'])
        self.assertEqual(json.loads(header['truncations']), {'orbit.radius': 10})

    def test_orbit_of_the_fixed_point(self):
        with self.assertRaises(CommandError) as raised:
            self.call('orbit', CYCLIC.replace('xi: [0.3]', 'xi: infinity'))
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn('xi is fixed by P', str(raised.exception))

    def test_bad_group(self):
        with self.assertRaises(CommandError) as raised:
            self.call('orbit', CYCLIC.replace('[[1.0]]', '[[1.0, 2.0]]'))
        self.assertEqual(raised.exception.returncode, 2)

    def test_poincare(self):
        config = CYCLIC + 'poincare:\n  radius: 50\n  s: [0.25, 1.0]\ndichotomy:\n  sequences:\n    - kind: power\n      power: 2\n'
        self.call('poincare', config)
        _, rows = self.read_csv('poincare.csv')
        self.assertEqual([row['tail_classification'] for row in rows], ['divergent-minorant', 'convergent-with-bound'])
        report = self.read_json('poincare.json')
        self.assertEqual(report['target'], 0.5)
        self.assertLessEqual(report['critical_exponent']['s_low'], 0.5)
        self.assertGreaterEqual(report['critical_exponent']['s_high'], 0.5)
        self.assertTrue(report['dichotomy'][0]['predicted'])

    def test_counting(self):
        self.call('counting', CYCLIC + 'counting:\n  t_max: 20.0\n  levels: 10\n')
        report = self.read_json('counting.json')
        self.assertAlmostEqual(report['slope'], 0.5, delta=0.01)
        _, rows = self.read_csv('counting.csv')
        self.assertEqual(len(rows), 10)

    def test_counting_threshold_too_small(self):
        with self.assertRaises(CommandError) as raised:
            self.call('counting', CYCLIC + 'counting:\n  t_max: 10.0\n')
        self.assertEqual(raised.exception.returncode, 2)


class TestVerificationCommands(CommandTestCase):

    def test_verify_main(self):
        output = self.call('verify_main', 'partition:\n  generator: gauss\n  truncation: 10000\n')
        self.assertIn('gauss: PASS', output)
        _, rows = self.read_csv('verify_main.csv')
        self.assertTrue(all(row['verdict'] == 'PASS' for row in rows))

    @mock.patch('boundary_dimension.management.commands.verify_main.verify_main', side_effect=failing_report)
    def test_verify_main_failure(self, verify):
        with self.assertRaises(CommandError) as raised:
            self.call('verify_main', 'partition:\n  generator: gauss\n  truncation: 100\n')
        self.assertEqual(raised.exception.returncode, 1)
        self.assertTrue(verify.called)
        # The report is written before the exit
        self.assertEqual(self.read_json('verify_main.json')['reports'][0]['verdict'], 'FAIL')

    def test_verify_main_needs_a_partition(self):
        with self.assertRaises(CommandError) as raised:
            self.call('verify_main', 'tolerance: 0.01\n')
        self.assertEqual(raised.exception.returncode, 2)

    @mock.patch('boundary_dimension.management.commands.verify_hdim.verify_hdim', side_effect=failing_report)
    def test_verify_hdim_failure(self, verify):
        with self.assertRaises(CommandError) as raised:
            self.call('verify_hdim', CYCLIC)
        self.assertEqual(raised.exception.returncode, 1)
        _, rows = self.read_csv('verify_hdim.csv')
        self.assertEqual(rows[0]['verdict'], 'FAIL')

    def test_verify_hdim_fixed_point(self):
        with self.assertRaises(CommandError) as raised:
            self.call('verify_hdim', CYCLIC.replace('xi: [0.3]', 'xi: infinity') + 'counting:\n  t_max: 14.0\n')
        self.assertEqual(raised.exception.returncode, 2)

    def test_selftest(self):
        output = self.call('selftest', 'selftest:\n  samples: 20\n  seed: 1\n')
        _, rows = self.read_csv('selftest.csv')
        self.assertEqual([row['property'] for row in rows], [
            'bourdon-sine', 'busemann-cocycle', 'busemann-below-distance', 'gromov-product-z-independence',
            'horosphere-distance-forms', 'comparison-triangle', 'parabolic-sandwich-spread',
        ])
        self.assertIn('checks passed', output)
