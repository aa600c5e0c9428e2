import os
import tempfile

from django.test import SimpleTestCase

from boundary_dimension.config import DEFAULT_TOLERANCE, MAX_TRUNCATION, RunConfig
from boundary_dimension.exceptions import ConfigError


RUN = """\
partition:
  generator: gauss
  truncation: 1000
pressure:
  t_min: 0.5
  t_max: 2.0
tolerance: 0.01
threads: 4
"""


class TestRunConfig(SimpleTestCase):

    def test_partition_spec(self):
        config = RunConfig.from_text(RUN, 'run.yaml')
        spec, truncation = config.partition_spec()
        self.assertEqual(spec.name, 'gauss')
        self.assertEqual(truncation, 1000)
        self.assertEqual(config.tolerance, 0.01)
        self.assertEqual(config.threads, 4)
        self.assertEqual(config.number('pressure.t_max'), 2.0)

    def test_partition_shorthand_and_parameters(self):
        spec, truncation = RunConfig.from_text('partition: dyadic\n').partition_spec()
        self.assertEqual((spec.name, truncation), ('dyadic', 10 ** 4))
        config = RunConfig.from_text('partition:\n  generator: interleaved\n  slopes: [2, 3]\n  period: 16\n')
        spec, _ = config.partition_spec()
        self.assertEqual(str(spec), 'interleaved(period=16, slopes=(2, 3))')

    def test_defaults(self):
        config = RunConfig.from_text('')
        self.assertEqual(config.tolerance, DEFAULT_TOLERANCE)
        self.assertEqual(config.threads, 1)
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.number('pressure.t_min', 0.25), 0.25)
        self.assertIsNone(config.integer('boxdim.j_min', None))

    def test_unknown_section_names_its_line(self):
        with self.assertRaises(ConfigError) as raised:
            RunConfig.from_text('tolerance: 0.1\n\nbogus:\n  a: 1\n', 'run.yaml')
        self.assertEqual(raised.exception.line, 3)
        self.assertEqual(raised.exception.key, 'bogus')
        self.assertTrue(str(raised.exception).startswith('run.yaml:3: Unknown section'))

    def test_invalid_yaml(self):
        with self.assertRaises(ConfigError) as raised:
            RunConfig.from_text('partition: [gauss\npressure: {\n', 'run.yaml')
        self.assertIn('Invalid YAML', str(raised.exception))
        self.assertIsNotNone(raised.exception.line)

    def test_config_must_be_a_mapping(self):
        with self.assertRaisesMessage(ConfigError, 'run.yaml:1: The config must be a mapping'):
            RunConfig.from_text('- gauss\n', 'run.yaml')

    def test_sections_must_be_mappings(self):
        with self.assertRaisesMessage(ConfigError, 'Section must be a mapping [pressure]'):
            RunConfig.from_text('pressure: 3\n')
        with self.assertRaisesMessage(ConfigError, 'Section must be a list of partitions'):
            RunConfig.from_text('partitions:\n  generator: gauss\n')

    def test_bad_values_name_their_line(self):
        config = RunConfig.from_text(RUN.replace('t_max: 2.0', 't_max: two'), 'run.yaml')
        with self.assertRaisesMessage(ConfigError, "run.yaml:6: Expected a number, got 'two' [pressure.t_max]"):
            config.number('pressure.t_max')

    def test_range_checks(self):
        config = RunConfig.from_text(RUN)
        with self.assertRaisesMessage(ConfigError, 'Must be at most 1.0'):
            config.number('pressure.t_max', maximum=1.0)
        with self.assertRaisesMessage(ConfigError, 'Must be at least 2000'):
            config.integer('partition.truncation', minimum=2000)
        with self.assertRaisesMessage(ConfigError, 'Expected an integer'):
            config.integer('pressure.t_min')

    def test_top_level_values_are_validated(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_text('tolerance: -1\n')
        with self.assertRaises(ConfigError):
            RunConfig.from_text('threads: 0\n')
        with self.assertRaises(ConfigError):
            RunConfig.from_text('seed: true\n')

    def test_missing_key(self):
        config = RunConfig.from_text(RUN, 'run.yaml')
        with self.assertRaisesMessage(ConfigError, 'Missing required key [bowen.t_min]'):
            config.get('bowen.t_min')
        with self.assertRaisesMessage(ConfigError, 'run.yaml:4: Missing required key [pressure.t_step]'):
            config.number('pressure.t_step')

    def test_choice_and_vector(self):
        config = RunConfig.from_text('orbit:\n  metric: bourdon\n  xi: [0.5, 0.25]\n')
        self.assertEqual(config.choice('orbit.metric', ('spherical', 'bourdon')), 'bourdon')
        self.assertEqual(config.vector('orbit.xi', length=2), (0.5, 0.25))
        with self.assertRaisesMessage(ConfigError, 'Expected 1 numbers, got 2'):
            config.vector('orbit.xi', length=1)
        with self.assertRaises(ConfigError):
            config.choice('orbit.metric', ('spherical',))

    def test_truncation_is_capped(self):
        config = RunConfig.from_text(f'partition:\n  generator: gauss\n  truncation: {MAX_TRUNCATION + 1}\n')
        with self.assertRaisesMessage(ConfigError, 'partition.truncation'):
            config.partition_spec()

    def test_missing_generator(self):
        with self.assertRaisesMessage(ConfigError, 'Missing generator name [partition.generator]'):
            RunConfig.from_text('partition:\n  truncation: 10\n').partition_spec()

    def test_partition_keys(self):
        config = RunConfig.from_text('partitions:\n  - gauss\n  - dyadic\npartition: gauss\n')
        self.assertEqual(config.partition_keys(), ['partitions.0', 'partitions.1', 'partition'])
        spec, _ = config.partition_spec('partitions.1')
        self.assertEqual(spec.name, 'dyadic')


class TestOverrides(SimpleTestCase):

    def test_command_line_wins(self):
        config = RunConfig.from_text(RUN).override(tolerance=1e-4, truncation=500, threads=2)
        self.assertEqual(config.tolerance, 1e-4)
        self.assertEqual(config.threads, 2)
        self.assertEqual(config.partition_spec()[1], 500)

    def test_overrides_are_range_checked(self):
        config = RunConfig.from_text(RUN)
        with self.assertRaisesMessage(ConfigError, '--tol must be positive'):
            config.override(tolerance=0.0)
        with self.assertRaisesMessage(ConfigError, '--truncation must lie in'):
            config.override(truncation=MAX_TRUNCATION + 1)
        with self.assertRaisesMessage(ConfigError, '--threads must be at least 1'):
            config.override(threads=0)


class TestConfigHash(SimpleTestCase):

    def test_threads_do_not_change_the_hash(self):
        one = RunConfig.from_text(RUN)
        other = RunConfig.from_text(RUN.replace('threads: 4', 'threads: 1'))
        self.assertEqual(one.hash, other.hash)
        self.assertNotIn('threads', one.effective())

    def test_results_relevant_values_change_the_hash(self):
        base = RunConfig.from_text(RUN)
        self.assertNotEqual(base.hash, RunConfig.from_text(RUN.replace('0.01', '0.02')).hash)
        self.assertNotEqual(base.hash, RunConfig.from_text(RUN).override(truncation=10).hash)

    def test_key_order_does_not_matter(self):
        one = RunConfig.from_text('tolerance: 0.1\nseed: 3\n')
        other = RunConfig.from_text('seed: 3\ntolerance: 0.1\n')
        self.assertEqual(one.hash, other.hash)
        self.assertEqual(len(one.hash), 64)


class TestLoad(SimpleTestCase):

    def test_load_from_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'run.yaml')
            with open(path, 'w', encoding='utf-8') as stream:
                stream.write(RUN)
            config = RunConfig.load(path)
        self.assertEqual(config.path, path)
        self.assertEqual(config.partition_spec()[1], 1000)

    def test_missing_file(self):
        with self.assertRaisesMessage(ConfigError, 'Cannot read config'):
            RunConfig.load('/nonexistent/run.yaml')
