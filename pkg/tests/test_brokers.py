import math
from unittest import mock

from django.test import SimpleTestCase, override_settings
from freezegun import freeze_time

from boundary_dimension import brokers
from boundary_dimension.cache.cache import make_cache_key
from boundary_dimension.cache.registry import function_cache_registry
from boundary_dimension.interval_partition import build_partition
from boundary_dimension.pressure import pressure_curve

from testapp import cached_functions


class TestBrokers(SimpleTestCase):

    def setUp(self):
        function_cache_registry.clear()

    @mock.patch.object(brokers, 'enqueue')
    @mock.patch.object(cached_functions, 'sample_exponent')
    def test_cache_function_with_async_broker(self, get_exponent, mock_enqueue):
        get_exponent.return_value = 1.0
        cache = cached_functions.gauss_curve.cache
        key = make_cache_key(cached_functions.gauss_curve, ((100,), {}))
        expected = [sample.value for sample in pressure_curve(build_partition('gauss', 100), [1.0, 2.0])]

        with freeze_time('2023-12-01T10:00:00Z'):
            result1 = cached_functions.gauss_curve(100)
        self.assertEqual(cache.get_active(key).result, expected)
        with freeze_time('2023-12-01T10:00:01Z'):
            result2 = cached_functions.gauss_curve(100)
        self.assertEqual(get_exponent.call_count, 1)
        self.assertEqual(result1, result2)

        with freeze_time('2023-12-01T10:05:00Z'):
            result3 = cached_functions.gauss_curve(100)
        self.assertEqual(cache.get_expired(key).result, expected)
        self.assertFalse(mock_enqueue.called)
        self.assertEqual(result1, result3)

        with freeze_time('2023-12-01T10:05:01Z'):
            result4 = cached_functions.gauss_curve(100)
        # The refresh is queued, nothing is recomputed in this process
        self.assertTrue(mock_enqueue.called)
        self.assertEqual(get_exponent.call_count, 1)
        self.assertEqual(result1, result4)

    @mock.patch.object(brokers, 'enqueue')
    def test_async_broker_queues_the_sync_broker_by_name(self, mock_enqueue):
        brokers.async_broker(cached_functions.gauss_curve, 60, ((100,), {}), 'default')
        mock_enqueue.assert_called_once_with(
            brokers.sync_broker, 'testapp.cached_functions.gauss_curve', 60, ((100,), {}), 'default'
        )

    @mock.patch.object(cached_functions, 'sample_exponent')
    def test_queued_job_refreshes_the_entry(self, get_exponent):
        get_exponent.side_effect = [1.0, 0.75]
        key = make_cache_key(cached_functions.gauss_curve, ((100,), {}))
        with freeze_time('2023-12-01T10:00:00Z'):
            cached_functions.gauss_curve(100)
        # What an RQ worker runs for the queued job
        with freeze_time('2023-12-01T10:05:01Z'):
            brokers.sync_broker('testapp.cached_functions.gauss_curve', 60, ((100,), {}), 'default')
        expected = [sample.value for sample in pressure_curve(build_partition('gauss', 100), [0.75, 1.5])]
        self.assertEqual(cached_functions.gauss_curve.cache.get_active(key).result, expected)

    @mock.patch.object(cached_functions, 'sample_exponent')
    def test_sync_broker_accepts_dotted_path(self, get_exponent):
        get_exponent.return_value = 0.5
        brokers.sync_broker('testapp.cached_functions.cantor_pressure', 60, ((2,), {}))
        key = make_cache_key(cached_functions.cantor_pressure, ((2,), {}))
        refreshed = cached_functions.cantor_pressure.cache.get_active(key).result
        self.assertAlmostEqual(refreshed, math.log(2) - 0.5 * math.log(3), places=12)

    def test_get_broker_prefers_explicit_broker(self):
        self.assertIs(brokers.get_broker(brokers.async_broker), brokers.async_broker)

    def test_get_broker_from_settings(self):
        self.assertIsInstance(brokers.get_broker(), brokers.SyncBroker)
        with override_settings(BD_DEFAULT_BROKER='boundary_dimension.brokers.async_broker'):
            self.assertIs(brokers.get_broker(), brokers.async_broker)
        with override_settings(BD_DEFAULT_BROKER='boundary_dimension.brokers.AsyncBroker'):
            self.assertIsInstance(brokers.get_broker(), brokers.AsyncBroker)

    @override_settings(BD_DEFAULT_BROKER='boundary_dimension.brokers.Missing')
    def test_get_broker_falls_back_to_sync(self):
        with self.assertLogs('boundary_dimension.brokers', 'WARNING') as logs:
            self.assertIs(brokers.get_broker(), brokers.sync_broker)
        self.assertIn("Cannot import broker 'boundary_dimension.brokers.Missing'", logs.output[0])
