from boundary_dimension.brokers import async_broker, sync_broker
from boundary_dimension.decorators import cache_function
from boundary_dimension.interval_partition import build_partition
from boundary_dimension.pressure import pressure_curve, pressure_linear


def sample_exponent() -> float:
    return 1.0


@cache_function()
def gauss_pressure(truncation: int):
    return pressure_linear(build_partition('gauss', truncation), sample_exponent()).value


@cache_function(timeout=60)
def dyadic_pressure(truncation: int):
    return pressure_linear(build_partition('dyadic', truncation), sample_exponent()).value


@cache_function(broker=sync_broker)
def cantor_pressure(branches: int):
    return pressure_linear(build_partition('middle-thirds', branches), sample_exponent()).value


@cache_function(backend='dummy')
def power_law_pressure(truncation: int):
    partition = build_partition({'name': 'power-law', 'exponent': 2.0}, truncation)
    return pressure_linear(partition, sample_exponent()).value


@cache_function(broker=async_broker)
def gauss_curve(truncation: int):
    exponent = sample_exponent()
    return [sample.value for sample in pressure_curve(build_partition('gauss', truncation), [exponent, 2 * exponent])]
