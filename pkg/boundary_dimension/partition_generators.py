"""Built-in partition generators.

Each generator is registered under its config name and returns an unvalidated
:class:`~boundary_dimension.interval_partition.IntervalPartition`; ``build_partition`` validates it.
Other apps add generators from their own ``partition_generators`` module, or register a bare
length rule with :func:`register_length_rule`.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from boundary_dimension.exceptions import NonSummableError, PartitionValidationError
from boundary_dimension.interval_partition import (
    GAUSS_ANALYTIC, IntervalPartition, LengthRule, layout_from_tail, layout_from_top, layout_from_total, rule_ratios
)
from boundary_dimension.registry import generator_registry, register_generator
from boundary_dimension.settings import settings
from boundary_dimension.tails import (
    AlternatingSlopes, GeometricTail, HurwitzTail, IntegralTail, LogSquaredTail, RatioTail, log_squared_remainder
)


logger = logging.getLogger(__name__)


# Lengths 2 ** -n underflow shortly after this
DYADIC_MAX_TRUNCATION = 1000

NORMALIZER_TERMS = 2 ** 20


@dataclass(frozen=True)
class GaussRule:
    monotone = True

    def neg_log_length(self, log_n):
        log_n = np.asarray(log_n, dtype=float)
        return log_n + np.logaddexp(log_n, 0.0)


@dataclass(frozen=True)
class DyadicRule:
    monotone = True

    def neg_log_length(self, log_n):
        with np.errstate(over='ignore'):
            return np.exp(np.asarray(log_n, dtype=float)) * math.log(2)


@dataclass(frozen=True)
class PowerLawRule:
    power: float
    log_norm: float

    monotone = True

    def neg_log_length(self, log_n):
        return self.power * np.asarray(log_n, dtype=float) + self.log_norm


@dataclass(frozen=True)
class LogSquaredRule:
    log_scale: float

    monotone = True

    def neg_log_length(self, log_n):
        log_next = np.logaddexp(np.asarray(log_n, dtype=float), 0.0)
        return log_next + 2 * np.log(log_next) - self.log_scale


@dataclass(frozen=True)
class ProfileRule:
    profile: AlternatingSlopes
    log_norm: float

    monotone = True

    def neg_log_length(self, log_n):
        return self.profile.phi(log_n) + self.log_norm


@register_generator('gauss')
def gauss(truncation: int) -> IntervalPartition:
    n = np.arange(1, truncation + 1, dtype=float)
    return IntervalPartition.from_arrays(
        1.0 / (n + 1), 1.0 / n, 1.0 / (n * (n + 1)),
        generator='gauss',
        # (n + 1/2) ** 2 <= n (n + 1) <= (n + 1) ** 2 gives the Hurwitz sandwich
        tail=HurwitzTail(power=2.0, near_shift=0.0, far_shift=0.5),
        rule=GaussRule(),
        branch_kind=GAUSS_ANALYTIC,
        tiling=True,
        accumulation_point=0.0,
    )


@register_generator('gauss-restricted')
def gauss_restricted(truncation: int, digits: Sequence[int] = (1, 2)) -> IntervalPartition:
    digits = tuple(sorted(int(digit) for digit in digits))
    if not digits or digits[0] < 1 or len(set(digits)) != len(digits):
        raise PartitionValidationError(f'gauss-restricted: digits must be distinct positive integers, got {digits}')
    digits = digits[:truncation]
    n = np.array(digits, dtype=float)
    return IntervalPartition.from_arrays(
        1.0 / (n + 1), 1.0 / n, 1.0 / (n * (n + 1)),
        generator='gauss-restricted({})'.format(','.join(map(str, digits))),
        branch_kind=GAUSS_ANALYTIC,
        digits=digits,
    )


@register_generator('dyadic')
def dyadic(truncation: int) -> IntervalPartition:
    if truncation > DYADIC_MAX_TRUNCATION:
        logger.warning(f'dyadic: truncation {truncation} lowered to {DYADIC_MAX_TRUNCATION}')
        truncation = DYADIC_MAX_TRUNCATION
    lengths = np.ldexp(1.0, -np.arange(1, truncation + 1))
    return IntervalPartition.from_arrays(
        lengths, 2.0 * lengths, lengths,
        generator='dyadic',
        tail=GeometricTail(ratio=0.5, scale=1.0),
        rule=DyadicRule(),
        tiling=True,
        accumulation_point=0.0,
    )


@register_generator('power-law')
def power_law(truncation: int, exponent: float = 2.0) -> IntervalPartition:
    exponent = float(exponent)
    if exponent <= 1:
        raise NonSummableError(f'power-law: lengths n^-{exponent} are not summable, the exponent must exceed 1')
    norm = float(special.zeta(exponent))
    n = np.arange(1, truncation + 1, dtype=float)
    return layout_from_tail(
        n ** -exponent / norm,
        float(special.zeta(exponent, truncation + 1)) / norm,
        generator=f'power-law({exponent:g})',
        tail=HurwitzTail(power=exponent, scale=1.0 / norm),
        rule=PowerLawRule(exponent, math.log(norm)),
        tiling=True,
    )


@lru_cache(maxsize=8)
def _log_squared_normalizer(terms: int) -> float:
    m = np.arange(2, terms + 1, dtype=float)
    return math.fsum((1.0 / (m * np.log(m) ** 2)).tolist()) + log_squared_remainder(terms + 1)


@register_generator('log-squared')
def log_squared(truncation: int) -> IntervalPartition:
    scale = 1.0 / _log_squared_normalizer(max(truncation + 1, NORMALIZER_TERMS))
    m = np.arange(2, truncation + 2, dtype=float)
    tail = LogSquaredTail(scale=scale)
    return layout_from_tail(
        scale / (m * np.log(m) ** 2),
        tail.mass(truncation),
        generator='log-squared',
        tail=tail,
        rule=LogSquaredRule(math.log(scale)),
        tiling=True,
    )


@lru_cache(maxsize=8)
def _profile_normalizer(profile: AlternatingSlopes, terms: int) -> float:
    raw = np.exp(-profile.phi(np.log(np.arange(1, terms + 1, dtype=float))))
    unit = IntegralTail(profile, 0.0)
    return math.log(math.fsum(raw.tolist()) + unit.mass(terms))


@register_generator('interleaved')
def interleaved(truncation: int, slopes: Tuple[float, float] = (2.0, 3.0), period: float = 16.0) -> IntervalPartition:
    slopes = tuple(float(slope) for slope in slopes)
    if len(slopes) != 2 or min(slopes) <= 1:
        raise NonSummableError(f'interleaved: two slopes above 1 are needed, got {slopes}')
    if period <= 1:
        raise PartitionValidationError(f'interleaved: period must exceed 1, got {period}')
    profile = AlternatingSlopes(slopes=slopes, period=float(period))
    log_norm = _profile_normalizer(profile, max(truncation, NORMALIZER_TERMS))
    tail = IntegralTail(profile, log_norm)
    n = np.arange(1, truncation + 1, dtype=float)
    return layout_from_tail(
        np.exp(-profile.phi(np.log(n)) - log_norm),
        tail.mass(truncation),
        generator='interleaved({:g},{:g};{:g})'.format(*slopes, period),
        tail=tail,
        rule=ProfileRule(profile, log_norm),
        tiling=True,
    )


@register_generator('explicit-list')
def explicit_list(truncation: int, intervals: Sequence[Sequence[float]] = ()) -> IntervalPartition:
    pairs = np.asarray(intervals, dtype=float).reshape(-1, 2)
    if pairs.shape[0] == 0:
        raise PartitionValidationError('explicit-list: no intervals given')
    # Validation names intervals by their position in the input list
    left, right = pairs[:, 0], pairs[:, 1]
    partition = IntervalPartition.from_arrays(left, right, generator='explicit-list')
    partition.validate()
    order = np.argsort(-right, kind='stable')[:truncation]
    total = math.fsum((right - left).tolist())
    return IntervalPartition.from_arrays(
        left[order], right[order], generator='explicit-list', tiling=abs(total - 1) <= settings.TILING_TOL
    )


def register_length_rule(name: str, rule: LengthRule, total: Optional[float] = None,
                         log_n_max: float = 1e12, samples: int = 2000):
    """Register a ``custom-lengths`` generator for a monotone rule ``n -> length_n``.

    The tail is only estimated, from the gap ratios of the rule. ``total`` is the sum of all
    lengths; without it the accumulation point is unknown.
    """

    def generator(truncation: int) -> IntervalPartition:
        n = np.arange(1, truncation + 1, dtype=float)
        lengths = np.exp(-rule.neg_log_length(np.log(n)))
        log_n, ratios = rule_ratios(rule, log_n_max, samples)
        window = log_n >= log_n_max ** (2 / 3)
        tail = RatioTail(limsup=float(np.max(ratios[window])), margin=settings.RATIO_TEST_MARGIN)
        options = dict(generator=f'custom-lengths({name})', tail=tail, rule=rule)
        if total is None:
            return layout_from_top(lengths, **options)
        return layout_from_total(lengths, total, **options)

    generator.__name__ = generator.__qualname__ = name.replace('-', '_')
    return generator_registry.register(name, generator)
