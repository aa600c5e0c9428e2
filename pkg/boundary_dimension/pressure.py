"""Pressure of countable-branch interval maps.

For maps whose branches are affine the pressure is a plain series,
``P(t) = log sum_n length_n ** t``, bracketed by the tail rule of the partition. For the Gauss
family it is bracketed through periodic cylinders: with ``H`` an interval invariant under the inverse
branches in use, ``sum_w sup_H |psi_w'| ** t`` is submultiplicative and ``sum_w inf_H |psi_w'| ** t``
is supermultiplicative in the word length, so ``(1/n) log`` of either is a certified bound at every
order ``n``, and the bound at order ``2n`` is at least as tight as at order ``n``.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from boundary_dimension.decorators import cache_function
from boundary_dimension.exceptions import EnumerationCapError, PreconditionError
from boundary_dimension.interval_partition import BranchMap, IntervalPartition, continuants, refine_partition
from boundary_dimension.numerics import (
    Bisection, bisect_threshold, block_growth, chunk_bounds, chunked_sum, combine_log_sums, deterministic_sum,
    log_sum_exp, parallel_map
)
from boundary_dimension.settings import settings


logger = logging.getLogger(__name__)


LINEAR_SERIES = 'linear-series'


class PressureStatus(str, enum.Enum):
    FINITE = 'finite'
    INFINITE = 'infinite'
    UNDETERMINED = 'undetermined'


class DivergenceBehavior(str, enum.Enum):
    DIVERGES = 'diverges_at_s_inf'
    CONVERGES = 'converges_at_s_inf'
    UNDETERMINED = 'undetermined'


@dataclass(frozen=True)
class DistortionBounds:
    """Distortion of ``|(T^n)'|`` over the cylinders of one order.

    ``log_constant`` is ``log C`` with ``C = ((1 + beta) / (1 + alpha)) ** 2`` for the hull
    ``[alpha, beta]``; ``observed_log_ratio`` is the largest ``log(sup / inf)`` met while enumerating.
    """

    order: int
    hull: Tuple[float, float]
    log_constant: float
    observed_log_ratio: float

    @property
    def constant(self) -> float:
        return math.exp(self.log_constant)

    def width_bound(self, t: float) -> float:
        return abs(t) * self.log_constant / self.order


@dataclass(frozen=True)
class PressureSample:
    t: float
    value: float
    lower: float
    upper: float
    truncation: int
    tail_bound: float
    method: str
    status: PressureStatus = PressureStatus.FINITE
    order: int = 1
    certified: bool = True
    distortion: Optional[DistortionBounds] = None

    @property
    def is_finite(self) -> bool:
        return self.status == PressureStatus.FINITE

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_row(self) -> dict:
        return {
            't': self.t,
            'lower': self.lower,
            'upper': self.upper,
            'value': self.value,
            'status': self.status.value,
            'method': self.method,
            'truncation': self.truncation,
            'tail_bound': self.tail_bound,
        }


def _log(value: float) -> float:
    return math.log(value) if value > 0 else -math.inf


def pressure_linear(partition: IntervalPartition, t: float, threads: int = 1) -> PressureSample:
    """``log sum length_n ** t`` with the tail beyond the truncation bracketed by the tail rule."""
    t = float(t)
    truncation = partition.truncation
    if t <= 0 and partition.unbounded:
        return PressureSample(t, math.inf, math.inf, math.inf, truncation, math.inf, LINEAR_SERIES,
                              PressureStatus.INFINITE)

    lengths = partition.lengths
    partial = chunked_sum(lambda start, stop: lengths[start:stop] ** t, truncation, threads)
    if not partition.unbounded:
        value = _log(partial)
        return PressureSample(t, value, value, value, truncation, 0.0, LINEAR_SERIES)

    tail = partition.tail
    verdict = tail.converges(t)
    if verdict is False:
        return PressureSample(t, math.inf, _log(partial), math.inf, truncation, math.inf, LINEAR_SERIES,
                              PressureStatus.INFINITE, certified=tail.certified)
    if verdict is None:
        return PressureSample(t, math.nan, _log(partial), math.inf, truncation, math.inf, LINEAR_SERIES,
                              PressureStatus.UNDETERMINED, certified=tail.certified)

    tail_lower, tail_upper = tail.bracket(t, partition.tail_index)
    if not math.isfinite(tail_upper):
        return PressureSample(t, math.nan, _log(partial + tail_lower), math.inf, truncation, math.inf,
                              LINEAR_SERIES, PressureStatus.UNDETERMINED, certified=tail.certified)
    return PressureSample(
        t,
        _log(partial + 0.5 * (tail_lower + tail_upper)),
        _log(partial + tail_lower),
        _log(partial + tail_upper),
        truncation,
        tail_upper,
        LINEAR_SERIES,
        certified=tail.certified,
    )


def pressure_curve(partition: IntervalPartition, t_values: Sequence[float], threads: int = 1) -> List[PressureSample]:
    return [pressure_linear(partition, t, threads) for t in t_values]


def _enumeration_suggestion(alphabet: int, order: int, cap: int) -> dict:
    fitting_order = max(int(math.log(cap) // math.log(alphabet)), 1) if alphabet > 1 else order
    fitting_alphabet = max(int(math.floor(cap ** (1.0 / order) + 1e-9)), 2)
    return {'order': min(fitting_order, order), 'alphabet': min(fitting_alphabet, alphabet)}


def _word_logs(digits: Tuple[int, ...], order: int, hull: Tuple[float, float], start: int,
               stop: int) -> Tuple[np.ndarray, np.ndarray]:
    """``log(q_n + q_{n-1} y)`` at both hull ends for the words with indices in ``[start, stop)``."""
    base = len(digits)
    index = np.arange(start, stop, dtype=np.int64)
    powers = base ** np.arange(order - 1, -1, -1, dtype=np.int64)
    words = np.asarray(digits, dtype=float)[(index[:, None] // powers[None, :]) % base]
    _, (q_prev, q) = continuants(words)
    alpha, beta = hull
    return np.log(q + q_prev * alpha), np.log(q + q_prev * beta)


@lru_cache(maxsize=16)
def _materialized_word_logs(digits: Tuple[int, ...], order: int, hull: Tuple[float, float]):
    count = len(digits) ** order
    logs_alpha, logs_beta = _word_logs(digits, order, hull, 0, count)
    logs_alpha.setflags(write=False)
    logs_beta.setflags(write=False)
    return logs_alpha, logs_beta


def _gauss_hull(branch_map: BranchMap, digits: Tuple[int, ...]) -> Tuple[float, float]:
    if branch_map.partition.digits is None:
        return 0.0, 1.0
    return branch_map.hull(digits)


def pressure_cylinder_bracket(branch_map: BranchMap, t: float, order: int, alphabet: Optional[int] = None,
                              threads: int = 1) -> PressureSample:
    """Certified bracket of the pressure of the subsystem on ``alphabet`` branches from order-``n`` cylinders."""
    if order < 1:
        raise PreconditionError(f'Cylinder order must be at least 1, got {order}')
    t = float(t)
    digits = branch_map.alphabet(alphabet)
    if len(digits) < 2:
        raise PreconditionError('Cylinder brackets need at least two branches')

    if not branch_map.is_gauss:
        # Affine branches have constant derivative on every cylinder, so the bracket closes exactly
        lengths = branch_map.partition.lengths[:len(digits)]
        value = _log(deterministic_sum(lengths ** t))
        return PressureSample(t, value, value, value, len(digits), 0.0, f'cylinder-bracket({order})', order=order,
                              distortion=DistortionBounds(order, (0.0, 0.0), 0.0, 0.0))

    if branch_map.partition.digits is None and alphabet is None and branch_map.partition.unbounded:
        raise PreconditionError('Cylinder brackets of the full Gauss map need an alphabet cap')
    count = len(digits) ** order
    if count > settings.ENUMERATION_CAP:
        suggestion = _enumeration_suggestion(len(digits), order, settings.ENUMERATION_CAP)
        raise EnumerationCapError(
            f'{count} words of length {order} over {len(digits)} digits exceed the cap '
            f'{settings.ENUMERATION_CAP}; try order {suggestion["order"]} or alphabet {suggestion["alphabet"]}',
            required=count, cap=settings.ENUMERATION_CAP, suggestion=suggestion
        )
    return gauss_cylinder_bracket(digits, _gauss_hull(branch_map, digits), t, order, threads)


@cache_function(depends_on=('MATERIALIZE_CAP',))
def gauss_cylinder_bracket(digits: Tuple[int, ...], hull: Tuple[float, float], t: float, order: int,
                           threads: int = 1) -> PressureSample:
    """Cylinder bracket for the continued-fraction branches with the given digits, keyed on plain values."""
    count = len(digits) ** order
    logger.debug(f'Enumerating {count} words of length {order} for t={t}')

    if count <= settings.MATERIALIZE_CAP:
        logs_alpha, logs_beta = _materialized_word_logs(digits, order, hull)
        upper_parts = [log_sum_exp(-2 * t * logs_alpha)]
        lower_parts = [log_sum_exp(-2 * t * logs_beta)]
        observed = float(np.max(logs_beta - logs_alpha)) * 2
    else:
        def chunk(bounds):
            logs_alpha, logs_beta = _word_logs(digits, order, hull, *bounds)
            return (log_sum_exp(-2 * t * logs_alpha), log_sum_exp(-2 * t * logs_beta),
                    float(np.max(logs_beta - logs_alpha)))

        results = parallel_map(chunk, chunk_bounds(count), threads)
        upper_parts = [result[0] for result in results]
        lower_parts = [result[1] for result in results]
        observed = 2 * max(result[2] for result in results)

    upper = combine_log_sums(upper_parts) / order
    lower = combine_log_sums(lower_parts) / order
    if t < 0:
        lower, upper = upper, lower
    alpha, beta = hull
    distortion = DistortionBounds(order, hull, 2 * math.log((1 + beta) / (1 + alpha)), observed)
    return PressureSample(t, 0.5 * (lower + upper), lower, upper, len(digits), 0.0, f'cylinder-bracket({order})',
                          order=order, distortion=distortion)


@dataclass(frozen=True)
class DivergenceClassification:
    behavior: DivergenceBehavior
    template: str = ''
    boundary: bool = False
    annotation: str = ''
    note: str = ''


MAXIMAL_DIMENSION_STABLE = 'every compact perturbation admits a measure of maximal dimension'
MAXIMAL_DIMENSION_FRAGILE = 'some compact perturbations admit no measure of maximal dimension'


@dataclass(frozen=True)
class CriticalExponentEstimate:
    s_low: float
    s_high: float
    divergence_behavior: DivergenceBehavior = DivergenceBehavior.UNDETERMINED
    evidence: Tuple[Tuple[float, float], ...] = ()
    undetermined: bool = False
    note: str = ''
    classification: Optional[DivergenceClassification] = None
    trail: Tuple[Tuple[float, Optional[bool]], ...] = field(default=(), repr=False)
    method: str = ''
    closed_form: Optional[float] = None

    @property
    def mid(self) -> float:
        return 0.5 * (self.s_low + self.s_high)

    @property
    def width(self) -> float:
        return self.s_high - self.s_low

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.s_low - slack <= value <= self.s_high + slack


def partial_sum_evidence(partition: IntervalPartition, t: float) -> Tuple[Tuple[float, float], ...]:
    """Partial sums of ``length_n ** t`` at every power of ten up to the truncation."""
    checkpoints = [10 ** j for j in range(1, int(math.log10(partition.truncation)) + 1)]
    if not checkpoints or checkpoints[-1] != partition.truncation:
        checkpoints.append(partition.truncation)
    lengths = partition.lengths
    return tuple((float(n), deterministic_sum(lengths[:n] ** t)) for n in checkpoints)


def classify_s_infinity_behavior(partition: IntervalPartition,
                                 estimate: Optional[CriticalExponentEstimate] = None,
                                 max_width: float = 0.05) -> DivergenceClassification:
    """Decide whether ``sum length_n ** s_inf`` converges, by comparison with the tail template."""
    if not partition.unbounded:
        return DivergenceClassification(DivergenceBehavior.UNDETERMINED,
                                        note='finite partition: divergence is never declared')
    tail = partition.tail
    if estimate is not None and estimate.width > max_width:
        return DivergenceClassification(DivergenceBehavior.UNDETERMINED, tail.template,
                                        note=f's_inf bracket of width {estimate.width:.3g} is too wide to decide')
    critical = tail.critical_exponent
    if estimate is not None and not estimate.contains(critical, slack=max_width):
        return DivergenceClassification(DivergenceBehavior.UNDETERMINED, tail.template,
                                        note=f'tail rule threshold {critical!r} lies outside the s_inf bracket')
    if critical == 0:
        return DivergenceClassification(
            DivergenceBehavior.CONVERGES, tail.template, boundary=True,
            note='s_inf = 0: the series converges for every t > 0 and diverges at t = 0'
        )
    at_critical = tail.behavior_at_critical()
    if at_critical is None or not tail.certified:
        return DivergenceClassification(DivergenceBehavior.UNDETERMINED, tail.template,
                                        note='the tail rule does not decide the series at its threshold')
    if at_critical:
        return DivergenceClassification(DivergenceBehavior.CONVERGES, tail.template,
                                        annotation=MAXIMAL_DIMENSION_FRAGILE)
    return DivergenceClassification(DivergenceBehavior.DIVERGES, tail.template, annotation=MAXIMAL_DIMENSION_STABLE)


CERTIFIED_BRACKET = 'certified-bracket'
PARTIAL_SUMS = 'partial-sums'
S_INFINITY_METHODS = (CERTIFIED_BRACKET, PARTIAL_SUMS)

MIN_BLOCKS = 4


def series_bracket(partition: IntervalPartition, t: float, threads: int = 1) -> Tuple[float, float]:
    """Bounds on ``sum length_n ** t``: the materialized partial sum plus the tail rule's bracket."""
    lengths = partition.lengths
    partial = chunked_sum(lambda start, stop: lengths[start:stop] ** t, partition.truncation, threads)
    if not partition.unbounded:
        return partial, partial
    lower, upper = partition.tail.bracket(t, partition.tail_index)
    return partial + lower, partial + upper


def dyadic_block_logs(partition: IntervalPartition, t: float) -> np.ndarray:
    """``log sum length_(n) ** t`` over each block ``2^j <= n < 2^(j+1)`` that the prefix fills.

    Lengths are taken in decreasing order.
    """
    log_lengths = np.log(partition.sorted_lengths.values)
    blocks = int(math.log2(log_lengths.size + 1))
    logs = []
    for j in range(blocks):
        shift, total = log_sum_exp(t * log_lengths[2 ** j - 1:2 ** (j + 1) - 1])
        logs.append(shift + math.log(total))
    return np.array(logs)


def certified_bracket_test(partition: IntervalPartition, threads: int = 1) -> Callable[[float], Optional[bool]]:
    def test(t: float) -> Optional[bool]:
        lower, upper = series_bracket(partition, t, threads)
        if math.isfinite(upper):
            return True
        if not math.isfinite(lower):
            return False
        return None

    return test


def partial_sum_test(partition: IntervalPartition,
                     margin: Optional[float] = None) -> Callable[[float], Optional[bool]]:
    """Convergence read off the growth of dyadic block sums of the materialized lengths alone."""
    if int(math.log2(partition.truncation + 1)) < MIN_BLOCKS:
        raise PreconditionError(f'{partition.generator}: the partial-sum test needs at least '
                                f'{2 ** MIN_BLOCKS - 1} intervals, got {partition.truncation}')
    margin = settings.RATIO_TEST_MARGIN if margin is None else margin

    def test(t: float) -> Optional[bool]:
        return block_growth(dyadic_block_logs(partition, t)).verdict(margin)

    return test


def _closed_form_note(partition: IntervalPartition, estimate: CriticalExponentEstimate, tol: float) -> str:
    critical = partition.tail.critical_exponent
    if critical is None or estimate.undetermined:
        return ''
    if estimate.contains(critical, slack=tol):
        return f'tail rule threshold {critical:.6g} agrees'
    logger.warning(f'{partition.generator}: tail rule threshold {critical!r} lies outside '
                   f'[{estimate.s_low}, {estimate.s_high}]')
    return f'tail rule threshold {critical:.6g} disagrees'


def find_s_infinity(partition: IntervalPartition, tol: float = 1e-3, floor: float = 1e-300,
                    max_exponent: float = 1024.0, method: Optional[str] = None,
                    threads: int = 1) -> CriticalExponentEstimate:
    """Bisect for the threshold ``s_inf`` of ``sum length_n ** t``.

    ``certified-bracket`` decides each ``t`` from the partial sum plus the tail rule's bracket: a finite
    upper end means convergence, an infinite lower end divergence. ``partial-sums`` looks only at
    the materialized lengths, through the growth of their dyadic block sums. Without a ``method``
    certified tail rules use the first and estimated ones the second. The tail rule's own threshold
    is kept as a cross-check.
    """
    if tol <= 0:
        raise PreconditionError(f'Tolerance must be positive, got {tol}')
    if not partition.unbounded:
        classification = classify_s_infinity_behavior(partition)
        return CriticalExponentEstimate(0.0, 0.0, classification.behavior,
                                        note='finite partition: the series converges for every t',
                                        classification=classification)

    method = method or (CERTIFIED_BRACKET if partition.tail.certified else PARTIAL_SUMS)
    if method == CERTIFIED_BRACKET:
        test = certified_bracket_test(partition, threads)
    elif method == PARTIAL_SUMS:
        test = partial_sum_test(partition)
    else:
        raise PreconditionError(f'Unknown s_inf method {method!r}, expected one of {", ".join(S_INFINITY_METHODS)}')
    closed_form = partition.tail.critical_exponent

    if test(floor) is True:
        estimate = CriticalExponentEstimate(0.0, 0.0, note='the series converges for every t > 0')
        classification = classify_s_infinity_behavior(partition, estimate)
        return CriticalExponentEstimate(0.0, 0.0, classification.behavior,
                                        evidence=partial_sum_evidence(partition, floor),
                                        note=estimate.note, classification=classification, method=method,
                                        closed_form=closed_form)

    high = 1.0
    while test(high) is not True:
        high *= 2
        if high > max_exponent:
            logger.info(f'{partition.generator}: series not shown to converge below t={max_exponent}')
            return CriticalExponentEstimate(0.0, math.inf, DivergenceBehavior.UNDETERMINED, undetermined=True,
                                            note=f'no convergence shown up to t={max_exponent}', method=method,
                                            closed_form=closed_form)

    bisection: Bisection = bisect_threshold(test, 0.0, high, tol)
    estimate = CriticalExponentEstimate(bisection.low, bisection.high, undetermined=bisection.undetermined)
    classification = classify_s_infinity_behavior(partition, estimate)
    cross_check = _closed_form_note(partition, estimate, tol)
    logger.info(f'{partition.generator}: s_inf in [{bisection.low}, {bisection.high}] by {method}, '
                f'{classification.behavior.value}')
    return CriticalExponentEstimate(
        bisection.low,
        bisection.high,
        classification.behavior,
        evidence=partial_sum_evidence(partition, estimate.mid),
        undetermined=bisection.undetermined,
        note='; '.join(filter(None, [classification.note, cross_check])),
        classification=classification,
        trail=bisection.trail,
        method=method,
        closed_form=closed_form,
    )


@dataclass(frozen=True)
class BowenRootEstimate:
    low: float
    high: float
    bracketed: bool = True
    at_range_start: bool = False
    method: str = LINEAR_SERIES
    evaluations: int = 0

    @property
    def estimate(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def width(self) -> float:
        return self.high - self.low


def bowen_root(evaluator: Callable[[float], PressureSample], t_range: Tuple[float, float],
               tol: float = 1e-9) -> BowenRootEstimate:
    """Certified interval around the zero of a decreasing pressure function.

    ``lower(t) <= P(t) <= upper(t)``, so the root lies between the zero of ``lower`` and the zero of
    ``upper``. Each zero is found by bisection and the estimate is the midpoint of the final bracket.
    """
    start, stop = map(float, t_range)
    if not start < stop:
        raise PreconditionError(f'Empty range {t_range}')
    calls = 0
    method = LINEAR_SERIES

    def sample(t):
        nonlocal calls, method
        calls += 1
        result = evaluator(t)
        method = result.method
        return result

    def upper_nonpositive(t):
        result = sample(t)
        return result.status == PressureStatus.FINITE and result.upper <= 0

    def lower_nonpositive(t):
        result = sample(t)
        return result.status != PressureStatus.INFINITE and result.lower <= 0

    if upper_nonpositive(start):
        logger.info(f'Pressure is already non-positive at t={start}')
        return BowenRootEstimate(start, start, at_range_start=True, method=method, evaluations=calls)
    if not lower_nonpositive(stop):
        logger.info(f'Pressure stays positive on [{start}, {stop}]')
        return BowenRootEstimate(stop, stop, bracketed=False, method=method, evaluations=calls)

    low = bisect_threshold(lower_nonpositive, start, stop, tol).low
    if not upper_nonpositive(stop):
        return BowenRootEstimate(low, stop, bracketed=False, method=method, evaluations=calls)
    high = bisect_threshold(upper_nonpositive, low, stop, tol).high
    return BowenRootEstimate(low, high, bracketed=True, method=method, evaluations=calls)


def intersect_roots(estimates: Sequence[BowenRootEstimate]) -> Tuple[float, float]:
    return max(estimate.low for estimate in estimates), min(estimate.high for estimate in estimates)


def brackets_nested(outer: PressureSample, inner: PressureSample, slack: float = 1e-12) -> bool:
    return outer.lower - slack <= inner.lower and inner.upper <= outer.upper + slack


@dataclass(frozen=True)
class IterateCheck:
    k: int
    t: float
    refined: float
    scaled: float

    @property
    def error(self) -> float:
        return abs(self.refined - self.scaled)


def check_iterate_identity(partition: IntervalPartition, ks: Sequence[int], ts: Sequence[float]) -> List[IterateCheck]:
    """Compare the pressure of the rank-``k`` refinement with ``k`` times the pressure of the finite part."""
    finite = partition.finite_part()
    branch_map = BranchMap(finite)
    checks = []
    for k in ks:
        refined = refine_partition(branch_map, k)
        for t in ts:
            checks.append(IterateCheck(k, t, pressure_linear(refined, t).value, k * pressure_linear(finite, t).value))
    return checks
