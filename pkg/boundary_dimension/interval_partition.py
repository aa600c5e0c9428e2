import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from boundary_dimension.exceptions import (
    PartitionValidationError, PerturbationError, PreconditionError, RefinementCapError
)
from boundary_dimension.registry import generator_registry
from boundary_dimension.settings import settings
from boundary_dimension.tails import TailRule
from boundary_dimension.utils import fingerprint, readonly


logger = logging.getLogger(__name__)


LINEAR_FULL = 'linear-full'
GAUSS_ANALYTIC = 'gauss-analytic'

RENYI_BOUND = 2.0


class LengthRule(Protocol):
    """Closed form of ``-log length_n`` as a function of ``log n``, for sampling far past the truncation."""

    monotone: bool

    def neg_log_length(self, log_n: np.ndarray) -> np.ndarray:
        ...


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    params: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def parse(cls, value: Union['GeneratorSpec', str, Mapping[str, Any]]) -> 'GeneratorSpec':
        if isinstance(value, GeneratorSpec):
            return value
        if isinstance(value, str):
            return cls(value)
        params = {key: item for key, item in value.items() if key != 'name'}
        return cls(value['name'], tuple(sorted((key, _freeze(item)) for key, item in params.items())))

    @property
    def kwargs(self) -> Dict[str, Any]:
        return dict(self.params)

    def __str__(self):
        if not self.params:
            return self.name
        return '{}({})'.format(self.name, ', '.join(f'{key}={value}' for key, value in self.params))


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(item) for item in value)
    return value


@dataclass(frozen=True)
class SortedLengths:
    values: np.ndarray
    permutation: np.ndarray


@dataclass(frozen=True, eq=False, repr=False)
class IntervalPartition:
    """Finite prefix ``I_1 ... I_M`` of a countable partition plus the rule for what follows.

    Intervals are stored in decreasing order of right end point. ``lengths`` is kept separately
    from ``right - left`` because closed forms are more accurate than differences of end points.
    A partition with a ``tail`` is unbounded: infinitely many intervals follow the prefix.
    """

    left: np.ndarray
    right: np.ndarray
    lengths: np.ndarray
    generator: str
    tail: Optional[TailRule] = None
    rule: Optional[LengthRule] = None
    branch_kind: str = LINEAR_FULL
    tiling: bool = False
    accumulation_point: Optional[float] = None
    digits: Optional[Tuple[int, ...]] = None
    words: Optional[np.ndarray] = field(default=None, compare=False)
    tail_start: Optional[int] = None

    @classmethod
    def from_arrays(cls, left, right, lengths=None, **kwargs) -> 'IntervalPartition':
        left = readonly(left)
        right = readonly(right)
        lengths = readonly(right - left if lengths is None else lengths)
        words = kwargs.pop('words', None)
        if words is not None:
            words = readonly(words, dtype=np.int64)
        return cls(left=left, right=right, lengths=lengths, words=words, **kwargs)

    @property
    def truncation(self) -> int:
        return int(self.lengths.size)

    @property
    def tail_index(self) -> int:
        """Number of intervals the tail rule counts as already listed; the tail starts right after."""
        return self.truncation if self.tail_start is None else self.tail_start

    @property
    def unbounded(self) -> bool:
        return self.tail is not None

    @property
    def count_available(self) -> Union[int, str]:
        return 'unbounded' if self.unbounded else self.truncation

    @cached_property
    def fingerprint(self) -> str:
        return fingerprint(self.left, self.right, self.lengths)

    def __repr__(self):
        return (f'IntervalPartition(generator={self.generator!r}, truncation={self.truncation}, '
                f'fingerprint={self.fingerprint!r})')

    def __len__(self):
        return self.truncation

    def interval(self, n: int) -> Tuple[float, float]:
        return float(self.left[n - 1]), float(self.right[n - 1])

    @cached_property
    def sorted_lengths(self) -> SortedLengths:
        permutation = np.argsort(-self.lengths, kind='stable')
        return SortedLengths(values=readonly(self.lengths[permutation]),
                             permutation=readonly(permutation, dtype=np.int64))

    def endpoints(self) -> np.ndarray:
        """Sorted end points with shared end points of adjacent intervals counted once."""
        points = np.sort(np.concatenate([self.left, self.right]))
        keep = np.concatenate([[True], np.diff(points) > settings.LINE_DEDUP_TOL])
        return points[keep]

    def finite_part(self) -> 'IntervalPartition':
        """The materialized intervals alone, as a finite partition."""
        return replace(self, generator=f'{self.generator}[:{self.truncation}]', tail=None, rule=None,
                       tiling=False, accumulation_point=None, tail_start=None)

    def rows(self) -> List[Tuple[int, float, float, float]]:
        return [(n + 1, float(a), float(b), float(length))
                for n, (a, b, length) in enumerate(zip(self.left, self.right, self.lengths))]

    def validate(self) -> 'IntervalPartition':
        if self.truncation < 1:
            raise PartitionValidationError(f'{self.generator}: a partition needs at least one interval')
        if not (self.left.shape == self.right.shape == self.lengths.shape):
            raise PartitionValidationError(f'{self.generator}: end point and length arrays differ in shape')
        if np.any(~np.isfinite(self.left)) or np.any(~np.isfinite(self.right)):
            raise PartitionValidationError(f'{self.generator}: end points must be finite')
        if (bad := np.flatnonzero(self.left >= self.right)).size:
            n = int(bad[0]) + 1
            raise PartitionValidationError(f'{self.generator}: interval {n} {list(self.interval(n))} is empty')
        if self.left.min() < -settings.TILING_TOL or self.right.max() > 1 + settings.TILING_TOL:
            raise PartitionValidationError(f'{self.generator}: intervals must lie in [0, 1]')
        self._check_disjoint()
        if self.tiling:
            self._check_tiling()
        if self.unbounded:
            self._check_accumulation()
        return self

    def _check_disjoint(self):
        order = np.argsort(self.left, kind='stable')
        overlap = self.right[order[:-1]] - self.left[order[1:]] > settings.LINE_DEDUP_TOL
        if (bad := np.flatnonzero(overlap)).size:
            first, second = sorted((int(order[bad[0]]) + 1, int(order[bad[0] + 1]) + 1))
            raise PartitionValidationError(
                f'{self.generator}: interiors overlap: interval {first} {list(self.interval(first))} '
                f'and interval {second} {list(self.interval(second))}'
            )

    def _check_tiling(self):
        total = math.fsum(self.lengths.tolist())
        slack = settings.TILING_TOL
        if self.unbounded:
            lower, upper = self.tail.bracket(1.0, self.tail_index)
            total += self.tail.mass(self.tail_index)
            if math.isfinite(upper):
                slack += upper - lower
        if abs(total - 1) > slack:
            raise PartitionValidationError(
                f'{self.generator}: lengths add up to {total!r}, not 1 (allowed slack {slack:.3g})'
            )

    def _check_accumulation(self):
        if not settings.ENFORCE_ZERO_ACCUMULATION:
            return
        if self.accumulation_point is None:
            raise PartitionValidationError(f'{self.generator}: unbounded partitions must declare where they accumulate')
        if abs(self.accumulation_point) > settings.TILING_TOL:
            raise PartitionValidationError(
                f'{self.generator}: intervals accumulate at {self.accumulation_point!r}, not at 0'
            )


def layout_from_tail(lengths: np.ndarray, tail_mass: float, generator: str, **kwargs) -> IntervalPartition:
    """Stack intervals downwards so that ``a_n`` is the mass of everything after ``I_n``."""
    lengths = np.asarray(lengths, dtype=float)
    after = np.cumsum(lengths[::-1])[::-1] - lengths
    left = tail_mass + after
    right = np.concatenate([[tail_mass + after[0] + lengths[0]], left[:-1]])
    return IntervalPartition.from_arrays(left, right, lengths, generator=generator, accumulation_point=0.0,
                                         **kwargs)


def layout_from_total(lengths: np.ndarray, total: float, generator: str, **kwargs) -> IntervalPartition:
    """Stack intervals downwards from ``total``, the declared sum of all lengths."""
    tail_mass = total - math.fsum(np.asarray(lengths, dtype=float).tolist())
    if tail_mass < -settings.TILING_TOL:
        raise PartitionValidationError(f'{generator}: declared total {total!r} is below the materialized lengths')
    return layout_from_tail(lengths, max(tail_mass, 0.0), generator, **kwargs)


def layout_from_top(lengths: np.ndarray, generator: str, total: Optional[float] = None,
                    **kwargs) -> IntervalPartition:
    """Stack intervals downwards starting at 1; they accumulate at ``1 - total``."""
    lengths = np.asarray(lengths, dtype=float)
    right = 1.0 - np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    left = right - lengths
    accumulation = None if total is None else 1.0 - total
    return IntervalPartition.from_arrays(left, right, lengths, generator=generator,
                                         accumulation_point=accumulation, **kwargs)


def rule_ratios(rule: LengthRule, log_n_max: float, samples: int,
                log_n_min: float = math.log(2)) -> Tuple[np.ndarray, np.ndarray]:
    """Sample ``log n / -log length_n`` at ``log n`` spaced geometrically up to ``log_n_max``."""
    log_n = np.geomspace(log_n_min, log_n_max, samples)
    return log_n, log_n / rule.neg_log_length(log_n)


def build_partition(spec: Union[GeneratorSpec, str, Mapping[str, Any]], truncation: int) -> IntervalPartition:
    """Materialize the first ``truncation`` intervals of a registered generator."""
    spec = GeneratorSpec.parse(spec)
    if not isinstance(truncation, (int, np.integer)) or truncation < 1:
        raise PartitionValidationError(f'{spec}: truncation must be a positive integer, got {truncation!r}')
    generator = generator_registry.get(spec.name)
    logger.info(f'Building {spec} with truncation {truncation}')
    partition = generator(int(truncation), **spec.kwargs)
    return partition.validate()


def periodic_continued_fraction(a: int, b: int) -> float:
    """Value of ``[0; a, b, a, b, ...]``."""
    return (-a * b + math.sqrt(a * a * b * b + 4 * a * b)) / (2 * a)


@dataclass(frozen=True)
class CylinderWord:
    symbols: Tuple[int, ...]
    left: float
    right: float
    derivative_inf: float
    derivative_sup: float

    @property
    def length(self) -> float:
        return self.right - self.left

    def contains(self, other: 'CylinderWord', tol: float = 1e-15) -> bool:
        return self.left - tol <= other.left and other.right <= self.right + tol


@dataclass(frozen=True, repr=False)
class BranchMap:
    partition: IntervalPartition
    kind: Optional[str] = None

    def __post_init__(self):
        if self.kind is None:
            object.__setattr__(self, 'kind', self.partition.branch_kind)
        if self.kind not in (LINEAR_FULL, GAUSS_ANALYTIC):
            raise PreconditionError(f'Unsupported branch kind {self.kind!r}')

    def __repr__(self):
        return f'BranchMap(kind={self.kind!r}, partition={self.partition!r})'

    @property
    def is_gauss(self) -> bool:
        return self.kind == GAUSS_ANALYTIC

    def alphabet(self, cap: Optional[int] = None) -> Tuple[int, ...]:
        """Symbols of the branches in use: digits for the Gauss family, 1-based indices otherwise."""
        if self.is_gauss:
            digits = self.partition.digits or tuple(range(1, self.partition.truncation + 1))
        else:
            digits = tuple(range(1, self.partition.truncation + 1))
        if cap is not None:
            digits = digits[:cap]
        return digits

    def hull(self, digits: Sequence[int]) -> Tuple[float, float]:
        """Convex hull of the repeller built from ``digits`` (Gauss family)."""
        low, high = min(digits), max(digits)
        return periodic_continued_fraction(high, low), periodic_continued_fraction(low, high)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.is_gauss:
            return 1.0 / x ** 2
        return 1.0 / self.partition.lengths[self._branch_index(x)]

    def second_derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.is_gauss:
            return 2.0 / x ** 3
        return np.zeros_like(x)

    def _branch_index(self, x: np.ndarray) -> np.ndarray:
        order = np.argsort(self.partition.left)
        position = np.searchsorted(self.partition.left[order], x, side='right') - 1
        if np.any(position < 0) or np.any(x > self.partition.right[order[np.clip(position, 0, None)]]):
            raise PreconditionError('Point outside the materialized branches')
        return order[position]

    def _interior_samples(self, per_branch: int) -> np.ndarray:
        fractions = (np.arange(per_branch) + 0.5) / per_branch
        left, right = self.partition.left, self.partition.right
        return (left[:, None] + (right - left)[:, None] * fractions[None, :]).ravel()

    def check_expansion(self, per_branch: int = 5) -> float:
        samples = self._interior_samples(per_branch)
        minimum = float(np.min(np.abs(self.derivative(samples))))
        if minimum <= 1:
            raise PartitionValidationError(f'Map is not expanding: |T\'| = {minimum!r} at a sampled point')
        return minimum

    def renyi_constant(self, per_branch: int = 5) -> float:
        samples = self._interior_samples(per_branch)
        ratio = np.abs(self.second_derivative(samples)) / self.derivative(samples) ** 2
        constant = float(np.max(ratio))
        if self.is_gauss and constant > RENYI_BOUND:
            raise PartitionValidationError(f'Renyi ratio {constant!r} exceeds {RENYI_BOUND}')
        return constant

    def inverse_branch(self, symbol: int, y):
        y = np.asarray(y, dtype=float)
        if self.is_gauss:
            return 1.0 / (symbol + y)
        return self.partition.left[symbol - 1] + self.partition.lengths[symbol - 1] * y

    def cylinder(self, symbols: Sequence[int]) -> CylinderWord:
        symbols = tuple(int(symbol) for symbol in symbols)
        if not symbols:
            raise PreconditionError('A cylinder needs at least one symbol')
        if self.is_gauss:
            (p_prev, p), (q_prev, q) = continuants(np.array([symbols]))
            ends = sorted((float(p[0] / q[0]), float((p[0] + p_prev[0]) / (q[0] + q_prev[0]))))
            return CylinderWord(symbols, ends[0], ends[1], float(q[0] ** 2), float((q[0] + q_prev[0]) ** 2))
        left, length = 0.0, 1.0
        for symbol in symbols:
            left += length * self.partition.left[symbol - 1]
            length *= self.partition.lengths[symbol - 1]
        return CylinderWord(symbols, left, left + length, 1.0 / length, 1.0 / length)


def continuants(words: np.ndarray) -> Tuple[Tuple[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]:
    """Return ``((p_{n-1}, p_n), (q_{n-1}, q_n))`` for every row of digit words."""
    words = np.asarray(words, dtype=float)
    count = words.shape[0]
    p_prev, p = np.ones(count), np.zeros(count)
    q_prev, q = np.zeros(count), np.ones(count)
    for column in range(words.shape[1]):
        digit = words[:, column]
        p_prev, p = p, digit * p + p_prev
        q_prev, q = q, digit * q + q_prev
    return (p_prev, p), (q_prev, q)


def all_words(alphabet: Sequence[int], order: int) -> np.ndarray:
    """Every word of length ``order`` over ``alphabet``, in lexicographic order of symbol positions."""
    alphabet = np.asarray(alphabet, dtype=np.int64)
    index = np.indices((alphabet.size,) * order).reshape(order, -1).T
    return alphabet[index]


def refine_partition(branch_map: BranchMap, k: int, alphabet: Optional[int] = None) -> IntervalPartition:
    """Partition into rank-``k`` cylinders of the materialized (or alphabet-capped) branches."""
    if k < 1:
        raise PreconditionError(f'Refinement order must be at least 1, got {k}')
    partition = branch_map.partition
    if k == 1:
        return partition
    if branch_map.is_gauss and partition.digits is None and alphabet is None and partition.unbounded:
        raise PreconditionError('Refining the Gauss map needs an alphabet cap')
    symbols = branch_map.alphabet(alphabet)
    required = len(symbols) ** k
    if required > settings.REFINEMENT_CAP:
        raise RefinementCapError(
            f'Refinement to order {k} needs {required} cylinders, above the cap {settings.REFINEMENT_CAP}',
            required=required, cap=settings.REFINEMENT_CAP
        )
    words = all_words(symbols, k)
    if branch_map.is_gauss:
        (p_prev, p), (q_prev, q) = continuants(words)
        first, second = p / q, (p + p_prev) / (q + q_prev)
        left, right = np.minimum(first, second), np.maximum(first, second)
        lengths = 1.0 / (q * (q + q_prev))
        order = np.argsort(-right, kind='stable')
        left, right, lengths, words = left[order], right[order], lengths[order], words[order]
        tiling = False
    else:
        index = words - 1
        left = partition.left[index[:, 0]].copy()
        lengths = partition.lengths[index[:, 0]].copy()
        for column in range(1, k):
            left += lengths * partition.left[index[:, column]]
            lengths *= partition.lengths[index[:, column]]
        right = left + lengths
        tiling = partition.tiling and not partition.unbounded
    logger.info(f'Refined {partition.generator} to {required} cylinders of order {k}')
    refined = IntervalPartition.from_arrays(
        left, right, lengths, generator=f'{partition.generator}^{k}', branch_kind=LINEAR_FULL, tiling=tiling,
        words=words
    )
    return refined.validate()


def _merged(left: np.ndarray, right: np.ndarray, tol: float) -> List[Tuple[float, float]]:
    order = np.argsort(left)
    segments: List[List[float]] = []
    for a, b in zip(left[order], right[order]):
        if segments and a <= segments[-1][1] + tol:
            segments[-1][1] = max(segments[-1][1], b)
        else:
            segments.append([float(a), float(b)])
    return [tuple(segment) for segment in segments]


def perturb_compactly(partition: IntervalPartition, c: float,
                      replacement: Sequence[Tuple[float, float]]) -> IntervalPartition:
    """Replace the intervals inside ``[c, 1]`` by ``replacement`` and keep everything below ``c``."""
    tol = settings.TILING_TOL
    if not 0 < c < 1:
        raise PerturbationError(f'Region start c must lie in (0, 1), got {c!r}')
    inside = partition.left >= c - tol
    straddling = np.flatnonzero(~inside & (partition.right > c + tol))
    if straddling.size:
        n = int(straddling[0]) + 1
        raise PerturbationError(f'Interval {n} {list(partition.interval(n))} meets the region without lying in it')
    if inside.all():
        raise PerturbationError(f'Truncation {partition.truncation} does not reach below c={c!r}')

    replacement = np.asarray(replacement, dtype=float).reshape(-1, 2)
    new_left, new_right = replacement[:, 0], replacement[:, 1]
    if replacement.size == 0 or np.any(new_left >= new_right):
        raise PerturbationError('Replacement intervals must be non-empty')
    if new_left.min() < c - tol or new_right.max() > 1 + tol:
        raise PerturbationError(f'Replacement leaks outside the region [{c!r}, 1]')
    old_mass = math.fsum(partition.lengths[inside].tolist())
    new_mass = math.fsum((new_right - new_left).tolist())
    if abs(old_mass - new_mass) > tol:
        raise PerturbationError(f'Replacement changes the tiled mass from {old_mass!r} to {new_mass!r}')
    old_union = _merged(partition.left[inside], partition.right[inside], tol)
    new_union = _merged(new_left, new_right, tol)
    if len(old_union) != len(new_union) or not np.allclose(old_union, new_union, rtol=0, atol=tol):
        raise PerturbationError('Replacement does not tile the union of the replaced intervals')

    order = np.argsort(-new_right, kind='stable')
    keep = ~inside
    perturbed = IntervalPartition.from_arrays(
        np.concatenate([new_left[order], partition.left[keep]]),
        np.concatenate([new_right[order], partition.right[keep]]),
        np.concatenate([(new_right - new_left)[order], partition.lengths[keep]]),
        generator=f'{partition.generator}+perturbed(c={c!r})',
        tail=partition.tail,
        rule=partition.rule,
        branch_kind=LINEAR_FULL,
        tiling=partition.tiling,
        accumulation_point=partition.accumulation_point,
        tail_start=partition.tail_index if partition.unbounded else None,
    )
    logger.info(f'Perturbed {partition.generator} above c={c!r} with {len(replacement)} intervals')
    return perturbed.validate()
