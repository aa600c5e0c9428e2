"""Covering counts and box dimension of finite point clouds, plus gap exponents of partitions.

On the line the covering number is computed exactly. On spheres a greedy packing stands in for it:
with ``M_delta`` the size of a maximal ``delta``-separated set, ``N_{2 delta} <= M_delta <= N_delta``,
so both share their exponents.
"""
import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from boundary_dimension.exceptions import GeometryError, PreconditionError, SaturationError
from boundary_dimension.interval_partition import IntervalPartition, rule_ratios
from boundary_dimension.numerics import least_squares_slope, parallel_map, secant_slopes
from boundary_dimension.settings import settings
from boundary_dimension.utils import fingerprint, readonly


logger = logging.getLogger(__name__)


LINE = 'line'
SPHERE = 'sphere'

SORTED_SWEEP = 'sorted-sweep'
GREEDY_BALL = 'greedy-ball'

SPHERICAL = 'spherical'
BOURDON = 'bourdon'

MIN_LEVELS = 8
MIN_GAP_INTERVALS = 16


@dataclass(frozen=True, eq=False, repr=False)
class PointCloud:
    space: str
    points: np.ndarray
    provenance: str = ''

    @classmethod
    def line(cls, points, provenance: str = '') -> 'PointCloud':
        points = np.sort(np.asarray(points, dtype=float).ravel())
        if points.size:
            points = points[np.concatenate([[True], np.diff(points) > settings.LINE_DEDUP_TOL])]
        return cls(LINE, readonly(points), provenance)

    @classmethod
    def sphere(cls, points, provenance: str = '') -> 'PointCloud':
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] < 2:
            raise GeometryError('Sphere points must be an (n, d) array with d >= 2')
        if points.size:
            norms = np.linalg.norm(points, axis=1)
            if np.any(np.abs(norms - 1) > settings.SPHERE_DEDUP_TOL):
                raise GeometryError('Sphere points must have unit norm')
            # Points sharing a 1e-12 grid cell count once; np.unique also sorts them lexicographically
            keys = np.round(points / settings.SPHERE_DEDUP_TOL).astype(np.int64)
            _, first = np.unique(keys, axis=0, return_index=True)
            points = points[np.sort(first)]
            points = points[np.lexsort(points.T[::-1])]
        return cls(SPHERE, readonly(points), provenance)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def ambient_dimension(self) -> int:
        return 1 if self.space == LINE else int(self.points.shape[1]) - 1

    def __len__(self):
        return self.size

    def __repr__(self):
        return f'PointCloud(space={self.space!r}, size={self.size}, fingerprint={fingerprint(self.points)!r})'


def endpoint_cloud(partition: IntervalPartition) -> PointCloud:
    return PointCloud.line(partition.endpoints(), provenance=f'{partition.generator}, M={partition.truncation}')


@dataclass(frozen=True)
class CoveringCount:
    delta: float
    count: int
    algorithm: str
    metric: str = ''

    def as_row(self) -> dict:
        return {'delta': self.delta, 'count': self.count, 'algorithm': self.algorithm}


def _require_points(cloud: PointCloud, space: str):
    if cloud.space != space:
        raise PreconditionError(f'Expected a {space} cloud, got a {cloud.space} cloud')
    if cloud.size == 0:
        raise PreconditionError('Cannot cover an empty cloud')


def covering_count_line(cloud: PointCloud, delta: float) -> CoveringCount:
    """Minimal number of intervals of length ``delta`` covering the cloud.

    Putting each interval's left end on the leftmost uncovered point is optimal.
    """
    _require_points(cloud, LINE)
    if delta <= 0:
        raise PreconditionError(f'delta must be positive, got {delta}')
    points = cloud.points
    count = 0
    index = 0
    while index < points.size:
        count += 1
        index = int(np.searchsorted(points, points[index] + delta, side='right'))
    return CoveringCount(delta, count, SORTED_SWEEP)


def chord_threshold(delta: float, metric: str = SPHERICAL) -> float:
    """Chord length at which two unit vectors are ``delta`` apart in the given boundary metric."""
    if metric == SPHERICAL:
        if not 0 < delta < math.pi:
            raise PreconditionError(f'Angular delta must lie in (0, pi), got {delta}')
        return 2 * math.sin(delta / 2)
    if metric == BOURDON:
        if not 0 < delta <= 1:
            raise PreconditionError(f'Bourdon delta must lie in (0, 1], got {delta}')
        return 2 * delta
    raise PreconditionError(f'Unknown boundary metric {metric!r}')


def covering_count_sphere(cloud: PointCloud, delta: float, metric: str = SPHERICAL) -> CoveringCount:
    """Greedy ``delta``-packing count on the sphere, scanning points in lexicographic order.

    Points are first thinned to one representative per grid cell of side ``h / (2 sqrt(d))``, where
    ``h`` is the chord threshold. The packing of the representatives then satisfies
    ``N_{3 delta} <= count <= N_delta`` up to the chord and angle comparison.
    """
    _require_points(cloud, SPHERE)
    threshold = chord_threshold(delta, metric)
    points = cloud.points
    dimension = points.shape[1]

    side = threshold / (2 * math.sqrt(dimension))
    _, first = np.unique(np.floor(points / side).astype(np.int64), axis=0, return_index=True)
    representatives = points[np.sort(first)]

    cells = np.floor(representatives / threshold).astype(np.int64)
    offsets = list(product((-1, 0, 1), repeat=dimension))
    accepted: Dict[Tuple[int, ...], List[np.ndarray]] = {}
    squared = threshold * threshold
    count = 0
    for point, cell in zip(representatives, map(tuple, cells)):
        clear = True
        for offset in offsets:
            neighbours = accepted.get(tuple(c + o for c, o in zip(cell, offset)))
            if neighbours and any(float(np.dot(point - other, point - other)) <= squared for other in neighbours):
                clear = False
                break
        if clear:
            accepted.setdefault(cell, []).append(point)
            count += 1
    return CoveringCount(delta, count, GREEDY_BALL, metric)


@dataclass(frozen=True)
class DimensionEstimate:
    lower_dim: float
    upper_dim: float
    log_inverse_delta: Tuple[float, ...]
    log_counts: Tuple[float, ...]
    counts: Tuple[CoveringCount, ...]
    window: Tuple[int, ...]
    window_slopes: Tuple[float, ...]
    regression_slope: float
    residuals: Tuple[float, ...]
    saturated: Tuple[int, ...] = ()
    delta_range: Tuple[float, float] = (math.nan, math.nan)
    ambient_dimension: int = 1

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower_dim + self.upper_dim)

    def table(self) -> List[dict]:
        """Rows of ``(log 1/delta, log N_delta)`` for plotting."""
        return [
            {'delta': count.delta, 'count': count.count, 'log_inverse_delta': x, 'log_count': y,
             'saturated': index in self.saturated, 'in_window': index in self.window}
            for index, (count, x, y) in enumerate(zip(self.counts, self.log_inverse_delta, self.log_counts))
        ]


def check_geometric_grid(deltas: Sequence[float]) -> np.ndarray:
    deltas = np.sort(np.asarray(deltas, dtype=float))[::-1]
    if deltas.size < MIN_LEVELS:
        raise PreconditionError(f'A delta grid needs at least {MIN_LEVELS} levels, got {deltas.size}')
    if np.any(deltas <= 0):
        raise PreconditionError('Every delta must be positive')
    ratios = deltas[1:] / deltas[:-1]
    if np.any(ratios >= 1) or np.ptp(np.log(ratios)) > 1e-9 * abs(np.log(ratios[0])) + 1e-12:
        raise PreconditionError('The delta grid must be geometric with distinct levels')
    return deltas


def estimate_box_dimension(cloud: PointCloud, delta_grid: Sequence[float], metric: str = SPHERICAL,
                           threads: int = 1) -> DimensionEstimate:
    """Lower and upper box dimension from secant slopes over the finest unsaturated levels."""
    deltas = check_geometric_grid(delta_grid)
    if cloud.space == LINE:
        counts = parallel_map(lambda delta: covering_count_line(cloud, delta), deltas, threads)
    else:
        counts = parallel_map(lambda delta: covering_count_sphere(cloud, delta, metric), deltas, threads)

    limit = settings.SATURATION_FRACTION * cloud.size
    saturated = tuple(index for index, count in enumerate(counts)
                      if count.count > limit or count.count == cloud.size)
    usable = [index for index in range(len(counts)) if index not in saturated]
    if len(usable) < 3:
        raise SaturationError(
            f'{len(saturated)} of {len(counts)} levels are saturated by {cloud.size} points; '
            f'use a larger truncation or coarser deltas'
        )
    if saturated:
        logger.info(f'Excluding {len(saturated)} saturated levels of {cloud!r}')

    x = -np.log(deltas)
    y = np.log([count.count for count in counts])
    window = usable[-max(3, math.ceil(len(usable) / 2)):]
    slopes = secant_slopes(x[window], y[window])
    ambient = cloud.ambient_dimension
    slopes = np.clip(slopes, 0.0, ambient)
    slope, residuals = least_squares_slope(x[window], y[window])
    return DimensionEstimate(
        lower_dim=float(slopes.min()),
        upper_dim=float(slopes.max()),
        log_inverse_delta=tuple(map(float, x)),
        log_counts=tuple(map(float, y)),
        counts=tuple(counts),
        window=tuple(window),
        window_slopes=tuple(map(float, slopes)),
        regression_slope=slope,
        residuals=tuple(map(float, residuals)),
        saturated=saturated,
        delta_range=(float(deltas[window[-1]]), float(deltas[window[0]])),
        ambient_dimension=ambient,
    )


@dataclass(frozen=True)
class GapExponentEstimate:
    L_lower: float
    L_upper: float
    log_n: Tuple[float, ...] = field(repr=False)
    ratios: Tuple[float, ...] = field(repr=False)
    resolution: float = 0.0
    sampled_to: float = 0.0

    @property
    def gap(self) -> float:
        return self.L_upper - self.L_lower


def gap_exponent_bounds(partition: IntervalPartition, log_n_max: float = 1e12, samples: int = 4000,
                        use_rule: bool = True) -> GapExponentEstimate:
    """``liminf`` and ``limsup`` of ``log n / -log length_(n)`` read off a trailing window.

    The materialized lengths are used in decreasing order. A monotone closed-form rule extends the
    sequence to ``log n = log_n_max``; the window is the last third of the range of ``log log n``.
    """
    if partition.truncation < MIN_GAP_INTERVALS:
        raise PreconditionError(f'Gap exponents need at least {MIN_GAP_INTERVALS} intervals, '
                                f'got {partition.truncation}')
    lengths = partition.sorted_lengths.values
    n = np.arange(2, lengths.size + 1, dtype=float)
    log_n = np.log(n)
    ratios = log_n / -np.log(lengths[1:])

    rule = partition.rule
    if use_rule and partition.unbounded and rule is not None and getattr(rule, 'monotone', False) \
            and log_n_max > log_n[-1]:
        extra_log_n, extra_ratios = rule_ratios(rule, log_n_max, samples, log_n_min=float(log_n[-1]))
        log_n = np.concatenate([log_n, extra_log_n[1:]])
        ratios = np.concatenate([ratios, extra_ratios[1:]])

    log_log = np.log(log_n)
    cut = log_log[0] + 2 * (log_log[-1] - log_log[0]) / 3
    window = log_log >= cut
    window_ratios = ratios[window]
    resolution = float(np.max(np.abs(np.diff(window_ratios)))) if window_ratios.size > 1 else 0.0
    return GapExponentEstimate(
        L_lower=float(window_ratios.min()),
        L_upper=float(window_ratios.max()),
        log_n=tuple(map(float, log_n[window])),
        ratios=tuple(map(float, window_ratios)),
        resolution=resolution,
        sampled_to=float(log_n[-1]),
    )


@dataclass(frozen=True)
class FalconerCheck:
    """``lower (1 - upper) / (1 - lower) <= L_lower <= L_upper <= upper`` for non-increasing lengths."""

    lower_bound: float
    L_lower: float
    L_upper: float
    upper_dim: float

    def holds(self, slack: float = 0.0) -> bool:
        return self.lower_bound - slack <= self.L_lower and self.L_upper <= self.upper_dim + slack


def falconer_check(estimate: DimensionEstimate, gaps: GapExponentEstimate) -> FalconerCheck:
    lower, upper = estimate.lower_dim, estimate.upper_dim
    bound = lower * (1 - upper) / (1 - lower) if lower < 1 else 0.0
    return FalconerCheck(bound, gaps.L_lower, gaps.L_upper, upper)


def dyadic_deltas(j_min: int, j_max: int) -> np.ndarray:
    return np.ldexp(1.0, -np.arange(j_min, j_max + 1))


def sandwich_counts(cloud: PointCloud, delta: float, metric: str = SPHERICAL) -> Optional[Tuple[int, int]]:
    """``(M_{2 delta}, M_delta)`` for sphere clouds, the two packings around ``N_{2 delta}``."""
    if cloud.space != SPHERE:
        return None
    return covering_count_sphere(cloud, 2 * delta, metric).count, covering_count_sphere(cloud, delta, metric).count
