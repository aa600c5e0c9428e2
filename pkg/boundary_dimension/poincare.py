"""Poincare series, critical exponents and orbit counts of parabolic groups.

For ``N`` in ``Z^k`` the orbit distance is ``d(o, N.o) = 2 arcsinh(r / 2)`` with
``r = |sum N_i alpha_i|``, and ``exp(-s d) = (r / 2 + sqrt(1 + r^2 / 4)) ** (-2 s)``, which is
comparable with ``r ** (-2 s)``. The sums over the dyadic shells ``2^(j-1) < |N|_inf <= 2^j`` are measured and
their ratios decide convergence; by comparison with ``sum m ** (k - 1 - 2 s)`` they should change by
``2^(k - 2 s)`` from shell to shell, which gives the tail bound on the convergent side.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from boundary_dimension.decorators import cache_function
from boundary_dimension.exceptions import EnumerationCapError, PreconditionError
from boundary_dimension.hyperbolic import ParabolicGroupSpec, lattice_cube
from boundary_dimension.numerics import (
    BlockGrowth, bisect_threshold, block_growth, chunked_sum, deterministic_sum, least_squares_slope, log_sum_exp,
    parallel_map
)
from boundary_dimension.pressure import CriticalExponentEstimate, DivergenceBehavior
from boundary_dimension.settings import settings


logger = logging.getLogger(__name__)


MIN_SHELLS = 4

SHELL_SUMS = 'shell-sums'


class TailClassification(str, enum.Enum):
    CONVERGENT = 'convergent-with-bound'
    DIVERGENT = 'divergent-minorant'
    UNDETERMINED = 'undetermined'


@dataclass(frozen=True)
class PoincareSample:
    s: float
    partial_sum: float
    radius: int
    tail_classification: TailClassification
    tail_bound: float = math.inf

    @property
    def upper(self) -> float:
        return self.partial_sum + self.tail_bound

    def as_row(self) -> dict:
        return {'s': self.s, 'radius': self.radius, 'partial_sum': self.partial_sum,
                'tail_bound': self.tail_bound, 'tail_classification': self.tail_classification.value}


SHELL_POINTS = 2 ** 21


def shell_depth(rank: int, cap: Optional[int] = None) -> int:
    """Largest ``J`` whose cube ``|N|_inf <= 2^J`` fits within the lattice cap and ``SHELL_POINTS``."""
    budget = min(cap or settings.LATTICE_CAP, SHELL_POINTS)
    depth = 0
    while (2 ** (depth + 2) + 1) ** rank <= budget:
        depth += 1
    return depth


@lru_cache(maxsize=8)
def _shell_distances(group: ParabolicGroupSpec, depth: int) -> Tuple[np.ndarray, ...]:
    """Orbit distances grouped by dyadic shell: entry ``j`` holds the ``N`` with ``2^(j-1) < |N|_inf <= 2^j``."""
    lattice = lattice_cube(group.rank, 2 ** depth)
    sup = np.max(np.abs(lattice), axis=1)
    lattice, sup = lattice[sup > 0], sup[sup > 0]
    shells = np.ceil(np.log2(sup)).astype(np.int64)
    distances = group.orbit_distance(lattice)
    grouped = tuple(distances[shells == j] for j in range(depth + 1))
    for values in grouped:
        values.setflags(write=False)
    return grouped


def shell_growth(group: ParabolicGroupSpec, s: float) -> Optional[BlockGrowth]:
    """Growth of the dyadic shell sums of ``exp(-s d(o, N.o))``; None if too few shells fit the cap."""
    depth = shell_depth(group.rank)
    if depth + 1 < MIN_SHELLS:
        logger.info(f'{group}: only {depth + 1} dyadic shells fit the lattice cap')
        return None
    logs = []
    for distances in _shell_distances(group, depth):
        shift, total = log_sum_exp(-s * distances)
        logs.append(shift + math.log(total))
    return block_growth(logs)


def classify_poincare_tail(group: ParabolicGroupSpec, s: float) -> TailClassification:
    """Compare consecutive dyadic shell sums: shrinking shells converge, growing shells diverge."""
    growth = shell_growth(group, s)
    if growth is None:
        return TailClassification.UNDETERMINED
    verdict = growth.verdict(settings.CLASSIFICATION_MARGIN)
    if verdict is True:
        return TailClassification.CONVERGENT
    if verdict is False:
        return TailClassification.DIVERGENT
    return TailClassification.UNDETERMINED


def poincare_tail_bound(group: ParabolicGroupSpec, s: float, radius: int) -> float:
    """Upper bound for the terms with ``|N|_inf > radius``.

    A shell holds at most ``2k 3^{k-1} m^{k-1}`` points, each with ``r >= sigma_min m``.
    """
    k = group.rank
    if s <= k / 2:
        return math.inf
    sigma_min, _ = group.singular_values
    return 2 * k * 3 ** (k - 1) * sigma_min ** (-2 * s) * float(special.zeta(2 * s - k + 1, radius + 1))


@cache_function(depends_on=('LATTICE_CAP', 'CLASSIFICATION_MARGIN'))
def poincare_partial(group: ParabolicGroupSpec, s: float, radius: int, threads: int = 1) -> PoincareSample:
    """``1 + sum_{0 < |N|_inf <= radius} exp(-s d(o, N.o))`` with the remaining tail classified."""
    if s < 0:
        raise PreconditionError(f's must be non-negative, got {s}')
    if radius < 1:
        raise PreconditionError(f'Radius must be at least 1, got {radius}')
    s = float(s)
    lattice = lattice_cube(group.rank, radius)
    lattice = lattice[np.any(lattice != 0, axis=1)]

    def terms(start, stop):
        return np.exp(-s * group.orbit_distance(lattice[start:stop]))

    partial = 1.0 + chunked_sum(terms, lattice.shape[0], threads)
    classification = classify_poincare_tail(group, s)
    bound = poincare_tail_bound(group, s, radius) if classification == TailClassification.CONVERGENT else math.inf
    logger.debug(f'Poincare partial sum for {group} at s={s}, radius {radius}: {partial}')
    return PoincareSample(s, partial, radius, classification, bound)


def critical_exponent(group: ParabolicGroupSpec, tol: float = 1e-3, evidence_radii: Sequence[int] = (10, 100),
                      threads: int = 1, max_exponent: float = 64.0) -> CriticalExponentEstimate:
    """Bisection on the measured tail classification; ``undetermined`` near the threshold stops the refinement."""
    if tol <= 0:
        raise PreconditionError(f'Tolerance must be positive, got {tol}')

    def test(s):
        verdict = classify_poincare_tail(group, s)
        if verdict == TailClassification.UNDETERMINED:
            return None
        return verdict == TailClassification.CONVERGENT

    high = 1.0
    while test(high) is not True:
        high *= 2
        if high > max_exponent:
            return CriticalExponentEstimate(0.0, math.inf, DivergenceBehavior.UNDETERMINED, undetermined=True,
                                            note=f'shell sums not shown to shrink up to s={max_exponent}',
                                            method=SHELL_SUMS, closed_form=group.rank / 2)

    bisection = bisect_threshold(test, 0.0, high, tol)
    mid = bisection.mid
    evidence = []
    for radius in evidence_radii:
        try:
            evidence.append((float(radius), poincare_partial(group, mid, radius, threads).partial_sum))
        except EnumerationCapError:
            break
    behavior, note = _behavior_at_threshold(group, bisection.low, bisection.high, bisection.undetermined)
    closed_form = group.rank / 2
    agreement = 'agrees' if bisection.low - tol <= closed_form <= bisection.high + tol else 'disagrees'
    logger.info(f'{group}: critical exponent in [{bisection.low}, {bisection.high}], {behavior.value}')
    return CriticalExponentEstimate(
        bisection.low,
        bisection.high,
        behavior,
        evidence=tuple(evidence),
        undetermined=bisection.undetermined,
        note=f'{note}; rank threshold {closed_form:g} {agreement}',
        trail=bisection.trail,
        method=SHELL_SUMS,
        closed_form=closed_form,
    )


def _behavior_at_threshold(group: ParabolicGroupSpec, low: float, high: float,
                           undetermined: bool) -> Tuple[DivergenceBehavior, str]:
    """Shell sums that level off at the threshold add up to a divergent series."""
    if undetermined:
        return DivergenceBehavior.UNDETERMINED, 'the threshold bracket did not close'
    growth = shell_growth(group, 0.5 * (low + high))
    # Across the bracket the exact rate moves by at most twice its width
    if abs(growth.rate) <= 2 * (high - low) + max(settings.CLASSIFICATION_MARGIN, growth.error):
        return DivergenceBehavior.DIVERGES, 'shell sums level off at the critical exponent'
    return DivergenceBehavior.UNDETERMINED, f'shell sums change by 2^{growth.rate:.3g} per shell at the threshold'


def ellipsoid_count(group: ParabolicGroupSpec, radius: float, cap: Optional[int] = None) -> int:
    """Exact ``#{N : |sum N_i alpha_i| <= radius}``.

    The leading ``k - 1`` coordinates run over the bounding box of the ellipsoid; the last one is
    counted in closed form from the quadratic it has to satisfy.
    """
    cap = cap or settings.LATTICE_CAP
    gram = group.matrix @ group.matrix.T
    k = group.rank
    squared = radius * radius
    if k == 1:
        bound = int(math.floor(radius / math.sqrt(gram[0, 0])))
        while (bound + 1) ** 2 * gram[0, 0] <= squared:
            bound += 1
        while bound >= 0 and bound ** 2 * gram[0, 0] > squared:
            bound -= 1
        return 2 * bound + 1

    extents = np.floor(radius * np.sqrt(np.diag(np.linalg.inv(gram)))[:-1]).astype(np.int64)
    rows = int(np.prod(2 * extents + 1))
    if rows > cap:
        raise EnumerationCapError(f'{rows} lattice rows exceed the cap {cap}', required=rows, cap=cap)
    axes = [np.arange(-extent, extent + 1) for extent in extents]
    prefix = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, k - 1).astype(float)

    head = gram[:-1, :-1]
    a = gram[-1, -1]
    b = prefix @ gram[:-1, -1]
    c = np.einsum('ij,jk,ik->i', prefix, head, prefix)
    discriminant = b * b - a * (c - squared)
    inside = discriminant >= 0
    b, c, discriminant = b[inside], c[inside], discriminant[inside]
    root = np.sqrt(discriminant)
    high = np.floor((-b + root) / a)
    low = np.ceil((-b - root) / a)

    def value(x):
        return a * x * x + 2 * b * x + c

    # Rounded roots may land one step off an integer boundary
    high = np.where(value(high) > squared, high - 1, high)
    high = np.where(value(high + 1) <= squared, high + 1, high)
    low = np.where(value(low) > squared, low + 1, low)
    low = np.where(value(low - 1) <= squared, low - 1, low)
    return int(np.sum(np.maximum(high - low + 1, 0).astype(np.int64)))


def achievable_t_max(group: ParabolicGroupSpec, cap: Optional[int] = None) -> float:
    """Largest threshold whose ellipsoid count fits under the lattice cap."""
    cap = cap or settings.LATTICE_CAP
    k = group.rank
    if k == 1:
        return math.inf
    gram = group.matrix @ group.matrix.T
    widest = float(np.max(np.sqrt(np.diag(np.linalg.inv(gram)))[:-1]))
    radius = ((cap ** (1.0 / (k - 1)) - 1) / 2) / widest
    return 2 * math.asinh(radius / 2)


@dataclass(frozen=True)
class CountingFunction:
    thresholds: Tuple[float, ...]
    counts: Tuple[int, ...]
    ratios: Tuple[float, ...]
    slope: float
    window: Tuple[int, ...] = ()
    residuals: Tuple[float, ...] = field(default=(), repr=False)

    def rows(self):
        return [{'t': t, 'count': count, 'log_count_over_t': ratio}
                for t, count, ratio in zip(self.thresholds, self.counts, self.ratios)]


MIN_LATTICE_RADIUS = 1e3


def counting_exponent(group: ParabolicGroupSpec, t_max: float, levels: int = 25, threads: int = 1) -> CountingFunction:
    """Lattice counts in the balls ``d(o, N.o) <= t`` and the growth rate of their logarithm."""
    if math.exp(t_max / 2) < MIN_LATTICE_RADIUS:
        raise PreconditionError(f't_max={t_max} is too small: the lattice radius e^(t/2) must reach '
                                f'{MIN_LATTICE_RADIUS:g}, so t_max >= {2 * math.log(MIN_LATTICE_RADIUS):.3f}')
    if levels < 3:
        raise PreconditionError(f'At least three levels are needed, got {levels}')
    reachable = achievable_t_max(group)
    if t_max > reachable:
        raise EnumerationCapError(f'Counting up to t={t_max} exceeds the lattice cap; t_max <= {reachable:.3f} fits',
                                  required=0, cap=settings.LATTICE_CAP, suggestion={'t_max': round(reachable, 3)})
    thresholds = np.linspace(t_max / levels, t_max, levels)
    counts = parallel_map(lambda t: ellipsoid_count(group, 2 * math.sinh(t / 2)), thresholds, threads)
    ratios = [math.log(count) / t for count, t in zip(counts, thresholds)]
    usable = [index for index, count in enumerate(counts) if count > 1]
    window = tuple(usable[-max(2, math.ceil(len(usable) / 3)):]) if len(usable) >= 2 else ()
    if window:
        slope, residuals = least_squares_slope(thresholds[list(window)], np.log([counts[i] for i in window]))
    else:
        slope, residuals = 0.0, np.zeros(0)
    logger.info(f'{group}: counting slope {slope:.4f} over t in [{thresholds[0]:.3f}, {t_max}]')
    return CountingFunction(tuple(map(float, thresholds)), tuple(int(c) for c in counts), tuple(ratios),
                            float(slope), window, tuple(map(float, residuals)))


@dataclass(frozen=True)
class GaugeGap:
    minimum: float
    maximum: float

    @property
    def spread(self) -> float:
        return self.maximum - self.minimum


def gauge_gap(group: ParabolicGroupSpec, radius: int) -> GaugeGap:
    """Range of ``d(o, N.o) - log |sum N_i alpha_i|^2`` over ``1 <= |N|_inf <= radius``."""
    lattice = lattice_cube(group.rank, radius)
    lattice = lattice[np.any(lattice != 0, axis=1)]
    displacement = group.displacement(lattice)
    gap = group.orbit_distance(lattice) - 2 * np.log(displacement)
    return GaugeGap(float(gap.min()), float(gap.max()))


@dataclass(frozen=True)
class PowerSequence:
    """``a_n = n ** -power``."""

    power: float

    def neg_log(self, log_n):
        return self.power * np.asarray(log_n, dtype=float)

    def __str__(self):
        return f'n^-{self.power:g}'


@dataclass(frozen=True)
class ParabolicSequence:
    """``a_n = exp(-s d(o, p^n o))`` for a cyclic parabolic group with translation length ``length``."""

    s: float
    length: float = 1.0

    def neg_log(self, log_n):
        # arcsinh(x) = log x + log(1 + sqrt(1 + x^-2)), kept in log space for huge n
        log_x = np.asarray(log_n, dtype=float) + math.log(self.length / 2)
        return 2 * self.s * (log_x + np.log1p(np.sqrt(1 + np.exp(-2 * log_x))))

    def __str__(self):
        return f'exp(-{self.s:g} d(o, p^n o))'


@dataclass(frozen=True)
class DichotomyReport:
    rule: str
    ratio_liminf: float
    ratio_limsup: float
    predicted: Optional[bool]
    observed: Optional[bool]
    block_slope: float
    boundary: bool

    @property
    def consistent(self) -> bool:
        return self.predicted is None or self.observed is None or self.predicted == self.observed


def verify_dichotomy(rule, window: Tuple[float, float] = (1e3, 1e12), samples: int = 2000, blocks: int = 20,
                     margin: float = 1e-3) -> DichotomyReport:
    """Compare the ratio test on ``log n / log(1/a_n)`` with the growth of dyadic block sums.

    A ratio limsup below one predicts convergence and a liminf above one predicts divergence;
    block sums ``sum_{2^j <= n < 2^{j+1}} a_n`` shrinking geometrically show convergence.
    """
    n = np.arange(1, 2 ** (blocks + 1), dtype=float)
    log_n = np.log(n)
    neg_log = rule.neg_log(log_n)
    sampled = rule.neg_log(np.geomspace(1.0, math.log(window[1]), samples))
    if np.any(np.diff(neg_log) < -1e-12) or np.any(np.diff(sampled) < -1e-12):
        raise PreconditionError(f'{rule} is not monotone')

    log_window = np.geomspace(math.log(window[0]), math.log(window[1]), samples)
    ratios = log_window / rule.neg_log(log_window)
    liminf, limsup = float(ratios.min()), float(ratios.max())
    if limsup < 1 - margin:
        predicted = True
    elif liminf > 1 + margin:
        predicted = False
    else:
        predicted = None

    terms = np.exp(-neg_log)
    block_sums = [deterministic_sum(terms[2 ** j - 1:2 ** (j + 1) - 1]) for j in range(blocks + 1)]
    tail = list(range(blocks // 2, blocks + 1))
    slope, _ = least_squares_slope(tail, np.log2([block_sums[j] for j in tail]))
    if slope <= -0.05:
        observed = True
    elif slope >= -0.01:
        observed = False
    else:
        observed = None
    return DichotomyReport(str(rule), liminf, limsup, predicted, observed, float(slope), predicted is None)
