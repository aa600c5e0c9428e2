"""Summation, bisection and slope helpers shared by the pressure, dimension and lattice code.

Every reduction goes through :func:`deterministic_sum`. Chunk boundaries depend only on
``BD_CHUNK_SIZE``, never on the thread count, so results do not change with ``--threads``.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from boundary_dimension.settings import settings


logger = logging.getLogger(__name__)


T = TypeVar('T')
R = TypeVar('R')


def deterministic_sum(values) -> float:
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        return 0.0
    order = np.argsort(np.abs(values), kind='stable')
    return math.fsum(values[order].tolist())


def chunk_bounds(count: int, chunk_size: Optional[int] = None) -> List[Tuple[int, int]]:
    chunk_size = chunk_size or settings.CHUNK_SIZE
    return [(start, min(start + chunk_size, count)) for start in range(0, count, chunk_size)]


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


def chunked_sum(terms: Callable[[int, int], np.ndarray], count: int, threads: int = 1,
                chunk_size: Optional[int] = None) -> float:
    """Sum ``terms(start, stop)`` over ``[0, count)`` chunk by chunk."""
    partials = parallel_map(lambda bounds: deterministic_sum(terms(*bounds)), chunk_bounds(count, chunk_size),
                            threads)
    return math.fsum(partials)


def log_sum_exp(log_values) -> Tuple[float, float]:
    """Return ``(shift, scaled_sum)`` with ``log(sum(exp(v))) = shift + log(scaled_sum)``."""
    log_values = np.asarray(log_values, dtype=float).ravel()
    if log_values.size == 0:
        return -math.inf, 0.0
    shift = float(np.max(log_values))
    if shift == -math.inf:
        return shift, 0.0
    return shift, deterministic_sum(np.exp(log_values - shift))


def combine_log_sums(parts: Sequence[Tuple[float, float]]) -> float:
    parts = [(shift, total) for shift, total in parts if total > 0]
    if not parts:
        return -math.inf
    top = max(shift for shift, _ in parts)
    return top + math.log(math.fsum(total * math.exp(shift - top) for shift, total in parts))


@dataclass(frozen=True)
class Bisection:
    low: float
    high: float
    steps: int
    undetermined: bool
    trail: Tuple[Tuple[float, Optional[bool]], ...]

    @property
    def mid(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def width(self) -> float:
        return self.high - self.low


def bisect_threshold(test: Callable[[float], Optional[bool]], low: float, high: float, tol: float,
                     max_steps: int = 200) -> Bisection:
    """Shrink ``[low, high]`` around the point where ``test`` switches from False to True.

    ``test`` returns None when it cannot decide. The bracket then tries to close in from both
    sides at a quarter tolerance; if neither side decides, the search stops and is flagged.
    """
    trail = []
    steps = 0
    undetermined = False
    while high - low > tol and steps < max_steps:
        steps += 1
        mid = 0.5 * (low + high)
        verdict = test(mid)
        trail.append((mid, verdict))
        if verdict is True:
            high = mid
        elif verdict is False:
            low = mid
        else:
            probe = tol / 4
            moved = False
            if mid + probe < high:
                above = test(mid + probe)
                trail.append((mid + probe, above))
                if above is True:
                    high = mid + probe
                    moved = True
            if mid - probe > low:
                below = test(mid - probe)
                trail.append((mid - probe, below))
                if below is False:
                    low = mid - probe
                    moved = True
            if not moved:
                undetermined = True
                logger.info(f'Bisection undetermined on [{low}, {high}]')
                break
        logger.debug(f'Bisection step {steps}: [{low}, {high}]')
    return Bisection(low=low, high=high, steps=steps, undetermined=undetermined, trail=tuple(trail))


def dyadic_grid(j_min: int, j_max: int, base: float = 2.0, step: int = 1) -> np.ndarray:
    return np.array([base ** -j for j in range(j_min, j_max + 1, step)])


def secant_slopes(x, y) -> np.ndarray:
    return np.diff(np.asarray(y, dtype=float)) / np.diff(np.asarray(x, dtype=float))


def least_squares_slope(x, y) -> Tuple[float, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return math.nan, np.zeros_like(x)
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), y - (slope * x + intercept)


@dataclass(frozen=True)
class BlockGrowth:
    """Growth of consecutive dyadic block sums ``B_j``.

    ``rate`` extrapolates ``log2(B_(j+1) / B_j)`` to ``j -> inf``: the raw ratios approach their limit
    with an error of order ``2 ** -j``, which ``2 r_j - r_(j-1)`` cancels. ``error`` is the change
    between the last two extrapolations.
    """

    rate: float
    error: float
    ratios: Tuple[float, ...]

    def verdict(self, margin: float) -> Optional[bool]:
        """True if the blocks shrink geometrically, False if they grow, None inside the margin."""
        margin = max(margin, self.error)
        if self.rate < -margin:
            return True
        if self.rate > margin:
            return False
        return None


def block_growth(log_blocks) -> BlockGrowth:
    """Growth of block sums given by their natural logarithms, oldest block first."""
    log_blocks = np.asarray(log_blocks, dtype=float)
    if log_blocks.size < 4:
        raise ValueError(f'Block growth needs at least 4 blocks, got {log_blocks.size}')
    ratios = np.diff(log_blocks) / math.log(2)
    extrapolated = 2 * ratios[1:] - ratios[:-1]
    rate, previous = float(extrapolated[-1]), float(extrapolated[-2])
    error = abs(rate - previous) if math.isfinite(rate) and math.isfinite(previous) else 0.0
    return BlockGrowth(rate=rate, error=error, ratios=tuple(map(float, ratios)))
