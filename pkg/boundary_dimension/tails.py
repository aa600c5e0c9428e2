"""Closed-form bounds for the part of ``sum(length_n ** t)`` beyond a truncation.

Each rule answers two questions for an exponent ``t``: does the full series converge, and which
interval contains ``sum_{n > M} length_n ** t``. Rules built from integral tests or Hurwitz zeta
values are certified; :class:`RatioTail` is an estimate from sampled gap ratios.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, special

from boundary_dimension.numerics import log_sum_exp


class TailRule:

    kind: str = 'none'

    certified: bool = True

    # Comparison series used when classifying behaviour at the critical exponent
    template: str = ''

    @property
    def critical_exponent(self) -> Optional[float]:
        raise NotImplementedError()

    def converges(self, t: float) -> Optional[bool]:
        raise NotImplementedError()

    def behavior_at_critical(self) -> Optional[bool]:
        """True if the series converges at the critical exponent, False if it diverges."""
        return None

    def bracket(self, t: float, truncation: int) -> Tuple[float, float]:
        raise NotImplementedError()

    def mass(self, truncation: int) -> float:
        """Best estimate of the total length beyond ``truncation``."""
        lower, upper = self.bracket(1.0, truncation)
        return 0.5 * (lower + upper)


@dataclass(frozen=True)
class GeometricTail(TailRule):
    """Lengths ``scale * ratio ** n``."""

    ratio: float = 0.5
    scale: float = 1.0

    kind = 'geometric'
    template = 'geometric'

    @property
    def critical_exponent(self) -> float:
        return 0.0

    def converges(self, t: float) -> bool:
        return t > 0

    def behavior_at_critical(self) -> bool:
        return False

    def bracket(self, t: float, truncation: int) -> Tuple[float, float]:
        if t <= 0:
            return math.inf, math.inf
        value = self.scale ** t * self.ratio ** ((truncation + 1) * t) / -math.expm1(t * math.log(self.ratio))
        return value, value


@dataclass(frozen=True)
class HurwitzTail(TailRule):
    """Lengths sandwiched as ``scale * (n + far_shift) ** -power <= length_n <= scale * (n + near_shift) ** -power``.

    The tail sums are then Hurwitz zeta values. Equal shifts mean the rule is exact.
    """

    power: float
    scale: float = 1.0
    near_shift: float = 0.0
    far_shift: float = 0.0

    kind = 'hurwitz'
    template = 'harmonic'

    @property
    def critical_exponent(self) -> float:
        return 1.0 / self.power

    def converges(self, t: float) -> bool:
        return self.power * t > 1

    def behavior_at_critical(self) -> bool:
        return False

    def bracket(self, t: float, truncation: int) -> Tuple[float, float]:
        if not self.converges(t):
            return math.inf, math.inf
        x = self.power * t
        factor = self.scale ** t
        lower = factor * float(special.zeta(x, truncation + 1 + self.far_shift))
        upper = factor * float(special.zeta(x, truncation + 1 + self.near_shift))
        return lower, upper


def _log_squared(x: float) -> float:
    return 1.0 / (x * math.log(x) ** 2)


def log_squared_remainder(start: float) -> float:
    """Euler-Maclaurin value of ``sum_{m >= start} 1 / (m log(m)^2)``."""
    log_start = math.log(start)
    derivative = -(log_start + 2) / (start ** 2 * log_start ** 3)
    return 1.0 / log_start + 0.5 * _log_squared(start) - derivative / 12


@dataclass(frozen=True)
class LogSquaredTail(TailRule):
    """Lengths ``scale / ((n + 1) log(n + 1) ** 2)``, decreasing for ``n >= 1``."""

    scale: float

    kind = 'integral'
    template = 'n log^2 n'

    @property
    def critical_exponent(self) -> float:
        return 1.0

    def converges(self, t: float) -> bool:
        return t >= 1

    def behavior_at_critical(self) -> bool:
        return True

    def _integral(self, t: float, start: float) -> Tuple[float, float]:
        if t == 1:
            return 1.0 / math.log(start), 0.0
        # Substituting x = e^u turns the integrand into e^{(1-t)u} u^{-2t}
        value, error = integrate.quad(lambda u: math.exp((1 - t) * u) * u ** (-2 * t), math.log(start), math.inf,
                                      epsabs=0.0, epsrel=1e-12, limit=200)
        return value, error

    def bracket(self, t: float, truncation: int) -> Tuple[float, float]:
        if not self.converges(t):
            return math.inf, math.inf
        factor = self.scale ** t
        lower, lower_error = self._integral(t, truncation + 2)
        upper, upper_error = self._integral(t, truncation + 1)
        return factor * max(lower - lower_error, 0.0), factor * (upper + upper_error)

    def mass(self, truncation: int) -> float:
        return self.scale * log_squared_remainder(truncation + 2)


@dataclass(frozen=True)
class AlternatingSlopes:
    """Piecewise linear profile ``phi`` with ``-log length(n) = phi(log n) + log_norm``.

    ``phi(u) = slopes[0] * u`` up to ``u = 1``; afterwards the slope alternates between
    ``slopes[1]`` and ``slopes[0]`` on the blocks ``[period ** j, period ** (j + 1))``. The ratio
    ``u / phi(u)`` then oscillates forever between the two values given by :attr:`ratio_bounds`.
    """

    slopes: Tuple[float, float] = (2.0, 3.0)
    period: float = 16.0
    breakpoints: np.ndarray = field(init=False, repr=False, compare=False)
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        breakpoints = [0.0, 1.0]
        while breakpoints[-1] < 1e300 / self.period:
            breakpoints.append(breakpoints[-1] * self.period)
        breakpoints = np.array(breakpoints)
        segment_slopes = np.array([self.slope(j) for j in range(len(breakpoints) - 1)])
        values = np.concatenate([[0.0], np.cumsum(segment_slopes * np.diff(breakpoints))])
        object.__setattr__(self, 'breakpoints', breakpoints)
        object.__setattr__(self, 'values', values)

    def slope(self, segment: int) -> float:
        if segment == 0:
            return self.slopes[0]
        return self.slopes[segment % 2]

    def phi(self, u):
        u = np.asarray(u, dtype=float)
        segment = np.clip(np.searchsorted(self.breakpoints, u, side='right') - 1, 0, len(self.breakpoints) - 2)
        slopes = np.where(segment == 0, self.slopes[0], np.where(segment % 2 == 1, self.slopes[1], self.slopes[0]))
        return self.values[segment] + slopes * (u - self.breakpoints[segment])

    @property
    def ratio_bounds(self) -> Tuple[float, float]:
        low, high = min(self.slopes), max(self.slopes)
        return (self.period + 1) / (low + self.period * high), (self.period + 1) / (high + self.period * low)

    def log_integral(self, t: float, start: float) -> float:
        """``log`` of ``int_start^inf exp(u - t * phi(u)) du`` for ``t`` above the upper ratio bound."""
        if t <= self.ratio_bounds[1]:
            return math.inf
        first = max(int(np.searchsorted(self.breakpoints, start, side='right')) - 1, 0)
        pieces = []
        peaks = []
        for segment in range(first, len(self.breakpoints) - 1):
            left = max(start, self.breakpoints[segment])
            right = self.breakpoints[segment + 1]
            width = right - left
            rate = 1 - t * self.slope(segment)
            exponent = left - t * float(self.phi(left))
            if abs(rate) * width < 1e-12:
                piece = exponent + math.log(width)
            elif rate > 0:
                piece = exponent + rate * width + math.log(-math.expm1(-rate * width)) - math.log(rate)
            else:
                piece = exponent + math.log(-math.expm1(rate * width)) - math.log(-rate)
            pieces.append(piece)
            # The exponent is piecewise linear, so its maximum on a block sits at an end point
            peaks.append(max(exponent, exponent + rate * width))
            shift, total = log_sum_exp(pieces)
            if len(peaks) > 2 and peaks[-1] < peaks[-3] and max(peaks[-2:]) < shift + math.log(total) - 80:
                break
        shift, total = log_sum_exp(pieces)
        return shift + math.log(total)


@dataclass(frozen=True)
class IntegralTail(TailRule):
    """Integral-test bounds for ``length(x) = exp(-phi(log x) - log_norm)`` with an oscillating profile."""

    profile: AlternatingSlopes
    log_norm: float

    kind = 'integral'
    template = 'oscillating'

    @property
    def critical_exponent(self) -> float:
        return self.profile.ratio_bounds[1]

    def converges(self, t: float) -> Optional[bool]:
        critical = self.critical_exponent
        if t == critical:
            return None
        return t > critical

    def bracket(self, t: float, truncation: int) -> Tuple[float, float]:
        if not self.converges(t):
            return math.inf, math.inf
        scale = -t * self.log_norm
        lower = math.exp(scale + self.profile.log_integral(t, math.log(truncation + 1)))
        upper = math.exp(scale + self.profile.log_integral(t, math.log(truncation)))
        return lower, upper


@dataclass(frozen=True)
class RatioTail(TailRule):
    """Estimated tail for rules known only through their gap ratios.

    ``limsup`` is the largest sampled ``log n / -log length_n``; the tail is bounded as if every
    later length obeyed ``length_n <= n ** (-1 / (limsup + margin))``.
    """

    limsup: float
    margin: float

    kind = 'ratio'
    certified = False
    template = 'ratio'

    @property
    def critical_exponent(self) -> float:
        return self.limsup

    def converges(self, t: float) -> Optional[bool]:
        if t > self.limsup + self.margin:
            return True
        if t < self.limsup - self.margin:
            return False
        return None

    def bracket(self, t: float, truncation: int) -> Tuple[float, float]:
        verdict = self.converges(t)
        if verdict is False:
            return math.inf, math.inf
        if verdict is None:
            return 0.0, math.inf
        return 0.0, float(special.zeta(t / (self.limsup + self.margin), truncation + 1))
