"""Property suite for the hyperbolic toolkit, run on seeded random samples."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from boundary_dimension.exceptions import PreconditionError
from boundary_dimension.hyperbolic import (
    BALL, BoundaryPoint, HyperbolicPoint, ParabolicGroupSpec, busemann, comparison_triangle_check, distance,
    distance_arccosh, geodesic_point, gromov_product, horospherical_distance, parabolic_sandwich,
    random_ball_points, random_sphere_points, spherical_metric
)


logger = logging.getLogger(__name__)


@dataclass
class PropertyResult:
    name: str
    tolerance: float
    total: int = 0
    passed: int = 0
    max_error: float = 0.0

    def record(self, error: float):
        self.total += 1
        self.max_error = max(self.max_error, error)
        if error <= self.tolerance:
            self.passed += 1

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def as_row(self) -> dict:
        return {'property': self.name, 'passed': self.passed, 'total': self.total,
                'max_error': self.max_error, 'tolerance': self.tolerance}


@dataclass
class SelftestReport:
    seed: int
    results: List[PropertyResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(result.ok for result in self.results)

    @property
    def passed(self) -> int:
        return sum(result.passed for result in self.results)

    @property
    def total(self) -> int:
        return sum(result.total for result in self.results)


def _sphere(rng, dimension) -> BoundaryPoint:
    return BoundaryPoint(BALL, tuple(random_sphere_points(rng, 1, dimension)[0]), dimension)


def _ball(rng, dimension) -> HyperbolicPoint:
    return HyperbolicPoint(BALL, tuple(random_ball_points(rng, 1, dimension)[0]))


def bourdon_sine(rng, samples: int) -> PropertyResult:
    """``exp(-(xi | eta)_o) = sin(angle / 2)`` on the boundary circle of the disk."""
    result = PropertyResult('bourdon-sine', 1e-9)
    for _ in range(samples):
        xi, eta = _sphere(rng, 2), _sphere(rng, 2)
        result.record(abs(math.exp(-gromov_product(xi, eta)) - math.sin(spherical_metric(xi, eta) / 2)))
    return result


def busemann_cocycle(rng, samples: int, dimension: int = 3) -> List[PropertyResult]:
    cocycle = PropertyResult('busemann-cocycle', 1e-10)
    bounded = PropertyResult('busemann-below-distance', 1e-10)
    for _ in range(samples):
        xi = _sphere(rng, dimension)
        p, q, r = (_ball(rng, dimension) for _ in range(3))
        pq = busemann(xi, p, q)
        cocycle.record(abs(pq + busemann(xi, q, r) - busemann(xi, p, r)))
        bounded.record(max(0.0, pq - distance(p, q)))
    return [cocycle, bounded]


def gromov_independence(rng, samples: int, dimension: int = 3) -> PropertyResult:
    """The Gromov product does not depend on the point of the geodesic it is read at."""
    result = PropertyResult('gromov-product-z-independence', 1e-10)
    origin = HyperbolicPoint.base(dimension, BALL)
    for _ in range(samples):
        xi, eta = _sphere(rng, dimension), _sphere(rng, dimension)
        z = geodesic_point(xi, eta, float(rng.uniform(-3, 3)), origin)
        result.record(abs(gromov_product(xi, eta, origin, z) - gromov_product(xi, eta, origin)))
    return result


def horosphere_distances(rng, samples: int, dimension: int = 3) -> PropertyResult:
    """arccosh and 2 arcsinh forms of the distance agree between points of the horosphere at height 1."""
    result = PropertyResult('horosphere-distance-forms', 1e-12)
    for _ in range(samples):
        u, v = rng.uniform(-5, 5, size=(2, dimension - 1))
        p = HyperbolicPoint.half_space(*u, 1.0)
        q = HyperbolicPoint.half_space(*v, 1.0)
        d = distance(p, q)
        result.record(max(abs(d - distance_arccosh(p, q)),
                          abs(d - horospherical_distance(float(np.linalg.norm(u - v))))))
    return result


def comparison_triangles(rng, samples: int, min_angle: float = math.pi / 3, dimension: int = 2) -> PropertyResult:
    """``d(x, y) >= d(z, x) + d(z, y) - C(angle)`` for triangles with a wide angle at ``z``."""
    result = PropertyResult('comparison-triangle', 0.0)
    for _ in range(samples):
        x, y, z = (_ball(rng, dimension) for _ in range(3))
        try:
            report = comparison_triangle_check(x, y, z, min_angle)
        except PreconditionError:
            continue
        result.record(0.0 if report.holds else -report.slack - report.constant)
    return result


def parabolic_gromov_sandwich(xi: float = 0.3, ks=range(50, 10001)) -> PropertyResult:
    """Spread of ``(p^k xi | p^{k+1} xi)_o - d(o, p^k o)`` for the unit translation of the plane."""
    result = PropertyResult('parabolic-sandwich-spread', 1.0)
    group = ParabolicGroupSpec(2, ((1.0,),))
    result.record(parabolic_sandwich(group, BoundaryPoint.plane(xi), ks).spread)
    return result


def run_selftest(seed: int = 0, samples: int = 10 ** 4,
                 progress: Optional[Callable[[PropertyResult], None]] = None) -> SelftestReport:
    rng = np.random.default_rng(seed)
    report = SelftestReport(seed)
    suites = (
        lambda: [bourdon_sine(rng, samples)],
        lambda: busemann_cocycle(rng, samples),
        lambda: [gromov_independence(rng, samples)],
        lambda: [horosphere_distances(rng, samples)],
        lambda: [comparison_triangles(rng, samples)],
        lambda: [parabolic_gromov_sandwich()],
    )
    for suite in suites:
        for result in suite():
            logger.info(f'{result.name}: {result.passed}/{result.total}, max error {result.max_error:.3g}')
            report.results.append(result)
            if progress is not None:
                progress(result)
    return report
