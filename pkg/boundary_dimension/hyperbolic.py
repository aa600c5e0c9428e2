"""Constant curvature -1 geometry in the upper half-space and ball models.

The Cayley map ``x -> (2 x', |x|^2 - 1) / (|x|^2 + 2 x_n + 1)`` sends the half-space to the ball,
``o = (0, ..., 0, 1)`` to the origin and the point at infinity to the north pole. Busemann functions
follow ``B_xi(p, q) = lim d(p, a(t)) - d(q, a(t))`` for a geodesic ray ``a(t) -> xi``.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from boundary_dimension.boxdim import PointCloud
from boundary_dimension.exceptions import EnumerationCapError, GeometryError, PreconditionError
from boundary_dimension.numerics import parallel_map
from boundary_dimension.settings import settings


logger = logging.getLogger(__name__)


HALF_SPACE = 'upper-half-space'
BALL = 'ball'

MODEL_TOL = 1e-12


@dataclass(frozen=True)
class HyperbolicPoint:
    model: str
    coords: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(float(c) for c in self.coords))
        if len(self.coords) < 2:
            raise GeometryError('Hyperbolic points need at least two coordinates')
        if self.model == HALF_SPACE:
            if not self.coords[-1] > 0:
                raise GeometryError(f'Half-space points need a positive last coordinate, got {self.coords}')
        elif self.model == BALL:
            if not np.dot(self.coords, self.coords) < 1 - MODEL_TOL:
                raise GeometryError(f'Ball points must lie inside the unit ball, got {self.coords}')
        else:
            raise GeometryError(f'Unknown model {self.model!r}')

    @classmethod
    def half_space(cls, *coords: float) -> 'HyperbolicPoint':
        return cls(HALF_SPACE, coords)

    @classmethod
    def ball(cls, *coords: float) -> 'HyperbolicPoint':
        return cls(BALL, coords)

    @classmethod
    def base(cls, dimension: int, model: str = HALF_SPACE) -> 'HyperbolicPoint':
        """The reference point ``o``."""
        coords = [0.0] * dimension
        if model == HALF_SPACE:
            coords[-1] = 1.0
        return cls(model, tuple(coords))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the sphere at infinity; ``coords is None`` is the point at infinity of the half-space."""

    model: str
    coords: Optional[Tuple[float, ...]]
    dimension: int

    def __post_init__(self):
        if self.coords is not None:
            object.__setattr__(self, 'coords', tuple(float(c) for c in self.coords))
        if self.model == HALF_SPACE:
            if self.coords is not None and len(self.coords) != self.dimension - 1:
                raise GeometryError(f'A boundary point of H^{self.dimension} has {self.dimension - 1} coordinates')
        elif self.model == BALL:
            if self.coords is None or len(self.coords) != self.dimension:
                raise GeometryError(f'A boundary point of the ball in H^{self.dimension} '
                                    f'is a unit {self.dimension}-vector')
            if abs(math.sqrt(np.dot(self.coords, self.coords)) - 1) > MODEL_TOL:
                raise GeometryError(f'Boundary points of the ball must have unit norm, got {self.coords}')
        else:
            raise GeometryError(f'Unknown model {self.model!r}')

    @classmethod
    def plane(cls, *coords: float) -> 'BoundaryPoint':
        return cls(HALF_SPACE, coords, len(coords) + 1)

    @classmethod
    def infinity(cls, dimension: int) -> 'BoundaryPoint':
        return cls(HALF_SPACE, None, dimension)

    @classmethod
    def sphere(cls, *coords: float) -> 'BoundaryPoint':
        return cls(BALL, coords, len(coords))

    @property
    def is_infinity(self) -> bool:
        return self.model == HALF_SPACE and self.coords is None

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


def cayley(x: np.ndarray) -> np.ndarray:
    """Half-space coordinates to ball coordinates, row-wise; boundary points have ``x_n = 0``."""
    x = np.asarray(x, dtype=float)
    squared = np.sum(x * x, axis=-1, keepdims=True)
    denominator = squared + 2 * x[..., -1:] + 1
    return np.concatenate([2 * x[..., :-1], squared - 1], axis=-1) / denominator


def inverse_cayley(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    squared = np.sum(y * y, axis=-1, keepdims=True)
    denominator = squared - 2 * y[..., -1:] + 1
    return np.concatenate([2 * y[..., :-1], 1 - squared], axis=-1) / denominator


def plane_to_sphere(u: np.ndarray) -> np.ndarray:
    """Boundary plane ``R^{n-1}`` to the unit sphere ``S^{n-1}``, row-wise."""
    u = np.asarray(u, dtype=float)
    squared = np.sum(u * u, axis=-1, keepdims=True)
    return np.concatenate([2 * u, squared - 1], axis=-1) / (squared + 1)


def sphere_to_plane(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(1 - y[..., -1]) < MODEL_TOL):
        raise GeometryError('The north pole is the point at infinity')
    return y[..., :-1] / (1 - y[..., -1:])


def to_ball(point: Union[HyperbolicPoint, BoundaryPoint]):
    if point.model == BALL:
        return point
    if isinstance(point, HyperbolicPoint):
        return HyperbolicPoint(BALL, tuple(cayley(point.array)))
    if point.is_infinity:
        return BoundaryPoint(BALL, (0.0,) * (point.dimension - 1) + (1.0,), point.dimension)
    return BoundaryPoint(BALL, tuple(plane_to_sphere(point.array)), point.dimension)


def to_half_space(point: Union[HyperbolicPoint, BoundaryPoint]):
    if point.model == HALF_SPACE:
        return point
    if isinstance(point, HyperbolicPoint):
        return HyperbolicPoint(HALF_SPACE, tuple(inverse_cayley(point.array)))
    if abs(1 - point.coords[-1]) < MODEL_TOL:
        return BoundaryPoint.infinity(point.dimension)
    return BoundaryPoint(HALF_SPACE, tuple(sphere_to_plane(point.array)), point.dimension)


def _same_model(p: HyperbolicPoint, q: HyperbolicPoint) -> Tuple[HyperbolicPoint, HyperbolicPoint]:
    if p.dimension != q.dimension:
        raise GeometryError(f'Points of H^{p.dimension} and H^{q.dimension} cannot be compared')
    if p.model == q.model:
        return p, q
    return to_ball(p), to_ball(q)


def distance(p: HyperbolicPoint, q: HyperbolicPoint) -> float:
    p, q = _same_model(p, q)
    gap = np.linalg.norm(p.array - q.array)
    if p.model == HALF_SPACE:
        return 2 * math.asinh(gap / (2 * math.sqrt(p.coords[-1] * q.coords[-1])))
    scale = (1 - np.dot(p.coords, p.coords)) * (1 - np.dot(q.coords, q.coords))
    return 2 * math.asinh(gap / math.sqrt(scale))


def distance_arccosh(p: HyperbolicPoint, q: HyperbolicPoint) -> float:
    """``arccosh(1 + |p - q|^2 / (2 p_n q_n))`` in the half-space."""
    p, q = to_half_space(p), to_half_space(q)
    squared = float(np.sum((p.array - q.array) ** 2))
    return math.acosh(1 + squared / (2 * p.coords[-1] * q.coords[-1]))


def horospherical_distance(displacement: float) -> float:
    """``d(o, N.o)`` for a horospherical translation of Euclidean length ``displacement``."""
    return 2 * math.asinh(displacement / 2)


def busemann(xi: BoundaryPoint, p: HyperbolicPoint, q: HyperbolicPoint) -> float:
    p, q = _same_model(p, q)
    if p.model == HALF_SPACE and xi.model == HALF_SPACE:
        if xi.is_infinity:
            return math.log(q.coords[-1] / p.coords[-1])
        u = np.append(xi.array, 0.0)
        near = float(np.sum((p.array - u) ** 2))
        far = float(np.sum((q.array - u) ** 2))
        return math.log(near / p.coords[-1]) - math.log(far / q.coords[-1])
    xi, p, q = to_ball(xi), to_ball(p), to_ball(q)
    near = float(np.sum((xi.array - p.array) ** 2))
    far = float(np.sum((xi.array - q.array) ** 2))
    if near == 0 or far == 0:
        raise GeometryError('Busemann function undefined at its own boundary point')
    return (math.log(near / (1 - np.dot(p.coords, p.coords)))
            - math.log(far / (1 - np.dot(q.coords, q.coords))))


def mobius_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a (+) b`` in the ball; ``b -> a (+) b`` is an isometry sending 0 to ``a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = float(np.dot(a, b))
    aa = float(np.dot(a, a))
    bb = float(np.dot(b, b))
    return ((1 + 2 * ab + bb) * a + (1 - aa) * b) / (1 + 2 * ab + aa * bb)


def _recentred(base: HyperbolicPoint, *points: BoundaryPoint) -> List[np.ndarray]:
    """Boundary points seen from ``base`` moved to the origin of the ball."""
    shift = -to_ball(base).array
    return [mobius_add(shift, to_ball(point).array) for point in points]


def foot_point(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Closest point to the origin on the ball geodesic between unit vectors ``xi`` and ``eta``."""
    return (xi + eta) / (2 + np.linalg.norm(xi - eta))


def geodesic_point(xi: BoundaryPoint, eta: BoundaryPoint, s: float, base: Optional[HyperbolicPoint] = None
                   ) -> HyperbolicPoint:
    """Point at signed distance ``s`` from the foot point of ``base`` on the geodesic ``(xi, eta)``."""
    base = base or HyperbolicPoint.base(xi.dimension, BALL)
    xi_0, eta_0 = _recentred(base, xi, eta)
    if np.allclose(xi_0, eta_0, atol=MODEL_TOL):
        raise GeometryError('A geodesic needs two distinct end points')
    foot = foot_point(xi_0, eta_0)
    # Move the foot point to the origin, where the geodesic is a diameter
    towards = mobius_add(-foot, eta_0)
    point = mobius_add(foot, math.tanh(s / 2) * towards)
    return HyperbolicPoint(BALL, tuple(mobius_add(to_ball(base).array, point)))


def gromov_product(xi: BoundaryPoint, eta: BoundaryPoint, base: Optional[HyperbolicPoint] = None,
                   z: Optional[HyperbolicPoint] = None) -> float:
    """``(xi | eta)_base = (B_xi(base, z) + B_eta(base, z)) / 2`` for ``z`` on the geodesic ``(xi, eta)``."""
    base = base or HyperbolicPoint.base(xi.dimension, BALL)
    xi_b, eta_b = to_ball(xi), to_ball(eta)
    if np.linalg.norm(xi_b.array - eta_b.array) < MODEL_TOL:
        raise GeometryError('The Gromov product of a point with itself is infinite')
    if z is None:
        xi_0, eta_0 = _recentred(base, xi, eta)
        foot = foot_point(xi_0, eta_0)
        origin = HyperbolicPoint.base(xi.dimension, BALL)
        z_0 = HyperbolicPoint(BALL, tuple(foot))
        return 0.5 * (busemann(BoundaryPoint(BALL, tuple(xi_0), xi.dimension), origin, z_0)
                      + busemann(BoundaryPoint(BALL, tuple(eta_0), xi.dimension), origin, z_0))
    return 0.5 * (busemann(xi_b, base, z) + busemann(eta_b, base, z))


def bourdon_metric(xi: BoundaryPoint, eta: BoundaryPoint, base: Optional[HyperbolicPoint] = None) -> float:
    if np.linalg.norm(to_ball(xi).array - to_ball(eta).array) < MODEL_TOL:
        return 0.0
    return math.exp(-gromov_product(xi, eta, base))


def spherical_metric(xi: BoundaryPoint, eta: BoundaryPoint) -> float:
    """Angle at the origin of the ball, computed stably as ``2 atan2(|xi - eta|, |xi + eta|)``."""
    a, b = to_ball(xi).array, to_ball(eta).array
    return 2 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b))


@dataclass(frozen=True)
class ParabolicGroupSpec:
    """Rank ``k`` lattice of horospherical translations of ``H^n`` fixing the point at infinity."""

    dimension: int
    vectors: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        vectors = tuple(tuple(float(c) for c in vector) for vector in self.vectors)
        object.__setattr__(self, 'vectors', vectors)
        if self.dimension < 2:
            raise GeometryError(f'Ambient dimension must be at least 2, got {self.dimension}')
        if not 1 <= len(vectors) <= self.dimension - 1:
            raise GeometryError(f'Rank must lie in [1, {self.dimension - 1}], got {len(vectors)}')
        if any(len(vector) != self.dimension - 1 for vector in vectors):
            raise GeometryError(f'Translation vectors of H^{self.dimension} have {self.dimension - 1} coordinates')
        if np.linalg.matrix_rank(self.matrix) < self.rank:
            raise GeometryError('Translation vectors are linearly dependent')

    @property
    def rank(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.vectors, dtype=float).reshape(len(self.vectors), self.dimension - 1)

    @property
    def singular_values(self) -> Tuple[float, float]:
        values = np.linalg.svd(self.matrix, compute_uv=False)
        return float(values.min()), float(values.max())

    def displacement(self, lattice: np.ndarray) -> np.ndarray:
        """``|sum N_i alpha_i|`` for every row ``N``."""
        return np.linalg.norm(np.asarray(lattice, dtype=float) @ self.matrix, axis=-1)

    def orbit_distance(self, lattice: np.ndarray) -> np.ndarray:
        return 2 * np.arcsinh(self.displacement(lattice) / 2)

    def translate(self, point: HyperbolicPoint, lattice: Sequence[int]) -> HyperbolicPoint:
        point = to_half_space(point)
        shift = np.asarray(lattice, dtype=float) @ self.matrix
        return HyperbolicPoint(HALF_SPACE, tuple(np.append(point.array[:-1] + shift, point.coords[-1])))

    def translate_boundary(self, xi: BoundaryPoint, lattice: Sequence[int]) -> BoundaryPoint:
        xi = to_half_space(xi)
        if xi.is_infinity:
            return xi
        return BoundaryPoint(HALF_SPACE, tuple(xi.array + np.asarray(lattice, dtype=float) @ self.matrix),
                             self.dimension)

    def __str__(self):
        return f'H^{self.dimension}, k={self.rank}, alpha={[list(vector) for vector in self.vectors]}'


def lattice_cube(rank: int, radius: int, cap: Optional[int] = None) -> np.ndarray:
    """All ``N`` in ``Z^rank`` with ``|N|_inf <= radius``, in lexicographic order."""
    count = (2 * radius + 1) ** rank
    cap = cap or settings.LATTICE_CAP
    if count > cap:
        fitting = int(((cap ** (1.0 / rank)) - 1) // 2)
        raise EnumerationCapError(f'{count} lattice points exceed the cap {cap}; use radius {fitting} or less',
                                  required=count, cap=cap, suggestion={'radius': fitting})
    axis = np.arange(-radius, radius + 1)
    return np.stack(np.meshgrid(*([axis] * rank), indexing='ij'), axis=-1).reshape(-1, rank)


def parabolic_orbit(group: ParabolicGroupSpec, xi: BoundaryPoint, radius: int, threads: int = 1) -> PointCloud:
    """The orbit points ``N.xi`` for ``|N|_inf <= radius`` as a cloud on the ball's boundary sphere."""
    if radius < 1:
        raise PreconditionError(f'Orbit radius must be at least 1, got {radius}')
    xi = to_half_space(xi)
    if xi.is_infinity:
        raise GeometryError('xi is fixed by P')
    if xi.dimension != group.dimension:
        raise GeometryError(f'xi lies on the boundary of H^{xi.dimension}, the group acts on H^{group.dimension}')
    lattice = lattice_cube(group.rank, radius)
    blocks = np.array_split(lattice, max(1, min(threads, lattice.shape[0])))
    matrix = group.matrix
    images = parallel_map(lambda block: plane_to_sphere(xi.array + block @ matrix), blocks, threads)
    logger.info(f'Orbit of {xi.coords} under {group} with radius {radius}: {lattice.shape[0]} points')
    return PointCloud.sphere(np.concatenate(images), provenance=f'{group}, xi={list(xi.coords)}, M={radius}')


@dataclass(frozen=True)
class TriangleReport:
    angle: float
    slack: float
    constant: float
    sides: Tuple[float, float, float]

    @property
    def holds(self) -> bool:
        return self.slack >= -self.constant - 1e-12


def angle_constant(angle: float) -> float:
    """A ``C`` with ``d(x, y) >= d(z, x) + d(z, y) - C`` whenever the angle at ``z`` is at least ``angle``.

    ``4 cosh c >= e^{a + b} (1 - cos angle)`` from the law of cosines gives ``log(4 / (1 - cos angle))``.
    """
    if not 0 < angle <= math.pi:
        raise PreconditionError(f'Angle bound must lie in (0, pi], got {angle!r}')
    one_minus = 1 - math.cos(angle)
    return max(2 * math.log(2 / one_minus), math.log(4 / one_minus)) if angle <= math.pi / 2 \
        else math.log(4 / one_minus)


def comparison_triangle_check(x: HyperbolicPoint, y: HyperbolicPoint, z: HyperbolicPoint,
                              min_angle: float) -> TriangleReport:
    x_b, y_b, z_b = to_ball(x), to_ball(y), to_ball(z)
    shift = -z_b.array
    u, v = mobius_add(shift, x_b.array), mobius_add(shift, y_b.array)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu < MODEL_TOL or nv < MODEL_TOL:
        raise GeometryError('Degenerate triangle: a vertex coincides with z')
    angle = math.acos(max(-1.0, min(1.0, float(np.dot(u, v)) / (nu * nv))))
    if angle < min_angle - 1e-12:
        raise PreconditionError(f'Angle {angle!r} at z is below {min_angle!r}')
    sides = (distance(x_b, y_b), distance(z_b, x_b), distance(z_b, y_b))
    return TriangleReport(angle, sides[0] - sides[1] - sides[2], angle_constant(min_angle), sides)


@dataclass(frozen=True)
class ParabolicSandwich:
    """``d(o, p^k o) - c <= (p^k xi | p^{k+1} xi)_o <= d(o, p^k o) + c'`` over a range of ``k``."""

    ks: Tuple[int, ...]
    lower_constant: float
    upper_constant: float
    bourdon_ratios: Tuple[float, float]
    distance_ratios: Tuple[float, float]

    @property
    def spread(self) -> float:
        return self.lower_constant + self.upper_constant


def parabolic_sandwich(group: ParabolicGroupSpec, xi: BoundaryPoint, ks: Iterable[int]) -> ParabolicSandwich:
    if group.rank != 1:
        raise PreconditionError('The sandwich is computed for cyclic parabolic groups')
    xi = to_half_space(xi)
    if xi.is_infinity:
        raise GeometryError('xi is fixed by P')
    ks = tuple(int(k) for k in ks)
    origin = HyperbolicPoint.base(group.dimension, BALL)
    gaps = []
    bourdon_ratios = []
    distance_ratios = []
    for k in ks:
        here = to_ball(group.translate_boundary(xi, [k]))
        there = to_ball(group.translate_boundary(xi, [k + 1]))
        product = gromov_product(here, there, origin)
        reach = float(group.orbit_distance([[k]])[0])
        gaps.append(reach - product)
        if abs(k) > 1:
            bourdon_ratios.append(math.log(abs(k)) / product)
            distance_ratios.append(math.log(abs(k)) / reach)
    gaps = np.array(gaps)
    return ParabolicSandwich(
        ks=ks,
        lower_constant=float(max(gaps.max(), 0.0)),
        upper_constant=float(max(-gaps.min(), 0.0)),
        bourdon_ratios=(min(bourdon_ratios), max(bourdon_ratios)),
        distance_ratios=(min(distance_ratios), max(distance_ratios)),
    )


def random_ball_points(rng: np.random.Generator, count: int, dimension: int, max_radius: float = 0.99) -> np.ndarray:
    directions = rng.normal(size=(count, dimension))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = max_radius * rng.random(count) ** (1.0 / dimension)
    return directions * radii[:, None]


def random_sphere_points(rng: np.random.Generator, count: int, dimension: int) -> np.ndarray:
    points = rng.normal(size=(count, dimension))
    return points / np.linalg.norm(points, axis=1, keepdims=True)
