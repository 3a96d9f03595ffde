"""
Geometry - intervals, 2D domains and node generation

Centers live in the extension interval [-T, T] (1D) or the bounding box
[-T1, T1] x [-T2, T2] (2D) and may lie outside the domain. Samples lie in
the domain. All generators are deterministic.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from matplotlib.path import Path as CurvePath

from core.exceptions import GeometryError, InvalidArgumentError, UnsupportedOperationError


MEMBERSHIP_TOL = 1e-10
HEX_COUNT_TOLERANCE = 0.15      # relative miss of the unclipped hex count


class NodeRole(Enum):
    """Role of a node set in an LS-RBF problem"""
    CENTER = "Center"
    INTERIOR_SAMPLE = "InteriorSample"
    BOUNDARY_SAMPLE = "BoundarySample"


@dataclass(frozen=True)
class NodeSet:
    """Points in R^d with their role and generation metadata"""
    points: np.ndarray
    role: NodeRole
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        pts.setflags(write=False)
        object.__setattr__(self, 'points', pts)

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.count

    def flat(self) -> np.ndarray:
        """1D coordinates as a flat array"""
        return self.points[:, 0] if self.dim == 1 else self.points

    def permuted(self, order: Sequence[int]) -> "NodeSet":
        return NodeSet(self.points[np.asarray(order)], self.role, dict(self.meta))


# ============================================================================
# 1D
# ============================================================================

@dataclass(frozen=True)
class Interval:
    """Domain [a, b] inside the extension interval (-T, T)"""
    a: float = -1.0
    b: float = 1.0
    T: float = 1.5
    allow_touching: bool = False   # T == B is allowed only for the confined-centers ablation

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidArgumentError(f"Interval requires a < b, got [{self.a}, {self.b}]")
        if self.T <= 0:
            raise InvalidArgumentError(f"Extension half-width T must be positive, got {self.T}")
        if self.B > self.T or (self.B == self.T and not self.allow_touching):
            raise InvalidArgumentError(
                f"[{self.a}, {self.b}] must lie inside (-T, T) with T={self.T}"
            )

    @property
    def B(self) -> float:
        return max(abs(self.a), abs(self.b))

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        return (x >= self.a - tol) & (x <= self.b + tol)


def centers_1d(N: int, T: float) -> NodeSet:
    """
    2N+1 equispaced centers xi_n = n T / N, n = -N..N.

    Built from integer indices so that xi_{-n} == -xi_n exactly.
    """
    if N < 1:
        raise InvalidArgumentError(f"N must be at least 1, got {N}")
    if T <= 0:
        raise InvalidArgumentError(f"T must be positive, got {T}")
    n = np.arange(-N, N + 1, dtype=float)
    points = n * T / N
    return NodeSet(points, NodeRole.CENTER, {'N': N, 'T': T, 'spacing': T / N})


def confined_centers_1d(N: int, interval: Interval) -> NodeSet:
    """2N+1 equispaced centers on [a, b]: no centers outside the domain"""
    if N < 1:
        raise InvalidArgumentError(f"N must be at least 1, got {N}")
    points = np.linspace(interval.a, interval.b, 2 * N + 1)
    return NodeSet(points, NodeRole.CENTER, {'N': N, 'confined': True})


def samples_1d(M: int, interval: Interval) -> NodeSet:
    """M equispaced points spanning [a, b], endpoints included"""
    if M < 2:
        raise InvalidArgumentError(f"M must be at least 2, got {M}")
    points = np.linspace(interval.a, interval.b, M)
    return NodeSet(points, NodeRole.INTERIOR_SAMPLE, {'M': M})


def interior_samples_1d(M: int, interval: Interval) -> NodeSet:
    """M equispaced points strictly inside (a, b)"""
    if M < 1:
        raise InvalidArgumentError(f"M must be at least 1, got {M}")
    points = np.linspace(interval.a, interval.b, M + 2)[1:-1]
    return NodeSet(points, NodeRole.INTERIOR_SAMPLE, {'M': M})


def boundary_points_1d(interval: Interval) -> NodeSet:
    return NodeSet([interval.a, interval.b], NodeRole.BOUNDARY_SAMPLE, {'M': 2})


def oversample_count(N: int, gamma: float, dim: int = 1) -> int:
    """
    Number of samples for oversampling ratio gamma.

    1D: ceil(gamma * (2N + 1)) for the 2N+1 centers of centers_1d.
    2D: ceil(gamma * N) where N is the total number of centers.
    """
    if gamma < 1:
        raise InvalidArgumentError(f"Oversampling ratio must be >= 1, got {gamma}")
    if N < 1:
        raise InvalidArgumentError(f"N must be at least 1, got {N}")
    total = 2 * N + 1 if dim == 1 else N
    # gamma * total may land a hair above an integer
    return int(math.ceil(round(gamma * total, 9)))


# ============================================================================
# 2D DOMAINS
# ============================================================================

class Domain2D(ABC):
    """Planar domain with a bounding box [-T1, T1] x [-T2, T2]"""

    kind: str = "domain"

    def __init__(self, bounding: Tuple[float, float]):
        T1, T2 = (float(v) for v in bounding)
        if T1 <= 0 or T2 <= 0:
            raise InvalidArgumentError(f"Bounding half-widths must be positive, got {bounding}")
        self.bounding = (T1, T2)

    @abstractmethod
    def contains(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        """Boolean mask of points inside the closed domain"""

    @abstractmethod
    def area(self) -> float:
        pass

    @abstractmethod
    def extent(self) -> Tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) of the domain itself"""

    def bounding_area(self) -> float:
        return 4.0 * self.bounding[0] * self.bounding[1]

    def bounding_region(self) -> "BoxDomain":
        return BoxDomain(self.bounding, bounding=self.bounding)

    def _check_inside_bounding(self):
        xmin, xmax, ymin, ymax = self.extent()
        T1, T2 = self.bounding
        if xmin < -T1 or xmax > T1 or ymin < -T2 or ymax > T2:
            raise InvalidArgumentError(
                f"{self.kind} domain extent {self.extent()} exceeds bounding box {self.bounding}"
            )

    def on_boundary(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        raise UnsupportedOperationError(f"Boundary membership not available for {self.kind}")


class BoxDomain(Domain2D):
    """Axis-aligned box [-h1, h1] x [-h2, h2]"""

    kind = "box"

    def __init__(self, half_widths: Tuple[float, float], bounding: Optional[Tuple[float, float]] = None):
        h1, h2 = (float(v) for v in half_widths)
        if h1 <= 0 or h2 <= 0:
            raise InvalidArgumentError(f"Box half-widths must be positive, got {half_widths}")
        self.half_widths = (h1, h2)
        super().__init__(bounding or (h1, h2))
        self._check_inside_bounding()

    def contains(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        h1, h2 = self.half_widths
        return (np.abs(pts[:, 0]) <= h1 + tol) & (np.abs(pts[:, 1]) <= h2 + tol)

    def on_boundary(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        h1, h2 = self.half_widths
        edge = (np.abs(np.abs(pts[:, 0]) - h1) <= tol) | (np.abs(np.abs(pts[:, 1]) - h2) <= tol)
        return edge & self.contains(pts, tol)

    def area(self) -> float:
        return 4.0 * self.half_widths[0] * self.half_widths[1]

    def extent(self):
        h1, h2 = self.half_widths
        return (-h1, h1, -h2, h2)


class DiskDomain(Domain2D):
    """Disk of given center and radius"""

    kind = "disk"

    def __init__(self, center: Tuple[float, float] = (0.0, 0.0), radius: float = 1.0,
                 bounding: Optional[Tuple[float, float]] = None):
        if radius <= 0:
            raise InvalidArgumentError(f"Disk radius must be positive, got {radius}")
        self.center = (float(center[0]), float(center[1]))
        self.radius = float(radius)
        if bounding is None:
            reach = 1.3 * (max(abs(self.center[0]), abs(self.center[1])) + self.radius)
            bounding = (reach, reach)
        super().__init__(bounding)
        self._check_inside_bounding()

    def contains(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        r = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return r <= self.radius + tol

    def on_boundary(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        r = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return np.abs(r - self.radius) <= tol

    def curve(self, theta: np.ndarray) -> np.ndarray:
        return np.column_stack([
            self.center[0] + self.radius * np.cos(theta),
            self.center[1] + self.radius * np.sin(theta),
        ])

    def area(self) -> float:
        return math.pi * self.radius ** 2

    def extent(self):
        cx, cy = self.center
        return (cx - self.radius, cx + self.radius, cy - self.radius, cy + self.radius)


class ParametricDomain(Domain2D):
    """
    Domain enclosed by a closed Fourier curve.

    x(theta) = sum_k xc[k] cos(k theta) + xs[k] sin(k theta), same for y.
    Index 0 holds the constant term; xs[0] and ys[0] are ignored.
    """

    kind = "parametric"
    _RESOLUTION = 4096

    def __init__(self, x_cos: Sequence[float], x_sin: Sequence[float],
                 y_cos: Sequence[float], y_sin: Sequence[float],
                 bounding: Optional[Tuple[float, float]] = None):
        length = max(len(x_cos), len(x_sin), len(y_cos), len(y_sin))
        if length < 2:
            raise InvalidArgumentError("Fourier boundary needs at least one non-constant term")

        def pad(seq):
            arr = np.zeros(length)
            arr[:len(seq)] = np.asarray(seq, dtype=float)
            return arr

        self.x_cos, self.x_sin = pad(x_cos), pad(x_sin)
        self.y_cos, self.y_sin = pad(y_cos), pad(y_sin)

        theta = np.linspace(0.0, 2.0 * np.pi, self._RESOLUTION, endpoint=False)
        self._polygon = self.curve(theta)

        start, end = self.curve(np.array([0.0, 2.0 * np.pi]))
        if np.max(np.abs(start - end)) > 1e-12:
            raise InvalidArgumentError("Parametric boundary is not closed")
        if abs(self._signed_area()) <= 0:
            raise InvalidArgumentError("Parametric boundary encloses no area")

        if bounding is None:
            xmin, xmax, ymin, ymax = self.extent()
            reach = 1.3 * max(abs(xmin), abs(xmax), abs(ymin), abs(ymax))
            bounding = (reach, reach)
        super().__init__(bounding)
        self._check_inside_bounding()
        self._path = CurvePath(np.vstack([self._polygon, self._polygon[:1]]), closed=True)

    def curve(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        k = np.arange(len(self.x_cos))
        cos_kt = np.cos(np.outer(theta, k))
        sin_kt = np.sin(np.outer(theta, k))
        x = cos_kt @ self.x_cos + sin_kt @ self.x_sin
        y = cos_kt @ self.y_cos + sin_kt @ self.y_sin
        return np.column_stack([x, y])

    def _signed_area(self) -> float:
        x, y = self._polygon[:, 0], self._polygon[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def contains(self, points, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        inside = self._path.contains_points(pts)
        if tol > 0:
            inside |= self._path.contains_points(pts, radius=tol) | self._path.contains_points(pts, radius=-tol)
        return inside

    def area(self) -> float:
        return abs(self._signed_area())

    def extent(self):
        xs, ys = self._polygon[:, 0], self._polygon[:, 1]
        return (float(xs.min()), float(xs.max()), float(ys.min()), float(ys.max()))


def ellipse_domain(a: float = 2.0, b: float = 1.0,
                   bounding: Optional[Tuple[float, float]] = None) -> ParametricDomain:
    """x = a cos(theta), y = b sin(theta)"""
    return ParametricDomain([0.0, a], [0.0, 0.0], [0.0, 0.0], [0.0, b], bounding=bounding)


def star_domain(radius: float = 1.0, amplitude: float = 0.3, lobes: int = 5,
                bounding: Optional[Tuple[float, float]] = None) -> ParametricDomain:
    """
    Star shaped domain r(theta) = radius (1 + amplitude cos(lobes theta)).

    Written as a Fourier curve: r cos(theta) and r sin(theta) expand into
    modes 1 and lobes +- 1.
    """
    if lobes < 2:
        raise InvalidArgumentError(f"Star domain needs at least 2 lobes, got {lobes}")
    size = lobes + 2
    x_cos, y_sin = np.zeros(size), np.zeros(size)
    x_cos[1] = radius
    y_sin[1] = radius
    half = 0.5 * radius * amplitude
    x_cos[lobes + 1] += half
    x_cos[lobes - 1] += half
    y_sin[lobes + 1] += half
    y_sin[lobes - 1] -= half
    return ParametricDomain(x_cos, np.zeros(size), np.zeros(size), y_sin, bounding=bounding)


# ============================================================================
# 2D NODE GENERATION
# ============================================================================

def _lattice_shape(region: BoxDomain, h: float) -> Tuple[int, int]:
    """(rows, cols) of the lattice with spacing h; odd rows hold cols - 1 points"""
    h1, h2 = region.half_widths
    dy = h * math.sqrt(3.0) / 2.0
    rows = int(math.floor(2.0 * h2 / dy + 1e-9)) + 1
    cols = int(math.floor(2.0 * h1 / h + 1e-9)) + 1
    return rows, cols


def _lattice_count(region: BoxDomain, h: float) -> int:
    """Number of lattice points; non-increasing in h"""
    rows, cols = _lattice_shape(region, h)
    return (rows + 1) // 2 * cols + rows // 2 * (cols - 1)


def _lattice(region: BoxDomain, h: float) -> np.ndarray:
    """Row-wise triangular lattice with spacing h, centered in the box"""
    rows, cols = _lattice_shape(region, h)
    dy = h * math.sqrt(3.0) / 2.0
    y0 = -0.5 * (rows - 1) * dy
    x0 = -0.5 * (cols - 1) * h
    chunks = []
    for j in range(rows):
        if j % 2:
            xs = x0 + 0.5 * h + h * np.arange(cols - 1)
        else:
            xs = x0 + h * np.arange(cols)
        chunks.append(np.column_stack([xs, np.full(xs.shape, y0 + j * dy)]))
    return np.vstack(chunks)


def _spacing_edge(region: BoxDomain, count: int) -> Tuple[float, float]:
    """
    Bisect the spacing on the integer point count.

    Returns adjacent floats (fine, coarse) with
    count(fine) >= count > count(coarse).
    """
    fine = math.sqrt(2.0 * region.area() / (math.sqrt(3.0) * count))
    while _lattice_count(region, fine) < count:
        fine *= 0.5
    coarse = 4.0 * max(region.half_widths)       # a single point
    while True:
        mid = 0.5 * (fine + coarse)
        if not fine < mid < coarse:
            return fine, coarse
        if _lattice_count(region, mid) >= count:
            fine = mid
        else:
            coarse = mid


def _as_box(region) -> BoxDomain:
    if isinstance(region, BoxDomain):
        return region
    if isinstance(region, Domain2D):
        return region.bounding_region()
    h1, h2 = (float(v) for v in region)
    return BoxDomain((h1, h2))


def hex_grid(region, target_count: int, clip_to: Optional[Domain2D] = None,
             role: NodeRole = NodeRole.CENTER,
             tolerance: Optional[float] = HEX_COUNT_TOLERANCE) -> NodeSet:
    """
    Hexagonal (triangular lattice) nodes covering a centered box.

    The unclipped lattice holds the achievable point count nearest to
    target_count (ties go to the larger count); h is taken in the middle
    of the spacing range giving that count. Clipping then keeps the
    points inside clip_to, so the clipped grid is always a subset of the
    unclipped one.

    Args:
        region: BoxDomain, any Domain2D (its bounding box is used) or (T1, T2)
        target_count: Desired number of unclipped points
        clip_to: Optional domain to clip to
        role: Role recorded on the node set
        tolerance: Largest accepted |count - target| / target; None accepts any count

    Raises:
        GeometryError: If no lattice of the box meets the tolerance
    """
    if target_count < 1:
        raise InvalidArgumentError(f"target_count must be at least 1, got {target_count}")
    box = _as_box(region)
    if box.area() <= 0:
        raise InvalidArgumentError("Region has zero area")

    if target_count == 1:
        points = np.zeros((1, 2))
        h = float('inf')
    else:
        fine, coarse = _spacing_edge(box, target_count)
        above, below = _lattice_count(box, fine), _lattice_count(box, coarse)
        count = above if above - target_count <= target_count - below else below
        if tolerance is not None and abs(count - target_count) > tolerance * target_count:
            raise GeometryError(
                f"No hexagonal lattice of box {box.half_widths} holds {target_count} points "
                f"within {tolerance:.0%} (nearest: {below}, {above})"
            )
        h = 0.5 * (_spacing_edge(box, count)[0] + _spacing_edge(box, count + 1)[0])
        points = _lattice(box, h)

    if clip_to is not None:
        points = points[clip_to.contains(points)]
    return NodeSet(points, role, {'spacing': h, 'target': target_count,
                                  'clipped': clip_to is not None})


def hex_fill(domain: Domain2D, count: int, role: NodeRole = NodeRole.INTERIOR_SAMPLE) -> NodeSet:
    """Hexagonal nodes inside the domain, about `count` of them"""
    if count < 1:
        raise InvalidArgumentError(f"count must be at least 1, got {count}")
    xmin, xmax, ymin, ymax = domain.extent()
    box = BoxDomain((max(abs(xmin), abs(xmax)), max(abs(ymin), abs(ymax))))
    target = max(1, int(round(count * box.area() / domain.area())))
    return hex_grid(box, target, clip_to=domain, role=role, tolerance=None)


class CenterRegion(Enum):
    """Part of the bounding box filled with 2D centers"""
    BOX = "box"                 # the whole bounding box
    INSCRIBED = "inscribed"     # the disk or ellipse inscribed in it

    @classmethod
    def from_name(cls, name) -> "CenterRegion":
        if isinstance(name, CenterRegion):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise InvalidArgumentError(f"Unknown center region '{name}' (box | inscribed)")


def inscribed_region(box: BoxDomain) -> Domain2D:
    """Disk (square box) or axis-aligned ellipse touching the box edges"""
    T1, T2 = box.half_widths
    if T1 == T2:
        return DiskDomain(radius=T1, bounding=(T1, T2))
    return ellipse_domain(T1, T2, bounding=(T1, T2))


def hex_centers(bounding: BoxDomain, count: int, region=CenterRegion.BOX) -> NodeSet:
    """
    About `count` hexagonal centers in the bounding box or its inscribed
    region. The inscribed lattice is the box lattice with the corner
    points clipped away.
    """
    region = CenterRegion.from_name(region)
    box = _as_box(bounding)
    if region is CenterRegion.BOX:
        return hex_grid(box, count)
    inscribed = inscribed_region(box)
    target = max(1, int(round(count * box.area() / inscribed.area())))
    nodes = hex_grid(box, target, clip_to=inscribed)
    return NodeSet(nodes.points, NodeRole.CENTER, {**nodes.meta, 'region': region.value})


def boundary_points(domain: Domain2D, count: int) -> NodeSet:
    """
    Points on the boundary curve at theta_m = 2 pi m / count.

    Raises:
        UnsupportedOperationError: For box domains (use box_edge_points)
        InvalidArgumentError: If count < 3
    """
    if count < 3:
        raise InvalidArgumentError(f"count must be at least 3, got {count}")
    if isinstance(domain, BoxDomain):
        raise UnsupportedOperationError("Box boundaries are sampled per edge: use box_edge_points")
    if not isinstance(domain, (DiskDomain, ParametricDomain)):
        raise UnsupportedOperationError(f"No boundary parameterization for {type(domain).__name__}")
    theta = 2.0 * np.pi * np.arange(count) / count
    points = domain.curve(theta)
    return NodeSet(points, NodeRole.BOUNDARY_SAMPLE, {'M': count})


def box_edge_points(domain: BoxDomain, count: int) -> NodeSet:
    """Equispaced points along the 4 edges of a box, corners counted once"""
    if count < 4:
        raise InvalidArgumentError(f"count must be at least 4, got {count}")
    h1, h2 = domain.half_widths
    corners = np.array([[-h1, -h2], [h1, -h2], [h1, h2], [-h1, h2], [-h1, -h2]])
    lengths = np.linalg.norm(np.diff(corners, axis=0), axis=1)
    per_edge = np.maximum(1, np.round(count * lengths / lengths.sum()).astype(int))
    chunks = []
    for k in range(4):
        t = np.arange(per_edge[k]) / per_edge[k]
        chunks.append(corners[k] + np.outer(t, corners[k + 1] - corners[k]))
    points = np.vstack(chunks)
    return NodeSet(points, NodeRole.BOUNDARY_SAMPLE, {'M': points.shape[0]})


def domain_boundary_points(domain: Domain2D, count: int) -> NodeSet:
    """About `count` boundary nodes: per edge for boxes, along the curve otherwise"""
    if isinstance(domain, BoxDomain):
        return box_edge_points(domain, count)
    return boundary_points(domain, count)
