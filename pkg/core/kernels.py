"""
Radial Kernels - profiles, shaped translates and the Gaussian Laplacian

Provides:
- RbfKernel: the four global radial profiles (GA, MQ, IQ, IMQ)
- ShapedRbf: one translate phi(eps * |x - center|) with optional L2 normalization
- Vectorized matrix builders used by the least-squares and collocation engines

Every profile is evaluated on t = eps * r, so profile(kernel, 0) == 1 for
all kernels. The normalization factor eps^(d/2) keeps the L2(R^d) norm of a
Gaussian translate independent of eps.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from core.exceptions import InvalidArgumentError, UnsupportedOperationError


ArrayLike = Union[float, np.ndarray]


class RbfKernel(Enum):
    """Global radial profiles"""
    GA = "GA"       # Gaussian: exp(-t^2)
    MQ = "MQ"       # Multiquadric: sqrt(1 + t^2)
    IQ = "IQ"       # Inverse quadratic: 1 / (1 + t^2)
    IMQ = "IMQ"     # Inverse multiquadric: 1 / sqrt(1 + t^2)

    @classmethod
    def from_name(cls, name: Union[str, "RbfKernel"]) -> "RbfKernel":
        """Parse a kernel abbreviation, case-insensitive"""
        if isinstance(name, RbfKernel):
            return name
        try:
            return cls[str(name).strip().upper()]
        except KeyError:
            valid = ", ".join(k.value for k in cls)
            raise InvalidArgumentError(f"Unknown kernel '{name}'. Valid kernels: {valid}")

    def profile(self, t: ArrayLike) -> ArrayLike:
        return profile(self, t)


def profile(kernel: RbfKernel, t: ArrayLike) -> ArrayLike:
    """
    Evaluate the radial profile phi(t).

    Only t^2 enters each closed form, so phi(t) == phi(-t) holds exactly.

    Args:
        kernel: Radial profile
        t: Scaled distance eps * r (scalar or array)

    Returns:
        phi(t) with the same shape as t
    """
    t2 = np.square(np.asarray(t, dtype=float))
    if kernel is RbfKernel.GA:
        value = np.exp(-t2)
    elif kernel is RbfKernel.MQ:
        value = np.sqrt(1.0 + t2)
    elif kernel is RbfKernel.IQ:
        value = 1.0 / (1.0 + t2)
    elif kernel is RbfKernel.IMQ:
        value = 1.0 / np.sqrt(1.0 + t2)
    else:
        raise UnsupportedOperationError(f"Kernel {kernel} has no profile")
    return value if value.ndim else float(value)


def normalization_factor(epsilon: float, dim: int, normalized: bool = True) -> float:
    """eps^(d/2) when normalized, 1 otherwise"""
    return float(epsilon) ** (dim / 2.0) if normalized else 1.0


def as_points(points, dim: int) -> np.ndarray:
    """
    Coerce points to an (n, dim) float array.

    Accepts scalars and flat sequences in 1D, (n, 2) arrays or a single
    pair in 2D.
    """
    arr = np.asarray(points, dtype=float)
    if dim == 1:
        if arr.ndim == 2 and arr.shape[1] == 1:
            return arr
        if arr.ndim <= 1:
            return arr.reshape(-1, 1)
    elif dim == 2:
        if arr.ndim == 1 and arr.shape[0] == 2:
            return arr.reshape(1, 2)
        if arr.ndim == 2 and arr.shape[1] == 2:
            return arr
    raise InvalidArgumentError(f"Points of shape {arr.shape} do not have dimension {dim}")


def _check_dim(dim: int):
    if dim not in (1, 2):
        raise InvalidArgumentError(f"Dimension must be 1 or 2, got {dim}")


def _check_epsilon(epsilon: float):
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise InvalidArgumentError(f"Shape parameter must be positive, got {epsilon}")


def pairwise_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix, rows = points, columns = centers"""
    diff = points[:, None, :] - centers[None, :, :]
    return np.sqrt(np.einsum('mnd,mnd->mn', diff, diff))


# ============================================================================
# SHAPED TRANSLATE
# ============================================================================

@dataclass(frozen=True)
class ShapedRbf:
    """One translate phi(eps * |x - center|), optionally scaled by eps^(d/2)"""
    kernel: RbfKernel
    epsilon: float
    center: tuple
    dim: int = 1
    normalized: bool = True

    def __post_init__(self):
        _check_dim(self.dim)
        _check_epsilon(self.epsilon)
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        if center.shape != (self.dim,):
            raise InvalidArgumentError(
                f"Center {self.center} does not have dimension {self.dim}"
            )
        object.__setattr__(self, 'center', tuple(center.tolist()))
        object.__setattr__(self, 'kernel', RbfKernel.from_name(self.kernel))

    @property
    def norm_factor(self) -> float:
        return normalization_factor(self.epsilon, self.dim, self.normalized)

    def eval(self, x) -> float:
        """
        Evaluate the translate at a single point.

        Raises:
            InvalidArgumentError: If x does not have dimension self.dim
        """
        point = np.atleast_1d(np.asarray(x, dtype=float))
        if point.shape != (self.dim,):
            raise InvalidArgumentError(f"Point {x} does not have dimension {self.dim}")
        r = float(np.linalg.norm(point - np.asarray(self.center)))
        return self.norm_factor * profile(self.kernel, self.epsilon * r)

    def eval_many(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        r = np.linalg.norm(pts - np.asarray(self.center)[None, :], axis=1)
        return self.norm_factor * profile(self.kernel, self.epsilon * r)

    __call__ = eval


def eval_rbf(rbf: ShapedRbf, x) -> float:
    """Functional form of ShapedRbf.eval"""
    return rbf.eval(x)


# ============================================================================
# GAUSSIAN LAPLACIAN
# ============================================================================

def neg_laplacian_gaussian(epsilon: float, center, x, dim: int,
                           normalized: bool = False,
                           kernel: RbfKernel = RbfKernel.GA) -> float:
    """
    -Laplacian of the Gaussian translate exp(-eps^2 |x - center|^2).

    Closed form: (2 d eps^2 - 4 eps^4 r^2) exp(-eps^2 r^2), multiplied by
    eps^(d/2) when the normalized convention is in use.

    Raises:
        UnsupportedOperationError: For any kernel other than GA
        InvalidArgumentError: On dimension mismatch
    """
    kernel = RbfKernel.from_name(kernel)
    if kernel is not RbfKernel.GA:
        raise UnsupportedOperationError(f"Laplacian is only implemented for GA, not {kernel.value}")
    _check_dim(dim)
    _check_epsilon(epsilon)
    xi = np.atleast_1d(np.asarray(center, dtype=float))
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if xi.shape != (dim,) or pt.shape != (dim,):
        raise InvalidArgumentError(
            f"Point {x} and center {center} must both have dimension {dim}"
        )
    r2 = float(np.sum((pt - xi) ** 2))
    eps2 = epsilon * epsilon
    value = (2.0 * dim * eps2 - 4.0 * eps2 * eps2 * r2) * np.exp(-eps2 * r2)
    return normalization_factor(epsilon, dim, normalized) * float(value)


# ============================================================================
# MATRIX BUILDERS
# ============================================================================

def kernel_matrix(kernel: RbfKernel, epsilon: float, centers, points,
                  dim: int, normalized: bool = True) -> np.ndarray:
    """
    Unscaled basis evaluation matrix K[m, n] = eps^(d/2) phi(eps |x_m - xi_n|).

    Args:
        kernel: Radial profile
        epsilon: Shape parameter
        centers: (N, dim) center coordinates
        points: (M, dim) evaluation points
        dim: Spatial dimension
        normalized: Apply the eps^(d/2) factor

    Returns:
        (M, N) array
    """
    _check_dim(dim)
    _check_epsilon(epsilon)
    kernel = RbfKernel.from_name(kernel)
    r = pairwise_distances(as_points(points, dim), as_points(centers, dim))
    return normalization_factor(epsilon, dim, normalized) * profile(kernel, epsilon * r)


def neg_laplacian_matrix(epsilon: float, centers, points, dim: int,
                         normalized: bool = True,
                         kernel: RbfKernel = RbfKernel.GA) -> np.ndarray:
    """Matrix L[m, n] = -Laplacian of the n-th Gaussian translate at x_m"""
    kernel = RbfKernel.from_name(kernel)
    if kernel is not RbfKernel.GA:
        raise UnsupportedOperationError(f"Laplacian is only implemented for GA, not {kernel.value}")
    _check_dim(dim)
    _check_epsilon(epsilon)
    r = pairwise_distances(as_points(points, dim), as_points(centers, dim))
    eps2 = epsilon * epsilon
    r2 = r * r
    values = (2.0 * dim * eps2 - 4.0 * eps2 * eps2 * r2) * np.exp(-eps2 * r2)
    return normalization_factor(epsilon, dim, normalized) * values
