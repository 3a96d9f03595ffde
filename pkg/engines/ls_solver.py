"""
LS-RBF Solver - assembly, regularized solution and evaluation

Builds the rectangular system
    A[m, n] = sqrt(T / M) * eps^(d/2) * phi(eps |x_m - xi_n|),   b[m] = sqrt(T / M) * f(x_m)
and solves it with a truncated SVD (default) or a column-pivoted QR,
discarding singular directions below the threshold tau.

In 2D the measure proxy T is replaced by the bounding-box area, so that
the scaled residual norm is a Riemann sum for the L2 norm.

Solves are dense. Results are immutable and safe to share across threads.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from core.exceptions import (
    InvalidArgumentError, SampleEvaluationError, UndefinedRatioError
)
from core.geometry import NodeSet
from core.kernels import RbfKernel, as_points, kernel_matrix


logger = logging.getLogger('LsSolver')


class ThresholdMode(Enum):
    """How tau is compared with the singular values"""
    RELATIVE = "relative"       # discard sigma_i <= tau * sigma_1
    ABSOLUTE = "absolute"       # discard sigma_i <= tau

    @classmethod
    def from_name(cls, name) -> "ThresholdMode":
        if isinstance(name, ThresholdMode):
            return name
        key = str(name).strip().lower()
        aliases = {'relativetosigma1': 'relative', 'rel': 'relative', 'abs': 'absolute'}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InvalidArgumentError(f"Unknown threshold mode '{name}' (relative | absolute)")


class Factorization(Enum):
    """Regularized factorization"""
    TSVD = "svd"
    PIVOTED_QR = "qr"

    @classmethod
    def from_name(cls, name) -> "Factorization":
        if isinstance(name, Factorization):
            return name
        key = str(name).strip().lower()
        aliases = {'truncatedsvd': 'svd', 'tsvd': 'svd', 'pivotedqr': 'qr', 'rrqr': 'qr'}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InvalidArgumentError(f"Unknown factorization '{name}' (svd | qr)")


@dataclass
class SolverConfig:
    """Regularization settings"""
    tau: float = 1e-10
    threshold_mode: ThresholdMode = ThresholdMode.RELATIVE
    factorization: Factorization = Factorization.TSVD

    def __post_init__(self):
        self.threshold_mode = ThresholdMode.from_name(self.threshold_mode)
        self.factorization = Factorization.from_name(self.factorization)
        if not self.tau > 0:
            raise InvalidArgumentError(f"tau must be positive, got {self.tau}")

    def to_dict(self) -> Dict:
        return {
            'tau': self.tau,
            'threshold_mode': self.threshold_mode.value,
            'factorization': self.factorization.value,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SolverConfig":
        valid_keys = {k: v for k, v in data.items() if k in cls.__annotations__}
        return cls(**valid_keys)


@dataclass(frozen=True)
class SystemMeta:
    """What is needed to evaluate an expansion built from a system"""
    kernel: RbfKernel
    epsilon: float
    centers: NodeSet
    samples: Optional[NodeSet] = None
    dim: int = 1
    normalized: bool = True
    measure: float = 1.0


@dataclass(frozen=True)
class LsSystem:
    """Row-scaled least-squares system A lambda ~ b"""
    matrix: np.ndarray
    rhs: np.ndarray
    row_scale: float
    meta: SystemMeta

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class LsSolution:
    """Regularized coefficient vector with solver diagnostics"""
    coefficients: np.ndarray
    coeff_norm: float
    residual_norm: float
    effective_rank: int
    sigma1: float
    threshold: float = 0.0
    singular_values: Optional[np.ndarray] = field(default=None, compare=False)
    warnings: Tuple[str, ...] = ()

    @property
    def is_zero_rank(self) -> bool:
        return self.effective_rank == 0


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


# ============================================================================
# ASSEMBLY
# ============================================================================

def sample_function(f: Callable, samples: NodeSet) -> np.ndarray:
    """
    Evaluate f on the sample nodes.

    f is called once on the whole node array (flat in 1D, (M, 2) in 2D);
    if that raises TypeError/ValueError or returns a mismatched shape or
    non-finite values, f is evaluated point by point so the failing sample
    can be reported. Other exceptions propagate unchanged.

    Raises:
        SampleEvaluationError: With the index of the first failing sample
    """
    points = samples.flat()
    try:
        values = np.asarray(f(points), dtype=float).reshape(-1)
        if values.shape[0] == samples.count and np.all(np.isfinite(values)):
            return values
    except (TypeError, ValueError):
        pass

    values = np.empty(samples.count)
    for index, point in enumerate(points):
        try:
            value = float(np.asarray(f(point), dtype=float).reshape(-1)[0])
        except Exception as error:
            raise SampleEvaluationError(index, point, error) from error
        if not math.isfinite(value):
            raise SampleEvaluationError(index, point, ValueError(f"non-finite value {value}"))
        values[index] = value
    return values


def assemble(centers: NodeSet, samples: NodeSet, kernel: RbfKernel, epsilon: float,
             f: Callable, T_or_area: float, normalized: bool = True) -> LsSystem:
    """
    Build the row-scaled LS-RBF system.

    Args:
        centers: N centers
        samples: M sample points
        kernel: Radial profile
        epsilon: Shape parameter
        f: Function sampled at the sample points
        T_or_area: T in 1D, bounding-box area in 2D
        normalized: Use the eps^(d/2) normalized translates

    Returns:
        LsSystem with A = sqrt(T/M) K and b = sqrt(T/M) f(x)
    """
    if centers.count == 0 or samples.count == 0:
        raise InvalidArgumentError("Centers and samples must be non-empty")
    if centers.dim != samples.dim:
        raise InvalidArgumentError(
            f"Centers are {centers.dim}D but samples are {samples.dim}D"
        )
    if not T_or_area > 0:
        raise InvalidArgumentError(f"T_or_area must be positive, got {T_or_area}")

    dim = centers.dim
    kernel = RbfKernel.from_name(kernel)
    row_scale = math.sqrt(T_or_area / samples.count)
    basis = kernel_matrix(kernel, epsilon, centers.points, samples.points, dim, normalized)
    values = sample_function(f, samples)

    meta = SystemMeta(kernel, float(epsilon), centers, samples, dim, normalized, float(T_or_area))
    logger.debug(
        f"Assembled {samples.count}x{centers.count} system "
        f"(kernel={kernel.value}, eps={epsilon:.6g}, row_scale={row_scale:.6g})"
    )
    return LsSystem(_frozen(row_scale * basis), _frozen(row_scale * values), row_scale, meta)


# ============================================================================
# SOLVE
# ============================================================================

def _zero_solution(system: LsSystem, sigma1: float, threshold: float,
                   singular_values: Optional[np.ndarray]) -> LsSolution:
    message = (
        f"All singular values fall below the threshold {threshold:.3e}; "
        f"returning the zero solution"
    )
    logger.warning(message)
    n = system.matrix.shape[1]
    return LsSolution(
        coefficients=_frozen(np.zeros(n)),
        coeff_norm=0.0,
        residual_norm=float(np.linalg.norm(system.rhs)),
        effective_rank=0,
        sigma1=sigma1,
        threshold=threshold,
        singular_values=singular_values,
        warnings=(message,),
    )


def _cutoff(reference: float, config: SolverConfig) -> float:
    if config.threshold_mode is ThresholdMode.RELATIVE:
        return config.tau * reference
    return config.tau


def _solve_svd(A: np.ndarray, b: np.ndarray, config: SolverConfig, system: LsSystem) -> LsSolution:
    U, s, Vt = linalg.svd(A, full_matrices=False)
    sigma1 = float(s[0]) if s.size else 0.0
    threshold = _cutoff(sigma1, config)
    keep = s > threshold
    rank = int(np.count_nonzero(keep))
    frozen_s = _frozen(s)
    if rank == 0:
        return _zero_solution(system, sigma1, threshold, frozen_s)

    projected = U[:, :rank].T @ b
    coefficients = Vt[:rank].T @ (projected / s[:rank])
    residual = A @ coefficients - b
    return LsSolution(
        coefficients=_frozen(coefficients),
        coeff_norm=float(np.linalg.norm(coefficients)),
        residual_norm=float(np.linalg.norm(residual)),
        effective_rank=rank,
        sigma1=sigma1,
        threshold=threshold,
        singular_values=frozen_s,
    )


def _solve_qr(A: np.ndarray, b: np.ndarray, config: SolverConfig, system: LsSystem) -> LsSolution:
    Q, R, perm = linalg.qr(A, mode='economic', pivoting=True)
    sigma1 = float(linalg.svdvals(A)[0]) if A.size else 0.0
    diagonal = np.abs(np.diag(R))
    reference = float(diagonal[0]) if diagonal.size else 0.0
    threshold = _cutoff(reference, config)
    below = np.flatnonzero(diagonal <= threshold)
    rank = int(below[0]) if below.size else int(diagonal.size)
    if rank == 0:
        return _zero_solution(system, sigma1, threshold, None)

    z = linalg.solve_triangular(R[:rank, :rank], Q[:, :rank].T @ b)
    coefficients = np.zeros(A.shape[1])
    coefficients[perm[:rank]] = z
    residual = A @ coefficients - b
    return LsSolution(
        coefficients=_frozen(coefficients),
        coeff_norm=float(np.linalg.norm(coefficients)),
        residual_norm=float(np.linalg.norm(residual)),
        effective_rank=rank,
        sigma1=sigma1,
        threshold=threshold,
    )


def solve(system: LsSystem, config: Optional[SolverConfig] = None) -> LsSolution:
    """
    Regularized least-squares solve.

    TSVD keeps sigma_i > tau * sigma_1 (relative) or sigma_i > tau
    (absolute). Pivoted QR truncates at the first |R_ii| below the
    analogous threshold and returns the basic solution.
    A zero effective rank yields the zero vector with a warning.
    """
    config = config or SolverConfig()
    A = np.asarray(system.matrix, dtype=float)
    b = np.asarray(system.rhs, dtype=float)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise InvalidArgumentError(f"Ill-formed system: matrix {A.shape}, rhs {b.shape}")

    if config.factorization is Factorization.PIVOTED_QR:
        solution = _solve_qr(A, b, config, system)
    else:
        solution = _solve_svd(A, b, config, system)

    logger.debug(
        f"Solved {A.shape[0]}x{A.shape[1]} ({config.factorization.value}): "
        f"rank={solution.effective_rank}, |lambda|={solution.coeff_norm:.3e}, "
        f"residual={solution.residual_norm:.3e}"
    )
    return solution


def residual_vector(system: LsSystem, solution: LsSolution) -> np.ndarray:
    """A lambda - b"""
    return system.matrix @ solution.coefficients - system.rhs


# ============================================================================
# EVALUATION AND DIAGNOSTICS
# ============================================================================

def evaluate_approximant(solution: LsSolution, meta: SystemMeta, points) -> np.ndarray:
    """sum_n lambda_n eps^(d/2) phi(eps |x - xi_n|) at each point"""
    pts = as_points(points, meta.dim)
    basis = kernel_matrix(meta.kernel, meta.epsilon, meta.centers.points, pts,
                          meta.dim, meta.normalized)
    return basis @ np.asarray(solution.coefficients)


def rule_of_thumb_ratio(error: float, solution: LsSolution) -> float:
    """
    Approximation error over coefficient norm; close to tau when the
    regularized problem is solved with enough oversampling.

    Raises:
        UndefinedRatioError: If the coefficient norm is zero
    """
    if solution.coeff_norm == 0:
        raise UndefinedRatioError("Coefficient norm is zero; the ratio is undefined")
    return float(error) / solution.coeff_norm
