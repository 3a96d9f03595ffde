"""
Collocation Engine - least-squares Kansa collocation for -Laplace(u) = f

Solves the Dirichlet problem
    -Laplace(u) = f  in the domain,     u = g  on its boundary
with Gaussian translates centered on an extension region. The rectangular
system stacks two blocks:

    [ -Laplace(phi_n)(x_m) ]  lambda  ~  [ f(x_m) ]     interior nodes
    [        phi_n(y_m)    ]             [ g(y_m) ]     boundary nodes

Both blocks share one uniform row scale sqrt(measure / M_total), the same
convention as the plain least-squares assembly. The regularized solve is
delegated to engines.ls_solver.

1D runs use eps = c* N (LinearOptimal); 2D runs use eps = c sqrt(N_total),
with c from optimal_c_2d over the area holding the centers unless set.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from core.exceptions import InvalidArgumentError, UnsupportedOperationError
from core.function_registry import ProblemRegistry
from core.geometry import (
    CenterRegion, DiskDomain, Domain2D, Interval, NodeSet, boundary_points_1d, centers_1d,
    domain_boundary_points, hex_centers, hex_fill, inscribed_region, interior_samples_1d,
    oversample_count, samples_1d,
)
from core.kernels import RbfKernel, kernel_matrix, neg_laplacian_matrix
from core.scaling import ScalingPolicy, optimal_c_2d
from engines.ls_solver import (
    LsSolution, LsSystem, SolverConfig, SystemMeta, evaluate_approximant,
    sample_function, solve,
)
from engines.report_analyzer import discrete_l2_error, max_error


logger = logging.getLogger('CollocationEngine')


Region = Union[Interval, Domain2D]


@dataclass(frozen=True)
class PoissonProblem:
    """-Laplace(u) = rhs in the domain, u = boundary_data on its boundary"""
    name: str
    dim: int
    domain: Region
    rhs: Callable
    boundary_data: Callable
    exact_solution: Optional[Callable] = None
    description: str = ""

    def __post_init__(self):
        if self.dim == 1 and not isinstance(self.domain, Interval):
            raise InvalidArgumentError("1D problems need an Interval domain")
        if self.dim == 2 and not isinstance(self.domain, Domain2D):
            raise InvalidArgumentError("2D problems need a Domain2D domain")
        if self.dim not in (1, 2):
            raise InvalidArgumentError(f"dim must be 1 or 2, got {self.dim}")

    @property
    def measure_proxy(self) -> float:
        """T in 1D, bounding-box area in 2D"""
        if self.dim == 1:
            return self.domain.T
        return self.domain.bounding_area()

    @property
    def domain_measure(self) -> float:
        """|domain|: interval length or area"""
        if self.dim == 1:
            return self.domain.length
        return self.domain.area()


@dataclass(frozen=True)
class CollocationSystem:
    """Stacked interior/boundary system"""
    matrix: np.ndarray
    rhs: np.ndarray
    block_sizes: Tuple[int, int]
    row_scale: float
    meta: SystemMeta

    @property
    def interior_block(self) -> np.ndarray:
        return self.matrix[:self.block_sizes[0]]

    @property
    def boundary_block(self) -> np.ndarray:
        return self.matrix[self.block_sizes[0]:]

    def as_ls_system(self) -> LsSystem:
        return LsSystem(self.matrix, self.rhs, self.row_scale, self.meta)


@dataclass
class PoissonConfig:
    """Settings for a collocation run"""
    problem: str = "runge1d"
    tau: float = 1e-12
    threshold_mode: str = "relative"
    factorization: str = "svd"
    gamma: float = 2.0                  # interior oversampling M_interior / N
    boundary_factor: float = 4.0        # M_boundary = ceil(boundary_factor * sqrt(M_interior))
    c: Optional[float] = None           # 2D: eps = c sqrt(N_total); None: optimal_c_2d
    bounding: Optional[Tuple[float, float]] = None      # 2D: bounding box, None: problem default
    center_region: str = "box"          # 2D: box | inscribed
    validation_points: int = 4000

    def to_dict(self) -> Dict:
        data = dict(self.__dict__)
        if self.bounding is not None:
            data['bounding'] = list(self.bounding)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "PoissonConfig":
        valid_keys = {k: v for k, v in data.items() if k in cls.__annotations__}
        if valid_keys.get('bounding') is not None:
            valid_keys['bounding'] = tuple(float(v) for v in valid_keys['bounding'])
        return cls(**valid_keys)

    def validate(self) -> List[str]:
        errors = []
        if not self.tau > 0:
            errors.append(f"tau must be positive, got {self.tau}")
        if self.gamma < 1:
            errors.append(f"gamma must be >= 1, got {self.gamma}")
        if not self.boundary_factor > 0:
            errors.append(f"boundary_factor must be positive, got {self.boundary_factor}")
        if self.c is not None and not self.c > 0:
            errors.append(f"c must be positive, got {self.c}")
        if self.bounding is not None and (len(self.bounding) != 2 or min(self.bounding) <= 0):
            errors.append(f"bounding must hold two positive half-widths, got {self.bounding}")
        try:
            CenterRegion.from_name(self.center_region)
        except InvalidArgumentError as error:
            errors.append(str(error))
        if self.validation_points < 10:
            errors.append(f"validation_points must be at least 10, got {self.validation_points}")
        return errors

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tau=self.tau, threshold_mode=self.threshold_mode,
                            factorization=self.factorization)


@dataclass
class PoissonReport:
    """
    Accuracy of one collocation solve.

    N is the basis size requested from the engine (the center count for a
    direct solve_poisson call); center_count is the number of translates.
    """
    N: int
    interior_count: int
    boundary_count: int
    epsilon: float
    err_max: float = float('nan')
    err_l2: float = float('nan')
    coeff_norm: float = 0.0
    residual_norm: float = 0.0
    rank: int = 0
    sigma1: float = 0.0
    warnings: List[str] = field(default_factory=list)
    center_count: int = 0

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


# ============================================================================
# ASSEMBLY AND SOLVE
# ============================================================================

def _check_nodes(problem: PoissonProblem, interior: NodeSet, boundary: NodeSet):
    if interior.dim != problem.dim or boundary.dim != problem.dim:
        raise InvalidArgumentError(
            f"Node sets must be {problem.dim}D, got {interior.dim}D / {boundary.dim}D"
        )
    domain = problem.domain
    inside = domain.contains(interior.flat() if problem.dim == 1 else interior.points)
    if not np.all(inside):
        raise InvalidArgumentError(
            f"{int(np.count_nonzero(~inside))} interior node(s) lie outside the domain"
        )
    if problem.dim == 1:
        on_edge = np.isclose(boundary.flat(), domain.a) | np.isclose(boundary.flat(), domain.b)
    else:
        try:
            on_edge = domain.on_boundary(boundary.points)
        except UnsupportedOperationError:
            # curves traced numerically have no exact boundary test
            return
    if not np.all(on_edge):
        raise InvalidArgumentError("Boundary nodes must lie on the domain boundary")


def assemble_collocation(problem: PoissonProblem, centers: NodeSet, interior: NodeSet,
                         boundary: NodeSet, epsilon: float, normalized: bool = True,
                         kernel: RbfKernel = RbfKernel.GA) -> CollocationSystem:
    """
    Build the stacked collocation system.

    Raises:
        InvalidArgumentError: If M_interior + M_boundary <= N, or nodes are misplaced
        UnsupportedOperationError: For kernels other than GA
    """
    kernel = RbfKernel.from_name(kernel)
    if kernel is not RbfKernel.GA:
        raise UnsupportedOperationError(f"Collocation is only implemented for GA, not {kernel.value}")
    if centers.dim != problem.dim:
        raise InvalidArgumentError(f"Centers are {centers.dim}D, problem is {problem.dim}D")
    total_rows = interior.count + boundary.count
    if total_rows <= centers.count:
        raise InvalidArgumentError(
            f"Undersampled collocation: {interior.count} + {boundary.count} rows "
            f"for {centers.count} centers"
        )
    _check_nodes(problem, interior, boundary)

    dim = problem.dim
    row_scale = math.sqrt(problem.measure_proxy / total_rows)
    top = neg_laplacian_matrix(epsilon, centers.points, interior.points, dim, normalized)
    bottom = kernel_matrix(kernel, epsilon, centers.points, boundary.points, dim, normalized)
    rhs = np.concatenate([
        sample_function(problem.rhs, interior),
        sample_function(problem.boundary_data, boundary),
    ])

    matrix = row_scale * np.vstack([top, bottom])
    rhs = row_scale * rhs
    matrix.setflags(write=False)
    rhs.setflags(write=False)
    meta = SystemMeta(kernel, float(epsilon), centers, interior, dim, normalized,
                      float(problem.measure_proxy))
    logger.debug(
        f"Collocation system {matrix.shape[0]}x{matrix.shape[1]} "
        f"(interior={interior.count}, boundary={boundary.count}, eps={epsilon:.6g})"
    )
    return CollocationSystem(matrix, rhs, (interior.count, boundary.count), row_scale, meta)


def validation_nodes(problem: PoissonProblem, count: int) -> NodeSet:
    """Dense nodes in the domain used to measure errors"""
    if problem.dim == 1:
        return samples_1d(count, problem.domain)
    return hex_fill(problem.domain, count)


def solve_poisson(problem: PoissonProblem, centers: NodeSet, interior: NodeSet,
                  boundary: NodeSet, epsilon: float, config: Optional[SolverConfig] = None,
                  validation_points: int = 4000) -> Tuple[LsSolution, PoissonReport]:
    """
    Assemble, solve and measure errors against the exact solution when known.

    Returns:
        (solution, report); report errors stay NaN without an exact solution
    """
    system = assemble_collocation(problem, centers, interior, boundary, epsilon)
    solution = solve(system.as_ls_system(), config)

    report = PoissonReport(
        N=centers.count,
        center_count=centers.count,
        interior_count=interior.count,
        boundary_count=boundary.count,
        epsilon=float(epsilon),
        coeff_norm=solution.coeff_norm,
        residual_norm=solution.residual_norm,
        rank=solution.effective_rank,
        sigma1=solution.sigma1,
        warnings=list(solution.warnings),
    )

    if problem.exact_solution is not None:
        grid = validation_nodes(problem, validation_points)
        approx = evaluate_approximant(solution, system.meta, grid.flat())
        exact = sample_function(problem.exact_solution, grid)
        report.err_max = max_error(approx, exact)
        report.err_l2 = discrete_l2_error(approx, exact, problem.domain_measure)

    return solution, report


# ============================================================================
# ENGINE
# ============================================================================

class CollocationEngine:
    """
    Builds nodes and shape parameters for a registered problem and runs
    collocation solves over a range of basis sizes.
    """

    def __init__(self, config: Optional[PoissonConfig] = None,
                 problem: Optional[PoissonProblem] = None):
        self.config = config or PoissonConfig()
        errors = self.config.validate()
        if errors:
            raise InvalidArgumentError("; ".join(errors))
        self.problem = problem or self._create_problem()
        self.solver_config = self.config.solver_config()
        self.logger = logging.getLogger('CollocationEngine')

    def _create_problem(self) -> PoissonProblem:
        if self.config.bounding is None:
            return ProblemRegistry.create(self.config.problem)
        try:
            return ProblemRegistry.create(self.config.problem, bounding=tuple(self.config.bounding))
        except TypeError as error:
            raise InvalidArgumentError(
                f"Problem '{self.config.problem}' takes no bounding box"
            ) from error

    def center_area(self) -> float:
        """Area of the part of the bounding box holding the 2D centers"""
        box = self.problem.domain.bounding_region()
        if CenterRegion.from_name(self.config.center_region) is CenterRegion.INSCRIBED:
            return inscribed_region(box).area()
        return box.area()

    def scaling_constant(self) -> float:
        """2D c of eps = c sqrt(N_total)"""
        if self.config.c is not None:
            return self.config.c
        return optimal_c_2d(self.center_area(), self.config.tau)

    def epsilon_for(self, N: int, total_centers: int) -> float:
        if self.problem.dim == 1:
            policy = ScalingPolicy.linear_optimal(self.problem.domain.T, self.config.tau)
            return policy.epsilon(N)
        return self.scaling_constant() * math.sqrt(total_centers)

    def build_nodes(self, N: int) -> Tuple[NodeSet, NodeSet, NodeSet]:
        """
        Centers, interior and boundary nodes for basis size N.

        1D: 2N+1 centers on [-T, T], ceil(gamma (2N+1)) interior nodes, both endpoints.
        2D: about N hexagonal centers in the bounding box (or the region inscribed
            in it), ceil(gamma N) interior
            nodes, ceil(boundary_factor sqrt(M_interior)) boundary nodes.
        """
        domain = self.problem.domain
        if self.problem.dim == 1:
            centers = centers_1d(N, domain.T)
            interior = interior_samples_1d(oversample_count(N, self.config.gamma), domain)
            return centers, interior, boundary_points_1d(domain)

        centers = hex_centers(domain.bounding_region(), N, self.config.center_region)
        interior = hex_fill(domain, oversample_count(centers.count, self.config.gamma, dim=2))
        boundary_count = int(math.ceil(self.config.boundary_factor * math.sqrt(interior.count)))
        return centers, interior, domain_boundary_points(domain, boundary_count)

    def run(self, N: int) -> PoissonReport:
        centers, interior, boundary = self.build_nodes(N)
        epsilon = self.epsilon_for(N, centers.count)
        _, report = solve_poisson(self.problem, centers, interior, boundary, epsilon,
                                  self.solver_config, self.config.validation_points)
        report.N = N
        self.logger.info(
            f"{self.problem.name} N={N}: eps={epsilon:.4g}, err_max={report.err_max:.3e}, "
            f"rank={report.rank}"
        )
        return report

    def run_sweep(self, Ns) -> List[PoissonReport]:
        return [self.run(int(N)) for N in Ns]


# ============================================================================
# REGISTERED PROBLEMS
# ============================================================================

def _r2(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return pts[:, 0] ** 2 + pts[:, 1] ** 2


def _zeros(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    return np.zeros(arr.shape[0] if arr.ndim else 1)


@ProblemRegistry.register("runge1d")
def runge1d(T: float = 1.5) -> PoissonProblem:
    """-u'' = 20 (1 - 30 x^2) / (1 + 10 x^2)^3 on [-1, 1], u = 1 / (1 + 10 x^2)"""
    def exact(x):
        x = np.asarray(x, dtype=float)
        return 1.0 / (1.0 + 10.0 * x ** 2)

    def rhs(x):
        x = np.asarray(x, dtype=float)
        return 20.0 * (1.0 - 30.0 * x ** 2) / (1.0 + 10.0 * x ** 2) ** 3

    return PoissonProblem("runge1d", 1, Interval(-1.0, 1.0, T), rhs, exact, exact,
                          runge1d.__doc__)


@ProblemRegistry.register("runge_disk")
def runge_disk(bounding: Tuple[float, float] = (1.5, 1.5)) -> PoissonProblem:
    """-Laplace(u) = 40 (1 - 10 r^2) / (1 + 10 r^2)^3 on the unit disk, u = 1 / (1 + 10 r^2)"""
    def exact(points):
        return 1.0 / (1.0 + 10.0 * _r2(points))

    def rhs(points):
        r2 = _r2(points)
        return 40.0 * (1.0 - 10.0 * r2) / (1.0 + 10.0 * r2) ** 3

    return PoissonProblem("runge_disk", 2, DiskDomain(bounding=bounding), rhs, exact, exact,
                          runge_disk.__doc__)


@ProblemRegistry.register("zero1d")
def zero1d(T: float = 1.5) -> PoissonProblem:
    """Homogeneous problem on [-1, 1]: u = 0"""
    return PoissonProblem("zero1d", 1, Interval(-1.0, 1.0, T), _zeros, _zeros, _zeros,
                          zero1d.__doc__)


@ProblemRegistry.register("zero_disk")
def zero_disk(bounding: Tuple[float, float] = (1.5, 1.5)) -> PoissonProblem:
    """Homogeneous problem on the unit disk: u = 0"""
    return PoissonProblem("zero_disk", 2, DiskDomain(bounding=bounding), _zeros, _zeros, _zeros,
                          zero_disk.__doc__)
