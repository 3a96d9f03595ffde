"""
Sweep Engine - convergence studies for LS-RBF approximation

For each N in the configured range the engine builds centers and samples,
picks eps from the scaling policy, assembles and solves the regularized
system, evaluates on a dense validation grid and fills an
ApproximationReport. Sweep points are independent; they may run in
parallel (joblib) and are always returned ordered by N.

Study variants built on the same pipeline:
- oversampling_study: fixed N, varying gamma
- kernel_comparison: same sweep for several radial profiles
- exterior_centers_ablation: centers on [-T, T] against centers confined to the domain
"""

import logging
import math
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from core.exceptions import InvalidArgumentError, UndefinedRatioError
from core.function_registry import FunctionRegistry, TestFunction
from core.geometry import (
    BoxDomain, CenterRegion, DiskDomain, Domain2D, Interval, NodeRole, NodeSet, ParametricDomain,
    centers_1d, confined_centers_1d, domain_boundary_points, ellipse_domain, hex_centers, hex_fill,
    oversample_count, samples_1d, star_domain,
)
from core.kernels import RbfKernel
from core.scaling import ScalingPolicy, limiting_accuracy
from engines.ls_solver import (
    SolverConfig, assemble, evaluate_approximant, rule_of_thumb_ratio, sample_function, solve,
)
from engines.report_analyzer import ApproximationReport, discrete_l2_error, max_error


VALIDATION_FACTOR = 10      # validation grid >= 10x the densest sample set


@dataclass
class SweepConfig:
    """Everything that defines a convergence sweep"""

    # === TARGET ===
    function: str = "runge"
    kernel: str = "GA"
    dim: int = 1

    # === GEOMETRY ===
    a: float = -1.0
    b: float = 1.0
    T: float = 1.5
    domain: str = "disk"                            # 2D: disk | box | star | ellipse | parametric
    bounding: Tuple[float, float] = (1.5, 1.5)      # 2D: bounding box half-widths
    center_region: str = "box"                      # 2D: box | inscribed (disk or ellipse in the box)
    radius: float = 1.0                             # disk radius, star mean radius
    x_cos: Optional[List[float]] = None             # parametric: x(theta) cosine coefficients
    x_sin: Optional[List[float]] = None
    y_cos: Optional[List[float]] = None
    y_sin: Optional[List[float]] = None
    exterior_centers: bool = True                   # False: 1D centers confined to [a, b]

    # === SOLVER ===
    tau: float = 1e-10
    threshold_mode: str = "relative"
    factorization: str = "svd"
    normalized: bool = True

    # === SCALING ===
    scaling: str = "linear-optimal"
    c: Optional[float] = None
    alpha: Optional[float] = None
    epsilon0: Optional[float] = None

    # === SAMPLING ===
    gamma: float = 2.0
    boundary_factor: float = 4.0                    # 2D ring of ceil(bf sqrt(M_interior)) samples, 0: none
    n_min: int = 10
    n_max: int = 300
    n_step: int = 10
    validation_points: Optional[int] = None        # None: VALIDATION_FACTOR x max M

    # === EXECUTION ===
    n_jobs: int = 1
    output: Optional[str] = None

    def to_dict(self) -> Dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data['bounding'] = list(self.bounding)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "SweepConfig":
        valid_keys = {k: v for k, v in data.items() if k in cls.__annotations__}
        if 'bounding' in valid_keys and valid_keys['bounding'] is not None:
            valid_keys['bounding'] = tuple(float(v) for v in valid_keys['bounding'])
        return cls(**valid_keys)

    @property
    def n_values(self) -> List[int]:
        if self.n_step < 1 or self.n_min > self.n_max:
            return []
        return list(range(self.n_min, self.n_max + 1, self.n_step))

    @property
    def max_samples(self) -> int:
        if not self.n_values or self.gamma < 1:
            return 0
        return oversample_count(max(self.n_values), self.gamma, self.dim)

    @property
    def validation_count(self) -> int:
        if self.validation_points is not None:
            return int(self.validation_points)
        return VALIDATION_FACTOR * self.max_samples + 1

    def policy(self) -> ScalingPolicy:
        return ScalingPolicy.from_settings(self.scaling, c=self.c, alpha=self.alpha,
                                           T=self.T, tau=self.tau, epsilon0=self.epsilon0)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tau=self.tau, threshold_mode=self.threshold_mode,
                            factorization=self.factorization)

    def build_domain(self) -> Domain2D:
        coefficients = {'x_cos': self.x_cos, 'x_sin': self.x_sin, 'y_cos': self.y_cos, 'y_sin': self.y_sin}
        return build_domain(self.domain, self.bounding, self.radius, coefficients)

    def validate(self) -> List[str]:
        """Validation messages; empty when the config is usable"""
        errors = []
        if self.dim not in (1, 2):
            errors.append(f"dim must be 1 or 2, got {self.dim}")
        if not self.n_values:
            errors.append(f"Empty N range: {self.n_min}..{self.n_max} step {self.n_step}")
        elif self.n_min < 1:
            errors.append(f"n_min must be at least 1, got {self.n_min}")
        if self.gamma < 1:
            errors.append(f"gamma must be >= 1, got {self.gamma}")
        if not self.boundary_factor >= 0:
            errors.append(f"boundary_factor must be >= 0, got {self.boundary_factor}")
        if not self.tau > 0:
            errors.append(f"tau must be positive, got {self.tau}")
        if self.validation_points is not None and self.max_samples and \
                self.validation_points < VALIDATION_FACTOR * self.max_samples:
            errors.append(
                f"validation_points={self.validation_points} is below "
                f"{VALIDATION_FACTOR} x max M = {VALIDATION_FACTOR * self.max_samples}"
            )
        if self.n_jobs == 0:
            errors.append("n_jobs must be non-zero")
        for name, check in (('function', lambda: FunctionRegistry.get(self.function)),
                            ('kernel', lambda: RbfKernel.from_name(self.kernel)),
                            ('scaling', self.policy),
                            ('solver', self.solver_config),
                            ('center_region', lambda: CenterRegion.from_name(self.center_region))):
            try:
                check()
            except InvalidArgumentError as error:
                errors.append(f"{name}: {error}")
        if not errors:
            if self.dim == 1:
                try:
                    Interval(self.a, self.b, self.T, allow_touching=not self.exterior_centers)
                except InvalidArgumentError as error:
                    errors.append(f"interval: {error}")
                if FunctionRegistry.get(self.function).dim != 1:
                    errors.append(f"Function '{self.function}' is not 1D")
            else:
                try:
                    self.build_domain()
                except InvalidArgumentError as error:
                    errors.append(f"domain: {error}")
                if FunctionRegistry.get(self.function).dim != 2:
                    errors.append(f"Function '{self.function}' is not 2D")
        return errors


DOMAINS = ("disk", "box", "star", "ellipse", "parametric")


def build_domain(name: str, bounding: Tuple[float, float], radius: float = 1.0,
                 coefficients: Optional[Dict[str, Sequence[float]]] = None) -> Domain2D:
    """
    2D domain from its config tag.

    disk, box, star and ellipse are scaled by `radius`; parametric takes the
    Fourier coefficient lists x_cos, x_sin, y_cos, y_sin.
    """
    key = str(name).strip().lower()
    if key == "disk":
        return DiskDomain(radius=radius, bounding=bounding)
    if key == "box":
        return BoxDomain((radius, radius), bounding=bounding)
    if key == "star":
        return star_domain(radius=0.9 * radius, amplitude=0.25, bounding=bounding)
    if key == "ellipse":
        return ellipse_domain(radius, 0.6 * radius, bounding=bounding)
    if key == "parametric":
        coefficients = {k: v for k, v in (coefficients or {}).items() if v is not None}
        if not coefficients:
            raise InvalidArgumentError("Parametric domain needs x_cos/x_sin/y_cos/y_sin coefficients")
        return ParametricDomain(coefficients.get('x_cos', [0.0]), coefficients.get('x_sin', [0.0]),
                                coefficients.get('y_cos', [0.0]), coefficients.get('y_sin', [0.0]),
                                bounding=bounding)
    raise InvalidArgumentError(f"Unknown domain '{name}' ({' | '.join(DOMAINS)})")


@dataclass
class _Geometry:
    """Resolved geometry of a sweep"""
    dim: int
    interval: Optional[Interval] = None
    domain: Optional[Domain2D] = None
    measure_proxy: float = 1.0          # T or bounding-box area
    domain_measure: float = 2.0         # |domain|
    validation: Optional[NodeSet] = None
    exact: np.ndarray = field(default_factory=lambda: np.zeros(0))


class SweepEngine:
    """
    Runs LS-RBF convergence sweeps for one SweepConfig.

    Usage:
        engine = SweepEngine(SweepConfig(function="runge", n_max=200))
        reports = engine.run_sweep()
    """

    def __init__(self, config: SweepConfig, show_progress: bool = False):
        errors = config.validate()
        if errors:
            raise InvalidArgumentError("Invalid sweep config: " + "; ".join(errors))
        self.config = config
        self.show_progress = show_progress
        self.function: TestFunction = FunctionRegistry.get(config.function)
        self.kernel = RbfKernel.from_name(config.kernel)
        self.policy = config.policy()
        self.solver_config = config.solver_config()
        self.logger = logging.getLogger('SweepEngine')
        self.geometry = self._resolve_geometry()

    def _resolve_geometry(self) -> _Geometry:
        cfg = self.config
        if cfg.dim == 1:
            touching = not cfg.exterior_centers
            interval = Interval(cfg.a, cfg.b, cfg.T, allow_touching=touching)
            validation = samples_1d(cfg.validation_count, interval)
            return _Geometry(1, interval=interval, measure_proxy=cfg.T,
                             domain_measure=interval.length, validation=validation,
                             exact=sample_function(self.function, validation))
        domain = cfg.build_domain()
        validation = hex_fill(domain, cfg.validation_count)
        return _Geometry(2, domain=domain, measure_proxy=domain.bounding_area(),
                         domain_measure=domain.area(), validation=validation,
                         exact=sample_function(self.function, validation))

    # ------------------------------------------------------------------------
    # Nodes
    # ------------------------------------------------------------------------

    def build_nodes(self, N: int, gamma: Optional[float] = None) -> Tuple[NodeSet, NodeSet]:
        """
        Centers and samples for basis size N.

        2D: about N hexagonal centers in the bounding box (or its inscribed
        region), ceil(gamma N) hexagonal samples in the domain followed by
        ceil(boundary_factor sqrt(M_interior)) samples on its boundary.
        """
        gamma = self.config.gamma if gamma is None else gamma
        geo = self.geometry
        if geo.dim == 1:
            if self.config.exterior_centers:
                centers = centers_1d(N, geo.interval.T)
            else:
                centers = confined_centers_1d(N, geo.interval)
            samples = samples_1d(oversample_count(N, gamma), geo.interval)
            return centers, samples
        cfg = self.config
        centers = hex_centers(geo.domain.bounding_region(), N, cfg.center_region)
        interior = hex_fill(geo.domain, oversample_count(centers.count, gamma, dim=2))
        if not cfg.boundary_factor > 0:
            return centers, interior
        boundary_count = int(math.ceil(cfg.boundary_factor * math.sqrt(interior.count)))
        boundary = domain_boundary_points(geo.domain, boundary_count)
        samples = NodeSet(np.vstack([interior.points, boundary.points]), NodeRole.INTERIOR_SAMPLE,
                          {'interior': interior.count, 'boundary': boundary.count})
        return centers, samples

    def predicted_limit(self) -> Optional[float]:
        if self.config.dim == 1 and self.policy.is_linear:
            return limiting_accuracy(self.policy.linear_constant, self.config.T, self.config.tau)
        return None

    # ------------------------------------------------------------------------
    # Runs
    # ------------------------------------------------------------------------

    def run_single(self, N: int, gamma: Optional[float] = None,
                   kernel: Optional[RbfKernel] = None) -> ApproximationReport:
        """One point of the sweep: build, assemble, solve, validate"""
        kernel = self.kernel if kernel is None else RbfKernel.from_name(kernel)
        centers, samples = self.build_nodes(N, gamma)
        # 2D: eps grows with the actual number of centers
        epsilon = self.policy.epsilon(N if self.config.dim == 1 else centers.count)

        system = assemble(centers, samples, kernel, epsilon, self.function,
                          self.geometry.measure_proxy, self.config.normalized)
        solution = solve(system, self.solver_config)

        approx = evaluate_approximant(solution, system.meta, self.geometry.validation.flat())
        err_l2 = discrete_l2_error(approx, self.geometry.exact, self.geometry.domain_measure)
        err_max = max_error(approx, self.geometry.exact)

        warnings = list(solution.warnings)
        try:
            ratio = rule_of_thumb_ratio(err_l2, solution)
        except UndefinedRatioError as error:
            ratio = float('nan')
            warnings.append(str(error))

        return ApproximationReport(
            N=N,
            M=samples.count,
            epsilon=epsilon,
            err_l2=err_l2,
            err_max=err_max,
            coeff_norm=solution.coeff_norm,
            ratio=ratio,
            effective_rank=solution.effective_rank,
            sigma1=solution.sigma1,
            predicted_limit=self.predicted_limit(),
            warnings=warnings,
        )

    def run_sweep(self, n_values: Optional[Sequence[int]] = None) -> List[ApproximationReport]:
        """All configured N values, ordered by N"""
        n_values = list(n_values) if n_values is not None else self.config.n_values
        self.logger.info(
            f"Sweep {self.function.name}: kernel={self.kernel.value}, "
            f"scaling={self.policy.kind.value}, N={n_values[0]}..{n_values[-1]} "
            f"({len(n_values)} points), n_jobs={self.config.n_jobs}"
        )
        iterator = tqdm(n_values, desc="N sweep", disable=not self.show_progress)
        if self.config.n_jobs == 1:
            reports = [self.run_single(N) for N in iterator]
        else:
            tasks = [delayed(self.run_single)(N) for N in iterator]
            reports = Parallel(n_jobs=self.config.n_jobs, prefer='threads')(tasks)

        reports = sorted(reports, key=lambda r: r.N)
        for report in reports:
            for message in report.warnings:
                self.logger.warning(f"N={report.N}: {message}")
        self.logger.info(f"Sweep finished: final err_l2={reports[-1].err_l2:.3e}")
        return reports

    def oversampling_study(self, N: int, gammas: Sequence[float]) -> List[ApproximationReport]:
        """Fixed N, varying oversampling ratio"""
        reports = []
        for gamma in gammas:
            if gamma < 1:
                raise InvalidArgumentError(f"gamma must be >= 1, got {gamma}")
            reports.append(self.run_single(N, gamma=gamma))
        return reports

    def kernel_comparison(self, kernels: Sequence = tuple(RbfKernel),
                          n_values: Optional[Sequence[int]] = None) -> Dict[RbfKernel, List[ApproximationReport]]:
        """Same sweep for each radial profile (predicted_limit stays the GA value)"""
        n_values = list(n_values) if n_values is not None else self.config.n_values
        results = {}
        for kernel in kernels:
            kernel = RbfKernel.from_name(kernel)
            results[kernel] = [self.run_single(N, kernel=kernel) for N in n_values]
            self.logger.info(f"{kernel.value}: final err_l2={results[kernel][-1].err_l2:.3e}")
        return results


# ============================================================================
# MODULE-LEVEL ENTRY POINTS
# ============================================================================

def run_sweep(config: SweepConfig, show_progress: bool = False) -> List[ApproximationReport]:
    return SweepEngine(config, show_progress=show_progress).run_sweep()


def oversampling_study(config: SweepConfig, N: int, gammas: Sequence[float]) -> List[ApproximationReport]:
    return SweepEngine(config).oversampling_study(N, gammas)


def kernel_comparison(config: SweepConfig, kernels: Sequence = tuple(RbfKernel)) -> Dict[RbfKernel, List[ApproximationReport]]:
    return SweepEngine(config).kernel_comparison(kernels)


def exterior_centers_ablation(config: SweepConfig, N: int) -> Tuple[ApproximationReport, ApproximationReport]:
    """
    (confined, exterior) reports at one N: the same function, samples and
    eps with centers on [a, b] versus centers on [-T, T].
    """
    if config.dim != 1:
        raise InvalidArgumentError("The exterior-centers ablation is one-dimensional")
    base = config.to_dict()
    confined = SweepEngine(SweepConfig.from_dict({**base, 'exterior_centers': False}))
    exterior = SweepEngine(SweepConfig.from_dict({**base, 'exterior_centers': True}))
    return confined.run_single(N), exterior.run_single(N)

