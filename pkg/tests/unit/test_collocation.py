"""
Unit Tests for the Collocation Engine
Stacked Poisson systems, solves on zero and Runge data, engine node layout
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from core.exceptions import InvalidArgumentError, UnsupportedOperationError
from core.function_registry import ProblemRegistry
from core.geometry import (
    DiskDomain, Interval, NodeRole, boundary_points, boundary_points_1d, centers_1d,
    interior_samples_1d, oversample_count,
)
from core.kernels import RbfKernel, ShapedRbf, neg_laplacian_gaussian
from core.scaling import optimal_c, optimal_c_2d
from engines.collocation_engine import (
    CollocationEngine, PoissonConfig, PoissonProblem, assemble_collocation, solve_poisson,
)
from engines.ls_solver import SolverConfig, assemble, solve
from tests.helpers import make_nodes, second_difference


def disk_interior(rng, count, radius=0.95):
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    theta = rng.uniform(0.0, 2.0 * math.pi, count)
    return make_nodes(np.column_stack([r * np.cos(theta), r * np.sin(theta)]), NodeRole.INTERIOR_SAMPLE)


@pytest.fixture
def rng():
    return np.random.default_rng(17)


@pytest.fixture
def runge1d():
    return ProblemRegistry.create("runge1d")


@pytest.fixture
def runge_disk():
    return ProblemRegistry.create("runge_disk")


def nodes_1d(N, gamma=2.0, T=1.5):
    interval = Interval(-1.0, 1.0, T)
    return (centers_1d(N, T), interior_samples_1d(oversample_count(N, gamma), interval),
            boundary_points_1d(interval))


# ============================================================================
# PROBLEM DATA
# ============================================================================

def test_runge1d_rhs_matches_second_derivative(runge1d):
    for x in np.linspace(-0.95, 0.95, 23):
        expected = second_difference(lambda t: float(runge1d.exact_solution(t)), x, h=1e-4)
        assert float(runge1d.rhs(x)) == pytest.approx(expected, rel=1e-5, abs=1e-5)


def test_runge_disk_rhs_matches_five_point_laplacian(runge_disk, rng):
    h = 1e-4
    u = runge_disk.exact_solution
    for point in disk_interior(rng, 20, radius=0.9).points:
        x, y = point
        stencil = np.array([[x + h, y], [x - h, y], [x, y + h], [x, y - h]])
        laplacian = (np.sum(u(stencil)) - 4.0 * u(point)[0]) / (h * h)
        assert runge_disk.rhs(point)[0] == pytest.approx(-laplacian, rel=1e-5, abs=1e-5)


def test_problem_measures(runge1d, runge_disk):
    assert runge1d.measure_proxy == 1.5
    assert runge1d.domain_measure == 2.0
    assert runge_disk.measure_proxy == pytest.approx(9.0)
    assert runge_disk.domain_measure == pytest.approx(math.pi)


def test_problem_domain_must_match_dimension():
    with pytest.raises(InvalidArgumentError):
        PoissonProblem("bad", 1, DiskDomain(), np.sin, np.sin)
    with pytest.raises(InvalidArgumentError):
        PoissonProblem("bad", 2, Interval(), np.sin, np.sin)


# ============================================================================
# ASSEMBLY
# ============================================================================

def test_single_center_closed_forms(runge1d):
    epsilon = 2.0
    system = assemble_collocation(runge1d, make_nodes([0.0]),
                                  make_nodes([0.0], NodeRole.INTERIOR_SAMPLE),
                                  make_nodes([1.0], NodeRole.BOUNDARY_SAMPLE), epsilon)
    scale = math.sqrt(1.5 / 2.0)
    assert system.row_scale == pytest.approx(scale, rel=1e-15)
    assert system.matrix[0, 0] == pytest.approx(scale * 2.0 * epsilon ** 2 * math.sqrt(epsilon), rel=1e-15)
    assert system.matrix[1, 0] == pytest.approx(scale * math.sqrt(epsilon) * math.exp(-epsilon ** 2), rel=1e-15)
    np.testing.assert_allclose(system.rhs, [scale * 20.0, scale / 11.0], rtol=1e-15)


def test_block_shapes(runge_disk, rng):
    centers = make_nodes(rng.uniform(-1.5, 1.5, (100, 2)))
    system = assemble_collocation(runge_disk, centers, disk_interior(rng, 200),
                                  boundary_points(runge_disk.domain, 40), 1.5)
    assert system.matrix.shape == (240, 100)
    assert system.block_sizes == (200, 40)
    assert system.interior_block.shape == (200, 100)
    assert system.boundary_block.shape == (40, 100)
    assert system.as_ls_system().shape == (240, 100)


def test_entries_match_kernel_operations(runge_disk, rng):
    epsilon = 1.3
    centers = make_nodes(rng.uniform(-1.5, 1.5, (5, 2)))
    interior = disk_interior(rng, 7)
    boundary = boundary_points(runge_disk.domain, 4)
    system = assemble_collocation(runge_disk, centers, interior, boundary, epsilon)
    scale = math.sqrt(9.0 / 11.0)
    for n, center in enumerate(centers.points):
        rbf = ShapedRbf(RbfKernel.GA, epsilon, tuple(center), dim=2)
        for m, x in enumerate(interior.points):
            expected = scale * neg_laplacian_gaussian(epsilon, center, x, 2, normalized=True)
            assert system.matrix[m, n] == pytest.approx(expected, rel=1e-14, abs=1e-14)
        for m, y in enumerate(boundary.points):
            assert system.matrix[7 + m, n] == pytest.approx(scale * rbf.eval(y), rel=1e-14, abs=1e-14)


def test_boundary_block_matches_plain_assembly(runge1d):
    centers, interior, boundary = nodes_1d(8)
    system = assemble_collocation(runge1d, centers, interior, boundary, 2.5)
    plain = assemble(centers, boundary, RbfKernel.GA, 2.5, runge1d.boundary_data, runge1d.measure_proxy)
    np.testing.assert_allclose(system.boundary_block / system.row_scale,
                               plain.matrix / plain.row_scale, rtol=1e-14, atol=1e-15)


def test_undersampled_system_rejected(runge1d):
    with pytest.raises(InvalidArgumentError):
        assemble_collocation(runge1d, centers_1d(1, 1.5), make_nodes([0.0], NodeRole.INTERIOR_SAMPLE),
                             make_nodes([1.0], NodeRole.BOUNDARY_SAMPLE), 1.0)


@pytest.mark.parametrize("kernel", [RbfKernel.MQ, RbfKernel.IQ, RbfKernel.IMQ])
def test_only_gaussian_supported(runge1d, kernel):
    centers, interior, boundary = nodes_1d(4)
    with pytest.raises(UnsupportedOperationError):
        assemble_collocation(runge1d, centers, interior, boundary, 1.0, kernel=kernel)


def test_misplaced_nodes_rejected(runge1d):
    centers = centers_1d(2, 1.5)
    with pytest.raises(InvalidArgumentError):
        assemble_collocation(runge1d, centers, make_nodes(np.linspace(-1.2, 0.8, 10), NodeRole.INTERIOR_SAMPLE),
                             boundary_points_1d(runge1d.domain), 1.0)
    with pytest.raises(InvalidArgumentError):
        assemble_collocation(runge1d, centers, make_nodes(np.linspace(-0.9, 0.9, 10), NodeRole.INTERIOR_SAMPLE),
                             make_nodes([-1.0, 0.5], NodeRole.BOUNDARY_SAMPLE), 1.0)


def test_misplaced_disk_boundary_rejected(runge_disk, rng):
    centers = make_nodes(rng.uniform(-1.5, 1.5, (10, 2)))
    with pytest.raises(InvalidArgumentError):
        assemble_collocation(runge_disk, centers, disk_interior(rng, 30),
                             make_nodes([[0.5, 0.0], [1.0, 0.0]], NodeRole.BOUNDARY_SAMPLE), 1.0)


def test_system_is_read_only(runge1d):
    system = assemble_collocation(runge1d, *nodes_1d(4), 1.0)
    with pytest.raises(ValueError):
        system.matrix[0, 0] = 0.0


# ============================================================================
# SOLVE
# ============================================================================

@pytest.mark.parametrize("name", ["zero1d", "zero_disk"])
def test_zero_data_gives_zero_solution(name):
    engine = CollocationEngine(PoissonConfig(problem=name, validation_points=500))
    centers, interior, boundary = engine.build_nodes(30 if name == "zero_disk" else 10)
    solution, report = solve_poisson(engine.problem, centers, interior, boundary,
                                     engine.epsilon_for(10, centers.count), validation_points=500)
    assert solution.coeff_norm <= 1e-12
    assert report.err_max == 0.0
    assert report.err_l2 == 0.0


def test_report_without_exact_solution_keeps_nan(runge1d):
    problem = PoissonProblem("noexact", 1, runge1d.domain, runge1d.rhs, runge1d.boundary_data)
    _, report = solve_poisson(problem, *nodes_1d(6), 1.3)
    assert math.isnan(report.err_max) and math.isnan(report.err_l2)
    assert report.N == report.center_count == 13
    assert report.rank > 0


def test_collocation_residual_beats_plain_fit(runge1d):
    N = 15
    epsilon = optimal_c(1.5, 1e-12) * N
    centers, interior, boundary = nodes_1d(N)
    config = SolverConfig(tau=1e-12)
    system = assemble_collocation(runge1d, centers, interior, boundary, epsilon).as_ls_system()
    collocated = solve(system, config)

    fit_nodes = make_nodes(np.concatenate([interior.flat(), boundary.flat()]), NodeRole.INTERIOR_SAMPLE)
    fitted = solve(assemble(centers, fit_nodes, RbfKernel.GA, epsilon, runge1d.exact_solution, 1.5), config)
    fit_residual = np.linalg.norm(system.matrix @ fitted.coefficients - system.rhs)
    assert collocated.residual_norm <= fit_residual * (1.0 + 1e-6)


def test_error_invariant_under_interior_permutation(runge1d, rng):
    N = 20
    centers, interior, boundary = nodes_1d(N)
    epsilon = optimal_c(1.5, 1e-10) * N
    config = SolverConfig(tau=1e-10)
    _, base = solve_poisson(runge1d, centers, interior, boundary, epsilon, config, 2000)
    shuffled = interior.permuted(rng.permutation(interior.count))
    _, permuted = solve_poisson(runge1d, centers, shuffled, boundary, epsilon, config, 2000)
    assert abs(permuted.err_max - base.err_max) <= 1e-10
    assert abs(permuted.err_l2 - base.err_l2) <= 1e-10


# ============================================================================
# ENGINE
# ============================================================================

class TestPoissonConfig:
    """Collocation settings"""

    def test_defaults_are_valid(self):
        config = PoissonConfig()
        assert config.validate() == []
        assert config.solver_config().tau == 1e-12

    def test_validation_messages(self):
        errors = PoissonConfig(tau=0.0, gamma=0.5, boundary_factor=0.0, c=-1.0,
                               validation_points=3).validate()
        assert len(errors) == 5

    def test_two_dimensional_layout_validation(self):
        errors = PoissonConfig(bounding=(1.5, 0.0), center_region="ring").validate()
        assert len(errors) == 2

    def test_bounding_round_trip(self):
        config = PoissonConfig.from_dict({'problem': 'runge_disk', 'bounding': [1.4, 1.4]})
        assert config.bounding == (1.4, 1.4)
        assert config.to_dict()['bounding'] == [1.4, 1.4]

    def test_from_dict_ignores_unknown_keys(self):
        config = PoissonConfig.from_dict({'problem': 'runge_disk', 'c': 0.2, 'colour': 'red'})
        assert (config.problem, config.c) == ('runge_disk', 0.2)
        assert config.to_dict()['gamma'] == 2.0

    def test_engine_rejects_invalid_config(self):
        with pytest.raises(InvalidArgumentError):
            CollocationEngine(PoissonConfig(gamma=0.5))

    def test_engine_rejects_unknown_problem(self):
        with pytest.raises(InvalidArgumentError):
            CollocationEngine(PoissonConfig(problem="wave"))

    def test_engine_rejects_bounding_for_1d_problem(self):
        with pytest.raises(InvalidArgumentError):
            CollocationEngine(PoissonConfig(problem="runge1d", bounding=(1.5, 1.5)))


def test_engine_1d_nodes_and_epsilon():
    engine = CollocationEngine(PoissonConfig(tau=1e-10))
    centers, interior, boundary = engine.build_nodes(20)
    assert (centers.count, interior.count, boundary.count) == (41, 82, 2)
    assert engine.epsilon_for(20, centers.count) == pytest.approx(20 * optimal_c(1.5, 1e-10), rel=1e-15)


def test_engine_2d_nodes_and_epsilon():
    engine = CollocationEngine(PoissonConfig(problem="runge_disk", c=0.15))
    centers, interior, boundary = engine.build_nodes(100)
    assert abs(centers.count - 100) <= 20
    assert interior.count >= centers.count
    assert boundary.count == math.ceil(4.0 * math.sqrt(interior.count))
    assert engine.epsilon_for(100, centers.count) == pytest.approx(0.15 * math.sqrt(centers.count))


def test_engine_2d_inscribed_centers_and_default_constant():
    engine = CollocationEngine(PoissonConfig(problem="runge_disk", bounding=(1.4, 1.4),
                                             center_region="inscribed"))
    assert engine.problem.domain.bounding == (1.4, 1.4)
    assert engine.center_area() == pytest.approx(math.pi * 1.96, rel=1e-14)
    assert engine.scaling_constant() == optimal_c_2d(math.pi * 1.4 ** 2, 1e-12)
    centers, interior, boundary = engine.build_nodes(200)
    assert abs(centers.count - 200) <= 30
    assert np.max(np.hypot(centers.points[:, 0], centers.points[:, 1])) <= 1.4 + 1e-10
    assert engine.epsilon_for(200, centers.count) == pytest.approx(
        engine.scaling_constant() * math.sqrt(centers.count), rel=1e-15)


def test_engine_2d_box_constant_uses_box_area():
    engine = CollocationEngine(PoissonConfig(problem="runge_disk"))
    assert engine.center_area() == pytest.approx(9.0)
    assert engine.scaling_constant() == pytest.approx(optimal_c_2d(9.0, 1e-12), rel=1e-15)


def test_engine_1d_run_is_accurate():
    engine = CollocationEngine(PoissonConfig(validation_points=2000))
    reports = engine.run_sweep([10, 20])
    assert [r.N for r in reports] == [10, 20]
    assert [r.center_count for r in reports] == [21, 41]
    assert reports[1].err_max < reports[0].err_max
    assert reports[1].err_max < 1e-2
    assert reports[1].to_dict()['boundary_count'] == 2
