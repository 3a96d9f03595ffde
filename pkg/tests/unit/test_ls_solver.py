"""
Unit Tests for the LS-RBF Solver
Assembly, truncated SVD / pivoted QR solves, evaluation and diagnostics
"""

import dataclasses
import logging
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent))

from core.exceptions import InvalidArgumentError, SampleEvaluationError, UndefinedRatioError
from core.geometry import NodeRole
from core.kernels import RbfKernel, ShapedRbf, kernel_matrix
from engines.ls_solver import (
    Factorization, LsSolution, SolverConfig, ThresholdMode, assemble, evaluate_approximant,
    residual_vector, rule_of_thumb_ratio, sample_function, solve,
)
from tests.helpers import (
    make_1d_system, make_nodes, random_well_conditioned, raw_system, system_with_spectrum,
)


SVD = SolverConfig(tau=1e-12)
QR = SolverConfig(tau=1e-12, factorization=Factorization.PIVOTED_QR)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


# ============================================================================
# CONFIG
# ============================================================================

class TestSolverConfig:
    """Regularization settings"""

    def test_defaults(self):
        config = SolverConfig()
        assert config.tau == 1e-10
        assert config.threshold_mode is ThresholdMode.RELATIVE
        assert config.factorization is Factorization.TSVD

    def test_string_values_are_coerced(self):
        config = SolverConfig(tau=1e-6, threshold_mode="Absolute", factorization="rrqr")
        assert config.threshold_mode is ThresholdMode.ABSOLUTE
        assert config.factorization is Factorization.PIVOTED_QR

    @pytest.mark.parametrize("tau", [0.0, -1e-10])
    def test_non_positive_tau_rejected(self, tau):
        with pytest.raises(InvalidArgumentError):
            SolverConfig(tau=tau)

    def test_unknown_names_rejected(self):
        with pytest.raises(InvalidArgumentError):
            SolverConfig(threshold_mode="median")
        with pytest.raises(InvalidArgumentError):
            SolverConfig(factorization="lu")

    def test_dict_round_trip_ignores_unknown_keys(self):
        config = SolverConfig.from_dict({'tau': 1e-8, 'factorization': 'qr', 'gamma': 2.0})
        assert config.to_dict() == {'tau': 1e-8, 'threshold_mode': 'relative', 'factorization': 'qr'}


# ============================================================================
# ASSEMBLY
# ============================================================================

def test_single_entry_system():
    system = assemble(make_nodes([0.0]), make_nodes([0.0], NodeRole.INTERIOR_SAMPLE),
                      RbfKernel.GA, 1.0, _one, 1.0)
    np.testing.assert_array_equal(system.matrix, [[1.0]])
    np.testing.assert_array_equal(system.rhs, [1.0])
    assert system.row_scale == 1.0


def test_shape_and_entry_bound():
    epsilon = 2.0
    centers = make_nodes([-1.0, 0.0, 1.0])
    samples = make_nodes(np.linspace(-0.9, 0.9, 6), NodeRole.INTERIOR_SAMPLE)
    system = assemble(centers, samples, RbfKernel.GA, epsilon, _one, 1.0)
    assert system.shape == (6, 3)
    assert np.all(system.matrix <= math.sqrt(epsilon) * math.sqrt(1.0 / 6.0) + 1e-15)
    assert system.row_scale == pytest.approx(math.sqrt(1.0 / 6.0), rel=1e-15)


@pytest.mark.parametrize("kernel", list(RbfKernel))
def test_entries_match_translates(rng, kernel):
    centers = rng.uniform(-1.5, 1.5, 4)
    samples = rng.uniform(-1.0, 1.0, 5)
    system = assemble(make_nodes(centers), make_nodes(samples, NodeRole.INTERIOR_SAMPLE),
                      kernel, 3.0, np.sin, 1.5)
    scale = math.sqrt(1.5 / 5)
    for n, center in enumerate(centers):
        rbf = ShapedRbf(kernel, 3.0, (center,))
        for m, x in enumerate(samples):
            assert system.matrix[m, n] == pytest.approx(scale * rbf.eval(x), rel=1e-14, abs=1e-300)
    np.testing.assert_allclose(system.rhs, scale * np.sin(samples), rtol=1e-15)


def test_two_dimensional_assembly(rng):
    centers = make_nodes(rng.uniform(-1.0, 1.0, (6, 2)))
    samples = make_nodes(rng.uniform(-1.0, 1.0, (15, 2)), NodeRole.INTERIOR_SAMPLE)
    system = assemble(centers, samples, RbfKernel.GA, 2.0, lambda p: p[:, 0] * p[:, 1], 9.0)
    assert system.shape == (15, 6)
    assert system.meta.dim == 2
    assert system.meta.measure == 9.0
    rbf = ShapedRbf(RbfKernel.GA, 2.0, tuple(centers.points[2]), dim=2)
    assert system.matrix[7, 2] == pytest.approx(math.sqrt(9.0 / 15) * rbf.eval(samples.points[7]), rel=1e-14)


def test_assembly_rejects_bad_inputs():
    centers = make_nodes([0.0, 1.0])
    with pytest.raises(InvalidArgumentError):
        assemble(centers, make_nodes([[0.0, 0.0]], NodeRole.INTERIOR_SAMPLE), RbfKernel.GA, 1.0, _one, 1.0)
    with pytest.raises(InvalidArgumentError):
        assemble(centers, make_nodes([0.5], NodeRole.INTERIOR_SAMPLE), RbfKernel.GA, 1.0, _one, 0.0)


def test_sample_failure_reports_index():
    def picky(x):
        if float(x) > 0.25:
            raise ValueError("outside support")
        return 1.0

    samples = make_nodes(np.linspace(-1.0, 1.0, 5), NodeRole.INTERIOR_SAMPLE)
    with pytest.raises(SampleEvaluationError) as exc_info:
        sample_function(picky, samples)
    assert exc_info.value.index == 3
    assert isinstance(exc_info.value.cause, ValueError)


def test_non_finite_sample_reports_index():
    samples = make_nodes(np.linspace(-1.0, 1.0, 5), NodeRole.INTERIOR_SAMPLE)
    with pytest.raises(SampleEvaluationError) as exc_info:
        sample_function(lambda x: np.where(np.asarray(x) > 0.25, np.nan, 1.0), samples)
    assert exc_info.value.index == 3


def test_pointwise_fallback_for_scalar_functions():
    samples = make_nodes([0.0, 0.5, 1.0], NodeRole.INTERIOR_SAMPLE)
    values = sample_function(lambda x: math.exp(float(x)), samples)
    np.testing.assert_allclose(values, np.exp([0.0, 0.5, 1.0]), rtol=1e-15)


def test_vectorized_errors_other_than_type_or_value_propagate():
    calls = []

    def broken(x):
        calls.append(x)
        raise KeyError("lookup table missing")

    samples = make_nodes([0.0, 0.5, 1.0], NodeRole.INTERIOR_SAMPLE)
    with pytest.raises(KeyError):
        sample_function(broken, samples)
    assert len(calls) == 1


def test_system_arrays_are_read_only():
    system = make_1d_system(N=4)
    with pytest.raises(ValueError):
        system.matrix[0, 0] = 1.0
    with pytest.raises(ValueError):
        system.rhs[0] = 1.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        system.row_scale = 2.0


# ============================================================================
# SOLVE
# ============================================================================

@pytest.mark.parametrize("config", [SVD, QR], ids=["svd", "qr"])
def test_identity_system(config):
    solution = solve(raw_system(np.eye(2), [1.0, 2.0]), SolverConfig(tau=0.5, factorization=config.factorization))
    np.testing.assert_allclose(solution.coefficients, [1.0, 2.0])
    assert solution.effective_rank == 2
    assert solution.residual_norm == pytest.approx(0.0, abs=1e-15)
    assert solution.sigma1 == pytest.approx(1.0)


@pytest.mark.parametrize("factorization", list(Factorization))
def test_small_direction_discarded(factorization):
    system = raw_system(np.diag([1.0, 1e-12]), [1.0, 1.0])
    solution = solve(system, SolverConfig(tau=1e-6, factorization=factorization))
    np.testing.assert_allclose(solution.coefficients, [1.0, 0.0], atol=1e-15)
    assert solution.effective_rank == 1
    assert solution.residual_norm == pytest.approx(1.0, rel=1e-12)


def test_absolute_and_relative_thresholds_differ():
    system = raw_system(np.diag([10.0, 0.05]), [1.0, 1.0])
    relative = solve(system, SolverConfig(tau=0.01))
    absolute = solve(system, SolverConfig(tau=0.01, threshold_mode=ThresholdMode.ABSOLUTE))
    assert relative.effective_rank == 1
    assert relative.threshold == pytest.approx(0.1)
    assert absolute.effective_rank == 2
    assert absolute.threshold == 0.01
    np.testing.assert_allclose(absolute.coefficients, [0.1, 20.0])


@pytest.mark.parametrize("factorization", list(Factorization))
def test_zero_matrix_gives_flagged_zero_solution(factorization, caplog):
    system = raw_system(np.zeros((3, 2)), [1.0, 1.0, 1.0])
    with caplog.at_level(logging.WARNING, logger='LsSolver'):
        solution = solve(system, SolverConfig(factorization=factorization))
    assert solution.is_zero_rank
    np.testing.assert_array_equal(solution.coefficients, [0.0, 0.0])
    assert solution.coeff_norm == 0.0
    assert solution.residual_norm == pytest.approx(math.sqrt(3.0))
    assert solution.warnings
    assert "zero solution" in caplog.text


def test_matches_normal_equations(rng):
    for _ in range(50):
        A, b = random_well_conditioned(rng)
        solution = solve(raw_system(A, b), SVD)
        expected = np.linalg.solve(A.T @ A, A.T @ b)
        np.testing.assert_allclose(solution.coefficients, expected, rtol=1e-9, atol=1e-12)
        assert solution.effective_rank == A.shape[1]
        assert solution.coeff_norm == np.linalg.norm(solution.coefficients)


def test_residual_orthogonal_to_range(rng):
    for _ in range(20):
        A, b = random_well_conditioned(rng)
        solution = solve(raw_system(A, b), SVD)
        r = A @ solution.coefficients - b
        assert np.max(np.abs(A.T @ r)) <= 1e-10 * solution.sigma1 * np.linalg.norm(b)


def test_prescribed_spectrum_truncation(rng):
    A, U, s, V = system_with_spectrum(rng, 12, [1.0, 0.5, 0.1, 1e-12, 1e-14])
    b = rng.standard_normal(12)
    solution = solve(raw_system(A, b), SolverConfig(tau=1e-8))
    assert solution.effective_rank == 3
    expected = V[:, :3] @ ((U[:, :3].T @ b) / s[:3])
    np.testing.assert_allclose(solution.coefficients, expected, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(solution.singular_values, s, rtol=1e-8, atol=1e-13)


def test_rank_non_increasing_in_tau():
    system = make_1d_system(N=20, epsilon=3.0)
    ranks = [solve(system, SolverConfig(tau=tau)).effective_rank for tau in np.logspace(-15, -1, 15)]
    assert all(later <= earlier for earlier, later in zip(ranks, ranks[1:]))
    assert ranks[0] > ranks[-1]


def test_qr_agrees_with_svd_when_well_conditioned(rng):
    for _ in range(20):
        A, b = random_well_conditioned(rng)
        system = raw_system(A, b)
        svd = solve(system, SolverConfig(tau=1e-14))
        qr = solve(system, SolverConfig(tau=1e-14, factorization="qr"))
        np.testing.assert_allclose(qr.coefficients, svd.coefficients, rtol=1e-8, atol=1e-12)
        assert qr.effective_rank == svd.effective_rank
        assert qr.sigma1 == pytest.approx(svd.sigma1, rel=1e-12)


def test_qr_truncation_returns_basic_solution():
    system = raw_system(np.diag([3.0, 1e-13, 2.0]), [3.0, 1.0, 4.0])
    solution = solve(system, SolverConfig(tau=1e-8, factorization="qr"))
    assert solution.effective_rank == 2
    np.testing.assert_allclose(solution.coefficients, [1.0, 0.0, 2.0], atol=1e-12)


def test_row_scaling_covariance():
    centers = make_nodes([-1.0, 0.0, 1.0])
    samples = make_nodes(np.linspace(-1.0, 1.0, 9), NodeRole.INTERIOR_SAMPLE)
    base = assemble(centers, samples, RbfKernel.GA, 2.0, np.cos, 1.0)
    scaled = assemble(centers, samples, RbfKernel.GA, 2.0, np.cos, 4.0)
    np.testing.assert_allclose(scaled.matrix, 2.0 * base.matrix, rtol=1e-15)
    np.testing.assert_allclose(scaled.rhs, 2.0 * base.rhs, rtol=1e-15)
    np.testing.assert_allclose(solve(scaled, SVD).coefficients, solve(base, SVD).coefficients, rtol=1e-10)


def test_relative_truncation_invariant_under_row_scaling():
    base = make_1d_system(N=15, epsilon=2.0)
    solution = solve(base, SolverConfig(tau=1e-6))
    doubled = raw_system(2.0 * np.asarray(base.matrix), 2.0 * np.asarray(base.rhs))
    scaled = solve(doubled, SolverConfig(tau=1e-6))
    assert scaled.effective_rank == solution.effective_rank < base.shape[1]
    np.testing.assert_allclose(scaled.coefficients, solution.coefficients, rtol=1e-6, atol=1e-9)


def test_ill_formed_system_rejected():
    with pytest.raises(InvalidArgumentError):
        solve(raw_system(np.eye(3), [1.0, 2.0]))


def test_solution_is_immutable():
    solution = solve(make_1d_system(N=4))
    with pytest.raises(ValueError):
        solution.coefficients[0] = 1.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        solution.effective_rank = 0


# ============================================================================
# EVALUATION AND DIAGNOSTICS
# ============================================================================

def test_zero_coefficients_evaluate_to_zero():
    system = make_1d_system(N=5)
    zero = LsSolution(np.zeros(11), 0.0, 0.0, 0, 1.0)
    np.testing.assert_array_equal(evaluate_approximant(zero, system.meta, np.linspace(-1, 1, 7)), 0.0)


def test_single_coefficient_reproduces_translate():
    system = make_1d_system(N=5, epsilon=1.7)
    coefficients = np.zeros(11)
    coefficients[4] = 1.0
    unit = LsSolution(coefficients, 1.0, 0.0, 1, 1.0)
    rbf = ShapedRbf(RbfKernel.GA, 1.7, (system.meta.centers.flat()[4],))
    x = np.linspace(-1.0, 1.0, 13)
    np.testing.assert_allclose(evaluate_approximant(unit, system.meta, x), rbf.eval_many(x), rtol=1e-14)


def test_residual_consistency_at_samples():
    # eps h = 1.5: translates barely overlap, |lambda| stays of order one
    system = make_1d_system(N=12, epsilon=12.0)
    solution = solve(system)
    values = evaluate_approximant(solution, system.meta, system.meta.samples.points)
    np.testing.assert_allclose(system.row_scale * values - system.rhs,
                               residual_vector(system, solution), atol=1e-13)
    assert np.linalg.norm(residual_vector(system, solution)) == pytest.approx(solution.residual_norm, rel=1e-10)


def test_evaluation_at_samples_matches_unscaled_matrix():
    system = make_1d_system(N=12)
    solution = solve(system)
    meta = system.meta
    unscaled = kernel_matrix(meta.kernel, meta.epsilon, meta.centers.points,
                             meta.samples.points, meta.dim, meta.normalized)
    values = evaluate_approximant(solution, meta, meta.samples.points)
    np.testing.assert_allclose(values, unscaled @ solution.coefficients, rtol=0, atol=1e-15)


def test_rule_of_thumb_ratio():
    solution = LsSolution(np.array([60.0, 80.0]), 100.0, 0.0, 2, 1.0)
    assert rule_of_thumb_ratio(1e-8, solution) == pytest.approx(1e-10, rel=1e-15)
    assert rule_of_thumb_ratio(1e-6 * 100.0, solution) == pytest.approx(1e-6, rel=1e-15)


def test_rule_of_thumb_ratio_undefined_for_zero_norm():
    with pytest.raises(UndefinedRatioError):
        rule_of_thumb_ratio(1e-3, LsSolution(np.zeros(3), 0.0, 1.0, 0, 0.0))
