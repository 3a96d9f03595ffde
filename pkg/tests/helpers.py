"""
Test Helper Functions

Factories for node sets, systems with known singular structure and quick
sweep configurations, shared by the unit, integration and feature suites.
"""

import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from core.geometry import Interval, NodeRole, NodeSet, centers_1d, oversample_count, samples_1d
from core.kernels import RbfKernel
from engines.ls_solver import LsSystem, SystemMeta, assemble
from engines.sweep_engine import SweepConfig


def make_nodes(points, role: NodeRole = NodeRole.CENTER) -> NodeSet:
    return NodeSet(np.asarray(points, dtype=float), role)


def make_1d_system(N: int = 10, gamma: float = 2.0, T: float = 1.5, epsilon: Optional[float] = None,
                   f=None, kernel: RbfKernel = RbfKernel.GA) -> LsSystem:
    """
    LS-RBF system on [-1, 1] with 2N+1 centers on [-T, T].

    Example:
        >>> system = make_1d_system(N=5)
        >>> system.matrix.shape
        (22, 11)
    """
    interval = Interval(-1.0, 1.0, T)
    centers = centers_1d(N, T)
    samples = samples_1d(oversample_count(N, gamma), interval)
    epsilon = epsilon if epsilon is not None else 0.25 * N
    f = f if f is not None else (lambda x: 1.0 / (1.0 + 10.0 * np.asarray(x) ** 2))
    return assemble(centers, samples, kernel, epsilon, f, T)


def raw_system(matrix: np.ndarray, rhs: np.ndarray) -> LsSystem:
    """Wrap an arbitrary matrix as an LsSystem (row scale 1, dummy metadata)"""
    n = matrix.shape[1]
    centers = make_nodes(np.arange(n, dtype=float))
    meta = SystemMeta(RbfKernel.GA, 1.0, centers)
    return LsSystem(np.asarray(matrix, dtype=float), np.asarray(rhs, dtype=float), 1.0, meta)


def random_well_conditioned(rng: np.random.Generator, max_rows: int = 40,
                            max_cols: int = 20) -> Tuple[np.ndarray, np.ndarray]:
    """Gaussian random M x N system with M >= N + 5 (condition number of order 10)"""
    n = int(rng.integers(2, max_cols + 1))
    m = int(rng.integers(min(n + 5, max_rows), max_rows + 1))
    return rng.standard_normal((m, n)), rng.standard_normal(m)


def system_with_spectrum(rng: np.random.Generator, m: int,
                         singular_values: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    A = U diag(s) V^T with prescribed singular values.

    Returns:
        (A, U, s, V) with orthonormal U (m x n) and V (n x n)
    """
    s = np.asarray(singular_values, dtype=float)
    n = s.size
    U, _ = np.linalg.qr(rng.standard_normal((m, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (U * s) @ V.T, U, s, V


def quick_sweep_config(**overrides) -> SweepConfig:
    """Small Runge sweep that runs in well under a second"""
    values = dict(function="runge", T=1.5, tau=1e-10, scaling="linear-optimal",
                  gamma=2.0, n_min=5, n_max=25, n_step=5)
    values.update(overrides)
    return SweepConfig(**values)


def second_difference(func, x: float, h: float = 1e-4) -> float:
    """-(f(x + h) - 2 f(x) + f(x - h)) / h^2"""
    return -(func(x + h) - 2.0 * func(x) + func(x - h)) / (h * h)
