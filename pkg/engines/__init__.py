"""
LS-RBF engines: least-squares solver, collocation, sweeps and reports
"""
from .ls_solver import LsSolution, LsSystem, SolverConfig, assemble, solve
from .report_analyzer import ApproximationReport, ReportAnalyzer
from .sweep_engine import SweepConfig, SweepEngine
from .collocation_engine import CollocationEngine, PoissonConfig, PoissonProblem

__all__ = [
    'LsSolution', 'LsSystem', 'SolverConfig', 'assemble', 'solve',
    'ApproximationReport', 'ReportAnalyzer',
    'SweepConfig', 'SweepEngine',
    'CollocationEngine', 'PoissonConfig', 'PoissonProblem',
]
