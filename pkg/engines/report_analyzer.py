"""
Report Analyzer - error norms, sweep reports and their CSV form

Collects one ApproximationReport per basis size and turns a sweep into:
- a pandas DataFrame / CSV file with a fixed column order
- convergence diagnostics (log-log slope over the last decade, plateau level)
- a console summary
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from core.exceptions import InvalidArgumentError, ReportIOError


CSV_COLUMNS = [
    'N', 'M', 'epsilon', 'err_l2', 'err_max', 'coeff_norm',
    'ratio', 'rank', 'sigma1', 'predicted_limit',
]
_INTEGER_COLUMNS = ('N', 'M', 'rank')
FLOAT_FORMAT = '%.16e'      # 17 significant digits


@dataclass
class ApproximationReport:
    """Accuracy and solver diagnostics of one LS-RBF approximation"""
    N: int
    M: int
    epsilon: float

    # === ERRORS ===
    err_l2: float                       # discrete L2 error on the validation grid
    err_max: float                      # max error on the same grid

    # === SOLVER ===
    coeff_norm: float
    ratio: float                        # err_l2 / |lambda|, NaN when |lambda| = 0
    effective_rank: int
    sigma1: float
    predicted_limit: Optional[float] = None     # linear policies only

    warnings: List[str] = field(default_factory=list)

    def to_row(self) -> Dict:
        return {
            'N': int(self.N),
            'M': int(self.M),
            'epsilon': float(self.epsilon),
            'err_l2': float(self.err_l2),
            'err_max': float(self.err_max),
            'coeff_norm': float(self.coeff_norm),
            'ratio': float(self.ratio),
            'rank': int(self.effective_rank),
            'sigma1': float(self.sigma1),
            'predicted_limit': float('nan') if self.predicted_limit is None else float(self.predicted_limit),
        }

    @classmethod
    def from_row(cls, row: Dict) -> "ApproximationReport":
        limit = float(row['predicted_limit'])
        return cls(
            N=int(row['N']),
            M=int(row['M']),
            epsilon=float(row['epsilon']),
            err_l2=float(row['err_l2']),
            err_max=float(row['err_max']),
            coeff_norm=float(row['coeff_norm']),
            ratio=float(row['ratio']),
            effective_rank=int(row['rank']),
            sigma1=float(row['sigma1']),
            predicted_limit=None if math.isnan(limit) else limit,
        )


# ============================================================================
# ERROR NORMS
# ============================================================================

def _paired(approx, exact):
    a = np.asarray(approx, dtype=float).reshape(-1)
    e = np.asarray(exact, dtype=float).reshape(-1)
    if a.shape != e.shape:
        raise InvalidArgumentError(f"Length mismatch: {a.shape[0]} approximations vs {e.shape[0]} exact values")
    if a.size == 0:
        raise InvalidArgumentError("Error norms need at least one value")
    return a, e


def discrete_l2_error(approx, exact, measure: float) -> float:
    """sqrt(|domain| / M * sum (approx - exact)^2)"""
    a, e = _paired(approx, exact)
    if not measure > 0:
        raise InvalidArgumentError(f"Domain measure must be positive, got {measure}")
    diff = a - e
    return float(math.sqrt(measure / a.size * float(np.dot(diff, diff))))


def max_error(approx, exact) -> float:
    a, e = _paired(approx, exact)
    return float(np.max(np.abs(a - e)))


# ============================================================================
# TABLES AND CSV
# ============================================================================

def reports_to_frame(reports: Sequence[ApproximationReport]) -> pd.DataFrame:
    frame = pd.DataFrame([r.to_row() for r in reports], columns=CSV_COLUMNS)
    for column in _INTEGER_COLUMNS:
        frame[column] = frame[column].astype('int64')
    return frame


def emit_csv(reports: Sequence[ApproximationReport], path: Union[str, Path]):
    """
    Write reports to CSV, one row per report in the given order.

    Raises:
        ReportIOError: If the file cannot be written
    """
    path = Path(path)
    frame = reports_to_frame(reports)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                     na_rep='nan', lineterminator='\n')
    except OSError as error:
        raise ReportIOError(path, error) from error
    logging.getLogger('ReportAnalyzer').debug(f"Wrote {len(frame)} report(s) to {path}")


def read_csv(path: Union[str, Path]) -> List[ApproximationReport]:
    """
    Parse a file written by emit_csv.

    Raises:
        ReportIOError: If the file cannot be read or lacks the expected columns
    """
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        raise ReportIOError(path, error) from error
    if list(frame.columns) != CSV_COLUMNS:
        raise ReportIOError(path, ValueError(f"unexpected columns {list(frame.columns)}"))
    return [ApproximationReport.from_row(row) for row in frame.to_dict('records')]


# ============================================================================
# CONVERGENCE DIAGNOSTICS
# ============================================================================

def _sorted(reports: Sequence[ApproximationReport]) -> List[ApproximationReport]:
    return sorted(reports, key=lambda r: r.N)


def fit_loglog_slope(reports: Sequence[ApproximationReport], decades: float = 1.0,
                     error: str = 'err_l2') -> float:
    """
    Least-squares slope of log(err) against log(N) over the final `decades`
    of N, i.e. the points with N >= N_max / 10^decades.
    """
    ordered = _sorted(reports)
    if not ordered:
        raise InvalidArgumentError("No reports to fit")
    n_max = ordered[-1].N
    window = [r for r in ordered if r.N >= n_max / 10.0 ** decades]
    Ns = np.array([r.N for r in window], dtype=float)
    errs = np.array([getattr(r, error) for r in window], dtype=float)
    usable = np.isfinite(errs) & (errs > 0)
    if np.count_nonzero(usable) < 2:
        raise InvalidArgumentError("Slope fit needs at least two positive errors in the window")
    slope, _ = np.polyfit(np.log(Ns[usable]), np.log(errs[usable]), 1)
    return float(slope)


def plateau_level(reports: Sequence[ApproximationReport], last: int = 5,
                  error: str = 'err_l2') -> float:
    """Median error of the `last` largest N"""
    ordered = _sorted(reports)
    if not ordered:
        raise InvalidArgumentError("No reports to summarize")
    return float(np.median([getattr(r, error) for r in ordered[-last:]]))


class ReportAnalyzer:
    """Accumulates sweep reports and summarizes them"""

    def __init__(self, reports: Optional[Sequence[ApproximationReport]] = None):
        self.reports: List[ApproximationReport] = list(reports or [])
        self.logger = logging.getLogger('ReportAnalyzer')

    def add_report(self, report: ApproximationReport):
        self.reports.append(report)

    def to_frame(self) -> pd.DataFrame:
        return reports_to_frame(_sorted(self.reports))

    def export_csv(self, path: Union[str, Path]):
        emit_csv(_sorted(self.reports), path)
        self.logger.info(f"Exported {len(self.reports)} report(s) to: {path}")

    def summary(self, tau: Optional[float] = None) -> Dict:
        """Headline numbers of the sweep"""
        if not self.reports:
            self.logger.warning("No reports to analyze")
            return {}
        ordered = _sorted(self.reports)
        result = {
            'points': len(ordered),
            'N_range': (ordered[0].N, ordered[-1].N),
            'best_err_l2': min(r.err_l2 for r in ordered),
            'plateau': plateau_level(ordered),
            'predicted_limit': ordered[-1].predicted_limit,
            'warnings': sum(len(r.warnings) for r in ordered),
        }
        try:
            result['slope'] = fit_loglog_slope(ordered)
        except InvalidArgumentError:
            result['slope'] = float('nan')
        if tau is not None:
            ratios = [r.ratio for r in ordered if math.isfinite(r.ratio)]
            result['ratio_over_tau'] = (min(ratios) / tau, max(ratios) / tau) if ratios else None
        return result

    def print_summary(self, tau: Optional[float] = None):
        summary = self.summary(tau)
        if not summary:
            return
        print("\n" + "=" * 70)
        print("LS-RBF SWEEP SUMMARY")
        print("=" * 70)
        print(f"  Sweep points:           {summary['points']}  (N = {summary['N_range'][0]}..{summary['N_range'][1]})")
        print(f"  Best L2 error:          {summary['best_err_l2']:.3e}")
        print(f"  Plateau (last 5):       {summary['plateau']:.3e}")
        if summary['predicted_limit'] is not None:
            print(f"  Predicted limit:        {summary['predicted_limit']:.3e}")
        print(f"  Last-decade slope:      {summary['slope']:.2f}")
        if summary.get('ratio_over_tau'):
            low, high = summary['ratio_over_tau']
            print(f"  Ratio / tau:            {low:.2e} .. {high:.2e}")
        if summary['warnings']:
            print(f"  Solver warnings:        {summary['warnings']}")
        print("=" * 70 + "\n")
