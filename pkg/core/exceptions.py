"""
Exception hierarchy for the LS-RBF toolkit.

Every error raised on purpose by the library derives from LsRbfError so that
callers (the CLI in particular) can separate numerical/configuration problems
from programming errors.
"""

from typing import List, Optional


# ============================================================================
# CUSTOM EXCEPTIONS
# ============================================================================

class LsRbfError(Exception):
    """Base exception for LS-RBF errors"""
    pass


class InvalidArgumentError(LsRbfError, ValueError):
    """Raised when an argument violates an operation's precondition"""
    pass


class GeometryError(InvalidArgumentError):
    """Raised when node generation cannot meet a requested layout"""
    pass


class UnsupportedOperationError(LsRbfError, NotImplementedError):
    """Raised for kernel or domain variants an operation does not implement"""
    pass


class SampleEvaluationError(LsRbfError):
    """Raised when the sampled function fails at a sample point"""
    def __init__(self, index: int, point, cause: Exception):
        self.index = index
        self.point = point
        self.cause = cause
        super().__init__(f"Function evaluation failed at sample {index} ({point}): {cause}")


class UndefinedRatioError(LsRbfError, ZeroDivisionError):
    """Raised when the rule-of-thumb ratio is requested for a zero coefficient vector"""
    pass


class ScanLimitExceededError(LsRbfError):
    """Raised when an integer scan does not terminate below its cap"""
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"No admissible N found below {cap}; parameters are pathological")


class ConfigError(LsRbfError):
    """Raised when a configuration fails validation"""
    def __init__(self, message: str, errors: Optional[List[str]] = None):
        self.errors = errors or []
        details = "; ".join(self.errors)
        super().__init__(f"{message}: {details}" if details else message)


class ReportIOError(LsRbfError):
    """Raised when a report file cannot be written or read"""
    def __init__(self, path, cause: Exception):
        self.path = path
        self.cause = cause
        super().__init__(f"I/O failure on {path}: {cause}")
