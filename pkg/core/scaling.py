"""
Shape-Parameter Scaling - policies and closed-form predictors

Policies map the basis size N to the shape parameter eps:
    Constant        eps = eps0
    Power           eps = c N^alpha, 0 < alpha < 1
    Linear          eps = c N
    LinearOptimal   eps = c* N with c* = pi / (T sqrt(2 log(1 + tau^-2)))

The predictors reproduce the bracketed expressions of the Gaussian LS-RBF
error bounds. Those bounds hold up to unspecified constants, so every value
returned here is an order-of-magnitude guide, not an exact error.
log is the natural logarithm throughout.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

import numpy as np
from scipy.special import erfc

from core.exceptions import InvalidArgumentError, ScanLimitExceededError


SCAN_CAP = 10 ** 7
_SCAN_CHUNK = 4096


class ScalingKind(Enum):
    """Growth law of the shape parameter"""
    CONSTANT = "constant"
    POWER = "power"
    LINEAR = "linear"
    LINEAR_OPTIMAL = "linear-optimal"

    @classmethod
    def from_name(cls, name) -> "ScalingKind":
        if isinstance(name, ScalingKind):
            return name
        key = str(name).strip().lower().replace('_', '-')
        for kind in cls:
            if kind.value == key:
                return kind
        valid = ", ".join(k.value for k in cls)
        raise InvalidArgumentError(f"Unknown scaling '{name}'. Valid scalings: {valid}")


@dataclass(frozen=True)
class ScalingPolicy:
    """Rule mapping N to eps"""
    kind: ScalingKind
    epsilon0: Optional[float] = None
    c: Optional[float] = None
    alpha: Optional[float] = None
    T: Optional[float] = None
    tau: Optional[float] = None

    def __post_init__(self):
        kind = ScalingKind.from_name(self.kind)
        object.__setattr__(self, 'kind', kind)
        if kind is ScalingKind.CONSTANT:
            _require_positive(epsilon0=self.epsilon0)
        elif kind is ScalingKind.POWER:
            _require_positive(c=self.c, alpha=self.alpha)
            if not 0 < self.alpha < 1:
                raise InvalidArgumentError(f"alpha must lie in (0, 1), got {self.alpha}")
        elif kind is ScalingKind.LINEAR:
            _require_positive(c=self.c)
        else:
            _require_positive(T=self.T, tau=self.tau)
            if not self.tau < 0.5:
                raise InvalidArgumentError(f"LinearOptimal requires tau < 1/2, got {self.tau}")

    # Factories
    @classmethod
    def constant(cls, epsilon0: float) -> "ScalingPolicy":
        return cls(ScalingKind.CONSTANT, epsilon0=epsilon0)

    @classmethod
    def power(cls, c: float, alpha: float) -> "ScalingPolicy":
        return cls(ScalingKind.POWER, c=c, alpha=alpha)

    @classmethod
    def linear(cls, c: float) -> "ScalingPolicy":
        return cls(ScalingKind.LINEAR, c=c)

    @classmethod
    def linear_optimal(cls, T: float, tau: float) -> "ScalingPolicy":
        return cls(ScalingKind.LINEAR_OPTIMAL, T=T, tau=tau)

    @classmethod
    def from_settings(cls, scaling: str, c: Optional[float] = None, alpha: Optional[float] = None,
                      T: Optional[float] = None, tau: Optional[float] = None,
                      epsilon0: Optional[float] = None) -> "ScalingPolicy":
        """Build a policy from flat configuration values (CLI / config files)"""
        kind = ScalingKind.from_name(scaling)
        if kind is ScalingKind.CONSTANT:
            return cls.constant(epsilon0)
        if kind is ScalingKind.POWER:
            return cls.power(c, alpha)
        if kind is ScalingKind.LINEAR:
            return cls.linear(c)
        return cls.linear_optimal(T, tau)

    @property
    def is_linear(self) -> bool:
        return self.kind in (ScalingKind.LINEAR, ScalingKind.LINEAR_OPTIMAL)

    @property
    def linear_constant(self) -> Optional[float]:
        """c of eps = c N for the linear policies, None otherwise"""
        if self.kind is ScalingKind.LINEAR:
            return self.c
        if self.kind is ScalingKind.LINEAR_OPTIMAL:
            return optimal_c(self.T, self.tau)
        return None

    def epsilon(self, N: int) -> float:
        return epsilon_of(self, N)

    def to_dict(self) -> Dict:
        return {
            'scaling': self.kind.value,
            'epsilon0': self.epsilon0,
            'c': self.c,
            'alpha': self.alpha,
            'T': self.T,
            'tau': self.tau,
        }


def _require_positive(**values):
    for name, value in values.items():
        if value is None or not np.isfinite(value) or value <= 0:
            raise InvalidArgumentError(f"{name} must be a positive number, got {value}")


def _check_predictor_inputs(T: float, B: float, tau: float):
    _require_positive(T=T, B=B, tau=tau)
    if not B < T:
        raise InvalidArgumentError(f"Domain radius B={B} must be smaller than T={T}")
    if not tau <= 1:
        raise InvalidArgumentError(f"tau must lie in (0, 1], got {tau}")


# ============================================================================
# POLICY EVALUATION
# ============================================================================

def epsilon_of(policy: ScalingPolicy, N: int) -> float:
    """Shape parameter for basis size N under the given policy"""
    if N < 1:
        raise InvalidArgumentError(f"N must be at least 1, got {N}")
    kind = policy.kind
    if kind is ScalingKind.CONSTANT:
        return float(policy.epsilon0)
    if kind is ScalingKind.POWER:
        return float(policy.c * N ** policy.alpha)
    if kind is ScalingKind.LINEAR:
        return float(policy.c * N)
    return float(optimal_c(policy.T, policy.tau) * N)


def optimal_c(T: float, tau: float, full_constraint: bool = False) -> float:
    """
    Proportionality constant c* = pi / (T sqrt(2 log(1 + tau^-2))).

    With full_constraint the value is capped at 1, the form required by the
    algebraic convergence estimate.

    Raises:
        InvalidArgumentError: Unless 0 < tau < 1/2
    """
    _require_positive(T=T, tau=tau)
    if not tau < 0.5:
        raise InvalidArgumentError(f"optimal_c requires tau < 1/2, got {tau}")
    c_star = math.pi / (T * math.sqrt(2.0 * math.log1p(tau ** -2)))
    return min(1.0, c_star) if full_constraint else c_star


def optimal_c_2d(area: float, tau: float) -> float:
    """
    Constant c of eps = c sqrt(N) for N hexagonal centers spread over `area`:
    c = pi / sqrt(sqrt(3) area log(1 + tau^-2)).

    Under the threshold tau a Gaussian of shape eps resolves wavenumbers up
    to about 2 eps sqrt(log(1 / tau)); this c makes that equal to the lattice
    limit 2 pi / (sqrt(3) h), as c* does with pi / h in 1D.

    Raises:
        InvalidArgumentError: Unless area > 0 and 0 < tau < 1/2
    """
    _require_positive(area=area, tau=tau)
    if not tau < 0.5:
        raise InvalidArgumentError(f"optimal_c_2d requires tau < 1/2, got {tau}")
    return math.pi / math.sqrt(math.sqrt(3.0) * area * math.log1p(tau ** -2))


def epsilon_lower_bound(T: float, B: float, N: int, tau: float) -> float:
    """
    Smallest admissible eps: (1 / (sqrt(2) (T - B))) sqrt(log(sqrt(2 pi) B N / (T tau^2))).

    Returns 0 when the logarithm's argument is <= 1.
    """
    _check_predictor_inputs(T, B, tau)
    if N < 1:
        raise InvalidArgumentError(f"N must be at least 1, got {N}")
    argument = math.sqrt(2.0 * math.pi) * B * N / (T * tau * tau)
    if argument <= 1.0:
        return 0.0
    return math.sqrt(math.log(argument)) / (math.sqrt(2.0) * (T - B))


def _lower_bound_array(T: float, B: float, Ns: np.ndarray, tau: float) -> np.ndarray:
    argument = math.sqrt(2.0 * math.pi) * B * Ns / (T * tau * tau)
    logs = np.log(np.maximum(argument, 1.0))
    return np.sqrt(logs) / (math.sqrt(2.0) * (T - B))


def _first_admissible(condition, cap: int) -> int:
    start = 1
    while start <= cap:
        stop = min(start + _SCAN_CHUNK, cap + 1)
        Ns = np.arange(start, stop, dtype=float)
        hits = np.flatnonzero(condition(Ns))
        if hits.size:
            return int(Ns[hits[0]])
        start = stop
    raise ScanLimitExceededError(cap)


def min_N_linear(c: float, T: float, B: float, tau: float, cap: int = SCAN_CAP) -> int:
    """
    Smallest N >= 1 with c N >= epsilon_lower_bound(T, B, N, tau).

    Raises:
        ScanLimitExceededError: If no N up to `cap` qualifies
    """
    _require_positive(c=c)
    _check_predictor_inputs(T, B, tau)
    return _first_admissible(lambda Ns: c * Ns >= _lower_bound_array(T, B, Ns, tau), cap)


def min_N_power(c: float, alpha: float, T: float, B: float, tau: float,
                cap: int = SCAN_CAP) -> int:
    """
    Smallest N >= 1 satisfying both sublinear-regime conditions:
    N^(1-alpha) >= sqrt(2 log 2) T / pi and c N^alpha >= epsilon_lower_bound.
    """
    _require_positive(c=c, alpha=alpha)
    if not 0 < alpha < 1:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha}")
    _check_predictor_inputs(T, B, tau)
    floor = math.sqrt(2.0 * math.log(2.0)) * T / math.pi

    def condition(Ns):
        return (Ns ** (1.0 - alpha) >= floor) & (c * Ns ** alpha >= _lower_bound_array(T, B, Ns, tau))

    return _first_admissible(condition, cap)


def min_N_for(policy: ScalingPolicy, T: float, B: float, tau: float) -> Optional[int]:
    """Minimal N for linear and power policies; None for constant scaling"""
    if policy.is_linear:
        return min_N_linear(policy.linear_constant, T, B, tau)
    if policy.kind is ScalingKind.POWER:
        return min_N_power(policy.c, policy.alpha, T, B, tau)
    return None


# ============================================================================
# ACCURACY PREDICTORS
# ============================================================================

def _saturation_term(c: float, T: float) -> float:
    """1 / sqrt(exp(pi^2 / (2 c^2 T^2)) - 1), zero once the exponential overflows"""
    exponent = math.pi ** 2 / (2.0 * c * c * T * T)
    try:
        return 1.0 / math.sqrt(math.expm1(exponent))
    except OverflowError:
        return 0.0


def limiting_accuracy(c: float, T: float, tau: float) -> float:
    """
    Error floor of the linear regime eps = c N:
    (1 / sqrt(exp(pi^2 / (2 c^2 T^2)) - 1) + sqrt(c T) tau) exp(pi^2 / (4 T^2)).
    """
    _require_positive(c=c, T=T, tau=tau)
    amplification = math.exp(math.pi ** 2 / (4.0 * T * T))
    return (_saturation_term(c, T) + math.sqrt(c * T) * tau) * amplification


def sublinear_limit(c: float, alpha: float, T: float, tau: float, N: int) -> float:
    """tau sqrt(T eps / N) exp(pi^2 / (4 T^2)) with eps = c N^alpha; vanishes as N grows"""
    _require_positive(c=c, alpha=alpha, T=T, tau=tau)
    epsilon = c * N ** alpha
    return tau * math.sqrt(T * epsilon / N) * math.exp(math.pi ** 2 / (4.0 * T * T))


@dataclass(frozen=True)
class RateTerms:
    """Algebraic and saturation parts of a convergence estimate"""
    algebraic: float
    saturation: float

    @property
    def total(self) -> float:
        return self.algebraic + self.saturation


def rate_terms(k: float, N: int, policy: ScalingPolicy, T: float, tau: float) -> RateTerms:
    """
    Convergence estimate for an H^k function, split into its parts.

    Power:   (c N^a pi / T)^-k
             + (exp(-pi^2 N^(2(1-a)) / (4 c^2 T^2)) + sqrt(c T) tau / N^((1-a)/2)) exp(pi^2 / (4 T^2))
    Linear:  (min(c, 1) N pi / T)^-k + limiting_accuracy(c, T, tau)

    Raises:
        InvalidArgumentError: For constant scaling, which no estimate covers
    """
    _require_positive(k=k, T=T, tau=tau)
    if N < 1:
        raise InvalidArgumentError(f"N must be at least 1, got {N}")
    amplification = math.exp(math.pi ** 2 / (4.0 * T * T))

    if policy.is_linear:
        c = policy.linear_constant
        algebraic = (min(c, 1.0) * N * math.pi / T) ** (-k)
        return RateTerms(algebraic, limiting_accuracy(c, T, tau))

    if policy.kind is ScalingKind.POWER:
        c, alpha = policy.c, policy.alpha
        algebraic = (c * N ** alpha * math.pi / T) ** (-k)
        decay = math.exp(-math.pi ** 2 * N ** (2.0 * (1.0 - alpha)) / (4.0 * c * c * T * T))
        floor = math.sqrt(c * T) * tau / N ** ((1.0 - alpha) / 2.0)
        return RateTerms(algebraic, (decay + floor) * amplification)

    raise InvalidArgumentError("No convergence estimate exists for constant scaling")


def predicted_rate(k: float, N: int, policy: ScalingPolicy, T: float, tau: float) -> float:
    """Total convergence estimate, see rate_terms"""
    return rate_terms(k, N, policy, T, tau).total


# ============================================================================
# EDGE DIAGNOSTICS
# ============================================================================

def tail_term(epsilon: float, T: float, B: float, N: int) -> float:
    """
    Truncation term sqrt(sqrt(2 pi) B N / T * erfc(sqrt(2) eps (T - B))).

    It is at most tau whenever eps >= epsilon_lower_bound(T, B, N, tau).
    """
    _require_positive(epsilon=epsilon, T=T, B=B)
    if not B < T:
        raise InvalidArgumentError(f"Domain radius B={B} must be smaller than T={T}")
    return math.sqrt(math.sqrt(2.0 * math.pi) * B * N / T * erfc(math.sqrt(2.0) * epsilon * (T - B)))


def edge_translate_value(c: float, T: float, tau: float) -> float:
    """
    sqrt(c T / sqrt(2 pi)) tau: the outermost normalized Gaussian translate at
    the domain edge x = 1 when c N equals the lower bound (B = 1).
    """
    _require_positive(c=c, T=T, tau=tau)
    return math.sqrt(c * T / math.sqrt(2.0 * math.pi)) * tau


def edge_translate_numeric(epsilon: float, T: float, B: float) -> float:
    """sqrt(eps) exp(-eps^2 (T - B)^2), the same quantity evaluated directly"""
    _require_positive(epsilon=epsilon, T=T, B=B)
    return math.sqrt(epsilon) * math.exp(-(epsilon * (T - B)) ** 2)
