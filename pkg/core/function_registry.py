"""
Function Registry - named target functions and Poisson problems

Registry pattern for the functions approximated in convergence studies and
for the boundary value problems solved by the collocation engine. Both are
registered with a decorator and looked up by name from configs and the CLI.

Usage:
    @FunctionRegistry.register("runge", dim=1, smoothness="analytic")
    def runge(x):
        return 1.0 / (1.0 + 10.0 * x ** 2)

    f = FunctionRegistry.get("runge")
    values = f(np.linspace(-1, 1, 5))
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from core.exceptions import InvalidArgumentError


logger = logging.getLogger('FunctionRegistry')


@dataclass(frozen=True)
class TestFunction:
    """A target function with its dimension and regularity class"""
    __test__ = False    # not a pytest test class

    name: str
    dim: int
    func: Callable
    smoothness: str = "analytic"        # "analytic" or "finite-regularity(k)"
    description: str = ""
    domain: str = "[-1, 1]"
    tags: tuple = field(default_factory=tuple)

    def __call__(self, x) -> np.ndarray:
        return self.func(x)

    @property
    def regularity(self) -> Optional[float]:
        """k of finite-regularity(k), None for analytic functions"""
        if self.smoothness.startswith("finite-regularity"):
            return float(self.smoothness[self.smoothness.index('(') + 1:-1])
        return None


class _NamedRegistry:
    """Shared decorator-based storage; subclasses hold their own tables"""

    _entries: Dict[str, object] = {}
    _kind = "entry"

    @classmethod
    def _store(cls, name: str, entry):
        name = name.lower()
        if name in cls._entries:
            raise ValueError(f"{cls._kind.capitalize()} '{name}' is already registered")
        cls._entries[name] = entry
        logger.debug(f"Registered {cls._kind}: '{name}'")

    @classmethod
    def unregister(cls, name: str) -> bool:
        if name in cls._entries:
            del cls._entries[name]
            return True
        return False

    @classmethod
    def names(cls) -> List[str]:
        return sorted(cls._entries.keys())

    @classmethod
    def _lookup(cls, name: str):
        key = str(name).strip().lower()
        if key not in cls._entries:
            available = ', '.join(cls.names())
            raise InvalidArgumentError(
                f"{cls._kind.capitalize()} '{name}' not found. Available: {available}"
            )
        return cls._entries[key]


class FunctionRegistry(_NamedRegistry):
    """Registry of target functions for approximation studies"""

    _entries: Dict[str, TestFunction] = {}
    _kind = "function"

    @classmethod
    def register(cls, name: str, dim: int = 1, smoothness: str = "analytic",
                 description: str = "", domain: str = "[-1, 1]",
                 tags: Optional[List[str]] = None):
        """
        Decorator registering a vectorized callable as a TestFunction.

        1D callables receive a flat array of x values, 2D callables an
        (n, 2) array of points.
        """
        if dim not in (1, 2):
            raise InvalidArgumentError(f"dim must be 1 or 2, got {dim}")

        def decorator(func: Callable) -> Callable:
            entry = TestFunction(
                name=name,
                dim=dim,
                func=func,
                smoothness=smoothness,
                description=description or (func.__doc__ or "").strip(),
                domain=domain,
                tags=tuple(tags or []),
            )
            cls._store(name, entry)
            return func

        return decorator

    @classmethod
    def get(cls, name: str) -> TestFunction:
        return cls._lookup(name)

    @classmethod
    def find(cls, dim: Optional[int] = None, tag: Optional[str] = None) -> List[str]:
        results = []
        for name, entry in cls._entries.items():
            if dim is not None and entry.dim != dim:
                continue
            if tag is not None and tag not in entry.tags:
                continue
            results.append(name)
        return sorted(results)


class ProblemRegistry(_NamedRegistry):
    """Registry of Poisson problem factories (filled by the collocation engine)"""

    _entries: Dict[str, Callable] = {}
    _kind = "problem"

    @classmethod
    def register(cls, name: str):
        def decorator(factory: Callable) -> Callable:
            cls._store(name, factory)
            return factory
        return decorator

    @classmethod
    def create(cls, name: str, **kwargs):
        return cls._lookup(name)(**kwargs)


# ============================================================================
# BUILT-IN TARGET FUNCTIONS
# ============================================================================

def _radius2(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return pts[:, 0] ** 2 + pts[:, 1] ** 2


@FunctionRegistry.register("runge", dim=1, tags=["pole"])
def runge(x):
    """Runge function 1 / (1 + 10 x^2), poles near the middle of [-1, 1]"""
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + 10.0 * x ** 2)


@FunctionRegistry.register("pole", dim=1, tags=["pole"])
def pole(x):
    """1 / (x - 1.2), pole close to the right endpoint"""
    x = np.asarray(x, dtype=float)
    return 1.0 / (x - 1.2)


@FunctionRegistry.register("abs5", dim=1, smoothness="finite-regularity(5)")
def abs5(x):
    """|x|^5, finite regularity"""
    return np.abs(np.asarray(x, dtype=float)) ** 5


@FunctionRegistry.register("smooth_exp", dim=1)
def smooth_exp(x):
    """exp(x), entire"""
    return np.exp(np.asarray(x, dtype=float))


@FunctionRegistry.register("runge2d", dim=2, domain="unit disk", tags=["pole"])
def runge2d(points):
    """1 / (1 + 10 (x^2 + y^2))"""
    return 1.0 / (1.0 + 10.0 * _radius2(points))
