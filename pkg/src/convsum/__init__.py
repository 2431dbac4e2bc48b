"""Symbolic-numeric convergence analysis for infinite series.

Decides convergence or divergence of Σ a(n) for terms built from
rational functions, powers, exponentials, logarithms, factorials, and
alternating signs, with exact constant arithmetic, a battery of
classical tests, power-series radii, rearrangement utilities, and an
arbitrary-precision numeric oracle.
"""

from .errors import EngineError
from .expr import parse, format_expr
from .tests import (CONVERGES, DIVERGES, INCONCLUSIVE, Verdict, auto)
from .power_series import RadiusResult, radius, interval

__version__ = "0.1.0"

__all__ = [
    "EngineError", "parse", "format_expr",
    "CONVERGES", "DIVERGES", "INCONCLUSIVE", "Verdict", "auto",
    "RadiusResult", "radius", "interval", "__version__",
]
