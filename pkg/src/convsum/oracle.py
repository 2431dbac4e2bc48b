"""High-precision numeric ground truth for series.

Partial sums, dyadic Cauchy windows, term-ratio rates, and trend-based
advisory verdicts. Advisories cross-check the symbolic engine; they never
override it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from . import expr as X
from .bigvalue import compile_fn, eval_log

__all__ = ["SumProfile", "partial_sum", "cauchy_window", "rate",
           "empirical_verdict", "profile"]

DEFAULT_PRECISION = 256
ADVISORY_SCHEDULE = (8, 9, 10, 11)
DECAY_RATIO = mpmath.mpf("0.8")
FLAT_RATIO = mpmath.mpf("0.95")


def _pick_var(a, var):
    free = X.free_vars(a)
    if var in free or not free:
        return var
    if len(free) == 1:
        return free.pop()
    raise ValueError(f"ambiguous index variable among {sorted(free)}")


def partial_sum(a, N: int, precision: int = DEFAULT_PRECISION,
                start: int = 1, var: str = "n"):
    """Compensated sum of a(k) for k = start..N."""
    var = _pick_var(a, var)
    if N < start:
        return mpmath.mpf(0)
    with mp.workprec(precision + 8):
        f = compile_fn(a, var)
        s = mpmath.fsum(f(k) for k in range(start, N + 1))
    with mp.workprec(precision):
        return +s


def cauchy_window(a, n: int, precision: int = DEFAULT_PRECISION,
                  var: str = "n"):
    """s_{2^n} - s_{2^{n-1}}: the n-th dyadic tail slice."""
    var = _pick_var(a, var)
    lo, hi = 2 ** (n - 1) + 1, 2 ** n
    with mp.workprec(precision + 8):
        f = compile_fn(a, var)
        s = mpmath.fsum(f(k) for k in range(lo, hi + 1))
    with mp.workprec(precision):
        return +s


def rate(a, n: int, precision: int = DEFAULT_PRECISION, var: str = "n"):
    """Convergence rate at index n.

    When the term ratio a(n+1)/a(n) tends to a finite nonzero geometric
    rate, that limit is the meaningful per-iteration rate and is returned
    (slowly-varying corrections vanish at infinity). Otherwise the exact
    numeric ratio at n is returned.
    """
    var = _pick_var(a, var)
    from .exactnum import CSum
    from .tests import ratio_test
    try:
        v = ratio_test(a, var)
    except Exception:
        v = None
    if v is not None and v.decisive:
        lim = v.auxiliary.get("ratio")
        if isinstance(lim, CSum) and not lim.is_zero:
            with mp.workprec(precision):
                return +mpmath.mpf(lim.approx())
    with mp.workprec(precision + 8):
        num = eval_log(a, n + 1, precision_bits=precision, var=var)
        den = eval_log(a, n, precision_bits=precision, var=var)
        if den.sign == 0:
            raise ZeroDivisionError(f"a({n}) = 0")
        if num.sign == 0:
            return mpmath.mpf(0)
        val = num.sign * den.sign * mpmath.exp(
            num.log_magnitude - den.log_magnitude)
    with mp.workprec(precision):
        return +val


@dataclass
class SumProfile:
    checkpoints: list = field(default_factory=list)   # (N, partial sum)
    windows: list = field(default_factory=list)       # (n, window value)
    rate_samples: list = field(default_factory=list)  # (n, a(n+1)/a(n))
    advisory: str = "Inconclusive"
    confidence: str = "low"


def profile(a, schedule=ADVISORY_SCHEDULE, precision: int = 128,
            var: str = "n") -> SumProfile:
    var = _pick_var(a, var)
    prof = SumProfile()
    for n in schedule:
        try:
            prof.windows.append((n, cauchy_window(a, n, precision, var)))
        except (ValueError, ZeroDivisionError, OverflowError):
            return prof
    for n in (10 ** 2, 10 ** 4):
        try:
            prof.rate_samples.append((n, rate(a, n, precision, var)))
        except (ValueError, ZeroDivisionError, OverflowError):
            break
    prof.checkpoints.append((2 ** schedule[-1],
                             partial_sum(a, 2 ** schedule[-1], precision,
                                         var=var)))
    mags = [abs(w) for _, w in prof.windows]
    if not mags or mags[0] == 0:
        prof.advisory = "Converges"
        prof.confidence = "high"
        return prof
    # window ratios: a geometric tail w*r/(1-r) is summable exactly when the
    # dyadic windows keep shrinking by a uniform factor
    ratios = [b / a_ for a_, b in zip(mags, mags[1:]) if a_ > 0]
    if ratios and max(ratios) <= DECAY_RATIO:
        prof.advisory = "Converges"
        prof.confidence = "high"
    elif ratios and min(ratios) >= FLAT_RATIO:
        # windows bounded away from zero (or growing): the tail cannot vanish
        prof.advisory = "Diverges"
        prof.confidence = "high"
    else:
        prof.advisory = "Inconclusive"
        prof.confidence = "low"
    return prof


def empirical_verdict(a, schedule=ADVISORY_SCHEDULE, precision: int = 128,
                      var: str = "n") -> str:
    """Advisory 'Converges'/'Diverges'/'Inconclusive' from window trends.

    Purely numeric; callers must treat it as a hint, never as a verdict.
    """
    # terms visibly not tending to zero: divergence hint without summing
    var2 = _pick_var(a, var)
    try:
        tail = [eval_log(a, n, precision_bits=precision, var=var2)
                for n in (10 ** 3, 10 ** 6, 10 ** 9)]
        if all(b.sign != 0 and b.log_magnitude > -mpmath.mpf("1e-3")
               for b in tail):
            return "Diverges"
    except (ValueError, ZeroDivisionError, OverflowError):
        pass
    prof = profile(a, schedule, precision, var)
    if prof.confidence == "high":
        return prof.advisory
    return "Inconclusive"
