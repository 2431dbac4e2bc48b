"""Overflow-free high-precision evaluation of term expressions.

Values are carried as sign plus natural-log magnitude so that terms like
``n!/396^(4n)`` can be sampled at ``n = 10^12`` without leaving the
representable range. ``ln n!`` uses the exact product for small arguments
and the Stirling/loggamma expansion (with mpmath's rigorous error control)
above the cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from .errors import DomainError, UnsupportedFormError
from . import expr as ex

__all__ = ["BigValue", "eval_log", "compile_fn", "EXACT_FACTORIAL_CUTOFF"]

EXACT_FACTORIAL_CUTOFF = 10 ** 5

NEG_INF = mpf("-inf")


@dataclass(frozen=True)
class BigValue:
    """Signed value in log-magnitude form: value = sign * exp(log_magnitude)."""

    sign: int  # -1, 0, +1
    log_magnitude: mpf
    precision: int

    def __post_init__(self):
        if self.sign == 0 and self.log_magnitude != NEG_INF:
            object.__setattr__(self, "log_magnitude", NEG_INF)

    def to_mpf(self) -> mpf:
        if self.sign == 0:
            return mpf(0)
        with mp.workprec(self.precision):
            return self.sign * mpmath.exp(self.log_magnitude)

    def __float__(self):
        return float(self.to_mpf())

    def __repr__(self):
        if self.sign == 0:
            return "BigValue(0)"
        s = "-" if self.sign < 0 else ""
        return f"BigValue({s}exp({mpmath.nstr(self.log_magnitude, 12)}))"


@lru_cache(maxsize=None)
def _ln_factorial_exact(k: int, prec: int) -> mpf:
    with mp.workprec(prec):
        return mpmath.log(mpf(math.factorial(k)))


def _ln_factorial(x: mpf, prec: int) -> mpf:
    if x < 0:
        raise DomainError("factorial of a negative value")
    if x <= EXACT_FACTORIAL_CUTOFF and x == mpmath.floor(x):
        return _ln_factorial_exact(int(x), prec)
    return mpmath.loggamma(x + 1)


def _signed(v: mpf):
    if v == 0:
        return (0, NEG_INF)
    return (1 if v > 0 else -1, mpmath.log(abs(v)))


def _value_of(sign: int, logmag: mpf) -> mpf:
    if sign == 0:
        return mpf(0)
    return sign * mpmath.exp(logmag)


def _eval(e: ex.Expr, env: dict, prec: int):
    """Recursive signed-log evaluation; returns (sign, log_magnitude)."""
    if isinstance(e, ex.Num):
        return _signed(mpf(e.val.numerator) / e.val.denominator)
    if isinstance(e, ex.Const):
        return (1, mpmath.log(mpmath.e if e.name == "e" else mpmath.pi))
    if isinstance(e, ex.Var):
        try:
            v = env[e.name]
        except KeyError:
            raise DomainError(f"unbound variable {e.name!r}") from None
        return _signed(mpf(v))
    if isinstance(e, ex.Add):
        parts = [_eval(t, env, prec) for t in e.args]
        parts = [p for p in parts if p[0] != 0]
        if not parts:
            return (0, NEG_INF)
        m = max(p[1] for p in parts)
        s = mpmath.fsum(p[0] * mpmath.exp(p[1] - m) for p in parts)
        if s == 0:
            return (0, NEG_INF)
        return (1 if s > 0 else -1, m + mpmath.log(abs(s)))
    if isinstance(e, ex.Mul):
        sign, logmag = 1, mpf(0)
        for f in e.args:
            fs, fl = _eval(f, env, prec)
            if fs == 0:
                return (0, NEG_INF)
            sign *= fs
            logmag += fl
        return (sign, logmag)
    if isinstance(e, ex.Pow):
        bs, bl = _eval(e.base, env, prec)
        es, el = _eval(e.exp, env, prec)
        ev = _value_of(es, el)
        if bs == 0:
            if ev > 0:
                return (0, NEG_INF)
            raise DomainError("zero raised to a nonpositive power")
        if bs < 0:
            if ev != mpmath.floor(ev):
                raise DomainError("negative base with non-integer exponent")
            sign = 1 if mpf(ev) % 2 == 0 else -1
            return (sign, ev * bl)
        return (1, ev * bl)
    if isinstance(e, ex.LnK):
        s, l = _eval(e.arg, env, prec)
        if s <= 0:
            raise DomainError("log of a nonpositive value")
        v = l  # ln(arg) straight from the log-magnitude
        for _ in range(e.depth - 1):
            if v <= 0:
                raise DomainError("nested log of a nonpositive value")
            v = mpmath.log(v)
        return _signed(v)
    if isinstance(e, ex.Factorial):
        s, l = _eval(e.arg, env, prec)
        v = _value_of(s, l)
        return (1, _ln_factorial(v, prec))
    if isinstance(e, ex.Abs):
        s, l = _eval(e.arg, env, prec)
        return (abs(s), l)
    if isinstance(e, (ex.Sin, ex.Cos)):
        s, l = _eval(e.arg, env, prec)
        v = _value_of(s, l)
        r = mpmath.sin(v) if isinstance(e, ex.Sin) else mpmath.cos(v)
        return _signed(r)
    if isinstance(e, ex.AltSign):
        s, l = _eval(e.arg, env, prec)
        v = _value_of(s, l)
        if v != mpmath.floor(v):
            raise DomainError("alternating sign exponent is not an integer")
        return (1 if mpf(v) % 2 == 0 else -1, mpf(0))
    raise UnsupportedFormError(repr(e))


def eval_log(e: ex.Expr, at, precision_bits: int = 256, var: str = "n") -> BigValue:
    """Sign and natural-log magnitude of ``e`` at the sample point ``at``."""
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    guard = precision_bits + 32
    with mp.workprec(guard):
        sign, logmag = _eval(e, {var: at}, guard)
    return BigValue(sign, logmag, precision_bits)


# ---------------------------------------------------------------------------
# Direct compilation for bulk numeric work (oracle sums)
# ---------------------------------------------------------------------------

def compile_fn(e: ex.Expr, var: str = "n"):
    """Compile to a closure mpf -> mpf evaluated at the caller's precision.

    Intended for moderate arguments (partial sums, Cauchy windows); huge
    arguments should go through :func:`eval_log` instead.
    """
    if isinstance(e, ex.Num):
        p, q = e.val.numerator, e.val.denominator
        return lambda x: mpf(p) / q
    if isinstance(e, ex.Const):
        if e.name == "e":
            return lambda x: +mpmath.e
        return lambda x: +mpmath.pi
    if isinstance(e, ex.Var):
        if e.name != var:
            raise DomainError(f"unbound variable {e.name!r}")
        return lambda x: mpf(x)
    if isinstance(e, ex.Add):
        fns = [compile_fn(t, var) for t in e.args]
        return lambda x: mpmath.fsum(f(x) for f in fns)
    if isinstance(e, ex.Mul):
        fns = [compile_fn(t, var) for t in e.args]

        def _mul(x):
            r = mpf(1)
            for f in fns:
                r *= f(x)
            return r
        return _mul
    if isinstance(e, ex.Pow):
        fb = compile_fn(e.base, var)
        fe = compile_fn(e.exp, var)
        if isinstance(e.exp, ex.Num) and e.exp.val.denominator == 1:
            k = e.exp.val.numerator
            return lambda x: fb(x) ** k
        return lambda x: mpmath.power(fb(x), fe(x))
    if isinstance(e, ex.LnK):
        fa = compile_fn(e.arg, var)
        k = e.depth

        def _lnk(x):
            v = fa(x)
            for _ in range(k):
                if v <= 0:
                    raise DomainError("log of a nonpositive value")
                v = mpmath.log(v)
            return v
        return _lnk
    if isinstance(e, ex.Factorial):
        fa = compile_fn(e.arg, var)

        def _fact(x):
            v = fa(x)
            if v != mpmath.floor(v):
                raise DomainError("factorial of a non-integer")
            k = int(v)
            if k <= EXACT_FACTORIAL_CUTOFF:
                return mpf(math.factorial(k))
            return mpmath.gamma(v + 1)
        return _fact
    if isinstance(e, ex.Abs):
        fa = compile_fn(e.arg, var)
        return lambda x: abs(fa(x))
    if isinstance(e, ex.Sin):
        fa = compile_fn(e.arg, var)
        return lambda x: mpmath.sin(fa(x))
    if isinstance(e, ex.Cos):
        fa = compile_fn(e.arg, var)
        return lambda x: mpmath.cos(fa(x))
    if isinstance(e, ex.AltSign):
        fa = compile_fn(e.arg, var)

        def _alt(x):
            v = fa(x)
            if v != mpmath.floor(v):
                raise DomainError("alternating sign exponent is not an integer")
            return mpf(1) if int(v) % 2 == 0 else mpf(-1)
        return _alt
    raise UnsupportedFormError(repr(e))
