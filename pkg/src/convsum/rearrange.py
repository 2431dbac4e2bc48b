"""Contiguous rearrangement transforms.

Fixed-period blocking turns alternating series into sign-stable ones for
the test battery, and the constructive rearrangement procedures demonstrate
the two classical facts about conditionally convergent series: any target
sum is reachable, and divergent rearrangements exist.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from . import expr as X
from .bigvalue import compile_fn
from .errors import (
    AmbiguousSignError,
    DomainError,
    NotMonotonicError,
    PreconditionError,
    UnsupportedFormError,
)
from .expansion import expand_value

__all__ = ["BlockSpec", "block", "deduplicate_strict", "riemann_rearrange",
           "divergent_rearrangement_demo"]

MAX_FIXED_PERIOD = 4


@dataclass(frozen=True)
class BlockSpec:
    """Fixed contiguous blocks of length tau (2..4), or dyadic blocks."""

    kind: str = "fixed"  # "fixed" | "pow2"
    tau: int = 2

    def __post_init__(self):
        if self.kind == "fixed" and not 2 <= self.tau <= MAX_FIXED_PERIOD:
            raise ValueError("fixed period must be between 2 and 4")


def _mono_to_expr(m, var):
    out = []
    if m.q != 0:
        out.append(X.pow_(X.Var(var), X.Num(m.q)))
    for k, r in enumerate(m.logs, start=1):
        if r != 0:
            out.append(X.pow_(X.lnk(k, X.Var(var)), X.Num(r)))
    return X.mul(*out) if out else X.Num(Fraction(1))


def block(a, spec=2, var: str = "n"):
    """Symbolic block term sum_{j=0}^{tau-1} a(tau*n + j), reduced to its
    asymptotic leading term when the expansion engine can find one."""
    if isinstance(spec, int):
        spec = BlockSpec("fixed", spec)
    if spec.kind != "fixed":
        raise UnsupportedFormError("symbolic blocking needs a fixed period")
    tau = spec.tau
    parts = [
        X.substitute(a, var, X.add(X.mul(X.Num(Fraction(tau)), X.Var(var)),
                                   X.Num(Fraction(j))))
        for j in range(tau)
    ]
    raw = X.add(*parts)
    try:
        t = expand_value(raw, var)
    except (UnsupportedFormError, DomainError, AmbiguousSignError):
        return raw  # needs-numeric: hand the raw block sum back unreduced
    lead = t.leading()
    if lead is None:
        return X.Num(Fraction(0)) if not t.truncated else raw
    m, c = lead
    q = c.to_fraction()
    if q is not None:
        coeff = X.Num(q)
    else:
        try:
            coeff = X.Num(Fraction(1 if c.sign() > 0 else -1))
        except AmbiguousSignError:
            return raw
    return X.mul(coeff, _mono_to_expr(m, var))


def deduplicate_strict(samples):
    """Collapse plateau runs of a monotonic sequence to single members."""
    vals = list(samples)
    if not vals:
        return []
    nondec = all(b >= a for a, b in zip(vals, vals[1:]))
    noninc = all(b <= a for a, b in zip(vals, vals[1:]))
    if not (nondec or noninc):
        raise NotMonotonicError("input sequence is not monotonic")
    out = [vals[0]]
    for v in vals[1:]:
        if v != out[-1]:
            out.append(v)
    return out


def _conditional_parts(a, var):
    """Certify conditional convergence; return the compiled term function.

    Requires an alternating structure whose magnitude tends to zero while
    the magnitude series diverges.
    """
    from .tests import CONVERGES, DIVERGES, _limit_magnitude, _magnitude_expr, auto

    mag = _magnitude_expr(a)
    lim = _limit_magnitude(mag, var)
    if lim is None or lim[0] != "zero":
        raise PreconditionError("terms do not tend to zero")
    v_abs = auto(mag, var=var)
    if v_abs.outcome != DIVERGES:
        raise PreconditionError(
            "magnitude series must diverge (conditional convergence)")
    v = auto(a, var=var)
    if v.outcome != CONVERGES:
        raise PreconditionError("series itself must converge conditionally")
    return compile_fn(a, var)


class _SignedStream:
    """Lazy scan of a(n) for n >= start, split by sign."""

    def __init__(self, f, start=1):
        self.f = f
        self.next_index = start
        self.pos = []
        self.neg = []

    def _advance(self):
        v = self.f(self.next_index)
        self.next_index += 1
        if v > 0:
            self.pos.append(v)
        elif v < 0:
            self.neg.append(v)

    def take_pos(self):
        while not self.pos:
            self._advance()
        return self.pos.pop(0)

    def take_neg(self):
        while not self.neg:
            self._advance()
        return self.neg.pop(0)


def riemann_rearrange(a, target, max_steps: int = 10 ** 5,
                      precision: int = 64, var: str = "n", start: int = 1,
                      on_step=None):
    """Greedy rearrangement toward ``target``.

    Takes unused positive terms while the running sum is below the target
    and negative terms otherwise. Returns (partial sum, error bound), the
    bound being the magnitude of the last term consumed at a crossing; the
    invariant |s - target| <= |last crossing term| is asserted at each
    crossing.
    """
    with mp.workprec(precision):
        f = _conditional_parts(a, var)
        stream = _SignedStream(f, start)
        target = mpmath.mpf(target)
        s = mpmath.mpf(0)
        last_crossing = mpmath.inf
        below = s < target
        for _ in range(max_steps):
            term = stream.take_pos() if s < target else stream.take_neg()
            s += term
            now_below = s < target
            if now_below != below:
                last_crossing = abs(term)
                if abs(s - target) > last_crossing:
                    raise AssertionError(
                        "crossing invariant violated: overshoot exceeds the "
                        "crossing term")
            below = now_below
            if on_step is not None:
                on_step(s, term)
        return s, last_crossing


def divergent_rearrangement_demo(a, block_budget: int = 20,
                                 precision: int = 64, var: str = "n",
                                 start: int = 1):
    """Partial sums of a rearrangement whose blocks each add at least 1/4.

    Greedily consumes same-sign terms until the block exceeds 1/4, then one
    opposite-sign term; on conditionally convergent input the partial sums
    grow without bound.
    """
    if block_budget > 64:
        raise ValueError("block budget capped at 64 for tractability")
    with mp.workprec(precision):
        f = _conditional_parts(a, var)
        stream = _SignedStream(f, start)
        quarter = mpmath.mpf(1) / 4
        s = mpmath.mpf(0)
        sums = []
        for _ in range(block_budget):
            blk = mpmath.mpf(0)
            while blk < quarter:
                blk += stream.take_pos()
            s += blk + stream.take_neg()
            sums.append(+s)
        return sums
