"""Comparison of sequences at infinity.

Everything here reasons about eventually positive sequences through their
log-domain expansions (:mod:`.expansion`): ordering relations, dominant-term
simplification, bounded-factor stripping, and the discrete derivative used
by integral-style arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import mpmath

from . import expr as X
from .bigvalue import eval_log
from .errors import (
    AmbiguousSignError,
    ConstantSequenceError,
    DomainError,
    NotBoundedAwayFromZeroError,
    NotEventuallyPositiveError,
    UnsupportedFormError,
)
from .exactnum import CSum, K
from .expansion import CONST_MONO, Mono, Xp, expand_log, expand_value, split_sign

__all__ = [
    "RelKind", "Relation", "LogExpansion", "log_expand", "compare",
    "log_dominates", "simplify_dominant", "strip_bounded_factor",
    "difference_derivative",
]

NUMERIC_SAMPLE_POINTS = (10 ** 3, 10 ** 6, 10 ** 9, 10 ** 12)


class RelKind(Enum):
    MUCH_LESS = "much_less"
    MUCH_GREATER = "much_greater"
    COMPARABLE_EQUAL = "comparable_equal"
    LOG_MUCH_LESS = "log_much_less"
    LOG_MUCH_GREATER = "log_much_greater"
    LESS_EQ = "less_eq"
    GREATER_EQ = "greater_eq"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Relation:
    kind: RelKind
    constant: object = None  # CSum ratio limit when COMPARABLE_EQUAL

    def flipped(self) -> "Relation":
        flip = {
            RelKind.MUCH_LESS: RelKind.MUCH_GREATER,
            RelKind.MUCH_GREATER: RelKind.MUCH_LESS,
            RelKind.LOG_MUCH_LESS: RelKind.LOG_MUCH_GREATER,
            RelKind.LOG_MUCH_GREATER: RelKind.LOG_MUCH_LESS,
            RelKind.LESS_EQ: RelKind.GREATER_EQ,
            RelKind.GREATER_EQ: RelKind.LESS_EQ,
        }
        if self.kind in flip:
            return Relation(flip[self.kind], self.constant)
        return self

    def __repr__(self):
        sym = {
            RelKind.MUCH_LESS: "≺", RelKind.MUCH_GREATER: "≻",
            RelKind.COMPARABLE_EQUAL: "≍", RelKind.LOG_MUCH_LESS: "≺≺",
            RelKind.LOG_MUCH_GREATER: "≻≻", RelKind.LESS_EQ: "≼",
            RelKind.GREATER_EQ: "≽", RelKind.UNKNOWN: "?",
        }[self.kind]
        if self.kind is RelKind.COMPARABLE_EQUAL and self.constant is not None:
            return f"Relation({sym}, c={self.constant!r})"
        return f"Relation({sym})"


def _axis_label(m: Mono) -> str:
    return repr(m)


@dataclass(frozen=True)
class LogExpansion:
    """Ordered (axis, coefficient) view of ln f along the iterated-log scale."""

    terms: tuple  # ((Mono, CSum), ...) in strictly decreasing axis order
    remainder: bool

    @staticmethod
    def from_xp(t: Xp) -> "LogExpansion":
        items = sorted(t.terms.items(), key=lambda kv: kv[0].key(8), reverse=True)
        return LogExpansion(tuple(items), t.truncated)

    def axes(self):
        return [(_axis_label(m), c) for m, c in self.terms]

    def __repr__(self):
        body = ", ".join(f"({_axis_label(m)}, {c!r})" for m, c in self.terms)
        return f"LogExpansion([{body}], remainder={self.remainder})"


def log_expand(f, depth: int = 6, var: str = "n") -> LogExpansion:
    """Expansion of ln f along the scale n·ln n ≻ n^q ≻ ln_k n ≻ 1."""
    try:
        return LogExpansion.from_xp(expand_log(f, var))
    except DomainError as exc:
        raise NotEventuallyPositiveError(str(exc)) from exc


def _log_diff(f, g, var):
    return expand_log(f, var) - expand_log(g, var)


def compare(f, g, var: str = "n") -> Relation:
    """Order f against g at infinity; both must be eventually positive."""
    try:
        d = _log_diff(f, g, var)
    except DomainError as exc:
        raise NotEventuallyPositiveError(str(exc)) from exc
    except (UnsupportedFormError, AmbiguousSignError):
        return _numeric_compare(f, g, var)
    lead = d.leading()
    if lead is None:
        if d.truncated:
            return _numeric_compare(f, g, var)
        return Relation(RelKind.COMPARABLE_EQUAL, CSum.one())
    m, c = lead
    try:
        s = c.sign()
    except AmbiguousSignError:
        return _numeric_compare(f, g, var)
    if m.is_growing:
        return Relation(RelKind.MUCH_GREATER if s > 0 else RelKind.MUCH_LESS)
    if m.is_const:
        k = CSum.of(c.as_single_k()).exp_k()
        ratio = CSum.of(k) if k is not None else CSum.of(
            K.approx_only(mpmath.exp(c.approx())))
        return Relation(RelKind.COMPARABLE_EQUAL, ratio)
    return Relation(RelKind.COMPARABLE_EQUAL, CSum.one())


def _numeric_compare(f, g, var) -> Relation:
    """Sample ln f − ln g; conclude only on agreeing signs of growing magnitude."""
    deltas = []
    for n in NUMERIC_SAMPLE_POINTS:
        try:
            bf = eval_log(f, n, var=var)
            bg = eval_log(g, n, var=var)
        except (ValueError, ZeroDivisionError, OverflowError):
            return Relation(RelKind.UNKNOWN)
        if bf.sign <= 0 or bg.sign <= 0:
            return Relation(RelKind.UNKNOWN)
        deltas.append(bf.log_magnitude - bg.log_magnitude)
    signs = {(1 if d > 0 else -1 if d < 0 else 0) for d in deltas}
    if len(signs) != 1 or 0 in signs:
        return Relation(RelKind.UNKNOWN)
    mags = [abs(d) for d in deltas]
    if not all(b > a for a, b in zip(mags, mags[1:])):
        return Relation(RelKind.UNKNOWN)
    s = signs.pop()
    return Relation(RelKind.MUCH_GREATER if s > 0 else RelKind.MUCH_LESS)


def log_dominates(a, b, var: str = "n") -> bool:
    """True iff ln a ≻ ln b (in magnitude), i.e. a ≻≻ b."""
    try:
        La = expand_log(a, var)
        Lb = expand_log(b, var)
    except DomainError as exc:
        raise NotEventuallyPositiveError(str(exc)) from exc
    la = _growing_leading(La)
    lb = _growing_leading(Lb)
    if la is None:
        return False
    if lb is None:
        return True
    return la.cmp(lb) > 0


def _growing_leading(t: Xp):
    growing = [m for m in t.terms if m.is_growing]
    if not growing:
        return None
    return max(growing, key=lambda m: m.key(8))


# -- dominant-term simplification -------------------------------------------

def simplify_dominant(e, sum_context: bool = False, var: str = "n"):
    """Keep only ≻-maximal additive terms; idempotent, verdict-preserving.

    With ``sum_context`` set, additionally drop log-dominated bounded-irrelevant
    factors inside products (sound only for whole-sum verdicts).
    """
    if isinstance(e, X.Add):
        terms = [simplify_dominant(a, sum_context, var) for a in e.args]
        kept = _max_terms(terms, var)
        return X.add(*kept)
    if isinstance(e, X.Mul):
        args = [simplify_dominant(a, sum_context, var) for a in e.args]
        if sum_context:
            args = _drop_log_dominated(args, var)
        return X.mul(*args)
    if isinstance(e, X.Pow):
        if isinstance(e.exp, X.Num):
            return X.pow_(simplify_dominant(e.base, sum_context, var), e.exp)
        return e  # non-constant exponents amplify base perturbations
    if isinstance(e, X.LnK):
        return X.lnk(e.depth, simplify_dominant(e.arg, sum_context, var))
    if isinstance(e, X.Abs):
        return X.abs_(simplify_dominant(e.arg, sum_context, var))
    if isinstance(e, X.AltSign):
        return X.altsign(e.arg)
    return e


def _magnitude(e):
    """Positive comparison stand-in for a (possibly signed) term."""
    if isinstance(e, X.AltSign):
        return X.Num(Fraction(1))
    if isinstance(e, X.Mul):
        parts = [_magnitude(a) for a in e.args]
        return X.mul(*[p for p in parts
                       if not (isinstance(p, X.Num) and p.val == 1)]) \
            if parts else X.Num(Fraction(1))
    _, pos = split_sign(e)
    return pos


def _max_terms(terms, var):
    """Subset of ≻-maximal terms (keeping everything on Unknown)."""
    keep = list(terms)
    if any(_oscillatory(t) for t in keep):
        # cancellation between comparable oscillatory terms can flip the
        # verdict (conditional convergence); never drop here
        return keep
    out = []
    for i, t in enumerate(keep):
        dominated = False
        for j, u in enumerate(keep):
            if i == j:
                continue
            try:
                rel = compare(_magnitude(t), _magnitude(u), var)
            except (NotEventuallyPositiveError, UnsupportedFormError):
                continue
            if rel.kind is RelKind.MUCH_LESS:
                dominated = True
                break
        if not dominated:
            out.append(t)
    return out if out else terms


def _oscillatory(e):
    if isinstance(e, (X.AltSign, X.Sin, X.Cos)):
        return True
    try:
        return any(_oscillatory(c) for c in X.children(e))
    except UnsupportedFormError:
        return False


def _drop_log_dominated(args, var):
    """P032-style product pruning: ab = a inside sums when ln a ≻ ln b."""
    out = list(args)
    changed = True
    while changed:
        changed = False
        for i, b in enumerate(out):
            if len(out) == 1:
                break
            if isinstance(b, (X.Num, X.Const)) or _oscillatory(b):
                continue
            rest = out[:i] + out[i + 1:]
            try:
                if log_dominates(X.mul(*rest), _magnitude(b), var):
                    out = rest
                    changed = True
                    break
            except (NotEventuallyPositiveError, UnsupportedFormError,
                    DomainError):
                continue
    return out


# -- bounded-factor stripping ------------------------------------------------

def _arg_unbounded(e, var):
    try:
        t = expand_value(e, var)
    except (UnsupportedFormError, DomainError):
        return True  # e.g. 2^n: unbounded, just outside the value lattice
    lead = t.leading()
    return lead is not None and lead[0].is_growing


def _arg_infinitesimal(e, var):
    try:
        t = expand_value(e, var)
    except (UnsupportedFormError, DomainError):
        return False
    lead = t.leading()
    return lead is None or lead[0].is_decaying


def _classify_factor(e, var):
    """'strip' (certified bounded in (0, ∞)), 'keep', or raises for
    certified-infinitesimal oscillatory factors."""
    if isinstance(e, X.Num):
        return "strip" if e.val > 0 else "keep"
    if isinstance(e, X.Const):
        return "strip"
    osc = e.arg if isinstance(e, X.Abs) else e
    if isinstance(osc, (X.Sin, X.Cos)) and _arg_infinitesimal(osc.arg, var):
        raise NotBoundedAwayFromZeroError(
            f"factor {X.format_expr(e)} is infinitesimal")
    if isinstance(e, X.Add):
        nums = [a for a in e.args if isinstance(a, X.Num)]
        trigs = [a for a in e.args if isinstance(a, (X.Sin, X.Cos))]
        if len(nums) == 1 and len(nums) + len(trigs) == len(e.args):
            c = nums[0].val
            if c > len(trigs) and all(_arg_unbounded(t.arg, var)
                                      for t in trigs):
                return "strip"
    if not isinstance(e, (X.Sin, X.Cos, X.AltSign, X.Abs)):
        # unit-limit certification, e.g. n^(1/n) or (1+1/n)^n
        try:
            t = expand_value(e, var)
        except (UnsupportedFormError, DomainError):
            return "keep"
        lead = t.leading()
        if lead is not None and lead[0].is_const:
            try:
                if lead[1].sign() > 0:
                    return "strip"
            except AmbiguousSignError:
                return "keep"
    return "keep"


def strip_bounded_factor(e, var: str = "n"):
    """Remove factors certified bounded away from 0 and ∞; refuse on
    oscillatory factors that approach zero."""
    factors = list(e.args) if isinstance(e, X.Mul) else [e]
    kept = [f for f in factors if _classify_factor(f, var) != "strip"]
    if not kept:
        return X.Num(Fraction(1))
    return X.mul(*kept)


# -- discrete derivative ------------------------------------------------------

def _deriv(e, var):
    if isinstance(e, (X.Num, X.Const)):
        return X.Num(Fraction(0))
    if isinstance(e, X.Var):
        return X.Num(Fraction(1) if e.name == var else Fraction(0))
    if isinstance(e, X.Add):
        return X.add(*[_deriv(a, var) for a in e.args])
    if isinstance(e, X.Mul):
        parts = []
        for i, a in enumerate(e.args):
            rest = e.args[:i] + e.args[i + 1:]
            parts.append(X.mul(_deriv(a, var), *rest))
        return X.add(*parts)
    if isinstance(e, X.Pow):
        b, ex = e.base, e.exp
        if isinstance(ex, X.Num):
            return X.mul(ex, X.pow_(b, X.Num(ex.val - 1)), _deriv(b, var))
        # b^ex = exp(ex ln b)
        inner = X.add(X.mul(_deriv(ex, var), X.lnk(1, b)),
                      X.mul(ex, _deriv(b, var), X.pow_(b, X.Num(Fraction(-1)))))
        return X.mul(e, inner)
    if isinstance(e, X.LnK):
        denom = [e.arg] + [X.lnk(i, e.arg) for i in range(1, e.depth)]
        return X.mul(_deriv(e.arg, var),
                     X.pow_(X.mul(*denom), X.Num(Fraction(-1))))
    if isinstance(e, X.Sin):
        return X.mul(X.Cos(e.arg), _deriv(e.arg, var))
    if isinstance(e, X.Cos):
        return X.mul(X.Num(Fraction(-1)), X.Sin(e.arg), _deriv(e.arg, var))
    raise UnsupportedFormError(
        f"no smooth derivative for {type(e).__name__}")


def difference_derivative(a, var: str = "n"):
    """Asymptotic value of a(n+1) − a(n), as the derivative of the threaded
    smooth function; rejects asymptotically constant sequences."""
    d = _deriv(a, var)
    if isinstance(d, X.Num) and d.val == 0:
        raise ConstantSequenceError(f"{X.format_expr(a)} is constant")
    return d
