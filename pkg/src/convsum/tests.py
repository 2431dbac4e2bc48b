"""Convergence-test battery.

Every test consumes the term expression of a series, returns a
:class:`Verdict` carrying a replayable :class:`TestReport`, and prefers
``Inconclusive`` over guessing. The :func:`auto` pipeline chains the tests
from cheap structural matches to expansion-heavy boundary analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import expr as X
from .asymptotics import (
    RelKind,
    compare,
    difference_derivative,
    simplify_dominant,
    strip_bounded_factor,
)
from .bigvalue import eval_log
from .errors import (
    AmbiguousSignError,
    ConstantSequenceError,
    DomainError,
    GuardTriggeredError,
    NotBoundedAwayFromZeroError,
    NotComparableEqualError,
    NotEventuallyPositiveError,
    NotIndeterminateError,
    NotMonotonicError,
    UnsupportedFormError,
)
from .exactnum import CSum, K
from .expansion import (
    CONST_MONO,
    Mono,
    Xp,
    exp_of,
    expand_log,
    expand_value,
    split_sign,
)

__all__ = [
    "Verdict", "TestReport", "Step",
    "nth_term_test", "p_series_test", "generalized_p_series_test",
    "ratio_test", "raabe_test", "generalized_ratio_test", "nth_root_test",
    "condensation_test", "boundary_test", "alternating_test",
    "cauchy_window_test", "exp_test", "lhopital_test", "limit_comparison",
    "slower_divergent", "slower_convergent", "auto",
]

CONVERGES = "Converges"
DIVERGES = "Diverges"
INCONCLUSIVE = "Inconclusive"

BOUNDARY_DEPTH = 6


@dataclass
class Step:
    rule: str
    before: str
    after: str
    paper_ref: str = ""  # human-readable statement of the rule applied

    def as_dict(self):
        return {"rule": self.rule, "paper_ref": self.paper_ref,
                "before": self.before, "after": self.after}


@dataclass
class TestReport:
    steps: list = field(default_factory=list)

    def log(self, rule, before, after, ref=""):
        self.steps.append(Step(rule, str(before), str(after), ref))

    def extend(self, other: "TestReport"):
        self.steps.extend(other.steps)

    def as_list(self):
        return [s.as_dict() for s in self.steps]


@dataclass
class Verdict:
    outcome: str
    deciding_test: str = ""
    trace: TestReport = field(default_factory=TestReport)
    auxiliary: dict = field(default_factory=dict)

    @property
    def decisive(self):
        return self.outcome != INCONCLUSIVE

    def __repr__(self):
        return f"Verdict({self.outcome}, by={self.deciding_test or '-'})"


def _inconclusive(report=None, **aux):
    return Verdict(INCONCLUSIVE, "", report or TestReport(), aux)


def _fmt(e):
    return X.format_expr(e)


# --------------------------------------------------------------------------
# limit helpers

def _magnitude_expr(e):
    """|e| with alternating signs stripped (for limit/positivity analysis)."""
    if isinstance(e, X.AltSign):
        return X.Num(Fraction(1))
    if isinstance(e, X.Mul):
        parts = [_magnitude_expr(a) for a in e.args]
        parts = [p for p in parts if not (isinstance(p, X.Num) and p.val == 1)]
        return X.mul(*parts) if parts else X.Num(Fraction(1))
    if isinstance(e, X.Pow) and isinstance(e.exp, X.Num) \
            and e.exp.val.denominator == 1:
        return X.pow_(_magnitude_expr(e.base), e.exp)
    sign, pos = split_sign(e)
    return pos


def _has_altsign(e):
    if isinstance(e, X.AltSign):
        return True
    try:
        return any(_has_altsign(c) for c in X.children(e))
    except UnsupportedFormError:
        return False


def _limit_magnitude(e, var="n"):
    """Limit of |e|: ('inf', None) | ('zero', None) | ('finite', CSum) | None."""
    mag = _magnitude_expr(e)
    if isinstance(mag, X.Num):
        return ("zero", None) if mag.val == 0 else ("finite", CSum.of(mag.val))
    try:
        L = expand_log(mag, var)
    except (DomainError, UnsupportedFormError, AmbiguousSignError):
        return None
    lead = L.leading()
    if lead is None:
        return ("finite", CSum.one()) if not L.truncated else None
    m, c = lead
    if m.is_growing:
        try:
            return ("inf", None) if c.sign() > 0 else ("zero", None)
        except AmbiguousSignError:
            return None
    if m.is_const:
        k = c.exp_k()
        val = CSum.of(k) if k is not None else CSum.of(
            K.approx_only(mpmath.exp(c.approx())))
        return ("finite", val)
    return ("finite", CSum.one())


def _xp_limit(t: Xp):
    """Limit of an expansion: ('inf', sign) | ('zero',) | ('finite', CSum) | None."""
    lead = t.leading()
    if lead is None:
        return None if t.truncated else ("finite", CSum.zero())
    m, c = lead
    if m.is_growing:
        try:
            return ("inf", c.sign())
        except AmbiguousSignError:
            return None
    if m.is_const:
        return ("finite", c)
    return ("finite", CSum.zero())


def _csum_cmp(c: CSum, threshold) -> int:
    """sign(c - threshold), or raises AmbiguousSignError."""
    return (c - CSum.of(threshold)).sign() if not c.equals(threshold) else 0


def _log_ratio_diff(a, var):
    """ln a(n) - ln a(n+1) as an expansion, or None."""
    nxt = X.substitute(a, var, X.add(X.Var(var), X.Num(Fraction(1))))
    try:
        return expand_log(_magnitude_expr(a), var) \
            - expand_log(_magnitude_expr(nxt), var)
    except (DomainError, UnsupportedFormError, AmbiguousSignError):
        return None


def _eventually_decreasing(a, var="n"):
    """Certify that a(n) is eventually decreasing."""
    try:
        d = difference_derivative(a, var)
        t = expand_value(d, var)
        lead = t.leading()
        if lead is not None:
            return lead[1].sign() < 0
    except (ConstantSequenceError, UnsupportedFormError, DomainError,
            AmbiguousSignError):
        pass
    # fall back to the log-domain ratio: a decreasing <=> a(n)/a(n+1) >= 1
    u = _log_ratio_diff(a, var)
    if u is not None:
        lim = _xp_limit(u)
        if lim is not None:
            if lim[0] == "inf":
                return lim[1] > 0
            if lim[0] == "finite":
                try:
                    s = lim[1].sign()
                    if s != 0:
                        return s > 0
                except AmbiguousSignError:
                    pass
                lead = u.leading()
                if lead is not None and not lead[0].is_const:
                    try:
                        return lead[1].sign() > 0
                    except AmbiguousSignError:
                        return False
    return False


# --------------------------------------------------------------------------
# individual tests

def nth_term_test(a, var="n") -> Verdict:
    rep = TestReport()
    lim = _limit_magnitude(a, var)
    if lim is None:
        rep.log("nth_term", _fmt(a), "limit undecidable")
        return _inconclusive(rep)
    kind, val = lim
    ref = "a series whose terms do not tend to zero diverges"
    if kind == "inf":
        rep.log("nth_term", _fmt(a), "|a(n)| -> infinity", ref)
        return Verdict(DIVERGES, "nth_term", rep)
    if kind == "finite" and not val.is_zero:
        rep.log("nth_term", _fmt(a), f"|a(n)| -> {val!r} != 0", ref)
        return Verdict(DIVERGES, "nth_term", rep)
    rep.log("nth_term", _fmt(a), "terms tend to zero; no information", ref)
    return _inconclusive(rep)


def _log_coeffs(a, var="n"):
    """Growing part of ln a as {axis Mono: CSum}, plus truncation flag.

    Returns None when a is not eventually positive / not expandable.
    """
    try:
        L = expand_log(a, var)
    except (DomainError, UnsupportedFormError, AmbiguousSignError):
        return None
    return {m: c for m, c in L.terms.items() if m.is_growing}, L.truncated


def _pure_log_axes(coeffs):
    """{k: Fraction coeff of ln_k n} when no n^q axis is present, else None."""
    out = {}
    for m, c in coeffs.items():
        if m.q != 0:
            return None
        nz = [(k + 1, r) for k, r in enumerate(m.logs) if r != 0]
        if len(nz) != 1 or nz[0][1] != 1:
            return None
        q = c.to_fraction()
        if q is None:
            return None
        out[nz[0][0]] = q
    return out


def p_series_test(a, var="n") -> Verdict:
    rep = TestReport()
    s = simplify_dominant(a, var=var)
    got = _log_coeffs(s, var)
    if got is None:
        return _inconclusive(rep)
    coeffs, _ = got
    axes = _pure_log_axes(coeffs)
    if axes is None or set(axes) != {1}:
        rep.log("p_series", _fmt(s), "no c/n^p match")
        return _inconclusive(rep)
    p = -axes[1]
    if p <= 0:
        rep.log("p_series", _fmt(s), f"exponent p={p} <= 0: terms do not vanish")
        return Verdict(DIVERGES, "p_series", rep, {"p": p})
    verdict = CONVERGES if p > 1 else DIVERGES
    rep.log("p_series", _fmt(s), f"p = {p}",
            "sum of 1/n^p converges exactly when p > 1")
    return Verdict(verdict, "p_series", rep, {"p": p})


def generalized_p_series_test(a, var="n") -> Verdict:
    """Match a ~ 1/(n * ln n * ... * ln_{w-1} n * (ln_w n)^p)."""
    rep = TestReport()
    s = simplify_dominant(a, var=var)
    got = _log_coeffs(s, var)
    if got is None:
        return _inconclusive(rep)
    coeffs, _ = got
    axes = {}
    for m, c in coeffs.items():
        if m.q != 0:
            rep.log("generalized_p_series", _fmt(s), "no iterated-log match")
            return _inconclusive(rep)
        nz = [(k + 1, r) for k, r in enumerate(m.logs) if r != 0]
        q = c.to_fraction()
        if len(nz) != 1 or nz[0][1] != 1 or q is None:
            rep.log("generalized_p_series", _fmt(s), "no iterated-log match")
            return _inconclusive(rep)
        axes[nz[0][0]] = q
    if not axes or set(axes) != set(range(1, max(axes) + 1)):
        rep.log("generalized_p_series", _fmt(s), "no iterated-log match")
        return _inconclusive(rep)
    depth = max(axes)
    if any(axes[k] != -1 for k in range(1, depth)) or axes[depth] > 0:
        rep.log("generalized_p_series", _fmt(s), "no iterated-log match")
        return _inconclusive(rep)
    # a ~ 1/(L_{w-1} (ln_w)^p): L_{w-1} fills axes 1..w with -1 and the
    # (ln_w)^p factor puts -p on axis w+1, so depth = w + 1
    w, p = depth - 1, -axes[depth]
    verdict = CONVERGES if p > 1 else DIVERGES
    rep.log("generalized_p_series", _fmt(s), f"w = {w}, p = {p}",
            "sum of 1/(n ln n ... ln_{w-1} n (ln_w n)^p) converges iff p > 1")
    return Verdict(verdict, "generalized_p_series", rep, {"w": w, "p": p})


def ratio_test(a, var="n") -> Verdict:
    rep = TestReport()
    nxt = X.substitute(a, var, X.add(X.Var(var), X.Num(Fraction(1))))
    d = _log_ratio_diff(a, var)  # ln a(n) - ln a(n+1) = -ln(a(n+1)/a(n))
    if d is None:
        rep.log("ratio", _fmt(a), "ratio limit undecidable")
        return _inconclusive(rep)
    lim = _xp_limit(-d)
    ref = "converges when lim a(n+1)/a(n) < 1, diverges when > 1"
    if lim is None:
        rep.log("ratio", _fmt(a), "ratio limit undecidable", ref)
        return _inconclusive(rep)
    if lim[0] == "inf":
        if lim[1] > 0:
            rep.log("ratio", f"{_fmt(nxt)} / {_fmt(a)}", "ratio -> infinity", ref)
            return Verdict(DIVERGES, "ratio", rep, {"ratio": "inf"})
        rep.log("ratio", f"{_fmt(nxt)} / {_fmt(a)}", "ratio -> 0", ref)
        return Verdict(CONVERGES, "ratio", rep, {"ratio": 0})
    c = lim[1]
    k = c.exp_k()
    ratio = CSum.of(k) if k is not None else CSum.of(
        K.approx_only(mpmath.exp(c.approx())))
    try:
        s = _csum_cmp(ratio, 1)
    except AmbiguousSignError:
        rep.log("ratio", _fmt(a), "ratio limit too close to 1", ref)
        return _inconclusive(rep, ratio=ratio)
    rep.log("ratio", f"{_fmt(nxt)} / {_fmt(a)}", f"ratio -> {ratio!r}", ref)
    if s < 0:
        return Verdict(CONVERGES, "ratio", rep, {"ratio": ratio})
    if s > 0:
        return Verdict(DIVERGES, "ratio", rep, {"ratio": ratio})
    return _inconclusive(rep, ratio=ratio)


def _ratio_expansion(a, var):
    """a(n)/a(n+1) as an expansion (only when the ratio tends to 1)."""
    u = _log_ratio_diff(a, var)
    if u is None or u.has_growing():
        return None
    try:
        return exp_of(u)
    except (UnsupportedFormError, AmbiguousSignError):
        return None


def raabe_test(a, var="n") -> Verdict:
    rep = TestReport()
    ref = "R = lim n (a(n)/a(n+1) - 1): converges when R > 1, diverges when R < 1"
    D = _ratio_expansion(a, var)
    if D is None:
        rep.log("raabe", _fmt(a), "not in scope (ratio limit is not 1)", ref)
        return _inconclusive(rep)
    t = (D - Xp.const(1)).mul_mono(Mono.make(1))
    lim = _xp_limit(t)
    if lim is None:
        rep.log("raabe", _fmt(a), "Raabe limit undecidable", ref)
        return _inconclusive(rep)
    if lim[0] == "inf":
        rep.log("raabe", _fmt(a), f"R -> {'+' if lim[1] > 0 else '-'}infinity", ref)
        return Verdict(CONVERGES if lim[1] > 0 else DIVERGES, "raabe", rep,
                       {"raabe": "inf" if lim[1] > 0 else "-inf"})
    R = lim[1]
    try:
        s = _csum_cmp(R, 1)
    except AmbiguousSignError:
        rep.log("raabe", _fmt(a), "Raabe limit too close to 1", ref)
        return _inconclusive(rep, raabe=R)
    rep.log("raabe", _fmt(a), f"R -> {R!r}", ref)
    if s > 0:
        return Verdict(CONVERGES, "raabe", rep, {"raabe": R})
    if s < 0:
        return Verdict(DIVERGES, "raabe", rep, {"raabe": R})
    return _inconclusive(rep, raabe=R)


def _ruler_mono(i):
    """L_i = n * ln n * ... * ln_i n as a Mono."""
    return Mono.make(1, (1,) * i)


def generalized_ratio_test(a, m: int = 1, var="n") -> Verdict:
    """Staged ratio test against the iterated-log boundary family.

    Stage i compares a(n)/a(n+1) with 1 + 1/n + 1/(n ln n) + ... + 1/L_i,
    scaled by L_i; a positive limit converges, a negative one diverges, and
    an exact zero is resolved by peeking one stage deeper.
    """
    rep = TestReport()
    ref = ("sign of lim L_m (a(n)/a(n+1) - 1 - sum 1/L_i) decides against "
           "the family 1/L_w")
    if m < -1:
        raise ValueError("stage must be >= -1")
    if m == -1:
        v = ratio_test(a, var)
        v.deciding_test = "generalized_ratio" if v.decisive else v.deciding_test
        return v
    D = _ratio_expansion(a, var)
    if D is None:
        v = ratio_test(a, var)
        if v.decisive:
            v.deciding_test = "generalized_ratio"
            return v
        rep.log("generalized_ratio", _fmt(a), "ratio expansion unavailable", ref)
        return _inconclusive(rep)

    def stage_limit(i):
        corr = Xp.const(1)
        for j in range(i + 1):
            corr = corr + Xp.of_mono(_ruler_mono(j).pow(-1))
        return _xp_limit((D - corr).mul_mono(_ruler_mono(i)))

    lim = stage_limit(m)
    if lim is None:
        rep.log("generalized_ratio", _fmt(a), f"stage {m} limit undecidable", ref)
        return _inconclusive(rep)
    if lim[0] == "inf":
        sgn = lim[1]
    else:
        try:
            sgn = lim[1].sign()
        except AmbiguousSignError:
            rep.log("generalized_ratio", _fmt(a), f"stage {m} near-zero limit", ref)
            return _inconclusive(rep)
    aux = {"m": m, "stage_limit": None if lim[0] == "inf" else lim[1]}
    if sgn == 0:
        # exact family tie: one stage deeper tells which side of the boundary
        peek = stage_limit(m + 1)
        rep.log("generalized_ratio", _fmt(a),
                f"stage {m} limit 0; peeking stage {m + 1}", ref)
        if peek is None:
            return _inconclusive(rep, **aux)
        if peek[0] == "inf":
            sgn = peek[1]
        else:
            try:
                sgn = peek[1].sign()
            except AmbiguousSignError:
                return _inconclusive(rep, **aux)
        if sgn == 0:
            return _inconclusive(rep, **aux)
    rep.log("generalized_ratio", _fmt(a),
            f"stage {m} sign {'+' if sgn > 0 else '-'}", ref)
    return Verdict(CONVERGES if sgn > 0 else DIVERGES, "generalized_ratio",
                   rep, aux)


def nth_root_test(a, var="n") -> Verdict:
    rep = TestReport()
    ref = "converges when lim |a|^(1/n) < 1, diverges when > 1"
    got = _log_coeffs(_magnitude_expr(a), var)
    if got is None:
        rep.log("nth_root", _fmt(a), "root limit undecidable", ref)
        return _inconclusive(rep)
    coeffs, _ = got
    super_linear = [m for m in coeffs if m.cmp(Mono.make(1)) > 0]
    if super_linear:
        c = coeffs[max(super_linear, key=lambda m: m.key(8))]
        try:
            s = c.sign()
        except AmbiguousSignError:
            return _inconclusive(rep)
        rep.log("nth_root", _fmt(a),
                "root -> " + ("infinity" if s > 0 else "0"), ref)
        return Verdict(DIVERGES if s > 0 else CONVERGES, "nth_root", rep)
    c = coeffs.get(Mono.make(1))
    if c is None:
        rep.log("nth_root", _fmt(a), "root -> 1", ref)
        return _inconclusive(rep)
    k = c.exp_k()
    root = CSum.of(k) if k is not None else CSum.of(
        K.approx_only(mpmath.exp(c.approx())))
    try:
        s = _csum_cmp(root, 1)
    except AmbiguousSignError:
        return _inconclusive(rep, root=root)
    rep.log("nth_root", _fmt(a), f"root -> {root!r}", ref)
    if s < 0:
        return Verdict(CONVERGES, "nth_root", rep, {"root": root})
    if s > 0:
        return Verdict(DIVERGES, "nth_root", rep, {"root": root})
    return _inconclusive(rep, root=root)


def condensation_test(a, var="n", _depth=0) -> Verdict:
    rep = TestReport()
    ref = "sum a(n) and sum 2^n a(2^n) converge or diverge together"
    if _has_altsign(a):
        # substituting 2^n silently fixes the parity, which would turn a
        # signed sequence into its positive subsequence
        raise NotMonotonicError(f"{_fmt(a)} is not a positive sequence")
    if not _eventually_decreasing(a, var):
        raise NotMonotonicError(f"{_fmt(a)} is not certified decreasing")
    b = X.mul(X.pow_(X.Num(Fraction(2)), X.Var(var)),
              X.substitute(a, var, X.pow_(X.Num(Fraction(2)), X.Var(var))))
    rep.log("condensation", _fmt(a), _fmt(b), ref)
    inner = auto(b, var=var, _depth=_depth + 1, _no_condense=True)
    rep.extend(inner.trace)
    if inner.decisive:
        return Verdict(inner.outcome, "condensation", rep,
                       {"transformed": _fmt(b), "inner": inner.deciding_test})
    return _inconclusive(rep, transformed=_fmt(b))


def boundary_test(a, W: int = None, var="n") -> Verdict:
    """Iterated log-ruler comparison against the family 1/(n ln n ... ln_w n)."""
    if W is None:
        W = BOUNDARY_DEPTH
    rep = TestReport()
    ref = ("p_d = lim ln(1/(a L_{d-1}))/ln_{d+1}: p > 1 converges, p < 1 "
           "diverges, p = 1 descends one ruler")
    mag = _magnitude_expr(a)
    try:
        E = -expand_log(mag, var)  # ln(1/a)
    except DomainError as exc:
        raise NotEventuallyPositiveError(str(exc)) from exc
    except (UnsupportedFormError, AmbiguousSignError):
        rep.log("boundary", _fmt(a), "no log expansion")
        return _inconclusive(rep)
    for d in range(W + 1):
        ruler = Mono.make(0, (0,) * d + (1,))
        growing = [m for m in E.terms if m.is_growing]
        lead = max(growing, key=lambda m: m.key(8)) if growing else None
        if lead is None or lead.cmp(ruler) < 0:
            p = Fraction(0)
            rep.log("boundary", _fmt(a), f"depth {d}: p = 0 < 1", ref)
            return Verdict(DIVERGES, "boundary", rep,
                           {"w": max(d - 1, 0), "p": p})
        if lead.cmp(ruler) > 0:
            try:
                s = E.terms[lead].sign()
            except AmbiguousSignError:
                return _inconclusive(rep)
            rep.log("boundary", _fmt(a),
                    f"depth {d}: p -> {'+' if s > 0 else '-'}infinity", ref)
            if s > 0:
                return Verdict(CONVERGES, "boundary", rep, {"w": d, "p": "inf"})
            return Verdict(DIVERGES, "boundary", rep,
                           {"w": max(d - 1, 0), "p": "-inf"})
        c = E.terms[lead]
        try:
            s = _csum_cmp(c, 1)
        except AmbiguousSignError:
            return _inconclusive(rep)
        if s != 0:
            p = c.to_fraction()
            p_repr = p if p is not None else c
            rep.log("boundary", _fmt(a), f"depth {d}: p = {p_repr!r}", ref)
            if s > 0:
                return Verdict(CONVERGES, "boundary", rep, {"w": d, "p": p_repr})
            return Verdict(DIVERGES, "boundary", rep,
                           {"w": max(d - 1, 0), "p": p_repr})
        rep.log("boundary", _fmt(a), f"depth {d}: p = 1, descend", ref)
        E = E - Xp.of_mono(ruler)
    rep.log("boundary", _fmt(a), f"ruler depth {W} exhausted", ref)
    return _inconclusive(rep)


def alternating_test(a, var="n") -> Verdict:
    rep = TestReport()
    ref = ("an alternating series with terms decreasing to zero converges; "
           "with terms not tending to zero it diverges")
    sign_part, body = _split_altsign(a)
    if sign_part is None:
        rep.log("alternating", _fmt(a), "no alternating factor")
        return _inconclusive(rep)
    lim = _limit_magnitude(body, var)
    if lim is not None and lim[0] != "zero":
        rep.log("alternating", _fmt(a), "terms do not tend to 0", ref)
        return Verdict(DIVERGES, "alternating", rep)
    if not _has_altsign(body) and lim is not None and lim[0] == "zero" \
            and _eventually_decreasing(body, var):
        rep.log("alternating", _fmt(a), "terms decrease to 0", ref)
        return Verdict(CONVERGES, "alternating", rep)
    # hand off: regroup consecutive terms in blocks of two
    from .rearrange import block
    try:
        blocked = block(a, 2, var=var)
    except (UnsupportedFormError, DomainError, AmbiguousSignError):
        rep.log("alternating", _fmt(a), "block regrouping unavailable")
        return _inconclusive(rep)
    rep.log("alternating", _fmt(a), f"regrouped in pairs: {_fmt(blocked)}",
            "contiguous regrouping preserves the convergence class")
    inner = auto(blocked, var=var, _depth=1)
    rep.extend(inner.trace)
    if inner.decisive:
        return Verdict(inner.outcome, "alternating", rep,
                       {"blocked": _fmt(blocked)})
    return _inconclusive(rep, blocked=_fmt(blocked))


def _split_altsign(a):
    """(alternating factor, cofactor) or (None, a)."""
    if isinstance(a, X.AltSign):
        return a, X.Num(Fraction(1))
    if isinstance(a, X.Mul):
        alts = [f for f in a.args if isinstance(f, X.AltSign)]
        rest = [f for f in a.args if not isinstance(f, X.AltSign)]
        if len(alts) == 1:
            return alts[0], X.mul(*rest) if rest else X.Num(Fraction(1))
    return None, a


def cauchy_window_test(a, n: int, precision: int = 256, var="n"):
    """(window value s_{2^n} - s_{2^(n-1)}, advisory verdict)."""
    from .oracle import cauchy_window
    rep = TestReport()
    ref = "partial sums converge iff consecutive dyadic windows tend to zero"
    windows = [cauchy_window(a, k, precision=precision, var=var)
               for k in range(max(2, n - 2), n + 1)]
    w = windows[-1]
    mags = [abs(v) for v in windows]
    decaying = all(b < a_ * mpmath.mpf("0.75") for a_, b in zip(mags, mags[1:]))
    rep.log("cauchy_window", _fmt(a),
            f"window(2^{n}) = {mpmath.nstr(w, 10)}", ref)
    if decaying:
        return w, Verdict(CONVERGES, "cauchy_window", rep,
                          {"advisory": True, "windows": [float(m) for m in mags]})
    bounded_away = all(m > mpmath.mpf("1e-6") for m in mags)
    if bounded_away:
        return w, Verdict(DIVERGES, "cauchy_window", rep,
                          {"advisory": True, "windows": [float(m) for m in mags]})
    return w, _inconclusive(rep, advisory=True,
                            windows=[float(m) for m in mags])


def exp_test(a, var="n") -> Verdict:
    rep = TestReport()
    ref = "sum 1/e^f converges when ln n grows strictly slower than f"
    if not (isinstance(a, X.Pow) and isinstance(a.base, X.Const)
            and a.base.name == "e"):
        rep.log("exp_test", _fmt(a), "not of the form 1/exp(f)")
        return _inconclusive(rep)
    f = X.mul(X.Num(Fraction(-1)), a.exp)
    lim = _limit_magnitude(f, var)
    sign, pos = split_sign(f)
    if sign <= 0 or lim is None or lim[0] != "inf":
        rep.log("exp_test", _fmt(a), "exponent does not tend to +infinity")
        return _inconclusive(rep)
    rel = compare(X.lnk(1, X.Var(var)), pos, var)
    rep.log("exp_test", _fmt(a), f"compare(ln n, f) = {rel!r}", ref)
    if rel.kind is RelKind.MUCH_LESS:
        return Verdict(CONVERGES, "exp_test", rep, {"f": _fmt(pos)})
    return _inconclusive(rep)


def _lhopital_guard(a, var):
    """Depth w when a is asymptotically ln_{w+1} n / (n ln n ... ln_w n)."""
    got = _log_coeffs(a, var)
    if got is None:
        return None
    coeffs, _ = got
    axes = _pure_log_axes(coeffs)
    if axes is None or not axes:
        return None
    ks = sorted(axes)
    t = 0
    while t < len(ks) and ks[t] == t + 1 and axes[ks[t]] == -1:
        t += 1
    if t == 0:
        return None
    if ks[t:] == [t + 1] and axes[t + 1] == 1:
        return t - 1
    return None


def lhopital_test(a, var="n", _depth=0) -> Verdict:
    """Replace an indeterminate quotient by the quotient of derivatives."""
    rep = TestReport()
    ref = "for indeterminate f/g the class of sum f/g follows sum f'/g'"
    w = _lhopital_guard(a, var)
    if w is not None:
        rep.log("lhopital", _fmt(a),
                f"guard: asymptotically ln_{w + 1}(n) x boundary family w={w}",
                "derivative quotients misclassify the family "
                "ln_{w+1} n / (n ln n ... ln_w n); it must diverge by "
                "comparison with 1/(n ln n ... ln_w n)")
        bench = X.Var(var)
        for k in range(1, w + 1):
            bench = X.mul(bench, X.lnk(k, X.Var(var)))
        bench = X.pow_(bench, X.Num(Fraction(-1)))
        inner = generalized_p_series_test(bench, var)
        rep.extend(inner.trace)
        if inner.outcome == DIVERGES:
            return Verdict(DIVERGES, "lhopital_guard", rep,
                           {"w": w, "benchmark": _fmt(bench)})
        raise GuardTriggeredError(f"{_fmt(a)} matches the counterexample family")
    num, den = _split_quotient(a)
    if den is None:
        raise NotIndeterminateError(f"{_fmt(a)} is not a quotient")
    ln_, ld = _limit_magnitude(num, var), _limit_magnitude(den, var)
    if ln_ is None or ld is None or ln_[0] != ld[0] or ln_[0] == "finite":
        raise NotIndeterminateError(
            f"{_fmt(num)} / {_fmt(den)} is not an indeterminate form")
    if _depth >= 4:
        rep.log("lhopital", _fmt(a), "derivative depth limit reached")
        return _inconclusive(rep)
    try:
        dn = difference_derivative(num, var)
        dd = difference_derivative(den, var)
    except (ConstantSequenceError, UnsupportedFormError) as exc:
        raise NotIndeterminateError(str(exc)) from exc
    nxt = X.mul(dn, X.pow_(dd, X.Num(Fraction(-1))))
    rep.log("lhopital", _fmt(a), _fmt(nxt), ref)
    inner = auto(nxt, var=var, _depth=_depth + 1)
    rep.extend(inner.trace)
    if inner.decisive:
        return Verdict(inner.outcome, "lhopital", rep, {"reduced": _fmt(nxt)})
    return _inconclusive(rep, reduced=_fmt(nxt))


def _negated_exponent(e):
    """-e when the exponent has a negative rational coefficient, else None."""
    if isinstance(e, X.Mul):
        nums = [f for f in e.args if isinstance(f, X.Num)]
        if nums and nums[0].val < 0:
            return X.mul(X.Num(Fraction(-1)), e)
    return None


def _split_quotient(a):
    """(numerator, denominator) when a contains inverted factors."""
    factors = list(a.args) if isinstance(a, X.Mul) else [a]
    num, den = [], []
    for f in factors:
        if isinstance(f, X.Pow) and isinstance(f.exp, X.Num) and f.exp.val < 0:
            den.append(X.pow_(f.base, X.Num(-f.exp.val)))
        elif isinstance(f, X.Pow) and _negated_exponent(f.exp) is not None:
            den.append(X.pow_(f.base, _negated_exponent(f.exp)))
        else:
            num.append(f)
    if not den:
        return a, None
    return (X.mul(*num) if num else X.Num(Fraction(1)), X.mul(*den))


def limit_comparison(a, b, var="n") -> Verdict:
    rep = TestReport()
    ref = ("when a/b tends to a finite nonzero constant, both series share "
           "one convergence class")
    rel = compare(_magnitude_expr(a), _magnitude_expr(b), var)
    if rel.kind is not RelKind.COMPARABLE_EQUAL:
        raise NotComparableEqualError(
            f"{_fmt(a)} and {_fmt(b)} are not comparable-equal ({rel!r})")
    inner = auto(b, var=var, _depth=1)
    rep.log("limit_comparison", f"{_fmt(a)} vs {_fmt(b)}",
            f"ratio constant {rel.constant!r}", ref)
    rep.extend(inner.trace)
    if inner.decisive:
        return Verdict(inner.outcome, "limit_comparison", rep,
                       {"constant": rel.constant, "benchmark": _fmt(b)})
    return _inconclusive(rep, constant=rel.constant)


def slower_divergent(a, var="n"):
    """A decaying b with sum a*b still divergent (b = 1/ln_{w+1} n)."""
    v = boundary_test(a, var=var)
    if v.outcome != DIVERGES:
        raise PreconditionFailure(
            f"slower_divergent needs a divergent input, got {v.outcome}")
    w = v.auxiliary["w"]
    b = X.pow_(X.lnk(w + 1, X.Var(var)), X.Num(Fraction(-1)))
    check = boundary_test(X.mul(a, b), var=var)
    if check.outcome != DIVERGES:
        raise PreconditionFailure("slower_divergent re-verification failed")
    return b


def slower_convergent(a, var="n"):
    """An unbounded b with sum a*b still convergent (b = ln_{w+1} n)."""
    v = boundary_test(a, var=var)
    if v.outcome != CONVERGES:
        raise PreconditionFailure(
            f"slower_convergent needs a convergent input, got {v.outcome}")
    w = v.auxiliary["w"]
    b = X.lnk(w + 1, X.Var(var))
    check = boundary_test(X.mul(a, b), var=var)
    if check.outcome != CONVERGES:
        raise PreconditionFailure("slower_convergent re-verification failed")
    return b


class PreconditionFailure(ValueError):
    pass


# --------------------------------------------------------------------------
# pipeline

def auto(a, var="n", _depth=0, _no_condense=False) -> Verdict:
    """Run the battery in decisive-first order; first decisive verdict wins."""
    rep = TestReport()
    if _depth > 3:
        return _inconclusive(rep)
    work = a
    if _has_altsign(work):
        # route sign-alternating terms untouched: dominant-term algebra is
        # not sound for conditionally convergent forms
        v = alternating_test(work, var)
        rep.extend(v.trace)
        return Verdict(v.outcome, v.deciding_test, rep, v.auxiliary)
    try:
        stripped = strip_bounded_factor(work, var)
        if stripped != work:
            rep.log("strip_bounded_factor", _fmt(work), _fmt(stripped),
                    "a factor bounded in (0, inf) cannot change the verdict")
            work = stripped
    except NotBoundedAwayFromZeroError as exc:
        rep.log("strip_bounded_factor", _fmt(work), f"refused: {exc}")
    try:
        simple = simplify_dominant(work, var=var)
        if simple != work:
            rep.log("simplify_dominant", _fmt(work), _fmt(simple),
                    "only the asymptotically dominant part decides the sum")
            work = simple
    except (NotEventuallyPositiveError, UnsupportedFormError,
            AmbiguousSignError):
        pass

    if _has_altsign(work):
        v = alternating_test(work, var)
        rep.extend(v.trace)
        return Verdict(v.outcome, v.deciding_test, rep, v.auxiliary)

    sign, pos = split_sign(work)
    if sign == 0:
        rep.log("normalize", _fmt(work), "identically zero terms")
        return Verdict(CONVERGES, "nth_term", rep)
    if sign < 0:
        rep.log("normalize", _fmt(work), _fmt(pos),
                "a global sign flip does not change the convergence class")
        work = pos

    stages = [
        lambda: nth_term_test(work, var),
        lambda: p_series_test(work, var),
        lambda: generalized_p_series_test(work, var),
        lambda: ratio_test(work, var),
        lambda: raabe_test(work, var),
    ]
    stages += [
        (lambda m=m: generalized_ratio_test(work, m, var)) for m in (1, 2, 3)
    ]
    stages.append(lambda: boundary_test(work, var=var))
    for stage in stages:
        try:
            v = stage()
        except (NotEventuallyPositiveError, UnsupportedFormError,
                AmbiguousSignError, DomainError):
            continue
        rep.extend(v.trace)
        if v.decisive:
            return Verdict(v.outcome, v.deciding_test, rep, v.auxiliary)
    if not _no_condense and _depth == 0:
        try:
            v = condensation_test(work, var, _depth=_depth)
            rep.extend(v.trace)
            if v.decisive:
                return Verdict(v.outcome, v.deciding_test, rep, v.auxiliary)
        except (NotMonotonicError, UnsupportedFormError, DomainError,
                AmbiguousSignError):
            pass
    if _depth == 0:
        try:
            from .oracle import empirical_verdict
            hint = empirical_verdict(work, var=var)
            rep.log("numeric_advisory", _fmt(work), hint,
                    "numeric sampling only; never overrides a symbolic verdict")
            return _inconclusive(rep, advisory=hint)
        except Exception:
            pass
    return _inconclusive(rep)
