"""Radius and interval of convergence for sum a_n (x - c)^n.

The radius comes from the per-index growth rate b = lim |a_n|^{1/n},
computed on the log expansion of |a_n| scaled by 1/n; sub-linear power axes
n^q (0 < q < 1) fold their coefficients into the linear axis weighted by q,
which preserves the root-scale information that a plain limit would send to
1 (e.g. 3^sqrt(n)/n yields radius 3^{-1/2}).

Endpoints are judged by absolute convergence, so both bracket flags follow
from one magnitude-series verdict per endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import expr as X
from .errors import DomainError, UnsupportedFormError
from .exactnum import CSum, K
from .expansion import Mono, expand_log
from .tests import CONVERGES, TestReport, Verdict, _magnitude_expr, auto

__all__ = ["RadiusResult", "radius", "interval", "termwise_radius_invariance"]


def _k_to_expr(k: K):
    """Render an exact positive K constant as an expression."""
    if k.sign <= 0 or not k.is_exact:
        return None
    out = []
    if k.r != 0:
        out.append(X.pow_(X.E, X.Num(k.r)))
    for a, m in sorted(k.atoms, key=str):
        if isinstance(a, tuple):
            return None
        base = X.PI if a == "pi" else X.Num(Fraction(a))
        out.append(X.pow_(base, X.Num(m)))
    return X.mul(*out) if out else X.Num(Fraction(1))


@dataclass
class RadiusResult:
    radius: object            # Expr, or the strings "inf" / "0"
    exact: bool
    approx: object            # mpf (None for infinite radius)
    center: Fraction = Fraction(0)
    endpoint_left: Verdict = None
    endpoint_right: Verdict = None
    left_closed: bool = False
    right_closed: bool = False

    def interval_text(self):
        if self.radius == "inf":
            return "(-inf, inf)"
        if self.radius == "0":
            return f"{{{self.center}}}"
        lo = X.format_expr(X.add(X.Num(self.center),
                                 X.neg(self.radius)))
        hi = X.format_expr(X.add(X.Num(self.center), self.radius))
        return f"{'[' if self.left_closed else '('}{lo}, {hi}" \
            f"{']' if self.right_closed else ')'}"


def _growth_constant(a, var="n"):
    """lim (ln |a_n|)/n as a CSum, or ('inf', sign) when super-linear."""
    E = expand_log(_magnitude_expr(a), var)
    total = CSum.zero()
    for m, c in E.terms.items():
        if m.q > 1 or (m.q == 1 and any(r > 0 for r in m.logs)):
            return ("inf", c.sign())
        if m.q == 1 and not any(r != 0 for r in m.logs):
            total = total + c
        elif 0 < m.q < 1:
            # fold a sub-linear power axis: its root-scale contribution to
            # |a_n|^{1/n} survives as the q-weighted coefficient
            total = total + c.scale(m.q)
        # ln_k axes and constants contribute nothing to the n-th root
    return ("finite", total)


def radius(a, var: str = "n") -> RadiusResult:
    """Radius of convergence of sum a_n x^n as 1/lim |a_n|^{1/n}."""
    try:
        kind = _growth_constant(a, var)
    except (DomainError, UnsupportedFormError) as exc:
        raise UnsupportedFormError(
            f"no radius for {X.format_expr(a)}: {exc}") from exc
    if kind[0] == "inf":
        if kind[1] > 0:
            return RadiusResult("0", True, mpmath.mpf(0))
        return RadiusResult("inf", True, None)
    c = kind[1]
    b = c.exp_k()  # lim |a_n|^{1/n}
    if b is None:
        b = K.approx_only(mpmath.exp(c.approx()))
    if b.sign == 0:
        return RadiusResult("inf", True, None)
    r = b.inverse()
    expr = _k_to_expr(r)
    if expr is not None:
        return RadiusResult(expr, True, r.approx())
    return RadiusResult(None, False, r.approx())


def interval(a, center=Fraction(0), var: str = "n") -> RadiusResult:
    """Full interval of convergence; endpoints judged by absolute
    convergence of a_n r^n."""
    res = radius(a, var)
    res.center = Fraction(center)
    if res.radius in ("inf", "0") or not res.exact:
        return res
    term = X.mul(_magnitude_expr(a), X.pow_(res.radius, X.Var(var)))
    v = auto(term, var=var)
    res.endpoint_left = v
    res.endpoint_right = v
    res.left_closed = v.outcome == CONVERGES
    res.right_closed = v.outcome == CONVERGES
    return res


def termwise_radius_invariance(a, var: str = "n") -> bool:
    """Differentiation/integration leave the radius unchanged: radius of
    n*a_n, a_n, and a_n/(n+1) must agree exactly."""
    base = radius(a, var)
    up = radius(X.mul(X.Var(var), a), var)
    down = radius(X.mul(a, X.pow_(X.add(X.Var(var), X.Num(Fraction(1))),
                                  X.Num(Fraction(-1)))), var)
    vals = [base, up, down]
    if any(not v.exact for v in vals):
        return False
    reprs = {("inf" if v.radius == "inf" else "0" if v.radius == "0"
              else X.format_expr(v.radius)) for v in vals}
    return len(reprs) == 1
