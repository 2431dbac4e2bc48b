"""Asymptotic expansions over the iterated-log monomial lattice.

A :class:`Mono` is ``n^q * prod_k (ln_k n)^{r_k}`` with rational exponents;
an :class:`Xp` is a finite sum of monomials with :class:`~.exactnum.CSum`
coefficients plus a ``truncated`` flag recording that decaying tail terms
were dropped. Two entry points walk the expression tree:

* :func:`expand_value` — expansion of ``f(n)`` itself (fails for
  super-polynomial factors like ``2^n`` or ``n!``);
* :func:`expand_log` — expansion of ``ln f(n)``, which stays in the lattice
  for the whole exp-log class (Stirling handles factorials).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from . import expr as X
from .errors import AmbiguousSignError, DomainError, UnsupportedFormError
from .exactnum import CSum, K

__all__ = ["Mono", "Xp", "expand_value", "expand_log", "log_of", "exp_of"]

N_DECAY = 12   # decaying monomials retained per expansion
N_SERIES = 8   # truncation order for log1p/exp/binomial tails
MAX_TERMS = 60


@dataclass(frozen=True)
class Mono:
    """n^q * (ln n)^{logs[0]} * (ln ln n)^{logs[1]} * ..."""

    q: Fraction
    logs: tuple = ()

    @staticmethod
    def make(q, logs=()):
        logs = tuple(Fraction(r) for r in logs)
        while logs and logs[-1] == 0:
            logs = logs[:-1]
        return Mono(Fraction(q), logs)

    def key(self, width):
        pad = self.logs + (Fraction(0),) * (width - len(self.logs))
        return (self.q,) + pad

    def cmp(self, other) -> int:
        w = max(len(self.logs), len(other.logs))
        a, b = self.key(w), other.key(w)
        return (a > b) - (a < b)

    @property
    def is_const(self):
        return self.q == 0 and not self.logs

    @property
    def is_growing(self):
        return self.cmp(CONST_MONO) > 0

    @property
    def is_decaying(self):
        return self.cmp(CONST_MONO) < 0

    def mul(self, other) -> "Mono":
        w = max(len(self.logs), len(other.logs))
        logs = tuple(a + b for a, b in zip(self.key(w)[1:], other.key(w)[1:]))
        return Mono.make(self.q + other.q, logs)

    def pow(self, q) -> "Mono":
        q = Fraction(q)
        return Mono.make(self.q * q, tuple(r * q for r in self.logs))

    def approx_at(self, n):
        v = mpmath.mpf(f"{self.q.numerator}/{self.q.denominator}") * mpmath.log(n)
        x = mpmath.log(n)
        for r in self.logs:
            v += mpmath.mpf(f"{r.numerator}/{r.denominator}") * mpmath.log(x)
            x = mpmath.log(x)
        return mpmath.exp(v)

    def __repr__(self):
        bits = []
        if self.q:
            bits.append(f"n^{self.q}" if self.q != 1 else "n")
        for k, r in enumerate(self.logs, start=1):
            if r:
                name = "ln" + ("" if k == 1 else str(k))
                bits.append(f"{name}^{r}" if r != 1 else name)
        return "*".join(bits) if bits else "1"


CONST_MONO = Mono(Fraction(0), ())


class Xp:
    """Finite asymptotic expansion: {Mono: CSum} plus a truncation flag."""

    __slots__ = ("terms", "truncated")

    def __init__(self, terms=None, truncated=False):
        self.terms = {}
        if terms:
            for m, c in terms.items():
                c = CSum.of(c)
                if not c.is_zero:
                    self.terms[m] = c
        self.truncated = truncated
        self._prune()

    def _prune(self):
        monos = sorted(self.terms, key=_mono_sort_key, reverse=True)
        keep, decay_seen = [], 0
        for m in monos:
            if m.is_decaying:
                decay_seen += 1
                if decay_seen > N_DECAY:
                    self.truncated = True
                    continue
            keep.append(m)
        if len(keep) > MAX_TERMS:
            self.truncated = True
            keep = keep[:MAX_TERMS]
        self.terms = {m: self.terms[m] for m in keep}

    # -- constructors ---------------------------------------------------
    @staticmethod
    def const(c) -> "Xp":
        return Xp({CONST_MONO: CSum.of(c)})

    @staticmethod
    def of_mono(m: Mono, coeff=1) -> "Xp":
        return Xp({m: CSum.of(coeff)})

    zero = staticmethod(lambda: Xp({}))

    # -- queries ----------------------------------------------------------
    @property
    def is_zero(self):
        return not self.terms

    def leading(self):
        """(Mono, CSum) of the fastest-growing term, or None."""
        if not self.terms:
            return None
        m = max(self.terms, key=_mono_sort_key)
        return m, self.terms[m]

    def const_coeff(self) -> CSum:
        return self.terms.get(CONST_MONO, CSum.zero())

    def split(self):
        """(growing Xp, constant CSum, decaying Xp); flags land on the parts."""
        g = {m: c for m, c in self.terms.items() if m.is_growing}
        d = {m: c for m, c in self.terms.items() if m.is_decaying}
        return (Xp(g), self.const_coeff(), Xp(d, truncated=self.truncated))

    def has_growing(self):
        return any(m.is_growing for m in self.terms)

    def approx_at(self, n):
        with mp.workprec(200):
            return mpmath.fsum(c.approx() * m.approx_at(n)
                               for m, c in self.terms.items())

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Xp":
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t[m] + c if m in t else c
        return Xp(t, self.truncated or other.truncated)

    def __neg__(self):
        return Xp({m: -c for m, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Xp":
        c = CSum.of(c)
        if c.is_zero:
            return Xp({}, self.truncated)
        return Xp({m: co * c for m, co in self.terms.items()}, self.truncated)

    def __mul__(self, other) -> "Xp":
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1.mul(m2)
                c = c1 * c2
                t[m] = t[m] + c if m in t else c
        return Xp(t, self.truncated or other.truncated)

    def mul_mono(self, m: Mono) -> "Xp":
        return Xp({mm.mul(m): c for mm, c in self.terms.items()}, self.truncated)

    def pow_frac(self, q) -> "Xp":
        q = Fraction(q)
        if q == 0:
            return Xp.const(1)
        if self.is_zero:
            if q > 0:
                return Xp({})
            raise DomainError("negative power of an identically zero expansion")
        if len(self.terms) == 1 and q.denominator == 1 and q < 0:
            (m, c), = self.terms.items()
            return Xp({m.pow(q): CSum.of(c.as_single_k().pow(q))}, self.truncated)
        m0, c0 = self.leading()
        if q.denominator > 1 and c0.sign() < 0:
            raise DomainError("fractional power of a negative leading term")
        head = CSum.of(c0.as_single_k().pow(q))
        u = self._reduced(m0, c0)
        return _binom_series(u, q).mul_mono(m0.pow(q)).scale(head)

    def _reduced(self, m0, c0) -> "Xp":
        """self / (c0 * m0) - 1 : a strictly decaying remainder."""
        inv = c0.as_single_k().inverse()
        rest = Xp({m: c for m, c in self.terms.items() if m != m0},
                  self.truncated)
        u = rest.mul_mono(m0.pow(-1)).scale(inv)
        extra = self.terms[m0] * CSum.of(inv) - CSum.one()
        if not extra.is_zero:
            u = u + Xp.const(extra)
        if u.has_growing():
            raise UnsupportedFormError("non-dominant leading term in expansion")
        return u

    def __repr__(self):
        if not self.terms:
            return "Xp(0)" + ("~" if self.truncated else "")
        items = sorted(self.terms.items(), key=lambda kv: _mono_sort_key(kv[0]),
                       reverse=True)
        s = " + ".join(f"[{c!r}]*{m!r}" for m, c in items)
        return f"Xp({s})" + ("~" if self.truncated else "")


def _mono_sort_key(m: Mono):
    return m.key(8)


# -- truncated power series ----------------------------------------------

def _series(u: Xp, coeffs) -> Xp:
    """sum_j coeffs[j] * u^j for a decaying u; flags truncation."""
    if u.has_growing() or not u.const_coeff().is_zero:
        raise UnsupportedFormError("series argument is not infinitesimal")
    out = Xp.const(coeffs[0]) if coeffs[0] else Xp({})
    p = Xp.const(1)
    for c in coeffs[1:]:
        p = p * u
        if p.is_zero and not p.truncated:
            return Xp(out.terms, out.truncated or u.truncated)
        if c:
            out = out + p.scale(c)
    out.truncated = out.truncated or not u.is_zero
    return out


def log1p_series(u: Xp) -> Xp:
    return _series(u, [Fraction(0)] + [Fraction((-1) ** (j + 1), j)
                                       for j in range(1, N_SERIES + 1)])


def exp_small(u: Xp) -> Xp:
    from math import factorial
    return _series(u, [Fraction(1, factorial(j)) for j in range(N_SERIES + 1)])


def _binom_series(u: Xp, q: Fraction) -> Xp:
    coeffs, c = [Fraction(1)], Fraction(1)
    for j in range(1, N_SERIES + 1):
        c = c * (q - (j - 1)) / j
        coeffs.append(c)
    return _series(u, coeffs)


def _mono_log(m: Mono) -> Xp:
    """Expansion of ln(m): q*ln n + sum r_k * ln_{k+1} n."""
    t = {}
    if m.q:
        t[Mono.make(0, (1,))] = CSum.of(m.q)
    for k, r in enumerate(m.logs, start=1):
        if r:
            mm = Mono.make(0, (0,) * k + (1,))
            t[mm] = t.get(mm, CSum.zero()) + CSum.of(r)
    return Xp(t)


def _ln_const(c: CSum) -> CSum:
    terms = c.ln_terms()
    if terms is not None:
        return CSum(terms)
    with mp.workprec(200):
        v = c.approx()
    if v <= 0:
        raise DomainError("log of a nonpositive constant")
    return CSum.of(K.approx_only(mpmath.log(v)))


def log_of(t: Xp) -> Xp:
    """Expansion of ln(t) for an eventually positive t."""
    lead = t.leading()
    if lead is None:
        raise DomainError("log of an identically zero expansion")
    m0, c0 = lead
    if c0.sign() < 0:
        raise DomainError("log of an eventually negative expression")
    u = t._reduced(m0, c0)
    out = _mono_log(m0) + log1p_series(u)
    lc = _ln_const(c0)
    if not lc.is_zero:
        out = out + Xp.const(lc)
    out.truncated = out.truncated or t.truncated
    return out


def exp_of(e: Xp) -> Xp:
    """Expansion of exp(e) when e has no growing part."""
    if e.has_growing():
        raise UnsupportedFormError("exp of an unbounded exponent leaves the lattice")
    _, c, d = e.split()
    k = c.exp_k()
    head = CSum.of(k) if k is not None else CSum.of(
        K.approx_only(mpmath.exp(c.approx())))
    return exp_small(d).scale(head)


# -- expression tree walkers -----------------------------------------------

_LN_2PI = CSum([K.atom(("log", 2)), K.atom(("log", "pi"))])


def split_sign(e):
    """(sign, positive part) peeling a rational coefficient off a product."""
    if isinstance(e, X.Num):
        if e.val == 0:
            return 0, X.Num(Fraction(0))
        if e.val < 0:
            return -1, X.Num(-e.val)
        return 1, e
    if isinstance(e, X.Mul):
        sign, parts = 1, []
        for a in e.args:
            s, p = split_sign(a)
            sign *= s
            if not (isinstance(p, X.Num) and p.val == 1):
                parts.append(p)
        return sign, X.mul(*parts) if parts else X.Num(Fraction(1))
    return 1, e


def expand_value(e, var="n", depth=0) -> Xp:
    """Expansion of e(n) itself; UnsupportedFormError outside the lattice."""
    if depth > 40:
        raise UnsupportedFormError("expansion recursion limit exceeded")
    if isinstance(e, X.Num):
        if e.val == 0:
            return Xp({})
        return Xp.const(K.from_fraction(e.val))
    if isinstance(e, X.Const):
        return Xp.const(K(1, Fraction(1)) if e.name == "e" else K.atom("pi"))
    if isinstance(e, X.Var):
        if e.name != var:
            raise UnsupportedFormError(f"free symbol {e.name!r} in expansion")
        return Xp.of_mono(Mono.make(1))
    if isinstance(e, X.Add):
        out = Xp({})
        for a in e.args:
            out = out + expand_value(a, var, depth + 1)
        return out
    if isinstance(e, X.Mul):
        out = Xp.const(1)
        for a in e.args:
            out = out * expand_value(a, var, depth + 1)
        return out
    if isinstance(e, X.Pow):
        if isinstance(e.exp, X.Num):
            return expand_value(e.base, var, depth + 1).pow_frac(e.exp.val)
        # general exponent: go through the log domain and come back
        L = expand_log(e, var, depth + 1)
        return exp_of(L)
    if isinstance(e, X.LnK):
        if isinstance(e.arg, X.Var) and e.arg.name == var:
            return Xp.of_mono(Mono.make(0, (0,) * (e.depth - 1) + (1,)))
        inner = e.arg if e.depth == 1 else X.LnK(e.depth - 1, e.arg)
        return expand_log(inner, var, depth + 1)
    if isinstance(e, X.Abs):
        t = expand_value(e.arg, var, depth + 1)
        lead = t.leading()
        if lead is None:
            return t
        return t if lead[1].sign() >= 0 else -t
    raise UnsupportedFormError(
        f"{type(e).__name__} has no value-domain expansion")


def expand_log(e, var="n", depth=0) -> Xp:
    """Expansion of ln(e(n)) for eventually positive e."""
    if depth > 40:
        raise UnsupportedFormError("expansion recursion limit exceeded")
    if isinstance(e, X.Num):
        if e.val <= 0:
            raise DomainError("log of a nonpositive constant")
        return Xp.const(CSum(K.from_fraction(e.val).ln_terms()))
    if isinstance(e, X.Const):
        if e.name == "e":
            return Xp.const(1)
        return Xp.const(K.atom(("log", "pi")))
    if isinstance(e, X.Var):
        if e.name != var:
            raise UnsupportedFormError(f"free symbol {e.name!r} in expansion")
        return Xp.of_mono(Mono.make(0, (1,)))
    if isinstance(e, X.Mul):
        out = Xp({})
        for a in e.args:
            out = out + expand_log(a, var, depth + 1)
        return out
    if isinstance(e, X.Pow):
        return expand_value(e.exp, var, depth + 1) * expand_log(
            e.base, var, depth + 1)
    if isinstance(e, X.Factorial):
        return _stirling(expand_value(e.arg, var, depth + 1))
    if isinstance(e, X.Add):
        try:
            return log_of(expand_value(e, var, depth + 1))
        except UnsupportedFormError:
            return _log_of_sum(e, var, depth + 1)
    # LnK, Abs, lone Num-powers: fall back through the value domain
    return log_of(expand_value(e, var, depth + 1))


def _stirling(H: Xp) -> Xp:
    """ln(H!) = H ln H - H + (1/2) ln H + (1/2) ln(2 pi) + 1/(12H) + ..."""
    lead = H.leading()
    if lead is None or not lead[0].is_growing or lead[1].sign() < 0:
        raise UnsupportedFormError("factorial of a non-growing argument")
    lnH = log_of(H)
    out = (H * lnH) - H + lnH.scale(Fraction(1, 2)) \
        + Xp.const(_LN_2PI.scale(Fraction(1, 2))) \
        + H.pow_frac(-1).scale(Fraction(1, 12))
    out.truncated = True
    return out


def _log_of_sum(e, var, depth) -> Xp:
    """ln(sum t_i) when some t_i leave the value lattice: factor the dominant."""
    items = []
    for a in e.args:
        sign, pos = split_sign(a)
        if sign == 0:
            continue
        items.append((sign, expand_log(pos, var, depth + 1)))
    if not items:
        raise DomainError("log of an identically zero sum")
    dom = 0
    for i in range(1, len(items)):
        d = items[i][1] - items[dom][1]
        lead = d.leading()
        if lead is not None and lead[0].is_growing and lead[1].sign() > 0:
            dom = i
    total = Xp({})
    for sign, Ei in items:
        diff = Ei - items[dom][1]
        if diff.has_growing():
            lead = diff.leading()
            if lead[0].is_growing and lead[1].sign() > 0:
                raise UnsupportedFormError("dominant-term selection failed")
            # vanishes faster than every lattice monomial; drop the term
            total.truncated = True
        else:
            total = total + exp_of(diff).scale(Fraction(sign))
    if total.is_zero:
        raise AmbiguousSignError(
            "complete cancellation among dominant terms")
    return items[dom][1] + log_of(total)
