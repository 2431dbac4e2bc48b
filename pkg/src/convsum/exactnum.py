"""Exact constants for asymptotic coefficients.

Two layers:

* :class:`K` — a single multiplicative constant ``sign * e^r * prod(atom^m)``
  where atoms are primes, ``pi`` and logs of those. Closed under
  multiplication, division and rational powers. Falls back to a tracked
  high-precision approximation when exactness is lost.
* :class:`CSum` — a formal sum of :class:`K` terms (e.g. ``1 - 2*ln(2)``),
  the coefficient type of asymptotic expansions. Terms whose ratio is
  rational merge, so structural cancellation yields an exact zero.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import AmbiguousSignError

__all__ = ["K", "CSum"]

APPROX_PREC = 240
_AMBIG_EPS = mpmath.mpf(2) ** -160

# atom: int prime p, "pi", or ("log", p | "pi")


_FACTOR_LIMIT = 10_000  # trial-division cap; larger cofactors stay opaque


@functools.lru_cache(maxsize=4096)
def _factor(n: int):
    """Factorization as {factor: exponent}; n >= 1.

    Factors below _FACTOR_LIMIT are prime. A leftover cofactor above the
    cap is kept whole: exact arithmetic only needs a consistent
    decomposition, not primality, and unbounded trial division would
    stall on large coefficients.
    """
    out = {}
    d = 2
    while d * d <= n and d <= _FACTOR_LIMIT:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _atom_value(a):
    if a == "pi":
        return +mpmath.pi
    if isinstance(a, tuple):
        return mpmath.log(_atom_value(a[1]))
    return mpmath.mpf(a)


class K:
    """One exact (or tracked-approximate) constant."""

    __slots__ = ("sign", "r", "atoms", "_approx")

    def __init__(self, sign, r=Fraction(0), atoms=(), approx=None):
        self.sign = sign
        self.r = Fraction(r)
        self.atoms = frozenset((a, m) for a, m in dict(atoms).items() if m != 0) \
            if not isinstance(atoms, frozenset) else atoms
        self._approx = approx  # set => inexact

    # -- construction -------------------------------------------------
    @staticmethod
    def from_fraction(q) -> "K":
        q = Fraction(q)
        if q == 0:
            return K(0)
        atoms = {}
        for p, m in _factor(abs(q.numerator)).items():
            atoms[p] = atoms.get(p, 0) + Fraction(m)
        for p, m in _factor(q.denominator).items():
            atoms[p] = atoms.get(p, 0) - Fraction(m)
        return K(1 if q > 0 else -1, Fraction(0), atoms)

    @staticmethod
    def one() -> "K":
        return K(1)

    @staticmethod
    def zero() -> "K":
        return K(0)

    @staticmethod
    def atom(a, m=Fraction(1)) -> "K":
        return K(1, Fraction(0), {a: Fraction(m)})

    @staticmethod
    def ln_of_int(n: int) -> "list[K]":
        """ln(n) for a positive integer, as a list of exact terms."""
        out = []
        for p, m in _factor(n).items():
            out.append(K.from_fraction(m) * K.atom(("log", p)))
        return out

    @staticmethod
    def approx_only(value) -> "K":
        v = mpmath.mpf(value)
        if v == 0:
            return K(0)
        return K(1 if v > 0 else -1, approx=abs(v))

    # -- queries ------------------------------------------------------
    @property
    def is_exact(self):
        return self._approx is None

    def approx(self):
        """High-precision magnitude-with-sign approximation."""
        if self.sign == 0:
            return mpmath.mpf(0)
        if self._approx is not None:
            return self.sign * self._approx
        with mp.workprec(APPROX_PREC):
            v = mpmath.exp(mpmath.mpf(self.r.numerator) / self.r.denominator)
            for a, m in self.atoms:
                v *= _atom_value(a) ** mpmath.mpf(f"{m.numerator}/{m.denominator}")
            return self.sign * v

    def to_fraction(self):
        """Exact rational value, or None."""
        if self.sign == 0:
            return Fraction(0)
        if not self.is_exact or self.r != 0:
            return None
        q = Fraction(1)
        for a, m in self.atoms:
            if not isinstance(a, int) or m.denominator != 1:
                return None
            q *= Fraction(a) ** m.numerator
        return q * self.sign

    def _signature(self):
        return (self.r, self.atoms) if self.is_exact else None

    # -- arithmetic ---------------------------------------------------
    def __mul__(self, other: "K") -> "K":
        if self.sign == 0 or other.sign == 0:
            return K(0)
        if self.is_exact and other.is_exact:
            atoms = dict(self.atoms)
            for a, m in other.atoms:
                atoms[a] = atoms.get(a, Fraction(0)) + m
            return K(self.sign * other.sign, self.r + other.r, atoms)
        return K.approx_only(self.approx() * other.approx())

    def inverse(self) -> "K":
        if self.sign == 0:
            raise ZeroDivisionError("inverse of zero constant")
        if self.is_exact:
            return K(self.sign, -self.r, {a: -m for a, m in self.atoms})
        return K.approx_only(1 / self.approx())

    def __neg__(self):
        return K(-self.sign, self.r, self.atoms, self._approx)

    def pow(self, q) -> "K":
        q = Fraction(q)
        if self.sign == 0:
            if q <= 0:
                raise ZeroDivisionError("zero to a nonpositive power")
            return K(0)
        if self.sign < 0:
            if q.denominator != 1:
                return K.approx_only(mpmath.power(self.approx(), mpmath.mpf(
                    f"{q.numerator}/{q.denominator}")))
            sign = 1 if q.numerator % 2 == 0 else -1
            base = (-self).pow(q)
            return base if sign > 0 else -base
        if self.is_exact:
            return K(1, self.r * q, {a: m * q for a, m in self.atoms})
        return K.approx_only(self.approx() ** mpmath.mpf(
            f"{q.numerator}/{q.denominator}"))

    def ratio_fraction(self, other: "K"):
        """self/other as an exact Fraction, or None."""
        if other.sign == 0:
            return None
        return (self * other.inverse()).to_fraction()

    # -- transcendental hooks ------------------------------------------
    def ln_terms(self):
        """ln(self) as a list of exact K terms, or None when outside the algebra."""
        if self.sign <= 0 or not self.is_exact:
            return None
        out = []
        if self.r != 0:
            out.append(K.from_fraction(self.r))
        for a, m in self.atoms:
            if isinstance(a, tuple):
                return None  # ln(ln p) leaves the algebra
            out.append(K.from_fraction(m) * K.atom(("log", a)))
        return out

    def exp_k(self):
        """exp(self) as a K, or None."""
        if self.sign == 0:
            return K.one()
        if not self.is_exact:
            return None
        q = self.to_fraction()
        if q is not None:
            return K(1, q)
        # c * ln(a)  ->  a^c
        logs = [(a, m) for a, m in self.atoms if isinstance(a, tuple)]
        rest = [(a, m) for a, m in self.atoms if not isinstance(a, tuple)]
        if self.r == 0 and len(logs) == 1 and logs[0][1] == 1:
            c = K(self.sign, Fraction(0), dict(rest)).to_fraction()
            if c is not None:
                return K(1, Fraction(0), {logs[0][0][1]: c})
        return None

    def __repr__(self):
        if self.sign == 0:
            return "K(0)"
        if not self.is_exact:
            return f"K(~{mpmath.nstr(self.approx(), 10)})"
        q = self.to_fraction()
        if q is not None:
            return f"K({q})"
        bits = []
        if self.r:
            bits.append(f"e^{self.r}")
        for a, m in sorted(self.atoms, key=str):
            name = f"ln({a[1]})" if isinstance(a, tuple) else str(a)
            bits.append(f"{name}^{m}" if m != 1 else name)
        s = "-" if self.sign < 0 else ""
        return f"K({s}{'*'.join(bits)})"


class CSum:
    """Formal sum of K terms; the expansion coefficient field."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        merged = []
        for t in terms:
            if t.sign == 0:
                continue
            for i, u in enumerate(merged):
                ratio = t.ratio_fraction(u) if t.is_exact and u.is_exact else None
                if ratio is not None:
                    s = 1 + ratio
                    merged[i] = u * K.from_fraction(s) if s != 0 else K(0)
                    break
            else:
                merged.append(t)
        self.terms = tuple(t for t in merged if t.sign != 0)

    @staticmethod
    def of(x) -> "CSum":
        if isinstance(x, CSum):
            return x
        if isinstance(x, K):
            return CSum([x])
        return CSum([K.from_fraction(x)])

    one = classmethod(lambda cls: cls.of(1))
    zero = classmethod(lambda cls: cls([]))

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_exact(self):
        return all(t.is_exact for t in self.terms)

    def approx(self):
        with mp.workprec(APPROX_PREC):
            return mpmath.fsum(t.approx() for t in self.terms)

    def sign(self) -> int:
        """-1/0/+1; raises AmbiguousSignError on an inexact near-zero sum."""
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            return self.terms[0].sign
        with mp.workprec(APPROX_PREC):
            v = self.approx()
            scale = max(abs(t.approx()) for t in self.terms)
            if abs(v) <= scale * _AMBIG_EPS:
                raise AmbiguousSignError(f"sum too close to zero: {self!r}")
            return 1 if v > 0 else -1

    def __add__(self, other):
        other = CSum.of(other)
        return CSum(self.terms + other.terms)

    def __neg__(self):
        return CSum([-t for t in self.terms])

    def __sub__(self, other):
        return self + (-CSum.of(other))

    def __mul__(self, other):
        if isinstance(other, (K, Fraction, int)):
            other = CSum.of(other)
        return CSum([a * b for a in self.terms for b in other.terms])

    def scale(self, q) -> "CSum":
        k = K.from_fraction(q)
        return CSum([t * k for t in self.terms])

    def to_fraction(self):
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            return self.terms[0].to_fraction()
        return None

    def as_single_k(self) -> K:
        """Collapse to one K (exactly when possible, else approximate)."""
        if not self.terms:
            return K(0)
        if len(self.terms) == 1:
            return self.terms[0]
        return K.approx_only(self.approx())

    def equals(self, other) -> bool:
        return (self - CSum.of(other)).is_zero

    def exp_k(self):
        """exp(self) as a single K, or None."""
        out = K.one()
        for t in self.terms:
            e = t.exp_k()
            if e is None:
                return None
            out = out * e
        return out

    def ln_terms(self):
        return self.as_single_k().ln_terms()

    def __repr__(self):
        if not self.terms:
            return "CSum(0)"
        return "CSum(" + " + ".join(repr(t)[2:-1] for t in self.terms) + ")"
